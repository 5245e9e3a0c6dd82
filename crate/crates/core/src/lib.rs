//! Chain-strength bounds for minor-embedded Ising problems.
//!
//! The crate covers the whole path from a logical Ising problem to a tuned
//! embedded one: exact ground-state enumeration, embedding validation and
//! field splitting, closed-form and enumerated lower bounds on the chain
//! coupling, brute-force verification, a job-shop scheduling encoder, and a
//! seeded simulated-annealing harness for sweeping the chain strength.
//!
//! Two scalar backends are supported through [`Scalar`]: exact rationals
//! ([`Rational`]) and `f64`.

pub mod bounds;
pub mod commands;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod ising;
pub mod jsp;
pub mod oracle;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
