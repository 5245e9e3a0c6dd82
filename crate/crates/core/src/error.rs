use thiserror::Error;

use crate::embedding::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{what} has size {size}, above the cap of {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(ValidationReport),

    #[error("h-field distribution violates a constraint: {0}")]
    Constraint(String),

    #[error("chain strength for qubit {qubit} must be strictly negative, got {value}")]
    Sign { qubit: usize, value: String },

    #[error("invalid job-shop instance: {0}")]
    InvalidInstance(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeCap { .. } => 2,
            Error::Parse(_) | Error::Json(_) | Error::Io(_) => 3,
            _ => 1,
        }
    }
}
