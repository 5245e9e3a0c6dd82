//! Runs every example in `examples/` as a test.

mod ising_ground_states {
    #![allow(dead_code)]
    include!("../examples/ising_ground_states.rs");
}

#[test]
fn ising_ground_states_runs() {
    ising_ground_states::run_example().expect("ising_ground_states");
}

mod star3_bounds {
    #![allow(dead_code)]
    include!("../examples/star3_bounds.rs");
}

#[test]
fn star3_bounds_runs() {
    star3_bounds::run_example().expect("star3_bounds");
}

mod optimize_fields {
    #![allow(dead_code)]
    include!("../examples/optimize_fields.rs");
}

#[test]
fn optimize_fields_runs() {
    optimize_fields::run_example().expect("optimize_fields");
}

mod admissibility {
    #![allow(dead_code)]
    include!("../examples/admissibility.rs");
}

#[test]
fn admissibility_runs() {
    admissibility::run_example().expect("admissibility");
}

mod verify_oracle {
    #![allow(dead_code)]
    include!("../examples/verify_oracle.rs");
}

#[test]
fn verify_oracle_runs() {
    verify_oracle::run_example().expect("verify_oracle");
}

mod jsp_encoding {
    #![allow(dead_code)]
    include!("../examples/jsp_encoding.rs");
}

#[test]
fn jsp_encoding_runs() {
    jsp_encoding::run_example().expect("jsp_encoding");
}

mod chain_strength_sweep {
    #![allow(dead_code)]
    include!("../examples/chain_strength_sweep.rs");
}

#[test]
fn chain_strength_sweep_runs() {
    chain_strength_sweep::run_example().expect("chain_strength_sweep");
}
