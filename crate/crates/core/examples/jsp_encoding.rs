// Encodes a two-job, two-machine scheduling instance as an Ising problem,
// solves it exhaustively and decodes the optimum back to a schedule.

use chainbound::jsp::{decode, encode, report_gap_quantities, JspInstance};
use chainbound::solver::solve_exhaustive;
use chainbound::{Rational, Scalar};

pub fn run_example() -> chainbound::Result<()> {
    // Job 0 runs on machine 0 then 1; job 1 only needs machine 0.
    let instance = JspInstance::new(vec![vec![0, 1], vec![0, 1]], vec![vec![1, 1], vec![1, 0]], 3, Rational::from_int(1))?;
    let encoding = encode::<Rational>(&instance)?;
    println!(
        "{} variables, {} couplers, offset {}",
        encoding.problem.num_qubits(),
        encoding.problem.couplers().len(),
        encoding.offset
    );
    let ground = solve_exhaustive(&encoding.problem)?;
    println!("minimum penalty {}", ground.energy + encoding.offset);
    let best = ground.configs().next().expect("at least one ground state");
    let decoded = decode(&encoding, &best)?;
    match &decoded.schedule {
        Some(s) => println!("schedule {:?}, makespan {}", s.starts, s.makespan),
        None => println!("violations: {:?}", decoded.violations),
    }
    assert!(decoded.is_feasible());

    let gap = report_gap_quantities(&encoding);
    println!(
        "C ranges over [{}, {}]; {} of {} variables sit at E/2",
        gap.c_min,
        gap.c_max,
        gap.matching_half_scale,
        gap.variables.len()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
