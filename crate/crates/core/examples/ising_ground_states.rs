// Builds a small frustrated Ising problem, enumerates its ground states and
// checks a hand-written minor embedding of it.

use chainbound::embedding::{validate_embedding, EdgeMapping, HardwareGraph, MinorEmbedding};
use chainbound::ising::{enumerate_ground_states, IsingProblem};
use chainbound::{Rational, Scalar};

pub fn run_example() -> chainbound::Result<()> {
    let q = |n, d| Rational::from_ratio(n, d);
    // An antiferromagnetic triangle with a small bias on qubit 0.
    let problem = IsingProblem::new(
        vec![q(1, 2), q(0, 1), q(0, 1)],
        [(0, 1, q(1, 1)), (1, 2, q(1, 1)), (0, 2, q(1, 1))],
    )?;
    let ground = enumerate_ground_states(&problem)?;
    println!("ground energy {} with {} ground states", ground.energy, ground.len());
    for config in ground.configs() {
        println!("  {:?}", config.spins());
    }
    assert_eq!(ground.energy, q(-3, 2));
    assert_eq!(ground.len(), 3);

    // Qubit 0 becomes a two-node chain (hardware 0-3); qubits 1 and 2 stay single.
    let hardware = HardwareGraph::new(4, [(0, 3), (0, 1), (1, 2), (3, 2)])?;
    let embedding = MinorEmbedding {
        chains: vec![vec![0, 3], vec![1], vec![2]],
        edge_map: vec![
            EdgeMapping { i: 0, j: 1, tau_ij: 0, tau_ji: 1 },
            EdgeMapping { i: 1, j: 2, tau_ij: 1, tau_ji: 2 },
            EdgeMapping { i: 0, j: 2, tau_ij: 3, tau_ji: 2 },
        ],
    };
    let report = validate_embedding(&problem, &hardware, &embedding);
    println!("embedding valid: {}", report.is_valid());
    assert!(report.is_valid());

    let mut broken = embedding.clone();
    broken.edge_map[2].tau_ij = 0;
    let report = validate_embedding(&problem, &hardware, &broken);
    println!("after remapping (0,2) onto a missing edge:\n{report}");
    assert!(!report.is_valid());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
