// Brute-force checks around the tight bound of the star chain: just above
// it no ground state breaks a chain, just below it some neighbour pattern
// makes a broken chain win.

use chainbound::bounds::certified_tight_bound;
use chainbound::embedding::{distribute_fields, FieldStrategy};
use chainbound::fixtures::Star3;
use chainbound::oracle::{probe_tightness, verify_above_tight};
use chainbound::{Rational, Scalar};

pub fn run_example() -> chainbound::Result<()> {
    let star = Star3::new(Rational::from_int(1));
    let emb = star.checked();
    let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2)?;
    let eps = Rational::from_ratio(1, 64);

    let above = verify_above_tight(&star.problem, &emb, &dist, eps)?;
    println!(
        "tight + {eps}: {} ground states, all chains aligned: {}",
        above.ground_states, above.all_chains_aligned
    );
    assert!(above.passed);

    let certified = certified_tight_bound(&star.problem, &emb, &dist, 0)?;
    println!("certification {:?}", certified.certification);
    let probe = probe_tightness(&star.problem, &emb, &dist, certified.bound.witness.as_ref(), 0, eps)?
        .expect("star chain has a witness");
    println!(
        "magnitude {}: broken energy {} vs aligned {} / {} with neighbours {:?}",
        probe.magnitude, probe.broken_energy, probe.aligned_up_energy, probe.aligned_down_energy, probe.neighbor_spins
    );
    assert!(probe.found);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
