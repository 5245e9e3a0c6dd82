// Searches for the field split of the star chain that minimizes its
// enumerated bound, and compares it with the standard splits.

use chainbound::bounds::{optimize_distribution, tight_bound};
use chainbound::embedding::{distribute_fields, FieldStrategy};
use chainbound::fixtures::Star3;
use chainbound::{Rational, Scalar};

pub fn run_example() -> chainbound::Result<()> {
    let star = Star3::new(Rational::from_int(1));
    let emb = star.checked();
    for (name, strategy) in [
        ("uniform", FieldStrategy::Uniform),
        ("choi2", FieldStrategy::Choi2),
        ("single", FieldStrategy::Single),
    ] {
        let dist = distribute_fields(&star.problem, &emb, &strategy)?;
        let bound = tight_bound(&star.problem, &emb, &dist, 0)?;
        println!("{name:>8}: tight bound {}", bound.value);
    }
    let best = optimize_distribution(&star.problem, &emb, 0)?;
    println!(
        "optimized: bound {} with split {:?}",
        best.bound,
        best.fields.iter().map(|v| v.to_string()).collect::<Vec<_>>()
    );
    let error = (best.bound - Rational::from_int(5)).to_f64().abs();
    assert!(error <= 1.0 / 1024.0);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
