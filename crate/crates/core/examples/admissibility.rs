// Subset-wise admissibility of candidate chain strengths on the star chain
// when the whole field sits on a single leaf.

use chainbound::bounds::check_admissible;
use chainbound::embedding::{distribute_fields, FieldStrategy};
use chainbound::fixtures::Star3;
use chainbound::{Rational, Scalar};

pub fn run_example() -> chainbound::Result<()> {
    let star = Star3::new(Rational::from_int(1));
    let emb = star.checked();
    let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::SingleAt(vec![1, 0, 0, 0]))?;
    let zero = Rational::from_int(0);
    for f in [1, 3, 6, 9] {
        let strength = Rational::from_int(f);
        let report = check_admissible(&star.problem, &emb, &dist, &[strength, zero, zero, zero])?;
        match report.worst(0) {
            None => println!("F = {strength}: admissible"),
            Some(v) => println!(
                "F = {strength}: subset {:?} violated by {}",
                v.subset, -v.slack
            ),
        }
    }
    let report = check_admissible(&star.problem, &emb, &dist, &[zero; 4])?;
    println!("smallest admissible magnitude {}", report.thresholds[0]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
