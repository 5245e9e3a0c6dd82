// Every chain-strength bound on the four-node star chain with `h = 1`.

use chainbound::bounds::{bounds_report, ReportOptions};
use chainbound::embedding::{distribute_fields, FieldStrategy};
use chainbound::fixtures::Star3;
use chainbound::{Rational, Scalar};

pub fn run_example() -> chainbound::Result<()> {
    let star = Star3::new(Rational::from_int(1));
    let emb = star.checked();
    let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2)?;
    let report = bounds_report(&star.problem, &emb, &dist, &ReportOptions::default())?;
    let centre = &report.qubits[0];
    println!("C = {}, leaves = {}", centre.c_value, centre.leaves);
    println!("choi1 = {}", centre.choi1);
    println!("choi2 = {:?}", centre.choi2.map(|v| v.to_string()));
    println!("tight = {} ({:?})", centre.tight, centre.certification);
    if let Some(w) = &centre.witness {
        println!("witness subset {:?}, boundary {}", w.subset, w.boundary_size);
    }
    println!("field split {:?}", centre.fields.iter().map(|v| v.to_string()).collect::<Vec<_>>());

    assert_eq!(centre.c_value, Rational::from_int(12));
    assert_eq!(centre.choi2, Some(Rational::from_int(8)));
    assert_eq!(centre.tight, Rational::from_int(6));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
