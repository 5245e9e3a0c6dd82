// Sweeps a uniform chain strength over a seeded four-qubit instance with a
// unit coupling cap: weak chains break, strong chains squeeze the logical
// couplers, and the time to solution is smallest in between.

use chainbound::embedding::{distribute_fields, FieldStrategy};
use chainbound::fixtures::{sweep_demo, SWEEP_DEMO_SEED};
use chainbound::solver::{sweep_chain_strength, tts, SweepConfig};
use chainbound::Scalar;

pub fn run_example() -> chainbound::Result<()> {
    let instance = sweep_demo(SWEEP_DEMO_SEED);
    let problem = instance.problem.map_scalar(|v| v.to_f64());
    let emb = instance.embedding.check(&problem, &instance.hardware)?;
    let dist = distribute_fields(&problem, &emb, &FieldStrategy::Choi2)?;

    let grid: Vec<f64> = (1..=16).map(|k| k as f64 / 4.0).collect();
    let mut config = SweepConfig::new(grid);
    config.cap = Some(1.0);
    let result = sweep_chain_strength(&problem, &emb, &dist, &config)?;
    print!("{}", result.to_csv());

    let best = result.best_index().expect("grid is nonempty");
    println!("best F = {} (TTS {})", result.points[best].chain_strength, result.points[best].tts);
    assert!(best > 0 && best + 1 < result.points.len());

    println!("tts(0.5, 0.999, 2) = {}", tts(0.5, 0.999, 2.0)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
