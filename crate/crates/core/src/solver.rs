//! Classical solvers and the chain-strength sweep harness.
//!
//! Simulated annealing uses single-spin Metropolis updates in index order with
//! a geometric temperature ladder. Randomness comes from ChaCha8 seeded with
//! the caller's seed; restart `r` uses stream `r`, so results are identical
//! across platforms and thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::embedding::{build_with_strengths, CheckedEmbedding, EmbeddedIsing, HFieldDistribution};
use crate::error::{Error, Result};
use crate::ising::{enumerate_ground_states_with_cap, GroundStateSet, IsingProblem, SpinConfig, DEFAULT_ENUMERATION_CAP};
use crate::oracle::majority_vote_decode;
use crate::scalar::Scalar;

/// Exact ground states, for problems of at most 24 qubits.
pub fn solve_exhaustive<S: Scalar>(problem: &IsingProblem<S>) -> Result<GroundStateSet<S>> {
    enumerate_ground_states_with_cap(problem, DEFAULT_ENUMERATION_CAP)
}

/// Geometric temperature ladder from `t_initial` down to `t_final`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub t_initial: f64,
    pub t_final: f64,
    pub sweeps: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            t_initial: 2.0,
            t_final: 0.05,
            sweeps: 200,
        }
    }
}

impl AnnealSchedule {
    fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::InvalidArgument("sweeps must be at least 1".into()));
        }
        if !(self.t_initial > 0.0 && self.t_final > 0.0) || !self.t_initial.is_finite() || !self.t_final.is_finite() {
            return Err(Error::InvalidArgument("temperatures must be positive and finite".into()));
        }
        Ok(())
    }

    /// Temperature of sweep `k`.
    pub fn temperature(&self, k: usize) -> f64 {
        if self.sweeps == 1 {
            return self.t_final;
        }
        let frac = k as f64 / (self.sweeps - 1) as f64;
        self.t_initial * (self.t_final / self.t_initial).powf(frac)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    pub schedule: AnnealSchedule,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            schedule: AnnealSchedule::default(),
            restarts: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartResult<S> {
    pub restart: usize,
    /// Lowest-energy configuration seen during this restart.
    pub config: SpinConfig,
    pub energy: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaOutcome<S> {
    pub best: SpinConfig,
    pub energy: S,
    pub trace: Vec<RestartResult<S>>,
}

/// Problem data in flat `f64` arrays for the inner loop.
struct Dense {
    fields: Vec<f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl Dense {
    fn new<S: Scalar>(problem: &IsingProblem<S>) -> Self {
        Self {
            fields: problem.fields().iter().map(|h| h.to_f64()).collect(),
            neighbors: (0..problem.num_qubits())
                .map(|i| problem.neighbors(i).iter().map(|&(j, v)| (j, v.to_f64())).collect())
                .collect(),
        }
    }

    fn local_field(&self, spins: &[i8], i: usize) -> f64 {
        self.fields[i]
            + self.neighbors[i]
                .iter()
                .map(|&(j, v)| v * spins[j] as f64)
                .sum::<f64>()
    }

    fn energy(&self, spins: &[i8]) -> f64 {
        let field: f64 = self.fields.iter().zip(spins).map(|(h, &s)| h * s as f64).sum();
        let pairs: f64 = (0..spins.len())
            .flat_map(|i| self.neighbors[i].iter().filter(move |&&(j, _)| j > i).map(move |&(j, v)| (i, j, v)))
            .map(|(i, j, v)| v * (spins[i] * spins[j]) as f64)
            .sum();
        field + pairs
    }
}

/// One annealing run from a uniformly random start.
fn anneal_once(dense: &Dense, schedule: &AnnealSchedule, rng: &mut ChaCha8Rng) -> Vec<i8> {
    let n = dense.fields.len();
    let mut spins: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    let mut energy = dense.energy(&spins);
    let mut best = spins.clone();
    let mut best_energy = energy;
    for k in 0..schedule.sweeps {
        let beta = 1.0 / schedule.temperature(k);
        for i in 0..n {
            let delta = -2.0 * spins[i] as f64 * dense.local_field(&spins, i);
            if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                spins[i] = -spins[i];
                energy += delta;
            }
        }
        if energy < best_energy - 1e-12 {
            best_energy = energy;
            best.copy_from_slice(&spins);
        }
    }
    best
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Seeded simulated annealing; the result depends only on the inputs.
pub fn solve_sa<S: Scalar>(problem: &IsingProblem<S>, params: &SaParams) -> Result<SaOutcome<S>> {
    params.schedule.validate()?;
    if params.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let dense = Dense::new(problem);
    let trace: Vec<RestartResult<S>> = (0..params.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = restart_rng(params.seed, restart);
            let spins = anneal_once(&dense, &params.schedule, &mut rng);
            let energy = problem.energy_of(&spins);
            RestartResult {
                restart,
                config: SpinConfig::from_spins_unchecked(spins),
                energy,
            }
        })
        .collect();
    let best = trace
        .iter()
        .fold(None, |acc: Option<&RestartResult<S>>, r| match acc {
            Some(a) if a.energy <= r.energy => Some(a),
            _ => Some(r),
        })
        .expect("at least one restart");
    Ok(SaOutcome {
        best: best.config.clone(),
        energy: best.energy,
        trace,
    })
}

/// Expected time to see a success with probability `target`, given per-run
/// success probability `s` and run time `anneal_time`.
///
/// `s = 0` gives infinity; `s ≥ target` gives one run, `anneal_time`.
pub fn tts(s: f64, target: f64, anneal_time: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!("target probability {target} is not in (0, 1)")));
    }
    if !anneal_time.is_finite() || anneal_time <= 0.0 {
        return Err(Error::InvalidArgument(format!("anneal time {anneal_time} must be positive")));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("success probability {s} is not in [0, 1]")));
    }
    if s == 0.0 {
        return Ok(f64::INFINITY);
    }
    if s >= target {
        return Ok(anneal_time);
    }
    Ok(anneal_time * (1.0 - target).ln() / (1.0 - s).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig<S> {
    /// Chain coupler magnitudes to try; every chain gets the same value.
    pub grid: Vec<S>,
    pub sa: SaParams,
    /// Rescale the embedded problem so that `max(max |J|, F)` equals this value.
    pub cap: Option<S>,
    /// Count majority-vote repaired samples as successes.
    pub majority_vote: bool,
    pub target: f64,
    pub anneal_time: f64,
    /// Logical ground energy; computed exhaustively when absent.
    pub ground_energy: Option<S>,
}

impl<S: Scalar> SweepConfig<S> {
    pub fn new(grid: Vec<S>) -> Self {
        Self {
            grid,
            sa: SaParams::default(),
            cap: None,
            majority_vote: false,
            target: 0.999,
            anneal_time: 1.0,
            ground_energy: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint<S> {
    pub chain_strength: S,
    pub success_probability: f64,
    pub broken_chain_rate: f64,
    pub tts: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<S> {
    pub points: Vec<SweepPoint<S>>,
    pub ground_energy: S,
}

impl<S: Scalar> SweepResult<S> {
    pub const CSV_HEADER: &'static str = "F,success_prob,broken_rate,tts,samples,seed";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.chain_strength, p.success_probability, p.broken_chain_rate, p.tts, p.samples, p.seed
            ));
        }
        out
    }

    /// Grid index with the smallest TTS (first one on ties).
    pub fn best_index(&self) -> Option<usize> {
        (0..self.points.len()).fold(None, |acc, i| match acc {
            Some(b) if self.points[b].tts <= self.points[i].tts => Some(b),
            _ => Some(i),
        })
    }
}

/// The embedded problem for one sweep point, after the optional cap rescaling.
pub fn sweep_instance<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    magnitude: S,
    cap: Option<S>,
) -> Result<EmbeddedIsing<S>> {
    if magnitude < S::zero() {
        return Err(Error::InvalidArgument(format!("chain strength magnitude {magnitude} is negative")));
    }
    let embedded = build_with_strengths(problem, emb, dist, |_, _| -magnitude);
    match cap {
        None => Ok(embedded),
        Some(cap) if cap <= S::zero() => Err(Error::InvalidArgument(format!("coupling cap {cap} must be positive"))),
        Some(cap) => {
            let largest = problem.max_abs_coupler().max_of(magnitude);
            if largest == S::zero() {
                Ok(embedded)
            } else {
                Ok(embedded.scaled(cap / largest))
            }
        }
    }
}

/// Runs the annealer at every grid point and estimates success probability and TTS.
///
/// Every point uses the same seed, so duplicate grid points give identical
/// rows and neighbouring points are compared on the same random streams.
pub fn sweep_chain_strength<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    config: &SweepConfig<S>,
) -> Result<SweepResult<S>> {
    if config.grid.is_empty() {
        return Err(Error::InvalidArgument("chain strength grid is empty".into()));
    }
    tts(0.5, config.target, config.anneal_time)?;
    let ground_energy = match config.ground_energy {
        Some(e) => e,
        None => solve_exhaustive(problem)?.energy,
    };
    let points = config
        .grid
        .par_iter()
        .map(|&magnitude| {
            let embedded = sweep_instance(problem, emb, dist, magnitude, config.cap)?;
            let outcome = solve_sa(embedded.physical(), &config.sa)?;
            let samples = outcome.trace.len();
            let mut successes = 0usize;
            let mut broken = 0usize;
            for run in &outcome.trace {
                let decoded = majority_vote_decode(&run.config, &embedded)?;
                let any_broken = decoded.broken.iter().any(|&b| b);
                if any_broken {
                    broken += 1;
                }
                let energy = problem.energy(&decoded.logical)?;
                if energy.approx_eq(ground_energy) && (config.majority_vote || !any_broken) {
                    successes += 1;
                }
            }
            let s = successes as f64 / samples as f64;
            Ok(SweepPoint {
                chain_strength: magnitude,
                success_probability: s,
                broken_chain_rate: broken as f64 / samples as f64,
                tts: tts(s, config.target, config.anneal_time)?,
                samples,
                seed: config.sa.seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { points, ground_energy })
}
