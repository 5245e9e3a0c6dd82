//! Command-line front end: argument definitions and dispatch.
//!
//! Every command reads the JSON formats of [`crate::io`] and writes JSON (or
//! CSV for `sweep`) to stdout or `--output`. Arithmetic is `f64` unless
//! `--exact` is given.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bounds::{bounds_report, check_admissible, optimize_all, tight_bound, ReportOptions};
use crate::embedding::{distribute_fields, CheckedEmbedding, FieldStrategy, HFieldDistribution, MinorEmbedding};
use crate::error::{Error, Result};
use crate::io;
use crate::ising::IsingProblem;
use crate::jsp::{decode, encode, report_gap_quantities};
use crate::oracle::{probe_tightness, verify_no_domain_wall};
use crate::scalar::{Rational, Scalar};
use crate::solver::{self, AnnealSchedule, SaParams, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "chainbound", version, about = "Chain-strength bounds for minor-embedded Ising problems")]
pub struct Cli {
    /// Use exact rational arithmetic instead of f64.
    #[arg(long, global = true)]
    pub exact: bool,

    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// C(i), both closed-form bounds, the enumerated bound and its certification per chain.
    Bounds {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also optimize the field split of every chain.
        #[arg(long)]
        optimize: bool,
        /// Chain strength magnitudes at which to report the worst admissibility violation.
        #[arg(long = "trial", value_delimiter = ',')]
        trials: Vec<String>,
    },
    /// Field split minimizing the enumerated bound of every chain.
    OptimizeH {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Checks |h(W)| ≤ J(W) + |∂W|·F on every chain subset.
    Admissible {
        #[command(flatten)]
        instance: InstanceArgs,
        /// One magnitude for every chain, or one per chain separated by commas.
        #[arg(long = "strength", value_delimiter = ',', required = true)]
        strengths: Vec<String>,
    },
    /// Enumerates all embedded ground states at F = -(bound + eps) and checks no chain breaks.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value = "1/64")]
        eps: String,
        /// Explicit magnitudes (one, or one per chain) instead of bound + eps.
        #[arg(long = "strength", value_delimiter = ',')]
        strengths: Vec<String>,
    },
    /// Searches neighbour spins for a broken chain winning at F = -(bound - eps/|∂W|).
    Probe {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        qubit: usize,
        #[arg(long, default_value = "1/64")]
        eps: String,
    },
    /// Encodes a job-shop instance as an Ising problem.
    EncodeJsp {
        /// Job-shop JSON file.
        #[arg(long)]
        instance: PathBuf,
        /// Solve exhaustively and decode the schedule instead of printing the encoding.
        #[arg(long)]
        solve: bool,
        /// Print the C(i) and chain-strength rule report instead of the encoding.
        #[arg(long)]
        gap: bool,
    },
    /// Solves a logical problem exhaustively or by simulated annealing.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Exhaustive)]
        method: Method,
        #[command(flatten)]
        sa: SaArgs,
    },
    /// Success probability and TTS over a grid of chain strengths (CSV).
    Sweep {
        #[command(flatten)]
        instance: InstanceArgs,
        /// `start:stop:count` or comma-separated magnitudes.
        #[arg(long)]
        grid: String,
        /// Rescale so that max(|J|, |F|) equals this value.
        #[arg(long)]
        cap: Option<String>,
        /// Accept majority-vote repaired samples as successes.
        #[arg(long)]
        majority: bool,
        #[arg(long, default_value_t = 0.999)]
        target: f64,
        #[arg(long = "anneal-time", default_value_t = 1.0)]
        anneal_time: f64,
        #[command(flatten)]
        sa: SaArgs,
    },
    /// Time to solution for success probability s.
    Tts {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0.999)]
        p: f64,
        #[arg(long = "anneal-time", default_value_t = 1.0)]
        anneal_time: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exhaustive,
    Sa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Uniform,
    Choi2,
    Single,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Logical problem JSON.
    #[arg(long)]
    pub problem: PathBuf,
    /// Hardware graph JSON; omit together with --embedding for the identity embedding.
    #[arg(long, requires = "embedding")]
    pub hardware: Option<PathBuf>,
    /// Embedding JSON.
    #[arg(long, requires = "hardware")]
    pub embedding: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Strategy::Choi2)]
    pub strategy: Strategy,
    /// Explicit field split JSON; overrides --strategy.
    #[arg(long = "h-dist")]
    pub h_dist: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SaArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = AnnealSchedule::default().sweeps)]
    pub sweeps: usize,
    /// Annealing runs (samples per grid point for `sweep`).
    #[arg(long, default_value_t = SaParams::default().restarts)]
    pub restarts: usize,
    #[arg(long = "t-initial", default_value_t = AnnealSchedule::default().t_initial)]
    pub t_initial: f64,
    #[arg(long = "t-final", default_value_t = AnnealSchedule::default().t_final)]
    pub t_final: f64,
}

impl SaArgs {
    fn params(&self) -> SaParams {
        SaParams {
            schedule: AnnealSchedule {
                t_initial: self.t_initial,
                t_final: self.t_final,
                sweeps: self.sweeps,
            },
            restarts: self.restarts,
            seed: self.seed,
        }
    }
}

/// Output text and process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }

    fn json(value: &Value) -> Self {
        Self::ok(io::to_pretty(value))
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let out = if cli.exact {
        dispatch::<Rational>(&cli.command)?
    } else {
        dispatch::<f64>(&cli.command)?
    };
    if let Some(path) = &cli.output {
        std::fs::write(path, &out.text)?;
        return Ok(Output {
            text: String::new(),
            code: out.code,
        });
    }
    Ok(out)
}

struct Loaded<S> {
    problem: IsingProblem<S>,
    emb: CheckedEmbedding,
    dist: HFieldDistribution<S>,
}

fn load<S: Scalar>(args: &InstanceArgs) -> Result<Loaded<S>> {
    let problem: IsingProblem<S> = io::problem_from_json(&io::read_json(&args.problem)?)?;
    let (hw, emb) = match (&args.hardware, &args.embedding) {
        (Some(h), Some(e)) => (
            io::hardware_from_json(&io::read_json(h)?)?,
            io::embedding_from_json(&io::read_json(e)?)?,
        ),
        _ => MinorEmbedding::identity(&problem),
    };
    let emb = emb.check(&problem, &hw)?;
    let dist = match &args.h_dist {
        Some(path) => {
            let fields = io::distribution_from_json(&io::read_json(path)?)?;
            HFieldDistribution::custom(&problem, &emb, fields)?
        }
        None => {
            let strategy = match args.strategy {
                Strategy::Uniform => FieldStrategy::Uniform,
                Strategy::Choi2 => FieldStrategy::Choi2,
                Strategy::Single => FieldStrategy::Single,
            };
            distribute_fields(&problem, &emb, &strategy)?
        }
    };
    Ok(Loaded { problem, emb, dist })
}

fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    S::from_json(&Value::String(text.trim().to_string()))
}

/// One value for every chain, or exactly one per chain.
fn per_chain<S: Scalar>(texts: &[String], chains: usize) -> Result<Vec<S>> {
    let values = texts.iter().map(|t| parse_scalar(t)).collect::<Result<Vec<S>>>()?;
    match values.len() {
        1 => Ok(vec![values[0]; chains]),
        n if n == chains => Ok(values),
        n => Err(Error::Dimension { expected: chains, got: n }),
    }
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma-separated list.
pub fn parse_grid<S: Scalar>(text: &str) -> Result<Vec<S>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let start: S = parse_scalar(start)?;
            let stop: S = parse_scalar(stop)?;
            let count: i64 = count
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("grid count {count:?} is not an integer")))?;
            if count < 1 {
                return Err(Error::InvalidArgument("grid needs at least one point".into()));
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            let step = (stop - start) / S::from_int(count - 1);
            Ok((0..count).map(|k| start + step * S::from_int(k)).collect())
        }
        [_] => text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(parse_scalar)
            .collect(),
        _ => Err(Error::Parse(format!("grid {text:?} is neither start:stop:count nor a list"))),
    }
}

fn dispatch<S: Scalar>(command: &Command) -> Result<Output> {
    match command {
        Command::Bounds {
            instance,
            optimize,
            trials,
        } => {
            let l = load::<S>(instance)?;
            let options = ReportOptions {
                optimize: *optimize,
                trial_strengths: trials.iter().map(|t| parse_scalar(t)).collect::<Result<_>>()?,
            };
            let report = bounds_report(&l.problem, &l.emb, &l.dist, &options)?;
            Ok(Output::json(&io::bounds_report_to_json(&report)))
        }
        Command::OptimizeH { instance } => {
            let l = load::<S>(instance)?;
            let (dist, chains) = optimize_all(&l.problem, &l.emb)?;
            Ok(Output::json(&json!({
                "h_dist": io::distribution_to_json(dist.all())["h_dist"],
                "qubits": chains.iter().map(io::optimized_to_json).collect::<Vec<_>>(),
            })))
        }
        Command::Admissible { instance, strengths } => {
            let l = load::<S>(instance)?;
            let f = per_chain::<S>(strengths, l.emb.num_logical())?;
            let report = check_admissible(&l.problem, &l.emb, &l.dist, &f)?;
            let code = if report.is_admissible() { 0 } else { 1 };
            Ok(Output {
                text: io::to_pretty(&io::admissibility_to_json(&report)),
                code,
            })
        }
        Command::Verify {
            instance,
            eps,
            strengths,
        } => {
            let l = load::<S>(instance)?;
            let magnitudes = if strengths.is_empty() {
                let eps: S = parse_scalar(eps)?;
                (0..l.emb.num_logical())
                    .map(|q| tight_bound(&l.problem, &l.emb, &l.dist, q).map(|t| t.value + eps))
                    .collect::<Result<Vec<_>>>()?
            } else {
                per_chain::<S>(strengths, l.emb.num_logical())?
            };
            let out = verify_no_domain_wall(&l.problem, &l.emb, &l.dist, &magnitudes)?;
            let mut value = io::verify_to_json(&out);
            value["magnitudes"] = Value::Array(magnitudes.iter().map(|m| m.to_json()).collect());
            Ok(Output {
                text: io::to_pretty(&value),
                code: if out.passed { 0 } else { 1 },
            })
        }
        Command::Probe { instance, qubit, eps } => {
            let l = load::<S>(instance)?;
            if *qubit >= l.emb.num_logical() {
                return Err(Error::InvalidArgument(format!("qubit {qubit} out of range")));
            }
            let eps: S = parse_scalar(eps)?;
            let bound = tight_bound(&l.problem, &l.emb, &l.dist, *qubit)?;
            let certification =
                crate::bounds::certify_tightness(&l.problem, &l.emb, &l.dist, *qubit, bound.witness.as_ref());
            let value = match probe_tightness(&l.problem, &l.emb, &l.dist, bound.witness.as_ref(), *qubit, eps)? {
                Some(p) => {
                    let mut v = io::probe_to_json(&p);
                    v["tight"] = bound.value.to_json();
                    v["certified"] = json!(certification.is_certified());
                    v
                }
                None => json!({"qubit": qubit, "found": false, "vacuous": true, "tight": bound.value.to_json()}),
            };
            Ok(Output::json(&value))
        }
        Command::EncodeJsp { instance, solve, gap } => {
            let inst = io::jsp_from_json(&io::read_json(instance)?)?;
            let enc = encode::<S>(&inst)?;
            if *gap {
                return Ok(Output::json(&io::gap_report_to_json(&report_gap_quantities(&enc))));
            }
            if *solve {
                let ground = solver::solve_exhaustive(&enc.problem)?;
                let config = ground.configs().next().expect("ground set is nonempty");
                let decoded = decode(&enc, &config)?;
                let mut value = io::decoded_to_json(&decoded);
                value["energy"] = (ground.energy + enc.offset).to_json();
                return Ok(Output::json(&value));
            }
            Ok(Output::json(&io::encoding_to_json(&enc)))
        }
        Command::Solve { problem, method, sa } => {
            let problem: IsingProblem<S> = io::problem_from_json(&io::read_json(problem)?)?;
            let value = match method {
                Method::Exhaustive => io::ground_states_to_json(&solver::solve_exhaustive(&problem)?),
                Method::Sa => io::sa_outcome_to_json(&solver::solve_sa(&problem, &sa.params())?),
            };
            Ok(Output::json(&value))
        }
        Command::Sweep {
            instance,
            grid,
            cap,
            majority,
            target,
            anneal_time,
            sa,
        } => {
            let l = load::<S>(instance)?;
            let mut config = SweepConfig::new(parse_grid::<S>(grid)?);
            config.sa = sa.params();
            config.cap = cap.as_deref().map(parse_scalar).transpose()?;
            config.majority_vote = *majority;
            config.target = *target;
            config.anneal_time = *anneal_time;
            let result = solver::sweep_chain_strength(&l.problem, &l.emb, &l.dist, &config)?;
            Ok(Output::ok(result.to_csv()))
        }
        Command::Tts { s, p, anneal_time } => {
            let v = solver::tts(*s, *p, *anneal_time)?;
            Ok(Output::ok(format!("{v}\n")))
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code,
/// printing results to stdout and errors to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
