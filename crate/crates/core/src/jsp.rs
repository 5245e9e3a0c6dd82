//! Job-shop scheduling as a time-indexed penalty Hamiltonian.
//!
//! Binary variable `x_{n,k;t}` is 1 when operation `k` of job `n` starts at
//! time `t ∈ [0, T)`. The objective is `E · (h1 + h2 + h3 + h4)`:
//!
//! - `h1`: each operation starts exactly once, `(Σ_t x - 1)^2`;
//! - `h2`: operation `k + 1` of a job may not start before operation `k` ends;
//! - `h3`: the last operation of each job ends by `T`;
//! - `h4`: two operations on one machine may not overlap, and may not start
//!   together unless one of them has zero duration.
//!
//! The QUBO is converted to Ising form with `x = (1 + s) / 2`; the constant
//! is kept so that `ising energy + offset` equals the penalty value exactly.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ising::{IsingProblem, SpinConfig};
use crate::scalar::{Rational, Scalar};

/// Largest number of variables [`encode`] accepts.
pub const MAX_VARIABLES: usize = 1 << 20;

/// Operation `op` of job `job`.
pub type OpId = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct JspInstance {
    /// `machines[n][k]`: machine running operation `k` of job `n`.
    pub machines: Vec<Vec<usize>>,
    /// `durations[n][k]` in time units.
    pub durations: Vec<Vec<u32>>,
    pub timespan: u32,
    pub energy_scale: Rational,
}

impl JspInstance {
    pub fn new(machines: Vec<Vec<usize>>, durations: Vec<Vec<u32>>, timespan: u32, energy_scale: Rational) -> Result<Self> {
        let inst = Self {
            machines,
            durations,
            timespan,
            energy_scale,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.machines.is_empty() {
            return Err(Error::InvalidInstance("no jobs".into()));
        }
        let k = self.machines[0].len();
        if k == 0 {
            return Err(Error::InvalidInstance("jobs have no operations".into()));
        }
        if self.durations.len() != self.machines.len() {
            return Err(Error::InvalidInstance(format!(
                "{} machine rows but {} duration rows",
                self.machines.len(),
                self.durations.len()
            )));
        }
        for (n, (m, d)) in self.machines.iter().zip(&self.durations).enumerate() {
            if m.len() != k || d.len() != k {
                return Err(Error::InvalidInstance(format!(
                    "job {n} does not have {k} operations in both tables"
                )));
            }
        }
        if self.timespan == 0 {
            return Err(Error::InvalidInstance("timespan must be at least 1".into()));
        }
        if self.energy_scale <= Rational::from_int(0) {
            return Err(Error::InvalidInstance("energy scale must be positive".into()));
        }
        let vars = self.jobs() * k * self.timespan as usize;
        if vars > MAX_VARIABLES {
            return Err(Error::SizeCap {
                what: "job-shop variable count",
                size: vars,
                cap: MAX_VARIABLES,
            });
        }
        Ok(())
    }

    pub fn jobs(&self) -> usize {
        self.machines.len()
    }

    pub fn ops_per_job(&self) -> usize {
        self.machines[0].len()
    }

    pub fn num_variables(&self) -> usize {
        self.jobs() * self.ops_per_job() * self.timespan as usize
    }

    /// Flat index of `x_{n,k;t}`.
    pub fn variable(&self, n: usize, k: usize, t: u32) -> usize {
        (n * self.ops_per_job() + k) * self.timespan as usize + t as usize
    }

    /// Inverse of [`JspInstance::variable`].
    pub fn variable_key(&self, index: usize) -> (usize, usize, u32) {
        let t = (index % self.timespan as usize) as u32;
        let op = index / self.timespan as usize;
        (op / self.ops_per_job(), op % self.ops_per_job(), t)
    }

    fn duration(&self, (n, k): OpId) -> u32 {
        self.durations[n][k]
    }

    fn ops(&self) -> impl Iterator<Item = OpId> + '_ {
        (0..self.jobs()).flat_map(move |n| (0..self.ops_per_job()).map(move |k| (n, k)))
    }

    /// Unordered pairs of distinct operations sharing a machine.
    fn machine_pairs(&self) -> Vec<(usize, OpId, OpId)> {
        let ops: Vec<OpId> = self.ops().collect();
        let mut out = Vec::new();
        for (x, &a) in ops.iter().enumerate() {
            for &b in &ops[x + 1..] {
                let m = self.machines[a.0][a.1];
                if m == self.machines[b.0][b.1] {
                    out.push((m, a, b));
                }
            }
        }
        out
    }

    /// Whether starting `a` at `ta` and `b` at `tb` on one machine is penalized.
    fn machine_conflict(&self, a: OpId, ta: u32, b: OpId, tb: u32) -> bool {
        let (da, db) = (self.duration(a), self.duration(b));
        let runs_into = |t0: u32, d: u32, t1: u32| t1 > t0 && t1 - t0 < d;
        runs_into(ta, da, tb) || runs_into(tb, db, ta) || (ta == tb && da > 0 && db > 0)
    }
}

/// Sparse QUBO `Σ a_v x_v + Σ b_uv x_u x_v + c` with integer coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qubo {
    pub num_variables: usize,
    pub linear: BTreeMap<usize, i64>,
    /// Keys have `u < v`.
    pub quadratic: BTreeMap<(usize, usize), i64>,
    pub constant: i64,
}

impl Qubo {
    fn add_linear(&mut self, v: usize, a: i64) {
        *self.linear.entry(v).or_default() += a;
    }

    fn add_quadratic(&mut self, u: usize, v: usize, b: i64) {
        debug_assert_ne!(u, v);
        *self.quadratic.entry((u.min(v), u.max(v))).or_default() += b;
    }

    pub fn value(&self, x: &[bool]) -> i64 {
        let lin: i64 = self.linear.iter().filter(|(&v, _)| x[v]).map(|(_, &a)| a).sum();
        let quad: i64 = self
            .quadratic
            .iter()
            .filter(|(&(u, v), _)| x[u] && x[v])
            .map(|(_, &b)| b)
            .sum();
        lin + quad + self.constant
    }

    /// Ising form of `scale · Q` and the constant offset, via `x = (1 + s) / 2`.
    pub fn to_ising<S: Scalar>(&self, scale: S) -> Result<(IsingProblem<S>, S)> {
        let half = S::from_ratio(1, 2);
        let quarter = S::from_ratio(1, 4);
        let mut fields = vec![S::zero(); self.num_variables];
        let mut offset = S::from_int(self.constant);
        for (&v, &a) in &self.linear {
            let a = S::from_int(a);
            fields[v] = fields[v] + a * half;
            offset = offset + a * half;
        }
        let mut couplers = Vec::new();
        for (&(u, v), &b) in &self.quadratic {
            if b == 0 {
                continue;
            }
            let b = S::from_int(b);
            fields[u] = fields[u] + b * quarter;
            fields[v] = fields[v] + b * quarter;
            offset = offset + b * quarter;
            couplers.push((u, v, b * quarter * scale));
        }
        let fields = fields.into_iter().map(|h| h * scale).collect();
        Ok((IsingProblem::new(fields, couplers)?, offset * scale))
    }
}

/// Penalty family of a QUBO term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    H1,
    H2,
    H3,
    H4,
}

/// The penalty polynomial before scaling, one QUBO per family.
pub fn penalty_terms(instance: &JspInstance) -> Result<[Qubo; 4]> {
    instance.validate()?;
    let nv = instance.num_variables();
    let t_max = instance.timespan;
    let mut families: [Qubo; 4] = std::array::from_fn(|_| Qubo {
        num_variables: nv,
        ..Qubo::default()
    });
    let var = |(n, k): OpId, t: u32| instance.variable(n, k, t);

    // h1: (Σ_t x - 1)^2 = -Σ x + 2 Σ_{t<t'} x x' + 1 on binary variables.
    let h1 = &mut families[0];
    for op in instance.ops() {
        for t in 0..t_max {
            h1.add_linear(var(op, t), -1);
            for t2 in t + 1..t_max {
                h1.add_quadratic(var(op, t), var(op, t2), 2);
            }
        }
        h1.constant += 1;
    }

    let k_last = instance.ops_per_job() - 1;
    for n in 0..instance.jobs() {
        for k in 0..k_last {
            let d = instance.duration((n, k));
            for t in 0..t_max {
                for t2 in 0..t_max {
                    if t + d > t2 {
                        families[1].add_quadratic(var((n, k), t), var((n, k + 1), t2), 1);
                    }
                }
            }
        }
        let d = instance.duration((n, k_last));
        for t in 0..t_max {
            if t + d > t_max {
                families[2].add_linear(var((n, k_last), t), 1);
            }
        }
    }

    for (_, a, b) in instance.machine_pairs() {
        for ta in 0..t_max {
            for tb in 0..t_max {
                if instance.machine_conflict(a, ta, b, tb) {
                    families[3].add_quadratic(var(a, ta), var(b, tb), 1);
                }
            }
        }
    }
    Ok(families)
}

/// The combined penalty QUBO `h1 + h2 + h3 + h4` (unscaled).
pub fn penalty_qubo(instance: &JspInstance) -> Result<Qubo> {
    let families = penalty_terms(instance)?;
    let mut total = Qubo {
        num_variables: instance.num_variables(),
        ..Qubo::default()
    };
    for q in &families {
        for (&v, &a) in &q.linear {
            total.add_linear(v, a);
        }
        for (&(u, v), &b) in &q.quadratic {
            total.add_quadratic(u, v, b);
        }
        total.constant += q.constant;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JspEncoding<S> {
    pub instance: JspInstance,
    pub qubo: Qubo,
    pub problem: IsingProblem<S>,
    /// `H_T(x) = problem.energy(s(x)) + offset`.
    pub offset: S,
}

impl<S: Scalar> JspEncoding<S> {
    /// `E · Q(x)` for a 0/1 assignment.
    pub fn penalty(&self, x: &[bool]) -> S {
        S::from_rational(self.instance.energy_scale) * S::from_int(self.qubo.value(x))
    }

    /// `(n, k, t)` of every variable, by index.
    pub fn variable_map(&self) -> Vec<(usize, usize, u32)> {
        (0..self.instance.num_variables())
            .map(|v| self.instance.variable_key(v))
            .collect()
    }
}

pub fn encode<S: Scalar>(instance: &JspInstance) -> Result<JspEncoding<S>> {
    let qubo = penalty_qubo(instance)?;
    let (problem, offset) = qubo.to_ising(S::from_rational(instance.energy_scale))?;
    Ok(JspEncoding {
        instance: instance.clone(),
        qubo,
        problem,
        offset,
    })
}

/// Spin `+1` means the variable is 1.
pub fn spins_to_bits(config: &SpinConfig) -> Vec<bool> {
    config.spins().iter().map(|&s| s == 1).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// `starts[n][k]`: start time of operation `k` of job `n`.
    pub starts: Vec<Vec<u32>>,
    pub makespan: u32,
}

/// One violated penalty term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JspViolation {
    /// `h1`: the operation starts `count` times.
    StartCount { job: usize, op: usize, count: usize },
    /// `h2`: operation `op + 1` starts at `next` before operation `op`, started at `t`, ends.
    Order { job: usize, op: usize, t: u32, next: u32 },
    /// `h3`: the last operation starts at `t` and runs past the timespan.
    Deadline { job: usize, op: usize, t: u32 },
    /// `h4`: two operations on `machine` conflict.
    Machine {
        machine: usize,
        first: (usize, usize, u32),
        second: (usize, usize, u32),
    },
}

impl JspViolation {
    pub fn family(&self) -> Family {
        match self {
            JspViolation::StartCount { .. } => Family::H1,
            JspViolation::Order { .. } => Family::H2,
            JspViolation::Deadline { .. } => Family::H3,
            JspViolation::Machine { .. } => Family::H4,
        }
    }
}

impl fmt::Display for JspViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JspViolation::StartCount { job, op, count } => {
                write!(f, "h1: operation ({job},{op}) starts {count} times")
            }
            JspViolation::Order { job, op, t, next } => write!(
                f,
                "h2: operation ({job},{}) starts at {next} before ({job},{op}) started at {t} ends",
                op + 1
            ),
            JspViolation::Deadline { job, op, t } => {
                write!(f, "h3: operation ({job},{op}) starting at {t} ends after the timespan")
            }
            JspViolation::Machine { machine, first, second } => write!(
                f,
                "h4: machine {machine} conflict ({},{};{} | {},{};{})",
                first.0, first.1, first.2, second.0, second.1, second.2
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    /// Present when every operation starts exactly once.
    pub schedule: Option<Schedule>,
    pub violations: Vec<JspViolation>,
}

impl Decoded {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reads start times from a spin configuration and lists every violated term.
pub fn decode<S: Scalar>(encoding: &JspEncoding<S>, config: &SpinConfig) -> Result<Decoded> {
    let inst = &encoding.instance;
    if config.len() != inst.num_variables() {
        return Err(Error::Dimension {
            expected: inst.num_variables(),
            got: config.len(),
        });
    }
    let x = spins_to_bits(config);
    let starts_of = |op: OpId| -> Vec<u32> {
        (0..inst.timespan)
            .filter(|&t| x[inst.variable(op.0, op.1, t)])
            .collect()
    };
    let mut violations = Vec::new();
    for (job, op) in inst.ops() {
        let count = starts_of((job, op)).len();
        if count != 1 {
            violations.push(JspViolation::StartCount { job, op, count });
        }
    }
    let one_hot = violations.is_empty();
    let k_last = inst.ops_per_job() - 1;
    for job in 0..inst.jobs() {
        for op in 0..k_last {
            let d = inst.duration((job, op));
            for &t in &starts_of((job, op)) {
                for &next in &starts_of((job, op + 1)) {
                    if t + d > next {
                        violations.push(JspViolation::Order { job, op, t, next });
                    }
                }
            }
        }
        let d = inst.duration((job, k_last));
        for &t in &starts_of((job, k_last)) {
            if t + d > inst.timespan {
                violations.push(JspViolation::Deadline { job, op: k_last, t });
            }
        }
    }
    for (machine, a, b) in inst.machine_pairs() {
        for &ta in &starts_of(a) {
            for &tb in &starts_of(b) {
                if inst.machine_conflict(a, ta, b, tb) {
                    violations.push(JspViolation::Machine {
                        machine,
                        first: (a.0, a.1, ta),
                        second: (b.0, b.1, tb),
                    });
                }
            }
        }
    }
    let schedule = one_hot.then(|| {
        let starts: Vec<Vec<u32>> = (0..inst.jobs())
            .map(|n| (0..inst.ops_per_job()).map(|k| starts_of((n, k))[0]).collect())
            .collect();
        let makespan = inst
            .ops()
            .map(|(n, k)| starts[n][k] + inst.duration((n, k)))
            .max()
            .unwrap_or(0);
        Schedule { starts, makespan }
    });
    Ok(Decoded { schedule, violations })
}

/// `C(v)` of one encoded variable.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableGap<S> {
    pub job: usize,
    pub op: usize,
    pub t: u32,
    pub c_value: S,
    pub equals_half_scale: bool,
    /// `(C(v) + E) / 2`.
    pub chain_rule: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport<S> {
    pub energy_scale: S,
    pub variables: Vec<VariableGap<S>>,
    pub c_min: S,
    pub c_max: S,
    pub matching_half_scale: usize,
    /// `3E/4`, the rule obtained from `C = E/2` and a gap of `E`.
    pub stated_rule: S,
    /// `(max_v C(v) + E) / 2`.
    pub measured_rule: S,
}

/// Computes `C(v) = Σ|J| - |h|` for every encoded variable and compares it with `E/2`.
pub fn report_gap_quantities<S: Scalar>(encoding: &JspEncoding<S>) -> GapReport<S> {
    let e = S::from_rational(encoding.instance.energy_scale);
    let half_e = e / S::from_int(2);
    let variables: Vec<VariableGap<S>> = (0..encoding.problem.num_qubits())
        .map(|v| {
            let (job, op, t) = encoding.instance.variable_key(v);
            let c = crate::bounds::c_value(&encoding.problem, v);
            VariableGap {
                job,
                op,
                t,
                c_value: c,
                equals_half_scale: c.approx_eq(half_e),
                chain_rule: (c + e) / S::from_int(2),
            }
        })
        .collect();
    let c_min = variables.iter().map(|g| g.c_value).fold(None, |acc: Option<S>, c| {
        Some(acc.map_or(c, |a| a.min_of(c)))
    });
    let c_max = variables.iter().map(|g| g.c_value).fold(None, |acc: Option<S>, c| {
        Some(acc.map_or(c, |a| a.max_of(c)))
    });
    let c_max = c_max.unwrap_or(S::zero());
    GapReport {
        energy_scale: e,
        matching_half_scale: variables.iter().filter(|g| g.equals_half_scale).count(),
        c_min: c_min.unwrap_or(S::zero()),
        c_max,
        stated_rule: e * S::from_ratio(3, 4),
        measured_rule: (c_max + e) / S::from_int(2),
        variables,
    }
}
