//! Minimizing the enumerated bound over the split of `h_i` across a chain.
//!
//! The search runs on the normalized chain (everything divided by
//! `|h_i| + Σ J_k`) so that the result scales exactly with the instance.
//! Node magnitudes `y_k ≥ 0` with `Σ y_k = |h_i| / s` parametrize the
//! sign-coherent splits. A float pairwise-transfer descent from several starts
//! is followed by snapping to a dyadic grid and an exact pattern search; the
//! plain uniform, single-node and leaf-corrected splits are always evaluated
//! exactly as well, so the result is never worse than any of them.

use rayon::prelude::*;

use super::{tight_bound, SubsetWitness};
use crate::embedding::{chain_external_sums, distribute_fields, CheckedEmbedding, FieldStrategy, HFieldDistribution};
use crate::error::Result;
use crate::ising::IsingProblem;
use crate::scalar::Scalar;

/// The exact refinement works on multiples of `2^-GRID_RESOLUTION_BITS` of the normalized mass.
pub const GRID_RESOLUTION_BITS: u32 = 10;

const GOLDEN_ITERATIONS: usize = 48;
const MAX_DESCENT_PASSES: usize = 40;
const MAX_EXACT_EVALUATIONS: usize = 20_000;

/// Best split found for one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedChain<S> {
    pub qubit: usize,
    pub fields: Vec<S>,
    pub bound: S,
    pub witness: Option<SubsetWitness<S>>,
    /// `false` when the leaf-corrected split, which has nodes of the opposite
    /// sign, beat every sign-coherent split and was returned instead.
    pub sign_coherent: bool,
}

/// Proper-subset enumeration over a tree with arbitrary node values.
struct SubsetSpace {
    len: usize,
    incident: Vec<Vec<usize>>,
}

impl SubsetSpace {
    fn new(len: usize, edges: &[(usize, usize)]) -> Self {
        let mut incident = vec![Vec::new(); len];
        for &(a, b) in edges {
            incident[a].push(b);
            incident[b].push(a);
        }
        Self { len, incident }
    }

    /// `max_W M(W)` for node fields `h` and external weights `e`.
    fn max_candidate<T: Scalar>(&self, h: &[T], e: &[T], h_total: T, j_total: T) -> T {
        let full = (1u64 << self.len) - 1;
        let (mut mask, mut hw, mut jw, mut boundary) = (0u64, T::zero(), T::zero(), 0i64);
        let mut best = T::zero();
        for step in 1..=full {
            let k = step.trailing_zeros() as usize;
            let entering = mask >> k & 1 == 0;
            for &other in &self.incident[k] {
                let other_in = mask >> other & 1 == 1;
                boundary += if entering != other_in { 1 } else { -1 };
            }
            mask ^= 1 << k;
            if entering {
                hw = hw + h[k];
                jw = jw + e[k];
            } else {
                hw = hw - h[k];
                jw = jw - e[k];
            }
            if mask == full {
                continue;
            }
            let first = (hw - jw).abs();
            let second = (hw - h_total - (j_total - jw)).abs();
            best = best.max_of(first.min_of(second) / T::from_int(boundary));
        }
        best
    }
}

/// The normalized chain in one scalar type.
struct Normalized<T> {
    sign: T,
    mass: T,
    ext: Vec<T>,
    j_total: T,
}

impl<T: Scalar> Normalized<T> {
    fn objective(&self, space: &SubsetSpace, y: &[T]) -> T {
        let h: Vec<T> = y.iter().map(|&v| self.sign * v).collect();
        space.max_candidate(&h, &self.ext, self.sign * self.mass, self.j_total)
    }
}

/// Minimizes the enumerated bound of chain `qubit` over sign-coherent splits of `h_i`.
pub fn optimize_distribution<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    qubit: usize,
) -> Result<OptimizedChain<S>> {
    let chain = emb.chain(qubit);
    let len = chain.len();
    let h = problem.field(qubit);
    let ext = chain_external_sums(problem, emb, qubit);
    let scale = h.abs() + ext.iter().copied().sum::<S>();

    let mut sign_coherent = true;
    let fields = if len == 1 {
        vec![h]
    } else if scale == S::zero() || h == S::zero() {
        vec![S::zero(); len]
    } else {
        let exact = Normalized {
            sign: h.sign_or_one(),
            mass: h.abs() / scale,
            ext: ext.iter().map(|&j| j / scale).collect(),
            j_total: ext.iter().map(|&j| j / scale).sum(),
        };
        let space = SubsetSpace::new(len, &chain.edges);
        let (y, coherent) = search(&space, &exact, &ext, h);
        sign_coherent = coherent;
        y.into_iter().map(|v| exact.sign * v * scale).collect()
    };

    let base = distribute_fields(problem, emb, &FieldStrategy::Uniform)?;
    let dist = base.with_chain(problem, qubit, fields.clone())?;
    let tight = tight_bound(problem, emb, &dist, qubit)?;
    Ok(OptimizedChain {
        qubit,
        fields,
        bound: tight.value,
        witness: tight.witness,
        sign_coherent,
    })
}

/// Returns normalized magnitudes `y` summing to `exact.mass`, and whether they
/// are all nonnegative.
fn search<S: Scalar>(space: &SubsetSpace, exact: &Normalized<S>, ext: &[S], h: S) -> (Vec<S>, bool) {
    let len = space.len;
    let float = Normalized {
        sign: exact.sign.to_f64(),
        mass: exact.mass.to_f64(),
        ext: exact.ext.iter().map(|v| v.to_f64()).collect(),
        j_total: exact.j_total.to_f64(),
    };

    let mut exact_starts: Vec<Vec<S>> = Vec::new();
    let share = exact.mass / S::from_int(len as i64);
    let mut uniform = vec![share; len];
    let rest: S = uniform[..len - 1].iter().copied().sum();
    uniform[len - 1] = exact.mass - rest;
    exact_starts.push(uniform);
    for k in 0..len {
        let mut single = vec![S::zero(); len];
        single[k] = exact.mass;
        exact_starts.push(single);
    }
    let leafy = leaf_corrected(space, exact, ext, h);
    let leafy_coherent = leafy.as_ref().is_some_and(|y| y.iter().all(|&v| v >= S::zero()));
    if leafy_coherent {
        exact_starts.extend(leafy.clone());
    }

    let mut float_starts: Vec<Vec<f64>> = exact_starts
        .iter()
        .map(|y| y.iter().map(|v| v.to_f64()).collect())
        .collect();
    if float.j_total > 0.0 {
        float_starts.push(float.ext.iter().map(|e| e / float.j_total * float.mass).collect());
    }

    let mut best_float: Option<(f64, Vec<f64>)> = None;
    for mut y in float_starts {
        let value = descend(space, &float, &mut y);
        if best_float.as_ref().is_none_or(|(v, _)| value < *v) {
            best_float = Some((value, y));
        }
    }
    let (_, y_float) = best_float.expect("at least one start");
    let polished = pattern_search(space, exact, snap(&y_float, exact.mass));

    let mut candidates = vec![polished];
    candidates.extend(exact_starts);
    let mut best: Option<(S, Vec<S>)> = None;
    for y in candidates {
        let value = exact.objective(space, &y);
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, y));
        }
    }
    let (value, y) = best.expect("nonempty candidates");
    // The leaf-corrected split always yields a valid bound, so it is kept when
    // it wins even with nodes of the opposite sign.
    if let Some(leafy) = leafy.filter(|_| !leafy_coherent) {
        if exact.objective(space, &leafy) < value {
            return (leafy, false);
        }
    }
    (y, true)
}

/// The leaf-corrected split in normalized magnitudes, or `None` when `C(i) < 0`.
fn leaf_corrected<S: Scalar>(space: &SubsetSpace, exact: &Normalized<S>, ext: &[S], h: S) -> Option<Vec<S>> {
    let total: S = ext.iter().copied().sum();
    let c = total - h.abs();
    if c < S::zero() {
        return None;
    }
    let leaves: Vec<usize> = (0..space.len).filter(|&k| space.incident[k].len() <= 1).collect();
    let scale = h.abs() + total;
    let share = c / S::from_int(leaves.len() as i64) / scale;
    let mut y = exact.ext.clone();
    for &leaf in &leaves {
        y[leaf] = y[leaf] - share;
    }
    if !S::EXACT {
        let drift = exact.mass - y.iter().copied().sum::<S>();
        let last = y.len() - 1;
        y[last] = y[last] + drift;
    }
    Some(y)
}

/// Pairwise-transfer coordinate descent; returns the final objective.
fn descend(space: &SubsetSpace, norm: &Normalized<f64>, y: &mut [f64]) -> f64 {
    let len = y.len();
    let mut best = norm.objective(space, y);
    let mut trial = y.to_vec();
    for _ in 0..MAX_DESCENT_PASSES {
        let mut improved = false;
        for a in 0..len {
            for b in 0..len {
                if a == b || y[b] <= 0.0 {
                    continue;
                }
                let mut eval = |t: f64| {
                    trial.copy_from_slice(y);
                    trial[a] += t;
                    trial[b] -= t;
                    norm.objective(space, &trial)
                };
                let (t, value) = golden_section(&mut eval, 0.0, y[b]);
                if value < best - 1e-12 {
                    y[a] += t;
                    y[b] = (y[b] - t).max(0.0);
                    best = value;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    best
}

/// Golden-section search on `[lo, hi]`, also checking the right endpoint.
fn golden_section(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) / 2.0;
    let mut best = (mid, f(mid));
    let end = (hi, f(hi));
    if end.1 < best.1 {
        best = end;
    }
    best
}

/// Rounds to the dyadic grid and repairs the sum so it equals `mass` exactly.
fn snap<S: Scalar>(y: &[f64], mass: S) -> Vec<S> {
    let denom = 1i64 << GRID_RESOLUTION_BITS;
    let mut out: Vec<S> = y
        .iter()
        .map(|&v| S::from_ratio((v * denom as f64).round().max(0.0) as i64, denom))
        .collect();
    let mut diff = mass - out.iter().copied().sum::<S>();
    let mut order: Vec<usize> = (0..out.len()).collect();
    order.sort_by(|&a, &b| out[b].partial_cmp(&out[a]).expect("finite values"));
    if diff >= S::zero() {
        out[order[0]] = out[order[0]] + diff;
    } else {
        for &k in &order {
            let take = out[k].min_of(-diff);
            out[k] = out[k] - take;
            diff = diff + take;
            if diff >= S::zero() {
                break;
            }
        }
    }
    out
}

/// Exact pattern search with transfers of `2^-j` for `j` up to the grid resolution.
fn pattern_search<S: Scalar>(space: &SubsetSpace, exact: &Normalized<S>, mut y: Vec<S>) -> Vec<S> {
    let len = y.len();
    let mut best = exact.objective(space, &y);
    let mut evaluations = 0;
    for j in 1..=GRID_RESOLUTION_BITS {
        let step = S::from_ratio(1, 1i64 << j);
        loop {
            let mut improved = false;
            for a in 0..len {
                for b in 0..len {
                    if a == b || y[b] <= S::zero() {
                        continue;
                    }
                    let amount = step.min_of(y[b]);
                    let mut trial = y.clone();
                    trial[a] = trial[a] + amount;
                    trial[b] = trial[b] - amount;
                    let value = exact.objective(space, &trial);
                    evaluations += 1;
                    if value < best {
                        best = value;
                        y = trial;
                        improved = true;
                    }
                }
            }
            if !improved || evaluations > MAX_EXACT_EVALUATIONS {
                break;
            }
        }
    }
    y
}

/// Optimizes every chain; returns the combined split and per-chain results.
pub fn optimize_all<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
) -> Result<(HFieldDistribution<S>, Vec<OptimizedChain<S>>)> {
    let chains = (0..emb.num_logical())
        .into_par_iter()
        .map(|q| optimize_distribution(problem, emb, q))
        .collect::<Result<Vec<_>>>()?;
    let fields = chains.iter().map(|c| c.fields.clone()).collect();
    let dist = HFieldDistribution::custom(problem, emb, fields)?;
    Ok((dist, chains))
}
