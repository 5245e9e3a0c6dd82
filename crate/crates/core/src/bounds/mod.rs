//! Lower bounds on the chain coupling magnitude.
//!
//! For chain `ι(i)` with per-node fields `h_k` and external weights `J_k`
//! (see [`external_field_sums`]), every proper nonempty subset `W` yields the
//! candidate
//!
//! ```text
//! M(W) = min(|h(W) - J(W)|, |h(W) - h_i - J(ι(i) \ W)|) / |∂W|
//! ```
//!
//! where `|∂W|` counts the tree edges cut by `W`. Any chain strength
//! `F < -max_W M(W)` keeps every chain aligned in all ground states. The
//! module also provides the two classical closed-form bounds, the
//! certification check for when the enumerated bound cannot be lowered,
//! admissibility checks, and an optimizer over the field split.

mod optimize;

pub use optimize::{optimize_all, optimize_distribution, OptimizedChain, GRID_RESOLUTION_BITS};

use rayon::prelude::*;

use crate::embedding::{chain_external_sums, external_field_sums, Chain, CheckedEmbedding, HFieldDistribution};
use crate::error::{Error, Result};
use crate::ising::IsingProblem;
use crate::scalar::Scalar;

/// Largest chain for which subsets are enumerated.
pub const MAX_ENUMERATED_CHAIN: usize = 30;

/// `C(i) = Σ_j |J_ij| - |h_i|`. Negative values mean the spin is locally determinable.
pub fn c_value<S: Scalar>(problem: &IsingProblem<S>, qubit: usize) -> S {
    coupler_weight(problem, qubit) - problem.field(qubit).abs()
}

fn coupler_weight<S: Scalar>(problem: &IsingProblem<S>, qubit: usize) -> S {
    problem.neighbors(qubit).iter().map(|(_, v)| v.abs()).sum()
}

/// `|h_i| + Σ_j |J_ij|`; sufficient for any field split.
pub fn choi1_bound<S: Scalar>(problem: &IsingProblem<S>, qubit: usize) -> S {
    problem.field(qubit).abs() + coupler_weight(problem, qubit)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Choi2Bound<S> {
    /// `(l - 1) / l · C`, or zero when the qubit is locally determinable.
    pub value: S,
    pub leaves: usize,
    pub locally_determinable: bool,
}

/// Leaf-count bound; only valid together with the `Choi2` field split.
pub fn choi2_bound<S: Scalar>(problem: &IsingProblem<S>, emb: &CheckedEmbedding, qubit: usize) -> Choi2Bound<S> {
    let leaves = emb.chain(qubit).leaves().len();
    let c = c_value(problem, qubit);
    if c < S::zero() {
        return Choi2Bound {
            value: S::zero(),
            leaves,
            locally_determinable: true,
        };
    }
    let l = S::from_int(leaves as i64);
    Choi2Bound {
        value: (l - S::one()) / l * c,
        leaves,
        locally_determinable: false,
    }
}

/// One proper nonempty subset of a chain and its candidate value.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetWitness<S> {
    pub qubit: usize,
    /// Bit `k` set when chain position `k` is in the subset.
    pub mask: u64,
    /// Hardware node ids of the subset, in chain order.
    pub subset: Vec<usize>,
    pub boundary_size: usize,
    pub h_w: S,
    pub j_w: S,
    /// `J` of the complement within the chain.
    pub j_complement: S,
    pub value: S,
}

/// `min(|h_w - j_w|, |h_w - h_total - j_complement|) / boundary`.
pub fn subset_candidate<S: Scalar>(h_w: S, j_w: S, h_total: S, j_complement: S, boundary: usize) -> S {
    let first = (h_w - j_w).abs();
    let second = (h_w - h_total - j_complement).abs();
    first.min_of(second) / S::from_int(boundary as i64)
}

/// Per-chain data shared by the enumeration routines.
pub(crate) struct ChainContext<'a, S> {
    pub qubit: usize,
    pub chain: &'a Chain,
    pub fields: &'a [S],
    pub ext: Vec<S>,
    pub h_total: S,
    pub j_total: S,
}

impl<'a, S: Scalar> ChainContext<'a, S> {
    pub fn new(
        problem: &IsingProblem<S>,
        emb: &'a CheckedEmbedding,
        dist: &'a HFieldDistribution<S>,
        qubit: usize,
    ) -> Self {
        let ext = chain_external_sums(problem, emb, qubit);
        let j_total = ext.iter().copied().sum();
        Self {
            qubit,
            chain: emb.chain(qubit),
            fields: dist.chain(qubit),
            ext,
            h_total: problem.field(qubit),
            j_total,
        }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.len()) - 1
    }

    pub fn sums(&self, mask: u64) -> (S, S) {
        let mut h = S::zero();
        let mut j = S::zero();
        for k in 0..self.len() {
            if mask >> k & 1 == 1 {
                h = h + self.fields[k];
                j = j + self.ext[k];
            }
        }
        (h, j)
    }

    pub fn witness(&self, mask: u64) -> SubsetWitness<S> {
        let (h_w, j_w) = self.sums(mask);
        let boundary = self.chain.boundary_size(mask);
        let j_complement = self.j_total - j_w;
        SubsetWitness {
            qubit: self.qubit,
            mask,
            subset: (0..self.len())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| self.chain.nodes[k])
                .collect(),
            boundary_size: boundary,
            h_w,
            j_w,
            j_complement,
            value: subset_candidate(h_w, j_w, self.h_total, j_complement, boundary),
        }
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.len() > cap {
            return Err(Error::SizeCap {
                what: "chain subset enumeration",
                size: self.len(),
                cap,
            });
        }
        Ok(())
    }

    /// Visits every proper nonempty subset in Gray-code order with running
    /// `(h(W), J(W), |∂W|)`.
    pub fn for_each_subset(&self, mut visit: impl FnMut(u64, S, S, usize)) {
        let len = self.len();
        if len < 2 {
            return;
        }
        let mut incident = vec![Vec::new(); len];
        for &(a, b) in &self.chain.edges {
            incident[a].push(b);
            incident[b].push(a);
        }
        let full = self.full_mask();
        let (mut mask, mut h, mut j, mut boundary) = (0u64, S::zero(), S::zero(), 0usize);
        for step in 1..=full {
            let k = step.trailing_zeros() as usize;
            let entering = mask >> k & 1 == 0;
            for &other in &incident[k] {
                let other_in = mask >> other & 1 == 1;
                // The edge is cut after the flip iff membership now differs.
                if entering != other_in {
                    boundary += 1;
                } else {
                    boundary -= 1;
                }
            }
            mask ^= 1 << k;
            if entering {
                h = h + self.fields[k];
                j = j + self.ext[k];
            } else {
                h = h - self.fields[k];
                j = j - self.ext[k];
            }
            if mask != full {
                visit(mask, h, j, boundary);
            }
        }
    }
}

/// The enumerated bound for one chain and the subset attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct TightBound<S> {
    pub value: S,
    /// `None` only for single-node chains, which have no proper subsets.
    pub witness: Option<SubsetWitness<S>>,
}

/// Maximum of the subset candidates over all `2^L - 2` proper nonempty
/// subsets of chain `qubit`; ties go to the smallest mask.
pub fn tight_bound<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    qubit: usize,
) -> Result<TightBound<S>> {
    let ctx = ChainContext::new(problem, emb, dist, qubit);
    ctx.check_cap(MAX_ENUMERATED_CHAIN)?;
    let mut best: Option<(S, u64)> = None;
    ctx.for_each_subset(|mask, h, j, boundary| {
        let value = subset_candidate(h, j, ctx.h_total, ctx.j_total - j, boundary);
        let better = match best {
            None => true,
            Some((v, m)) => value > v || (value == v && mask < m),
        };
        if better {
            best = Some((value, mask));
        }
    });
    Ok(match best {
        None => TightBound {
            value: S::zero(),
            witness: None,
        },
        Some((_, mask)) => {
            let witness = ctx.witness(mask);
            TightBound {
                value: witness.value,
                witness: Some(witness),
            }
        }
    })
}

/// Every proper nonempty subset of chain `qubit` with its candidate value,
/// ordered by mask. Limited to chains of at most 20 nodes.
pub fn subset_candidates<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    qubit: usize,
) -> Result<Vec<SubsetWitness<S>>> {
    let ctx = ChainContext::new(problem, emb, dist, qubit);
    ctx.check_cap(20)?;
    if ctx.len() < 2 {
        return Ok(Vec::new());
    }
    Ok((1..ctx.full_mask()).map(|m| ctx.witness(m)).collect())
}

/// Why (or why not) an enumerated bound cannot be lowered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certification {
    /// `h(W) ≤ h_i + J(W̄)` or `h(W̄) ≤ h_i - J(W)` holds at the witness.
    Direct,
    /// The mirrored condition holds and the complement attains the same value.
    Complement,
    /// The chain has no proper subsets.
    Vacuous,
    NotCertified,
}

impl Certification {
    pub fn is_certified(self) -> bool {
        matches!(self, Certification::Direct | Certification::Complement)
    }
}

/// Checks whether the candidate at `witness` is the best constant for its
/// subset: for any smaller magnitude some choice of neighbour spins makes a
/// broken chain the unique ground state.
///
/// Besides the subset condition this also needs `h_i ≤ J(ι(i))` whenever
/// `h(W) ≥ J(W)`; without it a dominant local field can pin the chain and
/// the candidate overstates the threshold.
pub fn certify_tightness<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    qubit: usize,
    witness: Option<&SubsetWitness<S>>,
) -> Certification {
    let Some(w) = witness else {
        return Certification::Vacuous;
    };
    let ctx = ChainContext::new(problem, emb, dist, qubit);
    if certifies(&ctx, w.mask) {
        return Certification::Direct;
    }
    let complement = ctx.full_mask() & !w.mask;
    if certifies(&ctx, complement) && ctx.witness(complement).value == w.value {
        return Certification::Complement;
    }
    Certification::NotCertified
}

/// The hypotheses under which the candidate of `mask` is attained.
fn certifies<S: Scalar>(ctx: &ChainContext<'_, S>, mask: u64) -> bool {
    let (h_w, j_w) = ctx.sums(mask);
    let h_c = ctx.h_total - h_w;
    let j_c = ctx.j_total - j_w;
    let condition = h_w <= ctx.h_total + j_c || h_c <= ctx.h_total - j_w;
    let pinned = h_w - j_w >= S::zero() && ctx.h_total > ctx.j_total;
    condition && !pinned
}

/// Bound, witness and certification for one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedBound<S> {
    pub bound: TightBound<S>,
    pub certification: Certification,
}

pub fn certified_tight_bound<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    qubit: usize,
) -> Result<CertifiedBound<S>> {
    let bound = tight_bound(problem, emb, dist, qubit)?;
    let certification = certify_tightness(problem, emb, dist, qubit, bound.witness.as_ref());
    Ok(CertifiedBound { bound, certification })
}

/// A subset with `J(W) + |∂W|·F - |h(W)| < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityViolation<S> {
    pub qubit: usize,
    pub mask: u64,
    pub subset: Vec<usize>,
    pub boundary_size: usize,
    /// `J(W) + |∂W|·F - |h(W)|`, negative.
    pub slack: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport<S> {
    /// All violations, by qubit then mask.
    pub violations: Vec<AdmissibilityViolation<S>>,
    /// Per qubit: smallest magnitude at which the chain becomes admissible.
    pub thresholds: Vec<S>,
}

impl<S: Scalar> AdmissibilityReport<S> {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }

    /// Most negative slack per qubit.
    pub fn worst(&self, qubit: usize) -> Option<&AdmissibilityViolation<S>> {
        self.violations
            .iter()
            .filter(|v| v.qubit == qubit)
            .fold(None, |acc: Option<&AdmissibilityViolation<S>>, v| match acc {
                Some(a) if a.slack <= v.slack => Some(a),
                _ => Some(v),
            })
    }
}

/// Checks `|h(W)| ≤ J(W) + |∂W|·F` on every proper nonempty subset of every chain.
pub fn check_admissible<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    magnitudes: &[S],
) -> Result<AdmissibilityReport<S>> {
    if magnitudes.len() != emb.num_logical() {
        return Err(Error::Dimension {
            expected: emb.num_logical(),
            got: magnitudes.len(),
        });
    }
    if let Some(q) = magnitudes.iter().position(|&f| f < S::zero()) {
        return Err(Error::InvalidArgument(format!(
            "chain strength magnitude for qubit {q} is negative"
        )));
    }
    let mut violations = Vec::new();
    let mut thresholds = Vec::with_capacity(emb.num_logical());
    for (qubit, &f) in magnitudes.iter().enumerate() {
        let ctx = ChainContext::new(problem, emb, dist, qubit);
        ctx.check_cap(MAX_ENUMERATED_CHAIN)?;
        let mut threshold = S::zero();
        let mut found = Vec::new();
        ctx.for_each_subset(|mask, h, j, boundary| {
            let cut = S::from_int(boundary as i64);
            let slack = j + cut * f - h.abs();
            threshold = threshold.max_of((h.abs() - j) / cut);
            if slack < S::zero() {
                found.push((mask, boundary, slack));
            }
        });
        found.sort_by_key(|&(mask, _, _)| mask);
        violations.extend(found.into_iter().map(|(mask, boundary_size, slack)| AdmissibilityViolation {
            qubit,
            mask,
            subset: ctx.witness(mask).subset,
            boundary_size,
            slack,
        }));
        thresholds.push(threshold);
    }
    Ok(AdmissibilityReport {
        violations,
        thresholds,
    })
}

/// Everything computed for one logical qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainBoundReport<S> {
    pub qubit: usize,
    pub c_value: S,
    pub leaves: usize,
    pub locally_determinable: bool,
    pub choi1: S,
    /// Absent when `C(i) < 0`.
    pub choi2: Option<S>,
    pub tight: S,
    pub witness: Option<SubsetWitness<S>>,
    pub certification: Certification,
    /// The field split the enumerated bound was computed for.
    pub fields: Vec<S>,
    pub fell_back_to_uniform: bool,
    pub admissible_from: S,
    /// `(F, most violated subset)` per trial magnitude.
    pub admissible_at: Vec<(S, Option<AdmissibilityViolation<S>>)>,
    pub optimized: Option<OptimizedChain<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport<S> {
    pub qubits: Vec<ChainBoundReport<S>>,
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions<S> {
    pub optimize: bool,
    pub trial_strengths: Vec<S>,
}

/// Computes every bound for every chain. Chains are processed in parallel;
/// the report is ordered by qubit.
pub fn bounds_report<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    options: &ReportOptions<S>,
) -> Result<BoundsReport<S>> {
    let qubits = (0..emb.num_logical())
        .into_par_iter()
        .map(|qubit| chain_report(problem, emb, dist, options, qubit))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundsReport { qubits })
}

fn chain_report<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    options: &ReportOptions<S>,
    qubit: usize,
) -> Result<ChainBoundReport<S>> {
    let choi2 = choi2_bound(problem, emb, qubit);
    let certified = certified_tight_bound(problem, emb, dist, qubit)?;
    let mut magnitudes = vec![S::zero(); emb.num_logical()];
    let admissible = check_admissible_chain(problem, emb, dist, qubit)?;
    let admissible_at = options
        .trial_strengths
        .iter()
        .map(|&f| {
            magnitudes[qubit] = f;
            let report = check_admissible(problem, emb, dist, &magnitudes)?;
            Ok((f, report.worst(qubit).cloned()))
        })
        .collect::<Result<Vec<_>>>()?;
    let optimized = if options.optimize {
        Some(optimize_distribution(problem, emb, qubit)?)
    } else {
        None
    };
    Ok(ChainBoundReport {
        qubit,
        c_value: c_value(problem, qubit),
        leaves: choi2.leaves,
        locally_determinable: choi2.locally_determinable,
        choi1: choi1_bound(problem, qubit),
        choi2: (!choi2.locally_determinable).then_some(choi2.value),
        tight: certified.bound.value,
        witness: certified.bound.witness,
        certification: certified.certification,
        fields: dist.chain(qubit).to_vec(),
        fell_back_to_uniform: dist.fell_back(qubit),
        admissible_from: admissible,
        admissible_at,
        optimized,
    })
}

/// `max(0, max_W (|h(W)| - J(W)) / |∂W|)` for one chain.
fn check_admissible_chain<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    qubit: usize,
) -> Result<S> {
    let ctx = ChainContext::new(problem, emb, dist, qubit);
    ctx.check_cap(MAX_ENUMERATED_CHAIN)?;
    let mut threshold = S::zero();
    ctx.for_each_subset(|_, h, j, boundary| {
        threshold = threshold.max_of((h.abs() - j) / S::from_int(boundary as i64));
    });
    Ok(threshold)
}

/// Enumerated bound for every chain under one field split.
pub fn tight_bounds<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
) -> Result<Vec<TightBound<S>>> {
    (0..emb.num_logical())
        .map(|q| tight_bound(problem, emb, dist, q))
        .collect()
}

/// Convenience: the per-node external weights for the whole embedding.
pub fn external_weights<S: Scalar>(problem: &IsingProblem<S>, emb: &CheckedEmbedding) -> Vec<Vec<S>> {
    external_field_sums(problem, emb)
}

#[cfg(test)]
mod tests;
