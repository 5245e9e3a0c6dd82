//! Brute-force checks of the chain-strength bounds on small instances.
//!
//! [`verify_no_domain_wall`] enumerates every ground state of the embedded
//! problem and checks that no chain is broken and that the energy matches the
//! logical minimum. [`probe_tightness`] isolates one chain, freezes its
//! neighbours and searches all neighbour spin patterns for one under which a
//! broken chain beats both aligned configurations.

use rayon::prelude::*;

use crate::bounds::{tight_bound, SubsetWitness};
use crate::embedding::{build_with_strengths, CheckedEmbedding, EmbeddedIsing, HFieldDistribution};
use crate::error::{Error, Result};
use crate::ising::{enumerate_ground_states, enumerate_ground_states_with_cap, IsingProblem, SpinConfig};
use crate::scalar::Scalar;

/// Largest embedded problem [`verify_no_domain_wall`] will enumerate.
pub const MAX_VERIFY_PHYSICAL: usize = 22;

/// Largest chain (and neighbour count) [`probe_at_strength`] will enumerate.
pub const MAX_PROBE_SIZE: usize = 20;

/// A broken chain found in a ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainWallReport {
    pub qubit: usize,
    /// Hardware nodes of the chain holding spin +1.
    pub subset: Vec<usize>,
    /// `true` because `subset` is always the +1 side.
    pub positive: bool,
    pub found_in_ground_state: bool,
    /// The offending physical ground state, in compact physical order.
    pub witness_config: SpinConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome<S> {
    pub passed: bool,
    pub ground_states: usize,
    pub all_chains_aligned: bool,
    pub energy_matches: bool,
    pub physical_minimum: S,
    /// `Σ_i (|ι(i)| - 1) · F_i`, with `F_i = -magnitude_i`.
    pub offset: S,
    pub logical_minimum: S,
    /// First broken chain in the first broken ground state (by mask order).
    pub domain_wall: Option<DomainWallReport>,
}

/// Enumerates every ground state of the embedded problem with chain couplers
/// `-magnitudes[i]` and checks that all chains are aligned and that
/// `min E_embedded - offset = min E_logical`.
pub fn verify_no_domain_wall<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    magnitudes: &[S],
) -> Result<VerifyOutcome<S>> {
    if magnitudes.len() != emb.num_logical() {
        return Err(Error::Dimension {
            expected: emb.num_logical(),
            got: magnitudes.len(),
        });
    }
    if emb.num_physical() > MAX_VERIFY_PHYSICAL {
        return Err(Error::SizeCap {
            what: "embedded problem for exhaustive verification",
            size: emb.num_physical(),
            cap: MAX_VERIFY_PHYSICAL,
        });
    }
    let embedded = build_with_strengths(problem, emb, dist, |q, _| -magnitudes[q]);
    let physical = enumerate_ground_states_with_cap(embedded.physical(), MAX_VERIFY_PHYSICAL)?;
    let logical = enumerate_ground_states(problem)?;
    let offset = embedded.aligned_chain_energy();

    let domain_wall = physical
        .masks()
        .iter()
        .find_map(|&mask| broken_chain(&embedded, mask).map(|(q, subset)| (mask, q, subset)))
        .map(|(mask, qubit, subset)| DomainWallReport {
            qubit,
            subset,
            positive: true,
            found_in_ground_state: true,
            witness_config: SpinConfig::from_mask(embedded.physical().num_qubits(), mask),
        });
    let all_chains_aligned = domain_wall.is_none();
    let energy_matches = (physical.energy - offset).approx_eq(logical.energy);
    Ok(VerifyOutcome {
        passed: all_chains_aligned && energy_matches,
        ground_states: physical.len(),
        all_chains_aligned,
        energy_matches,
        physical_minimum: physical.energy,
        offset,
        logical_minimum: logical.energy,
        domain_wall,
    })
}

/// First chain that is not homogeneous under `mask`, with its +1 nodes.
fn broken_chain<S: Scalar>(embedded: &EmbeddedIsing<S>, mask: u64) -> Option<(usize, Vec<usize>)> {
    (0..embedded.num_logical()).find_map(|q| {
        let range = embedded.chain_range(q);
        let ones: Vec<usize> = range
            .clone()
            .filter(|&p| mask >> p & 1 == 1)
            .map(|p| embedded.hardware_nodes()[p])
            .collect();
        (!ones.is_empty() && ones.len() < range.len()).then_some((q, ones))
    })
}

/// [`verify_no_domain_wall`] with every chain set to its enumerated bound plus `eps`.
pub fn verify_above_tight<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    eps: S,
) -> Result<VerifyOutcome<S>> {
    let magnitudes = (0..emb.num_logical())
        .map(|q| tight_bound(problem, emb, dist, q).map(|t| t.value + eps))
        .collect::<Result<Vec<_>>>()?;
    verify_no_domain_wall(problem, emb, dist, &magnitudes)
}

/// Result of searching neighbour spins for a winning broken chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome<S> {
    pub found: bool,
    pub qubit: usize,
    /// Chain coupler magnitude used (the coupler value is its negation).
    pub magnitude: S,
    /// `(neighbour qubit, spin)` pairs, by neighbour index.
    pub neighbor_spins: Vec<(usize, i8)>,
    /// Chain spins (chain order) of the lowest broken configuration.
    pub broken_config: Vec<i8>,
    pub broken_energy: S,
    pub aligned_up_energy: S,
    pub aligned_down_energy: S,
}

/// Searches all external spin patterns at magnitude `M - eps / |∂W|`, where
/// `M` is the witness value.
pub fn probe_tightness<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    witness: Option<&SubsetWitness<S>>,
    qubit: usize,
    eps: S,
) -> Result<Option<ProbeOutcome<S>>> {
    let Some(w) = witness else {
        return Ok(None);
    };
    if w.qubit != qubit {
        return Err(Error::InvalidArgument(format!(
            "witness belongs to qubit {}, not {qubit}",
            w.qubit
        )));
    }
    let magnitude = w.value - eps / S::from_int(w.boundary_size as i64);
    probe_at_strength(problem, emb, dist, qubit, magnitude).map(Some)
}

/// Searches neighbour spin patterns for one where some broken configuration
/// of chain `qubit` has strictly lower energy than both aligned ones, with
/// chain couplers `-magnitude`. A negative magnitude is allowed.
///
/// Returns the first such pattern in the order of neighbour spin bitmasks
/// (bit `b` set means the `b`-th neighbour has spin +1), or the best attempt
/// when none exists.
pub fn probe_at_strength<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    qubit: usize,
    magnitude: S,
) -> Result<ProbeOutcome<S>> {
    let chain = emb.chain(qubit);
    let ports: Vec<(usize, usize, S)> = emb
        .ports(problem, qubit)
        .map(|(pos, neighbor, idx)| (pos, neighbor, problem.couplers()[idx].value))
        .collect();
    let len = chain.len();
    if len > MAX_PROBE_SIZE || ports.len() > MAX_PROBE_SIZE {
        return Err(Error::SizeCap {
            what: "chain or neighbour count for the tightness probe",
            size: len.max(ports.len()),
            cap: MAX_PROBE_SIZE,
        });
    }
    let mut ports = ports;
    ports.sort_by_key(|&(_, neighbor, _)| neighbor);
    let fields = dist.chain(qubit);
    let strength = -magnitude;

    let evaluate = |external: u64| -> ProbeOutcome<S> {
        let mut local = fields.to_vec();
        for (b, &(pos, _, value)) in ports.iter().enumerate() {
            local[pos] = if external >> b & 1 == 1 { local[pos] + value } else { local[pos] - value };
        }
        let energy = |config: u64| -> S {
            let spin = |k: usize| if config >> k & 1 == 1 { S::one() } else { -S::one() };
            let field: S = (0..len).map(|k| local[k] * spin(k)).sum();
            let edges: S = chain.edges.iter().map(|&(a, b)| strength * spin(a) * spin(b)).sum();
            field + edges
        };
        let full = (1u64 << len) - 1;
        let up = energy(full);
        let down = energy(0);
        let mut best: Option<(S, u64)> = None;
        for config in 1..full {
            let e = energy(config);
            if best.is_none_or(|(b, _)| e < b) {
                best = Some((e, config));
            }
        }
        let (broken_energy, config) = best.unwrap_or((up.max_of(down), full));
        ProbeOutcome {
            found: len > 1 && broken_energy < up && broken_energy < down,
            qubit,
            magnitude,
            neighbor_spins: ports
                .iter()
                .enumerate()
                .map(|(b, &(_, neighbor, _))| (neighbor, if external >> b & 1 == 1 { 1 } else { -1 }))
                .collect(),
            broken_config: (0..len).map(|k| if config >> k & 1 == 1 { 1 } else { -1 }).collect(),
            broken_energy,
            aligned_up_energy: up,
            aligned_down_energy: down,
        }
    };

    let patterns = 1u64 << ports.len();
    if let Some(hit) = (0..patterns)
        .into_par_iter()
        .map(evaluate)
        .find_first(|outcome| outcome.found)
    {
        return Ok(hit);
    }
    Ok(evaluate(0))
}

/// Logical spins by majority vote over each chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityDecode {
    pub logical: SpinConfig,
    /// Chains with at least one misaligned pair.
    pub broken: Vec<bool>,
    /// Chains whose spin sum was exactly zero (decoded as +1).
    pub tied: Vec<bool>,
}

/// Decodes a physical configuration in the compact order of `embedded`.
pub fn majority_vote_decode<S: Scalar>(physical: &SpinConfig, embedded: &EmbeddedIsing<S>) -> Result<MajorityDecode> {
    if physical.len() != embedded.physical().num_qubits() {
        return Err(Error::Dimension {
            expected: embedded.physical().num_qubits(),
            got: physical.len(),
        });
    }
    let n = embedded.num_logical();
    let mut spins = Vec::with_capacity(n);
    let mut broken = Vec::with_capacity(n);
    let mut tied = Vec::with_capacity(n);
    for q in 0..n {
        let chain = &physical.spins()[embedded.chain_range(q)];
        let sum: i64 = chain.iter().map(|&s| s as i64).sum();
        spins.push(if sum < 0 { -1 } else { 1 });
        broken.push(chain.iter().any(|&s| s != chain[0]));
        tied.push(sum == 0);
    }
    Ok(MajorityDecode {
        logical: SpinConfig::new(spins)?,
        broken,
        tied,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::bounds::{certified_tight_bound, choi1_bound};
    use crate::embedding::{build_embedded, distribute_fields, EdgeMapping, FieldStrategy, HardwareGraph, MinorEmbedding};
    use crate::fixtures::{self, random_instance, InstanceShape, Star3};
    use crate::scalar::Rational;

    fn r(p: i64, q: i64) -> Rational {
        Rational::from_ratio(p, q)
    }

    #[test]
    fn star3_passes_just_above_tight() {
        let star = Star3::new(Rational::from_int(1));
        let emb = star.checked();
        let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
        let mut magnitudes = vec![Rational::from_int(0); 4];
        magnitudes[0] = r(61, 10);
        let out = verify_no_domain_wall(&star.problem, &emb, &dist, &magnitudes).unwrap();
        assert!(out.passed, "{out:?}");
        assert_eq!(out.offset, r(-183, 10));
    }

    #[test]
    fn identity_embedding_passes() {
        let p = IsingProblem::new(vec![r(1, 1), r(-2, 1), r(0, 1)], [(0, 1, r(1, 1)), (1, 2, r(-3, 1))]).unwrap();
        let (hw, emb) = MinorEmbedding::identity(&p);
        let emb = emb.check(&p, &hw).unwrap();
        let dist = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
        let out = verify_no_domain_wall(&p, &emb, &dist, &[Rational::from_int(0); 3]).unwrap();
        assert!(out.passed);
        assert_eq!(out.offset, Rational::from_int(0));
    }

    #[test]
    fn opposing_fields_break_an_uncoupled_chain() {
        let p = IsingProblem::new(vec![Rational::from_int(0)], std::iter::empty()).unwrap();
        let hw = HardwareGraph::new(2, [(0, 1)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1]],
            edge_map: vec![],
        }
        .check(&p, &hw)
        .unwrap();
        let dist = HFieldDistribution::custom(&p, &emb, vec![vec![r(1, 1), r(-1, 1)]]).unwrap();
        let out = verify_no_domain_wall(&p, &emb, &dist, &[Rational::from_int(0)]).unwrap();
        assert!(!out.passed);
        let wall = out.domain_wall.unwrap();
        assert_eq!(wall.subset, vec![1]);
        assert!(wall.positive);
        assert_eq!(wall.witness_config.spins(), &[-1, 1]);
    }

    #[test]
    fn star3_probe_finds_break_below_tight() {
        let star = Star3::new(Rational::from_int(1));
        let emb = star.checked();
        let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
        let cert = certified_tight_bound(&star.problem, &emb, &dist, 0).unwrap();
        assert!(cert.certification.is_certified());
        let out = probe_tightness(&star.problem, &emb, &dist, cert.bound.witness.as_ref(), 0, r(1, 100))
            .unwrap()
            .unwrap();
        assert!(out.found);
        assert_eq!(out.magnitude, r(599, 100));
        assert!(out.broken_config.contains(&1) && out.broken_config.contains(&-1));
        // Just above the bound no pattern breaks the chain.
        let above = probe_at_strength(&star.problem, &emb, &dist, 0, r(601, 100)).unwrap();
        assert!(!above.found);
    }

    #[test]
    fn choi1_strength_never_breaks() {
        let star = Star3::new(Rational::from_int(1));
        let emb = star.checked();
        let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Single).unwrap();
        let out = probe_at_strength(&star.problem, &emb, &dist, 0, choi1_bound(&star.problem, 0)).unwrap();
        assert!(!out.found);
    }

    #[test]
    fn single_node_probe_is_vacuous() {
        let star = Star3::new(Rational::from_int(1));
        let emb = star.checked();
        let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
        let cert = certified_tight_bound(&star.problem, &emb, &dist, 1).unwrap();
        assert!(cert.bound.witness.is_none());
        let out = probe_tightness(&star.problem, &emb, &dist, None, 1, r(1, 10)).unwrap();
        assert!(out.is_none());
        assert!(!probe_at_strength(&star.problem, &emb, &dist, 1, Rational::from_int(0)).unwrap().found);
    }

    #[test]
    fn majority_vote_cases() {
        // Chains of sizes 3 and 2 on a path 0-1-2-3-4.
        let p = IsingProblem::new(vec![r(0, 1); 2], [(0, 1, r(1, 1))]).unwrap();
        let hw = HardwareGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1, 2], vec![3, 4]],
            edge_map: vec![EdgeMapping {
                i: 0,
                j: 1,
                tau_ij: 2,
                tau_ji: 3,
            }],
        }
        .check(&p, &hw)
        .unwrap();
        let dist = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
        let embedded = build_embedded(&p, &emb, &dist, &[r(-1, 1), r(-1, 1)]).unwrap();

        let aligned = SpinConfig::new(vec![-1, -1, -1, 1, 1]).unwrap();
        let out = majority_vote_decode(&aligned, &embedded).unwrap();
        assert_eq!(out.logical.spins(), &[-1, 1]);
        assert_eq!(out.broken, vec![false, false]);

        let mixed = SpinConfig::new(vec![1, 1, -1, 1, -1]).unwrap();
        let out = majority_vote_decode(&mixed, &embedded).unwrap();
        assert_eq!(out.logical.spins(), &[1, 1]);
        assert_eq!(out.broken, vec![true, true]);
        assert_eq!(out.tied, vec![false, true]);
    }

    #[test]
    fn verify_rejects_oversized_problems() {
        let p = IsingProblem::new(vec![r(1, 1)], std::iter::empty()).unwrap();
        let n = MAX_VERIFY_PHYSICAL + 1;
        let hw = HardwareGraph::new(n, (1..n).map(|k| (k - 1, k))).unwrap();
        let emb = MinorEmbedding {
            chains: vec![(0..n).collect()],
            edge_map: vec![],
        }
        .check(&p, &hw)
        .unwrap();
        let dist = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
        let err = verify_no_domain_wall(&p, &emb, &dist, &[r(1, 1)]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sandwich_on_random_instances(seed in any::<u64>(), k in 0usize..3, strategy in 0usize..3) {
            let eps = [r(1, 64), r(1, 8), r(1, 1)][k];
            let shape = InstanceShape { max_logical: 4, max_chain: 4, max_physical: 14, ..InstanceShape::default() };
            let inst = random_instance(&mut fixtures::rng(seed), &shape);
            let emb = inst.checked();
            let strategy = [FieldStrategy::Uniform, FieldStrategy::Choi2, FieldStrategy::Single][strategy].clone();
            let dist = distribute_fields(&inst.problem, &emb, &strategy).unwrap();
            let out = verify_above_tight(&inst.problem, &emb, &dist, eps).unwrap();
            prop_assert!(out.passed, "{:?}", out);
            for q in 0..emb.num_logical() {
                let cert = certified_tight_bound(&inst.problem, &emb, &dist, q).unwrap();
                if !cert.certification.is_certified() {
                    continue;
                }
                let w = cert.bound.witness.as_ref().unwrap();
                let scaled = eps * Rational::from_int(w.boundary_size as i64);
                let probe = probe_tightness(&inst.problem, &emb, &dist, Some(w), q, scaled).unwrap().unwrap();
                prop_assert!(probe.found, "qubit {} witness {:?}", q, w);
            }
        }
    }
}
