use proptest::prelude::*;

use super::*;
use crate::embedding::{distribute_fields, FieldStrategy};
use crate::fixtures::{self, random_instance, InstanceShape, Star3};
use crate::scalar::{Rational, Signed};

fn r(p: i64, q: i64) -> Rational {
    Rational::from_ratio(p, q)
}

/// Direct per-mask evaluation, independent of the Gray-code walk.
fn naive_tight(problem: &IsingProblem<Rational>, emb: &CheckedEmbedding, fields: &[Rational], qubit: usize) -> (Rational, u64) {
    let chain = emb.chain(qubit);
    let ext = chain_external_sums(problem, emb, qubit);
    let len = chain.len();
    let h_total = problem.field(qubit);
    let j_total: Rational = ext.iter().copied().sum();
    let mut best = (Rational::from_int(0), 0u64);
    for mask in 1..(1u64 << len) - 1 {
        let inside = |k: usize| mask >> k & 1 == 1;
        let h_w: Rational = (0..len).filter(|&k| inside(k)).map(|k| fields[k]).sum();
        let j_w: Rational = (0..len).filter(|&k| inside(k)).map(|k| ext[k]).sum();
        let cut = chain.edges.iter().filter(|&&(a, b)| inside(a) != inside(b)).count();
        let a = (h_w - j_w).abs();
        let b = (h_w - h_total - (j_total - j_w)).abs();
        let value = a.min(b) / Rational::from_int(cut as i64);
        if value > best.0 || best.1 == 0 {
            best = (value, mask);
        }
    }
    best
}

#[test]
fn star3_closed_form_values() {
    let star = Star3::new(Rational::from_int(1));
    let emb = star.checked();
    let p = &star.problem;
    assert_eq!(c_value(p, 0), Rational::from_int(12));
    assert_eq!(choi1_bound(p, 0), Rational::from_int(18));
    let choi2 = choi2_bound(p, &emb, 0);
    assert_eq!(choi2.leaves, 3);
    assert_eq!(choi2.value, Rational::from_int(8));
    assert!(!choi2.locally_determinable);
}

#[test]
fn star3_tight_bound_and_witness() {
    let star = Star3::new(Rational::from_int(1));
    let emb = star.checked();
    let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
    assert_eq!(dist.chain(0), &[r(0, 1), r(1, 1), r(1, 1), r(1, 1)]);
    let out = certified_tight_bound(&star.problem, &emb, &dist, 0).unwrap();
    assert_eq!(out.bound.value, Rational::from_int(6));
    let w = out.bound.witness.unwrap();
    assert_eq!(w.mask, 0b0111);
    assert_eq!(w.subset, vec![0, 1, 2]);
    assert_eq!(w.boundary_size, 1);
    assert_eq!(out.certification, Certification::Direct);
}

#[test]
fn star3_candidate_classes() {
    let star = Star3::new(Rational::from_int(1));
    let emb = star.checked();
    let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
    let all = subset_candidates(&star.problem, &emb, &dist, 0).unwrap();
    assert_eq!(all.len(), 14);
    let classify = |w: &SubsetWitness<Rational>| {
        let centre = w.mask & 1 == 1;
        let leaves = (w.mask >> 1).count_ones();
        (centre, leaves)
    };
    let expected = [
        ((true, 2), 6),
        ((false, 1), 4),
        ((false, 2), 3),
        ((true, 1), 2),
        ((true, 0), 0),
        ((false, 3), 0),
    ];
    for w in &all {
        let class = classify(w);
        let value = expected.iter().find(|(c, _)| *c == class).unwrap().1;
        assert_eq!(w.value, Rational::from_int(value), "class {class:?}");
    }
}

#[test]
fn star3_optimum_is_five() {
    let star = Star3::new(Rational::from_int(1));
    let emb = star.checked();
    let out = optimize_distribution(&star.problem, &emb, 0).unwrap();
    assert_eq!(out.bound, Rational::from_int(5));
    let total: Rational = out.fields.iter().copied().sum();
    assert_eq!(total, Rational::from_int(3));
}

#[test]
fn single_node_chain_is_zero() {
    let p = IsingProblem::new(vec![r(2, 1), r(-1, 1)], [(0, 1, r(3, 1))]).unwrap();
    let (hw, emb) = crate::embedding::MinorEmbedding::identity(&p);
    let emb = emb.check(&p, &hw).unwrap();
    let dist = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
    let out = certified_tight_bound(&p, &emb, &dist, 0).unwrap();
    assert_eq!(out.bound.value, Rational::from_int(0));
    assert!(out.bound.witness.is_none());
    assert_eq!(out.certification, Certification::Vacuous);
    assert_eq!(choi2_bound(&p, &emb, 0).value, Rational::from_int(0));
    let opt = optimize_distribution(&p, &emb, 0).unwrap();
    assert_eq!(opt.fields, vec![r(2, 1)]);
}

#[test]
fn locally_determinable_chain_has_no_choi2() {
    // Two-node chain, h = 5, one coupler of weight 1: C = -4.
    let p = IsingProblem::new(vec![r(5, 1), r(0, 1)], [(0, 1, r(1, 1))]).unwrap();
    let hw = HardwareGraphFixture::path3();
    let emb = hw.1.check(&p, &hw.0).unwrap();
    assert!(choi2_bound(&p, &emb, 0).locally_determinable);
    let dist = distribute_fields(&p, &emb, &FieldStrategy::Choi2).unwrap();
    assert!(dist.fell_back(0));
    let report = bounds_report(&p, &emb, &dist, &ReportOptions::default()).unwrap();
    assert!(report.qubits[0].choi2.is_none());
}

struct HardwareGraphFixture;

impl HardwareGraphFixture {
    /// Nodes 0-1 form chain 0, node 2 is chain 1, coupler on edge 1-2.
    fn path3() -> (crate::embedding::HardwareGraph, crate::embedding::MinorEmbedding) {
        let hw = crate::embedding::HardwareGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let emb = crate::embedding::MinorEmbedding {
            chains: vec![vec![0, 1], vec![2]],
            edge_map: vec![crate::embedding::EdgeMapping {
                i: 0,
                j: 1,
                tau_ij: 1,
                tau_ji: 2,
            }],
        };
        (hw, emb)
    }
}

#[test]
fn pinned_chain_is_not_certified() {
    // Two-node chain with fields (1, 1) and no couplers: the candidate is 1
    // but no broken configuration can ever win.
    let p = IsingProblem::new(vec![r(2, 1)], std::iter::empty()).unwrap();
    let hw = crate::embedding::HardwareGraph::new(2, [(0, 1)]).unwrap();
    let emb = crate::embedding::MinorEmbedding {
        chains: vec![vec![0, 1]],
        edge_map: vec![],
    };
    let emb = emb.check(&p, &hw).unwrap();
    let dist = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
    let out = certified_tight_bound(&p, &emb, &dist, 0).unwrap();
    assert_eq!(out.bound.value, Rational::from_int(1));
    assert_eq!(out.certification, Certification::NotCertified);
}

#[test]
fn admissibility_on_star3() {
    let star = Star3::new(Rational::from_int(1));
    let emb = star.checked();
    let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Single).unwrap();
    // All 3h on the centre: {centre} needs |3| ≤ 0 + 3F, so F ≥ 1.
    let zero = vec![Rational::from_int(0); 4];
    let report = check_admissible(&star.problem, &emb, &dist, &zero).unwrap();
    assert!(!report.is_admissible());
    assert_eq!(report.thresholds[0], Rational::from_int(1));
    let worst = report.worst(0).unwrap();
    assert_eq!(worst.mask, 1);
    assert_eq!(worst.slack, Rational::from_int(-3));
    let mut at_one = zero.clone();
    at_one[0] = Rational::from_int(1);
    assert!(check_admissible(&star.problem, &emb, &dist, &at_one).unwrap().is_admissible());
}

#[test]
fn report_collects_everything() {
    let star = Star3::new(Rational::from_int(2));
    let emb = star.checked();
    let dist = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
    let options = ReportOptions {
        optimize: true,
        trial_strengths: vec![Rational::from_int(0)],
    };
    let report = bounds_report(&star.problem, &emb, &dist, &options).unwrap();
    let q0 = &report.qubits[0];
    assert_eq!(q0.c_value, Rational::from_int(24));
    assert_eq!(q0.choi2, Some(Rational::from_int(16)));
    assert_eq!(q0.tight, Rational::from_int(12));
    assert_eq!(q0.optimized.as_ref().unwrap().bound, Rational::from_int(10));
    assert!(q0.certification.is_certified());
    assert_eq!(report.qubits.len(), 4);
}

fn grid_scan_oracle(problem: &IsingProblem<Rational>, emb: &CheckedEmbedding, qubit: usize, steps: i64) -> Rational {
    // Exhaustive scan of sign-coherent splits on a grid of 1/steps of h_i.
    let len = emb.chain(qubit).len();
    let h = problem.field(qubit);
    let mut best: Option<Rational> = None;
    let mut parts = vec![0i64; len];
    fn rec(k: usize, left: i64, parts: &mut Vec<i64>, visit: &mut dyn FnMut(&[i64])) {
        if k == parts.len() - 1 {
            parts[k] = left;
            visit(parts);
            return;
        }
        for take in 0..=left {
            parts[k] = take;
            rec(k + 1, left - take, parts, visit);
        }
    }
    let base = distribute_fields(problem, emb, &FieldStrategy::Uniform).unwrap();
    rec(0, steps, &mut parts, &mut |p| {
        let fields: Vec<Rational> = p.iter().map(|&c| h * Rational::from_ratio(c, steps)).collect();
        let dist = base.with_chain(problem, qubit, fields).unwrap();
        let v = tight_bound(problem, emb, &dist, qubit).unwrap().value;
        if best.is_none_or(|b| v < b) {
            best = Some(v);
        }
    });
    best.unwrap()
}

#[test]
fn optimizer_matches_grid_scan_on_small_chains() {
    let mut rng = fixtures::rng(11);
    let shape = InstanceShape {
        max_logical: 3,
        max_chain: 3,
        max_physical: 9,
        ..InstanceShape::default()
    };
    for _ in 0..25 {
        let inst = random_instance(&mut rng, &shape);
        let emb = inst.checked();
        for q in 0..emb.num_logical() {
            let opt = optimize_distribution(&inst.problem, &emb, q).unwrap();
            let scan = grid_scan_oracle(&inst.problem, &emb, q, 16);
            let slack = (inst.problem.field(q).abs() + choi1_bound(&inst.problem, q)) * r(1, 1024);
            assert!(opt.bound <= scan + slack, "optimizer {} vs grid {}", opt.bound, scan);
        }
    }
}

fn shape() -> InstanceShape {
    InstanceShape {
        max_logical: 3,
        max_chain: 6,
        max_physical: 14,
        ..InstanceShape::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gray_walk_matches_direct_enumeration(seed in any::<u64>()) {
        let inst = random_instance(&mut fixtures::rng(seed), &shape());
        let emb = inst.checked();
        let dist = distribute_fields(&inst.problem, &emb, &FieldStrategy::Uniform).unwrap();
        for q in 0..emb.num_logical() {
            let got = tight_bound(&inst.problem, &emb, &dist, q).unwrap();
            let (value, _) = naive_tight(&inst.problem, &emb, dist.chain(q), q);
            prop_assert_eq!(got.value, value);
            if let Some(w) = got.witness {
                let naive_mask = (1..(1u64 << emb.chain(q).len()) - 1)
                    .find(|&m| {
                        let ctx = ChainContext::new(&inst.problem, &emb, &dist, q);
                        ctx.witness(m).value == value
                    })
                    .unwrap();
                prop_assert_eq!(w.mask, naive_mask);
            }
        }
    }

    #[test]
    fn bound_ordering(seed in any::<u64>()) {
        let inst = random_instance(&mut fixtures::rng(seed), &shape());
        let emb = inst.checked();
        let dist = distribute_fields(&inst.problem, &emb, &FieldStrategy::Choi2).unwrap();
        for q in 0..emb.num_logical() {
            let choi1 = choi1_bound(&inst.problem, q);
            let tight = tight_bound(&inst.problem, &emb, &dist, q).unwrap().value;
            prop_assert!(tight <= choi1);
            if !dist.fell_back(q) {
                let choi2 = choi2_bound(&inst.problem, &emb, q).value;
                prop_assert!(tight <= choi2, "tight {} choi2 {}", tight, choi2);
                prop_assert!(choi2 <= choi1);
            }
        }
    }

    #[test]
    fn global_flip_preserves_bound(seed in any::<u64>()) {
        let inst = random_instance(&mut fixtures::rng(seed), &shape());
        let emb = inst.checked();
        let flipped = inst.problem.map_scalar(|v| v);
        let flipped = IsingProblem::new(
            flipped.fields().iter().map(|&h| -h).collect(),
            flipped.couplers().iter().map(|c| (c.i, c.j, c.value)),
        ).unwrap();
        let dist = distribute_fields(&inst.problem, &emb, &FieldStrategy::Uniform).unwrap();
        let neg: Vec<Vec<Rational>> = dist.all().iter().map(|c| c.iter().map(|&v| -v).collect()).collect();
        let neg = HFieldDistribution::custom(&flipped, &emb, neg).unwrap();
        for q in 0..emb.num_logical() {
            let a = tight_bound(&inst.problem, &emb, &dist, q).unwrap().value;
            let b = tight_bound(&flipped, &emb, &neg, q).unwrap().value;
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn bounds_scale_linearly(seed in any::<u64>(), k in 0usize..3) {
        let lambda = [r(1, 3), r(2, 1), r(7, 1)][k];
        let inst = random_instance(&mut fixtures::rng(seed), &shape());
        let emb = inst.checked();
        let scaled = inst.problem.scaled(lambda);
        let dist = distribute_fields(&inst.problem, &emb, &FieldStrategy::Choi2).unwrap();
        let dist_s = distribute_fields(&scaled, &emb, &FieldStrategy::Choi2).unwrap();
        for q in 0..emb.num_logical() {
            prop_assert_eq!(choi1_bound(&scaled, q), lambda * choi1_bound(&inst.problem, q));
            prop_assert_eq!(choi2_bound(&scaled, &emb, q).value, lambda * choi2_bound(&inst.problem, &emb, q).value);
            let a = tight_bound(&inst.problem, &emb, &dist, q).unwrap().value;
            let b = tight_bound(&scaled, &emb, &dist_s, q).unwrap().value;
            prop_assert_eq!(b, lambda * a);
        }
    }

    #[test]
    fn optimizer_never_worse_than_plain_splits(seed in any::<u64>()) {
        let inst = random_instance(&mut fixtures::rng(seed), &shape());
        let emb = inst.checked();
        let uniform = distribute_fields(&inst.problem, &emb, &FieldStrategy::Uniform).unwrap();
        let choi2 = distribute_fields(&inst.problem, &emb, &FieldStrategy::Choi2).unwrap();
        for q in 0..emb.num_logical() {
            let opt = optimize_distribution(&inst.problem, &emb, q).unwrap();
            prop_assert!(opt.bound <= tight_bound(&inst.problem, &emb, &uniform, q).unwrap().value);
            let coherent = opt.fields.iter().all(|&v| v * inst.problem.field(q) >= Rational::from_int(0));
            prop_assert_eq!(coherent, opt.sign_coherent || inst.problem.field(q) == Rational::from_int(0));
            if !choi2.fell_back(q) {
                prop_assert!(opt.bound <= tight_bound(&inst.problem, &emb, &choi2, q).unwrap().value);
            }
            let total: Rational = opt.fields.iter().copied().sum();
            prop_assert_eq!(total, inst.problem.field(q));
        }
    }

    #[test]
    fn admissibility_threshold_is_exact(seed in any::<u64>()) {
        let inst = random_instance(&mut fixtures::rng(seed), &shape());
        let emb = inst.checked();
        let dist = distribute_fields(&inst.problem, &emb, &FieldStrategy::Single).unwrap();
        let zero = vec![Rational::from_int(0); emb.num_logical()];
        let base = check_admissible(&inst.problem, &emb, &dist, &zero).unwrap();
        let at = check_admissible(&inst.problem, &emb, &dist, &base.thresholds).unwrap();
        prop_assert!(at.is_admissible());
        for q in 0..emb.num_logical() {
            if base.thresholds[q] > Rational::from_int(0) {
                let mut below = base.thresholds.clone();
                below[q] -= r(1, 1 << 12);
                let report = check_admissible(&inst.problem, &emb, &dist, &below).unwrap();
                prop_assert!(report.worst(q).is_some());
            }
        }
    }
}
