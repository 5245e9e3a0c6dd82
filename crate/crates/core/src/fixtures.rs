//! Reference instances: the four-node star chain and seeded random embeddings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{CheckedEmbedding, EdgeMapping, HardwareGraph, MinorEmbedding};
use crate::ising::IsingProblem;
use crate::scalar::{Rational, Scalar};

/// Portable seeded generator used throughout the crate (ChaCha8).
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A star-shaped chain (centre plus three leaves) for logical qubit 0 with
/// `h_0 = 3h`. Each leaf carries one external coupler of weight `5h` to its
/// own single-node neighbour (logical qubits 1, 2, 3).
///
/// Hardware nodes: 0 is the centre, 1..=3 the leaves, 4..=6 the neighbours.
#[derive(Debug, Clone)]
pub struct Star3<S> {
    pub problem: IsingProblem<S>,
    pub hardware: HardwareGraph,
    pub embedding: MinorEmbedding,
}

impl<S: Scalar> Star3<S> {
    pub fn new(h: S) -> Self {
        Self::with_neighbors(h, [S::zero(); 3], [S::one(); 3])
    }

    /// `signs[k]` selects the sign of the coupler on leaf `k + 1`; its magnitude is always `5h`.
    pub fn with_neighbors(h: S, neighbor_fields: [S; 3], signs: [S; 3]) -> Self {
        let five = S::from_int(5) * h;
        let mut fields = vec![S::from_int(3) * h];
        fields.extend(neighbor_fields);
        let couplers = (0..3).map(|k| (0, k + 1, signs[k].sign_or_one() * five));
        let problem = IsingProblem::new(fields, couplers).expect("fixture is well formed");
        let hardware =
            HardwareGraph::new(7, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6)]).expect("fixture hardware");
        let embedding = MinorEmbedding {
            chains: vec![vec![0, 1, 2, 3], vec![4], vec![5], vec![6]],
            edge_map: (0..3)
                .map(|k| EdgeMapping {
                    i: 0,
                    j: k + 1,
                    tau_ij: k + 1,
                    tau_ji: k + 4,
                })
                .collect(),
        };
        Self {
            problem,
            hardware,
            embedding,
        }
    }

    pub fn checked(&self) -> CheckedEmbedding {
        self.embedding
            .check(&self.problem, &self.hardware)
            .expect("fixture embedding is valid")
    }
}

/// Size limits for [`random_instance`].
#[derive(Debug, Clone)]
pub struct InstanceShape {
    pub min_logical: usize,
    pub max_logical: usize,
    pub max_chain: usize,
    pub max_physical: usize,
    /// Probability that a given pair of logical qubits is coupled.
    pub coupler_density: f64,
    /// Field and coupler magnitudes are drawn from `[-bound, bound]`.
    pub bound: i64,
    /// Values are multiples of `1/d` for `d` drawn from this list.
    pub denominators: Vec<i64>,
}

impl Default for InstanceShape {
    fn default() -> Self {
        Self {
            min_logical: 1,
            max_logical: 3,
            max_chain: 4,
            max_physical: 12,
            coupler_density: 0.7,
            bound: 4,
            denominators: vec![1, 2, 4],
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub problem: IsingProblem<Rational>,
    pub hardware: HardwareGraph,
    pub embedding: MinorEmbedding,
}

impl RandomInstance {
    pub fn checked(&self) -> CheckedEmbedding {
        self.embedding
            .check(&self.problem, &self.hardware)
            .expect("generated embedding is valid")
    }
}

pub fn random_rational(rng: &mut impl Rng, bound: i64, denominators: &[i64]) -> Rational {
    let d = denominators[rng.random_range(0..denominators.len())];
    let k = rng.random_range(-bound * d..=bound * d);
    Rational::from_ratio(k, d)
}

/// Random tree-chain embedding of a random logical problem.
///
/// Chains are random trees (each new node attaches to a uniformly chosen
/// earlier node) listed in shuffled order; every logical coupler gets a
/// dedicated hardware edge between random nodes of the two chains.
pub fn random_instance(rng: &mut impl Rng, shape: &InstanceShape) -> RandomInstance {
    let n = rng.random_range(shape.min_logical.max(1)..=shape.max_logical);
    let mut sizes: Vec<usize> = (0..n).map(|_| rng.random_range(1..=shape.max_chain)).collect();
    while sizes.iter().sum::<usize>() > shape.max_physical {
        let largest = (0..n).max_by_key(|&i| sizes[i]).expect("nonempty");
        sizes[largest] -= 1;
    }

    let mut edges = Vec::new();
    let mut chains = Vec::with_capacity(n);
    let mut next = 0;
    for &size in &sizes {
        let ids: Vec<usize> = (next..next + size).collect();
        for k in 1..size {
            let parent = rng.random_range(0..k);
            edges.push((ids[parent], ids[k]));
        }
        let mut order = ids.clone();
        order.shuffle(rng);
        chains.push(order);
        next += size;
    }

    let fields: Vec<Rational> = (0..n)
        .map(|_| random_rational(rng, shape.bound, &shape.denominators))
        .collect();
    let mut couplers = Vec::new();
    let mut edge_map = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !rng.random_bool(shape.coupler_density) {
                continue;
            }
            let mut value = random_rational(rng, shape.bound, &shape.denominators);
            if value == Rational::from_int(0) {
                value = Rational::from_int(1);
            }
            let p = chains[i][rng.random_range(0..chains[i].len())];
            let q = chains[j][rng.random_range(0..chains[j].len())];
            couplers.push((i, j, value));
            edges.push((p, q));
            edge_map.push(EdgeMapping {
                i,
                j,
                tau_ij: p,
                tau_ji: q,
            });
        }
    }
    RandomInstance {
        problem: IsingProblem::new(fields, couplers).expect("generated problem"),
        hardware: HardwareGraph::new(next, edges).expect("generated hardware"),
        embedding: MinorEmbedding { chains, edge_map },
    }
}

/// Seed for which [`sweep_demo`] shows an interior chain-strength optimum
/// under a unit coupling cap with the default annealing schedule.
pub const SWEEP_DEMO_SEED: u64 = 1;

/// Four fully coupled logical qubits with fields and couplers in `[-1, 1]`
/// and chains of up to four nodes; used to demonstrate the capped sweep.
pub fn sweep_demo(seed: u64) -> RandomInstance {
    let shape = InstanceShape {
        min_logical: 4,
        max_logical: 4,
        max_chain: 4,
        max_physical: 16,
        coupler_density: 1.0,
        bound: 1,
        denominators: vec![2, 4],
    };
    random_instance(&mut rng(seed), &shape)
}
