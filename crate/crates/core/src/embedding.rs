//! Minor embeddings of a logical problem into a hardware graph.
//!
//! A [`MinorEmbedding`] is the raw `(chains, edge_map)` description as read
//! from disk. [`validate_embedding`] lists every structural defect;
//! [`MinorEmbedding::check`] turns a valid description into a
//! [`CheckedEmbedding`], which everything downstream works with.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::ising::{IsingProblem, SpinConfig};
use crate::scalar::Scalar;

/// Undirected simple graph of physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardwareGraph {
    num_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl HardwareGraph {
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::InvalidArgument(format!(
                    "hardware edge ({a}, {b}) outside 0..{num_nodes}"
                )));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("hardware self-loop at {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate hardware edge ({a}, {b})"
                )));
            }
        }
        Ok(Self {
            num_nodes,
            edges: set,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// One `edge_map` row: the logical edge `(i, j)` is carried by the hardware
/// edge `(tau_ij, tau_ji)` with `tau_ij` in chain `i` and `tau_ji` in chain `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeMapping {
    pub i: usize,
    pub j: usize,
    pub tau_ij: usize,
    pub tau_ji: usize,
}

impl EdgeMapping {
    fn normalized(self) -> Self {
        if self.i <= self.j {
            self
        } else {
            Self {
                i: self.j,
                j: self.i,
                tau_ij: self.tau_ji,
                tau_ji: self.tau_ij,
            }
        }
    }
}

/// The pair of maps `(ι, τ)`: a chain of hardware nodes per logical qubit and
/// the hardware edge chosen for every logical coupler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorEmbedding {
    pub chains: Vec<Vec<usize>>,
    pub edge_map: Vec<EdgeMapping>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ChainCountMismatch { expected: usize, got: usize },
    EmptyChain { qubit: usize },
    NodeOutOfRange { qubit: usize, node: usize },
    RepeatedNode { qubit: usize, node: usize },
    Overlap { node: usize, first: usize, second: usize },
    DisconnectedChain { qubit: usize },
    CycleInChain { qubit: usize, induced_edges: usize },
    UnmappedLogicalEdge { i: usize, j: usize },
    DuplicateMapping { i: usize, j: usize },
    ExtraneousMapping { i: usize, j: usize },
    TauOutsideChain { i: usize, j: usize, node: usize, chain: usize },
    MissingHardwareEdge { i: usize, j: usize, p: usize, q: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match *self {
            ChainCountMismatch { expected, got } => {
                write!(f, "{got} chains given for {expected} logical qubits")
            }
            EmptyChain { qubit } => write!(f, "chain {qubit} is empty"),
            NodeOutOfRange { qubit, node } => {
                write!(f, "chain {qubit} uses node {node}, which is not in the hardware graph")
            }
            RepeatedNode { qubit, node } => write!(f, "chain {qubit} lists node {node} twice"),
            Overlap { node, first, second } => {
                write!(f, "node {node} belongs to chains {first} and {second}")
            }
            DisconnectedChain { qubit } => write!(f, "chain {qubit} is disconnected"),
            CycleInChain {
                qubit,
                induced_edges,
            } => write!(
                f,
                "chain {qubit} induces {induced_edges} hardware edges and is not a tree"
            ),
            UnmappedLogicalEdge { i, j } => write!(f, "logical edge ({i}, {j}) has no edge_map entry"),
            DuplicateMapping { i, j } => write!(f, "logical edge ({i}, {j}) is mapped more than once"),
            ExtraneousMapping { i, j } => {
                write!(f, "edge_map entry ({i}, {j}) does not correspond to a coupler")
            }
            TauOutsideChain { i, j, node, chain } => write!(
                f,
                "edge ({i}, {j}) uses node {node}, which is not in chain {chain}"
            ),
            MissingHardwareEdge { i, j, p, q } => write!(
                f,
                "edge ({i}, {j}) is mapped to ({p}, {q}), which is not a hardware edge"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks the chain and edge-map conditions of a minor embedding.
pub fn validate_embedding<S: Scalar>(
    problem: &IsingProblem<S>,
    hw: &HardwareGraph,
    emb: &MinorEmbedding,
) -> ValidationReport {
    let mut violations = Vec::new();
    let n = problem.num_qubits();
    if emb.chains.len() != n {
        violations.push(Violation::ChainCountMismatch {
            expected: n,
            got: emb.chains.len(),
        });
    }

    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (qubit, chain) in emb.chains.iter().enumerate() {
        if chain.is_empty() {
            violations.push(Violation::EmptyChain { qubit });
            continue;
        }
        let mut seen = BTreeSet::new();
        for &node in chain {
            if node >= hw.num_nodes() {
                violations.push(Violation::NodeOutOfRange { qubit, node });
            }
            if !seen.insert(node) {
                violations.push(Violation::RepeatedNode { qubit, node });
                continue;
            }
            match owner.get(&node) {
                Some(&first) if first != qubit => violations.push(Violation::Overlap {
                    node,
                    first,
                    second: qubit,
                }),
                Some(_) => {}
                None => {
                    owner.insert(node, qubit);
                }
            }
        }
        let nodes: Vec<usize> = seen.into_iter().collect();
        let induced: Vec<(usize, usize)> = induced_edges(hw, &nodes);
        if !is_connected(&nodes, &induced) {
            violations.push(Violation::DisconnectedChain { qubit });
        } else if induced.len() != nodes.len() - 1 {
            violations.push(Violation::CycleInChain {
                qubit,
                induced_edges: induced.len(),
            });
        }
    }

    let mut mapped: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for m in emb.edge_map.iter().map(|m| m.normalized()) {
        *mapped.entry((m.i, m.j)).or_default() += 1;
        if problem.coupler_index(m.i, m.j).is_none() || m.i >= n || m.j >= n {
            violations.push(Violation::ExtraneousMapping { i: m.i, j: m.j });
            continue;
        }
        let in_chain = |q: usize, node: usize| emb.chains.get(q).is_some_and(|c| c.contains(&node));
        if !in_chain(m.i, m.tau_ij) {
            violations.push(Violation::TauOutsideChain {
                i: m.i,
                j: m.j,
                node: m.tau_ij,
                chain: m.i,
            });
        }
        if !in_chain(m.j, m.tau_ji) {
            violations.push(Violation::TauOutsideChain {
                i: m.i,
                j: m.j,
                node: m.tau_ji,
                chain: m.j,
            });
        }
        if !hw.has_edge(m.tau_ij, m.tau_ji) {
            violations.push(Violation::MissingHardwareEdge {
                i: m.i,
                j: m.j,
                p: m.tau_ij,
                q: m.tau_ji,
            });
        }
    }
    for (&(i, j), &count) in &mapped {
        if count > 1 {
            violations.push(Violation::DuplicateMapping { i, j });
        }
    }
    for c in problem.couplers() {
        if !mapped.contains_key(&(c.i, c.j)) {
            violations.push(Violation::UnmappedLogicalEdge { i: c.i, j: c.j });
        }
    }
    ValidationReport { violations }
}

fn induced_edges(hw: &HardwareGraph, nodes: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, &p) in nodes.iter().enumerate() {
        for &q in &nodes[a + 1..] {
            if hw.has_edge(p, q) {
                out.push((p, q));
            }
        }
    }
    out
}

fn is_connected(nodes: &[usize], edges: &[(usize, usize)]) -> bool {
    let Some(&start) = nodes.first() else {
        return true;
    };
    let mut reached = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let other = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if reached.insert(other) {
                stack.push(other);
            }
        }
    }
    reached.len() == nodes.len()
}

/// The tree of physical qubits representing one logical qubit. Nodes keep
/// the order given in the embedding; `edges` refer to positions in `nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn degree(&self, pos: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == pos || b == pos).count()
    }

    /// Leaf positions. A single-node chain counts its node as its only leaf.
    pub fn leaves(&self) -> Vec<usize> {
        if self.len() == 1 {
            return vec![0];
        }
        (0..self.len()).filter(|&p| self.degree(p) == 1).collect()
    }

    /// Number of tree edges with exactly one end in the subset `mask`.
    pub fn boundary_size(&self, mask: u64) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| (mask >> a & 1) != (mask >> b & 1))
            .count()
    }

    pub fn position_of(&self, node: usize) -> Option<usize> {
        self.nodes.iter().position(|&n| n == node)
    }
}

/// A validated embedding, bound to the coupler order of its problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckedEmbedding {
    chains: Vec<Chain>,
    /// For coupler `c = (i, j)`: positions of `τ(i,j)` in chain i and `τ(j,i)` in chain j.
    tau: Vec<(usize, usize)>,
}

impl MinorEmbedding {
    pub fn check<S: Scalar>(&self, problem: &IsingProblem<S>, hw: &HardwareGraph) -> Result<CheckedEmbedding> {
        let report = validate_embedding(problem, hw, self);
        if !report.is_valid() {
            return Err(Error::InvalidEmbedding(report));
        }
        let chains: Vec<Chain> = self
            .chains
            .iter()
            .map(|nodes| {
                let mut edges = Vec::new();
                for a in 0..nodes.len() {
                    for b in a + 1..nodes.len() {
                        if hw.has_edge(nodes[a], nodes[b]) {
                            edges.push((a, b));
                        }
                    }
                }
                Chain {
                    nodes: nodes.clone(),
                    edges,
                }
            })
            .collect();
        let by_pair: HashMap<(usize, usize), EdgeMapping> = self
            .edge_map
            .iter()
            .map(|m| {
                let m = m.normalized();
                ((m.i, m.j), m)
            })
            .collect();
        let tau = problem
            .couplers()
            .iter()
            .map(|c| {
                let m = by_pair[&(c.i, c.j)];
                (
                    chains[c.i].position_of(m.tau_ij).expect("validated"),
                    chains[c.j].position_of(m.tau_ji).expect("validated"),
                )
            })
            .collect();
        Ok(CheckedEmbedding { chains, tau })
    }

    /// Every logical qubit on its own hardware node, couplers mapped one-to-one.
    pub fn identity<S: Scalar>(problem: &IsingProblem<S>) -> (HardwareGraph, MinorEmbedding) {
        let n = problem.num_qubits();
        let hw = HardwareGraph::new(n, problem.couplers().iter().map(|c| (c.i, c.j)))
            .expect("couplers are a simple graph");
        let emb = MinorEmbedding {
            chains: (0..n).map(|i| vec![i]).collect(),
            edge_map: problem
                .couplers()
                .iter()
                .map(|c| EdgeMapping {
                    i: c.i,
                    j: c.j,
                    tau_ij: c.i,
                    tau_ji: c.j,
                })
                .collect(),
        };
        (hw, emb)
    }
}

impl CheckedEmbedding {
    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn chain(&self, qubit: usize) -> &Chain {
        &self.chains[qubit]
    }

    pub fn num_logical(&self) -> usize {
        self.chains.len()
    }

    pub fn num_physical(&self) -> usize {
        self.chains.iter().map(Chain::len).sum()
    }

    /// Endpoint positions of coupler `index`: `(pos in chain i, pos in chain j)`.
    pub fn tau(&self, coupler: usize) -> (usize, usize) {
        self.tau[coupler]
    }

    /// Couplers touching chain `qubit`: `(position in the chain, neighbour, coupler index)`.
    pub fn ports<'a, S: Scalar>(
        &'a self,
        problem: &'a IsingProblem<S>,
        qubit: usize,
    ) -> impl Iterator<Item = (usize, usize, usize)> + 'a {
        problem
            .couplers()
            .iter()
            .enumerate()
            .filter_map(move |(idx, c)| {
                let (pi, pj) = self.tau[idx];
                if c.i == qubit {
                    Some((pi, c.j, idx))
                } else if c.j == qubit {
                    Some((pj, c.i, idx))
                } else {
                    None
                }
            })
    }
}

/// `J_{i(k)} = Σ |J_il|` over the logical couplers attached at node `k` of chain `i`.
pub fn external_field_sums<S: Scalar>(problem: &IsingProblem<S>, emb: &CheckedEmbedding) -> Vec<Vec<S>> {
    (0..emb.num_logical())
        .map(|q| chain_external_sums(problem, emb, q))
        .collect()
}

pub(crate) fn chain_external_sums<S: Scalar>(problem: &IsingProblem<S>, emb: &CheckedEmbedding, qubit: usize) -> Vec<S> {
    let mut sums = vec![S::zero(); emb.chain(qubit).len()];
    for (pos, _, idx) in emb.ports(problem, qubit) {
        sums[pos] = sums[pos] + problem.couplers()[idx].value.abs();
    }
    sums
}

/// How the logical field `h_i` is split over the nodes of chain `i`.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldStrategy<S> {
    /// `h_i / |ι(i)|` on every node.
    Uniform,
    /// Leaf-corrected split that pairs with the leaf-count bound.
    Choi2,
    /// All of `h_i` on the first node of each chain.
    Single,
    /// All of `h_i` on the given chain position, per qubit.
    SingleAt(Vec<usize>),
    /// Explicit per-node values.
    Custom(Vec<Vec<S>>),
}

/// Per-node fields `h_{i(k)}` with `Σ_k h_{i(k)} = h_i` for every chain.
#[derive(Debug, Clone, PartialEq)]
pub struct HFieldDistribution<S> {
    fields: Vec<Vec<S>>,
    fallback: Vec<bool>,
}

impl<S: Scalar> HFieldDistribution<S> {
    /// Wraps explicit values after checking shape and the sum constraint.
    pub fn custom(problem: &IsingProblem<S>, emb: &CheckedEmbedding, fields: Vec<Vec<S>>) -> Result<Self> {
        if fields.len() != emb.num_logical() {
            return Err(Error::Constraint(format!(
                "{} chains in distribution, embedding has {}",
                fields.len(),
                emb.num_logical()
            )));
        }
        for (q, values) in fields.iter().enumerate() {
            if values.len() != emb.chain(q).len() {
                return Err(Error::Constraint(format!(
                    "chain {q} has {} nodes but {} field values",
                    emb.chain(q).len(),
                    values.len()
                )));
            }
            let total: S = values.iter().copied().sum();
            if !total.approx_eq(problem.field(q)) {
                return Err(Error::Constraint(format!(
                    "fields on chain {q} sum to {total}, expected h = {}",
                    problem.field(q)
                )));
            }
        }
        let fallback = vec![false; fields.len()];
        Ok(Self { fields, fallback })
    }

    pub fn chain(&self, qubit: usize) -> &[S] {
        &self.fields[qubit]
    }

    pub fn all(&self) -> &[Vec<S>] {
        &self.fields
    }

    /// `true` where `Choi2` was requested but `C(i) < 0` forced a uniform split.
    pub fn fell_back(&self, qubit: usize) -> bool {
        self.fallback[qubit]
    }

    /// Replaces the values on one chain, keeping the sum constraint.
    pub fn with_chain(&self, problem: &IsingProblem<S>, qubit: usize, values: Vec<S>) -> Result<Self> {
        if values.len() != self.fields[qubit].len() {
            return Err(Error::Dimension {
                expected: self.fields[qubit].len(),
                got: values.len(),
            });
        }
        let total: S = values.iter().copied().sum();
        if !total.approx_eq(problem.field(qubit)) {
            return Err(Error::Constraint(format!(
                "fields on chain {qubit} sum to {total}, expected h = {}",
                problem.field(qubit)
            )));
        }
        let mut out = self.clone();
        out.fields[qubit] = values;
        out.fallback[qubit] = false;
        Ok(out)
    }
}

pub fn distribute_fields<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    strategy: &FieldStrategy<S>,
) -> Result<HFieldDistribution<S>> {
    let n = emb.num_logical();
    let mut fallback = vec![false; n];
    let fields = match strategy {
        FieldStrategy::Custom(values) => return HFieldDistribution::custom(problem, emb, values.clone()),
        FieldStrategy::Uniform => (0..n).map(|q| uniform_split(problem.field(q), emb.chain(q).len())).collect(),
        FieldStrategy::Single => (0..n)
            .map(|q| concentrated(problem.field(q), emb.chain(q).len(), 0))
            .collect(),
        FieldStrategy::SingleAt(anchors) => {
            if anchors.len() != n {
                return Err(Error::Constraint(format!("{} anchors for {n} chains", anchors.len())));
            }
            (0..n)
                .map(|q| {
                    let len = emb.chain(q).len();
                    if anchors[q] >= len {
                        return Err(Error::Constraint(format!(
                            "anchor {} outside chain {q} of length {len}",
                            anchors[q]
                        )));
                    }
                    Ok(concentrated(problem.field(q), len, anchors[q]))
                })
                .collect::<Result<_>>()?
        }
        FieldStrategy::Choi2 => (0..n)
            .map(|q| match choi2_split(problem, emb, q) {
                Some(v) => v,
                None => {
                    fallback[q] = true;
                    uniform_split(problem.field(q), emb.chain(q).len())
                }
            })
            .collect(),
    };
    Ok(HFieldDistribution { fields, fallback })
}

fn uniform_split<S: Scalar>(h: S, len: usize) -> Vec<S> {
    let share = h / S::from_int(len as i64);
    let mut v = vec![share; len];
    // Put the rounding residue of the float backend on the last node.
    let rest: S = v[..len - 1].iter().copied().sum();
    v[len - 1] = h - rest;
    v
}

fn concentrated<S: Scalar>(h: S, len: usize, at: usize) -> Vec<S> {
    let mut v = vec![S::zero(); len];
    v[at] = h;
    v
}

/// `None` when `C(i) < 0`.
fn choi2_split<S: Scalar>(problem: &IsingProblem<S>, emb: &CheckedEmbedding, qubit: usize) -> Option<Vec<S>> {
    let chain = emb.chain(qubit);
    let ext = chain_external_sums(problem, emb, qubit);
    let h = problem.field(qubit);
    let total: S = ext.iter().copied().sum();
    let c = total - h.abs();
    if c < S::zero() {
        return None;
    }
    let leaves = chain.leaves();
    let share = c / S::from_int(leaves.len() as i64);
    let sign = h.sign_or_one();
    let mut values: Vec<S> = ext.iter().map(|&j| sign * j).collect();
    for &leaf in &leaves {
        values[leaf] = sign * (ext[leaf] - share);
    }
    if !S::EXACT {
        let drift = h - values.iter().copied().sum::<S>();
        let last = values.len() - 1;
        values[last] = values[last] + drift;
    }
    Some(values)
}

/// A ferromagnetic coupler on a chain edge, in compact physical indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainCoupler<S> {
    pub qubit: usize,
    pub a: usize,
    pub b: usize,
    pub value: S,
}

/// The physical problem obtained from an embedding.
///
/// Physical spins are numbered chain by chain: chain `i` occupies the
/// contiguous range [`chain_range(i)`](Self::chain_range), in chain order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedIsing<S> {
    physical: IsingProblem<S>,
    hardware_nodes: Vec<usize>,
    chain_start: Vec<usize>,
    chain_couplers: Vec<ChainCoupler<S>>,
}

impl<S: Scalar> EmbeddedIsing<S> {
    pub fn physical(&self) -> &IsingProblem<S> {
        &self.physical
    }

    /// Hardware node id of each compact physical index.
    pub fn hardware_nodes(&self) -> &[usize] {
        &self.hardware_nodes
    }

    pub fn chain_range(&self, qubit: usize) -> std::ops::Range<usize> {
        self.chain_start[qubit]..self.chain_start[qubit + 1]
    }

    pub fn num_logical(&self) -> usize {
        self.chain_start.len() - 1
    }

    pub fn chain_couplers(&self) -> &[ChainCoupler<S>] {
        &self.chain_couplers
    }

    /// Energy contributed by chain couplers when every chain is aligned:
    /// `Σ_i (|ι(i)| - 1) · F_i` for uniform chains.
    pub fn aligned_chain_energy(&self) -> S {
        self.chain_couplers.iter().map(|c| c.value).sum()
    }

    /// Copies each logical spin onto every node of its chain.
    pub fn lift(&self, logical: &SpinConfig) -> SpinConfig {
        let mut spins = Vec::with_capacity(self.hardware_nodes.len());
        for q in 0..self.num_logical() {
            spins.extend(std::iter::repeat_n(logical.get(q), self.chain_range(q).len()));
        }
        SpinConfig::from_spins_unchecked(spins)
    }

    /// Same embedded problem with all fields and couplers multiplied by `factor`.
    pub fn scaled(&self, factor: S) -> Self {
        Self {
            physical: self.physical.scaled(factor),
            hardware_nodes: self.hardware_nodes.clone(),
            chain_start: self.chain_start.clone(),
            chain_couplers: self
                .chain_couplers
                .iter()
                .map(|c| ChainCoupler {
                    value: c.value * factor,
                    ..*c
                })
                .collect(),
        }
    }
}

/// Builds the embedded problem with one ferromagnetic strength `F_i < 0` per chain.
pub fn build_embedded<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    chain_strength: &[S],
) -> Result<EmbeddedIsing<S>> {
    if chain_strength.len() != emb.num_logical() {
        return Err(Error::Dimension {
            expected: emb.num_logical(),
            got: chain_strength.len(),
        });
    }
    for (q, &f) in chain_strength.iter().enumerate() {
        if !emb.chain(q).edges.is_empty() && f >= S::zero() {
            return Err(Error::Sign {
                qubit: q,
                value: f.to_string(),
            });
        }
    }
    Ok(build_with_strengths(problem, emb, dist, |q, _| chain_strength[q]))
}

/// Unchecked builder; `strength(qubit, edge index)` may be any value.
pub(crate) fn build_with_strengths<S: Scalar>(
    problem: &IsingProblem<S>,
    emb: &CheckedEmbedding,
    dist: &HFieldDistribution<S>,
    strength: impl Fn(usize, usize) -> S,
) -> EmbeddedIsing<S> {
    let mut chain_start = Vec::with_capacity(emb.num_logical() + 1);
    let mut hardware_nodes = Vec::with_capacity(emb.num_physical());
    let mut fields = Vec::with_capacity(emb.num_physical());
    for (q, chain) in emb.chains().iter().enumerate() {
        chain_start.push(hardware_nodes.len());
        hardware_nodes.extend_from_slice(&chain.nodes);
        fields.extend_from_slice(dist.chain(q));
    }
    chain_start.push(hardware_nodes.len());

    let mut chain_couplers = Vec::new();
    let mut couplers = Vec::new();
    for (q, chain) in emb.chains().iter().enumerate() {
        let base = chain_start[q];
        for (e, &(a, b)) in chain.edges.iter().enumerate() {
            let value = strength(q, e);
            chain_couplers.push(ChainCoupler {
                qubit: q,
                a: base + a,
                b: base + b,
                value,
            });
            couplers.push((base + a, base + b, value));
        }
    }
    for (idx, c) in problem.couplers().iter().enumerate() {
        let (pi, pj) = emb.tau(idx);
        couplers.push((chain_start[c.i] + pi, chain_start[c.j] + pj, c.value));
    }
    let physical = IsingProblem::new(fields, couplers).expect("embedding produces a simple graph");
    EmbeddedIsing {
        physical,
        hardware_nodes,
        chain_start,
        chain_couplers,
    }
}

/// `Σ |F|` over all chain couplers.
pub fn minor_embedding_energy<S: Scalar>(embedded: &EmbeddedIsing<S>) -> S {
    embedded.chain_couplers.iter().map(|c| c.value.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, Star3};
    use crate::ising::enumerate_ground_states;
    use crate::scalar::{Rational, Signed};

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn two_qubit_line() -> (IsingProblem<Rational>, HardwareGraph, MinorEmbedding) {
        let p = IsingProblem::new(vec![q(0), q(0)], [(0, 1, q(-1))]).unwrap();
        let hw = HardwareGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1], vec![2]],
            edge_map: vec![EdgeMapping {
                i: 0,
                j: 1,
                tau_ij: 1,
                tau_ji: 2,
            }],
        };
        (p, hw, emb)
    }

    #[test]
    fn star3_fixture_is_valid() {
        let star = Star3::new(q(1));
        let report = validate_embedding(&star.problem, &star.hardware, &star.embedding);
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn missing_chain_edge_is_reported_as_disconnected() {
        let p = IsingProblem::new(vec![q(1)], []).unwrap();
        let hw = HardwareGraph::new(2, []).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1]],
            edge_map: vec![],
        };
        let report = validate_embedding(&p, &hw, &emb);
        assert_eq!(report.violations, vec![Violation::DisconnectedChain { qubit: 0 }]);
    }

    #[test]
    fn overlapping_chains_are_reported() {
        let p = IsingProblem::new(vec![q(0), q(0)], []).unwrap();
        let hw = HardwareGraph::new(5, [(2, 3), (3, 4)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![2, 3], vec![3, 4]],
            edge_map: vec![],
        };
        let report = validate_embedding(&p, &hw, &emb);
        assert!(report.violations.contains(&Violation::Overlap {
            node: 3,
            first: 0,
            second: 1
        }));
    }

    #[test]
    fn cycles_and_bad_edge_maps_are_reported() {
        let p = IsingProblem::new(vec![q(0), q(0)], [(0, 1, q(1))]).unwrap();
        let hw = HardwareGraph::new(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1, 2], vec![3]],
            edge_map: vec![EdgeMapping {
                i: 0,
                j: 1,
                tau_ij: 2,
                tau_ji: 3,
            }],
        };
        let v = validate_embedding(&p, &hw, &emb).violations;
        assert!(v.contains(&Violation::CycleInChain {
            qubit: 0,
            induced_edges: 3
        }));
        assert!(v.contains(&Violation::MissingHardwareEdge { i: 0, j: 1, p: 2, q: 3 }));

        let unmapped = MinorEmbedding {
            chains: vec![vec![0], vec![1]],
            edge_map: vec![],
        };
        let v = validate_embedding(&p, &hw, &unmapped).violations;
        assert_eq!(v, vec![Violation::UnmappedLogicalEdge { i: 0, j: 1 }]);

        let wrong_side = MinorEmbedding {
            chains: vec![vec![0], vec![1]],
            edge_map: vec![EdgeMapping {
                i: 0,
                j: 1,
                tau_ij: 1,
                tau_ji: 0,
            }],
        };
        let v = validate_embedding(&p, &hw, &wrong_side).violations;
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|x| matches!(x, Violation::TauOutsideChain { .. })));
    }

    #[test]
    fn reversed_edge_map_orientation_is_accepted() {
        let (p, hw, mut emb) = two_qubit_line();
        emb.edge_map = vec![EdgeMapping {
            i: 1,
            j: 0,
            tau_ij: 2,
            tau_ji: 1,
        }];
        assert!(validate_embedding(&p, &hw, &emb).is_valid());
    }

    #[test]
    fn external_sums_on_star3() {
        let star = Star3::new(q(1));
        let emb = star.checked();
        let sums = external_field_sums(&star.problem, &emb);
        assert_eq!(sums[0], vec![q(0), q(5), q(5), q(5)]);
    }

    #[test]
    fn external_sums_edge_cases() {
        let p = IsingProblem::new(vec![q(1)], []).unwrap();
        let hw = HardwareGraph::new(2, [(0, 1)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1]],
            edge_map: vec![],
        }
        .check(&p, &hw)
        .unwrap();
        assert_eq!(external_field_sums(&p, &emb), vec![vec![q(0), q(0)]]);

        let p = IsingProblem::new(vec![q(0), q(0)], [(0, 1, q(-2))]).unwrap();
        let hw = HardwareGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1], vec![2]],
            edge_map: vec![EdgeMapping {
                i: 0,
                j: 1,
                tau_ij: 1,
                tau_ji: 2,
            }],
        }
        .check(&p, &hw)
        .unwrap();
        assert_eq!(external_field_sums(&p, &emb), vec![vec![q(0), q(2)], vec![q(2)]]);
    }

    #[test]
    fn external_sums_conserve_total_weight() {
        let mut rng = fixtures::rng(11);
        for _ in 0..50 {
            let inst = fixtures::random_instance(&mut rng, &fixtures::InstanceShape::default());
            let emb = inst.checked();
            let sums = external_field_sums(&inst.problem, &emb);
            for (qubit, s) in sums.iter().enumerate() {
                let per_node: Rational = s.iter().copied().sum();
                let logical: Rational = inst.problem.neighbors(qubit).iter().map(|(_, v)| v.abs()).sum();
                assert_eq!(per_node, logical);
            }
        }
    }

    #[test]
    fn distribution_strategies() {
        let star = Star3::new(q(1));
        let emb = star.checked();
        let choi2 = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
        assert_eq!(choi2.chain(0), &[q(0), q(1), q(1), q(1)]);
        assert!(!choi2.fell_back(0));

        let p = IsingProblem::new(vec![q(2)], []).unwrap();
        let hw = HardwareGraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1, 2, 3]],
            edge_map: vec![],
        }
        .check(&p, &hw)
        .unwrap();
        let uni = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
        assert_eq!(uni.chain(0), &[Rational::new(1, 2); 4]);
        // C = 0 - 2 < 0, so choi2 falls back to uniform.
        let fb = distribute_fields(&p, &emb, &FieldStrategy::Choi2).unwrap();
        assert!(fb.fell_back(0));
        assert_eq!(fb.chain(0), uni.chain(0));

        let p = IsingProblem::new(vec![q(3)], []).unwrap();
        let hw = HardwareGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1, 2]],
            edge_map: vec![],
        }
        .check(&p, &hw)
        .unwrap();
        let single = distribute_fields(&p, &emb, &FieldStrategy::Single).unwrap();
        assert_eq!(single.chain(0), &[q(3), q(0), q(0)]);

        let bad = FieldStrategy::Custom(vec![vec![q(1), q(1), q(0)]]);
        assert!(matches!(distribute_fields(&p, &emb, &bad), Err(Error::Constraint(_))));
    }

    #[test]
    fn choi2_respects_sum_constraint_on_random_instances() {
        let mut rng = fixtures::rng(5);
        for _ in 0..100 {
            let inst = fixtures::random_instance(&mut rng, &fixtures::InstanceShape::default());
            let emb = inst.checked();
            let d = distribute_fields(&inst.problem, &emb, &FieldStrategy::Choi2).unwrap();
            for qubit in 0..emb.num_logical() {
                let total: Rational = d.chain(qubit).iter().copied().sum();
                assert_eq!(total, inst.problem.field(qubit));
            }
        }
    }

    #[test]
    fn identity_embedding_reproduces_logical_problem() {
        let p = IsingProblem::new(vec![q(2)], []).unwrap();
        let (hw, raw) = MinorEmbedding::identity(&p);
        let emb = raw.check(&p, &hw).unwrap();
        let d = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
        let e = build_embedded(&p, &emb, &d, &[q(-1)]).unwrap();
        assert_eq!(e.physical(), &p);
        assert_eq!(minor_embedding_energy(&e), q(0));
    }

    #[test]
    fn star3_embedded_couplers() {
        let star = Star3::new(q(1));
        let emb = star.checked();
        let d = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
        let f = vec![q(-8); star.problem.num_qubits()];
        let e = build_embedded(&star.problem, &emb, &d, &f).unwrap();
        let chain: Vec<_> = e.chain_couplers().iter().filter(|c| c.qubit == 0).collect();
        assert_eq!(chain.len(), 3);
        assert!(chain.iter().all(|c| c.value == q(-8)));
        assert_eq!(&e.physical().fields()[0..4], &[q(0), q(1), q(1), q(1)]);
        let ext: Rational = e
            .physical()
            .couplers()
            .iter()
            .filter(|c| c.i < 4 && c.j >= 4)
            .map(|c| c.value.abs())
            .sum();
        assert_eq!(ext, q(15));
    }

    #[test]
    fn direct_mapping_example() {
        let (p, hw, emb) = two_qubit_line();
        let emb = emb.check(&p, &hw).unwrap();
        let d = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
        let e = build_embedded(&p, &emb, &d, &[q(-3), q(-3)]).unwrap();
        let couplers: Vec<_> = e.physical().couplers().iter().map(|c| (c.i, c.j, c.value)).collect();
        assert_eq!(couplers, vec![(0, 1, q(-3)), (1, 2, q(-1))]);
    }

    #[test]
    fn non_negative_strength_is_rejected() {
        let (p, hw, emb) = two_qubit_line();
        let emb = emb.check(&p, &hw).unwrap();
        let d = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
        assert!(matches!(
            build_embedded(&p, &emb, &d, &[q(0), q(-1)]),
            Err(Error::Sign { qubit: 0, .. })
        ));
        // Single-node chains carry no chain coupler, so their entry is ignored.
        assert!(build_embedded(&p, &emb, &d, &[q(-1), q(5)]).is_ok());
    }

    #[test]
    fn minor_embedding_energy_examples() {
        let star = Star3::new(q(1));
        let emb = star.checked();
        let d = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
        let e = build_embedded(&star.problem, &emb, &d, &vec![q(-6); star.problem.num_qubits()]).unwrap();
        assert_eq!(minor_embedding_energy(&e), q(18));

        let p = IsingProblem::new(vec![q(0), q(0)], []).unwrap();
        let hw = HardwareGraph::new(4, [(0, 1), (2, 3)]).unwrap();
        let emb = MinorEmbedding {
            chains: vec![vec![0, 1], vec![2, 3]],
            edge_map: vec![],
        }
        .check(&p, &hw)
        .unwrap();
        let d = distribute_fields(&p, &emb, &FieldStrategy::Uniform).unwrap();
        let e = build_embedded(&p, &emb, &d, &[q(-1), q(-2)]).unwrap();
        assert_eq!(minor_embedding_energy(&e), q(3));
    }

    #[test]
    fn chain_homogeneous_lift_matches_logical_energy() {
        let mut rng = fixtures::rng(21);
        let strategies = [FieldStrategy::Uniform, FieldStrategy::Choi2, FieldStrategy::Single];
        for round in 0..60 {
            let inst = fixtures::random_instance(&mut rng, &fixtures::InstanceShape::default());
            let emb = inst.checked();
            let d = distribute_fields(&inst.problem, &emb, &strategies[round % 3]).unwrap();
            let f: Vec<Rational> = (0..emb.num_logical()).map(|i| -Rational::new(i as i128 + 1, 2)).collect();
            let e = build_embedded(&inst.problem, &emb, &d, &f).unwrap();
            let offset: Rational = (0..emb.num_logical())
                .map(|i| Rational::from_int(emb.chain(i).len() as i64 - 1) * f[i])
                .sum();
            assert_eq!(e.aligned_chain_energy(), offset);
            let n = inst.problem.num_qubits();
            for mask in 0..1u64 << n {
                let s = SpinConfig::from_mask(n, mask);
                let logical = inst.problem.energy(&s).unwrap();
                let lifted = e.physical().energy(&e.lift(&s)).unwrap();
                assert_eq!(lifted, logical + offset);
            }
        }
    }

    #[test]
    fn large_chain_strength_preserves_ground_states_of_star3() {
        let star = Star3::new(q(1));
        let emb = star.checked();
        let d = distribute_fields(&star.problem, &emb, &FieldStrategy::Choi2).unwrap();
        let e = build_embedded(&star.problem, &emb, &d, &vec![q(-20); star.problem.num_qubits()]).unwrap();
        let logical = enumerate_ground_states(&star.problem).unwrap();
        let physical = enumerate_ground_states(e.physical()).unwrap();
        assert_eq!(physical.energy, logical.energy + e.aligned_chain_energy());
        let lifted: Vec<SpinConfig> = logical.configs().map(|c| e.lift(&c)).collect();
        let mut got: Vec<SpinConfig> = physical.configs().collect();
        got.sort();
        let mut want = lifted;
        want.sort();
        assert_eq!(got, want);
    }
}
