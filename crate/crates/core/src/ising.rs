//! Logical Ising problems, spin configurations and exhaustive ground states.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default ceiling on the number of spins [`enumerate_ground_states`] accepts.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// A two-body term `value · s_i · s_j` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupler<S> {
    pub i: usize,
    pub j: usize,
    pub value: S,
}

/// `E(s) = Σ h_i s_i + Σ J_ij s_i s_j` over an explicit coupler list.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingProblem<S> {
    fields: Vec<S>,
    couplers: Vec<Coupler<S>>,
    adjacency: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> IsingProblem<S> {
    /// Builds a problem. Couplers may be given in either orientation and are
    /// stored sorted by `(i, j)` with `i < j`.
    pub fn new(fields: Vec<S>, couplers: impl IntoIterator<Item = (usize, usize, S)>) -> Result<Self> {
        let n = fields.len();
        let mut list = Vec::new();
        for (a, b, value) in couplers {
            if a >= n || b >= n {
                return Err(Error::InvalidProblem(format!(
                    "coupler ({a}, {b}) references a qubit outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidProblem(format!("self-coupler on qubit {a}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            list.push(Coupler { i, j, value });
        }
        list.sort_by_key(|c| (c.i, c.j));
        if let Some(w) = list.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::InvalidProblem(format!(
                "duplicate coupler ({}, {})",
                w[0].i, w[0].j
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for c in &list {
            adjacency[c.i].push((c.j, c.value));
            adjacency[c.j].push((c.i, c.value));
        }
        Ok(Self {
            fields,
            couplers: list,
            adjacency,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[S] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> S {
        self.fields[i]
    }

    pub fn couplers(&self) -> &[Coupler<S>] {
        &self.couplers
    }

    /// Neighbours of `i` with the coupler value to each.
    pub fn neighbors(&self, i: usize) -> &[(usize, S)] {
        &self.adjacency[i]
    }

    /// Position of the coupler between `a` and `b` in [`couplers`](Self::couplers).
    pub fn coupler_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.couplers.binary_search_by_key(&key, |c| (c.i, c.j)).ok()
    }

    pub fn energy(&self, config: &SpinConfig) -> Result<S> {
        if config.len() != self.num_qubits() {
            return Err(Error::Dimension {
                expected: self.num_qubits(),
                got: config.len(),
            });
        }
        Ok(self.energy_of(config.spins()))
    }

    pub(crate) fn energy_of(&self, spins: &[i8]) -> S {
        let mut e = S::zero();
        for (h, &s) in self.fields.iter().zip(spins) {
            e = e + signed(*h, s);
        }
        for c in &self.couplers {
            e = e + signed(c.value, spins[c.i] * spins[c.j]);
        }
        e
    }

    /// Energy change caused by flipping spin `k`.
    pub(crate) fn flip_delta(&self, spins: &[i8], k: usize) -> S {
        let mut local = self.fields[k];
        for &(j, v) in &self.adjacency[k] {
            local = local + signed(v, spins[j]);
        }
        let two = S::one() + S::one();
        -signed(two * local, spins[k])
    }

    /// Same problem with every field and coupler multiplied by `factor`.
    pub fn scaled(&self, factor: S) -> Self {
        let fields = self.fields.iter().map(|&h| h * factor).collect();
        let couplers = self.couplers.iter().map(|c| (c.i, c.j, c.value * factor));
        Self::new(fields, couplers).expect("scaling preserves structure")
    }

    /// Same problem converted to another numeric backend.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(S) -> T) -> IsingProblem<T> {
        let fields = self.fields.iter().map(|&h| f(h)).collect();
        let couplers = self.couplers.iter().map(|c| (c.i, c.j, f(c.value)));
        IsingProblem::new(fields, couplers).expect("conversion preserves structure")
    }

    /// Largest absolute coupler value, or zero when there are none.
    pub fn max_abs_coupler(&self) -> S {
        self.couplers
            .iter()
            .fold(S::zero(), |m, c| m.max_of(c.value.abs()))
    }

    pub fn max_abs_field(&self) -> S {
        self.fields.iter().fold(S::zero(), |m, h| m.max_of(h.abs()))
    }
}

#[inline]
pub(crate) fn signed<S: Scalar>(v: S, s: i8) -> S {
    if s > 0 {
        v
    } else {
        -v
    }
}

/// A ±1 assignment. Bit `i` of the mask form is 1 exactly when spin `i` is +1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!(
                "spin {pos} is {}, expected -1 or +1",
                spins[pos]
            )));
        }
        Ok(Self(spins))
    }

    pub fn all(n: usize, spin: i8) -> Self {
        assert!(spin == 1 || spin == -1);
        Self(vec![spin; n])
    }

    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self((0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn to_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    pub(crate) fn from_spins_unchecked(spins: Vec<i8>) -> Self {
        Self(spins)
    }
}

/// Minimum energy together with every configuration achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateSet<S> {
    pub energy: S,
    num_qubits: usize,
    masks: Vec<u64>,
}

impl<S: Scalar> GroundStateSet<S> {
    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Minimizers as bit masks, ascending.
    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn configs(&self) -> impl Iterator<Item = SpinConfig> + '_ {
        self.masks
            .iter()
            .map(move |&m| SpinConfig::from_mask(self.num_qubits, m))
    }

    pub fn contains(&self, config: &SpinConfig) -> bool {
        config.len() == self.num_qubits && self.masks.binary_search(&config.to_mask()).is_ok()
    }
}

pub fn enumerate_ground_states<S: Scalar>(problem: &IsingProblem<S>) -> Result<GroundStateSet<S>> {
    enumerate_ground_states_with_cap(problem, DEFAULT_ENUMERATION_CAP)
}

/// Exhaustive scan over all `2^n` configurations.
///
/// The space is split by the high bits into independent blocks that are
/// scanned in Gray-code order; the merged result is independent of how the
/// blocks were scheduled.
pub fn enumerate_ground_states_with_cap<S: Scalar>(
    problem: &IsingProblem<S>,
    cap: usize,
) -> Result<GroundStateSet<S>> {
    let n = problem.num_qubits();
    if n > cap || n > 63 {
        return Err(Error::SizeCap {
            what: "ground-state enumeration",
            size: n,
            cap: cap.min(63),
        });
    }
    let high_bits = n.min(6);
    let low_bits = n - high_bits;
    let blocks: Vec<(S, Vec<u64>)> = (0..1u64 << high_bits)
        .into_par_iter()
        .map(|prefix| scan_block(problem, prefix << low_bits, low_bits))
        .collect();

    let mut energy = blocks[0].0;
    for (e, _) in &blocks {
        if *e < energy {
            energy = *e;
        }
    }
    let mut masks: Vec<u64> = blocks
        .into_iter()
        .filter(|(e, _)| e.approx_eq(energy))
        .flat_map(|(_, m)| m)
        .collect();
    masks.sort_unstable();

    if !S::EXACT {
        // Gray-code updates accumulate rounding; settle ties on direct sums.
        let direct: Vec<S> = masks
            .iter()
            .map(|&m| problem.energy_of(SpinConfig::from_mask(n, m).spins()))
            .collect();
        energy = direct.iter().copied().fold(direct[0], |a, b| a.min_of(b));
        masks = masks
            .into_iter()
            .zip(direct)
            .filter(|(_, e)| e.approx_eq(energy))
            .map(|(m, _)| m)
            .collect();
    }
    Ok(GroundStateSet {
        energy,
        num_qubits: n,
        masks,
    })
}

const RESYNC_INTERVAL: u64 = 1024;

fn scan_block<S: Scalar>(problem: &IsingProblem<S>, base: u64, low_bits: usize) -> (S, Vec<u64>) {
    let n = problem.num_qubits();
    let mut spins = SpinConfig::from_mask(n, base).0;
    let mut mask = base;
    let mut e = problem.energy_of(&spins);
    let mut best = e;
    let mut found = vec![mask];
    for step in 1..1u64 << low_bits {
        let k = step.trailing_zeros() as usize;
        e = e + problem.flip_delta(&spins, k);
        spins[k] = -spins[k];
        mask ^= 1 << k;
        if !S::EXACT && step % RESYNC_INTERVAL == 0 {
            e = problem.energy_of(&spins);
        }
        if e.approx_eq(best) {
            if e < best {
                best = e;
            }
            found.push(mask);
        } else if e < best {
            best = e;
            found.clear();
            found.push(mask);
        }
    }
    (best, found)
}
