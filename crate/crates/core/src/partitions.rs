//! State sets, cuts, orbit partitions and the Gibbs kernel `G`.
//!
//! For a partition `𝒳 = 𝒪₁ ⊔ … ⊔ 𝒪_k` the Gibbs kernel resamples within the
//! current block from `π` restricted to it:
//! `G(x,y) = π(y)/π(𝒪(x))` for `y ∈ 𝒪(x)`, zero otherwise.
//! Products with `G` never need a dense `G`: left multiplication averages rows
//! within a block and right multiplication spreads block sums by `π`.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::chain::{check_dim, Matrix, StationaryDistribution, TransitionKernel};
use crate::error::{Error, Result};

/// Largest state space for which all cuts may be enumerated.
pub const MAX_ENUMERATION_STATES: usize = 24;

/// A subset of `{0, …, n−1}` stored as a bitset. Bit `x` of word `x / 64`
/// marks membership of state `x`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    n: usize,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(64).max(1)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for x in 0..n {
            s.insert(x);
        }
        s
    }

    /// Panics if `n > 64` or the mask has bits at or above `n`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "from_mask needs n <= 64");
        assert!(n == 64 || mask >> n == 0, "mask has bits outside 0..{n}");
        Self {
            n,
            words: vec![mask],
        }
    }

    pub fn from_states(n: usize, states: &[usize]) -> Result<Self> {
        let mut s = Self::empty(n);
        for &x in states {
            if x >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: x + 1,
                });
            }
            s.insert(x);
        }
        Ok(s)
    }

    pub fn singleton(n: usize, x: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(x);
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The low word as a mask, available when `n ≤ 64`.
    pub fn mask(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.words[0])
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        assert!(x < self.n);
        self.words[x / 64] |= 1 << (x % 64);
    }

    pub fn remove(&mut self, x: usize) {
        assert!(x < self.n);
        self.words[x / 64] &= !(1 << (x % 64));
    }

    pub fn toggle(&mut self, x: usize) {
        assert!(x < self.n);
        self.words[x / 64] ^= 1 << (x % 64);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn is_trivial(&self) -> bool {
        self.is_empty() || self.is_full()
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for x in 0..self.n {
            out.toggle(x);
        }
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Representative of `{S, S'}` that contains state 0.
    pub fn canonical(&self) -> Self {
        if self.n == 0 || self.contains(0) {
            self.clone()
        } else {
            self.complement()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&x| self.contains(x))
    }

    pub fn states(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn mass(&self, pi: &StationaryDistribution) -> f64 {
        self.iter().map(|x| pi.mass(x)).sum()
    }

    /// Hex string of the bitset, most significant word first.
    pub fn to_hex(&self) -> String {
        let mut s = String::from("0x");
        let mut started = false;
        for w in self.words.iter().rev() {
            if started {
                s.push_str(&format!("{w:016x}"));
            } else if *w != 0 {
                s.push_str(&format!("{w:x}"));
                started = true;
            }
        }
        if !started {
            s.push('0');
        }
        s
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.states())
    }
}

impl Serialize for StateSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("StateSet", 2)?;
        st.serialize_field("mask", &self.to_hex())?;
        st.serialize_field("states", &self.states())?;
        st.end()
    }
}

/// A non-trivial cut `S` with its cached mass `π(S) ∈ (0, 1)`.
#[derive(Clone, PartialEq)]
pub struct CutSet {
    set: StateSet,
    pi_mass: f64,
}

impl CutSet {
    pub fn new(set: StateSet, pi: &StationaryDistribution) -> Result<Self> {
        check_dim(pi.len(), set.n())?;
        if set.is_trivial() {
            return Err(Error::TrivialCut);
        }
        let pi_mass = set.mass(pi);
        Ok(Self { set, pi_mass })
    }

    pub fn from_mask(n: usize, mask: u64, pi: &StationaryDistribution) -> Result<Self> {
        if n > 64 || (n < 64 && mask >> n != 0) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: 64 - mask.leading_zeros() as usize,
            });
        }
        Self::new(StateSet::from_mask(n, mask), pi)
    }

    pub fn from_states(states: &[usize], pi: &StationaryDistribution) -> Result<Self> {
        Self::new(StateSet::from_states(pi.len(), states)?, pi)
    }

    pub fn set(&self) -> &StateSet {
        &self.set
    }

    pub fn pi_mass(&self) -> f64 {
        self.pi_mass
    }

    pub fn n(&self) -> usize {
        self.set.n()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.set.contains(x)
    }

    pub fn complement(&self) -> Self {
        Self {
            set: self.set.complement(),
            pi_mass: 1.0 - self.pi_mass,
        }
    }

    pub fn canonical(&self) -> Self {
        if self.set.contains(0) {
            self.clone()
        } else {
            self.complement()
        }
    }

    pub fn mask(&self) -> Option<u64> {
        self.set.mask()
    }

    pub fn to_hex(&self) -> String {
        self.set.to_hex()
    }

    /// Membership vector, convenient for inner loops.
    pub fn indicator(&self) -> Vec<bool> {
        (0..self.n()).map(|x| self.contains(x)).collect()
    }
}

impl fmt::Debug for CutSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cut{:?}", self.set)
    }
}

impl Serialize for CutSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CutSet", 3)?;
        st.serialize_field("mask", &self.set.to_hex())?;
        st.serialize_field("states", &self.set.states())?;
        st.serialize_field("pi_mass", &self.pi_mass)?;
        st.end()
    }
}

/// Disjoint non-empty blocks covering the state space.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPartition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    block_mass: Vec<f64>,
}

impl OrbitPartition {
    pub fn new(blocks: Vec<Vec<usize>>, pi: &StationaryDistribution) -> Result<Self> {
        let n = pi.len();
        let mut block_of = vec![usize::MAX; n];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {i} is empty")));
            }
            for &x in block {
                if x >= n {
                    return Err(Error::InvalidPartition(format!("state {x} out of range")));
                }
                if block_of[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "state {x} appears in more than one block"
                    )));
                }
                block_of[x] = i;
            }
        }
        if let Some(x) = block_of.iter().position(|b| *b == usize::MAX) {
            return Err(Error::InvalidPartition(format!("state {x} is not covered")));
        }
        let block_mass = blocks
            .iter()
            .map(|b| b.iter().map(|&x| pi.mass(x)).sum())
            .collect();
        Ok(Self {
            blocks,
            block_of,
            block_mass,
        })
    }

    /// Two blocks `(S, S')`, in that order.
    pub fn from_cut(cut: &CutSet, pi: &StationaryDistribution) -> Result<Self> {
        check_dim(pi.len(), cut.n())?;
        let s = cut.set().states();
        let c = cut.set().complement().states();
        Self::new(vec![s, c], pi)
    }

    /// Block ids per state (block `i` gets id `i`).
    pub fn from_labels(labels: &[usize], pi: &StationaryDistribution) -> Result<Self> {
        check_dim(pi.len(), labels.len())?;
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (x, &b) in labels.iter().enumerate() {
            blocks[b].push(x);
        }
        Self::new(blocks, pi)
    }

    pub fn whole(pi: &StationaryDistribution) -> Self {
        Self::new(vec![(0..pi.len()).collect()], pi).expect("one block is valid")
    }

    pub fn singletons(pi: &StationaryDistribution) -> Self {
        Self::new((0..pi.len()).map(|x| vec![x]).collect(), pi).expect("singletons are valid")
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn block_mass(&self) -> &[f64] {
        &self.block_mass
    }

    /// `π̄ = (π(𝒪₁), …, π(𝒪_k))`.
    pub fn projected_distribution(&self) -> Result<StationaryDistribution> {
        StationaryDistribution::from_weights(self.block_mass.clone())
    }
}

/// Dense Gibbs kernel of a partition.
pub fn gibbs_kernel(partition: &OrbitPartition, pi: &StationaryDistribution) -> Result<TransitionKernel> {
    check_dim(pi.len(), partition.n())?;
    let n = pi.len();
    let g = Matrix::from_fn(n, n, |x, y| {
        let b = partition.block_of(x);
        if partition.block_of(y) == b {
            pi.mass(y) / partition.block_mass[b]
        } else {
            0.0
        }
    });
    Ok(TransitionKernel::from_matrix_unchecked(g))
}

/// `G M` without forming `G`: each row becomes the π-weighted mean of the rows
/// in its block.
pub fn left_average(m: &Matrix, partition: &OrbitPartition, pi: &StationaryDistribution) -> Matrix {
    let (n, cols) = m.shape();
    let mut means = Matrix::zeros(partition.k(), cols);
    for x in 0..n {
        let b = partition.block_of(x);
        let w = pi.mass(x) / partition.block_mass[b];
        for y in 0..cols {
            means[(b, y)] += w * m[(x, y)];
        }
    }
    Matrix::from_fn(n, cols, |x, y| means[(partition.block_of(x), y)])
}

/// `M G` without forming `G`: block sums of each row spread by `π(y)/π(𝒪(y))`.
pub fn right_average(m: &Matrix, partition: &OrbitPartition, pi: &StationaryDistribution) -> Matrix {
    let (rows, n) = m.shape();
    let mut sums = Matrix::zeros(rows, partition.k());
    for x in 0..rows {
        for y in 0..n {
            sums[(x, partition.block_of(y))] += m[(x, y)];
        }
    }
    Matrix::from_fn(rows, n, |x, y| {
        let b = partition.block_of(y);
        sums[(x, b)] * pi.mass(y) / partition.block_mass[b]
    })
}

/// Projection chain `P̄(i,j) = Σ_{x∈𝒪_i, y∈𝒪_j} π(x)P(x,y) / π(𝒪_i)` and `π̄`.
pub fn projection_chain(
    p: &TransitionKernel,
    partition: &OrbitPartition,
    pi: &StationaryDistribution,
) -> Result<(TransitionKernel, StationaryDistribution)> {
    check_dim(pi.len(), p.n())?;
    check_dim(pi.len(), partition.n())?;
    p.require_stationary(pi)?;
    Ok((
        TransitionKernel::from_matrix_unchecked(project_matrix(p.matrix(), partition, pi)),
        partition.projected_distribution()?,
    ))
}

pub(crate) fn project_matrix(m: &Matrix, partition: &OrbitPartition, pi: &StationaryDistribution) -> Matrix {
    let k = partition.k();
    let mut out = Matrix::zeros(k, k);
    let n = m.nrows();
    for x in 0..n {
        let i = partition.block_of(x);
        for y in 0..n {
            out[(i, partition.block_of(y))] += pi.mass(x) * m[(x, y)];
        }
    }
    for i in 0..k {
        let w = partition.block_mass[i];
        for j in 0..k {
            out[(i, j)] /= w;
        }
    }
    out
}

/// The three averaged kernels built from one partition.
#[derive(Debug, Clone)]
pub struct AveragedKernels {
    pub gp: TransitionKernel,
    pub pg: TransitionKernel,
    pub gpg: TransitionKernel,
}

pub fn averaged_kernels(
    p: &TransitionKernel,
    partition: &OrbitPartition,
    pi: &StationaryDistribution,
) -> Result<AveragedKernels> {
    check_dim(pi.len(), p.n())?;
    check_dim(pi.len(), partition.n())?;
    let gp = left_average(p.matrix(), partition, pi);
    let pg = right_average(p.matrix(), partition, pi);
    let gpg = right_average(&gp, partition, pi);
    Ok(AveragedKernels {
        gp: TransitionKernel::from_matrix_unchecked(gp),
        pg: TransitionKernel::from_matrix_unchecked(pg),
        gpg: TransitionKernel::from_matrix_unchecked(gpg),
    })
}

/// Iterator over non-trivial cut masks.
///
/// With `dedupe_complements` state 0 is pinned into `S`, so exactly one of
/// `{S, S'}` is produced and there are `2^{n−1} − 1` cuts.
pub fn cut_masks(n: usize, dedupe_complements: bool) -> Result<CutMasks> {
    if n > MAX_ENUMERATION_STATES {
        return Err(Error::TooLarge {
            n,
            limit: MAX_ENUMERATION_STATES,
        });
    }
    if n < 2 {
        return Err(Error::Degenerate(format!("no non-trivial cut of {n} states")));
    }
    let full = (1u64 << n) - 1;
    Ok(if dedupe_complements {
        CutMasks {
            next: 0,
            end: (1u64 << (n - 1)) - 1,
            dedupe: true,
        }
    } else {
        CutMasks {
            next: 1,
            end: full,
            dedupe: false,
        }
    })
}

#[derive(Debug, Clone)]
pub struct CutMasks {
    next: u64,
    end: u64,
    dedupe: bool,
}

impl CutMasks {
    pub fn count(n: usize, dedupe_complements: bool) -> u64 {
        if dedupe_complements {
            (1u64 << (n - 1)) - 1
        } else {
            (1u64 << n) - 2
        }
    }
}

impl Iterator for CutMasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.next >= self.end {
            return None;
        }
        let k = self.next;
        self.next += 1;
        Some(if self.dedupe { 1 | (k << 1) } else { k })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = (self.end - self.next) as usize;
        (r, Some(r))
    }
}

impl ExactSizeIterator for CutMasks {}

/// All non-trivial cuts of an `n`-state space as [`StateSet`]s.
pub fn enumerate_cuts(n: usize, dedupe_complements: bool) -> Result<impl Iterator<Item = StateSet>> {
    Ok(cut_masks(n, dedupe_complements)?.map(move |m| StateSet::from_mask(n, m)))
}
