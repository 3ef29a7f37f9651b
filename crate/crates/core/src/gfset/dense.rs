use crate::error::{Error, Result};

/// Largest dimension representable densely (2^28 bits = 32 MiB per set).
pub const D_MAX: usize = 28;

/// Subset of GF(2)^D stored as a 2^D-bit membership array.
///
/// Element `v` (an integer below 2^D) is a member iff bit `v % 64` of word
/// `v / 64` is set. Words beyond the universe (for D < 6) stay zero.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseSet {
    dim: usize,
    words: Vec<u64>,
}

impl DenseSet {
    /// Empty set in GF(2)^dim. Errors unless `1 <= dim <= D_MAX`.
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > D_MAX {
            return Err(Error::DimensionOutOfRange(dim, D_MAX));
        }
        let words = (1usize << dim).div_ceil(64);
        Ok(DenseSet {
            dim,
            words: vec![0; words],
        })
    }

    pub fn from_elements<I>(dim: usize, elems: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: std::borrow::Borrow<usize>,
    {
        let mut set = DenseSet::new(dim)?;
        for v in elems {
            set.insert(*std::borrow::Borrow::borrow(&v))?;
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vectors in the universe, 2^dim.
    pub fn universe(&self) -> usize {
        1usize << self.dim
    }

    pub fn insert(&mut self, v: usize) -> Result<()> {
        if v >= self.universe() {
            return Err(Error::IndexOutOfRange {
                index: v,
                limit: self.universe(),
            });
        }
        self.words[v >> 6] |= 1u64 << (v & 63);
        Ok(())
    }

    pub fn remove(&mut self, v: usize) {
        if v < self.universe() {
            self.words[v >> 6] &= !(1u64 << (v & 63));
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.universe() && self.words[v >> 6] >> (v & 63) & 1 == 1
    }

    /// Cardinality, rederived from the membership array on every call.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in increasing integer order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i << 6;
            BitIter { word: w }.map(move |b| base + b)
        })
    }

    fn check_dim(&self, other: &DenseSet) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn union(&self, other: &DenseSet) -> Result<DenseSet> {
        self.check_dim(other)?;
        Ok(self.zip_words(other, |a, b| a | b))
    }

    pub fn intersection(&self, other: &DenseSet) -> Result<DenseSet> {
        self.check_dim(other)?;
        Ok(self.zip_words(other, |a, b| a & b))
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &DenseSet) -> Result<DenseSet> {
        self.check_dim(other)?;
        Ok(self.zip_words(other, |a, b| a & !b))
    }

    pub fn is_subset(&self, other: &DenseSet) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(&a, &b)| a & !b == 0))
    }

    fn zip_words(&self, other: &DenseSet, f: impl Fn(u64, u64) -> u64) -> DenseSet {
        DenseSet {
            dim: self.dim,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_words(dim: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), (1usize << dim).div_ceil(64));
        DenseSet { dim, words }
    }
}

impl std::fmt::Debug for DenseSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DenseSet(dim={}, len={})", self.dim, self.len())
    }
}

struct BitIter {
    word: u64,
}

impl Iterator for BitIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let b = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(b)
    }
}

/// Permute the 64 bits of `x` by `index -> index ^ b` (b < 64), via the
/// butterfly network: XOR-ing the index by bit 2^s swaps adjacent 2^s-wide
/// lanes.
fn permute_word_xor(mut x: u64, b: usize) -> u64 {
    const M1: u64 = 0x5555_5555_5555_5555;
    const M2: u64 = 0x3333_3333_3333_3333;
    const M4: u64 = 0x0f0f_0f0f_0f0f_0f0f;
    const M8: u64 = 0x00ff_00ff_00ff_00ff;
    const M16: u64 = 0x0000_ffff_0000_ffff;
    if b & 1 != 0 {
        x = (x & M1) << 1 | (x >> 1) & M1;
    }
    if b & 2 != 0 {
        x = (x & M2) << 2 | (x >> 2) & M2;
    }
    if b & 4 != 0 {
        x = (x & M4) << 4 | (x >> 4) & M4;
    }
    if b & 8 != 0 {
        x = (x & M8) << 8 | (x >> 8) & M8;
    }
    if b & 16 != 0 {
        x = (x & M16) << 16 | (x >> 16) & M16;
    }
    if b & 32 != 0 {
        x = x.rotate_left(32);
    }
    x
}

/// OR the translate `src + v` into `out`: bit `u` of `src` lands at `u ^ v`.
/// Word `w` maps to word `w ^ (v/64)` with its bits permuted by `v % 64`.
fn accumulate_translate(out: &mut [u64], src: &[u64], v: usize) {
    let word_xor = v >> 6;
    let bit_xor = v & 63;
    for (w, &s) in src.iter().enumerate() {
        out[w ^ word_xor] |= permute_word_xor(s, bit_xor);
    }
}

/// Sumset X + Y = {x + y} over GF(2)^D. Errors on mismatched dimensions or
/// an empty operand. Runs in O(min(|X|,|Y|) * 2^D / 64) word operations by
/// XOR-translating the larger operand's membership array.
pub fn sumset(x: &DenseSet, y: &DenseSet) -> Result<DenseSet> {
    if x.dim != y.dim {
        return Err(Error::DimensionMismatch(x.dim, y.dim));
    }
    if x.is_empty() {
        return Err(Error::EmptyOperand("sumset left operand"));
    }
    if y.is_empty() {
        return Err(Error::EmptyOperand("sumset right operand"));
    }
    let (small, big) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let mut out = vec![0u64; big.words.len()];
    for v in small.iter() {
        accumulate_translate(&mut out, &big.words, v);
    }
    Ok(DenseSet {
        dim: x.dim,
        words: out,
    })
}

/// k-fold iterated sumset X + X + ... + X (k terms, cancellations included).
/// k = 0 is rejected: the empty sum is not in scope here.
pub fn iterated_sumset(x: &DenseSet, k: usize) -> Result<DenseSet> {
    if k == 0 {
        return Err(Error::ZeroIterations);
    }
    if x.is_empty() {
        return Err(Error::EmptyOperand("iterated sumset operand"));
    }
    let mut acc = x.clone();
    for _ in 1..k {
        acc = sumset(&acc, x)?;
    }
    Ok(acc)
}

/// Hamming layer L_d = {v : weight(v) = d} in GF(2)^dim, enumerated with
/// Gosper's hack so the cost is proportional to C(dim, d), not 2^dim.
pub fn layer(dim: usize, d: usize) -> Result<DenseSet> {
    let mut set = DenseSet::new(dim)?;
    if d > dim {
        return Err(Error::LayerOutOfRange { dim, layer: d });
    }
    if d == 0 {
        set.insert(0)?;
        return Ok(set);
    }
    let limit = 1u64 << dim;
    let mut v: u64 = (1u64 << d) - 1;
    while v < limit {
        set.insert(v as usize)?;
        // Gosper's hack: next larger integer with the same popcount.
        let u = v & v.wrapping_neg();
        let w = v + u;
        if w >= limit {
            break;
        }
        v = w | ((v ^ w) / u) >> 2;
    }
    Ok(set)
}
