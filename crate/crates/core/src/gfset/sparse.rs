use std::cmp::Ordering;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::gfset::dense::{DenseSet, D_MAX};

/// Shape of a product space (GF(2)^block_bits)^block_count. Sparse elements
/// are flat bit vectors with block `j` occupying bits `[j*m, (j+1)*m)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BlockGeometry {
    block_bits: usize,
    block_count: usize,
}

impl BlockGeometry {
    pub fn new(block_bits: usize, block_count: usize) -> Result<Self> {
        if block_bits == 0 {
            return Err(Error::ParamDomain("block_bits must be positive".into()));
        }
        if block_count == 0 {
            return Err(Error::ParamDomain("block_count must be positive".into()));
        }
        Ok(BlockGeometry {
            block_bits,
            block_count,
        })
    }

    pub fn block_bits(&self) -> usize {
        self.block_bits
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn total_bits(&self) -> usize {
        self.block_bits * self.block_count
    }

    pub fn words_per_element(&self) -> usize {
        self.total_bits().div_ceil(64)
    }

    pub fn zero_element(&self) -> Vec<u64> {
        vec![0u64; self.words_per_element()]
    }

    /// Basis vector with coordinate `i` of block `j` set (both 0-based).
    pub fn basis_element(&self, i: usize, j: usize) -> Result<Vec<u64>> {
        if i >= self.block_bits {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: self.block_bits,
            });
        }
        if j >= self.block_count {
            return Err(Error::IndexOutOfRange {
                index: j,
                limit: self.block_count,
            });
        }
        let mut e = self.zero_element();
        set_bit(&mut e, j * self.block_bits + i);
        Ok(e)
    }

    /// Hamming weight of block `j` of `words`.
    pub fn block_weight(&self, words: &[u64], j: usize) -> usize {
        let lo = j * self.block_bits;
        let hi = lo + self.block_bits;
        count_bits_range(words, lo, hi)
    }

    fn validate_element(&self, words: &[u64]) -> Result<()> {
        if words.len() != self.words_per_element() {
            return Err(Error::Parse(format!(
                "element has {} words, geometry needs {}",
                words.len(),
                self.words_per_element()
            )));
        }
        let total = self.total_bits();
        let tail = total % 64;
        if tail != 0 && words[total / 64] >> tail != 0 {
            return Err(Error::Parse(format!(
                "element has bits beyond flat dimension {total}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) fn get_bit(words: &[u64], idx: usize) -> bool {
    words[idx >> 6] >> (idx & 63) & 1 == 1
}

pub(crate) fn set_bit(words: &mut [u64], idx: usize) {
    words[idx >> 6] |= 1u64 << (idx & 63);
}

#[cfg(test)]
pub(crate) fn weight(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

fn count_bits_range(words: &[u64], lo: usize, hi: usize) -> usize {
    // Popcount of bits [lo, hi) across word boundaries.
    let mut count = 0usize;
    let mut bit = lo;
    while bit < hi {
        let w = bit >> 6;
        let start = bit & 63;
        let take = (hi - bit).min(64 - start);
        let mask = if take == 64 {
            u64::MAX
        } else {
            ((1u64 << take) - 1) << start
        };
        count += (words[w] & mask).count_ones() as usize;
        bit += take;
    }
    count
}

/// Numeric order on flat bit vectors (most significant word decides).
pub(crate) fn cmp_elements(a: &[u64], b: &[u64]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    Ordering::Equal
}

/// Explicit subset of a block product space. Elements are stored in
/// canonical (numeric) order with duplicates removed, so iteration order and
/// derived reports are deterministic.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseSet {
    geometry: BlockGeometry,
    elements: Vec<Vec<u64>>,
}

impl SparseSet {
    pub fn new(geometry: BlockGeometry) -> Self {
        SparseSet {
            geometry,
            elements: Vec::new(),
        }
    }

    pub fn from_elements(geometry: BlockGeometry, elems: Vec<Vec<u64>>) -> Result<Self> {
        for e in &elems {
            geometry.validate_element(e)?;
        }
        let mut elements = elems;
        elements.sort_by(|a, b| cmp_elements(a, b));
        elements.dedup();
        Ok(SparseSet { geometry, elements })
    }

    pub fn geometry(&self) -> BlockGeometry {
        self.geometry
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u64]> {
        self.elements.iter().map(|e| e.as_slice())
    }

    pub fn contains(&self, words: &[u64]) -> bool {
        self.elements
            .binary_search_by(|e| cmp_elements(e, words))
            .is_ok()
    }

    pub fn insert(&mut self, words: Vec<u64>) -> Result<()> {
        self.geometry.validate_element(&words)?;
        match self
            .elements
            .binary_search_by(|e| cmp_elements(e, &words))
        {
            Ok(_) => {}
            Err(pos) => self.elements.insert(pos, words),
        }
        Ok(())
    }

    /// Dense view under the canonical embedding (block j at bits [j*m, ..)).
    /// Available only when the flat dimension fits the dense range.
    pub fn to_dense(&self) -> Result<DenseSet> {
        let total = self.geometry.total_bits();
        if total == 0 || total > D_MAX {
            return Err(Error::DimensionOutOfRange(total, D_MAX));
        }
        let mut out = DenseSet::new(total)?;
        for e in &self.elements {
            out.insert(e[0] as usize)?;
        }
        Ok(out)
    }

    pub fn from_dense(set: &DenseSet, geometry: BlockGeometry) -> Result<Self> {
        if geometry.total_bits() != set.dim() {
            return Err(Error::DimensionMismatch(geometry.total_bits(), set.dim()));
        }
        let elems = set.iter().map(|v| vec![v as u64]).collect();
        SparseSet::from_elements(geometry, elems)
    }
}

impl std::fmt::Debug for SparseSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SparseSet({}x{}, len={})",
            self.geometry.block_bits,
            self.geometry.block_count,
            self.len()
        )
    }
}

/// Sumset of two explicit sets with the same geometry, deduplicated.
/// Errors on geometry mismatch or an empty operand, mirroring the dense
/// kernel's contract.
pub fn sparse_sumset(x: &SparseSet, y: &SparseSet) -> Result<SparseSet> {
    if x.geometry != y.geometry {
        return Err(Error::GeometryMismatch(
            x.geometry.block_bits,
            x.geometry.block_count,
            y.geometry.block_bits,
            y.geometry.block_count,
        ));
    }
    if x.is_empty() {
        return Err(Error::EmptyOperand("sparse sumset left operand"));
    }
    if y.is_empty() {
        return Err(Error::EmptyOperand("sparse sumset right operand"));
    }
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(x.len() * y.len());
    for a in x.iter() {
        for b in y.iter() {
            let sum: Vec<u64> = a.iter().zip(b).map(|(u, v)| u ^ v).collect();
            seen.insert(sum);
        }
    }
    SparseSet::from_elements(x.geometry, seen.into_iter().collect())
}
