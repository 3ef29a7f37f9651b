//! Boundary growth of band subsets under k-fold basis sumsets.
//!
//! For a nonempty `A` inside a band `Sigma` of `k` consecutive layers, the
//! quantity measured here is `|(A + kS) \ Sigma|` where `S` is the full
//! coordinate basis and `kS` its k-fold iterated sumset (all vectors of
//! weight <= k with weight = k mod 2). When the ambient dimension satisfies
//! `D > 10k^2` this outside part is at least `|A| / 2`; the reports record
//! the exact ratio and whether that hypothesis applied.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfset::{iterated_sumset, layer, DenseSet, SparseSet};
use crate::layers::{BandSpec, BigCount};

/// Default cap on |A| for the sparse boundary path.
pub const DEFAULT_SPARSE_BUDGET: usize = 100_000;

/// Which half of the cube the band's low edge sits in; the proof pushes
/// mass up from the lower half and down from the upper half.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Clone, Debug)]
pub struct IsoperimetryReport {
    pub band: BandSpec,
    pub size: BigCount,
    pub outside: BigCount,
    /// outside / |A|, reduced.
    pub ratio: BigRational,
    /// Whether outside >= |A| / 2.
    pub passes: bool,
    pub direction: Direction,
    /// Whether D > 10k^2 held, i.e. whether `passes` was promised.
    pub hypothesis_met: bool,
}

fn build_report(band: &BandSpec, k: usize, size: BigUint, outside: BigUint) -> IsoperimetryReport {
    let ratio = BigRational::new(outside.clone().into(), size.clone().into());
    let passes = &outside * 2u32 >= size;
    let direction = if 2 * band.low() <= band.dim() {
        Direction::Up
    } else {
        Direction::Down
    };
    IsoperimetryReport {
        band: *band,
        size,
        outside,
        ratio,
        passes,
        direction,
        hypothesis_met: band.dim() > 10 * k * k,
    }
}

/// Exact `|(A + kS) \ Sigma|` for a dense `A`. Errors when `A` is empty or
/// not contained in the band.
pub fn boundary_outside(a: &DenseSet, band: &BandSpec, k: usize) -> Result<IsoperimetryReport> {
    if a.dim() != band.dim() {
        return Err(Error::DimensionMismatch(a.dim(), band.dim()));
    }
    if a.is_empty() {
        return Err(Error::EmptyOperand("boundary operand"));
    }
    if k == 0 {
        return Err(Error::ZeroIterations);
    }
    let sigma = band.to_dense()?;
    if !a.is_subset(&sigma)? {
        let offender = a
            .iter()
            .find(|&v| !sigma.contains(v))
            .expect("subset check failed");
        return Err(Error::NotInBand(format!("{offender:#x}")));
    }
    let ks = iterated_sumset(&layer(a.dim(), 1)?, k)?;
    let reach = crate::gfset::sumset(a, &ks)?;
    let outside = reach.difference(&sigma)?.len();
    Ok(build_report(
        band,
        k,
        BigUint::from(a.len()),
        BigUint::from(outside),
    ))
}

/// Flip-mask enumeration for kS: all coordinate subsets of size k, k-2, ...
/// down to k mod 2, as flat words plus the flip count.
fn flip_masks(dim: usize, words: usize, k: usize) -> Vec<(Vec<u64>, usize)> {
    use itertools::Itertools;
    let mut masks = Vec::new();
    let mut t = k as i64;
    while t >= 0 {
        for combo in (0..dim).combinations(t as usize) {
            let mut mask = vec![0u64; words];
            for i in combo {
                mask[i >> 6] |= 1u64 << (i & 63);
            }
            masks.push((mask, t as usize));
        }
        t -= 2;
    }
    masks
}

/// Distinct sums `a + x`, `x` in kS, landing outside the band, as a count.
/// Specialized to single-word elements when the dimension allows.
fn sparse_outside_count(elems: &[&[u64]], band: &BandSpec, k: usize) -> usize {
    let words = elems.first().map_or(1, |e| e.len());
    let masks = flip_masks(band.dim(), words, k);
    if words == 1 {
        let mut outside: HashSet<u64> = HashSet::new();
        for e in elems {
            let v = e[0];
            let w = v.count_ones() as usize;
            for (mask, t) in &masks {
                let overlap = (v & mask[0]).count_ones() as usize;
                let nw = w + t - 2 * overlap;
                if !band.contains_weight(nw) {
                    outside.insert(v ^ mask[0]);
                }
            }
        }
        outside.len()
    } else {
        sparse_outside_elements(elems, band, k).len()
    }
}

/// Same as [`sparse_outside_count`] but returning the sorted element list;
/// used where the boundary vectors themselves are inspected.
pub(crate) fn sparse_outside_elements(
    elems: &[&[u64]],
    band: &BandSpec,
    k: usize,
) -> Vec<Vec<u64>> {
    let words = elems.first().map_or(1, |e| e.len());
    let masks = flip_masks(band.dim(), words, k);
    let mut outside: HashSet<Vec<u64>> = HashSet::new();
    for e in elems {
        let w: usize = e.iter().map(|x| x.count_ones() as usize).sum();
        for (mask, t) in &masks {
            let overlap: usize = e
                .iter()
                .zip(mask)
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum();
            let nw = w + t - 2 * overlap;
            if !band.contains_weight(nw) {
                outside.insert(e.iter().zip(mask).map(|(a, b)| a ^ b).collect());
            }
        }
    }
    let mut sorted: Vec<Vec<u64>> = outside.into_iter().collect();
    sorted.sort_by(|a, b| crate::gfset::cmp_elements(a, b));
    sorted
}

/// Exact `|(A + kS) \ Sigma|` for an explicit `A` in GF(2)^D with D beyond
/// dense reach. `A` must be a single-block sparse set whose block dimension
/// matches the band. The budget bounds |A|; exceeding it reports the size
/// that would be required.
pub fn boundary_outside_sparse(
    a: &SparseSet,
    band: &BandSpec,
    k: usize,
    budget: usize,
) -> Result<IsoperimetryReport> {
    let geom = a.geometry();
    if geom.total_bits() != band.dim() {
        return Err(Error::DimensionMismatch(geom.total_bits(), band.dim()));
    }
    if a.is_empty() {
        return Err(Error::EmptyOperand("boundary operand"));
    }
    if k == 0 {
        return Err(Error::ZeroIterations);
    }
    if a.len() > budget {
        return Err(Error::BudgetExceeded {
            required: a.len(),
            budget,
        });
    }
    for e in a.iter() {
        let w: usize = e.iter().map(|x| x.count_ones() as usize).sum();
        if !band.contains_weight(w) {
            return Err(Error::NotInBand(format!("weight {w} not in {band:?}")));
        }
    }
    let elems: Vec<&[u64]> = a.iter().collect();
    let outside = sparse_outside_count(&elems, band, k);
    Ok(build_report(
        band,
        k,
        BigUint::from(a.len()),
        BigUint::from(outside),
    ))
}

/// One line of a sweep: the JSONL record serialized by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    #[serde(rename = "D")]
    pub dim: usize,
    pub k: usize,
    pub ell: usize,
    #[serde(rename = "sizeA")]
    pub size_a: u64,
    pub outside: u64,
    #[serde(rename = "ratioNum")]
    pub ratio_num: String,
    #[serde(rename = "ratioDen")]
    pub ratio_den: String,
    pub passes: bool,
    #[serde(rename = "hypothesisMet")]
    pub hypothesis_met: bool,
    pub seed: u64,
    pub trial: u64,
}

fn record(report: &IsoperimetryReport, k: usize, seed: u64, trial: u64) -> TrialRecord {
    TrialRecord {
        dim: report.band.dim(),
        k,
        ell: report.band.low(),
        size_a: u64::try_from(&report.size).expect("trial sizes fit u64"),
        outside: u64::try_from(&report.outside).expect("trial counts fit u64"),
        ratio_num: report.ratio.numer().to_string(),
        ratio_den: report.ratio.denom().to_string(),
        passes: report.passes,
        hypothesis_met: report.hypothesis_met,
        seed,
        trial,
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    // Independent stream per trial: results do not depend on evaluation
    // order, so a re-run (or a parallel schedule) reproduces every record.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Random-band sweep in dense range: each trial draws a uniform band
/// position, keeps each band element independently with probability 1/2
/// (rejecting the empty draw), and measures the boundary.
pub fn lemma21_sweep(
    dim: usize,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    if k == 0 || k > dim {
        return Err(Error::ParamDomain(format!("need 1 <= k <= D, got k={k}")));
    }
    let mut bands: Vec<(BandSpec, DenseSet)> = Vec::with_capacity(dim - k + 1);
    for ell in 0..=dim - k {
        let band = BandSpec::new(dim, ell, k)?;
        let sigma = band.to_dense()?;
        bands.push((band, sigma));
    }
    let mut records = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let ell = rng.random_range(0..=dim - k);
        let (band, sigma) = &bands[ell];
        let mut a = DenseSet::new(dim)?;
        loop {
            for v in sigma.iter() {
                if rng.random::<bool>() {
                    a.insert(v)?;
                }
            }
            if !a.is_empty() {
                break;
            }
        }
        let report = boundary_outside(&a, band, k)?;
        records.push(record(&report, k, seed, trial));
    }
    Ok(records)
}

/// Random-band sweep beyond dense reach: each trial draws a band position
/// and `sample_size` uniform band elements (deduplicated), and measures the
/// boundary through the sparse path.
pub fn lemma21_sweep_sparse(
    dim: usize,
    k: usize,
    trials: u64,
    sample_size: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    if k == 0 || k > dim {
        return Err(Error::ParamDomain(format!("need 1 <= k <= D, got k={k}")));
    }
    if sample_size == 0 {
        return Err(Error::EmptyOperand("sparse sweep sample size"));
    }
    let geom = crate::gfset::BlockGeometry::new(dim, 1)?;
    let mut records = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let ell = rng.random_range(0..=dim - k);
        let band = BandSpec::new(dim, ell, k)?;
        let mut elems = Vec::with_capacity(sample_size);
        for _ in 0..sample_size {
            let mut e = geom.zero_element();
            for c in band.sample_support(&mut rng) {
                e[c >> 6] |= 1u64 << (c & 63);
            }
            elems.push(e);
        }
        let a = SparseSet::from_elements(geom, elems)?;
        let report =
            boundary_outside_sparse(&a, &band, k, DEFAULT_SPARSE_BUDGET.max(sample_size))?;
        records.push(record(&report, k, seed, trial));
    }
    Ok(records)
}
