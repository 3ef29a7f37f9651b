//! Exact layer counting: binomial coefficients, bands of consecutive
//! Hamming layers, and the growth-ratio inequalities that drive the
//! boundary lower bound.
//!
//! Everything here is integer/rational arithmetic on [`BigCount`] and
//! [`BigRational`]; floating point only ever appears through
//! [`decimal_string`] when a value is rendered for people.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gfset::{layer, DenseSet};

/// Arbitrary-precision cardinality.
pub type BigCount = BigUint;

/// C(n, r), total in r: zero when r < 0 or r > n. Computed by the
/// multiplicative formula; each partial product is exactly divisible, so no
/// rationals are needed along the way.
pub fn binomial(n: u64, r: i64) -> BigCount {
    if r < 0 || r as u64 > n {
        return BigCount::zero();
    }
    let r = (r as u64).min(n - r as u64);
    let mut acc = BigCount::one();
    for t in 0..r {
        acc = acc * (n - t) / (t + 1);
    }
    acc
}

/// A band of `width` consecutive Hamming layers `L_low .. L_{low+width-1}`
/// in GF(2)^dim.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BandSpec {
    dim: usize,
    low: usize,
    width: usize,
}

impl BandSpec {
    pub fn new(dim: usize, low: usize, width: usize) -> Result<Self> {
        if dim == 0 || width == 0 || low + width - 1 > dim {
            return Err(Error::InvalidBand { dim, low, width });
        }
        Ok(BandSpec { dim, low, width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn low(&self) -> usize {
        self.low
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn high(&self) -> usize {
        self.low + self.width - 1
    }

    pub fn contains_weight(&self, w: usize) -> bool {
        self.low <= w && w <= self.high()
    }

    /// Exact cardinality: sum of the layer sizes.
    pub fn size(&self) -> BigCount {
        (self.low..=self.high())
            .map(|d| binomial(self.dim as u64, d as i64))
            .sum()
    }

    /// Materialize as a dense set (dim must be within dense reach).
    pub fn to_dense(&self) -> Result<DenseSet> {
        let mut acc = layer(self.dim, self.low)?;
        for d in self.low + 1..=self.high() {
            acc = acc.union(&layer(self.dim, d)?)?;
        }
        Ok(acc)
    }

    /// Support of a uniformly random band element. Convenience wrapper that
    /// rebuilds the layer table each call; use [`BandSampler`] in loops.
    pub fn sample_support<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        BandSampler::new(*self).sample_support(rng)
    }

    /// Reusable uniform sampler over this band.
    pub fn sampler(&self) -> BandSampler {
        BandSampler::new(*self)
    }
}

/// Uniform sampler over a band with the cumulative layer sizes computed
/// once up front, so repeated draws cost no big-integer binomials.
pub struct BandSampler {
    band: BandSpec,
    /// cumulative[i] = |L_low| + .. + |L_{low+i}|; last entry is the band size.
    cumulative: Vec<BigCount>,
}

impl BandSampler {
    pub fn new(band: BandSpec) -> Self {
        let mut cumulative = Vec::with_capacity(band.width());
        let mut acc = BigCount::zero();
        for d in band.low()..=band.high() {
            acc += binomial(band.dim() as u64, d as i64);
            cumulative.push(acc.clone());
        }
        BandSampler { band, cumulative }
    }

    pub fn band(&self) -> &BandSpec {
        &self.band
    }

    /// Support of a uniformly random band element: the layer is chosen by
    /// exact inverse-CDF over layer sizes, then a uniform weight-d subset of
    /// the coordinates by partial Fisher-Yates. Returns the set coordinate
    /// indices (unsorted).
    pub fn sample_support<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let u = uniform_below(rng, self.cumulative.last().expect("nonempty band"));
        let offset = self.cumulative.partition_point(|cum| *cum <= u);
        let chosen = self.band.low() + offset;
        let dim = self.band.dim();
        let mut pool: Vec<usize> = (0..dim).collect();
        for t in 0..chosen {
            let j = rng.random_range(t..dim);
            pool.swap(t, j);
        }
        pool.truncate(chosen);
        pool
    }
}

/// Uniform BigCount in [0, bound), by rejection on `bound.bits()` random
/// bits. The expected number of rounds is below 2.
pub fn uniform_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigCount) -> BigCount {
    assert!(!bound.is_zero(), "uniform_below needs a positive bound");
    if bound.is_one() {
        return BigCount::zero();
    }
    let bits = bound.bits();
    let words = bits.div_ceil(64) as usize;
    let excess = (64 * words as u64 - bits) as u32;
    loop {
        let mut bytes = Vec::with_capacity(words * 8);
        for w in 0..words {
            let mut val: u64 = rng.random();
            if w == words - 1 && excess > 0 {
                val >>= excess;
            }
            bytes.extend_from_slice(&val.to_le_bytes());
        }
        let candidate = BigCount::from_bytes_le(&bytes);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// The one-step growth ratio C(D-i, k) / C(i+k, k): every vector of weight i
/// has C(D-i, k) upward k-flip continuations, and every vector of weight i+k
/// is reached by at most C(i+k, k) of them. Requires i <= D - k so the
/// numerator counts something.
pub fn growth_ratio(dim: usize, i: usize, k: usize) -> Result<BigRational> {
    if k == 0 || k > dim {
        return Err(Error::ParamDomain(format!(
            "flip count k={k} out of range for dim {dim}"
        )));
    }
    if i + k > dim {
        return Err(Error::ParamDomain(format!(
            "layer i={i} above dim-k={}",
            dim - k
        )));
    }
    let num = binomial((dim - i) as u64, k as i64);
    let den = binomial((i + k) as u64, k as i64);
    Ok(BigRational::new(num.into(), den.into()))
}

fn rational_pow(r: &BigRational, k: usize) -> BigRational {
    BigRational::new(r.numer().pow(k as u32), r.denom().pow(k as u32))
}

fn ratio_of(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Outcome of checking the exact inequality chain
/// `min_i growth_ratio(D,i,k) >= ((D/2-k)/(D/2+k))^k >= (1-4k/D)^k > 1/2`
/// over integer layers `i <= D/2`.
#[derive(Clone, Debug)]
pub struct RatioChainReport {
    pub dim: usize,
    pub k: usize,
    pub min_ratio: BigRational,
    pub witness_i: usize,
    pub mid_bound: BigRational,
    pub bernoulli_bound: BigRational,
    pub ratio_above_mid: bool,
    pub mid_above_bernoulli: bool,
    pub bernoulli_above_half: bool,
    pub passes: bool,
}

/// Verify the growth-ratio chain for every i <= D/2, in exact rationals.
/// Errors when the supporting hypothesis D > 10k^2 does not hold (the chain
/// is only claimed there).
pub fn ratio_lower_bound_check(dim: usize, k: usize) -> Result<RatioChainReport> {
    if dim <= 10 * k * k {
        return Err(Error::HypothesisViolated(format!(
            "need D > 10k^2, got D={dim}, k={k}"
        )));
    }
    let half_d = ratio_of(dim as i64, 2);
    let k_rat = ratio_of(k as i64, 1);
    let mid_base = (&half_d - &k_rat) / (&half_d + &k_rat);
    let mid_bound = rational_pow(&mid_base, k);
    let bern_base = ratio_of(dim as i64 - 4 * k as i64, dim as i64);
    let bernoulli_bound = rational_pow(&bern_base, k);

    let mut min_ratio: Option<BigRational> = None;
    let mut witness_i = 0usize;
    for i in 0..=dim / 2 {
        let r = growth_ratio(dim, i, k)?;
        if min_ratio.as_ref().is_none_or(|m| r < *m) {
            min_ratio = Some(r);
            witness_i = i;
        }
    }
    let min_ratio = min_ratio.expect("at least layer 0 is checked");

    let ratio_above_mid = min_ratio >= mid_bound;
    let mid_above_bernoulli = mid_bound >= bernoulli_bound;
    let bernoulli_above_half = bernoulli_bound > ratio_of(1, 2);
    let passes = ratio_above_mid && mid_above_bernoulli && bernoulli_above_half;
    Ok(RatioChainReport {
        dim,
        k,
        min_ratio,
        witness_i,
        mid_bound,
        bernoulli_bound,
        ratio_above_mid,
        mid_above_bernoulli,
        bernoulli_above_half,
        passes,
    })
}

/// Render an exact rational in scientific notation with `sig` significant
/// digits (the one place floating-point-style output is produced). Rounds
/// half away from zero.
pub fn decimal_string(r: &BigRational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return format!("{:.*}e0", sig - 1, 0.0);
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let num = r.numer().abs().to_biguint().unwrap();
    let den = r.denom().abs().to_biguint().unwrap();
    // First exponent guess from decimal digit counts, then correct by one
    // after scaling (the guess is off by at most one).
    let mut e10 = num.to_string().len() as i64 - den.to_string().len() as i64;
    loop {
        let shift = sig as i64 - 1 - e10;
        let ten = BigUint::from(10u32);
        let (scaled_num, scaled_den) = if shift >= 0 {
            (&num * ten.pow(shift as u32), den.clone())
        } else {
            (num.clone(), &den * ten.pow((-shift) as u32))
        };
        let q = (&scaled_num * 2u32 + &scaled_den) / (&scaled_den * 2u32);
        let digits = q.to_string();
        if digits.len() > sig {
            e10 += digits.len() as i64 - sig as i64;
            continue;
        }
        if digits.len() < sig {
            e10 -= 1;
            continue;
        }
        return format!("{sign}{}.{}e{e10}", &digits[..1], &digits[1..]);
    }
}

/// Exact rational -> nearest f64, via the decimal renderer so that huge
/// numerators/denominators cannot overflow on the way.
pub fn approx_f64(r: &BigRational) -> f64 {
    decimal_string(r, 17).parse().unwrap()
}
