//! The product-band instance: `A = Sigma^m` in `(GF(2)^m)^m` with `Sigma` a
//! band of `k` consecutive layers centered at weight `m/2`, paired with the
//! full basis `B = {e_{i,j}}` of `m^2` vectors.
//!
//! Adding a basis vector to a uniform element of `A` stays inside `A` with
//! probability `1 - (C(m-1, l-1) + C(m-1, l+k-1)) / |Sigma|` where `l` is
//! the band's low layer: exactly the uniform chance that flipping one
//! coordinate of a uniform band element leaves the band. The derivation
//! drops out of block symmetry and is cross-checked against brute-force
//! pair enumeration in dense range.
//!
//! Parameters are derived from a closeness target `delta` in (0,1) and a
//! growth budget `K > 1`: `k` is the smallest odd integer above `4/delta`
//! (so the closure probability clears `1 - delta` with room) and `m` the
//! smallest even integer above `10k^2` (so boundary growth arguments
//! apply). Explicit `(m, k)` below those thresholds are allowed only in
//! unchecked mode and carry a `strict = false` flag.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gfset::{BlockGeometry, DenseSet, D_MAX};
use crate::layers::{binomial, BandSpec, BigCount};

#[derive(Clone, Debug)]
pub struct ConstructionParams {
    /// Closeness target for the closure probability, in (0, 1).
    pub delta: BigRational,
    /// Growth budget K used by witness-family diagnostics, > 1.
    pub growth_bound: BigRational,
    /// Band width; always odd, written k = 2*k_half + 1.
    pub k: usize,
    pub k_half: usize,
    /// Block dimension and block count.
    pub m: usize,
    pub m_half: usize,
    /// Low layer of the band: m_half - k_half.
    pub ell: usize,
    /// Whether every derivation hypothesis holds (k odd >= 3, m even,
    /// m > 10k^2). Unchecked instances run with this flag down.
    pub strict: bool,
}

/// The instance: block band, its product size, and the parameters.
#[derive(Clone, Debug)]
pub struct Instance {
    pub params: ConstructionParams,
    pub block_band: BandSpec,
    /// |A| = |Sigma|^m.
    pub size: BigCount,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check_growth_bound(growth_bound: &BigRational) -> Result<()> {
    if *growth_bound <= BigRational::one() {
        return Err(Error::ParamDomain(format!(
            "growth budget K must exceed 1, got {growth_bound}"
        )));
    }
    Ok(())
}

impl Instance {
    /// Derive (k, m) from the targets: k smallest odd > 4/delta, m smallest
    /// even > 10k^2.
    pub fn from_delta(delta: &BigRational, growth_bound: &BigRational) -> Result<Self> {
        let k = k_from_delta(delta)?;
        check_growth_bound(growth_bound)?;
        let m = 10 * k * k + 2;
        Self::assemble(delta.clone(), growth_bound.clone(), m, k)
    }

    /// Same targets but a caller-chosen m. Below the even 10k^2 threshold
    /// only unchecked mode proceeds.
    pub fn from_delta_with_m(
        delta: &BigRational,
        growth_bound: &BigRational,
        m: usize,
        unchecked: bool,
    ) -> Result<Self> {
        let k = k_from_delta(delta)?;
        check_growth_bound(growth_bound)?;
        if !unchecked && (m % 2 != 0 || m <= 10 * k * k) {
            return Err(Error::HypothesisViolated(format!(
                "m={m} needs to be even and exceed 10k^2={} (or pass unchecked)",
                10 * k * k
            )));
        }
        Self::assemble(delta.clone(), growth_bound.clone(), m, k)
    }

    /// Explicit (m, k) with default targets delta = 4/k, K = 2. k must be
    /// odd; strict hypotheses (k >= 3, m even, m > 10k^2) are enforced
    /// unless unchecked.
    pub fn from_explicit(m: usize, k: usize, unchecked: bool) -> Result<Self> {
        if k == 0 || k % 2 == 0 {
            return Err(Error::ParamDomain(format!(
                "band width k must be odd and positive, got {k}"
            )));
        }
        if !unchecked && (k < 3 || m % 2 != 0 || m <= 10 * k * k) {
            return Err(Error::HypothesisViolated(format!(
                "(m={m}, k={k}) violates k >= 3, m even, m > 10k^2 (pass unchecked to proceed)"
            )));
        }
        let delta = ratio(4, k as i64);
        Self::assemble(delta, ratio(2, 1), m, k)
    }

    fn assemble(
        delta: BigRational,
        growth_bound: BigRational,
        m: usize,
        k: usize,
    ) -> Result<Self> {
        let k_half = (k - 1) / 2;
        let m_half = m / 2;
        if m_half < k_half {
            return Err(Error::ParamDomain(format!(
                "band of width {k} does not fit dimension {m}"
            )));
        }
        let ell = m_half - k_half;
        let block_band = BandSpec::new(m, ell, k)?;
        let size = block_band.size().pow(m as u32);
        let strict = k >= 3 && m % 2 == 0 && m > 10 * k * k;
        Ok(Instance {
            params: ConstructionParams {
                delta,
                growth_bound,
                k,
                k_half,
                m,
                m_half,
                ell,
                strict,
            },
            block_band,
            size,
        })
    }

    pub fn geometry(&self) -> BlockGeometry {
        BlockGeometry::new(self.params.m, self.params.m).expect("m >= 1")
    }

    /// |B| = m^2 basis vectors.
    pub fn basis_size(&self) -> usize {
        self.params.m * self.params.m
    }

    /// Membership in A: every block weight inside the band.
    pub fn contains(&self, words: &[u64]) -> bool {
        let geom = self.geometry();
        (0..self.params.m).all(|j| self.block_band.contains_weight(geom.block_weight(words, j)))
    }

    /// How many band elements leave the band under a single fixed flip:
    /// C(m-1, l-1) from the bottom layer plus C(m-1, l+k-1) from the top.
    pub fn block_exit_count(&self) -> BigCount {
        let m = self.params.m as u64;
        let ell = self.params.ell as i64;
        let k = self.params.k as i64;
        binomial(m - 1, ell - 1) + binomial(m - 1, ell + k - 1)
    }

    /// P(a + b in A) for a uniform in A, b uniform in B, exactly.
    pub fn closure_probability_exact(&self) -> BigRational {
        let exits = BigRational::from(BigInt::from(self.block_exit_count()));
        let total = BigRational::from(BigInt::from(self.block_band.size()));
        BigRational::one() - exits / total
    }

    /// The coarse bound 1 - 2/k, which the exact probability always clears.
    pub fn closure_lower_bound(&self) -> BigRational {
        BigRational::one() - ratio(2, self.params.k as i64)
    }

    /// Fraction of the band held by its interior layers (width k-2), a
    /// closure lower bound by a one-step argument: flipping one coordinate
    /// of an interior-layer element cannot leave the band. Undefined for
    /// k = 1 where the interior is empty.
    pub fn closure_probability_inner_bound(&self) -> Result<BigRational> {
        if self.params.k == 1 {
            return Err(Error::ParamDomain(
                "inner band is empty for width k = 1".into(),
            ));
        }
        let inner = BandSpec::new(self.params.m, self.params.ell + 1, self.params.k - 2)?;
        Ok(BigRational::new(
            inner.size().into(),
            self.block_band.size().into(),
        ))
    }

    /// Uniform element of A as flat words: each block sampled independently
    /// from the band.
    pub fn sample_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        let geom = self.geometry();
        let sampler = self.block_band.sampler();
        let mut words = geom.zero_element();
        for j in 0..self.params.m {
            for c in sampler.sample_support(rng) {
                let bit = j * self.params.m + c;
                words[bit >> 6] |= 1u64 << (bit & 63);
            }
        }
        words
    }

    /// Monte-Carlo estimate of the closure probability with a Wilson 99%
    /// confidence interval. Deterministic for a fixed seed: samples are
    /// processed in fixed-size chunks, each on its own ChaCha8 stream.
    ///
    /// A sampled pair is (a, b) with a uniform in A and b = e_{i,j} uniform
    /// in B. Whether a + b stays in A depends only on block j of a and on
    /// i, and blocks of a are independent, so only that block is
    /// materialized - drawn by the exact inverse-CDF layer choice and a
    /// Fisher-Yates subset, like every other block would be.
    pub fn closure_probability_montecarlo(&self, samples: u64, seed: u64) -> Result<McEstimate> {
        if samples == 0 {
            return Err(Error::EmptyOperand("sample count"));
        }
        const CHUNK: u64 = 4096;
        let m = self.params.m;
        let sampler = self.block_band.sampler();
        let mut hits = 0u64;
        let mut done = 0u64;
        let mut chunk_index = 0u64;
        while done < samples {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk_index);
            let in_chunk = CHUNK.min(samples - done);
            for _ in 0..in_chunk {
                let i = rng.random_range(0..m);
                let _j = rng.random_range(0..m); // block choice; by symmetry only i matters
                let support = sampler.sample_support(&mut rng);
                let w = support.len();
                let flipped = if support.contains(&i) { w - 1 } else { w + 1 };
                if self.block_band.contains_weight(flipped) {
                    hits += 1;
                }
            }
            done += in_chunk;
            chunk_index += 1;
        }
        let estimate = hits as f64 / samples as f64;
        let (ci_low, ci_high) = wilson_interval(hits, samples);
        Ok(McEstimate {
            estimate,
            ci_low,
            ci_high,
            hits,
            samples,
            seed,
        })
    }
}

fn k_from_delta(delta: &BigRational) -> Result<usize> {
    if *delta <= BigRational::zero() || *delta >= BigRational::one() {
        return Err(Error::ParamDomain(format!(
            "delta must lie strictly between 0 and 1, got {delta}"
        )));
    }
    // Smallest odd integer strictly above 4/delta.
    let four_over = ratio(4, 1) / delta;
    let above = four_over.floor().to_integer() + BigInt::one();
    let above = above
        .to_usize()
        .ok_or_else(|| Error::ParamDomain("delta too small to size k".into()))?;
    Ok(if above % 2 == 1 { above } else { above + 1 })
}

/// Monte-Carlo outcome; the only floating point produced by measurement
/// code, and a statistical quantity by nature.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: u64,
    pub samples: u64,
    pub seed: u64,
}

/// Two-sided 99% normal quantile.
const Z99: f64 = 2.575_829_303_548_900_4;

fn wilson_interval(hits: u64, samples: u64) -> (f64, f64) {
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = Z99 * Z99;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z99 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// All elements of A as dense vectors in GF(2)^(m^2); dense range only.
pub fn enumerate_dense(instance: &Instance) -> Result<DenseSet> {
    let m = instance.params.m;
    let flat = m * m;
    if flat > D_MAX {
        return Err(Error::DimensionOutOfRange(flat, D_MAX));
    }
    let block: Vec<usize> = instance.block_band.to_dense()?.iter().collect();
    let mut out = DenseSet::new(flat)?;
    // Depth-first product over blocks; each level shifts a block pattern
    // into place.
    fn fill(
        out: &mut DenseSet,
        block: &[usize],
        m: usize,
        depth: usize,
        prefix: usize,
    ) -> Result<()> {
        if depth == m {
            out.insert(prefix)?;
            return Ok(());
        }
        for &b in block {
            fill(out, block, m, depth + 1, prefix | b << (depth * m))?;
        }
        Ok(())
    }
    fill(&mut out, &block, m, 0, 0)?;
    Ok(out)
}

/// Per-basis-vector closure counts |{a in A : a + e_{i,j} in A}|, indexed
/// by j*m + i. Block symmetry predicts all entries equal; the exact
/// probability equals their total over |A| * m^2.
pub fn per_basis_closure_counts(instance: &Instance) -> Result<Vec<u64>> {
    let a = enumerate_dense(instance)?;
    let m = instance.params.m;
    let mut counts = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            let b = 1usize << (j * m + i);
            let count = a.iter().filter(|&v| a.contains(v ^ b)).count();
            counts.push(count as u64);
        }
    }
    Ok(counts)
}

/// Brute-force closure probability by pair enumeration in dense range; the
/// oracle the closed form is checked against.
pub fn brute_force_closure_probability(instance: &Instance) -> Result<BigRational> {
    let counts = per_basis_closure_counts(instance)?;
    let total: u64 = counts.iter().sum();
    let pairs = BigInt::from(instance.size.clone()) * BigInt::from(instance.basis_size());
    Ok(BigRational::new(BigInt::from(total), pairs))
}

/// One row of the odd-characteristic growth table: B' = first t basis
/// vectors.
#[derive(Clone, Debug)]
pub struct GrowthRow {
    pub t: usize,
    pub sumset_size: u64,
    pub ratio: BigRational,
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub p: usize,
    pub n: usize,
    /// P(a + b in A) for A = {0,1}^n in F_p^n, B the basis, exactly.
    pub closure: BigRational,
    pub growth: Vec<GrowthRow>,
}

/// The contrast case over F_p, p >= 3 prime: A = {0,1}^n never has closure
/// probability above 1/2, no matter the growth of A + B'. Enumerated
/// exactly; p^n is kept within enumeration reach.
pub fn comparison_example(p: usize, n: usize) -> Result<ComparisonReport> {
    if p < 3 || !is_prime(p) {
        return Err(Error::ParamDomain(format!(
            "comparison field needs an odd prime p >= 3, got {p}"
        )));
    }
    if n == 0 {
        return Err(Error::ParamDomain("need at least one coordinate".into()));
    }
    const UNIVERSE_BUDGET: usize = 10_000_000;
    let universe = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if universe > UNIVERSE_BUDGET as u128 {
        return Err(Error::BudgetExceeded {
            required: universe.min(usize::MAX as u128) as usize,
            budget: UNIVERSE_BUDGET,
        });
    }

    // Vectors encoded base p, coordinate 0 least significant.
    let powers: Vec<usize> = (0..n).scan(1usize, |acc, _| {
        let v = *acc;
        *acc *= p;
        Some(v)
    }).collect();
    let a_set: Vec<usize> = (0..1usize << n)
        .map(|bits| (0..n).map(|c| (bits >> c & 1) * powers[c]).sum())
        .collect();
    let membership: std::collections::HashSet<usize> = a_set.iter().copied().collect();

    let add_basis = |v: usize, c: usize| -> usize {
        let digit = v / powers[c] % p;
        if digit + 1 == p {
            v - digit * powers[c]
        } else {
            v + powers[c]
        }
    };

    let mut closure_hits = 0u64;
    for &a in &a_set {
        for c in 0..n {
            if membership.contains(&add_basis(a, c)) {
                closure_hits += 1;
            }
        }
    }
    let closure = BigRational::new(
        BigInt::from(closure_hits),
        BigInt::from(a_set.len() as u64 * n as u64),
    );

    let mut growth = Vec::with_capacity(n);
    let mut sums: std::collections::HashSet<usize> = std::collections::HashSet::new();
    for t in 1..=n {
        // A + {e_1..e_t} grows monotonically in t; extend with the new basis
        // vector only.
        for &a in &a_set {
            sums.insert(add_basis(a, t - 1));
        }
        growth.push(GrowthRow {
            t,
            sumset_size: sums.len() as u64,
            ratio: BigRational::new(BigInt::from(sums.len()), BigInt::from(a_set.len())),
        });
    }
    Ok(ComparisonReport {
        p,
        n,
        closure,
        growth,
    })
}

fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2usize;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::approx_f64;

    fn toy() -> Instance {
        Instance::from_explicit(4, 3, true).unwrap()
    }

    #[test]
    fn derived_parameters_at_half() {
        let inst = Instance::from_delta(&ratio(1, 2), &ratio(2, 1)).unwrap();
        assert_eq!(inst.params.k, 9);
        assert_eq!(inst.params.m, 812);
        assert_eq!(inst.params.ell, 406 - 4);
        assert_eq!(inst.basis_size(), 812 * 812);
        assert!(inst.params.strict);
        // Band: layers 402..=410 of GF(2)^812.
        assert_eq!(inst.block_band.low(), 402);
        assert_eq!(inst.block_band.high(), 410);
    }

    #[test]
    fn derived_parameters_elsewhere() {
        // delta = 1/3: 4/delta = 12, next odd above is 13.
        let inst = Instance::from_delta(&ratio(1, 3), &ratio(3, 2)).unwrap();
        assert_eq!(inst.params.k, 13);
        assert_eq!(inst.params.m, 10 * 169 + 2);
        // delta = 9/10: 4/delta = 40/9, smallest odd above is 5.
        let inst = Instance::from_delta(&ratio(9, 10), &ratio(2, 1)).unwrap();
        assert_eq!(inst.params.k, 5);
        // The consistency requirement k > 2/delta holds by construction.
        assert!(ratio(inst.params.k as i64, 1) > ratio(2, 1) / ratio(9, 10));
    }

    #[test]
    fn toy_instance_shape() {
        let inst = toy();
        assert_eq!(inst.params.ell, 1);
        assert_eq!(inst.block_band, BandSpec::new(4, 1, 3).unwrap());
        assert_eq!(inst.block_band.size(), BigCount::from(14u32));
        assert_eq!(inst.size, BigCount::from(38416u32)); // 14^4
        assert!(!inst.params.strict);
    }

    #[test]
    fn parameter_domain_errors() {
        assert!(Instance::from_delta(&ratio(0, 1), &ratio(2, 1)).is_err());
        assert!(Instance::from_delta(&ratio(1, 1), &ratio(2, 1)).is_err());
        assert!(Instance::from_delta(&ratio(3, 2), &ratio(2, 1)).is_err());
        assert!(Instance::from_delta(&ratio(1, 2), &ratio(1, 1)).is_err());
        assert!(Instance::from_delta(&ratio(1, 2), &ratio(1, 2)).is_err());
        // Explicit instances: even k never works; small m needs unchecked.
        assert!(matches!(
            Instance::from_explicit(4, 2, true),
            Err(Error::ParamDomain(_))
        ));
        assert!(matches!(
            Instance::from_explicit(4, 3, false),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(Instance::from_explicit(4, 3, true).is_ok());
        // delta=1/2 gives k=9, so strict mode needs even m > 810.
        assert!(matches!(
            Instance::from_delta_with_m(&ratio(1, 2), &ratio(2, 1), 810, false),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            Instance::from_delta_with_m(&ratio(1, 2), &ratio(2, 1), 811, false),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(Instance::from_delta_with_m(&ratio(1, 2), &ratio(2, 1), 810, true).is_ok());
        assert!(Instance::from_delta_with_m(&ratio(1, 2), &ratio(2, 1), 812, false).is_ok());
    }

    #[test]
    fn closure_probability_toy_values() {
        assert_eq!(toy().closure_probability_exact(), ratio(6, 7));
        // Degenerate single-layer band: flipping always leaves, so 0.
        let degenerate = Instance::from_explicit(2, 1, true).unwrap();
        assert_eq!(
            degenerate.closure_probability_exact(),
            BigRational::zero()
        );
    }

    #[test]
    fn closure_probability_matches_brute_force() {
        for (m, k) in [(2usize, 1usize), (4, 1), (4, 3), (5, 3)] {
            let inst = Instance::from_explicit(m, k, true).unwrap();
            let brute = brute_force_closure_probability(&inst).unwrap();
            assert_eq!(
                inst.closure_probability_exact(),
                brute,
                "(m, k) = ({m}, {k})"
            );
        }
    }

    #[test]
    fn per_basis_counts_all_equal() {
        let counts = per_basis_closure_counts(&toy()).unwrap();
        assert_eq!(counts.len(), 16);
        assert!(counts.iter().all(|&c| c == counts[0]));
        // 12 of 14 band elements survive any fixed flip, per block. The
        // other three blocks are free: 12 * 14^3.
        assert_eq!(counts[0], 12 * 14 * 14 * 14);
    }

    #[test]
    fn exact_beats_lower_bound_on_random_instances() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let k = 2 * rng.random_range(0..4usize) + 1;
            let m = rng.random_range(k.max(2)..40usize);
            let Ok(inst) = Instance::from_explicit(m, k, true) else {
                continue;
            };
            let exact = inst.closure_probability_exact();
            assert!(
                exact >= inst.closure_lower_bound(),
                "(m, k) = ({m}, {k}): {exact} vs {}",
                inst.closure_lower_bound()
            );
        }
        // And at the derived scale point, where the bound is 1 - 2/9.
        let big = Instance::from_delta(&ratio(1, 2), &ratio(2, 1)).unwrap();
        assert!(big.closure_probability_exact() >= ratio(7, 9));
        assert!(big.closure_lower_bound() == ratio(7, 9));
    }

    #[test]
    fn inner_bound_values() {
        assert_eq!(
            toy().closure_probability_inner_bound().unwrap(),
            ratio(6, 14)
        );
        let inst = Instance::from_explicit(12, 3, true).unwrap();
        assert_eq!(
            inst.closure_probability_inner_bound().unwrap(),
            BigRational::new(BigInt::from(924), BigInt::from(2508))
        );
        let degenerate = Instance::from_explicit(2, 1, true).unwrap();
        assert!(degenerate.closure_probability_inner_bound().is_err());
    }

    #[test]
    fn inner_bound_sandwiched() {
        for (m, k) in [(4usize, 3usize), (8, 3), (12, 3), (12, 5), (20, 5), (30, 7)] {
            let inst = Instance::from_explicit(m, k, true).unwrap();
            let inner = inst.closure_probability_inner_bound().unwrap();
            let exact = inst.closure_probability_exact();
            assert!(inner <= exact, "(m,k)=({m},{k})");
            assert!(inner >= inst.closure_lower_bound(), "(m,k)=({m},{k})");
        }
    }

    #[test]
    fn montecarlo_toy_within_three_sigma() {
        let inst = toy();
        let est = inst.closure_probability_montecarlo(100_000, 0).unwrap();
        let p: f64 = 6.0 / 7.0;
        let sigma = (p * (1.0 - p) / 100_000.0).sqrt();
        assert!(
            (est.estimate - p).abs() < 3.0 * sigma,
            "estimate {} vs {p}",
            est.estimate
        );
        assert!(est.ci_low < p && p < est.ci_high);
        assert_eq!(est.hits, (est.estimate * 100_000.0).round() as u64);
    }

    #[test]
    fn montecarlo_is_deterministic_per_seed() {
        let inst = toy();
        let a = inst.closure_probability_montecarlo(10_000, 9).unwrap();
        let b = inst.closure_probability_montecarlo(10_000, 9).unwrap();
        assert_eq!(a.hits, b.hits);
        let c = inst.closure_probability_montecarlo(10_000, 10).unwrap();
        assert_ne!(a.hits, c.hits); // different stream, almost surely
    }

    #[test]
    fn montecarlo_single_sample_and_zero() {
        let inst = toy();
        let est = inst.closure_probability_montecarlo(1, 3).unwrap();
        assert!(est.estimate == 0.0 || est.estimate == 1.0);
        assert!(inst.closure_probability_montecarlo(0, 3).is_err());
    }

    #[test]
    fn montecarlo_unbiased_over_seed_pool() {
        let inst = toy();
        let per_seed = 4_000u64;
        let seeds = 16u64;
        let mut hits = 0u64;
        for seed in 0..seeds {
            hits += inst
                .closure_probability_montecarlo(per_seed, seed)
                .unwrap()
                .hits;
        }
        let n = (per_seed * seeds) as f64;
        let p = 6.0 / 7.0;
        let sigma = (p * (1.0 - p) / n).sqrt();
        let pooled = hits as f64 / n;
        assert!(
            (pooled - p).abs() < 4.0 * sigma,
            "pooled {pooled} vs {p} (sigma {sigma})"
        );
    }

    #[test]
    fn montecarlo_tracks_closed_form_at_scale() {
        let inst = Instance::from_delta(&ratio(1, 2), &ratio(2, 1)).unwrap();
        let closed = approx_f64(&inst.closure_probability_exact());
        let est = inst.closure_probability_montecarlo(20_000, 1).unwrap();
        let sigma = (closed * (1.0 - closed) / 20_000.0).sqrt();
        assert!(
            (est.estimate - closed).abs() < 4.0 * sigma,
            "estimate {} vs closed {closed}",
            est.estimate
        );
    }

    #[test]
    fn comparison_single_coordinate() {
        let report = comparison_example(3, 1).unwrap();
        // A = {0,1}: adding 1 keeps membership for a = 0 only.
        assert_eq!(report.closure, ratio(1, 2));
        assert_eq!(report.growth.len(), 1);
        assert_eq!(report.growth[0].sumset_size, 2);
        assert_eq!(report.growth[0].ratio, ratio(1, 1));
    }

    #[test]
    fn comparison_probability_is_exactly_half() {
        for (p, n) in [(3usize, 4usize), (3, 7), (5, 4), (7, 3)] {
            let report = comparison_example(p, n).unwrap();
            assert_eq!(report.closure, ratio(1, 2), "(p, n) = ({p}, {n})");
            // Growth stays modest: |A + B_t| <= (t + 1) |A| trivially, and
            // the table is nondecreasing in t.
            for row in &report.growth {
                assert!(row.ratio <= ratio(row.t as i64 + 1, 1));
            }
            for pair in report.growth.windows(2) {
                assert!(pair[0].sumset_size <= pair[1].sumset_size);
            }
        }
    }

    #[test]
    fn comparison_domain_errors() {
        assert!(comparison_example(2, 3).is_err());
        assert!(comparison_example(4, 3).is_err());
        assert!(comparison_example(1, 3).is_err());
        assert!(comparison_example(3, 0).is_err());
        // 3^15 > 10^7.
        assert!(matches!(
            comparison_example(3, 15),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sample_element_lands_in_a() {
        let inst = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let e = inst.sample_element(&mut rng);
            assert!(inst.contains(&e));
        }
    }
}
