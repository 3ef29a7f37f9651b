//! Python bindings for the band-growth toolkit.
//!
//! Exposes the dense set kernel, band geometry, the product-set instance
//! with its closure probabilities, and the verification entry points.
//! Exact rationals cross the boundary as `(numerator, denominator)` pairs
//! of Python ints; exact counts as Python ints. Library errors surface as
//! `ValueError`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bandgrowth::construction::{brute_force_closure_probability, comparison_example, Instance};
use bandgrowth::gfset::{self, DenseSet, SparseSet};
use bandgrowth::layers::{self, BandSpec};
use bandgrowth::plunnecke::{self, RuzsaOutcome};
use bandgrowth::witness::{self, BasisFamily};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Rat = (BigInt, BigInt);

fn rat_pair(r: &BigRational) -> Rat {
    (r.numer().clone(), r.denom().clone())
}

fn rat_from(num: i64, den: i64) -> PyResult<BigRational> {
    if den == 0 {
        return Err(PyValueError::new_err("zero denominator"));
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// A subset of GF(2)^dim held as a bit array; elements are integers whose
/// bit i is coordinate i.
#[pyclass(name = "DenseSet", skip_from_py_object)]
#[derive(Clone)]
struct PyDenseSet {
    inner: DenseSet,
}

#[pymethods]
impl PyDenseSet {
    #[new]
    fn new(dim: usize, elements: Vec<usize>) -> PyResult<Self> {
        Ok(PyDenseSet {
            inner: DenseSet::from_elements(dim, elements).map_err(err)?,
        })
    }

    /// All vectors of Hamming weight d.
    #[staticmethod]
    fn layer(dim: usize, d: usize) -> PyResult<Self> {
        Ok(PyDenseSet {
            inner: gfset::layer(dim, d).map_err(err)?,
        })
    }

    /// All vectors with weight in [low, low + width).
    #[staticmethod]
    fn band(dim: usize, low: usize, width: usize) -> PyResult<Self> {
        let spec = BandSpec::new(dim, low, width).map_err(err)?;
        Ok(PyDenseSet {
            inner: spec.to_dense().map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn elements(&self) -> Vec<usize> {
        self.inner.iter().collect()
    }

    fn contains(&self, v: usize) -> bool {
        v < 1usize << self.inner.dim() && self.inner.contains(v)
    }

    /// XOR sumset with another set of the same dimension.
    fn sumset(&self, other: &PyDenseSet) -> PyResult<Self> {
        Ok(PyDenseSet {
            inner: gfset::sumset(&self.inner, &other.inner).map_err(err)?,
        })
    }

    /// k-fold sumset of this set with itself (cancellation included).
    fn iterated_sumset(&self, k: usize) -> PyResult<Self> {
        Ok(PyDenseSet {
            inner: gfset::iterated_sumset(&self.inner, k).map_err(err)?,
        })
    }

    fn union(&self, other: &PyDenseSet) -> PyResult<Self> {
        Ok(PyDenseSet {
            inner: self.inner.union(&other.inner).map_err(err)?,
        })
    }

    fn intersection(&self, other: &PyDenseSet) -> PyResult<Self> {
        Ok(PyDenseSet {
            inner: self.inner.intersection(&other.inner).map_err(err)?,
        })
    }

    fn difference(&self, other: &PyDenseSet) -> PyResult<Self> {
        Ok(PyDenseSet {
            inner: self.inner.difference(&other.inner).map_err(err)?,
        })
    }

    fn is_subset(&self, other: &PyDenseSet) -> PyResult<bool> {
        self.inner.is_subset(&other.inner).map_err(err)
    }

    fn __eq__(&self, other: &PyDenseSet) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("DenseSet(dim={}, len={})", self.inner.dim(), self.inner.len())
    }
}

/// A band of consecutive Hamming layers, kept symbolic so sizes stay exact
/// at any dimension.
#[pyclass(name = "Band", skip_from_py_object)]
#[derive(Clone)]
struct PyBand {
    inner: BandSpec,
}

#[pymethods]
impl PyBand {
    #[new]
    fn new(dim: usize, low: usize, width: usize) -> PyResult<Self> {
        Ok(PyBand {
            inner: BandSpec::new(dim, low, width).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn low(&self) -> usize {
        self.inner.low()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn high(&self) -> usize {
        self.inner.high()
    }

    /// Exact cardinality as a Python int.
    fn size(&self) -> BigUint {
        self.inner.size()
    }

    fn contains_weight(&self, w: usize) -> bool {
        self.inner.contains_weight(w)
    }

    fn to_dense(&self) -> PyResult<PyDenseSet> {
        Ok(PyDenseSet {
            inner: self.inner.to_dense().map_err(err)?,
        })
    }

    /// Coordinates of one uniformly random band element (seeded).
    fn sample_support(&self, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.inner.sample_support(&mut rng)
    }

    fn __repr__(&self) -> String {
        format!(
            "Band(dim={}, low={}, width={})",
            self.inner.dim(),
            self.inner.low(),
            self.inner.width()
        )
    }
}

/// The m-block product instance A = band^m with basis family B.
#[pyclass(name = "Instance", skip_from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: Instance,
}

#[pymethods]
impl PyInstance {
    /// Build from explicit block dimension m and band width k (odd).
    /// `unchecked` skips the size hypotheses for toy instances.
    #[staticmethod]
    #[pyo3(signature = (m, k, unchecked = false))]
    fn from_explicit(m: usize, k: usize, unchecked: bool) -> PyResult<Self> {
        Ok(PyInstance {
            inner: Instance::from_explicit(m, k, unchecked).map_err(err)?,
        })
    }

    /// Build from a target closure defect delta = num/den (0 < delta < 1);
    /// picks the smallest odd k with 1 - 2/k >= 1 - delta and the default
    /// block dimension.
    #[staticmethod]
    fn from_delta(num: i64, den: i64) -> PyResult<Self> {
        let delta = rat_from(num, den)?;
        let two = rat_from(2, 1)?;
        Ok(PyInstance {
            inner: Instance::from_delta(&delta, &two).map_err(err)?,
        })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.params.m
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.params.k
    }

    #[getter]
    fn ell(&self) -> usize {
        self.inner.params.ell
    }

    #[getter]
    fn delta(&self) -> Rat {
        rat_pair(&self.inner.params.delta)
    }

    #[getter]
    fn strict(&self) -> bool {
        self.inner.params.strict
    }

    fn block_band(&self) -> PyBand {
        PyBand {
            inner: self.inner.block_band,
        }
    }

    /// |A| as a Python int.
    fn size(&self) -> BigUint {
        self.inner.size.clone()
    }

    /// |B| = m^2 basis vectors.
    fn basis_size(&self) -> usize {
        self.inner.basis_size()
    }

    /// P(a + b in A) exactly, as (num, den).
    fn closure_exact(&self) -> Rat {
        rat_pair(&self.inner.closure_probability_exact())
    }

    /// The guaranteed floor 1 - 2/k, as (num, den).
    fn closure_lower_bound(&self) -> Rat {
        rat_pair(&self.inner.closure_lower_bound())
    }

    /// Probability that a + b stays in the inner band, as (num, den).
    fn closure_inner_bound(&self) -> PyResult<Rat> {
        Ok(rat_pair(
            &self.inner.closure_probability_inner_bound().map_err(err)?,
        ))
    }

    /// Seeded Monte-Carlo closure estimate:
    /// (estimate, ci_low, ci_high, hits) with a 99% Wilson interval.
    fn closure_montecarlo(&self, samples: u64, seed: u64) -> PyResult<(f64, f64, f64, u64)> {
        let mc = self
            .inner
            .closure_probability_montecarlo(samples, seed)
            .map_err(err)?;
        Ok((mc.estimate, mc.ci_low, mc.ci_high, mc.hits))
    }

    /// One uniformly random element of A as flat 64-bit words (seeded).
    fn sample_element(&self, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.inner.sample_element(&mut rng)
    }

    fn contains(&self, words: Vec<u64>) -> bool {
        words.len() == self.inner.geometry().words_per_element()
            && self.inner.contains(&words)
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(m={}, k={}, ell={})",
            self.inner.params.m, self.inner.params.k, self.inner.params.ell
        )
    }
}

/// Exact binomial coefficient C(n, r); r outside 0..=n gives 0.
#[pyfunction]
fn binomial(n: u64, r: i64) -> BigUint {
    layers::binomial(n, r)
}

/// C(D - i, k) / C(i + k, k) as (num, den): the factor by which k upward
/// flips grow layer i in GF(2)^D.
#[pyfunction]
fn growth_ratio(dim: usize, i: usize, k: usize) -> PyResult<Rat> {
    Ok(rat_pair(&layers::growth_ratio(dim, i, k).map_err(err)?))
}

/// Check the inequality chain behind the boundary bound for (D, k):
/// returns (passes, min_ratio, witness_layer).
#[pyfunction]
fn ratio_chain_check(dim: usize, k: usize) -> PyResult<(bool, Rat, usize)> {
    let rep = layers::ratio_lower_bound_check(dim, k).map_err(err)?;
    Ok((rep.passes, rat_pair(&rep.min_ratio), rep.witness_i))
}

/// Random-subset boundary sweep over width-k bands of GF(2)^dim, dense
/// representation: returns (trials_passed, trials_total).
#[pyfunction]
fn boundary_sweep(dim: usize, k: usize, trials: u64, seed: u64) -> PyResult<(u64, u64)> {
    let records = bandgrowth::isoperimetry::lemma21_sweep(dim, k, trials, seed).map_err(err)?;
    let passed = records.iter().filter(|r| r.passes).count() as u64;
    Ok((passed, records.len() as u64))
}

/// Sampled-subset boundary sweep beyond dense reach: returns
/// (trials_passed, trials_total).
#[pyfunction]
fn sparse_boundary_sweep(
    dim: usize,
    k: usize,
    trials: u64,
    sample_size: usize,
    seed: u64,
) -> PyResult<(u64, u64)> {
    let records =
        bandgrowth::isoperimetry::lemma21_sweep_sparse(dim, k, trials, sample_size, seed)
            .map_err(err)?;
    let passed = records.iter().filter(|r| r.passes).count() as u64;
    Ok((passed, records.len() as u64))
}

/// Does band + weight-1 layer equal the band widened one layer each way?
/// True for widths >= 2 inside the layer range.
#[pyfunction]
fn block_widening_holds(dim: usize, low: usize, width: usize) -> PyResult<bool> {
    witness::block_widening_identity(dim, low, width).map_err(err)
}

/// Exhaustive minimizer of |Y + B| / |Y| over nonempty subsets Y of A:
/// returns (minimizer_elements, (num, den), [(num, den) per t]) with the
/// iterated ratios |X + tB| / |X| for t = 1..=k_max.
#[pyfunction]
fn petridis(a: &PyDenseSet, b: &PyDenseSet, k_max: usize) -> PyResult<(Vec<usize>, Rat, Vec<Rat>)> {
    let res = plunnecke::petridis_minimize(&a.inner, &b.inner, k_max).map_err(err)?;
    Ok((
        res.minimizer.iter().collect(),
        rat_pair(&res.ratio),
        res.iterated_ratios.iter().map(rat_pair).collect(),
    ))
}

/// Search for a half-size subset with controlled k-fold growth under the
/// hypothesis |A + B| <= (k_num / k_den) |A|. Returns
/// (found, subset_elements, (growth num, den), (bound num, den)).
#[pyfunction]
fn ruzsa_verify(
    a: &PyDenseSet,
    b: &PyDenseSet,
    k_num: i64,
    k_den: i64,
    k: usize,
) -> PyResult<(bool, Vec<usize>, Rat, Rat)> {
    let growth_bound = rat_from(k_num, k_den)?;
    match plunnecke::ruzsa_variant_verify(&a.inner, &b.inner, &growth_bound, k).map_err(err)? {
        RuzsaOutcome::Witness {
            subset,
            growth,
            bound,
        } => Ok((true, subset.iter().collect(), rat_pair(&growth), rat_pair(&bound))),
        RuzsaOutcome::Counterexample { bound, .. } => Ok((
            false,
            Vec::new(),
            (BigInt::from(0), BigInt::from(1)),
            rat_pair(&bound),
        )),
    }
}

/// Closure probability of the 0/1 cube against the basis over F_p^n
/// (p an odd prime), as (num, den).
#[pyfunction]
fn comparison_closure(p: usize, n: usize) -> PyResult<Rat> {
    Ok(rat_pair(&comparison_example(p, n).map_err(err)?.closure))
}

/// Exhaustive closure probability for instances within dense reach, as
/// (num, den); agrees with Instance.closure_exact.
#[pyfunction]
fn brute_force_closure(instance: &PyInstance) -> PyResult<Rat> {
    Ok(rat_pair(
        &brute_force_closure_probability(&instance.inner).map_err(err)?,
    ))
}

/// Growth of the instance under one full column of basis vectors:
/// ((ratio num, den), within_growth_budget).
#[pyfunction]
fn column_growth(instance: &PyInstance) -> (Rat, bool) {
    let rep = witness::column_family_growth(&instance.inner);
    (rat_pair(&rep.growth.ratio), rep.growth.within_budget)
}

/// Growth of the stable product subset under one full row of basis
/// vectors: ((ratio num, den), block_verified) where block_verified is
/// None beyond dense reach.
#[pyfunction]
fn row_growth(instance: &PyInstance) -> PyResult<(Rat, Option<bool>)> {
    let rep = witness::row_family_fixture(&instance.inner).map_err(err)?;
    Ok((rat_pair(&rep.growth.ratio), rep.block_verified))
}

/// Fiberwise boundary check on the width-1 toy (block dimension m, full
/// family, first block): samples `size` elements with the given seed and
/// returns (outside_total, base_size, at_least_half, single_block_exit).
#[pyfunction]
fn claim4_fixture(m: usize, size: usize, seed: u64) -> PyResult<(BigUint, u64, bool, bool)> {
    let inst = Instance::from_explicit(m, 1, true).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a2 = SparseSet::new(inst.geometry());
    while a2.len() < size {
        a2.insert(inst.sample_element(&mut rng)).map_err(err)?;
    }
    let fam = BasisFamily::full(m, m).map_err(err)?;
    let rep = witness::claim4_verify(&a2, &fam, 0, 1, 10_000_000).map_err(err)?;
    Ok((
        rep.outside_total,
        rep.base_size,
        rep.passes,
        rep.single_block_exit,
    ))
}

#[pymodule]
fn bandgrowth_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDenseSet>()?;
    m.add_class::<PyBand>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(binomial, m)?)?;
    m.add_function(wrap_pyfunction!(growth_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_chain_check, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_boundary_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(block_widening_holds, m)?)?;
    m.add_function(wrap_pyfunction!(petridis, m)?)?;
    m.add_function(wrap_pyfunction!(ruzsa_verify, m)?)?;
    m.add_function(wrap_pyfunction!(comparison_closure, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_closure, m)?)?;
    m.add_function(wrap_pyfunction!(column_growth, m)?)?;
    m.add_function(wrap_pyfunction!(row_growth, m)?)?;
    m.add_function(wrap_pyfunction!(claim4_fixture, m)?)?;
    Ok(())
}
