//! Exact, small-scale verification of iterated sumset growth bounds.
//!
//! Over a ground set of at most [`SUBSET_BUDGET`] elements everything is
//! checked by exhaustion, so these functions serve as oracles for the two
//! growth facts the rest of the crate leans on:
//!
//! * the nonempty subset X of A' minimizing `|X + B'| / |X|` has
//!   `|X + tB'| <= K0^t |X|` for every t, where K0 is the minimized ratio
//!   (the Petridis induction, here verified rather than assumed);
//! * whenever `|A' + B'| <= K |A'|`, some A'' containing at least half of
//!   A' satisfies `|A'' + kB'| <= 2^(k+1) K^k |A''|`. The search reports a
//!   loud counterexample status if no subset qualifies - which would mean
//!   an implementation bug, since the inequality holds unconditionally.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::gfset::{sumset, DenseSet};

/// Exhaustive-search cap: 2^20 - 1 nonempty subsets at most.
pub const SUBSET_BUDGET: usize = 20;

#[derive(Clone, Debug)]
pub struct PetridisResult {
    /// The minimizing subset X (ties: larger, then lexicographically
    /// earlier element list).
    pub minimizer: DenseSet,
    /// K0 = |X + B'| / |X|, the smallest ratio over nonempty subsets.
    pub ratio: BigRational,
    /// |X + tB'| / |X| for t = 1..=k_max; entry t-1 is t-fold.
    pub iterated_ratios: Vec<BigRational>,
}

fn rational(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn check_operands(a: &DenseSet, b: &DenseSet) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.is_empty() {
        return Err(Error::EmptyOperand("subset ground set"));
    }
    if b.is_empty() {
        return Err(Error::EmptyOperand("translate set"));
    }
    if a.len() > SUBSET_BUDGET {
        return Err(Error::BudgetExceeded {
            required: a.len(),
            budget: SUBSET_BUDGET,
        });
    }
    Ok(())
}

/// Scan all nonempty subsets of `a` for the minimizer of `|Y + b| / |Y|`,
/// then verify its iterated growth up to `k_max` summands.
pub fn petridis_minimize(a: &DenseSet, b: &DenseSet, k_max: usize) -> Result<PetridisResult> {
    check_operands(a, b)?;
    let elements: Vec<usize> = a.iter().collect();
    let n = elements.len();
    // One translate bitmap per element; subset sumsets are unions of these.
    let translates: Vec<DenseSet> = elements
        .iter()
        .map(|&e| sumset(&DenseSet::from_elements(a.dim(), [e])?, b))
        .collect::<Result<_>>()?;

    let mut best_mask = 0usize;
    let mut best_ratio: Option<BigRational> = None;
    let mut best_size = 0usize;
    for mask in 1usize..1 << n {
        let mut union = DenseSet::new(a.dim())?;
        for (i, t) in translates.iter().enumerate() {
            if mask >> i & 1 == 1 {
                union = union.union(t)?;
            }
        }
        let size = mask.count_ones() as usize;
        let ratio = rational(union.len(), size);
        let better = match &best_ratio {
            None => true,
            Some(current) => {
                ratio < *current
                    || (ratio == *current
                        && (size > best_size
                            || (size == best_size && lex_before(mask, best_mask, &elements))))
            }
        };
        if better {
            best_mask = mask;
            best_ratio = Some(ratio);
            best_size = size;
        }
    }

    let chosen: Vec<usize> = (0..n)
        .filter(|i| best_mask >> i & 1 == 1)
        .map(|i| elements[i])
        .collect();
    let minimizer = DenseSet::from_elements(a.dim(), chosen)?;
    let mut iterated_ratios = Vec::with_capacity(k_max);
    let mut acc = minimizer.clone();
    for _ in 1..=k_max {
        acc = sumset(&acc, b)?;
        iterated_ratios.push(rational(acc.len(), minimizer.len()));
    }
    Ok(PetridisResult {
        minimizer,
        ratio: best_ratio.expect("at least one nonempty subset"),
        iterated_ratios,
    })
}

/// True when `mask_a`'s element list precedes `mask_b`'s lexicographically
/// (elements ascending). Only called to break exact ties.
fn lex_before(mask_a: usize, mask_b: usize, elements: &[usize]) -> bool {
    let list = |mask: usize| {
        (0..elements.len())
            .filter(move |i| mask >> i & 1 == 1)
            .map(|i| elements[i])
    };
    list(mask_a).lt(list(mask_b))
}

/// Outcome of the half-subset search.
#[derive(Clone, Debug)]
pub enum RuzsaOutcome {
    /// The first qualifying subset in (cardinality, lexicographic) order.
    Witness {
        subset: DenseSet,
        /// |A'' + kB'| / |A''|.
        growth: BigRational,
        /// 2^(k+1) K^k, the bound the witness clears.
        bound: BigRational,
    },
    /// No subset qualified: impossible for correct inputs, loudly reported
    /// rather than silently absorbed.
    Counterexample { checked: u64, bound: BigRational },
}

/// Search for A'' of size at least |A'|/2 with
/// `|A'' + kB'| <= 2^(k+1) K^k |A''|`, under the hypothesis
/// `|A' + B'| <= K |A'|`.
pub fn ruzsa_variant_verify(
    a: &DenseSet,
    b: &DenseSet,
    growth_bound: &BigRational,
    k: usize,
) -> Result<RuzsaOutcome> {
    check_operands(a, b)?;
    if k == 0 {
        return Err(Error::ZeroIterations);
    }
    let direct = sumset(a, b)?;
    let hypothesis = rational(direct.len(), a.len());
    if hypothesis > *growth_bound {
        return Err(Error::GrowthHypothesisFails(format!(
            "|A' + B'| / |A'| = {hypothesis} exceeds K = {growth_bound}"
        )));
    }

    let bound = BigRational::from(BigInt::one() << (k + 1)) * growth_bound.clone().pow(k as i32);
    let elements: Vec<usize> = a.iter().collect();
    let n = elements.len();
    let mut checked = 0u64;
    for size in n.div_ceil(2)..=n {
        for combo in elements.iter().copied().combinations(size) {
            checked += 1;
            let subset = DenseSet::from_elements(a.dim(), combo)?;
            let mut acc = subset.clone();
            for _ in 0..k {
                acc = sumset(&acc, b)?;
            }
            let growth = rational(acc.len(), subset.len());
            if growth <= bound {
                return Ok(RuzsaOutcome::Witness {
                    subset,
                    growth,
                    bound,
                });
            }
        }
    }
    Ok(RuzsaOutcome::Counterexample { checked, bound })
}
