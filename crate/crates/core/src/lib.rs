//! Exact experimentation toolkit for sumset growth of Hamming-band product
//! sets over GF(2).
//!
//! The crate builds product sets `A = Sigma^m` where `Sigma` is a band of `k`
//! consecutive Hamming layers in `GF(2)^m`, pairs them with basis-vector
//! families `B`, and measures, with exact arithmetic, how `A` behaves under
//! addition of elements of `B`: the single-step closure probability, the
//! vertex-isoperimetric growth of band subsets under `k`-fold sumsets, and
//! Petridis/Ruzsa-style subset growth bounds. Counts use `BigUint`, ratios
//! use `BigRational`; floating point appears only when reports are rendered
//! for humans.
//!
//! Modules follow the pipeline:
//! - [`gfset`]: dense bitset and sparse block-vector set types with sumset
//!   kernels and a text file format;
//! - [`layers`]: binomial counting, band specifications, exact growth-ratio
//!   inequalities;
//! - [`isoperimetry`]: boundary-growth measurements for band subsets, plus
//!   seeded random sweeps;
//! - [`construction`]: the product-band instance, closure probabilities
//!   (exact, bounded, Monte-Carlo) and the odd-characteristic comparison;
//! - [`witness`]: structured basis subfamilies with large or unit growth and
//!   the fiberwise expansion check;
//! - [`plunnecke`]: exhaustive Petridis minimization and the iterated-growth
//!   witness search.

pub mod construction;
pub mod error;
pub mod gfset;
pub mod isoperimetry;
pub mod layers;
pub mod plunnecke;
pub mod witness;

pub use error::{Error, Result};
