//! Set types over GF(2)^D and their sumset kernels.
//!
//! Two representations cover the working range:
//! - [`DenseSet`]: a 2^D-bit membership array for D up to [`D_MAX`], with a
//!   sumset kernel that XOR-translates whole bit arrays;
//! - [`SparseSet`]: explicit deduplicated vectors in a product of blocks
//!   `(GF(2)^m)^r`, for geometries far beyond dense reach.
//!
//! Vectors are identified with integers: coordinate `i` of a dense element
//! `v` is bit `i` of `v` (little-endian), and a sparse element stores the
//! concatenation of its blocks in the same order, block `j` occupying bits
//! `[j*m, (j+1)*m)`. Addition is XOR throughout.

mod dense;
mod io;
mod sparse;

pub use dense::{iterated_sumset, layer, sumset, DenseSet, D_MAX};
pub use io::{dense_to_text, parse_set_text, read_set_file, sparse_to_text, write_set_file, SetFile};
pub use sparse::{sparse_sumset, BlockGeometry, SparseSet};

pub(crate) use sparse::cmp_elements;
