//! Exact linear algebra over the rationals or a prime field.
//!
//! Everything here is exact: kernels, images and subspace comparisons are
//! decided by equality, never by a tolerance.

mod matrix;
mod scalar;
mod subspace;

pub use matrix::{compose, format_vector, is_exact_at, BlockLayout, Matrix};
pub use scalar::{Field, Scalar};
pub use subspace::SubspaceBasis;
