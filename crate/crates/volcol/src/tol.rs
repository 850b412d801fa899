//! Numeric tolerances used across the crate.
//!
//! Everything here is relative to a natural scale of the input (largest
//! eigenvalue, Frobenius norm, product of column norms) so the library is
//! insensitive to uniform rescaling of the data.

/// Symmetry check: |a_ij - a_ji| may not exceed this times the largest
/// absolute entry.
pub const SYM_CHECK_REL: f64 = 1e-10;

/// Eigenvalues in [-EIGEN_CLAMP_REL * sigma_max, 0) are treated as roundoff
/// and clamped to zero; anything more negative means the input was not PSD.
pub const EIGEN_CLAMP_REL: f64 = 1e-8;

/// Numeric rank: eigenvalues at or above this times the largest eigenvalue
/// count toward the rank.
pub const RANK_REL: f64 = 1e-12;

/// Gram-Schmidt drops a candidate basis vector when, after
/// re-orthogonalization, its norm falls below this times the Frobenius norm
/// of the source matrix.
pub const BASIS_DROP_REL: f64 = 1e-10;

/// A subset Gram determinant below this times the product of the squared
/// column norms is treated as exactly zero (dependent columns).
pub const DET_ZERO_REL: f64 = 1e-14;

/// Bordered-system solves refuse Gram matrices whose determinant falls below
/// this times the product of the diagonal entries.
pub const SINGULAR_GRAM_REL: f64 = 1e-12;

/// Vector comparisons (majorization prefix sums, sum preservation).
pub const VEC_REL: f64 = 1e-12;
