//! Worst-case instance generators.
//!
//! The building block is the Gram matrix delta*I + J (all-ones plus a small
//! diagonal bump): the columns it describes are nearly parallel, so any
//! selection wastes most of its budget re-describing one direction. Placing
//! k such blocks on the diagonal forces a selector with a budget of r >= k
//! columns to split them across blocks, and the achievable residual ratio
//! approaches the theoretical (r + 1)/(r + 1 - k) ceiling as delta shrinks
//! and the blocks grow.

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::DenseMatrix;

/// Default diagonal bump for generated instances.
pub const DEFAULT_DELTA: f64 = 1e-3;

/// Shape of a block hard instance: `blocks` diagonal copies of the
/// (delta*I + J) Gram on `block_size` columns each.
#[derive(Debug, Clone, Copy)]
pub struct HardInstanceSpec {
    blocks: usize,
    block_size: usize,
    delta: f64,
}

impl HardInstanceSpec {
    pub fn new(blocks: usize, block_size: usize, delta: f64) -> Result<Self> {
        if blocks < 1 {
            return Err(Error::InvalidArgument("need at least one block".into()));
        }
        if block_size < 2 {
            return Err(Error::InvalidArgument(
                "blocks need at least two columns".into(),
            ));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "delta must be positive, got {delta}"
            )));
        }
        Ok(Self {
            blocks,
            block_size,
            delta,
        })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn total_cols(&self) -> usize {
        self.blocks * self.block_size
    }
}

/// delta*I + J on `size` points: spectrum (delta + size, delta, ..., delta).
pub fn perturbed_ones(size: usize, delta: f64) -> Result<DenseMatrix> {
    if size < 1 {
        return Err(Error::InvalidArgument("size must be at least 1".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    Ok(DenseMatrix::from_fn(size, size, |i, j| {
        if i == j {
            1.0 + delta
        } else {
            1.0
        }
    }))
}

/// Columns realizing the block-diagonal Gram: the PSD square root of each
/// block, assembled on the diagonal. The result is square with
/// `spec.total_cols()` columns and gram(result) equal to the block Gram.
pub fn block_instance(spec: &HardInstanceSpec) -> Result<DenseMatrix> {
    let n0 = spec.block_size();
    let root = linalg::psd_sqrt(&perturbed_ones(n0, spec.delta())?)?;
    let n = spec.total_cols();
    let mut x = DenseMatrix::zeros(n, n);
    for b in 0..spec.blocks() {
        let off = b * n0;
        for i in 0..n0 {
            for j in 0..n0 {
                x.set(off + i, off + j, root.get(i, j));
            }
        }
    }
    Ok(x)
}

/// Exact residual trace of any r-subset of the single-block instance on n
/// columns (all subsets are equivalent by symmetry):
///
///   (n - r) * delta * (1 + 1/(r + delta))
pub fn predicted_single_block_residual(n: usize, r: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if r < 1 || r >= n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= r < n, got r = {r}, n = {n}"
        )));
    }
    Ok((n - r) as f64 * delta * (1.0 + 1.0 / (r as f64 + delta)))
}

/// Best achievable residual ratio (residual over rank-k error) on the block
/// instance when selecting r columns:
///
///   (n - r)/(n - k) * (1 + 1/(delta + r/k))
///
/// As delta -> 0 and block_size -> infinity this approaches the theoretical
/// ceiling (r + 1)/(r + 1 - k), witnessing that no column selection can do
/// better in general.
pub fn predicted_block_ratio(spec: &HardInstanceSpec, r: usize) -> Result<f64> {
    let k = spec.blocks();
    let n = spec.total_cols();
    if r < k || r >= n {
        return Err(Error::InvalidArgument(format!(
            "need blocks <= r < total columns, got r = {r}, blocks = {k}, n = {n}"
        )));
    }
    let prefactor = (n - r) as f64 / (n - k) as f64;
    Ok(prefactor * (1.0 + 1.0 / (spec.delta() + r as f64 / k as f64)))
}

/// Tail of the block instance's spectrum past the k largest eigenvalues:
/// every block keeps (block_size - 1) eigenvalues of size delta.
pub fn block_rank_k_error(spec: &HardInstanceSpec) -> f64 {
    (spec.total_cols() - spec.blocks()) as f64 * spec.delta()
}
