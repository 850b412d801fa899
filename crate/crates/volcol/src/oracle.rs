//! Exhaustive enumeration over all r-subsets: the ground truth that the
//! sampler and the greedy selector are tested against. Cost grows as C(n, r),
//! so every entry point takes a subset-count cap and refuses instances past
//! it rather than silently grinding.

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{ColumnSubset, DenseMatrix};
use crate::tol;
use itertools::Itertools;
use rayon::prelude::*;

/// Default enumeration budget: one million subsets.
pub const DEFAULT_ORACLE_CAP: u64 = 1_000_000;

/// One atom of the exact distribution.
#[derive(Debug, Clone)]
pub struct SubsetMass {
    pub subset: ColumnSubset,
    /// det(X_C^T X_C), zeroed when below DET_ZERO_REL of its natural scale.
    pub weight: f64,
    pub probability: f64,
}

/// The full determinantal distribution over r-subsets with positive weight,
/// in lexicographic order.
#[derive(Debug, Clone)]
pub struct VolumeDistribution {
    pub support: Vec<SubsetMass>,
    /// Sum of all subset weights.
    pub normalizer: f64,
}

impl VolumeDistribution {
    /// Probability of a specific subset; zero when outside the support.
    pub fn probability_of(&self, c: &ColumnSubset) -> f64 {
        self.support
            .binary_search_by(|e| e.subset.cmp(c))
            .map(|i| self.support[i].probability)
            .unwrap_or(0.0)
    }
}

/// C(n, r) in u128, saturating on overflow.
pub fn subset_count(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // exact at every step: acc holds C(n - r + i, i)
        match acc.checked_mul((n - r + 1 + i) as u128) {
            Some(v) => acc = v / (i + 1) as u128,
            None => return u128::MAX,
        }
    }
    acc
}

fn check_cap(n: usize, r: usize, cap: u64) -> Result<u128> {
    let count = subset_count(n, r);
    if count > cap as u128 {
        return Err(Error::OracleCapExceeded {
            n,
            r,
            subsets: count,
            cap,
        });
    }
    Ok(count)
}

fn check_r(x: &DenseMatrix, r: usize) -> Result<()> {
    if r == 0 || r > x.cols() {
        return Err(Error::InvalidArgument(format!(
            "r must satisfy 1 <= r <= n = {}, got {r}",
            x.cols()
        )));
    }
    Ok(())
}

/// det(X_C^T X_C) with determinants below DET_ZERO_REL times the product of
/// the squared column norms treated as exactly zero.
fn subset_weight(x: &DenseMatrix, indices: &[usize]) -> f64 {
    let r = indices.len();
    let mut g = DenseMatrix::zeros(r, r);
    let cols: Vec<Vec<f64>> = indices.iter().map(|&j| x.column(j)).collect();
    for a in 0..r {
        for b in a..r {
            let v = linalg::dot(&cols[a], &cols[b]);
            g.set(a, b, v);
            g.set(b, a, v);
        }
    }
    let det = linalg::determinant(&g);
    let scale: f64 = (0..r).map(|a| g.get(a, a)).product();
    if det <= tol::DET_ZERO_REL * scale {
        0.0
    } else {
        det
    }
}

/// The exact determinantal distribution by full enumeration.
pub fn exact_distribution(x: &DenseMatrix, r: usize, cap: u64) -> Result<VolumeDistribution> {
    check_r(x, r)?;
    check_cap(x.cols(), r, cap)?;
    let subsets: Vec<Vec<usize>> = (0..x.cols()).combinations(r).collect();
    let weights: Vec<f64> = subsets.par_iter().map(|c| subset_weight(x, c)).collect();
    // sequential lexicographic sum: bitwise reproducible across thread counts
    let normalizer: f64 = weights.iter().sum();
    if !(normalizer > 0.0) {
        return Err(Error::RankDeficient { r });
    }
    let support = subsets
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > 0.0)
        .map(|(c, weight)| SubsetMass {
            subset: ColumnSubset::from_sorted_unchecked(c),
            weight,
            probability: weight / normalizer,
        })
        .collect();
    Ok(VolumeDistribution {
        support,
        normalizer,
    })
}

/// Expected residual trace under the determinantal distribution.
pub fn exact_expected_trace(x: &DenseMatrix, r: usize, cap: u64) -> Result<f64> {
    let dist = exact_distribution(x, r, cap)?;
    let residuals: Vec<f64> = dist
        .support
        .par_iter()
        .map(|e| linalg::residual_trace(x, &e.subset).expect("validated subset"))
        .collect();
    Ok(dist
        .support
        .iter()
        .zip(&residuals)
        .map(|(e, res)| e.probability * res)
        .sum())
}

/// The r-subset with the smallest residual trace, ties going to the
/// lexicographically first. Considers every subset, not just those with
/// positive determinantal weight.
pub fn best_subset(x: &DenseMatrix, r: usize, cap: u64) -> Result<(ColumnSubset, f64)> {
    check_r(x, r)?;
    check_cap(x.cols(), r, cap)?;
    let subsets: Vec<Vec<usize>> = (0..x.cols()).combinations(r).collect();
    let residuals: Vec<f64> = subsets
        .par_iter()
        .map(|c| {
            let subset = ColumnSubset::from_sorted_unchecked(c.clone());
            linalg::residual_trace(x, &subset).expect("validated subset")
        })
        .collect();
    let mut best = 0usize;
    for (i, res) in residuals.iter().enumerate() {
        if *res < residuals[best] {
            best = i;
        }
    }
    Ok((
        ColumnSubset::from_sorted_unchecked(subsets[best].clone()),
        residuals[best],
    ))
}
