//! Symmetric eigendecomposition and the projection/distance primitives built
//! on it.
//!
//! The eigensolver is a cyclic Jacobi iteration: for the small and midsize
//! symmetric matrices this crate handles (Grams, outer products, rank-one
//! updated projector images) it is simple, accurate to a few ulps per
//! rotation, and has no failure modes beyond non-convergence, which is
//! reported rather than silently tolerated. All spectra are sorted descending
//! and clamped to the PSD cone; how strictly clamping treats negative values
//! depends on the entry point (see `sym_eigenvalues` vs
//! `eigenvalues_clamped_lenient`).

use crate::error::{Error, Result};
use crate::matrix::{ColumnSubset, DenseMatrix};
use crate::tol;

/// Nonnegative eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    fn from_sorted(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(values.iter().all(|&v| v >= 0.0));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        // ascending order keeps the small tail from being swallowed by the head
        self.values.iter().rev().sum()
    }

    /// Number of eigenvalues at or above RANK_REL times the largest.
    pub fn numeric_rank(&self) -> usize {
        let top = match self.values.first() {
            Some(&v) if v > 0.0 => v,
            _ => return 0,
        };
        let cut = tol::RANK_REL * top;
        self.values.iter().take_while(|&&v| v >= cut).count()
    }
}

/// Eigendecomposition of a symmetric PSD matrix: column k of `vectors` is the
/// unit eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Spectrum,
    pub vectors: DenseMatrix,
}

const MAX_SWEEPS: usize = 50;

#[inline]
#[allow(clippy::too_many_arguments)]
fn rotate(a: &mut [f64], n: usize, i: usize, j: usize, k: usize, l: usize, s: f64, tau: f64) {
    let g = a[i * n + j];
    let h = a[k * n + l];
    a[i * n + j] = g - s * (h + g * tau);
    a[k * n + l] = h + s * (g - h * tau);
}

/// True when `small` is negligible next to `value` in double precision.
#[inline]
fn negligible(value: f64, small: f64) -> bool {
    value.abs() + small == value.abs()
}

/// Cyclic Jacobi on a symmetric matrix. Returns raw eigenvalues (unsorted)
/// and, on request, the accumulated rotation matrix whose columns are the
/// eigenvectors in the same order.
fn jacobi(input: &DenseMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<DenseMatrix>)> {
    let n = input.rows();
    debug_assert_eq!(n, input.cols());
    let mut a: Vec<f64> = input.data().to_vec();
    let mut v = if want_vectors {
        Some(DenseMatrix::identity(n))
    } else {
        None
    };
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];
    // Converged when the off-diagonal L1 mass is noise relative to the input.
    let off_tol = 1e-15 * input.frobenius_norm();

    for sweep in 0..MAX_SWEEPS {
        let mut sm = 0.0;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                sm += a[p * n + q].abs();
            }
        }
        if sm <= off_tol {
            return Ok((d, v));
        }
        let tresh = if sweep < 3 {
            0.2 * sm / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && negligible(d[p], g) && negligible(d[q], g) {
                    a[p * n + q] = 0.0;
                } else if apq.abs() > tresh {
                    let mut h = d[q] - d[p];
                    let t = if negligible(h, g) {
                        apq / h
                    } else {
                        let theta = 0.5 * h / apq;
                        let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            -t
                        } else {
                            t
                        }
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    h = t * apq;
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[p * n + q] = 0.0;
                    for j in 0..p {
                        rotate(&mut a, n, j, p, j, q, s, tau);
                    }
                    for j in p + 1..q {
                        rotate(&mut a, n, p, j, j, q, s, tau);
                    }
                    for j in q + 1..n {
                        rotate(&mut a, n, p, j, q, j, s, tau);
                    }
                    if let Some(vm) = v.as_mut() {
                        // rotate the eigenvector columns p and q
                        for j in 0..n {
                            let gp = vm.get(j, p);
                            let gq = vm.get(j, q);
                            vm.set(j, p, gp - s * (gq + gp * tau));
                            vm.set(j, q, gq + s * (gp - gq * tau));
                        }
                    }
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
}

/// Sorts eigenvalues descending, permuting eigenvector columns to match.
fn sort_eigen(values: Vec<f64>, vectors: Option<DenseMatrix>) -> (Vec<f64>, Option<DenseMatrix>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        values[j]
            .partial_cmp(&values[i])
            .expect("finite eigenvalues")
    });
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = vectors.map(|v| DenseMatrix::from_fn(n, n, |i, k| v.get(i, order[k])));
    (sorted, sorted_vectors)
}

fn check_symmetric(a: &DenseMatrix) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::NotSymmetric);
    }
    let scale = a.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = tol::SYM_CHECK_REL * scale;
    for i in 0..a.rows() {
        for j in i + 1..a.cols() {
            if (a.get(i, j) - a.get(j, i)).abs() > cut {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(())
}

/// Clamps a descending spectrum to the PSD cone. Negative values within
/// EIGEN_CLAMP_REL of the spectral radius are roundoff and become zero;
/// anything more negative is a genuine failure.
fn clamp_psd_strict(values: &mut [f64]) -> Result<()> {
    let radius = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = -tol::EIGEN_CLAMP_REL * radius;
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < floor {
                return Err(Error::NotPsd { value: *v });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

fn symmetrized(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    DenseMatrix::from_fn(n, n, |i, j| 0.5 * (a.get(i, j) + a.get(j, i)))
}

/// Full eigendecomposition of a symmetric PSD matrix.
///
/// The input is checked for symmetry (relative tolerance), symmetrized, and
/// decomposed; the clamped spectrum comes back sorted descending with
/// matching eigenvector columns.
pub fn sym_eigen(a: &DenseMatrix) -> Result<SymEigen> {
    check_symmetric(a)?;
    let (raw, vectors) = jacobi(&symmetrized(a), true)?;
    let (mut values, vectors) = sort_eigen(raw, vectors);
    clamp_psd_strict(&mut values)?;
    Ok(SymEigen {
        values: Spectrum::from_sorted(values),
        vectors: vectors.expect("vectors requested"),
    })
}

/// Eigenvalues only; faster than `sym_eigen` when vectors are not needed.
pub fn sym_eigenvalues(a: &DenseMatrix) -> Result<Spectrum> {
    check_symmetric(a)?;
    let (raw, _) = jacobi(&symmetrized(a), false)?;
    let (mut values, _) = sort_eigen(raw, None);
    clamp_psd_strict(&mut values)?;
    Ok(Spectrum::from_sorted(values))
}

/// Eigenvalues of a matrix that is symmetric by construction but may have
/// drifted slightly indefinite through repeated rank-one updates: every
/// negative value is clamped to zero without complaint. Use only on matrices
/// whose PSD-ness is a structural invariant, not an input assumption.
pub(crate) fn eigenvalues_clamped_lenient(a: &DenseMatrix) -> Result<Vec<f64>> {
    let (raw, _) = jacobi(a, false)?;
    let (values, _) = sort_eigen(raw, None);
    Ok(values.into_iter().map(|v| v.max(0.0)).collect())
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// X^T X, exactly symmetric in storage.
pub fn gram(x: &DenseMatrix) -> DenseMatrix {
    let (m, n) = (x.rows(), x.cols());
    let mut g = DenseMatrix::zeros(n, n);
    // rank-one accumulation over rows: contiguous access on row-major data
    for t in 0..m {
        let row = x.row(t);
        for i in 0..n {
            let xi = row[i];
            if xi == 0.0 {
                continue;
            }
            for j in i..n {
                let v = g.get(i, j) + xi * row[j];
                g.set(i, j, v);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let v = g.get(i, j);
            g.set(j, i, v);
        }
    }
    g
}

/// X X^T, exactly symmetric in storage.
pub fn outer_gram(x: &DenseMatrix) -> DenseMatrix {
    let m = x.rows();
    let mut g = DenseMatrix::zeros(m, m);
    for i in 0..m {
        let ri = x.row(i);
        for k in i..m {
            let v = dot(ri, x.row(k));
            g.set(i, k, v);
            g.set(k, i, v);
        }
    }
    g
}

/// Spectrum of X^T X computed on whichever side of X is smaller. The two
/// sides share nonzero eigenvalues, so for order statistics and symmetric
/// polynomial evaluations the shorter list is equivalent (missing entries are
/// exact zeros).
pub fn min_side_spectrum(x: &DenseMatrix) -> Result<Spectrum> {
    if x.cols() <= x.rows() {
        sym_eigenvalues(&gram(x))
    } else {
        sym_eigenvalues(&outer_gram(x))
    }
}

/// Squared Frobenius distance from X to its best rank-k approximation: the
/// eigenvalue tail of X^T X past the k largest.
pub fn rank_k_error(x: &DenseMatrix, k: usize) -> Result<f64> {
    let cap = x.rows().min(x.cols());
    if k > cap {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds min(m, n) = {cap}"
        )));
    }
    let spec = min_side_spectrum(x)?;
    Ok(spec.values()[k..].iter().rev().sum())
}

/// Orthonormal basis for the span of the subset's columns: modified
/// Gram-Schmidt with a second orthogonalization pass, dropping vectors whose
/// remainder is below BASIS_DROP_REL of the matrix norm.
fn orthonormal_basis(x: &DenseMatrix, c: &ColumnSubset) -> Vec<Vec<f64>> {
    let drop_cut = tol::BASIS_DROP_REL * x.frobenius_norm();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(c.len());
    for &j in c.iter() {
        let mut v = x.column(j);
        for _ in 0..2 {
            for q in &basis {
                let coeff = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= coeff * qi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > drop_cut && norm > 0.0 {
            let inv = 1.0 / norm;
            for vi in v.iter_mut() {
                *vi *= inv;
            }
            basis.push(v);
        }
    }
    basis
}

/// X with the span of the chosen columns projected out of every column.
pub fn project_out_subset(x: &DenseMatrix, c: &ColumnSubset) -> Result<DenseMatrix> {
    c.check_for(x.cols())?;
    let basis = orthonormal_basis(x, c);
    let mut y = x.clone();
    for q in &basis {
        // coeffs[j] = q . y_j, accumulated row-wise
        let mut coeffs = vec![0.0; y.cols()];
        for t in 0..y.rows() {
            let qt = q[t];
            if qt == 0.0 {
                continue;
            }
            let row = y.row(t);
            for (cj, rj) in coeffs.iter_mut().zip(row) {
                *cj += qt * rj;
            }
        }
        for t in 0..y.rows() {
            let qt = q[t];
            if qt == 0.0 {
                continue;
            }
            for j in 0..y.cols() {
                let v = y.get(t, j) - qt * coeffs[j];
                y.set(t, j, v);
            }
        }
    }
    Ok(y)
}

/// Squared Frobenius norm of X after projecting onto the orthogonal
/// complement of the chosen columns' span.
pub fn residual_trace(x: &DenseMatrix, c: &ColumnSubset) -> Result<f64> {
    Ok(project_out_subset(x, c)?.frobenius_norm_sq())
}

/// X with the direction of column j removed from every column. Column j of
/// the result is set to exact zero, which makes a second application the
/// identity.
pub fn project_out(x: &DenseMatrix, j: usize) -> Result<DenseMatrix> {
    if j >= x.cols() {
        return Err(Error::ColumnOutOfRange {
            index: j,
            cols: x.cols(),
        });
    }
    let nsq = x.col_norm_sq(j);
    let mut y = x.clone();
    if nsq == 0.0 {
        return Ok(y);
    }
    let inv = 1.0 / nsq.sqrt();
    let z: Vec<f64> = x.column(j).iter().map(|v| v * inv).collect();
    let mut coeffs = vec![0.0; y.cols()];
    for t in 0..y.rows() {
        let zt = z[t];
        if zt == 0.0 {
            continue;
        }
        for (cj, rj) in coeffs.iter_mut().zip(y.row(t)) {
            *cj += zt * rj;
        }
    }
    for t in 0..y.rows() {
        let zt = z[t];
        if zt == 0.0 {
            continue;
        }
        for jj in 0..y.cols() {
            let v = y.get(t, jj) - zt * coeffs[jj];
            y.set(t, jj, v);
        }
    }
    for t in 0..y.rows() {
        y.set(t, j, 0.0);
    }
    Ok(y)
}

/// Determinant by LU with partial pivoting. Returns 0 when a pivot column is
/// exactly zero below the diagonal.
pub fn determinant(a: &DenseMatrix) -> f64 {
    assert_eq!(a.rows(), a.cols(), "determinant needs a square matrix");
    let n = a.rows();
    let mut m = a.data().to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for row in col + 1..n {
            let v = m[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            det = -det;
        }
        let d = m[col * n + col];
        det *= d;
        for row in col + 1..n {
            let f = m[row * n + col] / d;
            if f != 0.0 {
                for k in col + 1..n {
                    m[row * n + k] -= f * m[col * n + k];
                }
            }
        }
    }
    det
}

/// Squared Euclidean distance from x to the span of A's columns, computed as
/// the ratio of the bordered Gram determinant to the Gram determinant:
///
///   dist^2 = det([[A^T A, A^T x], [x^T A, x^T x]]) / det(A^T A)
///
/// Errors with `DependentColumns` when det(A^T A) is not safely positive.
pub fn squared_distance_det(a: &DenseMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != a.rows() {
        return Err(Error::LengthMismatch {
            a: a.rows(),
            b: x.len(),
        });
    }
    let s = a.cols();
    let g = gram(a);
    let det_g = determinant(&g);
    let diag_scale: f64 = (0..s).map(|j| g.get(j, j)).product();
    if det_g <= tol::SINGULAR_GRAM_REL * diag_scale || det_g <= 0.0 {
        return Err(Error::DependentColumns);
    }
    let mut bordered = DenseMatrix::zeros(s + 1, s + 1);
    for i in 0..s {
        for j in 0..s {
            bordered.set(i, j, g.get(i, j));
        }
    }
    for j in 0..s {
        let v = dot(&a.column(j), x);
        bordered.set(j, s, v);
        bordered.set(s, j, v);
    }
    bordered.set(s, s, dot(x, x));
    let det_b = determinant(&bordered);
    Ok((det_b / det_g).max(0.0))
}

/// Symmetric PSD square root: B with B B = A, via eigendecomposition.
pub fn psd_sqrt(a: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = sym_eigen(a)?;
    let n = a.rows();
    let roots: Vec<f64> = eig.values.values().iter().map(|v| v.sqrt()).collect();
    let mut b = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut v = 0.0;
            for k in 0..n {
                v += eig.vectors.get(i, k) * roots[k] * eig.vectors.get(j, k);
            }
            b.set(i, j, v);
            b.set(j, i, v);
        }
    }
    Ok(b)
}
