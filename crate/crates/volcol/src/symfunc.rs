//! Elementary symmetric polynomials, their ratios, and majorization helpers.
//!
//! The ratio S_{r+1}/S_r of elementary symmetric polynomials of a PSD
//! spectrum is the quantity this whole crate revolves around: expected
//! residuals, selection scores, and spectral tail bounds are all instances of
//! it. Evaluation uses the stable Newton-style recurrence; a log-space twin
//! exists for spectra long enough that the plain values overflow or underflow.

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::DenseMatrix;
use crate::tol;
use rand::Rng;

/// All S_0..S_max in one pass of the recurrence
///   e_j <- e_j + sigma_i * e_{j-1}   (j descending)
/// which inserts each entry into every subset size exactly once.
fn elem_sym_prefix(sigma: &[f64], max_order: usize) -> Vec<f64> {
    let mut e = vec![0.0; max_order + 1];
    e[0] = 1.0;
    for &s in sigma {
        for j in (1..=max_order).rev() {
            e[j] += s * e[j - 1];
        }
    }
    e
}

/// Elementary symmetric polynomial S_r(sigma): the sum over all r-element
/// subsets of the product of their entries. S_0 = 1. Errors when r exceeds
/// the number of entries.
pub fn elem_sym(sigma: &[f64], r: usize) -> Result<f64> {
    if r > sigma.len() {
        return Err(Error::OrderTooLarge {
            order: r,
            len: sigma.len(),
        });
    }
    Ok(elem_sym_prefix(sigma, r)[r])
}

#[inline]
fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln S_r(sigma) for nonnegative entries, NEG_INFINITY when S_r = 0. Safe
/// for spectra whose plain S_r would overflow or underflow f64.
pub fn log_elem_sym(sigma: &[f64], r: usize) -> Result<f64> {
    if r > sigma.len() {
        return Err(Error::OrderTooLarge {
            order: r,
            len: sigma.len(),
        });
    }
    let mut le = vec![f64::NEG_INFINITY; r + 1];
    le[0] = 0.0;
    for &s in sigma {
        debug_assert!(s >= 0.0, "log-space evaluation needs nonnegative entries");
        if s <= 0.0 {
            continue;
        }
        let ls = s.ln();
        for j in (1..=r).rev() {
            le[j] = log_add_exp(le[j], ls + le[j - 1]);
        }
    }
    Ok(le[r])
}

/// S_r of the eigenvalues of a symmetric PSD matrix, which equals the sum of
/// its r x r principal minors.
pub fn elem_sym_matrix(a: &DenseMatrix, r: usize) -> Result<f64> {
    let spec = linalg::sym_eigenvalues(a)?;
    elem_sym(spec.values(), r)
}

/// S_{r+1}(sigma) / S_r(sigma), with S_{r+1} taken as zero when r + 1
/// exceeds the number of entries. Errors with `RankTooLow` when S_r itself
/// vanishes (fewer than r nonzero entries).
pub fn sym_ratio(sigma: &[f64], r: usize) -> Result<f64> {
    if r > sigma.len() {
        return Err(Error::OrderTooLarge {
            order: r,
            len: sigma.len(),
        });
    }
    let top = (r + 1).min(sigma.len());
    let e = elem_sym_prefix(sigma, top);
    let sr = e[r];
    if !(sr > 0.0) {
        return Err(Error::RankTooLow { order: r });
    }
    let sr1 = if r + 1 > sigma.len() { 0.0 } else { e[r + 1] };
    Ok(sr1 / sr)
}

/// Upper bound on `sym_ratio(sigma, r)`: the spectrum tail past the k
/// largest entries, spread over the r + 1 - k remaining slots,
///
///   sym_ratio(sigma, r) <= (sigma_{k+1} + ... + sigma_n) / (r + 1 - k)
///
/// for any 1 <= k <= r <= n - 1. The entries are sorted internally.
pub fn tail_bound(sigma: &[f64], k: usize, r: usize) -> Result<f64> {
    let n = sigma.len();
    if k < 1 || k > r || r + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= r <= n - 1, got k = {k}, r = {r}, n = {n}"
        )));
    }
    let mut sorted = sigma.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let tail: f64 = sorted[k..].iter().rev().sum();
    Ok(tail / (r + 1 - k) as f64)
}

/// Whether `a` majorizes `b`: equal sums and every descending prefix sum of
/// `a` at least that of `b`. Sums are compared to VEC_REL relative accuracy,
/// prefixes with a 1e-12 absolute slack.
pub fn majorizes(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| y.total_cmp(x));
    sb.sort_by(|x, y| y.total_cmp(x));
    let (ta, tb): (f64, f64) = (sa.iter().sum(), sb.iter().sum());
    if (ta - tb).abs() > tol::VEC_REL * ta.abs().max(tb.abs()) {
        return Ok(false);
    }
    let (mut pa, mut pb) = (0.0f64, 0.0f64);
    for (x, y) in sa.iter().zip(&sb) {
        pa += x;
        pb += y;
        if pa < pb - 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A pair of nonnegative vectors with `dominant` majorizing `dominated`.
#[derive(Debug, Clone)]
pub struct MajorizationPair {
    pub dominant: Vec<f64>,
    pub dominated: Vec<f64>,
}

/// Moves `fraction` of the smaller of the two entries onto the larger one.
/// Sum-preserving, keeps entries nonnegative, and the result majorizes the
/// input; chains of such transfers therefore stay ordered by transitivity.
pub(crate) fn transfer_toward_larger(v: &mut [f64], i: usize, j: usize, fraction: f64) {
    debug_assert!(i != j && (0.0..=1.0).contains(&fraction));
    let (rich, poor) = if v[i] >= v[j] { (i, j) } else { (j, i) };
    let amount = fraction * v[poor];
    v[poor] -= amount;
    v[rich] += amount;
}

/// Random majorization pair: `dominated` is uniform in [0, 1)^n and
/// `dominant` is the same vector after a random number of mass transfers,
/// each moving some of a smaller entry onto a larger one.
pub fn random_majorization_pair(n: usize, rng: &mut impl Rng) -> MajorizationPair {
    assert!(n >= 2, "need at least two entries");
    let dominated: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut dominant = dominated.clone();
    let transfers = rng.random_range(1..=2 * n);
    for _ in 0..transfers {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let fraction = rng.random::<f64>();
        transfer_toward_larger(&mut dominant, i, j, fraction);
    }
    MajorizationPair {
        dominant,
        dominated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn approx(a: f64, b: f64, rel: f64) {
        let scale = a.abs().max(b.abs()).max(1e-300);
        assert!((a - b).abs() <= rel * scale, "approx failed: {a} vs {b}");
    }

    #[test]
    fn small_cases_by_hand() {
        assert_eq!(elem_sym(&[1.0, 1.0, 1.0, 1.0], 2).unwrap(), 6.0);
        assert_eq!(elem_sym(&[2.0, 1.0], 2).unwrap(), 2.0);
        assert_eq!(elem_sym(&[2.0, 1.0], 1).unwrap(), 3.0);
        assert_eq!(elem_sym(&[2.0, 1.0], 0).unwrap(), 1.0);
        assert_eq!(elem_sym(&[], 0).unwrap(), 1.0);
        assert!(matches!(
            elem_sym(&[1.0, 2.0], 3),
            Err(Error::OrderTooLarge { order: 3, len: 2 })
        ));
    }

    /// Oracle: enumerate subsets by bitmask and sum products directly.
    fn brute_elem_sym(sigma: &[f64], r: usize) -> f64 {
        let n = sigma.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != r {
                continue;
            }
            let mut prod = 1.0;
            for (i, s) in sigma.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    prod *= s;
                }
            }
            total += prod;
        }
        total
    }

    #[test]
    fn recurrence_matches_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sigma: Vec<f64> = (0..8).map(|_| rng.random::<f64>() * 3.0).collect();
        for r in 0..=8 {
            approx(
                elem_sym(&sigma, r).unwrap(),
                brute_elem_sym(&sigma, r),
                1e-12,
            );
        }
    }

    #[test]
    fn log_route_agrees_with_plain() {
        let sigma = [3.0, 0.5, 0.0, 2.0, 1e-8];
        for r in 0..=5 {
            let plain = elem_sym(&sigma, r).unwrap();
            let logged = log_elem_sym(&sigma, r).unwrap();
            if plain > 0.0 {
                approx(logged.exp(), plain, 1e-12);
            } else {
                assert_eq!(logged, f64::NEG_INFINITY);
            }
        }
        // too many zeros for the order: exact zero
        assert_eq!(
            log_elem_sym(&[1.0, 0.0, 0.0], 2).unwrap(),
            f64::NEG_INFINITY
        );
        // a spectrum that overflows the plain evaluation
        let big = vec![1e300; 4];
        let l = log_elem_sym(&big, 3).unwrap();
        approx(l, 3.0 * 690.775527898214 + 4.0f64.ln(), 1e-10);
    }

    #[test]
    fn homogeneity() {
        let sigma = [0.3, 1.7, 2.2, 0.9];
        let scaled: Vec<f64> = sigma.iter().map(|s| s * 5.0).collect();
        for r in 0..=4 {
            approx(
                elem_sym(&scaled, r).unwrap(),
                5.0f64.powi(r as i32) * elem_sym(&sigma, r).unwrap(),
                1e-12,
            );
        }
    }

    /// Oracle: sum of r x r principal minors via cofactor-expansion
    /// determinants, no eigendecomposition involved.
    fn cofactor_det(a: &[Vec<f64>]) -> f64 {
        let n = a.len();
        if n == 0 {
            return 1.0;
        }
        if n == 1 {
            return a[0][0];
        }
        let mut det = 0.0;
        for (j, lead) in a[0].iter().enumerate() {
            if *lead == 0.0 {
                continue;
            }
            let minor: Vec<Vec<f64>> = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * lead * cofactor_det(&minor);
        }
        det
    }

    fn principal_minor_sum(a: &DenseMatrix, r: usize) -> f64 {
        let n = a.rows();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != r {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sub: Vec<Vec<f64>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| a.get(i, j)).collect())
                .collect();
            total += cofactor_det(&sub);
        }
        total
    }

    #[test]
    fn matrix_form_is_principal_minor_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let x = DenseMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        let a = linalg::gram(&x);
        for r in 0..=4 {
            approx(
                elem_sym_matrix(&a, r).unwrap(),
                principal_minor_sum(&a, r),
                1e-10,
            );
        }
        // r = n reduces to the determinant
        approx(
            elem_sym_matrix(&a, 4).unwrap(),
            linalg::determinant(&a),
            1e-10,
        );
        assert_eq!(elem_sym_matrix(&DenseMatrix::identity(4), 2).unwrap(), 6.0);
    }

    #[test]
    fn ratio_examples() {
        // all-ones: S_{r+1}/S_r = (n - r)/(r + 1)
        approx(sym_ratio(&[1.0; 4], 1).unwrap(), 1.5, 1e-12);
        approx(sym_ratio(&[3.0, 2.0, 1.0], 1).unwrap(), 11.0 / 6.0, 1e-12);
        // exhausted spectrum: numerator vanishes
        assert_eq!(sym_ratio(&[1.0, 0.0, 0.0], 1).unwrap(), 0.0);
        // r + 1 beyond the length counts as an empty sum
        assert_eq!(sym_ratio(&[2.0, 3.0], 2).unwrap(), 0.0);
        assert!(matches!(
            sym_ratio(&[1.0, 0.0], 2),
            Err(Error::RankTooLow { order: 2 })
        ));
        assert!(matches!(
            sym_ratio(&[1.0], 2),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn tail_bound_examples_and_dominance() {
        approx(tail_bound(&[1.0; 4], 1, 2).unwrap(), 1.5, 1e-12);
        assert_eq!(tail_bound(&[1.0, 0.0, 0.0, 0.0], 1, 2).unwrap(), 0.0);
        assert!(tail_bound(&[1.0, 2.0], 0, 1).is_err());
        assert!(tail_bound(&[1.0, 2.0], 1, 2).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let n = rng.random_range(3..9);
            let sigma: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0).collect();
            for r in 1..n {
                let ratio = sym_ratio(&sigma, r).unwrap_or(0.0);
                for k in 1..=r {
                    assert!(
                        ratio <= tail_bound(&sigma, k, r).unwrap() + 1e-12,
                        "tail bound violated at n={n}, r={r}, k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn majorization_checks() {
        assert!(majorizes(&[1.0, 0.0], &[0.5, 0.5]).unwrap());
        assert!(majorizes(&[0.5, 0.5], &[0.5, 0.5]).unwrap());
        assert!(!majorizes(&[0.6, 0.4], &[0.7, 0.3]).unwrap());
        // different sums never majorize
        assert!(!majorizes(&[1.0, 1.0], &[0.5, 0.5]).unwrap());
        // order of entries is irrelevant
        assert!(majorizes(&[0.0, 1.0], &[0.5, 0.5]).unwrap());
        assert!(matches!(
            majorizes(&[1.0], &[0.5, 0.5]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn full_transfer_on_two_uniform_entries() {
        let mut v = [0.5, 0.5];
        transfer_toward_larger(&mut v, 0, 1, 1.0);
        assert_eq!(v, [1.0, 0.0]);
        assert!(majorizes(&v, &[0.5, 0.5]).unwrap());
    }

    #[test]
    fn generated_pairs_are_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..200 {
            let n = rng.random_range(2..11);
            let pair = random_majorization_pair(n, &mut rng);
            assert!(
                majorizes(&pair.dominant, &pair.dominated).unwrap(),
                "generator produced an unordered pair"
            );
            assert!(pair.dominant.iter().all(|&v| v >= 0.0));
        }
    }
}
