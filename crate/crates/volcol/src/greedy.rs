//! Deterministic column selection by the method of conditional expectations.
//!
//! The expected residual of a determinantal draw conditioned on a partial
//! pick T is a closed-form spectral quantity of X with span(X_T) projected
//! out. Extending T by the candidate that minimizes it can never increase
//! the conditional expectation, so after r steps the residual of the chosen
//! subset is at most the unconditional expectation, and in particular within
//! (r + 1)/(r + 1 - k) of the best rank-k error.

use crate::error::{Error, Result};
use crate::linalg::{self, Spectrum};
use crate::matrix::{ColumnSubset, DenseMatrix};
use crate::report::SelectionReport;
use crate::sampler::apply_projector_update;
use crate::symfunc;
use crate::tol;
use rayon::prelude::*;

/// Result of a greedy run. `expectations[0]` is the unconditional expected
/// residual; entry i + 1 is the value after committing i + 1 columns, so the
/// sequence never increases and ends at the selection's own residual.
#[derive(Debug, Clone)]
pub struct GreedySelection {
    pub chosen: ColumnSubset,
    pub residual: f64,
    pub expectations: Vec<f64>,
}

/// (rho + 1) S_{rho+1} / S_rho of a spectrum, evaluated on sum-normalized
/// values so the polynomial ratio stays well scaled.
fn expectation_of_spectrum(spec: &Spectrum, rho: usize) -> Result<f64> {
    debug_assert!(rho >= 1);
    let s = spec.sum();
    if !(s > 0.0) {
        return Err(Error::InfeasibleCompletion { needed: rho });
    }
    let normed: Vec<f64> = spec.values().iter().map(|v| v / s).collect();
    let s_rho = symfunc::elem_sym(&normed, rho)?;
    if !(s_rho > 0.0) {
        return Err(Error::InfeasibleCompletion { needed: rho });
    }
    let s_rho1 = if rho + 1 > normed.len() {
        0.0
    } else {
        symfunc::elem_sym(&normed, rho + 1)?
    };
    Ok((rho + 1) as f64 * s * s_rho1 / s_rho)
}

/// Expected residual trace of a determinantal r-draw conditioned on the
/// partial selection `t` being part of the subset:
///
///   E[residual | T subset of C] = (rho + 1) S_{rho+1}(sigma') / S_rho(sigma')
///
/// where rho = r - |T| and sigma' is the spectrum of X with span(X_T)
/// projected out. With |T| = r this degenerates to the exact residual of T.
pub fn conditional_expectation(x: &DenseMatrix, t: &ColumnSubset, r: usize) -> Result<f64> {
    t.check_for(x.cols())?;
    if t.len() > r {
        return Err(Error::InvalidArgument(format!(
            "|T| = {} exceeds r = {r}",
            t.len()
        )));
    }
    let y = linalg::project_out_subset(x, t)?;
    if t.len() == r {
        return Ok(y.frobenius_norm_sq());
    }
    let rho = r - t.len();
    let spec = linalg::min_side_spectrum(&y)?;
    // rank is judged against the original scale: what is left after the
    // projection may be pure roundoff, whose own top eigenvalue says nothing
    let cut = tol::RANK_REL * x.frobenius_norm_sq();
    let rank = spec.values().iter().take_while(|&&v| v >= cut).count();
    if rank < rho {
        return Err(Error::InfeasibleCompletion { needed: rho });
    }
    expectation_of_spectrum(&spec, rho)
}

enum Mode {
    /// Score candidates through rank-one updates of one shared outer product.
    Fast,
    /// Score candidates by full projection from the original matrix.
    Reference,
}

/// Score for extending the current selection by column j of the working
/// matrix `y`, where `w` = y y^T and rho columns remain to pick afterwards.
/// `rank_cut` is the absolute eigenvalue threshold derived from the original
/// matrix scale. None marks candidates that cannot complete to a full-rank
/// selection.
fn fast_score(
    y: &DenseMatrix,
    w: &DenseMatrix,
    j: usize,
    rho: usize,
    rank_cut: f64,
) -> Option<f64> {
    let nsq = y.col_norm_sq(j);
    let inv = 1.0 / nsq.sqrt();
    let z: Vec<f64> = y.column(j).iter().map(|v| v * inv).collect();
    let mut w2 = w.clone();
    apply_projector_update(&mut w2, &z);
    if rho == 0 {
        let trace: f64 = (0..w2.rows()).map(|i| w2.get(i, i)).sum();
        return Some(trace.max(0.0));
    }
    let vals = linalg::eigenvalues_clamped_lenient(&w2).ok()?;
    let s: f64 = vals.iter().rev().sum();
    if !(s > 0.0) {
        return None;
    }
    let rank = vals.iter().take_while(|&&v| v >= rank_cut).count();
    if rank < rho {
        return None;
    }
    let normed: Vec<f64> = vals.iter().map(|v| v / s).collect();
    let s_rho = symfunc::elem_sym(&normed, rho).ok()?;
    if !(s_rho > 0.0) {
        return None;
    }
    let s_rho1 = if rho + 1 > normed.len() {
        0.0
    } else {
        symfunc::elem_sym(&normed, rho + 1).ok()?
    };
    Some((rho + 1) as f64 * s * s_rho1 / s_rho)
}

fn greedy_core(x: &DenseMatrix, r: usize, mode: Mode) -> Result<GreedySelection> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let spec0 = linalg::min_side_spectrum(x)?;
    if spec0.numeric_rank() < r {
        return Err(Error::RankDeficient { r });
    }
    let n = x.cols();
    let norm_cut_sq = (tol::BASIS_DROP_REL * x.frobenius_norm()).powi(2);
    let rank_cut = tol::RANK_REL * x.frobenius_norm_sq();
    let mut expectations = vec![expectation_of_spectrum(&spec0, r)?];
    let mut chosen: Vec<usize> = Vec::with_capacity(r);
    let mut y = x.clone();

    for step in 0..r {
        let rho = r - step - 1;
        // chosen columns are exactly zero in y, so the norm filter drops them
        let candidates: Vec<usize> = (0..n)
            .filter(|j| !chosen.contains(j) && y.col_norm_sq(*j) > norm_cut_sq)
            .collect();
        let scores: Vec<Option<f64>> = match mode {
            Mode::Fast => {
                let w = linalg::outer_gram(&y);
                candidates
                    .par_iter()
                    .map(|&j| fast_score(&y, &w, j, rho, rank_cut))
                    .collect()
            }
            Mode::Reference => candidates
                .par_iter()
                .map(|&j| {
                    let mut t = chosen.clone();
                    t.push(j);
                    t.sort_unstable();
                    conditional_expectation(x, &ColumnSubset::from_sorted_unchecked(t), r).ok()
                })
                .collect(),
        };
        // ascending scan with strict improvement: ties go to the smallest index
        let mut best: Option<(usize, f64)> = None;
        for (&j, score) in candidates.iter().zip(&scores) {
            if let Some(v) = score {
                if best.is_none_or(|(_, bv)| *v < bv) {
                    best = Some((j, *v));
                }
            }
        }
        let (bj, bv) = best.ok_or(Error::InfeasibleCompletion { needed: rho + 1 })?;
        chosen.push(bj);
        y = linalg::project_out(&y, bj)?;
        expectations.push(bv);
    }

    chosen.sort_unstable();
    let subset = ColumnSubset::from_sorted_unchecked(chosen);
    let residual = linalg::residual_trace(x, &subset)?;
    Ok(GreedySelection {
        chosen: subset,
        residual,
        expectations,
    })
}

/// Greedy selection of r columns, scoring candidates via rank-one updates of
/// a per-step outer product.
pub fn greedy_select(x: &DenseMatrix, r: usize) -> Result<GreedySelection> {
    greedy_core(x, r, Mode::Fast)
}

/// Same selection rule with every candidate scored from scratch. Slower;
/// exists as the semantic anchor the fast path is tested against.
pub fn greedy_select_reference(x: &DenseMatrix, r: usize) -> Result<GreedySelection> {
    greedy_core(x, r, Mode::Reference)
}

/// Assembles the quality report for a selection `c` against the best rank-k
/// approximation: residual, baseline, their ratio, and whether the ratio
/// meets the (|C| + 1)/(|C| + 1 - k) guarantee. A vanishing baseline makes
/// the ratio 1 when the residual also vanishes and infinite otherwise.
pub fn bound_report(x: &DenseMatrix, c: &ColumnSubset, k: usize) -> Result<SelectionReport> {
    c.check_for(x.cols())?;
    let r = c.len();
    if k == 0 || k > r {
        return Err(Error::InvalidArgument(format!(
            "k must satisfy 1 <= k <= |C| = {r}, got {k}"
        )));
    }
    let residual = linalg::residual_trace(x, c)?;
    let baseline = linalg::rank_k_error(x, k)?;
    let total = x.frobenius_norm_sq();
    let bound = (r as f64 + 1.0) / (r as f64 + 1.0 - k as f64);
    let achieved = if baseline <= 1e-12 * total {
        if residual <= 1e-8 * total {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        residual / baseline
    };
    Ok(SelectionReport {
        method: "manual".into(),
        seed: None,
        r,
        k,
        chosen: c.as_slice().to_vec(),
        residual_trace: residual,
        rank_k_error: baseline,
        achieved_ratio: achieved,
        bound,
        bound_satisfied: achieved <= bound,
        wall_time_ms: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn approx(a: f64, b: f64, rel: f64) {
        let scale = a.abs().max(b.abs()).max(1e-300);
        assert!((a - b).abs() <= rel * scale, "approx failed: {a} vs {b}");
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn unconditioned_expectation_on_identity() {
        let x = DenseMatrix::identity(6);
        approx(
            conditional_expectation(&x, &ColumnSubset::empty(), 2).unwrap(),
            4.0,
            1e-10,
        );
        approx(
            conditional_expectation(&x, &ColumnSubset::empty(), 5).unwrap(),
            1.0,
            1e-10,
        );
    }

    #[test]
    fn empty_condition_matches_enumerated_expectation() {
        let x = random_matrix(4, 6, 51);
        for r in 1..=3 {
            approx(
                conditional_expectation(&x, &ColumnSubset::empty(), r).unwrap(),
                oracle::exact_expected_trace(&x, r, oracle::DEFAULT_ORACLE_CAP).unwrap(),
                1e-9,
            );
        }
    }

    #[test]
    fn full_condition_is_the_exact_residual() {
        let x = random_matrix(5, 7, 52);
        let t = ColumnSubset::new(vec![1, 3], 7).unwrap();
        approx(
            conditional_expectation(&x, &t, 2).unwrap(),
            linalg::residual_trace(&x, &t).unwrap(),
            1e-12,
        );
    }

    /// Oracle: condition by filtering the enumerated distribution.
    fn conditional_average(x: &DenseMatrix, t: &[usize], r: usize) -> f64 {
        let dist = oracle::exact_distribution(x, r, oracle::DEFAULT_ORACLE_CAP).unwrap();
        let mut mass = 0.0;
        let mut acc = 0.0;
        for e in &dist.support {
            if t.iter().all(|j| e.subset.contains(*j)) {
                mass += e.probability;
                acc += e.probability * linalg::residual_trace(x, &e.subset).unwrap();
            }
        }
        acc / mass
    }

    #[test]
    fn partial_condition_matches_filtered_enumeration() {
        let x = random_matrix(5, 7, 53);
        let t = ColumnSubset::new(vec![2], 7).unwrap();
        approx(
            conditional_expectation(&x, &t, 3).unwrap(),
            conditional_average(&x, &[2], 3),
            1e-8,
        );
        let t2 = ColumnSubset::new(vec![0, 4], 7).unwrap();
        approx(
            conditional_expectation(&x, &t2, 3).unwrap(),
            conditional_average(&x, &[0, 4], 3),
            1e-8,
        );
    }

    #[test]
    fn conditioning_validates_input() {
        let x = random_matrix(3, 5, 54);
        let t = ColumnSubset::new(vec![0, 1, 2], 5).unwrap();
        assert!(matches!(
            conditional_expectation(&x, &t, 2),
            Err(Error::InvalidArgument(_))
        ));
        // projecting out a spanning set leaves nothing to complete with
        let full = ColumnSubset::new(vec![0, 1, 2], 5).unwrap();
        assert!(matches!(
            conditional_expectation(&x, &full, 4),
            Err(Error::InfeasibleCompletion { .. })
        ));
    }

    #[test]
    fn identity_selection_takes_lowest_indices() {
        let sel = greedy_select(&DenseMatrix::identity(5), 2).unwrap();
        assert_eq!(sel.chosen.as_slice(), &[0, 1]);
        approx(sel.residual, 3.0, 1e-12);
        assert_eq!(sel.expectations.len(), 3);
        for e in &sel.expectations {
            approx(*e, 3.0, 1e-10);
        }
    }

    #[test]
    fn fast_and_reference_paths_agree() {
        for seed in 55..61 {
            let x = random_matrix(5, 9, seed);
            let fast = greedy_select(&x, 3).unwrap();
            let slow = greedy_select_reference(&x, 3).unwrap();
            assert_eq!(
                fast.chosen, slow.chosen,
                "selection diverged at seed {seed}"
            );
            approx(fast.residual, slow.residual, 1e-10);
            for (a, b) in fast.expectations.iter().zip(&slow.expectations) {
                approx(*a, *b, 1e-7);
            }
        }
    }

    #[test]
    fn greedy_never_beats_expectation_backwards() {
        // each step minimizes an average, so the result is at most the
        // unconditional expectation, and the recorded path never increases
        for seed in 61..66 {
            let x = random_matrix(6, 10, seed);
            let sel = greedy_select(&x, 3).unwrap();
            let expected = oracle::exact_expected_trace(&x, 3, oracle::DEFAULT_ORACLE_CAP).unwrap();
            assert!(
                sel.residual <= expected * (1.0 + 1e-9),
                "residual {} above expectation {expected}",
                sel.residual
            );
            for w in sel.expectations.windows(2) {
                assert!(
                    w[1] <= w[0] * (1.0 + 1e-9) + 1e-12,
                    "expectation path increased"
                );
            }
            approx(*sel.expectations.last().unwrap(), sel.residual, 1e-8);
        }
    }

    #[test]
    fn rank_deficiency_is_rejected() {
        let a = random_matrix(4, 2, 66);
        let b = random_matrix(2, 7, 67);
        let x = a.matmul(&b);
        assert!(matches!(
            greedy_select(&x, 3),
            Err(Error::RankDeficient { r: 3 })
        ));
        assert!(greedy_select(&x, 2).is_ok());
    }

    #[test]
    fn report_on_identity() {
        let x = DenseMatrix::identity(5);
        let c = ColumnSubset::new(vec![0, 1], 5).unwrap();
        let rep = bound_report(&x, &c, 1).unwrap();
        approx(rep.residual_trace, 3.0, 1e-12);
        approx(rep.rank_k_error, 4.0, 1e-12);
        approx(rep.achieved_ratio, 0.75, 1e-12);
        approx(rep.bound, 1.5, 1e-12);
        assert!(rep.bound_satisfied);
        assert_eq!(rep.method, "manual");
        assert_eq!(rep.seed, None);
        assert_eq!(rep.wall_time_ms, None);
    }

    #[test]
    fn report_handles_vanishing_baseline() {
        // rank-1 matrix with a dead column: baseline 0 both ways
        let mut x = DenseMatrix::zeros(3, 3);
        for i in 0..3 {
            x.set(i, 0, 1.0);
            x.set(i, 1, 2.0);
        }
        let good = bound_report(&x, &ColumnSubset::new(vec![0], 3).unwrap(), 1).unwrap();
        approx(good.achieved_ratio, 1.0, 1e-12);
        assert!(good.bound_satisfied);
        let bad = bound_report(&x, &ColumnSubset::new(vec![2], 3).unwrap(), 1).unwrap();
        assert!(bad.achieved_ratio.is_infinite());
        assert!(!bad.bound_satisfied);
        assert!(matches!(
            bound_report(&x, &ColumnSubset::new(vec![0], 3).unwrap(), 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn guarantee_holds_when_k_equals_r() {
        for seed in 68..73 {
            let x = random_matrix(5, 8, seed);
            let r = 3;
            let sel = greedy_select(&x, r).unwrap();
            let rep = bound_report(&x, &sel.chosen, r).unwrap();
            assert!(
                rep.achieved_ratio <= (r + 1) as f64 + 1e-9,
                "ratio {} exceeds r + 1",
                rep.achieved_ratio
            );
            assert!(rep.bound_satisfied);
        }
    }
}
