//! Sequential determinantal sampling of column subsets.
//!
//! A subset C of r columns is drawn with probability proportional to
//! det(X_C^T X_C). Columns are chosen one at a time in increasing index
//! order: each round walks the cumulative masses of the remaining suffixes
//! with a single [0, 1) draw, where the mass of suffix [l, n) at order q is
//! S_q of the eigenvalues of the suffix outer product W_l. Picking a column
//! projects its direction out of every table entry through a rank-one
//! update; the table is rebuilt from the working matrix every ceil(n/4)
//! updates to stop drift from accumulating.

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{ColumnSubset, DenseMatrix};
use crate::symfunc;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

/// One sampling round: the uniform draw, the total suffix mass it was scaled
/// against, the column it landed on, and the threshold mass left over at the
/// moment of selection.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub draw: f64,
    pub total_mass: f64,
    pub chosen_index: usize,
    pub residual_mass: f64,
}

/// A sampled subset together with its per-round audit trail.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTrace {
    pub subset: ColumnSubset,
    pub rounds: Vec<RoundRecord>,
}

/// Where the sampler spent its time.
#[derive(Debug, Clone, Copy)]
pub struct SampleTimings {
    pub build: Duration,
    pub search: Duration,
    pub update: Duration,
}

/// Suffix outer products W_l = Y_{[l, n)} Y_{[l, n)}^T of a working matrix Y,
/// kept consistent under column projections.
pub struct SuffixOuterTable {
    entries: Vec<DenseMatrix>,
    working: DenseMatrix,
    updates_since_rebuild: usize,
    rebuild_every: usize,
}

impl SuffixOuterTable {
    pub fn build(x: &DenseMatrix) -> Self {
        Self {
            entries: Self::suffix_outers(x),
            working: x.clone(),
            updates_since_rebuild: 0,
            rebuild_every: x.cols().div_ceil(4).max(1),
        }
    }

    /// Telescoping pass from the right: W_l = W_{l+1} + x_l x_l^T.
    fn suffix_outers(x: &DenseMatrix) -> Vec<DenseMatrix> {
        let (m, n) = (x.rows(), x.cols());
        let mut entries = Vec::with_capacity(n);
        let mut w = DenseMatrix::zeros(m, m);
        for l in (0..n).rev() {
            let col = x.column(l);
            for i in 0..m {
                for j in i..m {
                    let v = w.get(i, j) + col[i] * col[j];
                    w.set(i, j, v);
                    w.set(j, i, v);
                }
            }
            entries.push(w.clone());
        }
        entries.reverse();
        entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.working.rows()
    }

    pub fn entry(&self, l: usize) -> &DenseMatrix {
        &self.entries[l]
    }

    pub fn working(&self) -> &DenseMatrix {
        &self.working
    }

    /// Projects the direction of working column `l` out of every entry and
    /// out of the working matrix itself. Errors when that column has already
    /// collapsed to zero.
    pub fn rank_one_update(&mut self, l: usize) -> Result<()> {
        let nsq = self.working.col_norm_sq(l);
        if nsq <= 0.0 {
            return Err(Error::DegeneratePivot { index: l });
        }
        let inv = 1.0 / nsq.sqrt();
        let z: Vec<f64> = self.working.column(l).iter().map(|v| v * inv).collect();
        for w in &mut self.entries {
            apply_projector_update(w, &z);
        }
        self.working = linalg::project_out(&self.working, l)?;
        self.updates_since_rebuild += 1;
        if self.updates_since_rebuild >= self.rebuild_every {
            self.entries = Self::suffix_outers(&self.working);
            self.updates_since_rebuild = 0;
        }
        Ok(())
    }
}

/// W <- (I - zz^T) W (I - zz^T) for a unit vector z, expanded to
/// W + (z^T W z) zz^T - z (Wz)^T - (Wz) z^T. Upper triangle is computed once
/// and mirrored so storage stays exactly symmetric.
pub(crate) fn apply_projector_update(w: &mut DenseMatrix, z: &[f64]) {
    let m = w.rows();
    let wz: Vec<f64> = (0..m).map(|i| linalg::dot(w.row(i), z)).collect();
    let alpha = linalg::dot(z, &wz);
    for i in 0..m {
        for j in i..m {
            let v = w.get(i, j) + alpha * z[i] * z[j] - z[i] * wz[j] - wz[i] * z[j];
            w.set(i, j, v);
            w.set(j, i, v);
        }
    }
}

/// ln of the order-q mass of suffix [l, n), memoized per round. Suffixes past
/// the end carry no mass.
fn ln_suffix_mass(
    table: &SuffixOuterTable,
    l: usize,
    order: usize,
    log_space: bool,
    cache: &mut [Option<f64>],
) -> Result<f64> {
    if l >= table.len() {
        return Ok(f64::NEG_INFINITY);
    }
    if let Some(v) = cache[l] {
        return Ok(v);
    }
    let vals = linalg::eigenvalues_clamped_lenient(table.entry(l))?;
    let v = if log_space {
        symfunc::log_elem_sym(&vals, order).expect("order bounded by table dimension")
    } else {
        let s = symfunc::elem_sym(&vals, order).expect("order bounded by table dimension");
        if s > 0.0 {
            s.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    cache[l] = Some(v);
    Ok(v)
}

/// Draws one r-subset with probability proportional to det(X_C^T X_C),
/// reporting where the time went.
pub fn volume_sample_timed(
    x: &DenseMatrix,
    r: usize,
    rng: &mut impl Rng,
) -> Result<(SampleTrace, SampleTimings)> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let n = x.cols();
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::RankDeficient { r });
    }
    // normalization makes every mass computation scale-free
    let xn = x.scaled(1.0 / norm);
    if linalg::min_side_spectrum(&xn)?.numeric_rank() < r {
        return Err(Error::RankDeficient { r });
    }

    let started = Instant::now();
    let mut table = SuffixOuterTable::build(&xn);
    let build = started.elapsed();

    // plain evaluation is fine for small spectra; long ones go through logs
    let log_space = x.rows() > 30;
    let mut search = Duration::ZERO;
    let mut update = Duration::ZERO;
    let mut chosen = Vec::with_capacity(r);
    let mut rounds = Vec::with_capacity(r);
    let mut start = 0usize;

    for round in 0..r {
        let order = r - round;
        let round_started = Instant::now();
        let mut cache: Vec<Option<f64>> = vec![None; n];
        let ln_total = ln_suffix_mass(&table, start, order, log_space, &mut cache)?;
        assert!(
            ln_total > f64::NEG_INFINITY,
            "round {round} has no mass: rank accounting is broken"
        );
        // an exact 0 is redrawn so the left edge cannot land in an empty cell
        let draw = loop {
            let t: f64 = rng.random();
            if t > 0.0 {
                break t;
            }
        };
        // walk the suffix CDF: t > mass(lo..=mid) sends the search right,
        // decrementing t by the skipped mass; ties resolve left
        let mut t = draw;
        let (mut lo, mut hi) = (start, n - 1);
        let mut ln_lo = ln_total;
        while lo != hi {
            let mid = lo + (hi - lo) / 2;
            let ln_mid1 = ln_suffix_mass(&table, mid + 1, order, log_space, &mut cache)?;
            let h = (ln_lo - ln_total).exp() - (ln_mid1 - ln_total).exp();
            if t > h {
                t -= h;
                lo = mid + 1;
                ln_lo = ln_mid1;
            } else {
                hi = mid;
            }
        }
        let ln_next = ln_suffix_mass(&table, lo + 1, order, log_space, &mut cache)?;
        let cell = (ln_lo - ln_total).exp() - (ln_next - ln_total).exp();
        assert!(
            cell > 0.0,
            "round {round} landed in an empty cell at column {lo}"
        );
        let total_mass = ln_total.exp();
        rounds.push(RoundRecord {
            draw,
            total_mass,
            chosen_index: lo,
            residual_mass: t * total_mass,
        });
        chosen.push(lo);
        search += round_started.elapsed();

        if round + 1 < r {
            let update_started = Instant::now();
            table.rank_one_update(lo)?;
            update += update_started.elapsed();
        }
        start = lo + 1;
    }

    Ok((
        SampleTrace {
            subset: ColumnSubset::from_sorted_unchecked(chosen),
            rounds,
        },
        SampleTimings {
            build,
            search,
            update,
        },
    ))
}

pub fn volume_sample(x: &DenseMatrix, r: usize, rng: &mut impl Rng) -> Result<SampleTrace> {
    volume_sample_timed(x, r, rng).map(|(trace, _)| trace)
}

/// Deterministic draw from a documented stream: ChaCha8 seeded with `seed`.
pub fn volume_sample_seeded(x: &DenseMatrix, r: usize, seed: u64) -> Result<SampleTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    volume_sample(x, r, &mut rng)
}

/// Probability that the sequential sampler returns exactly `c`: the product,
/// along the unique increasing path, of each round's cell mass over its
/// round total. Computed in the subtraction-free marginal form
///
///   cell(l) = ||y_l||^2 * S_{q-1}(spectrum after projecting y_l, columns > l)
///
/// with y the working matrix of that round. Returns 0 for subsets the
/// sampler cannot produce.
pub fn subset_probability(x: &DenseMatrix, r: usize, c: &ColumnSubset) -> Result<f64> {
    if c.len() != r || r == 0 {
        return Err(Error::InvalidArgument(format!(
            "need an r-subset with r >= 1, got |C| = {} and r = {r}",
            c.len()
        )));
    }
    c.check_for(x.cols())?;
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::RankDeficient { r });
    }
    let xn = x.scaled(1.0 / norm);
    if linalg::min_side_spectrum(&xn)?.numeric_rank() < r {
        return Err(Error::RankDeficient { r });
    }

    let n = xn.cols();
    let mut y = xn;
    let mut start = 0usize;
    let mut ln_prob = 0.0f64;
    for (i, &col) in c.iter().enumerate() {
        let order = r - i;
        let suffix = y.column_range(start, n)?;
        let spec = linalg::min_side_spectrum(&suffix)?;
        if order > spec.len() {
            return Ok(0.0);
        }
        let ln_den = symfunc::log_elem_sym(spec.values(), order)?;
        if ln_den == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let nsq = y.col_norm_sq(col);
        if nsq <= 0.0 {
            return Ok(0.0);
        }
        let ln_tail = if order == 1 {
            0.0
        } else if n - col - 1 < order - 1 {
            return Ok(0.0);
        } else {
            let projected = linalg::project_out(&y, col)?;
            let tail = projected.column_range(col + 1, n)?;
            let tspec = linalg::min_side_spectrum(&tail)?;
            if order - 1 > tspec.len() {
                return Ok(0.0);
            }
            let v = symfunc::log_elem_sym(tspec.values(), order - 1)?;
            if v == f64::NEG_INFINITY {
                return Ok(0.0);
            }
            v
        };
        ln_prob += nsq.ln() + ln_tail - ln_den;
        y = linalg::project_out(&y, col)?;
        start = col + 1;
    }
    Ok(ln_prob.exp())
}

/// Probability that the first (smallest) selected index is `j`:
///
///   Pr[min C = j] = ||x_j||^2 * S_{r-1}(spectrum of the projected suffix
///                   past j) / S_r(spectrum of X)
pub fn first_column_marginal(x: &DenseMatrix, r: usize, j: usize) -> Result<f64> {
    let n = x.cols();
    if j >= n {
        return Err(Error::ColumnOutOfRange { index: j, cols: n });
    }
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::RankDeficient { r });
    }
    let xn = x.scaled(1.0 / norm);
    let spec = linalg::min_side_spectrum(&xn)?;
    if spec.numeric_rank() < r {
        return Err(Error::RankDeficient { r });
    }
    let nsq = xn.col_norm_sq(j);
    if nsq == 0.0 {
        return Ok(0.0);
    }
    let ln_den = symfunc::log_elem_sym(spec.values(), r)?;
    let ln_tail = if r == 1 {
        0.0
    } else if n - j - 1 < r - 1 {
        // not enough columns to the right to finish the subset
        return Ok(0.0);
    } else {
        let projected = linalg::project_out(&xn, j)?;
        let suffix = projected.column_range(j + 1, n)?;
        let sspec = linalg::min_side_spectrum(&suffix)?;
        let v = symfunc::log_elem_sym(sspec.values(), r - 1)?;
        if v == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        v
    };
    Ok((nsq.ln() + ln_tail - ln_den).exp())
}
