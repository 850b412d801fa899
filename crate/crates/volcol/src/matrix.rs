//! Dense row-major matrices and validated column index sets.

use crate::error::{Error, Result};

/// Real m x n matrix, row-major storage.
///
/// Construction validates shape and finiteness once; all later code relies on
/// entries being finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::DataLength {
                rows,
                cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// All-zero matrix. Panics on an empty shape; use `new` when the shape is
    /// not known to be valid.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix shape must be nonempty");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Entry (i, j) = f(i, j). Panics if f returns a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.is_finite(), "entry ({i}, {j}) is not finite");
                m.data[i * cols + j] = v;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn col_norm_sq(&self, j: usize) -> f64 {
        (0..self.rows)
            .map(|i| {
                let v = self.get(i, j);
                v * v
            })
            .sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor.is_finite(), "scale factor must be finite");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * out.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Submatrix of the columns at the subset's indices, in index order.
    pub fn columns(&self, subset: &ColumnSubset) -> Result<Self> {
        subset.check_for(self.cols)?;
        if subset.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let mut out = Self::zeros(self.rows, subset.len());
        for (pos, &j) in subset.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, pos, self.get(i, j));
            }
        }
        Ok(out)
    }

    /// Submatrix of the contiguous column range [start, end).
    pub fn column_range(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.cols {
            return Err(Error::InvalidArgument(format!(
                "column range [{start}, {end}) invalid for {} columns",
                self.cols
            )));
        }
        let mut out = Self::zeros(self.rows, end - start);
        for i in 0..self.rows {
            for j in start..end {
                out.set(i, j - start, self.get(i, j));
            }
        }
        Ok(out)
    }
}

/// Strictly increasing set of column indices. The empty set is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnSubset {
    indices: Vec<usize>,
}

impl ColumnSubset {
    /// Validates strict increase and that every index is below `cols`.
    pub fn new(indices: Vec<usize>, cols: usize) -> Result<Self> {
        for w in indices.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::UnsortedSubset);
            }
        }
        if let Some(&last) = indices.last() {
            if last >= cols {
                return Err(Error::ColumnOutOfRange { index: last, cols });
            }
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self {
            indices: Vec::new(),
        }
    }

    /// Caller guarantees the indices are strictly increasing.
    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.indices.iter()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Errors unless every index is below `cols`.
    pub fn check_for(&self, cols: usize) -> Result<()> {
        match self.indices.last() {
            Some(&last) if last >= cols => Err(Error::ColumnOutOfRange { index: last, cols }),
            _ => Ok(()),
        }
    }
}
