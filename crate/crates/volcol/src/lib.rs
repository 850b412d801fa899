//! Column subset selection with determinantal guarantees.
//!
//! The crate picks `r` columns of a dense matrix so that projecting onto
//! their span comes provably close to the best rank-`k` approximation in
//! squared Frobenius norm. Two selectors are provided: an exact
//! determinantal sampler whose subset probabilities are proportional to
//! squared column-span volumes, and a deterministic greedy descent on
//! conditional expectations that meets the `(r + 1) / (r + 1 - k)` bound
//! outright. Both are checked against exhaustive enumeration oracles, and
//! [`hardness`] builds the block instances that show the bound is tight.
//!
//! The library works on [`DenseMatrix`] values in row-major storage and
//! never touches the filesystem; [`io`] adds CSV and binary codecs, and
//! [`cli`] wraps everything into the `volcol` binary.

// index loops mirror the written-out matrix algebra, and negated comparisons
// such as `!(x > 0.0)` deliberately send NaN down the failing branch
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod greedy;
pub mod hardness;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod report;
pub mod sampler;
pub mod symfunc;
mod tol;

pub use error::{Error, Result};
pub use matrix::{ColumnSubset, DenseMatrix};
