//! Crate-wide error type.

/// Errors across matrix construction, decomposition, sampling, selection,
/// enumeration, and file I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("matrix data length {got} does not match {rows}x{cols}")]
    DataLength {
        rows: usize,
        cols: usize,
        got: usize,
    },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("column index {index} out of range for {cols} columns")]
    ColumnOutOfRange { index: usize, cols: usize },

    #[error("column indices must be strictly increasing")]
    UnsortedSubset,

    #[error("length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },

    #[error("not symmetric")]
    NotSymmetric,

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("not PSD: eigenvalue {value:e} is below the clamp tolerance")]
    NotPsd { value: f64 },

    #[error("dependent columns")]
    DependentColumns,

    #[error("order {order} exceeds vector length {len}")]
    OrderTooLarge { order: usize, len: usize },

    #[error("rank too low: the order-{order} symmetric polynomial vanishes")]
    RankTooLow { order: usize },

    #[error("rank deficient for r = {r}")]
    RankDeficient { r: usize },

    #[error("degenerate pivot: working column {index} has zero norm")]
    DegeneratePivot { index: usize },

    #[error("infeasible completion: projected rank is below {needed}")]
    InfeasibleCompletion { needed: usize },

    #[error("instance too large for oracle: C({n}, {r}) = {subsets} exceeds cap {cap}")]
    OracleCapExceeded {
        n: usize,
        r: usize,
        subsets: u128,
        cap: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("bad matrix file: {0}")]
    BadFormat(String),

    #[error("report does not match schema: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
