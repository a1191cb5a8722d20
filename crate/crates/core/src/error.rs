use thiserror::Error;

/// Every failure the library can report.
///
/// The CLI maps all of these to exit code 2 (input or domain error); mathematical
/// violations are never errors, they are failed check records.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {cols} columns")]
    NotSquare { rows: usize, row: usize, cols: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("NotHermitian: asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigensolver did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("function undefined at eigenvalue {eigenvalue}")]
    DomainError { eigenvalue: f64 },

    #[error("NotPositiveDefinite: smallest eigenvalue {min_eigenvalue:.6e} is not above {threshold:.3e}")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("NotPSD: smallest eigenvalue {min_eigenvalue:.6e} is below {threshold:.3e}")]
    NotPsd { min_eigenvalue: f64, threshold: f64 },

    #[error("bad partition: block sizes sum to {sum}, matrix dimension is {dim}")]
    BadPartition { sum: usize, dim: usize },

    #[error("size overflow: {requested} exceeds cap {cap}")]
    SizeOverflow { requested: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
