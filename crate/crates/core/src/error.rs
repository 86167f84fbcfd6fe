use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("table must be at least 2x2 after pruning empty rows/columns, got {rows}x{cols}")]
    DimensionTooSmall { rows: usize, cols: usize },

    #[error("table has no positive entries")]
    EmptyTable,

    #[error("ragged table: row {row} has {found} columns, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },

    #[error("negative or non-finite entry at ({row}, {col})")]
    InvalidEntry { row: usize, col: usize },

    #[error("probabilities sum to {sum}, which is not within tolerance of 1")]
    NotNormalized { sum: f64 },

    #[error("cell ({row}, {col}) is zero; derivatives require strictly positive probabilities")]
    ZeroCell { row: usize, col: usize },

    #[error("zero marginal at {axis} index {index}")]
    ZeroMarginal { axis: &'static str, index: usize },

    #[error("zero expected count at ({row}, {col})")]
    ZeroExpected { row: usize, col: usize },

    #[error("joint entropy is zero; normalized mutual information is undefined")]
    ZeroEntropy,

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("weights contain negative values; the gamma series does not apply")]
    NegativeWeights,

    #[error("weights are all zero")]
    DegenerateWeights,

    #[error("gamma series did not converge within {iterations} terms")]
    SeriesNotConverged { iterations: usize },

    #[error("a seed is required for Monte Carlo evaluation")]
    MissingSeed,

    #[error("finite-difference perturbation leaves the simplex interior")]
    OutsideSimplex,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
