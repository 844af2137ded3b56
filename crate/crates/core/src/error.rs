use thiserror::Error;

use crate::scaling::Side;

/// Errors raised by the library. Row and column indices are stored 0-based
/// and displayed 1-based.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed scalar literal {0:?}")]
    MalformedScalar(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("division by zero")]
    DivisionByZero,

    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("negative entry at row {}, column {}", .row + 1, .col + 1)]
    NegativeEntry { row: usize, col: usize },
    #[error("row {} has {found} entries, expected {expected}", .row + 1)]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("declared {what} = {declared} but entries give {actual}")]
    DeclaredShape { what: &'static str, declared: usize, actual: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is {rows}x{cols}, a square matrix is required")]
    NotSquare { rows: usize, cols: usize },

    #[error("{} marginal {} is not positive", side_name(*.side), .index + 1)]
    NonPositiveMarginal { side: Side, index: usize },
    #[error("unbalanced marginals: sum(r) = {row_total} but sum(c) = {col_total}")]
    UnbalancedMarginals { row_total: String, col_total: String },
    #[error("marginals are required for a {rows}x{cols} matrix")]
    MarginalsRequired { rows: usize, cols: usize },
    #[error("row {} has zero sum, row scaling is undefined", .0 + 1)]
    ZeroRowSum(usize),
    #[error("column {} has zero sum, column scaling is undefined", .0 + 1)]
    ZeroColumnSum(usize),
    #[error("the exact backend compares with tolerance 0, got {0}")]
    NonzeroExactTolerance(String),
    #[error("negative tolerance {0}")]
    NegativeTolerance(String),
    #[error("max_steps must be at least 1")]
    NoSteps,
    #[error("entry size {bits} bits exceeds the limit of {limit} bits after step {step}")]
    BitSizeExceeded { bits: u64, limit: u64, step: usize },

    #[error("trace has {0} steps, a row step followed by a column step is required")]
    TraceTooShort(usize),
    #[error("trace has no row step followed by a column step")]
    WrongSideOrder,
    #[error("{0} requires the exact backend")]
    ApproximateBackend(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Row => "row",
        Side::Column => "column",
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
