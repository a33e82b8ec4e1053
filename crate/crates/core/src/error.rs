use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {lhs_rows}x{lhs_cols} vs {rhs_rows}x{rhs_cols}")]
    DimensionMismatch { op: &'static str, lhs_rows: usize, lhs_cols: usize, rhs_rows: usize, rhs_cols: usize },
    #[error("matrix is singular (pivot {pivot:e} below tolerance at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid argument: {0} (got {1})")]
    InvalidArgument(&'static str, f64),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("observation is for stage {actual}, expected stage {expected}")]
    WrongStage { expected: u32, actual: u32 },
    #[error("missing prior estimate: {0}")]
    MissingPrior(&'static str),
    #[error("reference channel has zero norm")]
    ZeroNormReference,
    #[error("dataset is empty")]
    EmptyDataset,
}
