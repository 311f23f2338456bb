use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    InvalidField(u64),
    #[error("operands live in different polynomial rings")]
    RingMismatch,
    #[error("a polynomial ring needs at least one variable and distinct variable names")]
    InvalidRing,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("entry ({row}, {col}) {context}: expected internal degree {expected}, found {found}")]
    Inhomogeneous { context: String, row: usize, col: usize, expected: i64, found: String },
    #[error("differential does not square to zero: {0}")]
    NotSquareZero(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("window [{lo}, {hi}] too small to certify the result; retry with hi >= {suggested_hi}")]
    WindowTooSmall { lo: i64, hi: i64, suggested_hi: i64 },
    #[error("the basis has crossing; de-totaling needs a crossing-free semibasis")]
    CrossingPresent,
    #[error("operation requires a univariate ring, found {0} variables")]
    NotUnivariate(usize),
    #[error("target is not a boundary in homological degree {0}")]
    NotABoundary(i64),
    #[error("rank {0} exceeds 3")]
    RankTooLarge(usize),
    #[error("homology is not concentrated in position {0}")]
    NotConcentrated(i64),
    #[error("{0}")]
    Invalid(String),
}
