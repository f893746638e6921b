use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid bracket matrix: {0}")]
    InvalidBracket(String),

    #[error("generator precondition failed: {0}")]
    GeneratorPrecondition(String),

    #[error("band count n = {n} is not a multiple of {multiple}")]
    BandCount { n: usize, multiple: usize },

    #[error("membership check failed: {0}")]
    Membership(String),

    #[error("bundle is not equivariant: {0}")]
    Equivariance(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invariant is not well defined: {0}")]
    Invariant(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
