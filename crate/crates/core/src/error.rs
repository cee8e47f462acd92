use thiserror::Error;

use crate::pd::GramReport;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} appears more than once in the cycle notation")]
    DuplicatePoint(usize),

    #[error("point {0} is not a positive integer")]
    NonPositivePoint(usize),

    #[error("image table is not a bijection onto its domain: {0}")]
    NotABijection(String),

    #[error("cannot parse `{input}`: {msg}")]
    Parse { input: String, msg: String },

    #[error("positions must be strictly increasing, found {prev} followed by {next}")]
    UnsortedPositions { prev: usize, next: usize },

    #[error("invalid Thoma parameters: {0}")]
    InvalidParams(String),

    #[error("s_k is defined for k >= 2, got k = {0}")]
    CycleLengthTooSmall(usize),

    #[error(
        "permutation moves point {needed} but the configuration has only {len} coordinates; \
         sample a configuration with n >= {needed}"
    )]
    SupportExceedsLength { needed: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("element list is empty")]
    EmptyElements,

    #[error("matrix is not Hermitian: max |A - A*| = {asymmetry:e} exceeds {tol:e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("Gram matrix is not positive semidefinite: min eigenvalue {}", .0.min_eigenvalue)]
    NotPositive(Box<GramReport>),

    #[error("matrix is not unitary: ||U*U - I|| = {0:e}")]
    NotUnitary(f64),

    #[error("not a unit vector: norm deviates from 1 by {0:e}")]
    NotUnit(f64),

    #[error("representation is not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("point {point} outside 1..={n}")]
    OutOfRange { point: usize, n: usize },

    #[error("invalid finite group: {0}")]
    InvalidGroup(String),

    #[error("invalid action space: {0}")]
    InvalidAction(String),

    #[error("fixed-point algebra failed the closure check: residual {0:e}")]
    NotClosed(f64),

    #[error("minimal projection extraction failed: {0}")]
    Projection(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sample {index} failed: {source}")]
    Sample {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid config field `{field}`: {msg}")]
    Config { field: &'static str, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = core::result::Result<T, Error>;
