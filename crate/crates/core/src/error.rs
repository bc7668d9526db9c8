use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: moments are defined for n >= 2")]
    InvalidDimension(usize),

    #[error("degenerate cloud: total weight must be positive (got {0})")]
    DegenerateCloud(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("moment table holds orders up to {available}, invariant needs {required}")]
    InsufficientOrder { required: u32, available: u32 },

    #[error("malformed input at line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("unsupported format version {0:?}")]
    VersionUnsupported(String),

    #[error("{invariant} invariants cannot be checked under {transform} transforms")]
    IncompatibleClass {
        invariant: &'static str,
        transform: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
