use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the analysis routines.
///
/// Index values carried by the variants are one-based, matching the
/// external tensor format.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid tensor shape: order {order} (must be >= 2), dimension {dim} (must be >= 1)")]
    InvalidShape { order: usize, dim: usize },
    #[error("tensor with {entries} entries exceeds the dense storage limit of {limit}")]
    TooLarge { entries: u128, limit: usize },
    #[error("dense array has {got} entries, expected n^m = {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("index {index} is outside 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("index tuple {idx:?} has the wrong arity: expected {order} indices")]
    WrongArity { idx: Vec<usize>, order: usize },
    #[error("coordinate {idx:?} appears more than once")]
    DuplicateCoordinate { idx: Vec<usize> },
    #[error("entry at {idx:?} is not finite ({value})")]
    NonFiniteEntry { idx: Vec<usize>, value: f64 },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("even root requested of negative component {component} ({value})")]
    EvenRootOfNegative { component: usize, value: f64 },
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("index {0} appears more than once in the index set")]
    DuplicateIndex(usize),
    #[error("tolerance must be finite and >= 0, got {0}")]
    InvalidTolerance(f64),
    #[error("operation requires even order, got order {order}")]
    OddOrderUnsupported { order: usize },
    #[error("search needs {required} evaluations, cap is {cap}")]
    ResourceLimit { required: u128, cap: u64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no index has a positive product x_i (A x^(m-1))_i at this point")]
    NoPositiveProduct,
    #[error("internal cross-check failed: {0}")]
    InternalDisagreement(String),
    #[error("no start met the residual tolerance ({starts} starts, best residual {best_residual:e})")]
    NonConvergence { starts: usize, best_residual: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Name of the module an error originates from, used in CLI diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidShape { .. }
            | Error::TooLarge { .. }
            | Error::SizeMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::WrongArity { .. }
            | Error::DuplicateCoordinate { .. }
            | Error::NonFiniteEntry { .. }
            | Error::DimensionMismatch { .. }
            | Error::EvenRootOfNegative { .. }
            | Error::EmptyIndexSet
            | Error::DuplicateIndex(_)
            | Error::Parse(_) => "tensor_core",
            Error::InvalidTolerance(_) => "structure_checks",
            Error::OddOrderUnsupported { .. }
            | Error::ResourceLimit { .. }
            | Error::NoPositiveProduct => "p_analysis",
            Error::NonConvergence { .. } => "spectral",
            Error::InvalidConfig(_) | Error::InternalDisagreement(_) => "tenstruct",
        }
    }
}
