use thiserror::Error;

/// Errors raised by state construction and the numerical routines built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem dimension {0} is below 2")]
    InvalidSubsystemDimension(usize),

    #[error("total dimension {0} exceeds the supported maximum of 64")]
    DimensionTooLarge(usize),

    #[error("matrix is not Hermitian (max |M - M^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix has a negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),

    #[error("trace deviates from 1 by {0:e}")]
    TraceViolation(f64),

    #[error("state vector norm deviates from 1 by {0:e}")]
    NormViolation(f64),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("subsystem selection is empty")]
    EmptySelection,

    #[error("subsystem sets overlap at index {0}")]
    OverlappingSubsystems(usize),

    #[error("expected {expected} subsystems, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("rank {rank} is invalid for total dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("ensemble size {m} is smaller than the state rank {rank}")]
    EnsembleTooSmall { m: usize, rank: usize },

    #[error("expected {expected} parameters, found {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("state is not pure (largest eigenvalue {0})")]
    NotPure(f64),

    #[error("unsupported dimensions: {0}")]
    Unsupported(String),

    #[error("value {value} outside [{lo}, {hi}] for {what}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("objective returned a non-finite value {value} at {params:?}")]
    NonFiniteObjective { value: f64, params: Vec<f64> },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown basis name {0:?}")]
    UnknownBasis(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps the error with a short description of where it happened.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
