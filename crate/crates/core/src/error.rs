use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ill-conditioned patch at node {node} (condition estimate {condition:e})")]
    IllConditionedPatch { node: usize, condition: f64 },

    #[error("coordinate {coord} outside domain [{min}, {max}]")]
    OutOfDomain { coord: f64, min: f64, max: f64 },

    #[error("every node is constrained; the reduced system is empty")]
    EmptySystem,

    #[error("singular block system for dimension {dim}: rank {rank} has a zero factor in dimension {zero_dim}")]
    SingularBlock { dim: usize, rank: usize, zero_dim: usize },

    #[error("singular matrix: zero pivot in column {column}")]
    SingularMatrix { column: usize },

    #[error("block solve failed for dimension {dim}: {source}")]
    BlockSolve {
        dim: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("grid of {entries} entries exceeds the cap of {cap}")]
    TooLargeGrid { entries: u128, cap: u128 },

    #[error("system with {dofs} unknowns exceeds the cap of {cap}")]
    TooLarge { dofs: usize, cap: usize },

    #[error("estimated {bytes} bytes exceed the memory guard of {guard} bytes")]
    MemoryGuard { bytes: u64, guard: u64 },

    #[error("corrupt file at byte {offset}: {reason}")]
    CorruptFile { offset: u64, reason: String },

    #[error("non-finite value during time stepping at step {step}")]
    Divergence { step: usize },

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:e})")]
    CgNotConverged { iterations: usize, residual: f64 },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
