use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("kernel is not stationary for the given distribution (max deviation {0:e})")]
    NotStationary(f64),

    #[error("kernel is not reversible for the given distribution (max deviation {0:e})")]
    NotReversible(f64),

    #[error("kernel is not positive-semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("kernel is not ergodic: {0}")]
    NotErgodic(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cut must be a non-empty proper subset of the state space")]
    TrivialCut,

    #[error("state space too large: n = {n}, limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("inequality violated: {0}")]
    InequalityViolated(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical guard tripped: {0}")]
    NumericalGuard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
