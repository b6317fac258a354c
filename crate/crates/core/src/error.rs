use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate coupling: at least one coupling strength must be positive")]
    DegenerateCoupling,

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("tilde transfer matrix requires all coupling phases to be zero")]
    NonZeroPhase,

    #[error("invalid coherent parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("truncation too small: Poisson tail {tail:.3e} at d = {levels} exceeds {bound:.1e}; need d >= {required}")]
    Truncation {
        levels: usize,
        tail: f64,
        bound: f64,
        required: usize,
    },

    #[error("Fock space dimension {dim} exceeds budget {budget}")]
    BudgetExceeded { dim: usize, budget: usize },

    #[error("odd measurement count: M*N = {0} cannot be split into equal position and momentum halves")]
    OddMeasurementCount(usize),

    #[error("N = 1 is excluded for the Gaussian cloner: A = MN/(N-1) diverges")]
    GaussianPerfectCopy,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
