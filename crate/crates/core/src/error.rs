use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameter: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sector dimension {dim} exceeds the configured cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver failed on {context}")]
    Solver { context: String },

    #[error("eigenpair residual {residual:.3e} exceeds {bound:.3e} on {context}")]
    Residual {
        residual: f64,
        bound: f64,
        context: String,
    },

    #[error("level index {index} is not available: smallest cutoff holds only {available} levels")]
    LevelOutOfRange { index: usize, available: usize },

    #[error("reports do not share the same model parameters and parity sector")]
    MismatchedReports,

    #[error("quadrature did not reach {target:.1e} after {grid}-point refinement (last change {achieved:.3e})")]
    QuadratureNotConverged {
        target: f64,
        achieved: f64,
        grid: usize,
    },

    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("unfolding failed: {0}")]
    Unfolding(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}
