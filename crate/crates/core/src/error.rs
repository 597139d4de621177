use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate pass window: [{start_s}, {end_s}] s")]
    DegeneratePassWindow { start_s: f64, end_s: f64 },

    #[error("infeasible deadline: {0}")]
    InfeasibleDeadline(String),

    #[error("zero-gain link")]
    ZeroGainLink,

    #[error("gain quantile did not converge after {iterations} iterations (eps = {eps})")]
    QuantileNonConvergent { eps: f64, iterations: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no feasible operating point")]
    NoFeasiblePoint,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
