use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polyline is not convex or not increasing at edge {edge}: {reason}")]
    NotConvex { edge: usize, reason: String },

    #[error("operation budget exceeded: estimated {estimate:.3e} operations, budget {budget:.3e}")]
    BudgetExceeded { estimate: f64, budget: f64 },

    #[error("{what} refused: argument {value} exceeds hard cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("energy is not coordinatewise increasing at ({x1}, {x2})")]
    NonMonotoneEnergy { x1: u32, x2: u32 },

    #[error("divergent Gibbs model: {0}")]
    Divergent(String),

    #[error("no sign change of the vertex-count equation on lambda in [{lo:e}, {hi:e}] for target ratio {ratio}")]
    NoBracket { lo: f64, hi: f64, ratio: f64 },

    #[error("calibration did not converge after {iterations} iterations (max relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular quadrature denominator for mixing parameter {0}")]
    SingularQuadrature(f64),

    #[error("rejection budget of {budget} redraws exhausted: {reason}")]
    RejectionBudget { budget: usize, reason: String },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("overflow in exact arithmetic")]
    Overflow,

    #[error("serialization: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
