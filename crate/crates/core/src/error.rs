use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("density must be positive and finite, got {0}")]
    NonPositiveDensity(f64),

    #[error("pressure exponent must satisfy gamma >= 1, got {0}")]
    InvalidGamma(f64),

    #[error("tangential velocities differ: v_minus_1 = {minus}, v_plus_1 = {plus}")]
    TangentialMismatch { minus: f64, plus: f64 },

    #[error("not in two-shock regime (condition margin {margin:e})")]
    NotTwoShock { margin: f64 },

    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    #[error("singular elimination: rho1 = {rho1} coincides with an outer density")]
    SingularElimination { rho1: f64 },

    #[error("no root of the normal-momentum compatibility equation for rho1 = {rho1}")]
    NoRoot { rho1: f64 },

    #[error("fan partition violated: nu_minus = {nu_minus} >= nu_plus = {nu_plus}")]
    PartitionViolation { nu_minus: f64, nu_plus: f64 },

    #[error("tangential reduction impossible: alpha = {alpha}, gamma2 = {gamma2}")]
    Reduction { alpha: f64, gamma2: f64 },

    #[error("residual check failed after solve: {0}")]
    Numerical(String),

    #[error("subsolution is not strictly feasible: {0}")]
    NotFeasible(String),

    #[error("quadrature did not resolve the test function: {0}")]
    Unresolved(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
