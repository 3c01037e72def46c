use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),

    #[error("point is not inside the open unit ball (|z|^2 = {0})")]
    OutsideBall(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("denominator {0:e} below degeneracy threshold in fractional linear action")]
    Degenerate(f64),

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("atom exponent {exponent} differs from sigma = {sigma}; use quadrature explicitly")]
    UnsupportedAtomExponent { exponent: f64, sigma: f64 },

    #[error("integrand magnitude {0:e} exceeded overflow guard")]
    NumericalBlowup(f64),

    #[error("degenerate family: smallest singular/eigen value {0:e} below tolerance")]
    DegenerateFamily(f64),

    #[error("family capacity exceeded: {count} entries > maximum {max}")]
    CapacityExceeded { count: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
