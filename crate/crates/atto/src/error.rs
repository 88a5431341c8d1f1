//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by constructions and operator builds.
///
/// Numerical *verification* failures (an identity exceeding its tolerance in
/// a sweep) are reported through [`crate::verify::TaskResult`], not through
/// this enum; `Error` is for violated preconditions and malformed inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluation point {0} coincides with a pole")]
    PoleAtPoint(String),

    #[error("inner functions live on different domains")]
    DomainMismatch,

    #[error("inner function is not a divisor: {0}")]
    NotADivisor(String),

    #[error("division by the zero function")]
    DivisionByZero,

    #[error("denominator root {0} lies within tau_real of the real axis")]
    RealPole(String),

    #[error("pole {0} lies on the unit circle")]
    PoleOnBoundary(String),

    #[error("function is unbounded on the boundary: {0}")]
    NotBounded(String),

    #[error("product does not decay fast enough to integrate: {0}")]
    NotIntegrable(String),

    #[error("model space would be zero-dimensional")]
    DegenerateSpace,

    #[error("the two projection formulas disagree: residual {residual:.3e} > {tolerance:.3e}")]
    FormulaMismatch { residual: f64, tolerance: f64 },

    #[error("point {0} is not in the open upper half-plane")]
    NotInUpperHalfPlane(String),

    #[error("symbol is not analytic in the upper half-plane: {0}")]
    NotAnalytic(String),

    #[error("symbol is identically zero")]
    ZeroSymbol,

    #[error("operator rank differs from the predicted rank: {0}")]
    RankMismatch(String),

    #[error("equivalence witness fails membership check: {0}")]
    WitnessInvalid(String),

    #[error("operator identity failed: {0}")]
    IdentityFailure(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("gram matrix is not positive definite (condition too extreme)")]
    GramNotPositive,

    #[error("polynomial root finding did not converge")]
    RootsDidNotConverge,

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
