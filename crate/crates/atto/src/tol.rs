//! Default numerical tolerances.
//!
//! These are the crate-wide defaults; the verification driver threads a
//! [`crate::verify::Tolerances`] value through so individual thresholds can
//! be overridden from the command line.

/// Zeros closer than this are treated as equal in gcd/divisibility.
pub const TAU_ZERO: f64 = 1e-8;
/// Allowed deviation of |phase| from 1.
pub const TAU_UNIMOD: f64 = 1e-9;
/// Pointwise evaluation agreement.
pub const TAU_EVAL: f64 = 1e-9;
/// Poles closer than this to ℝ make residue calculus unreliable; reject.
pub const TAU_REAL: f64 = 1e-8;
/// Relative singular-value threshold for numerical rank.
pub const TAU_RANK: f64 = 1e-9;
/// Principal-angle / subspace-residual threshold for kernel comparisons.
pub const TAU_KER: f64 = 1e-7;
/// Base operator-identity residual; scaled by the operators involved.
pub const TAU_OP_BASE: f64 = 1e-8;
/// Base projection residual; scaled by (1 + cond(Gram)).
pub const TAU_PROJ_BASE: f64 = 1e-9;
/// Required relative agreement between residue and quadrature inner products.
pub const QUAD_REL: f64 = 1e-6;
/// Soft cap on the degree of a single inner function (Gram conditioning).
pub const MAX_DEGREE: usize = 12;
