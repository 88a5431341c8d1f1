//! Model spaces, truncated Toeplitz operators and their asymmetric variants
//! (ATTO) as exactly computable finite-dimensional objects, for finite
//! Blaschke inner functions and rational symbols on the upper half-plane
//! (with a Cayley transfer to the disc).
//!
//! The crate follows the function theory of the Hardy spaces H_p^± of the
//! half-plane: model spaces K_θ = H⁺ ∩ θH⁻, Riesz projections by partial
//! fractions, inner products by residue calculus, and operators
//! A_g^{α,θ} = P_α g P_θ assembled as complex matrices in the
//! partial-fraction basis of K_θ. Everything is double precision with
//! explicitly tracked tolerances; see [`tol`].

pub mod error;
pub mod inner;
pub mod modelspace;
pub mod numeric;
pub mod operators;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod spectral;
pub mod tol;
pub mod transfer;
pub mod verify;
pub mod wire;

pub use error::{Error, Result};
pub use inner::{r_inner, BlaschkeZero, Domain, InnerFunction};
pub use modelspace::{p_theta, q_theta, shifted_space, ModelSpace, ShiftedSpace, SpaceElement};
pub use operators::{build_a, build_b, AttoOperator, Symbol};
pub use poly::Poly;
pub use rational::{l2_inner, quadrature_inner, HardySign, Rational, RieszSplit, WeightVariant};

pub type C64 = num_complex::Complex64;
