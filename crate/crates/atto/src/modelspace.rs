//! Finite-dimensional model spaces K_θ = H⁺ ∩ θH⁻ on the half-plane:
//! partial-fraction bases, Gram matrices, the projections P_θ and Q_θ,
//! reproducing kernels, the conjugation C_θ, and shifted model spaces
//! K_{α,θ} = α·K_{ᾱθ} with the projection P_{α,θ} = P_θ − P_α.
//!
//! The basis of K_θ is { (ξ − z̄ⱼ)^{−k} : θ(zⱼ) = 0, 1 ≤ k ≤ mult(zⱼ) };
//! partial-fraction monomials stay well-defined under confluent zeros,
//! where reproducing kernels at the zeros would degenerate.
//!
//! Inner-product convention: ⟨f,g⟩ = ∫ℝ f ḡ dξ, unnormalized. With this
//! choice the reproducing identity carries an explicit constant,
//! ⟨f, k_w^θ⟩ = 2πi·f(w); the constant is part of the public contract and
//! is asserted in tests rather than silently absorbed into the kernels.

use crate::error::{Error, Result};
use crate::inner::{Domain, InnerFunction};
use crate::numeric::{self, CMat, CVec, Chol};
use crate::rational::{l2_inner, Rational};
use crate::tol::{TAU_PROJ_BASE, TAU_REAL};
use num_complex::Complex64 as C;

/// P_θ f computed by both operator factorizations
/// θP⁻θ̄P⁺ and P⁺θP⁻θ̄, returning the projection and the sampled residual
/// between the two routes. For a constant inner function the projection is 0.
pub fn p_theta(theta: &InnerFunction, f: &Rational) -> Result<(Rational, f64)> {
    if theta.is_constant() {
        return Ok((Rational::zero(), 0.0));
    }
    let th = theta.as_rational();
    let thc = theta.conj_rational();
    // route 1: θ P⁻ θ̄ P⁺ f
    let r1 = th.mul(&thc.mul(&f.p_plus(TAU_REAL)?).p_minus(TAU_REAL)?);
    // route 2: P⁺ θ P⁻ θ̄ f
    let r2 = th.mul(&thc.mul(f).p_minus(TAU_REAL)?).p_plus(TAU_REAL)?;
    let resid = r1.max_diff_on_samples(&r2);
    Ok((r1, resid))
}

/// Q_θ f = P⁺f − P_θf; lands in θH⁺.
pub fn q_theta(theta: &InnerFunction, f: &Rational) -> Result<Rational> {
    let (p, _) = p_theta(theta, f)?;
    Ok(f.p_plus(TAU_REAL)?.sub(&p))
}

/// An element of a model space carried in both representations.
#[derive(Clone, Debug)]
pub struct SpaceElement {
    pub coords: CVec,
    pub rational: Rational,
}

#[derive(Clone, Debug)]
pub struct ModelSpace {
    theta: InnerFunction,
    basis: Vec<Rational>,
    gram: CMat,
    chol: Chol,
    cond: f64,
}

impl ModelSpace {
    /// Build K_θ for a half-plane inner function of degree ≥ 1.
    pub fn new(theta: &InnerFunction) -> Result<Self> {
        if theta.domain() != Domain::HalfPlane {
            return Err(Error::InvalidParam(
                "model spaces are built on the half-plane; transfer disc data first".into(),
            ));
        }
        if theta.degree() == 0 {
            return Err(Error::DegenerateSpace);
        }
        let mut basis = Vec::with_capacity(theta.degree());
        for z in theta.zeros() {
            for k in 1..=z.multiplicity {
                // unit-norm partial-fraction monomials; the normalization is
                // plain diagonal preconditioning of the Gram system
                let e = Rational::pole(z.location.conj(), k);
                let n2 = l2_inner(&e, &e, TAU_REAL)?.re;
                basis.push(e.scale(num_complex::Complex64::new(1.0 / n2.sqrt(), 0.0)));
            }
        }
        let n = basis.len();
        let mut gram = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] = l2_inner(&basis[j], &basis[i], TAU_REAL)?;
            }
        }
        let cond = numeric::condition_number(&gram);
        let chol = numeric::cholesky(&gram)?;
        Ok(ModelSpace {
            theta: theta.clone(),
            basis,
            gram,
            chol,
            cond,
        })
    }

    pub fn theta(&self) -> &InnerFunction {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Rational] {
        &self.basis
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn chol(&self) -> &Chol {
        &self.chol
    }

    pub fn cond(&self) -> f64 {
        self.cond
    }

    /// Projection tolerance, degraded by the Gram conditioning.
    pub fn tau_proj(&self) -> f64 {
        TAU_PROJ_BASE * (1.0 + self.cond)
    }

    /// Coordinates of an element already in K_θ: Cholesky solve of
    /// G c = (⟨f, e_i⟩)_i.
    pub fn coords(&self, f: &Rational) -> Result<CVec> {
        let n = self.dim();
        let mut b = CVec::zeros(n);
        for i in 0..n {
            b[i] = l2_inner(f, &self.basis[i], TAU_REAL)?;
        }
        Ok(self.chol.solve(&b))
    }

    /// Linear combination of the basis.
    pub fn element(&self, coords: &CVec) -> Rational {
        let mut acc = Rational::zero();
        for (k, e) in self.basis.iter().enumerate() {
            acc = acc.add(&e.scale(coords[k]));
        }
        acc
    }

    /// P_θ f with cross-checked projection formulas and coordinates.
    pub fn project(&self, f: &Rational) -> Result<SpaceElement> {
        let (p, resid) = p_theta(&self.theta, f)?;
        let tol = self.tau_proj() * (1.0 + f.sup_on_samples());
        if resid > tol {
            return Err(Error::FormulaMismatch {
                residual: resid,
                tolerance: tol,
            });
        }
        let coords = self.coords(&p)?;
        Ok(SpaceElement {
            coords,
            rational: p,
        })
    }

    /// Membership test: P_θ f ≈ f at the given tolerance.
    pub fn contains(&self, f: &Rational, tol: f64) -> bool {
        match p_theta(&self.theta, f) {
            Ok((p, _)) => p.approx_eq(f, tol),
            Err(_) => false,
        }
    }

    /// Reproducing kernel k_w^θ = (1 − conj(θ(w))·θ(ξ))/(ξ − w̄) = P_θ 1/(ξ−w̄).
    pub fn kernel_k(&self, w: C) -> Result<SpaceElement> {
        if w.im <= 0.0 {
            return Err(Error::NotInUpperHalfPlane(format!("{w}")));
        }
        let tw = self.theta.evaluate(w)?;
        let numer = Rational::one().sub(&self.theta.as_rational().scale(tw.conj()));
        let rational = numer.mul(&Rational::pole(w.conj(), 1));
        let coords = self.coords(&rational)?;
        Ok(SpaceElement { coords, rational })
    }

    /// Conjugate kernel k̃_w^θ = (θ(ξ) − θ(w))/(ξ − w); the pole at w is
    /// removable and cancels in reduction.
    pub fn kernel_ktilde(&self, w: C) -> Result<SpaceElement> {
        if w.im <= 0.0 {
            return Err(Error::NotInUpperHalfPlane(format!("{w}")));
        }
        let tw = self.theta.evaluate(w)?;
        let numer = self.theta.as_rational().sub(&Rational::constant(tw));
        let rational = numer.mul(&Rational::pole(w, 1));
        debug_assert!(rational.poles().iter().all(|(z, _)| z.im < 0.0));
        let coords = self.coords(&rational)?;
        Ok(SpaceElement { coords, rational })
    }

    /// Conjugation C_θ(φ₊) = θ·conj(P_θ φ₊); an isometric involution on K_θ
    /// that annihilates θH⁺.
    pub fn conjugation(&self, f: &Rational) -> Result<SpaceElement> {
        let (p, _) = p_theta(&self.theta, f)?;
        let rational = self.theta.as_rational().mul(&p.conj_reflect());
        let coords = self.coords(&rational)?;
        Ok(SpaceElement { coords, rational })
    }

    /// Coordinates in this space of every basis element of a subspace K_α,
    /// α ⪯ θ: the dim K_θ × dim K_α embedding matrix.
    pub fn embed_subspace(&self, sub: &ModelSpace) -> Result<CMat> {
        let mut m = CMat::zeros(self.dim(), sub.dim());
        for (j, e) in sub.basis().iter().enumerate() {
            let c = self.coords(e)?;
            m.set_column(j, &c);
        }
        Ok(m)
    }
}

/// The shifted model space K_{α,θ} = K_θ ∩ αH⁺ = α·K_{ᾱθ} together with the
/// matrix of P_{α,θ} on K_θ coordinates.
#[derive(Clone, Debug)]
pub struct ShiftedSpace {
    pub basis: Vec<Rational>,
    pub projection: CMat,
    /// sampled disagreement between the P_θ−P_α and αP_{ᾱθ}ᾱ forms
    pub forms_residual: f64,
}

pub fn shifted_space(alpha: &InnerFunction, space: &ModelSpace) -> Result<ShiftedSpace> {
    let theta = space.theta();
    if !alpha.divides(theta)? {
        return Err(Error::NotADivisor(format!(
            "alpha (degree {}) does not divide theta (degree {})",
            alpha.degree(),
            theta.degree()
        )));
    }
    let theta_tilde = InnerFunction::divide_exact(theta, alpha)?;
    let n = space.dim();

    // basis: α · (basis of K_{ᾱθ})
    let alpha_rat = alpha.as_rational();
    let mut basis = Vec::new();
    if theta_tilde.degree() > 0 {
        let tilde_space = ModelSpace::new(&theta_tilde)?;
        for e in tilde_space.basis() {
            basis.push(alpha_rat.mul(e));
        }
    }

    // form (24): P_{α,θ} = P_θ − P_α, columnwise on the K_θ basis
    let mut proj24 = CMat::zeros(n, n);
    // form (25): P_{α,θ} = α P_{ᾱθ} ᾱ
    let mut proj25 = CMat::zeros(n, n);
    let alpha_conj = alpha.conj_rational();
    let mut forms_residual = 0.0f64;
    for (j, e) in space.basis().iter().enumerate() {
        let (pa, _) = p_theta(alpha, e)?;
        let diff24 = e.sub(&pa);
        proj24.set_column(j, &space.coords(&diff24)?);

        let inner = if theta_tilde.degree() == 0 {
            Rational::zero()
        } else {
            let (pt, _) = p_theta(&theta_tilde, &alpha_conj.mul(e))?;
            alpha_rat.mul(&pt)
        };
        proj25.set_column(j, &space.coords(&inner)?);
        forms_residual = forms_residual.max(diff24.max_diff_on_samples(&inner));
    }
    forms_residual = forms_residual.max((&proj24 - &proj25).norm());
    Ok(ShiftedSpace {
        basis,
        projection: proj24,
        forms_residual,
    })
}
