//! Disc ↔ half-plane transfer at p = 2: the Cayley maps
//! m(z) = i(1−z)/(1+z), m⁻¹(ξ) = (i−ξ)/(i+ξ), the isometric isomorphism
//! (Vf)(ξ) = π^{−1/2}(i+ξ)^{−1} f(m⁻¹(ξ)), conformal transfer of inner
//! functions and symbols, and the commuting-square check intertwining an
//! ATTO on the disc with its half-plane transfer.
//!
//! Disc inner products are normalized as (1/2π)∫₀^{2π} f ḡ dφ, so ‖1‖ = 1
//! matches ‖e₀‖² = ∫ dξ/(π(1+ξ²)) = 1 and V is an exact isometry. Only
//! p = 2 is implemented; for p ≠ 2 the splitting is not mapped term-wise
//! and no unitary equivalence is available.
//!
//! Disc model-space bases: a zero z ≠ 0 of multiplicity m contributes
//! (1−z̄ζ)^{−k}, k = 1..m; a zero at the origin contributes ζ^{k−1}
//! (the Szegő-kernel powers degenerate to polynomials there).

use crate::error::{Error, Result};
use crate::inner::{Domain, InnerFunction};
use crate::numeric::{self, CMat, CVec, Chol};
use crate::poly::Poly;
use crate::rational::Rational;
use num_complex::Complex64 as C;

const BOUNDARY_TOL: f64 = 1e-8;

fn ci() -> C {
    C::new(0.0, 1.0)
}

pub fn cayley(z: C) -> C {
    ci() * (C::new(1.0, 0.0) - z) / (C::new(1.0, 0.0) + z)
}

pub fn cayley_inv(xi: C) -> C {
    (ci() - xi) / (ci() + xi)
}

/// f ∘ μ with μ = (aξ+b)/(cξ+d), c ≠ 0. The numerator is homogenized; the
/// denominator's roots are tracked analytically (poles map to μ⁻¹(ρ), and
/// −d/c picks up the degree deficit), so multiple poles survive exactly.
fn compose_mobius(f: &Rational, a: C, b: C, c: C, d: C) -> Result<Rational> {
    let dn = f.num().degree();
    let dd = f.den().degree();
    let n = dn.max(dd);
    let lin1 = Poly::from_coeffs(vec![b, a]);
    let lin2 = Poly::from_coeffs(vec![d, c]);
    let expand = |p: &Poly| -> Poly {
        let mut acc = Poly::zero();
        for k in 0..=n {
            let ck = p.coeff(k);
            if ck.norm() == 0.0 {
                continue;
            }
            let mut term = Poly::constant(ck);
            for _ in 0..k {
                term = term.mul(&lin1);
            }
            for _ in 0..(n - k) {
                term = term.mul(&lin2);
            }
            acc = acc.add(&term);
        }
        acc
    };
    let num = expand(f.num());
    let mut den_roots: Vec<(C, usize)> = Vec::new();
    for &(rho, m) in f.poles() {
        let t = a - rho * c;
        if t.norm() <= 1e-9 * (a.norm() + (rho * c).norm() + 1.0) {
            return Err(Error::InvalidParam(
                "pole maps to ∞ under the Möbius change of variable".into(),
            ));
        }
        den_roots.push(((rho * d - b) / t, m));
    }
    if n > dd {
        den_roots.push((-d / c, n - dd));
    }
    // leading coefficient of (cξ+d)^n·den(μ(ξ)) is cⁿ·den(a/c)
    let lead = c.powu(n as u32) * f.den().eval(a / c);
    Ok(Rational::with_poles(num.scale(C::new(1.0, 0.0) / lead), den_roots))
}

/// (Vf)(ξ) = π^{−1/2}(i+ξ)^{−1}·f(m⁻¹(ξ)) for rational f on the disc.
pub fn v_map(f_disc: &Rational) -> Result<Rational> {
    for (p, _) in f_disc.poles() {
        if (p.norm() - 1.0).abs() <= BOUNDARY_TOL {
            return Err(Error::PoleOnBoundary(format!("{p}")));
        }
    }
    // m⁻¹(ξ) = (−ξ+i)/(ξ+i)
    let composed = compose_mobius(f_disc, -C::new(1.0, 0.0), ci(), C::new(1.0, 0.0), ci())?;
    let weight = Rational::pole(C::new(0.0, -1.0), 1)
        .scale(C::new(1.0 / std::f64::consts::PI.sqrt(), 0.0));
    Ok(composed.mul(&weight))
}

/// g ∘ m⁻¹: transfer of a symbol (or any rational) to the half-plane.
pub fn transfer_rational(g_disc: &Rational) -> Result<Rational> {
    compose_mobius(g_disc, -C::new(1.0, 0.0), ci(), C::new(1.0, 0.0), ci())
}

/// Half-plane inner function Θ = θ∘m⁻¹: zeros map to m(zⱼ), multiplicities
/// are preserved and the phase is matched pointwise on the boundary.
pub fn transfer_inner(theta_disc: &InnerFunction) -> Result<InnerFunction> {
    if theta_disc.domain() != Domain::Disc {
        return Err(Error::InvalidParam("transfer_inner expects disc data".into()));
    }
    let zeros: Vec<(C, usize)> = theta_disc
        .zeros()
        .iter()
        .map(|z| (cayley(z.location), z.multiplicity))
        .collect();
    let plain = InnerFunction::from_zero_list(Domain::HalfPlane, &zeros, C::new(1.0, 0.0))?;
    // match value at ξ = 0 (boundary of both domains: m⁻¹(0) = 1)
    let want = theta_disc.evaluate(cayley_inv(C::new(0.0, 0.0)))?;
    let have = plain.evaluate(C::new(0.0, 0.0))?;
    let phase = want / have;
    InnerFunction::from_zero_list(Domain::HalfPlane, &zeros, phase)
}

/// conj(g(1/ζ̄)): equals the pointwise conjugate on |ζ| = 1. Poles reflect
/// to 1/ρ̄ (poles at the origin escape to ∞ and feed the numerator degree).
pub fn disc_reflect(g: &Rational) -> Rational {
    if g.is_zero() {
        return Rational::zero();
    }
    let dn = g.num().degree();
    let dd = g.den().degree();
    let rcnum = Poly::from_coeffs((0..=dn).rev().map(|k| g.num().coeff(k).conj()).collect());
    // Π(1−ρ̄ζ)^m = lead·Π(ζ−1/ρ̄)^m over the nonzero poles
    let mut den_roots: Vec<(C, usize)> = Vec::new();
    let mut lead = C::new(1.0, 0.0);
    for &(rho, m) in g.poles() {
        if rho.norm() < 1e-14 {
            // 1/ζ^m reflects to ζ^m; the power is carried by the shift below
            continue;
        }
        den_roots.push((C::new(1.0, 0.0) / rho.conj(), m));
        lead *= (-rho.conj()).powu(m as u32);
    }
    let mut out = Rational::with_poles(rcnum.scale(C::new(1.0, 0.0) / lead), den_roots);
    // the exact prefactor is ζ^{dd−dn} (dd counts origin poles too)
    let shift = dd as i64 - dn as i64;
    if shift >= 0 {
        let mut p = Poly::one();
        for _ in 0..shift {
            p = p.mul(&Poly::x());
        }
        out = out.mul(&Rational::from_poly(p));
    } else {
        out = out.mul(&Rational::pole(C::new(0.0, 0.0), (-shift) as usize));
    }
    out
}

/// (1/2π)∫ f ḡ dφ on the circle, as the residue sum of f·(disc_reflect g)/ζ
/// over the poles inside the open disc.
pub fn disc_inner(f: &Rational, g: &Rational) -> Result<C> {
    let h = f
        .mul(&disc_reflect(g))
        .mul(&Rational::pole(C::new(0.0, 0.0), 1));
    if h.is_zero() {
        return Ok(C::new(0.0, 0.0));
    }
    for (p, _) in h.poles() {
        if (p.norm() - 1.0).abs() <= BOUNDARY_TOL {
            return Err(Error::PoleOnBoundary(format!("{p}")));
        }
    }
    let (_, terms) = h.partial_fractions();
    let mut acc = C::new(0.0, 0.0);
    for (z, m, term) in terms {
        if z.norm() < 1.0 {
            // residue = coefficient of (ζ−z)^{−1}
            let taylor = term.num().taylor_at(z, m);
            acc += taylor[m - 1];
        }
    }
    Ok(acc)
}

/// Disc Riesz split: H² part (polynomial part + poles outside the disc) and
/// the conj(H²₀) part (poles inside, vanishing at ∞).
pub fn disc_split(f: &Rational) -> Result<(Rational, Rational)> {
    for (p, _) in f.poles() {
        if (p.norm() - 1.0).abs() <= BOUNDARY_TOL {
            return Err(Error::PoleOnBoundary(format!("{p}")));
        }
    }
    let (q, terms) = f.partial_fractions();
    let mut plus = Rational::from_poly(q);
    let mut minus = Rational::zero();
    for (z, _, term) in terms {
        if z.norm() < 1.0 {
            minus = minus.add(&term);
        } else {
            plus = plus.add(&term);
        }
    }
    Ok((plus, minus))
}

/// Disc model-space projection P_θ = θ·P⁻[θ̄·P⁺f].
pub fn disc_p_theta(theta: &InnerFunction, f: &Rational) -> Result<Rational> {
    if theta.is_constant() {
        return Ok(Rational::zero());
    }
    let th = theta.as_rational();
    let thc = disc_reflect(&th);
    let (fp, _) = disc_split(f)?;
    let (_, inner_minus) = disc_split(&thc.mul(&fp))?;
    Ok(th.mul(&inner_minus))
}

/// K_θ on the disc with its Gram data.
#[derive(Clone, Debug)]
pub struct DiscModelSpace {
    theta: InnerFunction,
    basis: Vec<Rational>,
    gram: CMat,
    chol: Chol,
}

impl DiscModelSpace {
    pub fn new(theta: &InnerFunction) -> Result<Self> {
        if theta.domain() != Domain::Disc {
            return Err(Error::InvalidParam("disc inner function required".into()));
        }
        if theta.degree() == 0 {
            return Err(Error::DegenerateSpace);
        }
        let mut basis = Vec::new();
        for z in theta.zeros() {
            let w = z.location;
            for k in 1..=z.multiplicity {
                let raw = if w.norm() == 0.0 {
                    let mut p = Poly::one();
                    for _ in 0..k - 1 {
                        p = p.mul(&Poly::x());
                    }
                    Rational::from_poly(p)
                } else {
                    // (1−w̄ζ)^{−k} = (−1/w̄)^k (ζ−1/w̄)^{−k}
                    let pole = C::new(1.0, 0.0) / w.conj();
                    let coef = (-C::new(1.0, 0.0) / w.conj()).powu(k as u32);
                    Rational::pole(pole, k).scale(coef)
                };
                let n2 = disc_inner(&raw, &raw)?.re;
                basis.push(raw.scale(C::new(1.0 / n2.sqrt(), 0.0)));
            }
        }
        let n = basis.len();
        let mut gram = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] = disc_inner(&basis[j], &basis[i])?;
            }
        }
        let chol = numeric::cholesky(&gram)?;
        Ok(DiscModelSpace {
            theta: theta.clone(),
            basis,
            gram,
            chol,
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

    pub fn coords(&self, f: &Rational) -> Result<CVec> {
        let n = self.dim();
        let mut b = CVec::zeros(n);
        for i in 0..n {
            b[i] = disc_inner(f, &self.basis[i])?;
        }
        Ok(self.chol.solve(&b))
    }
}

/// Residuals from the commuting square V A_g^{α,θ} = A_G^{𝒜,Θ} V together
/// with the projection intertwining P_𝒜 V = V P_α and the K_Θ membership of
/// the mapped basis.
#[derive(Clone, Debug)]
pub struct DiagramReport {
    pub diagram_residual: f64,
    pub intertwine_residual: f64,
    pub membership_residual: f64,
}

pub fn diagram_check(
    g_disc: &Rational,
    alpha_disc: &InnerFunction,
    theta_disc: &InnerFunction,
) -> Result<DiagramReport> {
    let theta_space = DiscModelSpace::new(theta_disc)?;
    let alpha_space = if alpha_disc.degree() > 0 {
        Some(DiscModelSpace::new(alpha_disc)?)
    } else {
        None
    };
    let alpha_hp = transfer_inner(alpha_disc)?;
    let theta_hp = transfer_inner(theta_disc)?;
    let g_hp = transfer_rational(g_disc)?;
    let alpha_hp_space = if alpha_hp.degree() > 0 {
        Some(crate::modelspace::ModelSpace::new(&alpha_hp)?)
    } else {
        None
    };
    let theta_hp_space = crate::modelspace::ModelSpace::new(&theta_hp)?;

    // projections via the Gram systems (orthogonal at p = 2), which keeps
    // the comparison at residue-calculus accuracy
    let disc_project = |space: &Option<DiscModelSpace>, f: &Rational| -> Result<Rational> {
        match space {
            None => Ok(Rational::zero()),
            Some(s) => {
                let coords = s.coords(f)?;
                let mut acc = Rational::zero();
                for (k, e) in s.basis().iter().enumerate() {
                    acc = acc.add(&e.scale(coords[k]));
                }
                Ok(acc)
            }
        }
    };
    let hp_project = |space: &Option<crate::modelspace::ModelSpace>,
                      factors: &[&Rational]|
     -> Result<Rational> {
        match space {
            None => Ok(Rational::zero()),
            Some(s) => {
                let mut b = crate::numeric::CVec::zeros(s.dim());
                for (i, ei) in s.basis().iter().enumerate() {
                    b[i] = crate::rational::l2_inner_factors(factors, ei, 1e-8)?;
                }
                Ok(s.element(&s.chol().solve(&b)))
            }
        }
    };

    let rel = |a: &Rational, b: &Rational| -> f64 {
        a.max_diff_on_samples(b) / (1.0 + a.sup_on_samples().max(b.sup_on_samples()))
    };

    let theta_hp_opt = Some(theta_hp_space);
    let mut diagram_residual = 0.0f64;
    let mut intertwine_residual = 0.0f64;
    let mut membership_residual = 0.0f64;
    for e in theta_space.basis() {
        // down-then-across: V P_α (g e)
        let disc_img = disc_project(&alpha_space, &g_disc.mul(e))?;
        let lhs = v_map(&disc_img)?;
        // across-then-down: P_𝒜 (G · V e)
        let ve = v_map(e)?;
        let rhs = hp_project(&alpha_hp_space, &[&g_hp, &ve])?;
        diagram_residual = diagram_residual.max(rel(&lhs, &rhs));

        // intertwining on the same vectors
        let pv = hp_project(&alpha_hp_space, &[&ve])?;
        let vp = v_map(&disc_project(&alpha_space, e)?)?;
        intertwine_residual = intertwine_residual.max(rel(&pv, &vp));

        // V maps K_θ into K_Θ
        let proj = hp_project(&theta_hp_opt, &[&ve])?;
        membership_residual = membership_residual.max(rel(&proj, &ve));
    }
    Ok(DiagramReport {
        diagram_residual,
        intertwine_residual,
        membership_residual,
    })
}
