//! Finite Blaschke products on the half-plane and the disc.
//!
//! An inner function is stored as its zero multiset together with a
//! unimodular phase; all arithmetic (product, exact division, GCD, the
//! divisibility order ⪯) happens on the multisets, so divisibility questions
//! never involve root finding. Half-plane zeros live in ℂ⁺, disc zeros in 𝔻.
//!
//! Elementary factors: b_w(ξ) = (ξ−w)/(ξ−w̄) on the half-plane and
//! (|w|/w)·(w−ζ)/(1−w̄ζ) on the disc, with the factor for a zero at the
//! origin taken as ζ. Both are unimodular on their boundary.

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tol::{TAU_UNIMOD, TAU_ZERO};
use num_complex::Complex64 as C;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    HalfPlane,
    Disc,
}

#[derive(Clone, Copy, Debug)]
pub struct BlaschkeZero {
    pub location: C,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct InnerFunction {
    domain: Domain,
    zeros: Vec<BlaschkeZero>,
    phase: C,
}

fn one() -> C {
    C::new(1.0, 0.0)
}

impl InnerFunction {
    pub fn new(domain: Domain, zeros: Vec<BlaschkeZero>, phase: C) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > TAU_UNIMOD {
            return Err(Error::InvalidParam(format!(
                "phase {phase} is not unimodular"
            )));
        }
        for z in &zeros {
            if z.multiplicity == 0 {
                return Err(Error::InvalidParam("zero with multiplicity 0".into()));
            }
            let interior = match domain {
                Domain::HalfPlane => z.location.im > 0.0,
                Domain::Disc => z.location.norm() < 1.0,
            };
            if !interior {
                return Err(Error::InvalidParam(format!(
                    "zero {} is not strictly interior",
                    z.location
                )));
            }
        }
        let mut f = InnerFunction {
            domain,
            zeros,
            phase,
        };
        f.canonicalize();
        Ok(f)
    }

    pub fn identity(domain: Domain) -> Self {
        InnerFunction {
            domain,
            zeros: Vec::new(),
            phase: one(),
        }
    }

    /// Single elementary factor with a zero at `w`.
    pub fn elementary(domain: Domain, w: C) -> Result<Self> {
        InnerFunction::new(
            domain,
            vec![BlaschkeZero {
                location: w,
                multiplicity: 1,
            }],
            one(),
        )
    }

    pub fn from_zero_list(domain: Domain, zeros: &[(C, usize)], phase: C) -> Result<Self> {
        InnerFunction::new(
            domain,
            zeros
                .iter()
                .map(|&(z, m)| BlaschkeZero {
                    location: z,
                    multiplicity: m,
                })
                .collect(),
            phase,
        )
    }

    fn canonicalize(&mut self) {
        // merge zeros closer than TAU_ZERO, multiplicity-weighted centroid
        let mut merged: Vec<BlaschkeZero> = Vec::new();
        for z in self.zeros.drain(..) {
            if let Some(hit) = merged
                .iter_mut()
                .find(|m| (m.location - z.location).norm() <= TAU_ZERO)
            {
                let total = hit.multiplicity + z.multiplicity;
                hit.location = (hit.location * hit.multiplicity as f64
                    + z.location * z.multiplicity as f64)
                    / total as f64;
                hit.multiplicity = total;
            } else {
                merged.push(z);
            }
        }
        merged.sort_by(|a, b| {
            (a.location.re, a.location.im)
                .partial_cmp(&(b.location.re, b.location.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        self.zeros = merged;
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn zeros(&self) -> &[BlaschkeZero] {
        &self.zeros
    }

    pub fn phase(&self) -> C {
        self.phase
    }

    pub fn degree(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Evaluate the Blaschke product; analytic continuation off the boundary
    /// is fine as long as `z` avoids the poles (reflected zeros).
    pub fn evaluate(&self, z: C) -> Result<C> {
        let mut acc = self.phase;
        for bz in &self.zeros {
            let w = bz.location;
            let factor = match self.domain {
                Domain::HalfPlane => {
                    let den = z - w.conj();
                    if den.norm() <= 1e-13 * (1.0 + z.norm()) {
                        return Err(Error::PoleAtPoint(format!("{z}")));
                    }
                    (z - w) / den
                }
                Domain::Disc => {
                    if w.norm() == 0.0 {
                        z
                    } else {
                        let den = one() - w.conj() * z;
                        if den.norm() <= 1e-13 * (1.0 + z.norm()) {
                            return Err(Error::PoleAtPoint(format!("{z}")));
                        }
                        (w.norm() / w) * (w - z) / den
                    }
                }
            };
            for _ in 0..bz.multiplicity {
                acc *= factor;
            }
        }
        Ok(acc)
    }

    pub fn multiply(&self, other: &InnerFunction) -> Result<InnerFunction> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let mut zeros = self.zeros.clone();
        zeros.extend(other.zeros.iter().copied());
        InnerFunction::new(self.domain, zeros, self.phase * other.phase)
    }

    /// The divisibility order: α ⪯ θ iff every zero of α occurs in θ with at
    /// least the same multiplicity (matched within τ_zero).
    pub fn divides(&self, theta: &InnerFunction) -> Result<bool> {
        if self.domain != theta.domain {
            return Err(Error::DomainMismatch);
        }
        for z in &self.zeros {
            let avail = theta
                .zeros
                .iter()
                .find(|t| (t.location - z.location).norm() <= TAU_ZERO)
                .map(|t| t.multiplicity)
                .unwrap_or(0);
            if avail < z.multiplicity {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// θ̃ with θ = α·θ̃ (zero multiset difference, phase quotient).
    pub fn divide_exact(theta: &InnerFunction, alpha: &InnerFunction) -> Result<InnerFunction> {
        if theta.domain != alpha.domain {
            return Err(Error::DomainMismatch);
        }
        let mut zeros = theta.zeros.clone();
        for z in &alpha.zeros {
            let hit = zeros
                .iter_mut()
                .find(|t| (t.location - z.location).norm() <= TAU_ZERO);
            match hit {
                Some(t) if t.multiplicity >= z.multiplicity => {
                    t.multiplicity -= z.multiplicity;
                }
                _ => {
                    return Err(Error::NotADivisor(format!(
                        "zero {} of the divisor exceeds the dividend",
                        z.location
                    )))
                }
            }
        }
        zeros.retain(|z| z.multiplicity > 0);
        InnerFunction::new(theta.domain, zeros, theta.phase / alpha.phase)
    }

    /// Blaschke product over the common zeros with minimum multiplicities;
    /// phase normalized to 1.
    pub fn gcd(&self, other: &InnerFunction) -> Result<InnerFunction> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let mut zeros = Vec::new();
        for z in &self.zeros {
            if let Some(t) = other
                .zeros
                .iter()
                .find(|t| (t.location - z.location).norm() <= TAU_ZERO)
            {
                zeros.push(BlaschkeZero {
                    location: (z.location + t.location) * 0.5,
                    multiplicity: z.multiplicity.min(t.multiplicity),
                });
            }
        }
        InnerFunction::new(self.domain, zeros, one())
    }

    /// Expanded numerator/denominator form. On the half-plane this is
    /// phase·Π(ξ−z)^m / Π(ξ−z̄)^m; on the disc the factors are normalized to
    /// a monic denominator with poles at the reflected points 1/z̄.
    pub fn as_rational(&self) -> Rational {
        let mut scale = self.phase;
        let mut zeros: Vec<(C, usize)> = Vec::new();
        let mut poles: Vec<(C, usize)> = Vec::new();
        for z in &self.zeros {
            let w = z.location;
            let m = z.multiplicity;
            match self.domain {
                Domain::HalfPlane => {
                    zeros.push((w, m));
                    poles.push((w.conj(), m));
                }
                Domain::Disc => {
                    if w.norm() == 0.0 {
                        zeros.push((C::new(0.0, 0.0), m));
                    } else {
                        // (|w|/w)(w−ζ)/(1−w̄ζ) = (1/|w|)(ζ−w)/(ζ−1/w̄)
                        for _ in 0..m {
                            scale *= C::new(1.0 / w.norm(), 0.0);
                        }
                        zeros.push((w, m));
                        poles.push((one() / w.conj(), m));
                    }
                }
            }
        }
        Rational::factored(scale, zeros, poles)
    }

    /// The boundary conjugate θ̄ as a rational function (equals 1/θ on the
    /// boundary, with poles at the zeros of θ).
    pub fn conj_rational(&self) -> Rational {
        self.as_rational().conj_reflect()
    }

    /// Non-tangential limit at ∞ (half-plane): every elementary factor tends
    /// to 1, so the limit is the phase.
    pub fn value_at_infinity(&self) -> C {
        self.phase
    }

    /// All divisors of θ, enumerated from zero sub-multisets, phases 1.
    /// Π(mⱼ+1) entries, identity and θ itself included.
    pub fn all_divisors(&self) -> Vec<InnerFunction> {
        let mut out = vec![InnerFunction::identity(self.domain)];
        for z in &self.zeros {
            let mut next = Vec::with_capacity(out.len() * (z.multiplicity + 1));
            for base in &out {
                for m in 0..=z.multiplicity {
                    let mut zeros = base.zeros.clone();
                    if m > 0 {
                        zeros.push(BlaschkeZero {
                            location: z.location,
                            multiplicity: m,
                        });
                    }
                    next.push(InnerFunction {
                        domain: self.domain,
                        zeros,
                        phase: one(),
                    });
                }
            }
            out = next;
        }
        for f in &mut out {
            f.canonicalize();
        }
        out
    }
}

/// The elementary factor r(ξ) = (ξ−i)/(ξ+i).
pub fn r_inner() -> InnerFunction {
    InnerFunction::elementary(Domain::HalfPlane, C::new(0.0, 1.0)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn b(im: f64) -> InnerFunction {
        InnerFunction::elementary(Domain::HalfPlane, c(0.0, im)).unwrap()
    }

    #[test]
    fn evaluate_r() {
        let r = r_inner();
        assert!((r.evaluate(c(0.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-14);
        assert!(r.evaluate(c(0.0, 1.0)).unwrap().norm() < 1e-14);
        assert!((r.evaluate(c(0.0, 2.0)).unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!(r.evaluate(c(0.0, -1.0)).is_err());
    }

    #[test]
    fn unimodular_on_boundary() {
        let f = InnerFunction::from_zero_list(
            Domain::HalfPlane,
            &[(c(0.4, 1.3), 2), (c(-1.7, 0.6), 1)],
            C::new(0.6, 0.8),
        )
        .unwrap();
        for k in 0..100 {
            let x = -23.0 + 0.47 * k as f64;
            let v = f.evaluate(c(x, 0.0)).unwrap();
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-9);
        }
        let d = InnerFunction::from_zero_list(
            Domain::Disc,
            &[(c(0.3, -0.2), 1), (c(0.0, 0.0), 2)],
            one(),
        )
        .unwrap();
        for k in 0..50 {
            let t = 0.13 * k as f64;
            let v = d.evaluate(C::from_polar(1.0, t)).unwrap();
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn product_division_gcd() {
        let bi = b(1.0);
        let b2 = b(2.0);
        let b3 = b(3.0);
        let p = bi.multiply(&bi).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.zeros().len(), 1);
        assert_eq!(p.zeros()[0].multiplicity, 2);

        let id = InnerFunction::identity(Domain::HalfPlane);
        assert_eq!(bi.multiply(&id).unwrap().degree(), 1);
        assert_eq!(bi.multiply(&b2).unwrap().degree(), 2);

        let t = bi.multiply(&b2).unwrap();
        let q = InnerFunction::divide_exact(&t, &bi).unwrap();
        assert_eq!(q.degree(), 1);
        assert!((q.zeros()[0].location - c(0.0, 2.0)).norm() < 1e-12);
        assert_eq!(InnerFunction::divide_exact(&t, &t).unwrap().degree(), 0);
        let sq = bi.multiply(&bi).unwrap();
        assert_eq!(InnerFunction::divide_exact(&sq, &bi).unwrap().degree(), 1);
        assert!(InnerFunction::divide_exact(&b2, &sq).is_err());

        let g = bi.multiply(&b2).unwrap().gcd(&bi.multiply(&b3).unwrap()).unwrap();
        assert_eq!(g.degree(), 1);
        assert!(bi.gcd(&id).unwrap().is_constant());
        let cube = sq.multiply(&bi).unwrap();
        assert_eq!(sq.gcd(&cube).unwrap().degree(), 2);

        assert!(bi.divides(&t).unwrap());
        assert!(!b2.divides(&sq).unwrap());
        assert!(id.divides(&t).unwrap());
    }

    #[test]
    fn as_rational_matches_evaluate() {
        let r = r_inner();
        let rr = r.as_rational();
        // (ξ−i)/(ξ+i)
        assert_eq!(rr.num().degree(), 1);
        assert_eq!(rr.den().degree(), 1);
        for &x in crate::rational::SAMPLE_XS.iter() {
            let a = r.evaluate(c(x, 0.0)).unwrap();
            let b = rr.eval_real(x).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
        let id = InnerFunction::identity(Domain::HalfPlane);
        assert!(id.as_rational().approx_eq(&Rational::one(), 1e-14));
        let sq = b(1.0).multiply(&b(1.0)).unwrap();
        let sr = sq.as_rational();
        assert_eq!(sr.num().degree(), 2);
        assert_eq!(sr.poles(), &[(c(0.0, -1.0), 2)]);
        // disc factor spot check
        let d = InnerFunction::elementary(Domain::Disc, c(0.5, 0.0)).unwrap();
        let dr = d.as_rational();
        for k in 0..20 {
            let z = C::from_polar(0.7, 0.37 * k as f64);
            let a = d.evaluate(z).unwrap();
            let b = dr.eval(z).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn divisor_enumeration() {
        let t = b(1.0)
            .multiply(&b(1.0))
            .unwrap()
            .multiply(&b(2.0))
            .unwrap();
        let divs = t.all_divisors();
        assert_eq!(divs.len(), 6); // (2+1)(1+1)
        for d in &divs {
            assert!(d.divides(&t).unwrap());
        }
    }

    #[test]
    fn degree_adds_under_product() {
        let f = InnerFunction::from_zero_list(Domain::HalfPlane, &[(c(1.0, 1.0), 2)], one()).unwrap();
        let g = InnerFunction::from_zero_list(Domain::HalfPlane, &[(c(-1.0, 2.0), 3)], one()).unwrap();
        assert_eq!(f.multiply(&g).unwrap().degree(), 5);
    }

    fn one() -> C {
        C::new(1.0, 0.0)
    }
}
