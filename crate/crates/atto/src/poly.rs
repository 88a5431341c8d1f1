//! Dense univariate polynomials over ℂ.
//!
//! Coefficients are stored in ascending degree order; the representation is
//! canonical: empty vector for the zero polynomial, nonzero last coefficient
//! otherwise. Trailing coefficients that are negligible relative to the
//! largest one are trimmed, which keeps degrees honest after near-exact
//! cancellations (e.g. symbols that are bounded only because their leading
//! terms cancel).

use num_complex::Complex64 as C;

/// Relative threshold below which a trailing coefficient is considered an
/// artifact of rounding and trimmed.
const TRIM_REL: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<C>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(C::new(1.0, 0.0))
    }

    pub fn constant(c: C) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Poly::from_coeffs(vec![C::new(0.0, 0.0), C::new(1.0, 0.0)])
    }

    /// The linear factor (x − z).
    pub fn linear(z: C) -> Self {
        Poly::from_coeffs(vec![-z, C::new(1.0, 0.0)])
    }

    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    /// Monic product Π (x − zⱼ), with multiplicities.
    pub fn from_roots(roots: &[(C, usize)]) -> Self {
        let mut p = Poly::one();
        for &(z, m) in roots {
            let f = Poly::linear(z);
            for _ in 0..m {
                p = p.mul(&f);
            }
        }
        p
    }

    fn normalize(&mut self) {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            if !scale.is_finite() {
                // keep as is; callers will surface NaNs through comparisons
                return;
            }
            self.coeffs.clear();
            return;
        }
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= TRIM_REL * scale {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the convention deg 0 for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).copied().unwrap_or(C::new(0.0, 0.0))
    }

    pub fn leading(&self) -> C {
        self.coeffs.last().copied().unwrap_or(C::new(0.0, 0.0))
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * C::new(k as f64, 0.0))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![C::new(0.0, 0.0); n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeff(k) + other.coeff(k);
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&c| -c).collect())
    }

    pub fn scale(&self, s: C) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![C::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (j, &a) in self.coeffs.iter().enumerate() {
            for (k, &b) in other.coeffs.iter().enumerate() {
                coeffs[j + k] += a * b;
            }
        }
        Poly::from_coeffs(coeffs)
    }

    /// Long division: returns (quotient, remainder) with deg rem < deg divisor.
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dn = divisor.coeffs.len();
        let lead = divisor.leading();
        let qn = rem.len() - dn + 1;
        let mut quot = vec![C::new(0.0, 0.0); qn];
        for k in (0..qn).rev() {
            let q = rem[k + dn - 1] / lead;
            quot[k] = q;
            for j in 0..dn {
                rem[k + j] -= q * divisor.coeffs[j];
            }
        }
        rem.truncate(dn - 1);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Synthetic division by (x − z); returns the deflated quotient, ignoring
    /// the (assumed negligible) remainder.
    pub fn deflate(&self, z: C) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let n = self.coeffs.len() - 1;
        let mut quot = vec![C::new(0.0, 0.0); n];
        let mut carry = C::new(0.0, 0.0);
        for k in (0..n).rev() {
            carry = self.coeffs[k + 1] + carry * z;
            quot[k] = carry;
        }
        Poly::from_coeffs(quot)
    }

    /// First `count` Taylor coefficients at `z`: returns [p(z), p′(z)/1!, …].
    pub fn taylor_at(&self, z: C, count: usize) -> Vec<C> {
        // Repeated synthetic division; the successive remainders are the
        // coefficients of p(x + z).
        let mut out = Vec::with_capacity(count);
        let mut work = self.coeffs.clone();
        for _ in 0..count {
            if work.is_empty() {
                out.push(C::new(0.0, 0.0));
                continue;
            }
            let mut carry = C::new(0.0, 0.0);
            for c in work.iter_mut().rev() {
                carry = *c + carry * z;
                *c = carry;
            }
            out.push(work.remove(0));
        }
        out
    }

    /// Coefficient-wise complex conjugation; on the real axis this realizes
    /// p*(x) = conj(p(conj x)).
    pub fn conj_coeffs(&self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Multiply by the scalar making the polynomial monic.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(C::new(1.0, 0.0) / self.leading())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn eval_and_arith() {
        // p = 1 + 2x + x^2 = (x+1)^2
        let p = Poly::from_coeffs(vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert_abs_diff_eq!(p.eval(c(1.0, 0.0)).re, 4.0, epsilon = 1e-14);
        let q = Poly::linear(c(-1.0, 0.0)); // x + 1
        assert_eq!(q.mul(&q).degree(), 2);
        let (quot, rem) = p.divrem(&q);
        assert!(rem.is_zero());
        assert_abs_diff_eq!(quot.eval(c(0.0, 0.0)).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn taylor_shift() {
        // p = x^3 at z = 1: coefficients of (x+1)^3 = 1 + 3x + 3x^2 + x^3
        let p = Poly::from_coeffs(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let t = p.taylor_at(c(1.0, 0.0), 4);
        let expect = [1.0, 3.0, 3.0, 1.0];
        for (a, b) in t.iter().zip(expect) {
            assert_abs_diff_eq!(a.re, b, epsilon = 1e-13);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn deflate_removes_root() {
        let z = c(0.5, 2.0);
        let p = Poly::from_roots(&[(z, 1), (c(-1.0, 0.0), 2)]);
        let q = p.deflate(z);
        assert_eq!(q.degree(), 2);
        assert!(q.eval(c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn trims_cancelled_leading_terms() {
        let p = Poly::from_coeffs(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let q = Poly::from_coeffs(vec![c(2.0, 0.0), c(1.0, 0.0) + c(1e-16, 0.0)]);
        let d = p.sub(&q);
        assert_eq!(d.degree(), 0);
    }
}
