//! Complex rational functions on the line: field arithmetic, Riesz
//! projections P± by partial fractions, the weighted L∞ splits, boundary
//! conjugation, and L²(ℝ) inner products by residue calculus with an
//! independent quadrature oracle.
//!
//! A `Rational` is kept in reduced form with a monic denominator that is
//! *exactly* the product over its cached roots; every operation rebuilds the
//! denominator from the root multiset, so partial fractions never have to
//! re-discover pole locations.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::roots::poly_roots_clustered;
use num_complex::Complex64 as C;

/// Relative threshold for cancelling a numerator value at a denominator root.
const CANCEL_REL: f64 = 1e-10;
/// Relative tolerance for merging near-identical poles coming from two operands.
const POLE_MERGE_REL: f64 = 1e-9;

/// Fixed real sample points used for value-level comparisons. Chosen away
/// from small rationals so that test data never puts a feature exactly on a
/// sample point.
pub const SAMPLE_XS: [f64; 21] = [
    -9.73, -7.31, -5.89, -4.47, -3.61, -2.83, -2.17, -1.51, -0.93, -0.41, 0.07, 0.53, 1.13, 1.79,
    2.39, 3.07, 3.83, 4.71, 6.13, 8.27, 10.91,
];

fn c0() -> C {
    C::new(0.0, 0.0)
}

fn c1() -> C {
    C::new(1.0, 0.0)
}

pub const I: C = C::new(0.0, 1.0);

#[derive(Clone, Debug)]
pub struct Rational {
    num: Poly,
    den: Poly,
    den_roots: Vec<(C, usize)>,
    /// numerator roots when known exactly from the construction (inner
    /// functions, Cauchy kernels, inverses); lets Laurent expansions use
    /// factored Taylor series instead of the expanded coefficients
    num_roots: Option<Vec<(C, usize)>>,
}

/// Outcome of the Riesz projection split `f = plus + minus + constant`,
/// where `plus` has poles only in ℂ⁻ (so is analytic in ℂ⁺ and decays) and
/// `minus` has poles only in ℂ⁺.
#[derive(Clone, Debug)]
pub struct RieszSplit {
    pub plus: Rational,
    pub minus: Rational,
    pub constant: C,
}

/// Which weighted decomposition of a bounded symbol to use:
/// variant `K13` weights by (ξ+i), variant `K14` by (ξ−i).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightVariant {
    K13,
    K14,
}

/// Half-plane selector for the weighted Hardy spaces λ±H±.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HardySign {
    Plus,
    Minus,
}

impl Rational {
    pub fn zero() -> Self {
        Rational {
            num: Poly::zero(),
            den: Poly::one(),
            den_roots: Vec::new(),
            num_roots: None,
        }
    }

    pub fn one() -> Self {
        Rational::constant(c1())
    }

    pub fn constant(v: C) -> Self {
        Rational {
            num: Poly::constant(v),
            den: Poly::one(),
            den_roots: Vec::new(),
            num_roots: Some(Vec::new()),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Rational {
            num: p,
            den: Poly::one(),
            den_roots: Vec::new(),
            num_roots: None,
        }
    }

    /// The variable ξ itself.
    pub fn xi() -> Self {
        Rational::from_poly(Poly::x())
    }

    /// 1/(ξ−z)^k.
    pub fn pole(z: C, k: usize) -> Self {
        Rational {
            num: Poly::one(),
            den: Poly::from_roots(&[(z, k)]),
            den_roots: vec![(z, k)],
            num_roots: Some(Vec::new()),
        }
    }

    /// Build from numerator and an explicit pole multiset (denominator is the
    /// monic product over the poles). Reduces common factors.
    pub fn with_poles(num: Poly, poles: Vec<(C, usize)>) -> Self {
        let mut r = Rational {
            num,
            den: Poly::from_roots(&poles),
            den_roots: poles,
            num_roots: None,
        };
        r.reduce();
        r
    }

    /// Build from a fully factored description: scale·Π(ξ−zⱼ)^m over the
    /// monic pole product. Keeps the numerator roots attached.
    pub fn factored(scale: C, zeros: Vec<(C, usize)>, poles: Vec<(C, usize)>) -> Self {
        let num = Poly::from_roots(&zeros).scale(scale);
        let mut r = Rational {
            num,
            den: Poly::from_roots(&poles),
            den_roots: poles,
            num_roots: Some(zeros),
        };
        r.reduce();
        r
    }

    /// Build from numerator and denominator polynomials; the denominator
    /// roots are located numerically.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if den.degree() == 0 {
            return Ok(Rational::from_poly(num.scale(c1() / den.coeff(0))));
        }
        let raw_roots = poly_roots_clustered(&den, 1e-30)?;
        let radius = raw_roots.iter().map(|(z, _)| z.norm()).fold(0.0, f64::max);
        let roots = poly_roots_clustered(&den, 1e-6 * (1.0 + radius))?;
        let lead = den.leading();
        Ok(Rational::with_poles(num.scale(c1() / lead), roots))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn poles(&self) -> &[(C, usize)] {
        &self.den_roots
    }

    fn num_scale_at(&self, z: C) -> f64 {
        let zn = z.norm();
        let mut s = 0.0;
        let mut p = 1.0;
        for c in self.num.coeffs() {
            s += c.norm() * p;
            p *= zn.max(1.0);
        }
        s.max(1e-300)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            self.den_roots.clear();
            self.num_roots = Some(Vec::new());
            return;
        }
        let mut roots = std::mem::take(&mut self.den_roots);
        if let Some(nroots) = self.num_roots.clone() {
            // factored numerator: cancellation is exact multiset intersection
            let mut nroots = nroots;
            for entry in roots.iter_mut() {
                let tol = 1e-9 * (1.0 + entry.0.norm());
                if let Some(hit) = nroots.iter_mut().find(|(w, _)| (*w - entry.0).norm() <= tol) {
                    let cancel = hit.1.min(entry.1);
                    hit.1 -= cancel;
                    entry.1 -= cancel;
                }
            }
            nroots.retain(|&(_, m)| m > 0);
            roots.retain(|&(_, m)| m > 0);
            let lead = self.num.leading();
            self.num = Poly::from_roots(&nroots).scale(lead);
            self.num_roots = Some(nroots);
            self.den = Poly::from_roots(&roots);
            self.den_roots = roots;
            return;
        }
        for entry in roots.iter_mut() {
            let (z, m) = *entry;
            let mut left = m;
            for _ in 0..m {
                let v = self.num.eval(z);
                if v.norm() <= CANCEL_REL * self.num_scale_at(z) {
                    self.num = self.num.deflate(z);
                    left -= 1;
                    if self.num.is_zero() {
                        break;
                    }
                } else {
                    break;
                }
            }
            entry.1 = left;
        }
        roots.retain(|&(_, m)| m > 0);
        if self.num.is_zero() {
            self.den = Poly::one();
            self.den_roots = Vec::new();
            self.num_roots = Some(Vec::new());
            return;
        }
        self.den = Poly::from_roots(&roots);
        self.den_roots = roots;
    }

    fn merge_pole_lists(a: &[(C, usize)], b: &[(C, usize)]) -> Vec<(C, usize)> {
        let mut out: Vec<(C, usize)> = a.to_vec();
        for &(z, m) in b {
            let tol = POLE_MERGE_REL * (1.0 + z.norm());
            if let Some(hit) = out.iter_mut().find(|(w, _)| (*w - z).norm() <= tol) {
                hit.1 += m;
            } else {
                out.push((z, m));
            }
        }
        out.sort_by(|x, y| {
            (x.0.re, x.0.im)
                .partial_cmp(&(y.0.re, y.0.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        out
    }

    pub fn add(&self, other: &Rational) -> Rational {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let roots = Self::merge_pole_lists(&self.den_roots, &other.den_roots);
        let mut r = Rational {
            num,
            den: Poly::from_roots(&roots),
            den_roots: roots,
            num_roots: None,
        };
        r.reduce();
        r
    }

    pub fn sub(&self, other: &Rational) -> Rational {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Rational {
        Rational {
            num: self.num.neg(),
            den: self.den.clone(),
            den_roots: self.den_roots.clone(),
            num_roots: self.num_roots.clone(),
        }
    }

    pub fn scale(&self, s: C) -> Rational {
        if s.norm() == 0.0 {
            return Rational::zero();
        }
        Rational {
            num: self.num.scale(s),
            den: self.den.clone(),
            den_roots: self.den_roots.clone(),
            num_roots: self.num_roots.clone(),
        }
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        if self.is_zero() || other.is_zero() {
            return Rational::zero();
        }
        let num = self.num.mul(&other.num);
        let num_roots = match (&self.num_roots, &other.num_roots) {
            (Some(a), Some(b)) => {
                let mut out = a.clone();
                out.extend(b.iter().copied());
                Some(out)
            }
            _ => None,
        };
        let roots = Self::merge_pole_lists(&self.den_roots, &other.den_roots);
        let mut r = Rational {
            num,
            den: Poly::from_roots(&roots),
            den_roots: roots,
            num_roots,
        };
        r.reduce();
        r
    }

    /// Multiplicative inverse; locates the numerator roots to become poles
    /// (or reuses them when the numerator is carried in factored form).
    pub fn inverse(&self) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.num.degree() == 0 {
            return Ok(Rational {
                num: self.den.scale(c1() / self.num.coeff(0)),
                den: Poly::one(),
                den_roots: Vec::new(),
                num_roots: Some(self.den_roots.clone()),
            });
        }
        let lead = self.num.leading();
        let roots = match &self.num_roots {
            Some(r) => r.clone(),
            None => {
                let raw = poly_roots_clustered(&self.num, 1e-30)?;
                let radius = raw.iter().map(|(z, _)| z.norm()).fold(0.0, f64::max);
                poly_roots_clustered(&self.num, 3e-5 * (1.0 + radius))?
            }
        };
        let mut out = Rational {
            num: self.den.scale(c1() / lead),
            den: Poly::from_roots(&roots),
            den_roots: roots,
            num_roots: Some(self.den_roots.clone()),
        };
        out.reduce();
        Ok(out)
    }

    pub fn div(&self, other: &Rational) -> Result<Rational> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Evaluate at a point off the poles. The denominator is evaluated from
    /// its factored form, which is exact given the cached roots.
    pub fn eval(&self, z: C) -> Result<C> {
        let mut d = c1();
        for &(w, m) in &self.den_roots {
            let factor = z - w;
            if factor.norm() <= 1e-12 * (1.0 + z.norm()) {
                return Err(Error::PoleAtPoint(format!("{z}")));
            }
            for _ in 0..m {
                d *= factor;
            }
        }
        Ok(self.num.eval(z) / d)
    }

    /// Evaluate at a real point.
    pub fn eval_real(&self, x: f64) -> Result<C> {
        self.eval(C::new(x, 0.0))
    }

    /// Boundary conjugate f*(ξ) := conj(f(conj ξ)); on ℝ this is the
    /// pointwise complex conjugate, and it swaps the pole half-planes.
    pub fn conj_reflect(&self) -> Rational {
        Rational {
            num: self.num.conj_coeffs(),
            den: self.den.conj_coeffs(),
            den_roots: self.den_roots.iter().map(|&(z, m)| (z.conj(), m)).collect(),
            num_roots: self
                .num_roots
                .as_ref()
                .map(|r| r.iter().map(|&(z, m)| (z.conj(), m)).collect()),
        }
    }

    /// Value at ∞: Some(0) for strictly proper, the leading ratio when
    /// degrees match, None when unbounded.
    pub fn value_at_infinity(&self) -> Option<C> {
        if self.is_zero() {
            return Some(c0());
        }
        let dn = self.num.degree();
        let dd = self.den.degree();
        if dn < dd {
            Some(c0())
        } else if dn == dd {
            Some(self.num.leading() / self.den.leading())
        } else {
            None
        }
    }

    /// Bounded on ℝ: no poles within `tau_real` of the axis and bounded at ∞.
    pub fn boundary_bounded(&self, tau_real: f64) -> bool {
        self.value_at_infinity().is_some()
            && self.den_roots.iter().all(|(z, _)| z.im.abs() > tau_real)
    }

    /// Partial-fraction coefficients a₀..a_{m−1} at the k-th pole, where
    /// f = Σⱼ aⱼ (ξ−z)^{j−m} + (regular part); a_{m−1} is the residue.
    fn pf_coeffs_at(&self, k: usize, proper_num: &Poly) -> Vec<C> {
        let (z, m) = self.den_roots[k];
        let others: Vec<(C, usize)> = self
            .den_roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &r)| r)
            .collect();
        let nt = proper_num.taylor_at(z, m);
        let dt = roots_taylor(&others, z, m);
        let mut a = vec![c0(); m];
        for j in 0..m {
            let mut acc = nt[j];
            for l in 0..j {
                acc -= a[l] * dt[j - l];
            }
            a[j] = acc / dt[0];
        }
        a
    }

    /// Denominator multiplicity at a point, matched essentially exactly
    /// (pole locations are carried through operations as identical floats).
    fn den_mult_at(&self, z: C) -> usize {
        let tol = 1e-12 * (1.0 + z.norm());
        self.den_roots
            .iter()
            .find(|(w, _)| (*w - z).norm() <= tol)
            .map(|&(_, m)| m)
            .unwrap_or(0)
    }

    /// Truncated Laurent expansion at `center`: returns (lead, coeffs) with
    /// f = Σⱼ coeffs[j]·(ξ−center)^{lead+j} + O((ξ−center)^{lead+count}).
    /// The deflated denominator is expanded directly from its root list, so
    /// no polynomial re-expansion enters.
    pub fn laurent_at(&self, center: C, count: usize) -> (i64, Vec<C>) {
        let k = self.den_mult_at(center);
        let tol = 1e-12 * (1.0 + center.norm());
        let defl: Vec<(C, usize)> = self
            .den_roots
            .iter()
            .filter(|(w, _)| (*w - center).norm() > tol)
            .copied()
            .collect();
        let nt = match &self.num_roots {
            Some(roots) => {
                let t = roots_taylor(roots, center, count);
                t.into_iter().map(|v| v * self.num.leading()).collect()
            }
            None => self.num.taylor_at(center, count),
        };
        let dt = roots_taylor(&defl, center, count);
        let mut series = vec![c0(); count];
        for j in 0..count {
            let mut acc = nt[j];
            for l in 0..j {
                acc -= series[l] * dt[j - l];
            }
            series[j] = acc / dt[0];
        }
        (-(k as i64), series)
    }

    /// Full partial-fraction data: the polynomial part and, per pole, the
    /// singular term Σⱼ aⱼ(ξ−z)^{j−m} assembled as a rational function.
    pub fn partial_fractions(&self) -> (Poly, Vec<(C, usize, Rational)>) {
        let (q, rem) = self.num.divrem(&self.den);
        let mut terms = Vec::with_capacity(self.den_roots.len());
        for k in 0..self.den_roots.len() {
            let (z, m) = self.den_roots[k];
            let a = self.pf_coeffs_at(k, &rem);
            let mut tnum = Poly::zero();
            let mut pw = Poly::one();
            for &aj in &a {
                tnum = tnum.add(&pw.scale(aj));
                pw = pw.mul(&Poly::linear(z));
            }
            terms.push((z, m, Rational::with_poles(tnum, vec![(z, m)])));
        }
        (q, terms)
    }

    /// Riesz split into plus part (poles in ℂ⁻), minus part (poles in ℂ⁺)
    /// and the constant at ∞. Requires boundedness on the boundary.
    pub fn riesz_split(&self, tau_real: f64) -> Result<RieszSplit> {
        for (z, _) in &self.den_roots {
            if z.im.abs() <= tau_real {
                return Err(Error::RealPole(format!("{z}")));
            }
        }
        let (q, terms) = self.partial_fractions();
        if q.degree() >= 1 {
            return Err(Error::NotBounded(format!(
                "numerator degree {} exceeds denominator degree {}",
                self.num.degree(),
                self.den.degree()
            )));
        }
        let constant = q.coeff(0);
        let mut plus = Rational::zero();
        let mut minus = Rational::zero();
        for (z, _, term) in terms {
            if z.im > 0.0 {
                minus = minus.add(&term);
            } else {
                plus = plus.add(&term);
            }
        }
        Ok(RieszSplit {
            plus,
            minus,
            constant,
        })
    }

    /// P⁺f. The constant at ∞ is assigned to the plus side, matching the
    /// convention that H∞⁺ contains the constants.
    pub fn p_plus(&self, tau_real: f64) -> Result<Rational> {
        let s = self.riesz_split(tau_real)?;
        Ok(s.plus.add(&Rational::constant(s.constant)))
    }

    /// P⁻f: the part with poles in ℂ⁺, vanishing at ∞.
    pub fn p_minus(&self, tau_real: f64) -> Result<Rational> {
        Ok(self.riesz_split(tau_real)?.minus)
    }

    /// Weighted decomposition of a bounded symbol: variant K13 returns
    /// G± = (ξ+i)·P±[g/(ξ+i)], variant K14 uses the weight (ξ−i).
    /// The parts reconstruct g exactly: the weighted quotient decays, so no
    /// constant remains.
    pub fn weighted_split(&self, variant: WeightVariant, tau_real: f64) -> Result<(Rational, Rational)> {
        let w = match variant {
            WeightVariant::K13 => C::new(0.0, -1.0), // pole of 1/(ξ+i)
            WeightVariant::K14 => C::new(0.0, 1.0),
        };
        let quotient = self.mul(&Rational::pole(w, 1));
        let split = quotient.riesz_split(tau_real)?;
        debug_assert!(split.constant.norm() < 1e-9);
        let weight = Rational::from_poly(Poly::linear(w));
        Ok((split.plus.mul(&weight), split.minus.mul(&weight)))
    }

    /// Membership of the weighted Hardy space λ±H±, λ±(ξ) = ξ±i:
    /// true iff f/λ± has all poles strictly in the opposite half-plane and
    /// vanishes at ∞.
    pub fn in_weighted_hardy(&self, sign: HardySign, tau_real: f64) -> bool {
        if self.is_zero() {
            return true;
        }
        let lambda_pole = match sign {
            HardySign::Plus => C::new(0.0, -1.0),
            HardySign::Minus => C::new(0.0, 1.0),
        };
        let h = self.mul(&Rational::pole(lambda_pole, 1));
        match h.value_at_infinity() {
            Some(v) if v.norm() <= 1e-10 => {}
            _ => return false,
        }
        match sign {
            HardySign::Plus => h.den_roots.iter().all(|(z, _)| z.im < -tau_real),
            HardySign::Minus => h.den_roots.iter().all(|(z, _)| z.im > tau_real),
        }
    }

    /// First `count` Taylor coefficients at a regular point `z`.
    pub fn taylor_at(&self, z: C, count: usize) -> Result<Vec<C>> {
        let d0 = self.den.eval(z);
        if d0.norm() <= 1e-12 * self.num_scale_at(z).max(1.0) {
            return Err(Error::PoleAtPoint(format!("{z}")));
        }
        let nt = self.num.taylor_at(z, count);
        let dt = self.den.taylor_at(z, count);
        let mut a = vec![c0(); count];
        for j in 0..count {
            let mut acc = nt[j];
            for l in 0..j {
                acc -= a[l] * dt[j - l];
            }
            a[j] = acc / dt[0];
        }
        Ok(a)
    }

    /// Coefficients c₀..c_{count−1} of the expansion f(ξ) = Σ cⱼ ξ^{−j} at ∞.
    /// Requires boundedness at ∞ (deg num ≤ deg den).
    pub fn asymptotic_coeffs(&self, count: usize) -> Result<Vec<C>> {
        if self.is_zero() {
            return Ok(vec![c0(); count]);
        }
        let dn = self.num.degree();
        let dd = self.den.degree();
        if dn > dd {
            return Err(Error::NotBounded("asymptotic expansion at ∞".into()));
        }
        // with u = 1/ξ: f = u^{dd−dn} · Ñ(u)/D̃(u), coefficients reversed
        let shift = dd - dn;
        let nrev: Vec<C> = (0..=dn).rev().map(|k| self.num.coeff(k)).collect();
        let drev: Vec<C> = (0..=dd).rev().map(|k| self.den.coeff(k)).collect();
        let nrev = Poly::from_coeffs(nrev);
        let drev = Poly::from_coeffs(drev);
        let nt = nrev.taylor_at(c0(), count);
        let dt = drev.taylor_at(c0(), count);
        let mut series = vec![c0(); count];
        for j in 0..count {
            let mut acc = nt[j];
            for l in 0..j {
                acc -= series[l] * dt[j - l];
            }
            series[j] = acc / dt[0];
        }
        let mut out = vec![c0(); count];
        for j in 0..count {
            if j + shift < count {
                out[j + shift] = series[j];
            }
        }
        Ok(out)
    }

    /// Sum of residues at poles in the open upper half-plane.
    pub fn residues_upper(&self) -> C {
        let (_, rem) = self.num.divrem(&self.den);
        let mut acc = c0();
        for k in 0..self.den_roots.len() {
            let (z, m) = self.den_roots[k];
            if z.im > 0.0 {
                let a = self.pf_coeffs_at(k, &rem);
                acc += a[m - 1];
            }
        }
        acc
    }

    /// Largest |f| over the fixed real sample set.
    pub fn sup_on_samples(&self) -> f64 {
        SAMPLE_XS
            .iter()
            .filter_map(|&x| self.eval_real(x).ok())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// sup |f−g| over the sample set (no normalization).
    pub fn max_diff_on_samples(&self, other: &Rational) -> f64 {
        SAMPLE_XS
            .iter()
            .filter_map(|&x| match (self.eval_real(x), other.eval_real(x)) {
                (Ok(a), Ok(b)) => Some((a - b).norm()),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    /// Value-level comparison: sup |f−g| ≤ tol · (1 + max sup).
    pub fn approx_eq(&self, other: &Rational, tol: f64) -> bool {
        let scale = 1.0 + self.sup_on_samples().max(other.sup_on_samples());
        self.max_diff_on_samples(other) <= tol * scale
    }
}

/// Taylor series at `z` of the monic product Π(ξ−w)^m, truncated to `count`
/// terms, computed factor by factor (no coefficient expansion).
fn roots_taylor(roots: &[(C, usize)], z: C, count: usize) -> Vec<C> {
    let mut s = vec![c0(); count];
    s[0] = c1();
    for &(w, m) in roots {
        let base = z - w;
        for _ in 0..m {
            // multiply by (base + u) where u = ξ − z
            let mut prev = c0();
            for coef in s.iter_mut() {
                let cur = *coef;
                *coef = cur * base + prev;
                prev = cur;
            }
        }
    }
    s
}

fn series_mul_trunc(a: &[C], b: &[C], count: usize) -> Vec<C> {
    let mut out = vec![c0(); count];
    for (i, &ai) in a.iter().enumerate().take(count) {
        for (j, &bj) in b.iter().enumerate().take(count - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Sum over the open upper half-plane of the residues of Π factors, formed
/// by multiplying truncated Laurent expansions at each shared pole — the
/// product itself is never expanded, which keeps high-multiplicity poles
/// well conditioned. Errs if two factors carry poles that are close but not
/// float-identical (the caller falls back to the expanded route).
pub fn residues_upper_product(factors: &[&Rational]) -> Result<C> {
    // group upper poles across factors
    let mut centers: Vec<(C, usize)> = Vec::new(); // (location, total multiplicity)
    for f in factors {
        for &(z, m) in f.poles() {
            if z.im <= 0.0 {
                continue;
            }
            let near = centers
                .iter_mut()
                .find(|(w, _)| (*w - z).norm() <= 1e-9 * (1.0 + z.norm()));
            match near {
                Some(slot) => {
                    if (slot.0 - z).norm() > 1e-12 * (1.0 + z.norm()) {
                        return Err(Error::InvalidParam(
                            "pole cluster without a common center".into(),
                        ));
                    }
                    slot.1 += m;
                }
                None => centers.push((z, m)),
            }
        }
    }
    let mut acc = c0();
    for (z, k_total) in centers {
        let count = k_total;
        let mut series = vec![c0(); count];
        series[0] = c1();
        let mut lead: i64 = 0;
        for f in factors {
            let (l, s) = f.laurent_at(z, count);
            lead += l;
            series = series_mul_trunc(&series, &s, count);
        }
        // residue = coefficient of (ξ−z)^{−1}
        let idx = -1 - lead;
        if idx >= 0 && (idx as usize) < count {
            acc += series[idx as usize];
        }
    }
    Ok(acc)
}

/// ∫ℝ (Π factors)·conj(g) dξ by factored residue calculus. The decay check
/// uses raw degrees, so every factor list must decay at least like |ξ|⁻²
/// before cancellations. The contour closes over whichever half-plane
/// carries the lighter pole load (∫h = conj ∫h̃ with h̃ the boundary
/// conjugate, so both closings are available); high-multiplicity inner
/// function poles then sit on the unused side.
pub fn l2_inner_factors(factors: &[&Rational], g: &Rational, tau_real: f64) -> Result<C> {
    if g.is_zero() || factors.iter().any(|f| f.is_zero()) {
        return Ok(c0());
    }
    let gc = g.conj_reflect();
    let mut all: Vec<&Rational> = factors.to_vec();
    all.push(&gc);
    let mut decay: i64 = 0;
    let mut upper_load = 0usize;
    let mut lower_load = 0usize;
    for f in &all {
        for (z, m) in f.poles() {
            if z.im.abs() <= tau_real {
                return Err(Error::RealPole(format!("{z}")));
            }
            if z.im > 0.0 {
                upper_load += m * m;
            } else {
                lower_load += m * m;
            }
        }
        decay += f.den().degree() as i64 - f.num().degree() as i64;
    }
    if decay < 2 {
        return Err(Error::NotIntegrable(format!("raw decay {decay} < 2")));
    }
    let attempt = if lower_load < upper_load {
        let reflected: Vec<Rational> = factors.iter().map(|f| f.conj_reflect()).collect();
        let mut alt: Vec<&Rational> = reflected.iter().collect();
        alt.push(g);
        residues_upper_product(&alt)
            .map(|r| (C::new(0.0, 2.0 * std::f64::consts::PI) * r).conj())
    } else {
        residues_upper_product(&all).map(|r| C::new(0.0, 2.0 * std::f64::consts::PI) * r)
    };
    match attempt {
        Ok(v) => Ok(v),
        Err(_) => {
            // pole clusters without a shared center: expand and retry
            let mut h = gc;
            for f in factors {
                h = h.mul(f);
            }
            if h.is_zero() {
                return Ok(c0());
            }
            if h.den().degree() < h.num().degree() + 2 {
                return Err(Error::NotIntegrable("decay < 2".into()));
            }
            Ok(C::new(0.0, 2.0 * std::f64::consts::PI) * h.residues_upper())
        }
    }
}

/// ⟨f, g⟩ = ∫ℝ f(ξ) conj(g(ξ)) dξ by residue calculus: 2πi times the sum of
/// the upper-half-plane residues of f·g*, where g* is the boundary conjugate.
pub fn l2_inner(f: &Rational, g: &Rational, tau_real: f64) -> Result<C> {
    l2_inner_factors(&[f], g, tau_real)
}

/// Pointwise value of the product at a real point, each factor evaluated in
/// its own (possibly factored) representation.
pub fn product_eval_real(factors: &[&Rational], x: f64) -> Result<C> {
    let mut acc = c1();
    for f in factors {
        acc *= f.eval_real(x)?;
    }
    Ok(acc)
}

/// sup over the sample set of |P⁻(Π factors)(x)|: the minus part is the sum
/// of the singular parts at the upper poles, extracted from factored
/// Laurent data, so nothing is ever expanded.
pub fn product_minus_part_sup(factors: &[&Rational]) -> Result<f64> {
    let singular = product_singular_parts(factors, true)?;
    Ok(sup_singular(&singular))
}

/// sup over the sample set of |P⁺-leak(x)| for a product expected to lie in
/// H⁻ (decaying): the plus leak is (Π factors)(x) minus its lower singular
/// parts... equivalently the value minus the minus-part reconstruction:
/// here computed as value − (singular parts at upper poles) − constant,
/// which IS the plus part.
pub fn product_plus_part_sup(factors: &[&Rational]) -> Result<f64> {
    let singular = product_singular_parts(factors, true)?;
    let constant = factors
        .iter()
        .try_fold(c1(), |acc, f| f.value_at_infinity().map(|v| acc * v));
    let constant = constant.unwrap_or(c0());
    let mut worst = 0.0f64;
    for &x in SAMPLE_XS.iter() {
        let value = match product_eval_real(factors, x) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let minus = eval_singular(&singular, x);
        worst = worst.max((value - minus - constant).norm());
    }
    Ok(worst)
}

type SingularParts = Vec<(C, Vec<C>)>;

/// Laurent singular coefficients (orders −k..−1) of Π factors at each pole
/// in the chosen half-plane.
fn product_singular_parts(factors: &[&Rational], upper: bool) -> Result<SingularParts> {
    let mut centers: Vec<(C, usize)> = Vec::new();
    for f in factors {
        for &(z, m) in f.poles() {
            if (z.im > 0.0) != upper {
                continue;
            }
            let near = centers
                .iter_mut()
                .find(|(w, _)| (*w - z).norm() <= 1e-9 * (1.0 + z.norm()));
            match near {
                Some(slot) => {
                    if (slot.0 - z).norm() > 1e-12 * (1.0 + z.norm()) {
                        return Err(Error::InvalidParam(
                            "pole cluster without a common center".into(),
                        ));
                    }
                    slot.1 += m;
                }
                None => centers.push((z, m)),
            }
        }
    }
    let mut out = Vec::with_capacity(centers.len());
    for (z, k_total) in centers {
        let count = k_total;
        let mut series = vec![c0(); count];
        series[0] = c1();
        let mut lead: i64 = 0;
        for f in factors {
            let (l, s) = f.laurent_at(z, count);
            lead += l;
            series = series_mul_trunc(&series, &s, count);
        }
        // coefficients of orders lead..−1
        let n_sing = (-lead).max(0) as usize;
        let mut coeffs = vec![c0(); n_sing];
        for (j, c) in coeffs.iter_mut().enumerate() {
            // order = lead + j
            if j < series.len() {
                *c = series[j];
            }
        }
        out.push((z, coeffs));
    }
    Ok(out)
}

fn eval_singular(parts: &SingularParts, x: f64) -> C {
    let xc = C::new(x, 0.0);
    let mut acc = c0();
    for (z, coeffs) in parts {
        let k = coeffs.len();
        let inv = c1() / (xc - z);
        // coeffs[j] carries the order −k+j term, i.e. (x−z)^{j−k}
        let mut p = c1();
        for j in (0..k).rev() {
            p *= inv;
            acc += coeffs[j] * p;
        }
    }
    acc
}

fn sup_singular(parts: &SingularParts) -> f64 {
    SAMPLE_XS
        .iter()
        .map(|&x| eval_singular(parts, x).norm())
        .fold(0.0, f64::max)
}

fn adaptive_simpson<F: Fn(f64) -> C>(
    f: &F,
    a: f64,
    b: f64,
    fa: C,
    fm: C,
    fb: C,
    whole: C,
    tol: f64,
    depth: usize,
) -> C {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
}

/// Independent verification channel for [`l2_inner`]: adaptive Simpson
/// integration of f·conj(g) over [−R, R] with an analytic ~c/ξ² tail
/// estimate taken from the sampled values at ±R.
pub fn quadrature_inner(f: &Rational, g: &Rational, tau_real: f64) -> Result<C> {
    let h = f.mul(&g.conj_reflect());
    if h.is_zero() {
        return Ok(c0());
    }
    for (z, _) in h.poles() {
        if z.im.abs() <= tau_real {
            return Err(Error::RealPole(format!("{z}")));
        }
    }
    if h.den().degree() < h.num().degree() + 2 {
        return Err(Error::NotIntegrable("decay < 2".into()));
    }
    let max_pole = h.poles().iter().map(|(z, _)| z.norm()).fold(0.0, f64::max);
    let r = 1000.0_f64.max(50.0 * (1.0 + max_pole));
    let integrand = |x: f64| -> C {
        let fx = f.eval_real(x).unwrap_or_else(|_| c0());
        let gx = g.eval_real(x).unwrap_or_else(|_| c0());
        fx * gx.conj()
    };
    // coarse magnitude estimate on a uniform grid
    let n0 = 2048usize;
    let dx = 2.0 * r / n0 as f64;
    let mut rough = 0.0f64;
    for k in 0..=n0 {
        rough += integrand(-r + k as f64 * dx).norm() * dx;
    }
    let tol = 1e-9 * rough.max(1e-12);
    // piecewise adaptive Simpson; cubic grading clusters panel edges near 0,
    // where the integrand varies fastest
    let panels = 32usize;
    let edges: Vec<f64> = (0..=panels)
        .map(|k| {
            let t = -1.0 + 2.0 * k as f64 / panels as f64;
            r * t * t * t
        })
        .collect();
    let mut total = c0();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let fa = integrand(a);
        let fb = integrand(b);
        let fm = integrand(0.5 * (a + b));
        let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
        total += adaptive_simpson(&integrand, a, b, fa, fm, fb, whole, tol / panels as f64, 40);
    }
    // tail ≈ ∫_{|ξ|>R} c₂/ξ² with c₂ estimated from the boundary samples
    let c2 = (integrand(r) * r * r + integrand(-r) * r * r) * 0.5;
    total += c2 * (2.0 / r);
    Ok(total)
}
