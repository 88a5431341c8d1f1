//! JSON encodings for the CLI and report files.
//!
//! Inner functions: {"domain":"half_plane","zeros":[{"re":..,"im":..,"mult":..}],
//! "phase_re":..,"phase_im":..}. Rationals: {"num":[[re,im],..],"den":[[re,im],..]}.
//! Symbols are term lists whose inner factors refer to the surrounding
//! problem's θ/α by name. Matrices serialize row-major with [re,im] entries.

use crate::error::{Error, Result};
use crate::inner::{BlaschkeZero, Domain, InnerFunction};
use crate::numeric::CMat;
use crate::operators::{Symbol, SymbolTerm};
use crate::poly::Poly;
use crate::rational::Rational;
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroJson {
    pub re: f64,
    pub im: f64,
    pub mult: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InnerJson {
    pub domain: String,
    pub zeros: Vec<ZeroJson>,
    pub phase_re: f64,
    pub phase_im: f64,
}

impl InnerJson {
    pub fn from_inner(f: &InnerFunction) -> InnerJson {
        InnerJson {
            domain: match f.domain() {
                Domain::HalfPlane => "half_plane".into(),
                Domain::Disc => "disc".into(),
            },
            zeros: f
                .zeros()
                .iter()
                .map(|z| ZeroJson {
                    re: z.location.re,
                    im: z.location.im,
                    mult: z.multiplicity,
                })
                .collect(),
            phase_re: f.phase().re,
            phase_im: f.phase().im,
        }
    }

    pub fn to_inner(&self) -> Result<InnerFunction> {
        let domain = match self.domain.as_str() {
            "half_plane" => Domain::HalfPlane,
            "disc" => Domain::Disc,
            other => return Err(Error::Parse(format!("unknown domain {other:?}"))),
        };
        InnerFunction::new(
            domain,
            self.zeros
                .iter()
                .map(|z| BlaschkeZero {
                    location: C::new(z.re, z.im),
                    multiplicity: z.mult,
                })
                .collect(),
            C::new(self.phase_re, self.phase_im),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: Vec<[f64; 2]>,
    pub den: Vec<[f64; 2]>,
}

impl RationalJson {
    pub fn from_rational(r: &Rational) -> RationalJson {
        let enc = |p: &Poly| -> Vec<[f64; 2]> {
            if p.is_zero() {
                vec![[0.0, 0.0]]
            } else {
                p.coeffs().iter().map(|c| [c.re, c.im]).collect()
            }
        };
        RationalJson {
            num: enc(r.num()),
            den: enc(r.den()),
        }
    }

    pub fn to_rational(&self) -> Result<Rational> {
        let dec = |v: &[[f64; 2]]| -> Poly {
            Poly::from_coeffs(v.iter().map(|c| C::new(c[0], c[1])).collect())
        };
        Rational::new(dec(&self.num), dec(&self.den))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InnerFactorJson {
    /// "theta" or "alpha", resolved against the enclosing problem
    pub r#ref: String,
    #[serde(default)]
    pub conj: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolTermJson {
    pub coeff: [f64; 2],
    #[serde(default)]
    pub inner: Vec<InnerFactorJson>,
    pub rational: RationalJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolJson {
    pub terms: Vec<SymbolTermJson>,
}

impl SymbolJson {
    pub fn to_symbol(&self, theta: &InnerFunction, alpha: &InnerFunction) -> Result<Symbol> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut inner_factors = Vec::with_capacity(t.inner.len());
            for f in &t.inner {
                let base = match f.r#ref.as_str() {
                    "theta" => theta.clone(),
                    "alpha" => alpha.clone(),
                    other => return Err(Error::Parse(format!("unknown inner ref {other:?}"))),
                };
                inner_factors.push((base, f.conj));
            }
            terms.push(SymbolTerm {
                coeff: C::new(t.coeff[0], t.coeff[1]),
                inner_factors,
                rational: t.rational.to_rational()?,
            });
        }
        Ok(Symbol { terms })
    }
}

pub fn matrix_json(m: &CMat) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    serde_json::json!(rows)
}
