//! Complex polynomial roots via companion-matrix eigenvalues.
//!
//! The companion matrix of a monic polynomial is upper Hessenberg, so the
//! eigenvalues are computed directly with a single-shift complex QR
//! iteration (explicit shifts, Givens rotations) after Parlett–Reinsch
//! balancing. Roots are polished by Newton steps on the original polynomial
//! and grouped into multiplicity clusters; a cluster of size m is refined by
//! Newton on the (m−1)-st derivative, where the multiple root is simple.

use crate::error::{Error, Result};
use crate::poly::Poly;
use num_complex::Complex64 as C;

const MAX_SWEEPS_PER_N: usize = 80;

fn zero() -> C {
    C::new(0.0, 0.0)
}

/// Givens rotation [[c, s], [−s̄, c]] with real c ≥ 0 sending (a, b) to (r, 0).
fn givens(a: C, b: C) -> (f64, C) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, zero());
    }
    if an == 0.0 {
        return (0.0, C::new(1.0, 0.0));
    }
    let h = (an * an + bn * bn).sqrt();
    let c = an / h;
    let s = (b.conj() / a.conj()) * c;
    (c, s)
}

/// Eigenvalues of the 2×2 block [[a, b], [c, d]].
fn eig2(a: C, b: C, c: C, d: C) -> (C, C) {
    let tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let sq = disc.sqrt();
    (tr + sq, tr - sq)
}

/// Parlett–Reinsch balancing with powers of two.
fn balance(h: &mut [Vec<C>]) {
    let n = h.len();
    for _pass in 0..16 {
        let mut converged = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    r += h[i][j].norm();
                    c += h[j][i].norm();
                }
            }
            if r == 0.0 || c == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = r + c;
            let mut c2 = c;
            let mut r2 = r;
            while c2 < r2 / 2.0 {
                c2 *= 2.0;
                r2 /= 2.0;
                f *= 2.0;
            }
            while c2 >= r2 * 2.0 {
                c2 /= 2.0;
                r2 *= 2.0;
                f /= 2.0;
            }
            if (c2 + r2) < 0.95 * s && f != 1.0 {
                converged = false;
                for j in 0..n {
                    h[i][j] /= f;
                    h[j][i] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Eigenvalues of an upper Hessenberg complex matrix by shifted QR.
fn hessenberg_eigenvalues(mut h: Vec<Vec<C>>) -> Result<Vec<C>> {
    let n = h.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    balance(&mut h);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n;
    let mut stuck = 0usize;
    let mut total = 0usize;
    let eps = f64::EPSILON;

    while hi > 0 {
        total += 1;
        if total > MAX_SWEEPS_PER_N * n {
            return Err(Error::RootsDidNotConverge);
        }
        // Zero out negligible subdiagonals.
        for k in 1..hi {
            let scale = h[k - 1][k - 1].norm() + h[k][k].norm();
            if h[k][k - 1].norm() <= eps * scale.max(1e-300) {
                h[k][k - 1] = zero();
            }
        }
        if hi == 1 || h[hi - 1][hi - 2].norm() == 0.0 {
            eigs.push(h[hi - 1][hi - 1]);
            hi -= 1;
            stuck = 0;
            continue;
        }
        if hi == 2 || h[hi - 2][hi - 3].norm() == 0.0 {
            let (l1, l2) = eig2(
                h[hi - 2][hi - 2],
                h[hi - 2][hi - 1],
                h[hi - 1][hi - 2],
                h[hi - 1][hi - 1],
            );
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            stuck = 0;
            continue;
        }
        // Start of the unreduced block ending at hi.
        let mut lo = hi - 1;
        while lo > 0 && h[lo][lo - 1].norm() != 0.0 {
            lo -= 1;
        }
        // Wilkinson shift from the trailing 2×2, with exceptional shifts on
        // stagnation.
        stuck += 1;
        let mu = if stuck % 16 == 0 {
            h[hi - 1][hi - 1] + C::new(1.5 * h[hi - 1][hi - 2].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h[hi - 2][hi - 2],
                h[hi - 2][hi - 1],
                h[hi - 1][hi - 2],
                h[hi - 1][hi - 1],
            );
            let d = h[hi - 1][hi - 1];
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        for j in lo..hi {
            h[j][j] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo - 1);
        for j in lo..hi - 1 {
            let (c, s) = givens(h[j][j], h[j + 1][j]);
            rots.push((c, s));
            for k in j..hi {
                let t1 = h[j][k];
                let t2 = h[j + 1][k];
                h[j][k] = t1 * c + t2 * s;
                h[j + 1][k] = -t1 * s.conj() + t2 * c;
            }
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let j = lo + off;
            let last = (j + 2).min(hi - 1);
            for k in lo..=last {
                let t1 = h[k][j];
                let t2 = h[k][j + 1];
                h[k][j] = t1 * c + t2 * s.conj();
                h[k][j + 1] = -t1 * s + t2 * c;
            }
        }
        for j in lo..hi {
            h[j][j] += mu;
        }
    }
    Ok(eigs)
}

fn newton_polish(p: &Poly, dp: &Poly, mut z: C) -> C {
    let mut best = z;
    let mut best_val = p.eval(z).norm();
    for _ in 0..4 {
        let d = dp.eval(z);
        if d.norm() < 1e-300 {
            break;
        }
        z -= p.eval(z) / d;
        let v = p.eval(z).norm();
        if v < best_val {
            best_val = v;
            best = z;
        } else {
            break;
        }
    }
    best
}

/// All roots of `p`, repeated with multiplicity, in no particular order.
pub fn poly_roots(p: &Poly) -> Result<Vec<C>> {
    if p.is_zero() {
        return Err(Error::InvalidParam(
            "the zero polynomial has no well-defined roots".into(),
        ));
    }
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let monic = p.monic();
    let mut h = vec![vec![zero(); n]; n];
    for i in 1..n {
        h[i][i - 1] = C::new(1.0, 0.0);
    }
    for i in 0..n {
        h[i][n - 1] = -monic.coeff(i);
    }
    let raw = hessenberg_eigenvalues(h)?;
    let dp = p.derivative();
    Ok(raw.into_iter().map(|z| newton_polish(p, &dp, z)).collect())
}

/// Roots grouped into multiplicity clusters at the given absolute tolerance.
///
/// Cluster centroids of size m are refined by Newton iteration on the
/// (m−1)-st derivative; this recovers multiple roots to near machine
/// precision instead of the O(ε^{1/m}) accuracy of the raw eigenvalues.
pub fn poly_roots_clustered(p: &Poly, cluster_tol: f64) -> Result<Vec<(C, usize)>> {
    let raw = poly_roots(p)?;
    let k = raw.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..k {
        for j in i + 1..k {
            if (raw[i] - raw[j]).norm() <= cluster_tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<C>> = std::collections::BTreeMap::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(raw[i]);
    }
    let mut out = Vec::with_capacity(groups.len());
    for group in groups.values() {
        let m = group.len();
        let mut center = group.iter().sum::<C>() / C::new(m as f64, 0.0);
        if m >= 2 {
            let mut d = p.clone();
            for _ in 0..m - 1 {
                d = d.derivative();
            }
            let dd = d.derivative();
            center = newton_polish(&d, &dd, center);
        }
        out.push((center, m));
    }
    out.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn simple_roots_roundtrip() {
        let roots = [
            (c(1.0, 2.0), 1),
            (c(-0.5, -1.25), 1),
            (c(3.0, 0.0), 1),
            (c(0.0, -2.0), 1),
        ];
        let p = Poly::from_roots(&roots);
        let found = poly_roots_clustered(&p, 1e-6).unwrap();
        assert_eq!(found.len(), 4);
        for (z, _) in roots {
            let hit = found.iter().any(|(w, m)| (z - *w).norm() < 1e-10 && *m == 1);
            assert!(hit, "missing root {z}");
        }
    }

    #[test]
    fn multiple_roots_clustered_and_refined() {
        let z = c(0.7, 1.3);
        let p = Poly::from_roots(&[(z, 3), (c(-2.0, 0.5), 1)]);
        let found = poly_roots_clustered(&p, 3e-5).unwrap();
        let triple = found.iter().find(|(_, m)| *m == 3).expect("triple root");
        assert!((triple.0 - z).norm() < 1e-9, "refined to {}", triple.0);
    }

    #[test]
    fn wilkinson_like_stress() {
        let roots: Vec<(C, usize)> = (1..=12).map(|k| (c(k as f64 / 3.0, 0.0), 1)).collect();
        let p = Poly::from_roots(&roots);
        let found = poly_roots(&p).unwrap();
        assert_eq!(found.len(), 12);
        for (z, _) in roots {
            let best = found.iter().map(|w| (z - *w).norm()).fold(f64::MAX, f64::min);
            assert!(best < 1e-6, "root {z} off by {best}");
        }
    }

    #[test]
    fn degree_25_random_conditioning() {
        // moderately spread roots, like flattened symbol numerators
        let mut roots = Vec::new();
        for k in 0..25 {
            let a = 0.37 * k as f64;
            roots.push((c(2.5 * a.cos(), 1.8 * a.sin()), 1));
        }
        let p = Poly::from_roots(&roots);
        let found = poly_roots(&p).unwrap();
        for (z, _) in roots {
            let best = found.iter().map(|w| (z - *w).norm()).fold(f64::MAX, f64::min);
            assert!(best < 1e-7, "root {z} off by {best}");
        }
    }
}
