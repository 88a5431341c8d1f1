//! Property tests for the structural invariants: inner-function arithmetic
//! under the divisibility order, Riesz-split algebra, and inner-product
//! symmetry. Strategies draw well-separated points so the properties are
//! tested away from the deliberately excluded degenerate configurations.

use atto::inner::{Domain, InnerFunction};
use atto::poly::Poly;
use atto::rational::{l2_inner, HardySign, Rational, WeightVariant};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn upper_points(n: usize) -> impl Strategy<Value = Vec<C>> {
    proptest::collection::vec((-3.0f64..3.0, 0.5f64..2.5), n..=n).prop_map(|ps| {
        let mut out: Vec<C> = Vec::new();
        for (re, im) in ps {
            let mut z = C::new(re, im);
            while out.iter().any(|w| (*w - z).norm() < 0.4) {
                z += C::new(0.37, 0.11);
            }
            out.push(z);
        }
        out
    })
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<C>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n..=n)
        .prop_map(|cs| cs.into_iter().map(|(re, im)| C::new(re, im)).collect())
}

fn inner_from(points: &[C]) -> InnerFunction {
    InnerFunction::from_zero_list(
        Domain::HalfPlane,
        &points.iter().map(|&z| (z, 1)).collect::<Vec<_>>(),
        C::new(1.0, 0.0),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divisibility_order_is_consistent(zs in upper_points(4)) {
        let f = inner_from(&zs[..2]);
        let g = inner_from(&zs[2..]);
        let prod = f.multiply(&g).unwrap();
        prop_assert_eq!(prod.degree(), f.degree() + g.degree());
        prop_assert!(f.divides(&prod).unwrap());
        prop_assert!(g.divides(&prod).unwrap());
        // divide_exact undoes multiply
        let back = InnerFunction::divide_exact(&prod, &f).unwrap();
        prop_assert!(back.divides(&g).unwrap() && g.divides(&back).unwrap());
        // gcd divides both and is divided by any common divisor
        let common = inner_from(&zs[1..3]);
        let a = f.multiply(&common).unwrap();
        let b = g.multiply(&common).unwrap();
        let gcd = a.gcd(&b).unwrap();
        prop_assert!(gcd.divides(&a).unwrap());
        prop_assert!(gcd.divides(&b).unwrap());
        prop_assert!(common.divides(&gcd).unwrap());
    }

    #[test]
    fn inner_functions_are_unimodular_on_the_line(zs in upper_points(3), x in -20.0f64..20.0) {
        let f = inner_from(&zs);
        let v = f.evaluate(C::new(x, 0.0)).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn riesz_split_reconstructs_and_is_idempotent(zs in upper_points(3), cs in coeffs(3), c0 in coeffs(1)) {
        // bounded symbol with poles on both sides
        let mut f = Rational::constant(c0[0]);
        f = f.add(&Rational::pole(zs[0], 1).scale(cs[0]));
        f = f.add(&Rational::pole(zs[1].conj(), 1).scale(cs[1]));
        f = f.add(&Rational::pole(zs[2], 2).scale(cs[2]));
        let s = f.riesz_split(1e-8).unwrap();
        let recon = s.plus.add(&s.minus).add(&Rational::constant(s.constant));
        prop_assert!(recon.approx_eq(&f, 1e-9));
        // plus part splits to itself, minus part to itself
        let s2 = s.plus.riesz_split(1e-8).unwrap();
        prop_assert!(s2.minus.is_zero());
        prop_assert!(s2.constant.norm() < 1e-10);
        let s3 = s.minus.riesz_split(1e-8).unwrap();
        prop_assert!(s3.plus.is_zero());
        // the weighted split reconstructs without a constant
        let (gp, gm) = f.weighted_split(WeightVariant::K13, 1e-8).unwrap();
        prop_assert!(gp.add(&gm).approx_eq(&f, 1e-9));
        let lambda_quotient = gp.mul(&Rational::pole(C::new(0.0, -1.0), 1));
        prop_assert!(lambda_quotient.in_weighted_hardy(HardySign::Plus, 1e-8) || gp.is_zero());
    }

    #[test]
    fn conj_reflect_is_an_involution_matching_pointwise_conjugation(zs in upper_points(2), cs in coeffs(2), x in -10.0f64..10.0) {
        let f = Rational::pole(zs[0], 1).scale(cs[0])
            .add(&Rational::pole(zs[1].conj(), 2).scale(cs[1]));
        let g = f.conj_reflect();
        prop_assert!(g.conj_reflect().approx_eq(&f, 1e-12));
        let a = f.eval_real(x).unwrap().conj();
        let b = g.eval_real(x).unwrap();
        prop_assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn l2_inner_is_hermitian_and_positive(zs in upper_points(2), cs in coeffs(2)) {
        let f = Rational::pole(zs[0].conj(), 1).scale(cs[0]);
        let g = Rational::pole(zs[1].conj(), 2).scale(cs[1]).add(&f.scale(C::new(0.3, -0.2)));
        let ab = l2_inner(&f, &g, 1e-8).unwrap();
        let ba = l2_inner(&g, &f, 1e-8).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-10 * (1.0 + ab.norm()));
        if !f.is_zero() {
            let n = l2_inner(&f, &f, 1e-8).unwrap();
            prop_assert!(n.re > 0.0);
            prop_assert!(n.im.abs() < 1e-10 * (1.0 + n.re));
        }
    }

    #[test]
    fn equation_a_holds_for_decaying_hplus(zs in upper_points(2), cs in coeffs(2)) {
        // P⁺(r⁻¹φ₊) = r⁻¹φ₊ − 2i·φ₊(i)/(ξ−i)
        let phi = Rational::pole(zs[0].conj(), 1).scale(cs[0])
            .add(&Rational::pole(zs[1].conj(), 1).scale(cs[1]));
        let rinv = Rational::new(
            Poly::linear(C::new(0.0, -1.0)),
            Poly::linear(C::new(0.0, 1.0)),
        ).unwrap();
        let lhs = rinv.mul(&phi).p_plus(1e-8).unwrap();
        let corr = Rational::pole(C::new(0.0, 1.0), 1)
            .scale(C::new(0.0, -2.0) * phi.eval(C::new(0.0, 1.0)).unwrap());
        let rhs = rinv.mul(&phi).add(&corr);
        prop_assert!(lhs.approx_eq(&rhs, 1e-9));
    }
}
