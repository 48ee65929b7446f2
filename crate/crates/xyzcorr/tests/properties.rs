use num_complex::Complex64;
use proptest::prelude::*;
use xyzcorr::corrfn::{f_zeta, CorrelationTriple};
use xyzcorr::exact::{rat, Poly, RatFunc, Rational, Var};
use xyzcorr::taurec::TauTable;
use xyzcorr::thetanum::ThetaContext;

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-6i64..=6, 0..5).prop_map(|c| Poly::from_i64s(&c, Var::Zeta))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(), poly()).prop_filter_map("zero denominator", |(n, d)| RatFunc::new(n, d).ok())
}

fn point() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=7).prop_map(|(p, q)| rat(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in ratfunc(), b in ratfunc(), x in point()) {
        let (Ok(va), Ok(vb)) = (a.eval(&x), b.eval(&x)) else { return Ok(()) };
        prop_assert_eq!((&a + &b).eval(&x).unwrap(), &va + &vb);
        prop_assert_eq!((&a * &b).eval(&x).unwrap(), &va * &vb);
    }

    #[test]
    fn composition_agrees_with_nested_evaluation(a in ratfunc(), g in ratfunc(), x in point()) {
        let Ok(inner) = g.eval(&x) else { return Ok(()) };
        let Ok(outer) = a.eval(&inner) else { return Ok(()) };
        if let Ok(h) = a.compose(&g) {
            if let Ok(v) = h.eval(&x) {
                prop_assert_eq!(v, outer);
            }
        }
    }

    #[test]
    fn json_round_trip(a in ratfunc()) {
        let text = serde_json::to_string(&a).unwrap();
        let back: RatFunc = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn theta_quasi_periodicity(re in -3.0f64..3.0, im in -0.4f64..0.4, t in 0.5f64..2.0) {
        let ctx = ThetaContext::new(Complex64::new(0.1, t)).unwrap();
        let u = Complex64::new(re, im);
        let pi = std::f64::consts::PI;
        let a = ctx.th(1, u + pi).unwrap();
        let b = ctx.th(1, u).unwrap();
        prop_assert!((a + b).norm() < 1e-12 * (1.0 + b.norm()));
        let shift = ctx.tau() * pi;
        let lhs = ctx.th(1, u + shift).unwrap();
        let factor = -(-Complex64::i() * (ctx.tau() * pi + 2.0 * u)).exp();
        prop_assert!((lhs - factor * b).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn correlation_sum_rule(n in 0i64..=3, x in point()) {
        let mut table = TauTable::new();
        let f = f_zeta(&mut table, n).unwrap();
        let Ok(v) = f.eval(&x) else { return Ok(()) };
        let triple = CorrelationTriple::<Rational>::from_f(&v, &x);
        prop_assert_eq!(triple.sum_rule_defect(&x), rat(0, 1));
    }
}
