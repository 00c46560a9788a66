//! Property suites for the symbolic kernel and exterior calculus.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use kontact_core::chart::Chart;
use kontact_core::expr::{parse, Expr};
use kontact_core::exterior::{
    ext_deriv, interior, lie_bracket, lie_derivative, wedge, DiffForm, VectorField,
};

fn chart3() -> Arc<Chart> {
    Chart::coords(["x", "y", "z"]).unwrap()
}

/// Random polynomial of degree <= 2 over (x, y, z) with small coefficients.
fn poly_expr() -> impl Strategy<Value = Expr> {
    // Coefficients for 1, x, y, z, x^2, xy, xz, y^2, yz, z^2.
    proptest::collection::vec(-4i64..=4, 10).prop_map(|cs| {
        let c = chart3();
        let monos = ["1", "x", "y", "z", "x^2", "x*y", "x*z", "y^2", "y*z", "z^2"];
        let mut acc = Expr::zero(&c);
        for (k, m) in cs.iter().zip(monos.iter()) {
            if *k != 0 {
                let term = parse(m, &c).unwrap().scale(&num::BigRational::from_integer((*k).into()));
                acc = acc.add(&term);
            }
        }
        acc
    })
}

fn field() -> impl Strategy<Value = VectorField> {
    proptest::collection::vec(poly_expr(), 3)
        .prop_map(|coeffs| VectorField::new(chart3(), coeffs).unwrap())
}

fn one_form() -> impl Strategy<Value = DiffForm> {
    proptest::collection::vec(poly_expr(), 3).prop_map(|coeffs| {
        DiffForm::from_terms(&chart3(), 1, coeffs.into_iter().enumerate().map(|(i, c)| (vec![i], c)))
            .unwrap()
    })
}

fn two_form() -> impl Strategy<Value = DiffForm> {
    proptest::collection::vec(poly_expr(), 3).prop_map(|coeffs| {
        let idx = [vec![0usize, 1], vec![0, 2], vec![1, 2]];
        DiffForm::from_terms(&chart3(), 2, idx.into_iter().zip(coeffs)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobi_identity(x in field(), y in field(), z in field()) {
        let a = lie_bracket(&lie_bracket(&x, &y).unwrap(), &z).unwrap();
        let b = lie_bracket(&lie_bracket(&y, &z).unwrap(), &x).unwrap();
        let c = lie_bracket(&lie_bracket(&z, &x).unwrap(), &y).unwrap();
        let total = a.add(&b).unwrap().add(&c).unwrap();
        prop_assert!(total.is_zero());
    }

    #[test]
    fn d_squared_vanishes(omega in one_form(), f in poly_expr()) {
        prop_assert!(ext_deriv(&ext_deriv(&omega)).is_zero());
        prop_assert!(ext_deriv(&ext_deriv(&DiffForm::from_function(f))).is_zero());
    }

    #[test]
    fn cartan_vs_contraction_commutator(x in field(), y in field(), omega in two_form()) {
        // iota_[X,Y] = L_X iota_Y - iota_Y L_X, with L from the Cartan formula.
        let lhs = interior(&lie_bracket(&x, &y).unwrap(), &omega).unwrap();
        let rhs = lie_derivative(&x, &interior(&y, &omega).unwrap())
            .unwrap()
            .sub(&interior(&y, &lie_derivative(&x, &omega).unwrap()).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn repeated_contraction_vanishes(x in field(), omega in two_form()) {
        let once = interior(&x, &omega).unwrap();
        let twice = interior(&x, &once).unwrap();
        prop_assert!(twice.is_zero());
    }

    #[test]
    fn lie_derivative_naturality(x in field(), y in field(), omega in one_form()) {
        // L_[X,Y] = L_X L_Y - L_Y L_X.
        let lhs = lie_derivative(&lie_bracket(&x, &y).unwrap(), &omega).unwrap();
        let rhs = lie_derivative(&x, &lie_derivative(&y, &omega).unwrap())
            .unwrap()
            .sub(&lie_derivative(&y, &lie_derivative(&x, &omega).unwrap()).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_graded_antisymmetry(a in one_form(), b in one_form()) {
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        prop_assert_eq!(ab, ba.neg());
    }

    #[test]
    fn ring_laws(a in poly_expr(), b in poly_expr(), c in poly_expr()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }

    #[test]
    fn leibniz_rule(a in poly_expr(), b in poly_expr()) {
        let lhs = a.mul(&b).diff("x").unwrap();
        let rhs = a.diff("x").unwrap().mul(&b).add(&a.mul(&b.diff("x").unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn print_parse_roundtrip(a in poly_expr(), b in poly_expr()) {
        let c = chart3();
        let e = if b.is_zero() { a.clone() } else { a.div(&b).unwrap() };
        let back = parse(&e.to_string(), &c).unwrap();
        prop_assert_eq!(e, back);
    }

    #[test]
    fn eval_commutes_with_substitute(a in poly_expr(), s in poly_expr(), x0 in -3i64..=3, y0 in -3i64..=3, z0 in -3i64..=3) {
        // eval(substitute(a, x -> s)) == eval(a) with the composed binding.
        let c = chart3();
        let mut bindings = BTreeMap::new();
        bindings.insert("x".to_string(), s.clone());
        let composed = a.substitute(&bindings, &c).unwrap();
        let mut point = BTreeMap::new();
        point.insert("x".to_string(), x0 as f64);
        point.insert("y".to_string(), y0 as f64);
        point.insert("z".to_string(), z0 as f64);
        let consts = BTreeMap::new();
        let s_val = s.eval_f64(&point, &consts).unwrap();
        let mut inner = point.clone();
        inner.insert("x".to_string(), s_val);
        let direct = a.eval_f64(&inner, &consts).unwrap();
        let via_subst = composed.eval_f64(&point, &consts).unwrap();
        let denom = direct.abs().max(1.0);
        prop_assert!(((direct - via_subst) / denom).abs() < 1e-12);
    }
}
