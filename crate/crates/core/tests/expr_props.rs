use std::collections::BTreeMap;

use contact_mech::expr::{parse, BinOp, Expr, Func};
use contact_mech::numeric::fd_gradient;
use contact_mech::ScalarField;
use proptest::prelude::*;

fn names() -> Vec<String> {
    ["q", "p", "z"].iter().map(|s| s.to_string()).collect()
}

fn any_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(-5.0f64..5.0).prop_map(Expr::num), (0usize..3).prop_map(Expr::var),];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| -e),
            (
                prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)],
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            (prop_oneof![Just(Func::Exp), Just(Func::Log), Just(Func::Sin), Just(Func::Cos), Just(Func::Sqrt)], inner)
                .prop_map(|(f, a)| Expr::call(f, a)),
        ]
    })
}

/// Sums, products, small integer powers and entire functions only, so the
/// field is smooth everywhere.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(-2.0f64..2.0).prop_map(Expr::num), (0usize..3).prop_map(Expr::var),];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), 1u8..4).prop_map(|(a, k)| Expr::binary(BinOp::Pow, a, Expr::num(k as f64))),
            inner.clone().prop_map(|a| Expr::call(Func::Sin, a)),
            inner.prop_map(|a| Expr::call(Func::Cos, a)),
        ]
    })
}

fn field(e: Expr) -> ScalarField {
    ScalarField::from_expr("f", &["q", "p", "z"], e).unwrap()
}

proptest! {
    #[test]
    fn print_parse_round_trip(e in any_expr(), x in prop::array::uniform3(-2.0f64..2.0)) {
        let n = names();
        let text = e.display(&n).to_string();
        let back = parse(&text, &n, &BTreeMap::new()).unwrap();
        prop_assert_eq!(back.display(&n).to_string(), text);
        let (a, b) = (e.eval(&x[..]), back.eval(&x[..]));
        match (a, b) {
            (Ok(u), Ok(v)) => prop_assert!(u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan())),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn gradient_matches_finite_differences(e in smooth_expr(), x in prop::array::uniform3(-1.0f64..1.0)) {
        let f = field(e);
        let g = f.gradient(&x).unwrap();
        let fd = fd_gradient(&f, &x, 1e-5).unwrap();
        let scale = 1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs())) + f.value(&x).unwrap().abs();
        for (a, b) in g.iter().zip(&fd) {
            prop_assert!((a - b).abs() <= 1e-5 * scale, "{g:?} vs {fd:?}");
        }
    }

    #[test]
    fn hessian_is_symmetric(e in smooth_expr(), x in prop::array::uniform3(-1.0f64..1.0)) {
        let h = field(e).hessian(&x).unwrap();
        prop_assert!((&h - h.transpose()).amax() <= 1e-12 * (1.0 + h.amax()));
    }
}

fn eval(src: &str, x: [f64; 3]) -> f64 {
    let n = names();
    parse(src, &n, &BTreeMap::new()).unwrap().eval(&x[..]).unwrap()
}

#[test]
fn precedence_and_associativity() {
    let x = [3.0, 2.0, 0.5];
    assert_eq!(eval("-q^2", x), -9.0);
    // variable exponents go through exp(b ln a)
    assert!((eval("p^q^p", x) / 512.0 - 1.0).abs() < 1e-14);
    assert_eq!(eval("q - p - z", x), 0.5);
    assert_eq!(eval("q / p / z", x), 3.0);
    assert_eq!(eval("q + p * z", x), 4.0);
    assert_eq!(eval("(q + p) * z", x), 2.5);
    assert_eq!(eval("p^-1", x), 0.5);
    assert_eq!(eval("2*-q", x), -6.0);
}

#[test]
fn constants_fold_at_parse_time() {
    let n = names();
    let k: BTreeMap<String, f64> = [("gamma".to_string(), 0.25)].into();
    let e = parse("gamma*z", &n, &k).unwrap();
    assert!(e.max_var() == Some(2));
    assert_eq!(e.eval(&[0.0, 0.0, 2.0][..]).unwrap(), 0.5);
    assert!(parse("beta*z", &n, &k).is_err());
}
