mod common;

use std::f64::consts::PI;

use knotbend::expr::{parse, BinOp, Expr, Func};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{central4, GOLDEN};

#[test]
fn golden_corpus_trees() {
    for (src, tree) in GOLDEN {
        assert_eq!(parse(src).unwrap().to_sexpr(), tree, "{src}");
    }
}

#[test]
fn corpus_derivatives_match_finite_differences() {
    let mut rng = StdRng::seed_from_u64(7);
    // (1 - u)^-1 and abs(sin u) restrict the range
    for (src, _) in GOLDEN {
        let e = parse(src).unwrap();
        let d = e.differentiate();
        for _ in 0..50 {
            let u = rng.random_range(0.1..0.9);
            let exact = d.evaluate(u).unwrap();
            let fd = central4(|x| e.evaluate(x).unwrap(), u, 1e-3);
            assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0), "{src} at {u}: {exact} vs {fd}");
        }
    }
}

#[test]
fn second_derivatives_match_finite_differences() {
    let mut rng = StdRng::seed_from_u64(11);
    for (src, _) in GOLDEN {
        let e = parse(src).unwrap();
        let d1 = e.differentiate();
        let d2 = d1.differentiate();
        for _ in 0..20 {
            let u = rng.random_range(0.1..0.9);
            let exact = d2.evaluate(u).unwrap();
            let fd = central4(|x| d1.evaluate(x).unwrap(), u, 1e-3);
            assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0), "{src} at {u}");
        }
    }
}

#[test]
fn printed_corpus_round_trips() {
    let mut rng = StdRng::seed_from_u64(3);
    for (src, _) in GOLDEN {
        let e = parse(src).unwrap();
        let again = parse(&e.to_string()).unwrap();
        assert_eq!(again, e, "{src}");
        for _ in 0..100 {
            let u = rng.random_range(0.1..0.9);
            let (a, b) = (e.evaluate(u).unwrap(), again.evaluate(u).unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}

#[test]
fn documented_values() {
    assert_eq!(parse("sin(u)").unwrap().evaluate(0.0).unwrap(), 0.0);
    assert_eq!(parse("pi").unwrap().evaluate(1.0).unwrap(), PI);
    assert_eq!(parse("sin(u)+2*cos(2*u)").unwrap().evaluate(0.0).unwrap(), 2.0);
    assert_eq!(parse("u").unwrap().differentiate().evaluate(5.0).unwrap(), 1.0);
    assert_eq!(parse("pi").unwrap().differentiate().evaluate(5.0).unwrap(), 0.0);
    let err = parse("2*").unwrap_err();
    assert_eq!(err.offset, 2);
}

#[test]
fn antiderivative_of_cosine() {
    let n = 256;
    let table = parse("cos(u)").unwrap().antiderivative_table(2.0 * PI, n, 0.0).unwrap();
    let err = table
        .iter()
        .enumerate()
        .map(|(i, f)| (f - (2.0 * PI * i as f64 / n as f64).sin()).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-10, "{err:e}");
}

#[test]
fn antiderivative_carries_the_constant() {
    let table = parse("2*u").unwrap().antiderivative_table(1.0, 16, 3.0).unwrap();
    for (i, f) in table.iter().enumerate() {
        let u = i as f64 / 16.0;
        assert!((f - (3.0 + u * u)).abs() < 1e-14);
    }
}

#[test]
fn domain_errors_are_reported() {
    assert!(parse("log(u)").unwrap().evaluate(-1.0).is_err());
    assert!(parse("1/u").unwrap().evaluate(0.0).is_err());
    assert!(parse("sqrt(u)").unwrap().evaluate(-0.5).is_err());
}

// Trees the parser can produce: literals are never negative, signs are `Neg` nodes.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0f64..5.0).prop_map(Expr::num),
        Just(Expr::var()),
        Just(Expr::Pi),
        Just(Expr::E),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::negate),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Mul, a, b)),
            inner.clone().prop_map(|a| Expr::call(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Cos, a)),
            inner.prop_map(|a| Expr::call(Func::Exp, Expr::call(Func::Sin, a))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn random_trees_round_trip(e in arb_expr(), u in -3.0f64..3.0) {
        let again = parse(&e.to_string()).unwrap();
        prop_assert_eq!(&again, &e);
        let (a, b) = (e.evaluate(u), again.evaluate(u));
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn random_tree_derivatives(e in arb_expr(), u in -2.0f64..2.0) {
        let d = e.differentiate().evaluate(u).unwrap();
        let fd = central4(|x| e.evaluate(x).unwrap(), u, 1e-3);
        prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1.0), "{} at {}: {} vs {}", e, u, d, fd);
    }

    #[test]
    fn differentiation_is_linear(a in arb_expr(), b in arb_expr(), s in -3.0f64..3.0, u in -2.0f64..2.0) {
        let combo = Expr::binary(BinOp::Add, a.clone(), Expr::binary(BinOp::Mul, Expr::num(s), b.clone()));
        let lhs = combo.differentiate().evaluate(u).unwrap();
        let rhs = a.differentiate().evaluate(u).unwrap() + s * b.differentiate().evaluate(u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
    }
}
