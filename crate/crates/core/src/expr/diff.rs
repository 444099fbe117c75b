//! Symbolic differentiation.
//!
//! The builders below fold literal-only subtrees and drop additive zeros and
//! multiplicative ones, so repeated differentiation stays small. No other
//! rewriting is attempted.

use std::sync::Arc;

use super::{BinOp, Expr, Func};

pub(super) fn derivative(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Pi | Expr::E => Expr::Num(0.0),
        Expr::Var => Expr::Num(1.0),
        Expr::Neg(a) => neg(derivative(a)),
        Expr::Binary(op, a, b) => {
            let da = derivative(a);
            let db = derivative(b);
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, share(b)), mul(share(a), db)),
                BinOp::Div => div(
                    sub(mul(da, share(b)), mul(share(a), db)),
                    pow(share(b), Expr::Num(2.0)),
                ),
                BinOp::Pow => {
                    if b.is_constant() {
                        // d(a^c) = c a^(c-1) a'
                        let lowered = sub(share(b), Expr::Num(1.0));
                        mul(mul(share(b), pow(share(a), lowered)), da)
                    } else {
                        // d(a^b) = a^b (b' ln a + b a'/a)
                        let log_term = mul(db, Expr::call(Func::Log, share(a)));
                        let ratio = div(mul(share(b), da), share(a));
                        mul(e.clone(), add(log_term, ratio))
                    }
                }
            }
        }
        Expr::Call(func, a) => {
            let da = derivative(a);
            let outer = match func {
                Func::Sin => Expr::call(Func::Cos, share(a)),
                Func::Cos => neg(Expr::call(Func::Sin, share(a))),
                Func::Tan => div(
                    Expr::Num(1.0),
                    pow(Expr::call(Func::Cos, share(a)), Expr::Num(2.0)),
                ),
                Func::Exp => e.clone(),
                Func::Log => div(Expr::Num(1.0), share(a)),
                Func::Sqrt => div(Expr::Num(1.0), mul(Expr::Num(2.0), e.clone())),
                // a / |a| is undefined at 0 and reports a domain error there
                Func::Abs => div(share(a), e.clone()),
            };
            mul(outer, da)
        }
    }
}

// shallow: the clone shares the children of `e`
fn share(e: &Arc<Expr>) -> Expr {
    (**e).clone()
}

fn num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        _ => None,
    }
}

fn fold(op: BinOp, a: f64, b: f64) -> Option<f64> {
    let v = match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a / b,
        BinOp::Pow => a.powf(b),
    };
    v.is_finite().then_some(v)
}

fn build(op: BinOp, a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (num(&a), num(&b)) {
        if let Some(v) = fold(op, x, y) {
            return Expr::Num(v);
        }
    }
    Expr::binary(op, a, b)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => build(BinOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (_, Some(0.0)) => a,
        (Some(0.0), None) => neg(b),
        _ => build(BinOp::Sub, a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(0.0), _) | (_, Some(0.0)) => Expr::Num(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        _ => build(BinOp::Mul, a, b),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(0.0), _) => Expr::Num(0.0),
        (_, Some(1.0)) => a,
        _ => build(BinOp::Div, a, b),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match num(&b) {
        Some(1.0) => a,
        Some(0.0) => Expr::Num(1.0),
        _ => build(BinOp::Pow, a, b),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => Expr::Num(-v),
        Expr::Neg(inner) => (*inner).clone(),
        other => Expr::negate(other),
    }
}
