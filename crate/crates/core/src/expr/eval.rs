use super::{BinOp, Expr, Func};

/// Evaluation failure; `location` is the printed subexpression that failed.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("domain error in `{location}`: {reason} (argument {argument}) at u = {u}")]
    Domain {
        location: String,
        reason: &'static str,
        argument: f64,
        u: f64,
    },
    #[error("non-finite result from `{location}` at u = {u}")]
    NonFinite { location: String, u: f64 },
}

pub(super) fn evaluate(expr: &Expr, u: f64) -> Result<f64, EvalError> {
    let value = match expr {
        Expr::Num(v) => *v,
        Expr::Pi => std::f64::consts::PI,
        Expr::E => std::f64::consts::E,
        Expr::Var => u,
        Expr::Neg(a) => -evaluate(a, u)?,
        Expr::Binary(op, a, b) => {
            let x = evaluate(a, u)?;
            let y = evaluate(b, u)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(domain(expr, "division by zero", y, u));
                    }
                    x / y
                }
                BinOp::Pow => {
                    if x == 0.0 && y < 0.0 {
                        return Err(domain(expr, "zero raised to a negative power", y, u));
                    }
                    let r = x.powf(y);
                    if r.is_nan() {
                        return Err(domain(expr, "negative base with non-integer exponent", x, u));
                    }
                    r
                }
            }
        }
        Expr::Call(func, a) => {
            let x = evaluate(a, u)?;
            match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Abs => x.abs(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(domain(expr, "logarithm of a non-positive number", x, u));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(domain(expr, "square root of a negative number", x, u));
                    }
                    x.sqrt()
                }
            }
        }
    };
    if !value.is_finite() {
        return Err(EvalError::NonFinite {
            location: expr.to_string(),
            u,
        });
    }
    Ok(value)
}

fn domain(expr: &Expr, reason: &'static str, argument: f64, u: f64) -> EvalError {
    EvalError::Domain {
        location: expr.to_string(),
        reason,
        argument,
        u,
    }
}
