//! Symbolic expressions in the single variable `u`.
//!
//! Sources are parsed once into an immutable tree ([`Expr`]) which can then be
//! evaluated many times, differentiated symbolically, and tabulated as a
//! numeric antiderivative. Children are reference counted, so cloning an
//! expression or sharing subtrees between derivatives is cheap, and trees can
//! be read from several threads at once.

mod diff;
mod eval;
mod parse;

use std::fmt;
use std::sync::Arc;

pub use eval::EvalError;
pub use parse::{parse, ParseError};

use crate::quadrature::{self, QuadratureError};

/// Elementary functions accepted by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Numeric literal.
    Num(f64),
    /// The constant pi.
    Pi,
    /// Euler's number.
    E,
    /// The curve parameter `u`.
    Var,
    Neg(Arc<Expr>),
    Binary(BinOp, Arc<Expr>, Arc<Expr>),
    Call(Func, Arc<Expr>),
}

impl Expr {
    pub fn num(value: f64) -> Expr {
        Expr::Num(value)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Arc::new(lhs), Arc::new(rhs))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Arc::new(arg))
    }

    pub fn negate(arg: Expr) -> Expr {
        Expr::Neg(Arc::new(arg))
    }

    /// Value of a node without free variable, if it is a literal or named constant.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Pi => Some(std::f64::consts::PI),
            Expr::E => Some(std::f64::consts::E),
            _ => None,
        }
    }

    /// `true` when the tree does not reference `u`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::E => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Number of nodes in the tree (shared subtrees counted once per use).
    pub fn node_count(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Pi | Expr::E | Expr::Var => 1,
            Expr::Neg(a) | Expr::Call(_, a) => 1 + a.node_count(),
            Expr::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Prefix rendering used by golden tests, e.g. `(+ (sin u) (* 2 u))`.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut out);
        out
    }

    fn write_sexpr(&self, out: &mut String) {
        match self {
            Expr::Num(v) => out.push_str(&format_number(*v)),
            Expr::Pi => out.push_str("pi"),
            Expr::E => out.push('e'),
            Expr::Var => out.push('u'),
            Expr::Neg(a) => {
                out.push_str("(neg ");
                a.write_sexpr(out);
                out.push(')');
            }
            Expr::Binary(op, a, b) => {
                out.push('(');
                out.push_str(op.symbol());
                out.push(' ');
                a.write_sexpr(out);
                out.push(' ');
                b.write_sexpr(out);
                out.push(')');
            }
            Expr::Call(f, a) => {
                out.push('(');
                out.push_str(f.name());
                out.push(' ');
                a.write_sexpr(out);
                out.push(')');
            }
        }
    }

    /// Symbolic derivative with respect to `u`.
    pub fn differentiate(&self) -> Expr {
        diff::derivative(self)
    }

    /// The derivatives of orders `0..=order`, each obtained by differentiating the previous one.
    pub fn derivatives(&self, order: usize) -> Vec<Expr> {
        let mut out = Vec::with_capacity(order + 1);
        out.push(self.clone());
        for k in 0..order {
            let next = out[k].differentiate();
            out.push(next);
        }
        out
    }

    pub fn evaluate(&self, u: f64) -> Result<f64, EvalError> {
        eval::evaluate(self, u)
    }

    /// Tabulates `F(u_i) = constant + ∫_0^{u_i} self(u) du` at `u_i = i * period / n`
    /// for `i = 0..=n`.
    ///
    /// The integral is accumulated interval by interval with the two-point
    /// Hermite rule, which uses the integrand and its first two symbolic
    /// derivatives at the grid nodes and is sixth-order accurate. `F(0)` is
    /// exactly `constant`.
    pub fn antiderivative_table(
        &self,
        period: f64,
        n: usize,
        constant: f64,
    ) -> Result<Vec<f64>, AntiderivativeError> {
        if n < 16 || !n.is_multiple_of(2) {
            return Err(AntiderivativeError::SampleCount(n));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(AntiderivativeError::Period(period));
        }
        let derivs = self.derivatives(2);
        let nodes: Vec<f64> = (0..=n).map(|i| period * i as f64 / n as f64).collect();
        let mut jets = Vec::with_capacity(nodes.len());
        for &u in &nodes {
            let mut jet = [0.0; 3];
            for (slot, d) in jet.iter_mut().zip(&derivs) {
                *slot = d.evaluate(u)?;
            }
            jets.push(jet);
        }
        Ok(quadrature::cumulative_hermite(&nodes, &jets, constant)?)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AntiderivativeError {
    #[error("antiderivative table needs an even sample count >= 16, got {0}")]
    SampleCount(usize),
    #[error("period must be positive and finite, got {0}")]
    Period(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Shortest representation that parses back to the same `f64`.
fn format_number(v: f64) -> String {
    if v.is_finite() && v < 0.0 {
        format!("(-{})", -v)
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesised infix form that the parser accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => f.write_str(&format_number(*v)),
            Expr::Pi => f.write_str("pi"),
            Expr::E => f.write_str("e"),
            Expr::Var => f.write_str("u"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
