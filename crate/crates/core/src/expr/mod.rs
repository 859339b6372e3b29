//! Integrand expressions over the single variable `x`.
//!
//! Expressions are parsed from a small closed grammar, printed back in a
//! canonical form, rewritten into numerically stable kernels, and evaluated
//! at arbitrary precision.

mod eval;
mod parse;
mod print;
mod rewrite;

use std::fmt;

pub use eval::{eval_expr, CompiledExpr};
pub use parse::parse_expression;
pub use print::print_expression;
pub use rewrite::rewrite_stable;

use crate::constants::ConstantName;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Atan,
    Sinh,
    Cosh,
    Tanh,
}

impl UnaryOp {
    pub const FUNCTIONS: [UnaryOp; 9] = [
        UnaryOp::Exp,
        UnaryOp::Ln,
        UnaryOp::Sqrt,
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Atan,
        UnaryOp::Sinh,
        UnaryOp::Cosh,
        UnaryOp::Tanh,
    ];

    /// Function name in the grammar; `None` for negation.
    pub fn name(self) -> Option<&'static str> {
        Some(match self {
            UnaryOp::Neg => return None,
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Atan => "atan",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
        })
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::FUNCTIONS.into_iter().find(|f| f.name() == Some(name))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Stable replacements for hazardous composite forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `1/cosh(u)`
    Sech,
    /// `u/sinh(u)`
    XOverSinh,
    /// `u^(-ln(u))`
    SelfLogPower,
    /// `sin(u)/u`
    SinOverX,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Decimal literal, kept as text and converted at evaluation precision.
    Literal(String),
    Const(ConstantName),
    Var,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Kernel(KernelKind, Box<Expr>),
}

impl Expr {
    pub fn lit(text: impl Into<String>) -> Expr {
        Expr::Literal(text.into())
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Expr {
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn kernel(kind: KernelKind, child: Expr) -> Expr {
        Expr::Kernel(kind, Box::new(child))
    }

    pub fn neg(child: Expr) -> Expr {
        Expr::unary(UnaryOp::Neg, child)
    }

    pub fn mul(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, lhs, rhs)
    }

    pub fn div(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Div, lhs, rhs)
    }

    pub fn pow(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Pow, lhs, rhs)
    }

    /// True when the tree references the integration variable.
    pub fn has_var(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Literal(_) | Expr::Const(_) => false,
            Expr::Unary(_, c) | Expr::Kernel(_, c) => c.has_var(),
            Expr::Binary(_, l, r) => l.has_var() || r.has_var(),
        }
    }

    pub fn has_kernel(&self) -> bool {
        match self {
            Expr::Kernel(..) => true,
            Expr::Var | Expr::Literal(_) | Expr::Const(_) => false,
            Expr::Unary(_, c) => c.has_kernel(),
            Expr::Binary(_, l, r) => l.has_kernel() || r.has_kernel(),
        }
    }

    /// Numeric value of a literal if it is an integer small enough for `i64`.
    pub(crate) fn integer_literal(&self) -> Option<i64> {
        match self {
            Expr::Literal(t) => {
                if t.bytes().all(|b| b.is_ascii_digit()) {
                    t.parse().ok()
                } else {
                    let v: f64 = t.parse().ok()?;
                    (v.fract() == 0.0 && v.abs() < 9.0e15).then_some(v as i64)
                }
            }
            Expr::Unary(UnaryOp::Neg, c) => c.integer_literal().map(|v| -v),
            _ => None,
        }
    }

    pub(crate) fn is_literal_one(&self) -> bool {
        matches!(self, Expr::Literal(_)) && self.integer_literal() == Some(1)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expression(self))
    }
}
