use super::print::print_expression;
use super::{BinaryOp, Expr, KernelKind, UnaryOp};
use crate::constants;
use crate::error::{Error, Result};
use crate::kernels;
use crate::precision::{PrecisionContext, Real};

enum Node<'e> {
    Value(Real),
    Var,
    Unary(UnaryOp, Box<Node<'e>>, &'e Expr),
    Add(Box<Node<'e>>, Box<Node<'e>>),
    Sub(Box<Node<'e>>, Box<Node<'e>>),
    /// Flattened `*` and `/` chain; `true` marks a divisor.
    Product(Vec<(Node<'e>, bool)>, &'e Expr),
    PowInt(Box<Node<'e>>, i64, &'e Expr),
    PowReal(Box<Node<'e>>, Box<Node<'e>>, &'e Expr),
    Kernel(KernelKind, Box<Node<'e>>, &'e Expr),
}

/// An expression prepared for repeated evaluation at one precision:
/// literals and named constants are converted once and `x`-free subtrees
/// are folded to values.
pub struct CompiledExpr<'e> {
    root: Node<'e>,
    ctx: PrecisionContext,
}

fn domain(src: &Expr, reason: &str) -> Error {
    Error::domain(print_expression(src), reason)
}

fn finite(v: Real, src: &Expr) -> Result<Real> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(src, "non-finite intermediate value"))
    }
}

fn flatten<'e>(e: &'e Expr, divisor: bool, out: &mut Vec<(&'e Expr, bool)>) {
    match e {
        Expr::Binary(BinaryOp::Mul, l, r) if !divisor => {
            flatten(l, false, out);
            flatten(r, false, out);
        }
        Expr::Binary(BinaryOp::Div, l, r) if !divisor => {
            flatten(l, false, out);
            out.push((r, true));
        }
        _ => out.push((e, divisor)),
    }
}

impl<'e> CompiledExpr<'e> {
    pub fn new(e: &'e Expr, ctx: &PrecisionContext) -> Result<Self> {
        let mut c = CompiledExpr {
            root: Node::Var,
            ctx: *ctx,
        };
        c.root = c.build(e)?;
        Ok(c)
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    fn build(&self, e: &'e Expr) -> Result<Node<'e>> {
        let node = self.build_raw(e)?;
        if e.has_var() || matches!(node, Node::Value(_)) {
            return Ok(node);
        }
        let zero = Real::zero(&self.ctx);
        Ok(Node::Value(self.eval_node(&node, &zero)?))
    }

    fn build_raw(&self, e: &'e Expr) -> Result<Node<'e>> {
        let ctx = &self.ctx;
        Ok(match e {
            Expr::Literal(t) => Node::Value(
                Real::parse_decimal(t, ctx).map_err(|_| domain(e, "malformed numeric literal"))?,
            ),
            Expr::Const(c) => Node::Value(constants::constant(*c, ctx)),
            Expr::Var => Node::Var,
            Expr::Unary(op, c) => Node::Unary(*op, Box::new(self.build(c)?), e),
            Expr::Kernel(kind, c) => Node::Kernel(*kind, Box::new(self.build(c)?), e),
            Expr::Binary(BinaryOp::Add, l, r) => Node::Add(Box::new(self.build(l)?), Box::new(self.build(r)?)),
            Expr::Binary(BinaryOp::Sub, l, r) => Node::Sub(Box::new(self.build(l)?), Box::new(self.build(r)?)),
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => {
                let mut parts = Vec::new();
                flatten(e, false, &mut parts);
                let factors = parts
                    .into_iter()
                    .map(|(f, div)| Ok((self.build(f)?, div)))
                    .collect::<Result<Vec<_>>>()?;
                Node::Product(factors, e)
            }
            Expr::Binary(BinaryOp::Pow, l, r) => match r.integer_literal() {
                Some(n) => Node::PowInt(Box::new(self.build(l)?), n, e),
                None => Node::PowReal(Box::new(self.build(l)?), Box::new(self.build(r)?), e),
            },
        })
    }

    /// Value at `x`, rounded to the working precision.
    pub fn eval(&self, x: &Real) -> Result<Real> {
        let x = x.with_precision(&self.ctx);
        Ok(self.eval_node(&self.root, &x)?.with_precision(&self.ctx))
    }

    fn eval_node(&self, node: &Node<'e>, x: &Real) -> Result<Real> {
        let ctx = &self.ctx;
        match node {
            Node::Value(v) => Ok(v.clone()),
            Node::Var => Ok(x.clone()),
            Node::Add(l, r) => Ok(self.eval_node(l, x)? + self.eval_node(r, x)?),
            Node::Sub(l, r) => Ok(self.eval_node(l, x)? - self.eval_node(r, x)?),
            Node::Unary(op, c, src) => {
                let v = self.eval_node(c, x)?;
                self.unary(*op, v, src)
            }
            Node::Kernel(kind, c, src) => {
                let v = self.eval_node(c, x)?;
                let r = match kind {
                    KernelKind::Sech => kernels::stable_sech(&v, ctx),
                    KernelKind::XOverSinh => kernels::x_over_sinh(&v, ctx),
                    KernelKind::SelfLogPower => kernels::self_log_power(&v, ctx),
                    KernelKind::SinOverX => kernels::sin_over_x(&v, ctx),
                };
                r.map_err(|err| match err {
                    Error::Domain { reason, .. } => domain(src, &reason),
                    other => other,
                })
            }
            Node::Product(factors, src) => self.product(factors, x, src),
            Node::PowInt(base, n, src) => {
                let b = self.eval_node(base, x)?;
                if *n < 0 && b.is_zero() {
                    return Err(domain(src, "zero raised to a negative power"));
                }
                finite(b.powi(*n), src)
            }
            Node::PowReal(base, exponent, src) => {
                let b = self.eval_node(base, x)?;
                let p = self.eval_node(exponent, x)?;
                if b.is_zero() {
                    return if p.is_positive() {
                        Ok(Real::zero(ctx))
                    } else {
                        Err(domain(src, "zero raised to a non-positive power"))
                    };
                }
                if b.is_negative() {
                    return Err(domain(src, "negative base with non-integer exponent"));
                }
                finite(b.powf(&p), src)
            }
        }
    }

    fn product(&self, factors: &[(Node<'e>, bool)], x: &Real, src: &Expr) -> Result<Real> {
        let ctx = &self.ctx;
        let mut acc = Real::one(ctx);
        let mut vanished = false;
        for (node, divisor) in factors {
            if vanished && !divisor {
                continue;
            }
            let v = self.eval_node(node, x)?;
            if *divisor {
                if v.is_zero() {
                    return Err(domain(src, "division by zero"));
                }
                if vanished {
                    continue;
                }
                acc = acc / v;
            } else {
                acc = acc * v;
            }
            if !acc.is_finite() {
                return Err(domain(src, "non-finite intermediate value"));
            }
            if acc.is_negligible(ctx) {
                // Remaining multipliers are skipped; divisors are still
                // checked for an exact zero.
                vanished = true;
            }
        }
        Ok(if vanished { Real::zero(ctx) } else { acc })
    }

    fn unary(&self, op: UnaryOp, v: Real, src: &Expr) -> Result<Real> {
        let ctx = &self.ctx;
        let r = match op {
            UnaryOp::Neg => -v,
            UnaryOp::Exp => {
                let limit = f64::from(ctx.working_digits() + crate::precision::UNDERFLOW_MARGIN_DIGITS)
                    * std::f64::consts::LN_10;
                if v.to_f64() < -limit {
                    Real::zero(ctx)
                } else {
                    v.exp()
                }
            }
            UnaryOp::Ln => {
                if !v.is_positive() {
                    return Err(domain(src, "logarithm of a non-positive value"));
                }
                v.ln()
            }
            UnaryOp::Sqrt => {
                if v.is_negative() {
                    return Err(domain(src, "square root of a negative value"));
                }
                v.sqrt()
            }
            UnaryOp::Sin => v.sin(),
            UnaryOp::Cos => v.cos(),
            UnaryOp::Atan => v.atan(),
            UnaryOp::Sinh => v.sinh(),
            UnaryOp::Cosh => v.cosh(),
            UnaryOp::Tanh => v.tanh(),
        };
        finite(r, src)
    }
}

/// Evaluates `e` at `x` with working precision from `ctx`.
pub fn eval_expr(e: &Expr, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    CompiledExpr::new(e, ctx)?.eval(x)
}
