//! Value-preserving rewrites into stable kernels.
//!
//! | pattern                           | replacement                       |
//! |-----------------------------------|-----------------------------------|
//! | `A / cosh(u)`, `A / cosh(u)^k`    | `A * sech(u)`, `A * sech(u)^k`    |
//! | `cosh(u)^(-k)`                    | `sech(u)^k`                       |
//! | `N / sinh(u)`, `N` has factor `u` | `(N/u) * x_over_sinh(u)`          |
//! | `N / sinh(c*x)`, `N` has factor `x` | `(N/x)/c * x_over_sinh(c*x)`    |
//! | `u^(-ln(u))`                      | `self_log_power(u)`               |
//! | `sin(u)/u`, `sin(u)^2/u^2`        | `sin_over_x(u)`, `sin_over_x(u)^2`|

use super::{BinaryOp, Expr, KernelKind, UnaryOp};

/// Rewrites every matching subtree, bottom-up. Trees with no match are
/// returned unchanged.
pub fn rewrite_stable(e: &Expr) -> Expr {
    let e = match e {
        Expr::Unary(op, c) => Expr::unary(*op, rewrite_stable(c)),
        Expr::Kernel(kind, c) => Expr::kernel(*kind, rewrite_stable(c)),
        Expr::Binary(op, l, r) => Expr::binary(*op, rewrite_stable(l), rewrite_stable(r)),
        leaf => leaf.clone(),
    };
    rewrite_node(e)
}

fn as_unary(e: &Expr, op: UnaryOp) -> Option<&Expr> {
    match e {
        Expr::Unary(o, c) if *o == op => Some(c),
        _ => None,
    }
}

fn as_binary(e: &Expr, op: BinaryOp) -> Option<(&Expr, &Expr)> {
    match e {
        Expr::Binary(o, l, r) if *o == op => Some((l, r)),
        _ => None,
    }
}

fn sech(u: &Expr) -> Expr {
    Expr::kernel(KernelKind::Sech, u.clone())
}

/// `lhs * rhs`, dropping a literal-one multiplicand.
fn times(lhs: Expr, rhs: Expr) -> Expr {
    if lhs.is_literal_one() {
        rhs
    } else {
        Expr::mul(lhs, rhs)
    }
}

fn mul_factors(e: &Expr, out: &mut Vec<Expr>) {
    match as_binary(e, BinaryOp::Mul) {
        Some((l, r)) => {
            mul_factors(l, out);
            mul_factors(r, out);
        }
        None => out.push(e.clone()),
    }
}

fn product(factors: Vec<Expr>) -> Option<Expr> {
    factors.into_iter().reduce(Expr::mul)
}

/// Removes one factor equal to `target` from the product chain `n`.
fn remove_factor(n: &Expr, target: &Expr) -> Option<Option<Expr>> {
    let mut factors = Vec::new();
    mul_factors(n, &mut factors);
    let i = factors.iter().position(|f| f == target)?;
    factors.remove(i);
    Some(product(factors))
}

/// `c*x` or `x*c` with constant `c`.
fn linear_coefficient(u: &Expr) -> Option<&Expr> {
    let (l, r) = as_binary(u, BinaryOp::Mul)?;
    match (l, r) {
        (c, Expr::Var) | (Expr::Var, c) if !c.has_var() => Some(c),
        _ => None,
    }
}

fn rewrite_node(e: Expr) -> Expr {
    if let Some((num, den)) = as_binary(&e, BinaryOp::Div) {
        // A / cosh(u)
        if let Some(u) = as_unary(den, UnaryOp::Cosh) {
            return times(num.clone(), sech(u));
        }
        // A / cosh(u)^k
        if let Some((base, k)) = as_binary(den, BinaryOp::Pow) {
            if let Some(u) = as_unary(base, UnaryOp::Cosh) {
                return times(num.clone(), Expr::pow(sech(u), k.clone()));
            }
        }
        // N / sinh(u)
        if let Some(u) = as_unary(den, UnaryOp::Sinh) {
            let kernel = Expr::kernel(KernelKind::XOverSinh, u.clone());
            if let Some(rest) = remove_factor(num, u) {
                return match rest {
                    Some(rest) => Expr::mul(rest, kernel),
                    None => kernel,
                };
            }
            if let Some(c) = linear_coefficient(u) {
                if let Some(rest) = remove_factor(num, &Expr::Var) {
                    let rest = rest.unwrap_or_else(|| Expr::lit("1"));
                    return Expr::mul(Expr::div(rest, c.clone()), kernel);
                }
            }
        }
        // sin(u)/u
        if let Some(u) = as_unary(num, UnaryOp::Sin) {
            if u == den {
                return Expr::kernel(KernelKind::SinOverX, u.clone());
            }
        }
        // sin(u)^2/u^2
        if let (Some((sb, sk)), Some((db, dk))) = (as_binary(num, BinaryOp::Pow), as_binary(den, BinaryOp::Pow)) {
            if let Some(u) = as_unary(sb, UnaryOp::Sin) {
                if u == db && sk == dk {
                    return Expr::pow(Expr::kernel(KernelKind::SinOverX, u.clone()), sk.clone());
                }
            }
        }
    }
    if let Some((base, exponent)) = as_binary(&e, BinaryOp::Pow) {
        // cosh(u)^(-k)
        if let (Some(u), Some(k)) = (as_unary(base, UnaryOp::Cosh), as_unary(exponent, UnaryOp::Neg)) {
            return if k.is_literal_one() {
                sech(u)
            } else {
                Expr::pow(sech(u), k.clone())
            };
        }
        // u^(-ln(u))
        if let Some(l) = as_unary(exponent, UnaryOp::Neg).and_then(|n| as_unary(n, UnaryOp::Ln)) {
            if l == base {
                return Expr::kernel(KernelKind::SelfLogPower, base.clone());
            }
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ConstantName;
    use crate::expr::parse_expression;

    fn rw(s: &str) -> Expr {
        rewrite_stable(&parse_expression(s).unwrap())
    }

    fn p(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn sech_patterns() {
        assert_eq!(rw("1/cosh(2*x)"), sech(&p("2*x")));
        assert_eq!(rw("cosh(x)^(-1)"), sech(&Expr::Var));
        assert_eq!(rw("cosh(x)^-2"), Expr::pow(sech(&Expr::Var), p("2")));
        assert_eq!(
            rw("sinh(x)/cosh(x)^2"),
            Expr::mul(p("sinh(x)"), Expr::pow(sech(&Expr::Var), p("2")))
        );
        assert_eq!(rw("exp(-x^2)/cosh(pi*x)"), Expr::mul(p("exp(-x^2)"), sech(&p("pi*x"))));
    }

    #[test]
    fn sinh_quotient_patterns() {
        let pi = Expr::Const(ConstantName::Pi);
        assert_eq!(
            rw("x/sinh(pi*x)"),
            Expr::mul(
                Expr::div(p("1"), pi.clone()),
                Expr::kernel(KernelKind::XOverSinh, p("pi*x"))
            )
        );
        assert_eq!(rw("x/sinh(x)"), Expr::kernel(KernelKind::XOverSinh, Expr::Var));
        assert_eq!(
            rw("x*(3 - 4*pi*x^2)*exp(-pi*x*(x + 1))/sinh(pi*x)"),
            Expr::mul(
                Expr::div(p("(3 - 4*pi*x^2)*exp(-pi*x*(x + 1))"), pi),
                Expr::kernel(KernelKind::XOverSinh, p("pi*x"))
            )
        );
        // no factor of x in the numerator: unchanged
        assert_eq!(rw("1/sinh(x)"), p("1/sinh(x)"));
    }

    #[test]
    fn other_patterns() {
        assert_eq!(rw("x^(-ln(x))"), Expr::kernel(KernelKind::SelfLogPower, Expr::Var));
        assert_eq!(
            rw("x^(-ln(x))/(1 + x^2)"),
            Expr::div(Expr::kernel(KernelKind::SelfLogPower, Expr::Var), p("1 + x^2"))
        );
        assert_eq!(
            rw("sin(x)^2/x^2"),
            Expr::pow(Expr::kernel(KernelKind::SinOverX, Expr::Var), p("2"))
        );
        assert_eq!(rw("sin(x)/x"), Expr::kernel(KernelKind::SinOverX, Expr::Var));
        assert_eq!(rw("x + 1"), p("x + 1"));
        assert_eq!(rw("sin(x)/(2*x)"), p("sin(x)/(2*x)"));
    }
}
