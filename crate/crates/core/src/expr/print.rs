use super::{BinaryOp, Expr, KernelKind, UnaryOp};
use crate::constants::ConstantName;

// Binding strength; higher binds tighter.
const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

/// Composite form of a stable kernel, for printing.
pub(crate) fn kernel_composite(kind: KernelKind, u: &Expr) -> Expr {
    match kind {
        KernelKind::Sech => Expr::div(Expr::lit("1"), Expr::unary(UnaryOp::Cosh, u.clone())),
        KernelKind::XOverSinh => Expr::div(u.clone(), Expr::unary(UnaryOp::Sinh, u.clone())),
        KernelKind::SelfLogPower => Expr::pow(u.clone(), Expr::neg(Expr::unary(UnaryOp::Ln, u.clone()))),
        KernelKind::SinOverX => Expr::div(Expr::unary(UnaryOp::Sin, u.clone()), u.clone()),
    }
}

fn strength(e: &Expr) -> u8 {
    match e {
        Expr::Literal(t) if t.starts_with('-') => NEG,
        Expr::Literal(_) | Expr::Var => ATOM,
        Expr::Const(ConstantName::SqrtPi) => ATOM,
        Expr::Const(_) => ATOM,
        Expr::Unary(UnaryOp::Neg, _) => NEG,
        Expr::Unary(..) => ATOM,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => ADD,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => MUL,
        Expr::Binary(BinaryOp::Pow, ..) => POW,
        Expr::Kernel(kind, u) => strength(&kernel_composite(*kind, u)),
    }
}

fn write_wrapped(out: &mut String, e: &Expr, paren: bool) {
    if paren {
        out.push('(');
        write(out, e);
        out.push(')');
    } else {
        write(out, e);
    }
}

fn write(out: &mut String, e: &Expr) {
    match e {
        Expr::Literal(t) => out.push_str(t),
        Expr::Var => out.push('x'),
        Expr::Const(ConstantName::SqrtPi) => out.push_str("sqrt(pi)"),
        Expr::Const(c) => out.push_str(c.as_str()),
        Expr::Unary(UnaryOp::Neg, c) => {
            out.push('-');
            write_wrapped(out, c, strength(c) < NEG);
        }
        Expr::Unary(op, c) => {
            out.push_str(op.name().expect("function has a name"));
            out.push('(');
            write(out, c);
            out.push(')');
        }
        Expr::Binary(op, l, r) => {
            let (sym, level) = match op {
                BinaryOp::Add => (" + ", ADD),
                BinaryOp::Sub => (" - ", ADD),
                BinaryOp::Mul => ("*", MUL),
                BinaryOp::Div => ("/", MUL),
                BinaryOp::Pow => ("^", POW),
            };
            if *op == BinaryOp::Pow {
                // base must be atomic; exponent is a factor
                write_wrapped(out, l, strength(l) < ATOM);
                out.push('^');
                write_wrapped(out, r, strength(r) < NEG);
            } else {
                write_wrapped(out, l, strength(l) < level);
                out.push_str(sym);
                write_wrapped(out, r, strength(r) <= level);
            }
        }
        Expr::Kernel(kind, u) => write(out, &kernel_composite(*kind, u)),
    }
}

/// Canonical text of `e`; reparses to the same tree. Stable kernels print
/// as the composite form they replace.
pub fn print_expression(e: &Expr) -> String {
    let mut out = String::new();
    write(&mut out, e);
    out
}
