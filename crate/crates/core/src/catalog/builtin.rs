use super::{Identity, IntegralTerm, SideSpec};
use crate::expr::{parse_expression, Expr};
use crate::quadrature::Interval;

enum Item {
    Inf(&'static str),
    Unit(&'static str),
    Finite(&'static str, &'static str, &'static str),
    Const(&'static str),
}

use Item::*;

// Right-side prefactors are folded into the integrands.
const TABLE: [(u32, &[Item], &[Item], &str); 12] = [
    (
        1,
        &[Inf("x*(gamma*sinh(gamma*x)/cosh(gamma*x)^2*exp(-x^2/pi^2) + sqrt(pi)*sinh(x)/cosh(x)^2*exp(-gamma^2*x^2))")],
        &[Inf("exp(-x^2/pi^2)/cosh(gamma*x)")],
        "Euler's constant in the hyperbolic scale",
    ),
    (
        2,
        &[Inf("x*(1/pi*exp(-x^2/pi^2) + 1/sqrt(pi)*exp(-x^2))*sinh(x)/cosh(x)^2")],
        &[Inf("exp(-x^2)/cosh(pi*x)")],
        "transform at y = pi",
    ),
    (
        3,
        &[Inf("x*(exp(-x^2/pi) + 2*exp(-16*x^2/pi))*sinh(2*x)/cosh(2*x)^2")],
        &[Inf("exp(-4*x^2/pi)/cosh(4*x)")],
        "",
    ),
    (
        4,
        &[Inf("(sinh(x)/cosh(x)^2 + pi^(3/2)*sinh(pi*x)/cosh(pi*x)^2)*x*exp(-x^2)")],
        &[Inf("exp(-x^2)/cosh(x)")],
        "",
    ),
    (
        5,
        &[Inf("x*exp(-x^2/pi)*sinh(x)/cosh(x)^2")],
        &[Inf("exp(-4*x^2/pi)/cosh(2*x)")],
        "",
    ),
    (
        6,
        &[Unit("x^(-ln(x))/(1 + x^2)")],
        &[Inf("exp(-4*x^2/pi)/cosh(2*sqrt(pi)*x)")],
        "left side on the unit interval",
    ),
    (
        7,
        &[Inf("x^2*exp(-x^2)/cosh(sqrt(pi)*x)")],
        &[Inf("1/4*exp(-x^2)/cosh(sqrt(pi)*x)")],
        "fixed point of the reciprocity",
    ),
    (
        8,
        &[Inf("(exp(-x^2/pi^2) + pi^(5/2)*exp(-x^2))*x^2/cosh(x)")],
        &[Inf("pi^2/2*exp(-x^2/pi^2)/cosh(x)")],
        "",
    ),
    (
        9,
        &[Inf("(sqrt(pi)*exp(-x^2/3) + 9*sqrt(3)*pi^(-2)*exp(-3*x^2/pi^2))*x^2/cosh(x)")],
        &[Inf("3*pi*sqrt(3)/2*exp(-3*x^2)/cosh(pi*x)")],
        "",
    ),
    (
        10,
        &[Inf("(pi^5*exp(-pi^3*x^2/catalan) + catalan^(5/2)*exp(-catalan*x^2/pi))*x^2/cosh(pi*x)")],
        &[Inf("pi*catalan^(3/2)/2*exp(-catalan*x^2/pi)/cosh(pi*x)")],
        "Catalan's constant in the Gaussian scale",
    ),
    (
        11,
        &[Inf("x*(3 - 4*pi*x^2)*exp(-pi*x*(x + 1))/sinh(pi*x)")],
        &[Const("1/(2*pi)")],
        "closed-form right side",
    ),
    (
        12,
        &[
            Inf("sin(x)^2/x^2/(cosh(x) + cos(x))"),
            Finite("0", "exp(-pi/2)", "2/pi*atan(x)/x"),
        ],
        &[Const("pi/4")],
        "closed-form right side",
    ),
];

fn expr(text: &str) -> Expr {
    parse_expression(text).unwrap_or_else(|e| panic!("builtin expression `{text}`: {e}"))
}

fn side(items: &[Item]) -> SideSpec {
    let mut terms = Vec::new();
    let mut constant = None;
    for item in items {
        match item {
            Inf(f) => terms.push(IntegralTerm::new(Interval::SemiInfinite, expr(f))),
            Unit(f) => terms.push(IntegralTerm::new(Interval::finite(expr("0"), expr("1")), expr(f))),
            Finite(a, b, f) => terms.push(IntegralTerm::new(Interval::finite(expr(a), expr(b)), expr(f))),
            Const(c) => constant = Some(expr(c)),
        }
    }
    SideSpec::new(terms, constant).expect("builtin side is well formed")
}

/// The twelve identities, in id order.
pub fn builtin_catalog() -> Vec<Identity> {
    TABLE
        .iter()
        .map(|(id, lhs, rhs, note)| Identity {
            id: *id,
            lhs: side(lhs),
            rhs: side(rhs),
            note: (*note).to_string(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::KernelKind;

    #[test]
    fn shape() {
        let cat = builtin_catalog();
        assert_eq!(cat.len(), 12);
        assert!(cat.iter().enumerate().all(|(k, i)| i.id as usize == k + 1));
        let eleven = &cat[10];
        assert!(eleven.rhs.terms.is_empty());
        assert_eq!(eleven.rhs.exact_constant, Some(expr("1/(2*pi)")));
        let twelve = &cat[11];
        assert_eq!(twelve.lhs.terms.len(), 2);
        assert_eq!(twelve.lhs.terms[0].interval, Interval::SemiInfinite);
        assert_eq!(twelve.lhs.terms[1].interval, Interval::finite(expr("0"), expr("exp(-pi/2)")));
        assert_eq!(twelve.rhs.exact_constant, Some(expr("pi/4")));
    }

    #[test]
    fn removable_singularities_use_kernels() {
        let cat = builtin_catalog();
        let has = |id: usize, kind: KernelKind| format!("{:?}", cat[id - 1].lhs.terms[0].stable_integrand()).contains(&format!("{kind:?}"));
        assert!(has(6, KernelKind::SelfLogPower));
        assert!(has(11, KernelKind::XOverSinh));
        assert!(has(12, KernelKind::SinOverX));
        assert!(has(7, KernelKind::Sech));
    }
}
