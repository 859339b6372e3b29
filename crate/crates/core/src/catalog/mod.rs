//! The identity catalog, side evaluation, verification, and the Gaussian
//! sech transform.

mod builtin;
mod format;
mod transform;

use std::time::{Duration, Instant};

pub use builtin::builtin_catalog;
pub use format::{export_catalog, load_catalog_file, parse_catalog};
pub use transform::{
    default_step as derivative_step, derivative_tolerance, m_transform, m_transform_derivative_check, m_transform_derivative_check_with,
    m_transform_with, modular_check, modular_residual, DerivativeCheck, ModularRecord,
};

use crate::error::{Error, Result};
use crate::expr::{eval_expr, parse_expression, print_expression, rewrite_stable, Expr};
use crate::precision::{PrecisionContext, Real};
use crate::quadrature::{integrate_term_with, Interval, QuadratureOptions};

/// One definite integral: an interval and an integrand in `x`.
///
/// The stability-rewritten integrand is computed once on construction and
/// is what quadrature evaluates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralTerm {
    pub interval: Interval,
    integrand: Expr,
    stable: Expr,
}

impl IntegralTerm {
    pub fn new(interval: Interval, integrand: Expr) -> Self {
        let stable = rewrite_stable(&integrand);
        Self {
            interval,
            integrand,
            stable,
        }
    }

    pub fn parse(interval: Interval, text: &str) -> Result<Self> {
        Ok(Self::new(interval, parse_expression(text)?))
    }

    /// Integrand as written.
    pub fn integrand(&self) -> &Expr {
        &self.integrand
    }

    pub fn stable_integrand(&self) -> &Expr {
        &self.stable
    }
}

/// A sum of integrals plus an optional constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideSpec {
    pub terms: Vec<IntegralTerm>,
    pub exact_constant: Option<Expr>,
}

impl SideSpec {
    pub fn new(terms: Vec<IntegralTerm>, exact_constant: Option<Expr>) -> Result<Self> {
        if terms.is_empty() && exact_constant.is_none() {
            return Err(Error::Config("a side needs at least one integral or constant".into()));
        }
        if let Some(c) = &exact_constant {
            if c.has_var() {
                return Err(Error::Config(format!("constant `{c}` must not depend on x")));
            }
        }
        Ok(Self { terms, exact_constant })
    }

    pub fn integrals(terms: Vec<IntegralTerm>) -> Result<Self> {
        Self::new(terms, None)
    }

    pub fn constant(c: Expr) -> Result<Self> {
        Self::new(Vec::new(), Some(c))
    }

    /// Every expression on this side, bounds included.
    pub fn expressions(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        for t in &self.terms {
            if let Interval::Finite { lower, upper } = &t.interval {
                out.push(lower);
                out.push(upper);
            }
            out.push(t.integrand());
        }
        out.extend(self.exact_constant.as_ref());
        out
    }
}

/// `lhs = rhs`, numbered by `id`.
#[derive(Clone, Debug)]
pub struct Identity {
    pub id: u32,
    pub lhs: SideSpec,
    pub rhs: SideSpec,
    pub note: String,
}

/// Structural equality; the note is commentary and is ignored.
impl PartialEq for Identity {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.lhs == other.lhs && self.rhs == other.rhs
    }
}

impl Eq for Identity {}

#[derive(Clone, Debug)]
pub struct SideValue {
    pub value: Real,
    /// Sum of the term error estimates.
    pub error_bound: Real,
    pub nodes: usize,
    pub converged: bool,
}

pub fn evaluate_side(s: &SideSpec, ctx: &PrecisionContext) -> Result<SideValue> {
    evaluate_side_with(s, ctx, &QuadratureOptions::default())
}

pub fn evaluate_side_with(s: &SideSpec, ctx: &PrecisionContext, opts: &QuadratureOptions) -> Result<SideValue> {
    let mut value = match &s.exact_constant {
        Some(c) => eval_expr(c, &Real::zero(ctx), ctx)?,
        None => Real::zero(ctx),
    };
    let mut error_bound = Real::zero(ctx);
    let mut nodes = 0;
    let mut converged = true;
    for (index, term) in s.terms.iter().enumerate() {
        let r = integrate_term_with(term, ctx, opts).map_err(|e| Error::Term {
            index,
            source: Box::new(e),
        })?;
        value = value + r.value;
        error_bound = error_bound + r.error_estimate;
        nodes += r.nodes_evaluated;
        converged &= r.converged;
    }
    Ok(SideValue {
        value,
        error_bound,
        nodes,
        converged,
    })
}

#[derive(Clone, Debug)]
pub struct VerificationRecord {
    pub id: u32,
    pub lhs_value: Real,
    pub rhs_value: Real,
    pub abs_residual: Real,
    pub rel_residual: Real,
    pub tolerance: Real,
    pub pass: bool,
    /// False when some integral hit the level limit; such a record never
    /// passes.
    pub converged: bool,
    pub nodes: usize,
    pub elapsed: Duration,
}

/// Relative pass threshold `10^-(target - 5)`.
pub fn pass_tolerance(ctx: &PrecisionContext) -> Real {
    Real::pow10(-(i64::from(ctx.target_digits()) - 5), ctx)
}

/// `|a - b| / max(|a|, |b|, 1)`.
pub fn relative_residual(a: &Real, b: &Real, ctx: &PrecisionContext) -> (Real, Real) {
    let abs = (a - b).abs();
    let one = Real::one(ctx);
    let scale = Real::max_abs(Real::max_abs(a, b), &one).abs();
    let rel = &abs / &scale;
    (abs, rel)
}

pub fn verify_identity(i: &Identity, ctx: &PrecisionContext) -> Result<VerificationRecord> {
    verify_identity_with(i, ctx, &QuadratureOptions::default())
}

pub fn verify_identity_with(i: &Identity, ctx: &PrecisionContext, opts: &QuadratureOptions) -> Result<VerificationRecord> {
    let start = Instant::now();
    let lhs = evaluate_side_with(&i.lhs, ctx, opts)?;
    let rhs = evaluate_side_with(&i.rhs, ctx, opts)?;
    let (abs_residual, rel_residual) = relative_residual(&lhs.value, &rhs.value, ctx);
    let tolerance = pass_tolerance(ctx);
    let converged = lhs.converged && rhs.converged;
    Ok(VerificationRecord {
        id: i.id,
        pass: converged && rel_residual <= tolerance,
        lhs_value: lhs.value,
        rhs_value: rhs.value,
        abs_residual,
        rel_residual,
        tolerance,
        converged,
        nodes: lhs.nodes + rhs.nodes,
        elapsed: start.elapsed(),
    })
}

/// Looks up `id` in `catalog`.
pub fn find_identity(catalog: &[Identity], id: u32) -> Result<&Identity> {
    catalog.iter().find(|i| i.id == id).ok_or_else(|| Error::Lookup {
        kind: "identity id",
        name: id.to_string(),
    })
}

/// Printed integrands of every term, one line per term, as
/// `<id> <side> <index>: <expr>`.
pub fn integrand_listing(catalog: &[Identity]) -> String {
    let mut out = String::new();
    for i in catalog {
        for (name, side) in [("lhs", &i.lhs), ("rhs", &i.rhs)] {
            for (k, t) in side.terms.iter().enumerate() {
                out.push_str(&format!("{} {name} {k}: {}\n", i.id, print_expression(t.integrand())));
            }
            if let Some(c) = &side.exact_constant {
                out.push_str(&format!("{} {name} const: {}\n", i.id, print_expression(c)));
            }
        }
    }
    out
}
