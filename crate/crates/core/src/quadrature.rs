//! Double-exponential quadrature.
//!
//! Finite intervals use the tanh-sinh map
//! `x = mid + half * tanh((π/2) sinh t)`, the half line `[0, ∞)` uses the
//! exp-sinh map `x = exp((π/2) sinh t)`. Both reduce the integral to a
//! trapezoidal sum over `t` whose step starts at `h = 1` and halves per
//! level; each level only evaluates the new odd-indexed nodes.
//!
//! A level sequence is accepted once two consecutive level differences are
//! within `10^-(target + guard/2) * max(1, |value|)`. Abscissas are always
//! strictly inside the interval.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::catalog::IntegralTerm;
use crate::error::{Error, Result};
use crate::expr::{eval_expr, CompiledExpr, Expr};
use crate::precision::{PrecisionContext, Real};

pub const DEFAULT_MAX_LEVELS: u32 = 14;

/// Integration range of one term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Interval {
    /// `[lower, upper]` with constant bound expressions.
    Finite { lower: Expr, upper: Expr },
    /// `[0, ∞)`.
    SemiInfinite,
}

impl Interval {
    pub fn finite(lower: Expr, upper: Expr) -> Self {
        Interval::Finite { lower, upper }
    }

    /// Evaluated bounds of a finite interval, checked for `lower < upper`.
    pub fn bounds(&self, ctx: &PrecisionContext) -> Result<Option<(Real, Real)>> {
        match self {
            Interval::SemiInfinite => Ok(None),
            Interval::Finite { lower, upper } => {
                if lower.has_var() || upper.has_var() {
                    return Err(Error::Config("interval bounds must not depend on x".into()));
                }
                let zero = Real::zero(ctx);
                let a = eval_expr(lower, &zero, ctx)?;
                let b = eval_expr(upper, &zero, ctx)?;
                if a >= b {
                    return Err(Error::Config(format!(
                        "empty interval: lower bound {lower} is not below upper bound {upper}"
                    )));
                }
                Ok(Some((a, b)))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureOptions {
    pub max_levels: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            max_levels: DEFAULT_MAX_LEVELS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadratureResult {
    pub value: Real,
    /// Last successive-level difference, floored at the accumulated
    /// rounding error of the sum.
    pub error_estimate: Real,
    pub levels_used: u32,
    pub nodes_evaluated: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Scheme {
    TanhSinh,
    ExpSinh,
}

/// One abscissa/weight pair of the unscaled rule.
///
/// For tanh-sinh `offset` is `1 - |tanh((π/2) sinh t)|`, the distance to
/// the nearer endpoint of `[-1, 1]`; for exp-sinh it is the abscissa
/// itself.
struct Node {
    offset: Real,
    weight: Real,
}

/// New nodes of one level, each side ordered outward from `t = 0`.
struct LevelNodes {
    center: Option<Node>,
    positive: Vec<Node>,
    negative: Vec<Node>,
}

fn t_limit(ctx: &PrecisionContext) -> f64 {
    let digits = f64::from(ctx.working_digits() + crate::precision::UNDERFLOW_MARGIN_DIGITS + 10);
    (2.0 / std::f64::consts::PI * digits * std::f64::consts::LN_10).asinh() + 0.5
}

fn make_node(scheme: Scheme, t: &Real, half_pi: &Real, ctx: &PrecisionContext) -> Node {
    let s = t.sinh();
    let c = t.cosh();
    let u = half_pi * &s;
    match scheme {
        Scheme::TanhSinh => {
            // E = e^(-2|u|): 1 - tanh|u| = 2E/(1+E), sech²u = 4E/(1+E)²
            let e = (-u.abs().mul_pow2(1)).exp();
            let one_plus = Real::one(ctx) + &e;
            let offset = e.mul_pow2(1) / &one_plus;
            let sech2 = e.mul_pow2(2) / one_plus.square();
            Node {
                offset,
                weight: half_pi * &c * sech2,
            }
        }
        Scheme::ExpSinh => {
            let x = u.exp();
            let weight = half_pi * &c * &x;
            Node { offset: x, weight }
        }
    }
}

fn build_level(scheme: Scheme, level: u32, ctx: &PrecisionContext) -> LevelNodes {
    let half_pi = crate::constants::pi(ctx).mul_pow2(-1);
    let limit = t_limit(ctx);
    let step_shift = i64::from(level) - 1; // h = 2^-(level-1)
    let h = 0.5f64.powi(step_shift as i32);
    let (first, stride) = if level == 1 { (1i64, 1i64) } else { (1, 2) };
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut j = first;
    while (j as f64) * h <= limit {
        let t = Real::from_i64(j, ctx).mul_pow2(-step_shift);
        positive.push(make_node(scheme, &t, &half_pi, ctx));
        negative.push(make_node(scheme, &-t, &half_pi, ctx));
        j += stride;
    }
    let center = (level == 1).then(|| make_node(scheme, &Real::zero(ctx), &half_pi, ctx));
    LevelNodes {
        center,
        positive,
        negative,
    }
}

type NodeCache = Mutex<HashMap<(Scheme, PrecisionContext, u32), Arc<LevelNodes>>>;

fn level_nodes(scheme: Scheme, level: u32, ctx: &PrecisionContext) -> Arc<LevelNodes> {
    static CACHE: OnceLock<NodeCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (scheme, *ctx, level);
    if let Some(n) = cache.lock().expect("node cache poisoned").get(&key) {
        return n.clone();
    }
    let nodes = Arc::new(build_level(scheme, level, ctx));
    cache
        .lock()
        .expect("node cache poisoned")
        .entry(key)
        .or_insert(nodes)
        .clone()
}

/// Consecutive negligible contributions that end a side of the sum.
const TAIL_RUN: usize = 3;

struct Accumulator<'a, F> {
    f: &'a F,
    ctx: &'a PrecisionContext,
    threshold: Real,
    sum: Real,
    abs_sum: Real,
    nodes: usize,
}

impl<F: Fn(&Real) -> Result<Real>> Accumulator<'_, F> {
    fn add(&mut self, x: &Real, weight: &Real) -> Result<Real> {
        let fx = (self.f)(x).map_err(|source| Error::Integrand {
            abscissa: x.to_decimal_string(20),
            source: Box::new(source),
        })?;
        self.nodes += 1;
        if !fx.is_finite() {
            return Err(Error::Integrand {
                abscissa: x.to_decimal_string(20),
                source: Box::new(Error::domain("integrand", "non-finite value")),
            });
        }
        let term = weight * &fx;
        self.sum = &self.sum + &term;
        self.abs_sum = &self.abs_sum + &term.abs();
        Ok(term)
    }

    fn negligible(&self, term: &Real) -> bool {
        let scale = if self.sum.abs() > Real::one(self.ctx) {
            self.sum.abs()
        } else {
            Real::one(self.ctx)
        };
        term.abs() <= &self.threshold * &scale
    }

    /// Adds one side of a level, stopping after a run of negligible terms.
    fn side(&mut self, nodes: &[Node], map: impl Fn(&Node) -> Option<(Real, Real)>) -> Result<()> {
        let mut quiet = 0;
        for node in nodes {
            let Some((x, w)) = map(node) else { break };
            let term = match self.add(&x, &w) {
                Ok(t) => t,
                // Overflow far out in an established tail ends the side.
                Err(_) if quiet > 0 => break,
                Err(e) => return Err(e),
            };
            if self.negligible(&term) {
                quiet += 1;
                if quiet >= TAIL_RUN {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        Ok(())
    }
}

fn tolerance(value: &Real, ctx: &PrecisionContext) -> Real {
    let digits = i64::from(ctx.target_digits() + ctx.guard_digits() / 2);
    let scale = if value.abs() > Real::one(ctx) {
        value.abs()
    } else {
        Real::one(ctx)
    };
    Real::pow10(-digits, ctx) * scale
}

fn run<F>(
    scheme: Scheme,
    f: &F,
    map: impl Fn(&Node, bool) -> Option<(Real, Real)>,
    center: impl Fn(&Node) -> (Real, Real),
    ctx: &PrecisionContext,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult>
where
    F: Fn(&Real) -> Result<Real>,
{
    if opts.max_levels == 0 {
        return Err(Error::Config("max_levels must be at least 1".into()));
    }
    let mut acc = Accumulator {
        f,
        ctx,
        threshold: ctx.underflow_threshold(),
        sum: Real::zero(ctx),
        abs_sum: Real::zero(ctx),
        nodes: 0,
    };
    let mut estimates: Vec<Real> = Vec::new();
    let mut last_diff = Real::zero(ctx);
    let mut agreements = 0;
    for level in 1..=opts.max_levels {
        let nodes = level_nodes(scheme, level, ctx);
        if let Some(c) = &nodes.center {
            let (x, w) = center(c);
            acc.add(&x, &w)?;
        }
        acc.side(&nodes.positive, |n| map(n, true))?;
        acc.side(&nodes.negative, |n| map(n, false))?;
        let h_shift = -(i64::from(level) - 1);
        let estimate = acc.sum.mul_pow2(h_shift);
        if let Some(prev) = estimates.last() {
            last_diff = (&estimate - prev).abs();
            if last_diff <= tolerance(&estimate, ctx) {
                agreements += 1;
            } else {
                agreements = 0;
            }
        }
        estimates.push(estimate);
        if agreements >= 2 {
            break;
        }
    }
    let levels_used = estimates.len() as u32;
    let value = estimates.pop().expect("at least one level");
    let h_shift = -(i64::from(levels_used) - 1);
    let roundoff = ctx.epsilon() * acc.abs_sum.mul_pow2(h_shift);
    let error_estimate = if last_diff > roundoff { last_diff } else { roundoff };
    Ok(QuadratureResult {
        value,
        error_estimate,
        levels_used,
        nodes_evaluated: acc.nodes,
        converged: agreements >= 2,
    })
}

/// `∫_a^b f(x) dx` by tanh-sinh with default options.
pub fn integrate_finite<F>(f: F, a: &Real, b: &Real, ctx: &PrecisionContext) -> Result<QuadratureResult>
where
    F: Fn(&Real) -> Result<Real>,
{
    integrate_finite_with(f, a, b, ctx, &QuadratureOptions::default())
}

pub fn integrate_finite_with<F>(
    f: F,
    a: &Real,
    b: &Real,
    ctx: &PrecisionContext,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult>
where
    F: Fn(&Real) -> Result<Real>,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Config("integration bounds must satisfy a < b".into()));
    }
    let a = a.with_precision(ctx);
    let b = b.with_precision(ctx);
    let half = (&b - &a).mul_pow2(-1);
    let mid = &a + &half;
    let map = |n: &Node, upper: bool| {
        let dx = &half * &n.offset;
        let x = if upper { &b - &dx } else { &a + &dx };
        // Past this point the abscissa rounds onto the endpoint.
        if x <= a || x >= b {
            return None;
        }
        Some((x, &half * &n.weight))
    };
    let center = |n: &Node| (mid.clone(), &half * &n.weight);
    run(Scheme::TanhSinh, &f, map, center, ctx, opts)
}

/// `∫_0^∞ f(x) dx` by exp-sinh with default options.
pub fn integrate_semi_infinite<F>(f: F, ctx: &PrecisionContext) -> Result<QuadratureResult>
where
    F: Fn(&Real) -> Result<Real>,
{
    integrate_semi_infinite_with(f, ctx, &QuadratureOptions::default())
}

pub fn integrate_semi_infinite_with<F>(
    f: F,
    ctx: &PrecisionContext,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult>
where
    F: Fn(&Real) -> Result<Real>,
{
    let map = |n: &Node, _upper: bool| {
        if n.offset.is_zero() || !n.offset.is_finite() {
            return None;
        }
        Some((n.offset.clone(), n.weight.clone()))
    };
    let center = |n: &Node| (n.offset.clone(), n.weight.clone());
    run(Scheme::ExpSinh, &f, map, center, ctx, opts)
}

/// `∫_a^∞ f(x) dx` via the shift `x = a + s` and exp-sinh in `s`.
pub fn integrate_tail_with<F>(
    f: F,
    a: &Real,
    ctx: &PrecisionContext,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult>
where
    F: Fn(&Real) -> Result<Real>,
{
    let a = a.with_precision(ctx);
    integrate_semi_infinite_with(|s: &Real| f(&(&a + s)), ctx, opts)
}

pub fn integrate_term(t: &IntegralTerm, ctx: &PrecisionContext) -> Result<QuadratureResult> {
    integrate_term_with(t, ctx, &QuadratureOptions::default())
}

/// Integrates the stability-rewritten integrand of `t` over its interval.
pub fn integrate_term_with(
    t: &IntegralTerm,
    ctx: &PrecisionContext,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let integrand = t.stable_integrand();
    let bounds = t.interval.bounds(ctx)?;
    if !integrand.has_var() {
        let c = eval_expr(integrand, &Real::zero(ctx), ctx)?;
        let value = match &bounds {
            Some((a, b)) => &c * &(b - a),
            None if c.is_zero() => c,
            None => {
                return Err(Error::domain(
                    integrand.to_string(),
                    "non-zero constant is not integrable on [0, inf)",
                ))
            }
        };
        return Ok(QuadratureResult {
            value,
            error_estimate: Real::zero(ctx),
            levels_used: 1,
            nodes_evaluated: 1,
            converged: true,
        });
    }
    let compiled = CompiledExpr::new(integrand, ctx)?;
    let f = |x: &Real| compiled.eval(x);
    match bounds {
        Some((a, b)) => integrate_finite_with(f, &a, &b, ctx, opts),
        None => integrate_semi_infinite_with(f, ctx, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    fn within(r: &QuadratureResult, exact: &Real, ctx: &PrecisionContext) -> bool {
        (&r.value - exact).abs() <= tolerance(exact, ctx)
    }

    #[test]
    fn arctangent_integral() {
        let c = ctx();
        let one = Real::one(&c);
        let r = integrate_finite(|x: &Real| Ok((Real::one(&c) + x.square()).recip()), &Real::zero(&c), &one, &c)
            .unwrap();
        assert!(r.converged);
        assert!(within(&r, &constants::pi(&c).mul_pow2(-2), &c));
        assert!(r.levels_used >= 3 && r.nodes_evaluated > 1);
    }

    #[test]
    fn constant_integrand() {
        let c = ctx();
        let r = integrate_finite(|_x: &Real| Ok(Real::one(&c)), &Real::zero(&c), &Real::one(&c), &c).unwrap();
        assert!(r.converged);
        assert!(within(&r, &Real::one(&c), &c));
    }

    #[test]
    fn gaussian_and_exponential() {
        let c = ctx();
        let r = integrate_semi_infinite(|x: &Real| Ok((-x.square()).exp()), &c).unwrap();
        assert!(r.converged);
        assert!(within(&r, &constants::sqrt_pi(&c).mul_pow2(-1), &c));
        let r = integrate_semi_infinite(|x: &Real| Ok((-x).exp()), &c).unwrap();
        assert!(r.converged);
        assert!(within(&r, &Real::one(&c), &c));
    }

    #[test]
    fn abscissas_stay_inside() {
        let c = ctx();
        let r = integrate_finite(
            |x: &Real| {
                if x.is_zero() || *x == Real::one(&c) {
                    Err(Error::domain("x", "endpoint sampled"))
                } else {
                    Ok(x.ln().abs().sqrt())
                }
            },
            &Real::zero(&c),
            &Real::one(&c),
            &c,
        );
        assert!(r.is_ok());
        let r = integrate_semi_infinite(
            |x: &Real| {
                assert!(x.is_positive());
                Ok((-x).exp())
            },
            &c,
        );
        assert!(r.is_ok());
    }

    #[test]
    fn integrand_errors_carry_the_abscissa() {
        let c = ctx();
        let err = integrate_finite(
            |x: &Real| {
                if x > &Real::ratio(1, 2, &c) {
                    Err(Error::domain("f", "boom"))
                } else {
                    Ok(Real::one(&c))
                }
            },
            &Real::zero(&c),
            &Real::one(&c),
            &c,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Integrand { .. }), "{err}");
    }

    #[test]
    fn too_few_levels_do_not_converge() {
        let c = ctx();
        let opts = QuadratureOptions { max_levels: 2 };
        let r = integrate_semi_infinite_with(|x: &Real| Ok((-x.square()).exp()), &c, &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.levels_used, 2);
    }

    #[test]
    fn rejects_reversed_bounds() {
        let c = ctx();
        assert!(integrate_finite(|x: &Real| Ok(x.clone()), &Real::one(&c), &Real::zero(&c), &c).is_err());
    }

    #[test]
    fn deterministic() {
        let c = ctx();
        let f = |x: &Real| Ok((-x.square()).exp() * x.sin());
        let a = integrate_semi_infinite(f, &c).unwrap();
        let b = integrate_semi_infinite(f, &c).unwrap();
        assert!(a.value.bit_eq(&b.value));
        assert_eq!(a.nodes_evaluated, b.nodes_evaluated);
    }
}
