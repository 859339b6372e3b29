//! `M(y) = ∫₀^∞ e^(-x²) sech(xy) dx`, its reciprocity
//! `y M(y) = √π M(π/y)`, and the y-derivative under the integral sign.

use crate::constants;
use crate::error::{Error, Result};
use crate::kernels::stable_sech;
use crate::precision::{PrecisionContext, Real};
use crate::quadrature::{integrate_semi_infinite_with, QuadratureOptions, QuadratureResult};

fn gaussian(x: &Real, ctx: &PrecisionContext) -> Real {
    let u = x.square();
    let limit = f64::from(ctx.working_digits() + crate::precision::UNDERFLOW_MARGIN_DIGITS) * std::f64::consts::LN_10;
    if u.to_f64() > limit {
        Real::zero(ctx)
    } else {
        (-u).exp()
    }
}

fn converged(r: QuadratureResult, what: impl FnOnce() -> String) -> Result<Real> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::NonConvergence { what: what() })
    }
}

fn check_y(y: &Real, positive: bool) -> Result<()> {
    let ok = y.is_finite() && if positive { y.is_positive() } else { !y.is_negative() };
    if ok {
        Ok(())
    } else {
        Err(Error::domain(
            "y",
            if positive { "transform argument must be positive" } else { "transform argument must be non-negative" },
        ))
    }
}

pub fn m_transform(y: &Real, ctx: &PrecisionContext) -> Result<Real> {
    m_transform_with(y, ctx, &QuadratureOptions::default())
}

pub fn m_transform_with(y: &Real, ctx: &PrecisionContext, opts: &QuadratureOptions) -> Result<Real> {
    check_y(y, false)?;
    let y = y.with_precision(ctx);
    let r = integrate_semi_infinite_with(
        |x: &Real| {
            let g = gaussian(x, ctx);
            if g.is_zero() {
                return Ok(g);
            }
            Ok(g * stable_sech(&(x * &y), ctx)?)
        },
        ctx,
        opts,
    )?;
    converged(r, || format!("M({})", y.to_decimal_string(20)))
}

/// `|y M(y) - √π M(π/y)|`.
pub fn modular_residual(y: &Real, ctx: &PrecisionContext) -> Result<Real> {
    Ok(modular_check(y, ctx, &QuadratureOptions::default())?.residual)
}

#[derive(Clone, Debug)]
pub struct ModularRecord {
    pub y: Real,
    pub lhs: Real,
    pub rhs: Real,
    pub residual: Real,
    /// `10^-(target - 5) * max(1, y M(y))`.
    pub bound: Real,
    pub pass: bool,
}

pub fn modular_check(y: &Real, ctx: &PrecisionContext, opts: &QuadratureOptions) -> Result<ModularRecord> {
    check_y(y, true)?;
    let y = y.with_precision(ctx);
    let lhs = &y * &m_transform_with(&y, ctx, opts)?;
    let reciprocal = constants::pi(ctx) / &y;
    let rhs = constants::sqrt_pi(ctx) * m_transform_with(&reciprocal, ctx, opts)?;
    let residual = (&lhs - &rhs).abs();
    let one = Real::one(ctx);
    let bound = super::pass_tolerance(ctx) * Real::max_abs(&lhs, &one).abs();
    Ok(ModularRecord {
        pass: residual <= bound,
        y,
        lhs,
        rhs,
        residual,
        bound,
    })
}

#[derive(Clone, Debug)]
pub struct DerivativeCheck {
    pub y: Real,
    pub step: Real,
    /// `-∫₀^∞ x e^(-x²) sinh(xy)/cosh²(xy) dx`.
    pub direct: Real,
    /// `(M(y + h) - M(y - h)) / 2h`.
    pub finite_diff: Real,
    pub residual: Real,
    pub pass: bool,
}

/// Bound `10^-(2 target / 3 - 3)` on the derivative residual.
pub fn derivative_tolerance(ctx: &PrecisionContext) -> Real {
    Real::pow10(-(2 * i64::from(ctx.target_digits()) / 3 - 3), ctx)
}

/// Default finite-difference step `10^-(target / 3)`.
pub fn default_step(ctx: &PrecisionContext) -> Real {
    Real::pow10(-(i64::from(ctx.target_digits()) / 3), ctx)
}

pub fn m_transform_derivative_check(y: &Real, ctx: &PrecisionContext) -> Result<DerivativeCheck> {
    m_transform_derivative_check_with(y, &default_step(ctx), ctx, &QuadratureOptions::default())
}

pub fn m_transform_derivative_check_with(
    y: &Real,
    step: &Real,
    ctx: &PrecisionContext,
    opts: &QuadratureOptions,
) -> Result<DerivativeCheck> {
    check_y(y, true)?;
    if !(step.is_positive() && step < y) {
        return Err(Error::Config("finite-difference step must lie in (0, y)".into()));
    }
    let y = y.with_precision(ctx);
    let h = step.with_precision(ctx);
    let r = integrate_semi_infinite_with(
        |x: &Real| {
            let g = gaussian(x, ctx);
            if g.is_zero() {
                return Ok(g);
            }
            let u = x * &y;
            // sinh(u)/cosh²(u) = tanh(u) sech(u)
            Ok(x * &g * u.tanh() * stable_sech(&u, ctx)?)
        },
        ctx,
        opts,
    )?;
    let direct = -converged(r, || format!("M'({})", y.to_decimal_string(20)))?;
    let up = m_transform_with(&(&y + &h), ctx, opts)?;
    let down = m_transform_with(&(&y - &h), ctx, opts)?;
    let finite_diff = (up - down) / h.mul_pow2(1);
    let residual = (&direct - &finite_diff).abs();
    Ok(DerivativeCheck {
        pass: residual <= derivative_tolerance(ctx),
        y,
        step: h,
        direct,
        finite_diff,
        residual,
    })
}
