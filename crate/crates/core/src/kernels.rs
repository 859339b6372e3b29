//! Numerically stable scalar kernels for the integrand families.
//!
//! Each kernel removes a cancellation or overflow hazard of the naive
//! formula: `sech` never forms `cosh`, the two quotient kernels use local
//! Taylor series near their removable singularity at the origin, and
//! `x^(-ln x)` flushes to zero once it is provably negligible.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::precision::{PrecisionContext, Real};

/// Below this magnitude the quotient kernels switch to their series.
pub const SERIES_SWITCH: f64 = 0.25;

fn require_finite(v: &Real, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, "argument is not finite"))
    }
}

/// `ln(10^(working+50))`: exponents beyond this make `e^-a` negligible.
fn negligible_log(ctx: &PrecisionContext) -> f64 {
    f64::from(ctx.working_digits() + crate::precision::UNDERFLOW_MARGIN_DIGITS) * std::f64::consts::LN_10
}

fn below_switch(u: &Real) -> bool {
    u.abs().to_f64() < SERIES_SWITCH
}

/// `1/cosh(x)` as `2 e^-|x| / (1 + e^-2|x|)`.
pub fn stable_sech(x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    require_finite(x, "sech")?;
    let a = x.abs().with_precision(ctx);
    if a.to_f64() > negligible_log(ctx) + 1.0 {
        return Ok(Real::zero(ctx));
    }
    let e = (-a).exp();
    let num = e.mul_pow2(1);
    Ok(num / (Real::one(ctx) + e.square()))
}

/// `u / sinh(u)`, exactly 1 at the origin.
pub fn x_over_sinh(u: &Real, ctx: &PrecisionContext) -> Result<Real> {
    require_finite(u, "x_over_sinh")?;
    if u.is_zero() {
        return Ok(Real::one(ctx));
    }
    if below_switch(u) {
        Ok(x_over_sinh_series(u, ctx))
    } else {
        Ok(x_over_sinh_direct(u, ctx))
    }
}

/// Closed form `2|u| e^-|u| / (1 - e^-2|u|)`; loses accuracy as `u -> 0`.
pub(crate) fn x_over_sinh_direct(u: &Real, ctx: &PrecisionContext) -> Real {
    let a = u.abs().with_precision(ctx);
    if a.to_f64() > negligible_log(ctx) + 1.0 + a.to_f64().ln().max(0.0) {
        return Real::zero(ctx);
    }
    let e = (-&a).exp();
    let num = (&a * &e).mul_pow2(1);
    num / (Real::one(ctx) - e.square())
}

/// Taylor coefficients of `u/sinh(u)` in powers of `u^2`, obtained by
/// inverting `sinh(u)/u = sum u^2k / (2k+1)!` over the rationals.
fn x_over_sinh_coefficients(count: usize) -> Vec<BigRational> {
    let mut sinhc = Vec::with_capacity(count);
    let mut fact = BigInt::one();
    for k in 0..count {
        if k > 0 {
            fact *= BigInt::from((2 * k) * (2 * k + 1));
        }
        sinhc.push(BigRational::new(BigInt::one(), fact.clone()));
    }
    let mut inv: Vec<BigRational> = Vec::with_capacity(count);
    inv.push(BigRational::one());
    for n in 1..count {
        let mut acc = BigRational::zero();
        for k in 1..=n {
            acc += &sinhc[k] * &inv[n - k];
        }
        inv.push(-acc);
    }
    inv
}

type CoefficientCache = Mutex<HashMap<PrecisionContext, Arc<Vec<Real>>>>;

fn x_over_sinh_series_coefficients(ctx: &PrecisionContext) -> Arc<Vec<Real>> {
    static CACHE: OnceLock<CoefficientCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("coefficient cache poisoned").get(ctx) {
        return c.clone();
    }
    // |c_n| (1/4)^2n ~ 2 (1/(4 pi))^2n, about 2.2 digits per term.
    let count = (f64::from(ctx.working_digits()) / 2.0).ceil() as usize + 4;
    let coeffs: Vec<Real> = x_over_sinh_coefficients(count)
        .iter()
        .map(|c| Real::from_rational(c, ctx))
        .collect();
    let coeffs = Arc::new(coeffs);
    cache
        .lock()
        .expect("coefficient cache poisoned")
        .entry(*ctx)
        .or_insert(coeffs)
        .clone()
}

/// Series branch `1 - u^2/6 + 7u^4/360 - ...`; valid for `|u| < pi`.
pub(crate) fn x_over_sinh_series(u: &Real, ctx: &PrecisionContext) -> Real {
    let coeffs = x_over_sinh_series_coefficients(ctx);
    let u2 = u.with_precision(ctx).square();
    let eps = ctx.epsilon().mul_pow2(-2);
    let mut sum = Real::zero(ctx);
    let mut power = Real::one(ctx);
    for c in coeffs.iter() {
        let term = c * &power;
        sum = &sum + &term;
        if term.abs() < eps {
            break;
        }
        power = &power * &u2;
    }
    sum
}

/// `sin(u) / u`, exactly 1 at the origin.
pub fn sin_over_x(u: &Real, ctx: &PrecisionContext) -> Result<Real> {
    require_finite(u, "sin_over_x")?;
    if u.is_zero() {
        return Ok(Real::one(ctx));
    }
    if below_switch(u) {
        Ok(sin_over_x_series(u, ctx))
    } else {
        Ok(sin_over_x_direct(u, ctx))
    }
}

pub(crate) fn sin_over_x_direct(u: &Real, ctx: &PrecisionContext) -> Real {
    let u = u.with_precision(ctx);
    u.sin() / &u
}

pub(crate) fn sin_over_x_series(u: &Real, ctx: &PrecisionContext) -> Real {
    let u2 = u.with_precision(ctx).square();
    let eps = ctx.epsilon().mul_pow2(-2);
    let mut sum = Real::one(ctx);
    let mut term = Real::one(ctx);
    let mut k: i64 = 1;
    loop {
        term = -(&term * &u2) / Real::from_i64((2 * k) * (2 * k + 1), ctx);
        sum = &sum + &term;
        if term.abs() < eps {
            break;
        }
        k += 1;
    }
    sum
}

/// `x^(-ln x) = exp(-(ln x)^2)` for `x > 0`.
pub fn self_log_power(x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if !x.is_finite() || !x.is_positive() {
        return Err(Error::domain("x^(-ln(x))", "requires x > 0"));
    }
    let l = x.with_precision(ctx).ln();
    let q = l.square();
    if q.to_f64() > negligible_log(ctx) {
        return Ok(Real::zero(ctx));
    }
    Ok((-q).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    fn close(a: &Real, b: &Real, digits: u32, ctx: &PrecisionContext) -> bool {
        let tol = Real::pow10(-i64::from(digits), ctx);
        (a - b).abs() <= tol
    }

    #[test]
    fn series_coefficients_match_known_values() {
        let c = x_over_sinh_coefficients(4);
        assert_eq!(c[0], BigRational::one());
        assert_eq!(c[1], BigRational::new((-1).into(), 6.into()));
        assert_eq!(c[2], BigRational::new(7.into(), 360.into()));
        assert_eq!(c[3], BigRational::new((-31).into(), 15120.into()));
    }

    #[test]
    fn sech_edge_values() {
        let c = ctx();
        assert_eq!(stable_sech(&Real::zero(&c), &c).unwrap(), Real::one(&c));
        let a = Real::parse_decimal("3.5", &c).unwrap();
        assert!(stable_sech(&a, &c).unwrap().bit_eq(&stable_sech(&-&a, &c).unwrap()));
        let hi = c.doubled();
        let one = Real::one(&hi);
        let reference = one.cosh().recip();
        let got = stable_sech(&Real::one(&c), &c).unwrap();
        assert!(close(&got, &reference.with_precision(&c), c.working_digits() - 1, &c));
    }

    #[test]
    fn sech_on_grid_is_decreasing_and_accurate() {
        let c = ctx();
        let hi = c.doubled();
        let mut prev = Real::from_i64(2, &c);
        for i in 0..100 {
            let x = Real::ratio(i * 20, 99, &c);
            let v = stable_sech(&x, &c).unwrap();
            assert!(v <= Real::one(&c) && v.is_positive());
            assert!(v < prev);
            prev = v.clone();
            let reference = x.with_precision(&hi).cosh().recip();
            assert!(close(&v, &reference.with_precision(&c), c.working_digits() - 2, &c), "x index {i}");
        }
    }

    #[test]
    fn sech_flushes_huge_arguments() {
        let c = ctx();
        assert!(stable_sech(&Real::from_i64(10_000, &c), &c).unwrap().is_zero());
        let v = stable_sech(&Real::from_i64(200, &c), &c).unwrap();
        assert!(v.is_positive());
    }

    #[test]
    fn x_over_sinh_values() {
        let c = ctx();
        assert_eq!(x_over_sinh(&Real::zero(&c), &c).unwrap(), Real::one(&c));
        let a = Real::parse_decimal("0.01", &c).unwrap();
        assert!(x_over_sinh(&a, &c).unwrap().bit_eq(&x_over_sinh(&-&a, &c).unwrap()));
        let hi = c.doubled();
        let two = Real::from_i64(2, &hi);
        let reference = &two / two.sinh();
        let got = x_over_sinh(&Real::from_i64(2, &c), &c).unwrap();
        assert!(close(&got, &reference.with_precision(&c), c.working_digits() - 1, &c));
    }

    #[test]
    fn x_over_sinh_branches_agree_around_switch() {
        let c = ctx();
        for i in 0..50 {
            let u = Real::ratio(10 + i, 200, &c); // 0.05 ..= 0.295
            let s = x_over_sinh_series(&u, &c);
            let d = x_over_sinh_direct(&u, &c);
            assert!(close(&s, &d, c.working_digits() - 2, &c), "u = {u:.10}");
        }
    }

    #[test]
    fn sin_over_x_values() {
        let c = ctx();
        assert_eq!(sin_over_x(&Real::zero(&c), &c).unwrap(), Real::one(&c));
        let pi = crate::constants::pi(&c);
        assert!(sin_over_x(&pi, &c).unwrap().abs() < Real::pow10(-40, &c));
        let hi = c.doubled();
        let reference = Real::one(&hi).sin();
        let got = sin_over_x(&Real::one(&c), &c).unwrap();
        assert!(close(&got, &reference.with_precision(&c), c.working_digits() - 1, &c));
        let a = Real::parse_decimal("0.2", &c).unwrap();
        assert!(sin_over_x(&a, &c).unwrap().bit_eq(&sin_over_x(&-&a, &c).unwrap()));
    }

    #[test]
    fn sin_over_x_branches_agree_around_switch() {
        let c = ctx();
        for i in 0..50 {
            let u = Real::ratio(10 + i, 200, &c);
            let s = sin_over_x_series(&u, &c);
            let d = sin_over_x_direct(&u, &c);
            assert!(close(&s, &d, c.working_digits() - 2, &c), "u = {u:.10}");
        }
    }

    #[test]
    fn self_log_power_values() {
        let c = ctx();
        assert_eq!(self_log_power(&Real::one(&c), &c).unwrap(), Real::one(&c));
        let e = Real::one(&c).exp();
        let got = self_log_power(&e, &c).unwrap();
        assert!(close(&got, &(-Real::one(&c)).exp(), c.working_digits() - 1, &c));
        let hi = c.doubled();
        let half = Real::ratio(1, 2, &hi);
        let reference = half.powf(&-half.ln());
        let got = self_log_power(&Real::ratio(1, 2, &c), &c).unwrap();
        assert!(close(&got, &reference.with_precision(&c), c.working_digits() - 1, &c));
        assert!(self_log_power(&Real::zero(&c), &c).is_err());
        assert!(self_log_power(&Real::from_i64(-1, &c), &c).is_err());
        assert!(self_log_power(&Real::pow10(-400, &c), &c).unwrap().is_zero());
    }

    #[test]
    fn self_log_power_reciprocal_symmetry() {
        let c = ctx();
        for i in 1..=20 {
            let x = Real::ratio(i, 7, &c);
            let a = self_log_power(&x, &c).unwrap();
            let b = self_log_power(&x.recip(), &c).unwrap();
            assert!(close(&a, &b, c.working_digits() - 2, &c));
        }
    }

    #[test]
    fn kernels_are_pure() {
        let c = ctx();
        let x = Real::ratio(3, 11, &c);
        assert!(stable_sech(&x, &c).unwrap().bit_eq(&stable_sech(&x, &c).unwrap()));
        assert!(x_over_sinh(&x, &c).unwrap().bit_eq(&x_over_sinh(&x, &c).unwrap()));
        assert!(sin_over_x(&x, &c).unwrap().bit_eq(&sin_over_x(&x, &c).unwrap()));
    }

    #[test]
    fn non_finite_input_is_domain_error() {
        let c = ctx();
        let inf = Real::one(&c) / Real::zero(&c);
        assert!(stable_sech(&inf, &c).is_err());
        assert!(x_over_sinh(&inf, &c).is_err());
        assert!(sin_over_x(&inf, &c).is_err());
    }
}
