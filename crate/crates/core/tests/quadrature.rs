use integral_verify::quadrature::{
    integrate_finite, integrate_semi_infinite, integrate_tail_with, QuadratureOptions, QuadratureResult,
};
use integral_verify::{constants, PrecisionContext, Real};
use proptest::prelude::*;

fn ctx20() -> PrecisionContext {
    PrecisionContext::new(20).unwrap()
}

fn within(a: &Real, b: &Real, digits: i64, ctx: &PrecisionContext) -> bool {
    let scale = if b.abs() > Real::one(ctx) { b.abs() } else { Real::one(ctx) };
    (a - b).abs() <= Real::pow10(-digits, ctx) * scale
}

fn semi(f: impl Fn(&Real) -> Real, ctx: &PrecisionContext) -> QuadratureResult {
    let r = integrate_semi_infinite(|x: &Real| Ok(f(x)), ctx).unwrap();
    assert!(r.converged);
    r
}

fn gauss(x: &Real) -> Real {
    (-x.square()).exp()
}

#[test]
fn precision_ladder_agrees() {
    let low = PrecisionContext::new(20).unwrap();
    let high = PrecisionContext::new(40).unwrap();
    let f = |x: &Real| gauss(x) / x.cosh();
    let a = semi(f, &low).value;
    let b = semi(f, &high).value;
    assert!(within(&a.with_precision(&high), &b, 15, &high));
}

#[test]
fn additivity_at_a_split_point() {
    let ctx = PrecisionContext::new(30).unwrap();
    let opts = QuadratureOptions::default();
    let whole = semi(gauss, &ctx).value;
    for split in [Real::ratio(1, 3, &ctx), Real::one(&ctx), Real::from_i64(3, &ctx)] {
        let head = integrate_finite(|x: &Real| Ok(gauss(x)), &Real::zero(&ctx), &split, &ctx).unwrap();
        let tail = integrate_tail_with(|x: &Real| Ok(gauss(x)), &split, &ctx, &opts).unwrap();
        assert!(head.converged && tail.converged);
        assert!(within(&(head.value + tail.value), &whole, 25, &ctx), "split {}", split.to_decimal_string(5));
    }
}

#[test]
fn estimates_bound_the_error_at_doubled_precision() {
    let ctx = PrecisionContext::new(30).unwrap();
    let wide = ctx.doubled();
    let cases: [(&str, fn(&Real) -> Real); 3] = [
        ("sech", |x| x.cosh().recip()),
        ("x e^-x^2", |x| x * &gauss(x)),
        ("e^-x sin^2 x", |x| (-x).exp() * x.sin().square()),
    ];
    for (name, f) in cases {
        let r = semi(f, &ctx);
        let reference = semi(f, &wide).value;
        let err = (&r.value.with_precision(&wide) - &reference).abs();
        assert!(
            err <= r.error_estimate.with_precision(&wide) * Real::from_i64(10, &wide),
            "{name}: error {} estimate {}",
            err.to_decimal_string(3),
            r.error_estimate.to_decimal_string(3)
        );
    }
}

#[test]
fn closed_forms() {
    let ctx = PrecisionContext::new(30).unwrap();
    // ∫₀^∞ sech x dx = π/2
    let r = semi(|x| x.cosh().recip(), &ctx);
    assert!(within(&r.value, &constants::pi(&ctx).mul_pow2(-1), 25, &ctx));
    // ∫₀^1 ln(1+x)/(1+x²) dx = (π/8) ln 2
    let one = Real::one(&ctx);
    let r = integrate_finite(|x: &Real| Ok((&one + x).ln() / (&one + &x.square())), &Real::zero(&ctx), &one, &ctx).unwrap();
    let exact = constants::pi(&ctx).mul_pow2(-3) * Real::from_i64(2, &ctx).ln();
    assert!(within(&r.value, &exact, 25, &ctx));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let ctx = ctx20();
        let (ra, rb) = (Real::from_f64(a, &ctx), Real::from_f64(b, &ctx));
        let f = semi(gauss, &ctx).value;
        let g = semi(|x| (-x).exp(), &ctx).value;
        let combined = semi(|x| &ra * &gauss(x) + &rb * &(-x).exp(), &ctx).value;
        let expected = &ra * &f + &rb * &g;
        let scale = ra.abs() + rb.abs() + Real::one(&ctx);
        prop_assert!((&combined - &expected).abs() <= Real::pow10(-15, &ctx) * scale);
    }

    #[test]
    fn scaling(c in 0.25f64..6.0) {
        // ∫₀^∞ f(cx) dx = (1/c) ∫₀^∞ f(x) dx
        let ctx = ctx20();
        let rc = Real::from_f64(c, &ctx);
        let base = semi(|x| x.cosh().recip() * gauss(x), &ctx).value;
        let scaled = semi(|x| { let u = x * &rc; u.cosh().recip() * gauss(&u) }, &ctx).value;
        prop_assert!(within(&(scaled * rc), &base, 15, &ctx));
    }

    #[test]
    fn finite_interval_additivity(m in 0.05f64..0.95) {
        let ctx = ctx20();
        let (zero, one) = (Real::zero(&ctx), Real::one(&ctx));
        let mid = Real::from_f64(m, &ctx);
        let f = |x: &Real| Ok(x.atan() / (&one + x));
        let whole = integrate_finite(f, &zero, &one, &ctx).unwrap();
        let left = integrate_finite(f, &zero, &mid, &ctx).unwrap();
        let right = integrate_finite(f, &mid, &one, &ctx).unwrap();
        prop_assert!(whole.converged && left.converged && right.converged);
        prop_assert!(within(&(left.value + right.value), &whole.value, 15, &ctx));
    }

    #[test]
    fn reversed_or_empty_intervals_are_rejected(a in -2.0f64..2.0, d in 0.0f64..2.0) {
        let ctx = ctx20();
        let lo = Real::from_f64(a, &ctx);
        let hi = Real::from_f64(a - d, &ctx);
        prop_assert!(integrate_finite(|x: &Real| Ok(x.clone()), &lo, &hi, &ctx).is_err());
    }
}
