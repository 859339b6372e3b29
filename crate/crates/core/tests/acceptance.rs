//! Acceptance run: prints one PASS/FAIL line per criterion and fails if any
//! criterion fails. The criteria run sequentially so that timings are not
//! skewed by sibling tests. Lines go straight to stderr so they appear
//! without `--nocapture`.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use integral_verify::catalog::{
    builtin_catalog, derivative_step, export_catalog, find_identity, load_catalog_file, m_transform_derivative_check_with, modular_check,
    verify_identity, Identity,
};
use integral_verify::cli::{run_cli_with, EXIT_FAIL, EXIT_PASS};
use integral_verify::constants;
use integral_verify::expr::{parse_expression, print_expression};
use integral_verify::quadrature::{
    integrate_finite, integrate_semi_infinite, QuadratureOptions, QuadratureResult,
};
use integral_verify::{PrecisionContext, Real};

type Outcome = Result<String, String>;

fn single_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let full = std::iter::once("integral-verify").chain(args.iter().copied());
    let code = run_cli_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn dec(v: &serde_json::Value, ctx: &PrecisionContext) -> Real {
    Real::parse_decimal(v.as_str().expect("decimal string"), ctx).expect("parsable decimal")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs `verify` at `digits` on one thread and checks each identity's
/// relative residual against `10^-(digits-5)`.
fn suite(digits: u32, budget: Duration) -> Outcome {
    let d = digits.to_string();
    let start = Instant::now();
    let (code, out, err) = single_thread(|| cli(&["verify", "--all", "--digits", &d, "--format", "json"]));
    let elapsed = start.elapsed();
    ensure(code == EXIT_PASS, || format!("exit code {code}: {err}"))?;
    let doc: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let ctx = PrecisionContext::new(digits).unwrap();
    let threshold = Real::pow10(-(i64::from(digits) - 5), &ctx);
    let ids = doc["identities"].as_array().unwrap();
    ensure(ids.len() == 12, || format!("{} records", ids.len()))?;
    let mut worst = Real::zero(&ctx);
    for rec in ids {
        let rel = dec(&rec["rel_residual"], &ctx);
        ensure(rec["pass"] == true && rel <= threshold, || {
            format!("identity {} rel_residual {}", rec["id"], rec["rel_residual"])
        })?;
        if rel > worst {
            worst = rel;
        }
    }
    ensure(elapsed <= budget, || format!("took {elapsed:.1?}, budget {budget:?}"))?;
    Ok(format!(
        "12/12 at {digits} digits, worst rel_residual {}, {:.1?} on one thread",
        worst.to_decimal_string(3),
        elapsed
    ))
}

fn criterion_1() -> Outcome {
    suite(30, Duration::from_secs(120))
}

fn criterion_2() -> Outcome {
    let ctx = PrecisionContext::new(30).unwrap();
    let cat = builtin_catalog();
    let bound = Real::pow10(-25, &ctx);
    let mut parts = Vec::new();
    for (id, exact) in [(11, "1/(2*pi)"), (12, "pi/4")] {
        let identity = find_identity(&cat, id).unwrap();
        let expected = parse_expression(exact).unwrap();
        ensure(identity.rhs.terms.is_empty() && identity.rhs.exact_constant.as_ref() == Some(&expected), || {
            format!("identity {id} right side is not {exact}")
        })?;
        let rec = verify_identity(identity, &ctx).map_err(|e| e.to_string())?;
        ensure(rec.rel_residual <= bound, || {
            format!("identity {id} vs {exact}: rel {}", rec.rel_residual.to_decimal_string(3))
        })?;
        parts.push(format!("{id} vs {exact}: {}", rec.rel_residual.to_decimal_string(3)));
    }
    Ok(parts.join(", "))
}

fn criterion_3() -> Outcome {
    let low = suite(20, Duration::from_secs(600))?;
    let high = suite(40, Duration::from_secs(600))?;
    Ok(format!("{low}; {high}"))
}

fn criterion_4() -> Outcome {
    let ctx = PrecisionContext::new(30).unwrap();
    let opts = QuadratureOptions::default();
    let mut worst = Real::zero(&ctx);
    for text in ["1/4", "1/2", "1", "2", "exp(1)", "pi", "5"] {
        let y = integral_verify::expr::eval_expr(&parse_expression(text).unwrap(), &Real::zero(&ctx), &ctx).unwrap();
        let rec = modular_check(&y, &ctx, &opts).map_err(|e| e.to_string())?;
        let scale = if rec.lhs.abs() > Real::one(&ctx) { rec.lhs.abs() } else { Real::one(&ctx) };
        let bound = Real::pow10(-25, &ctx) * scale;
        ensure(rec.residual <= bound, || format!("y = {text}: residual {}", rec.residual.to_decimal_string(3)))?;
        if rec.residual > worst {
            worst = rec.residual;
        }
    }
    Ok(format!("7 points, worst residual {}", worst.to_decimal_string(3)))
}

fn criterion_5() -> Outcome {
    let ctx = PrecisionContext::new(30).unwrap();
    let opts = QuadratureOptions::default();
    let bound = Real::pow10(-15, &ctx);
    let h = derivative_step(&ctx);
    let half = h.mul_pow2(-1);
    let mut worst_ratio = f64::INFINITY;
    for text in ["1/2", "1", "2", "pi"] {
        let y = integral_verify::expr::eval_expr(&parse_expression(text).unwrap(), &Real::zero(&ctx), &ctx).unwrap();
        let a = m_transform_derivative_check_with(&y, &h, &ctx, &opts).map_err(|e| e.to_string())?;
        let b = m_transform_derivative_check_with(&y, &half, &ctx, &opts).map_err(|e| e.to_string())?;
        ensure(a.residual <= bound, || format!("y = {text}: residual {}", a.residual.to_decimal_string(3)))?;
        let three = Real::from_i64(3, &ctx);
        ensure(&b.residual * &three <= a.residual, || {
            format!(
                "y = {text}: halving the step took the residual from {} to {}",
                a.residual.to_decimal_string(3),
                b.residual.to_decimal_string(3)
            )
        })?;
        worst_ratio = worst_ratio.min((a.residual / b.residual).to_f64());
    }
    Ok(format!("4 points within 1e-15, smallest halving ratio {worst_ratio:.2}"))
}

fn criterion_6() -> Outcome {
    let ctx = PrecisionContext::new(30).unwrap();
    let wide = ctx.doubled();
    let check = |name: &str, r: QuadratureResult, exact: Real| -> Outcome {
        ensure(r.converged, || format!("{name} did not converge"))?;
        let err = (&r.value.with_precision(&wide) - &exact).abs();
        let limit = r.error_estimate.with_precision(&wide) * Real::from_i64(10, &wide);
        ensure(err <= limit, || {
            format!(
                "{name}: true error {} above 10 x estimate {}",
                err.to_decimal_string(3),
                r.error_estimate.to_decimal_string(3)
            )
        })?;
        Ok(format!("{name} err {} est {}", err.to_decimal_string(2), r.error_estimate.to_decimal_string(2)))
    };
    let gauss = integrate_semi_infinite(|x: &Real| Ok((-x.square()).exp()), &ctx).map_err(|e| e.to_string())?;
    let expo = integrate_semi_infinite(|x: &Real| Ok((-x).exp()), &ctx).map_err(|e| e.to_string())?;
    let one = Real::one(&ctx);
    let atan = integrate_finite(|x: &Real| Ok((&one + &x.square()).recip()), &Real::zero(&ctx), &one, &ctx)
        .map_err(|e| e.to_string())?;
    let parts = [
        check("gaussian", gauss, constants::sqrt_pi(&wide).mul_pow2(-1))?,
        check("exponential", expo, Real::one(&wide))?,
        check("arctangent", atan, constants::pi(&wide).mul_pow2(-2))?,
    ];
    Ok(parts.join("; "))
}

fn criterion_7() -> Outcome {
    let ctx = PrecisionContext::new(50).unwrap();
    let tol = Real::pow10(-50, &ctx);
    let g1 = constants::euler_gamma_brent_mcmillan(&ctx);
    let g2 = constants::euler_gamma_euler_maclaurin(&ctx);
    let dg = (&g1 - &g2).abs();
    ensure(dg <= tol, || format!("gamma routes differ by {}", dg.to_decimal_string(3)))?;
    let c1 = constants::catalan_cvz(&ctx);
    let c2 = constants::catalan_ramanujan(&ctx);
    let dc = (&c1 - &c2).abs();
    ensure(dc <= tol, || format!("Catalan routes differ by {}", dc.to_decimal_string(3)))?;
    // S_k = sum_{n<=k} (-1)^n/(2n+1)^2: even k above G, odd k below.
    let mut s = Real::zero(&ctx);
    for k in 0..=10i64 {
        let term = Real::from_i64(1, &ctx) / Real::from_i64((2 * k + 1) * (2 * k + 1), &ctx);
        s = if k % 2 == 0 { &s + &term } else { &s - &term };
        let above = s > c1;
        ensure(above == (k % 2 == 0), || format!("partial sum S_{k} on the wrong side of G"))?;
    }
    Ok(format!(
        "gamma diff {}, G diff {}, S_0..S_10 alternate around G",
        dg.to_decimal_string(2),
        dc.to_decimal_string(2)
    ))
}

fn perturbed_catalog() -> String {
    let text = export_catalog(&builtin_catalog());
    let perturbed = text.replacen("4*pi*x^2", "4.000001*pi*x^2", 1);
    assert_ne!(perturbed, text, "identity 11 coefficient not found in export");
    perturbed
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("perturbed.catalog");
    std::fs::write(&path, perturbed_catalog()).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_integral-verify"))
        .args(["verify", "--identity", "11", "--digits", "30", "--format", "json", "--catalog"])
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code();
    ensure(code == Some(EXIT_FAIL), || format!("exit code {code:?}"))?;
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let ctx = PrecisionContext::new(30).unwrap();
    let rec = &doc["identities"][0];
    let rel = dec(&rec["rel_residual"], &ctx);
    ensure(rec["pass"] == false && rel > Real::pow10(-8, &ctx), || {
        format!("rel_residual {} does not exceed 1e-8", rec["rel_residual"])
    })?;
    Ok(format!("4*pi -> 4.000001*pi: rel_residual {}, exit 1", rel.to_decimal_string(3)))
}

fn side_round_trips(cat: &[Identity]) -> Result<usize, String> {
    let mut sides = 0;
    for i in cat {
        for (name, side) in [("lhs", &i.lhs), ("rhs", &i.rhs)] {
            for e in side.expressions() {
                let printed = print_expression(e);
                let back = parse_expression(&printed).map_err(|err| format!("{}: `{printed}`: {err}", i.id))?;
                ensure(&back == e, || format!("identity {} {name}: `{printed}` changed on reparse", i.id))?;
            }
            sides += 1;
        }
    }
    Ok(sides)
}

fn criterion_9() -> Outcome {
    let builtin = builtin_catalog();
    let sides = side_round_trips(&builtin)?;
    ensure(sides == 24, || format!("{sides} sides"))?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("builtin.catalog");
    std::fs::write(&path, export_catalog(&builtin)).map_err(|e| e.to_string())?;
    let loaded = load_catalog_file(&path).map_err(|e| e.to_string())?;
    ensure(loaded == builtin, || "reloaded catalog differs structurally".into())?;
    let ctx = PrecisionContext::new(30).unwrap();
    for (a, b) in builtin.iter().zip(&loaded) {
        let ra = verify_identity(a, &ctx).map_err(|e| e.to_string())?;
        let rb = verify_identity(b, &ctx).map_err(|e| e.to_string())?;
        let same = ra.lhs_value.bit_eq(&rb.lhs_value)
            && ra.rhs_value.bit_eq(&rb.rhs_value)
            && ra.abs_residual.bit_eq(&rb.abs_residual)
            && ra.rel_residual.bit_eq(&rb.rel_residual);
        ensure(same, || format!("identity {} residuals differ after reload", a.id))?;
    }
    Ok("24 sides reparse identically; 12 reloaded identities give bit-identical residuals".into())
}

fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "identity suite at 30 digits", criterion_1),
        (2, "exact-constant identities", criterion_2),
        (3, "precision ladder 20/40", criterion_3),
        (4, "reciprocity grid", criterion_4),
        (5, "derivative structure", criterion_5),
        (6, "oracle quadrature", criterion_6),
        (7, "constants at 50 digits", criterion_7),
        (8, "negative control", criterion_8),
        (9, "catalog round trip", criterion_9),
    ];
    let mut failed = Vec::new();
    for (n, title, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => report(&format!("criterion {n} PASS ({title}, {secs:.1}s): {detail}")),
            Err(reason) => {
                report(&format!("criterion {n} FAIL ({title}, {secs:.1}s): {reason}"));
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
