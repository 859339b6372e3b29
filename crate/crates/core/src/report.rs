//! Report assembly and rendering.
//!
//! JSON numerics are decimal strings with `digits` significant digits;
//! ids, node counts and timings are integers.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use crate::catalog::{DerivativeCheck, ModularRecord, VerificationRecord};
use crate::constants;
use crate::precision::{PrecisionContext, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub digits: u32,
    /// `builtin` or the catalog path.
    pub catalog: String,
    pub selection: Vec<u32>,
    pub constants: ConstantsDigest,
    pub identities: Vec<VerificationRecord>,
    pub modular: Vec<ModularRecord>,
    pub derivative_checks: Vec<DerivativeCheck>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantsDigest {
    pub pi: String,
    pub gamma: String,
    pub catalan: String,
}

impl ConstantsDigest {
    pub fn compute(ctx: &PrecisionContext) -> Self {
        let d = ctx.target_digits() as usize;
        Self {
            pi: constants::pi(ctx).to_decimal_string(d),
            gamma: constants::euler_gamma(ctx).to_decimal_string(d),
            catalan: constants::catalan(ctx).to_decimal_string(d),
        }
    }
}

impl VerificationReport {
    pub fn overall_pass(&self) -> bool {
        self.identities.iter().all(|r| r.pass)
            && self.modular.iter().all(|m| m.pass)
            && self.derivative_checks.iter().all(|d| d.pass)
    }

    pub fn all_converged(&self) -> bool {
        self.identities.iter().all(|r| r.converged)
    }
}

#[derive(Serialize)]
struct JsonConfig<'a> {
    digits: u32,
    catalog: &'a str,
    selection: &'a [u32],
}

#[derive(Serialize)]
struct JsonIdentity {
    id: u32,
    lhs: String,
    rhs: String,
    abs_residual: String,
    rel_residual: String,
    tolerance: String,
    pass: bool,
    converged: bool,
    nodes: usize,
    elapsed_ms: u128,
}

#[derive(Serialize)]
struct JsonModular {
    y: String,
    residual: String,
    pass: bool,
}

#[derive(Serialize)]
struct JsonDerivative {
    y: String,
    direct: String,
    finite_diff: String,
    residual: String,
    pass: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: JsonConfig<'a>,
    constants: &'a ConstantsDigest,
    identities: Vec<JsonIdentity>,
    modular: Vec<JsonModular>,
    derivative_checks: Vec<JsonDerivative>,
    overall_pass: bool,
    elapsed_ms: u128,
}

fn json(r: &VerificationReport) -> String {
    let d = r.digits as usize;
    let s = |v: &Real| v.to_decimal_string(d);
    let doc = JsonReport {
        config: JsonConfig {
            digits: r.digits,
            catalog: &r.catalog,
            selection: &r.selection,
        },
        constants: &r.constants,
        identities: r
            .identities
            .iter()
            .map(|i| JsonIdentity {
                id: i.id,
                lhs: s(&i.lhs_value),
                rhs: s(&i.rhs_value),
                abs_residual: s(&i.abs_residual),
                rel_residual: s(&i.rel_residual),
                tolerance: s(&i.tolerance),
                pass: i.pass,
                converged: i.converged,
                nodes: i.nodes,
                elapsed_ms: i.elapsed.as_millis(),
            })
            .collect(),
        modular: r
            .modular
            .iter()
            .map(|m| JsonModular {
                y: s(&m.y),
                residual: s(&m.residual),
                pass: m.pass,
            })
            .collect(),
        derivative_checks: r
            .derivative_checks
            .iter()
            .map(|c| JsonDerivative {
                y: s(&c.y),
                direct: s(&c.direct),
                finite_diff: s(&c.finite_diff),
                residual: s(&c.residual),
                pass: c.pass,
            })
            .collect(),
        overall_pass: r.overall_pass(),
        elapsed_ms: r.elapsed.as_millis(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

fn status(pass: bool, converged: bool) -> &'static str {
    match (pass, converged) {
        (_, false) => "NOCONV",
        (true, true) => "PASS",
        (false, true) => "FAIL",
    }
}

fn text(r: &VerificationReport) -> String {
    let d = r.digits as usize;
    let short = |v: &Real| v.to_decimal_string(3);
    let mut out = String::new();
    let _ = writeln!(out, "digits {}   catalog {}", r.digits, r.catalog);
    let _ = writeln!(out);
    let _ = writeln!(out, "constants");
    for (name, v) in [("pi", &r.constants.pi), ("gamma", &r.constants.gamma), ("catalan", &r.constants.catalan)] {
        let _ = writeln!(out, "  {name:<8} {v}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "identities");
    let _ = writeln!(
        out,
        "  {:>3}  {:<6}  {:<w$}  {:>10}  {:>10}  {:>7}  {:>8}",
        "id",
        "status",
        "lhs",
        "rel_resid",
        "tolerance",
        "nodes",
        "ms",
        w = d + 3
    );
    for i in &r.identities {
        let _ = writeln!(
            out,
            "  {:>3}  {:<6}  {:<w$}  {:>10}  {:>10}  {:>7}  {:>8}",
            i.id,
            status(i.pass, i.converged),
            i.lhs_value.to_decimal_string(d),
            short(&i.rel_residual),
            short(&i.tolerance),
            i.nodes,
            i.elapsed.as_millis(),
            w = d + 3
        );
    }
    if !r.modular.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "reciprocity y M(y) = sqrt(pi) M(pi/y)");
        let _ = writeln!(out, "  {:<w$}  {:>10}  {:>10}  {:<6}", "y", "residual", "bound", "status", w = d + 3);
        for m in &r.modular {
            let _ = writeln!(
                out,
                "  {:<w$}  {:>10}  {:>10}  {:<6}",
                m.y.to_decimal_string(d),
                short(&m.residual),
                short(&m.bound),
                status(m.pass, true),
                w = d + 3
            );
        }
    }
    if !r.derivative_checks.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "derivative M'(y): direct vs central difference");
        let _ = writeln!(out, "  {:<w$}  {:<w$}  {:>10}  {:<6}", "y", "direct", "residual", "status", w = d + 3);
        for c in &r.derivative_checks {
            let _ = writeln!(
                out,
                "  {:<w$}  {:<w$}  {:>10}  {:<6}",
                c.y.to_decimal_string(d),
                c.direct.to_decimal_string(d),
                short(&c.residual),
                status(c.pass, true),
                w = d + 3
            );
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "overall {}   elapsed {} ms",
        if r.overall_pass() { "PASS" } else { "FAIL" },
        r.elapsed.as_millis()
    );
    out
}

pub fn render_report(r: &VerificationReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Text => text(r),
        ReportFormat::Json => json(r),
    }
    .into_bytes()
}
