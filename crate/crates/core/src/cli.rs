//! Command-line front end.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage, parse or
//! configuration error, 3 quadrature did not converge.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::catalog::{
    builtin_catalog, export_catalog, find_identity, load_catalog_file, m_transform_derivative_check_with, m_transform_with,
    modular_check, verify_identity_with, Identity,
};
use crate::constants::{self, ConstantName};
use crate::error::{Error, Result};
use crate::expr::{eval_expr, parse_expression};
use crate::precision::{PrecisionContext, Real};
use crate::quadrature::QuadratureOptions;
use crate::report::{render_report, ConstantsDigest, ReportFormat, VerificationReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// Default transform grid: 1/2, 1, 2, pi.
pub const DEFAULT_MODULAR_GRID: [&str; 4] = ["1/2", "1", "2", "pi"];

#[derive(Parser, Debug)]
#[command(name = "integral-verify", version, about = "High-precision verification of definite-integral identities")]
struct Cli {
    /// Target significant digits (at least 10).
    #[arg(long, global = true, default_value_t = 30)]
    digits: u32,

    /// Maximum quadrature refinement levels.
    #[arg(long, global = true, value_name = "N")]
    max_levels: Option<u32>,

    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,

    /// Write output to PATH instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify catalog identities, the reciprocity relation and the derivative check.
    Verify(VerifyArgs),
    /// Print pi, sqrt(pi), Euler's gamma and Catalan's constant.
    Constants,
    /// Evaluate an expression in x at one point.
    Eval {
        #[arg(long = "expr", value_name = "S")]
        expr: String,
        /// Constant expression for x.
        #[arg(long, value_name = "X")]
        at: String,
    },
    /// Evaluate M(y) and the reciprocity residual at y.
    Transform {
        /// Positive constant expression.
        #[arg(long, value_name = "Y")]
        y: String,
    },
    /// Print the builtin catalog in the catalog file format.
    ExportCatalog,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Identity id to verify; repeatable.
    #[arg(long = "identity", value_name = "N", conflicts_with = "all")]
    identities: Vec<u32>,

    /// Verify every identity (the default when no --identity is given).
    #[arg(long)]
    all: bool,

    /// Catalog file to use instead of the builtin catalog.
    #[arg(long, value_name = "PATH")]
    catalog: Option<PathBuf>,

    /// Transform argument for the reciprocity and derivative checks; repeatable.
    #[arg(long = "modular-y", value_name = "V")]
    modular_y: Vec<String>,
}

/// Configuration of a `verify` run after validation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub ctx: PrecisionContext,
    pub catalog: Vec<Identity>,
    pub catalog_label: String,
    pub selection: Vec<u32>,
    pub modular_grid: Vec<Real>,
    pub options: QuadratureOptions,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        Error::Term { source, .. } | Error::Integrand { source, .. } => exit_code(source),
        _ => EXIT_USAGE,
    }
}

/// Parses and evaluates a constant expression given on the command line.
fn constant_arg(flag: &str, text: &str, ctx: &PrecisionContext) -> Result<Real> {
    let e = parse_expression(text).map_err(|e| Error::Config(format!("{flag} `{text}`: {e}")))?;
    if e.has_var() {
        return Err(Error::Config(format!("{flag} `{text}` must not depend on x")));
    }
    eval_expr(&e, &Real::zero(ctx), ctx)
}

/// Evaluates every check of a `verify` run.
pub fn run_verify(cfg: &RunConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let ctx = &cfg.ctx;
    let opts = &cfg.options;
    let chosen = cfg
        .selection
        .iter()
        .map(|&id| find_identity(&cfg.catalog, id))
        .collect::<Result<Vec<_>>>()?;
    let identities = chosen
        .par_iter()
        .map(|i| verify_identity_with(i, ctx, opts))
        .collect::<Result<Vec<_>>>()?;
    let modular = cfg
        .modular_grid
        .par_iter()
        .map(|y| modular_check(y, ctx, opts))
        .collect::<Result<Vec<_>>>()?;
    let step = crate::catalog::derivative_step(ctx);
    let derivative_checks = cfg
        .modular_grid
        .par_iter()
        .map(|y| m_transform_derivative_check_with(y, &step, ctx, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport {
        digits: ctx.target_digits(),
        catalog: cfg.catalog_label.clone(),
        selection: cfg.selection.clone(),
        constants: ConstantsDigest::compute(ctx),
        identities,
        modular,
        derivative_checks,
        elapsed: start.elapsed(),
    })
}

fn build_config(args: &VerifyArgs, ctx: PrecisionContext, options: QuadratureOptions) -> Result<RunConfig> {
    let (catalog, catalog_label) = match &args.catalog {
        Some(path) => (load_catalog_file(path)?, path.display().to_string()),
        None => (builtin_catalog(), "builtin".to_string()),
    };
    let mut selection = if args.identities.is_empty() {
        catalog.iter().map(|i| i.id).collect()
    } else {
        args.identities.clone()
    };
    selection.sort_unstable();
    selection.dedup();
    for &id in &selection {
        find_identity(&catalog, id)?;
    }
    let texts: Vec<&str> = if args.modular_y.is_empty() {
        DEFAULT_MODULAR_GRID.to_vec()
    } else {
        args.modular_y.iter().map(String::as_str).collect()
    };
    let modular_grid = texts
        .iter()
        .map(|t| {
            let y = constant_arg("--modular-y", t, &ctx)?;
            if y.is_positive() {
                Ok(y)
            } else {
                Err(Error::Config(format!("--modular-y `{t}` must be positive")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunConfig {
        ctx,
        catalog,
        catalog_label,
        selection,
        modular_grid,
        options,
    })
}

fn emit(cli: &Cli, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, bytes).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => stdout.write_all(bytes).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let ctx = PrecisionContext::new(cli.digits)?;
    let mut options = QuadratureOptions::default();
    if let Some(n) = cli.max_levels {
        if n == 0 {
            return Err(Error::Config("--max-levels must be at least 1".into()));
        }
        options.max_levels = n;
    }
    let digits = ctx.target_digits() as usize;
    let json = cli.format == ReportFormat::Json;
    match &cli.command {
        Command::Verify(args) => {
            let cfg = build_config(args, ctx, options)?;
            let report = run_verify(&cfg)?;
            emit(cli, &render_report(&report, cli.format), stdout)?;
            Ok(if !report.all_converged() {
                EXIT_NONCONVERGENCE
            } else if report.overall_pass() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            })
        }
        Command::Constants => {
            let values: Vec<(&str, String)> = ConstantName::ALL
                .iter()
                .map(|&c| (c.as_str(), constants::constant(c, &ctx).to_decimal_string(digits)))
                .collect();
            let text = if json {
                let map: serde_json::Map<String, serde_json::Value> =
                    values.into_iter().map(|(k, v)| (k.to_string(), v.into())).collect();
                serde_json::to_string_pretty(&map).expect("serializes") + "\n"
            } else {
                values.iter().map(|(k, v)| format!("{k:<8} {v}\n")).collect()
            };
            emit(cli, text.as_bytes(), stdout)?;
            Ok(EXIT_PASS)
        }
        Command::Eval { expr, at } => {
            let e = parse_expression(expr).map_err(|e| Error::Config(format!("--expr `{expr}`: {e}")))?;
            let x = constant_arg("--at", at, &ctx)?;
            let v = eval_expr(&e, &x, &ctx)?.to_trimmed_string(digits);
            let text = if json {
                serde_json::json!({ "expr": expr, "at": x.to_trimmed_string(digits), "value": v }).to_string() + "\n"
            } else {
                format!("{v}\n")
            };
            emit(cli, text.as_bytes(), stdout)?;
            Ok(EXIT_PASS)
        }
        Command::Transform { y } => {
            let yv = constant_arg("--y", y, &ctx)?;
            if !yv.is_positive() {
                return Err(Error::Config(format!("--y `{y}` must be positive")));
            }
            let m = m_transform_with(&yv, &ctx, &options)?;
            let rec = modular_check(&yv, &ctx, &options)?;
            let s = |v: &Real| v.to_decimal_string(digits);
            let text = if json {
                let doc = serde_json::json!({
                    "y": s(&yv),
                    "m": s(&m),
                    "residual": s(&rec.residual),
                    "pass": rec.pass,
                });
                serde_json::to_string_pretty(&doc).expect("serializes") + "\n"
            } else {
                format!(
                    "y          {}\nM(y)       {}\nresidual   {}\nbound      {}\nstatus     {}\n",
                    s(&yv),
                    s(&m),
                    rec.residual.to_decimal_string(3),
                    rec.bound.to_decimal_string(3),
                    if rec.pass { "PASS" } else { "FAIL" }
                )
            };
            emit(cli, text.as_bytes(), stdout)?;
            Ok(if rec.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::ExportCatalog => {
            emit(cli, export_catalog(&builtin_catalog()).as_bytes(), stdout)?;
            Ok(EXIT_PASS)
        }
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run_cli_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = run_cli_with(args, &mut out, &mut err);
    let _ = out.flush();
    code
}
