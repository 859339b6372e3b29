//! C ABI over `integral-verify`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns an [`IvStatus`];
//! on failure the message is available from [`iv_last_error_message`] on the
//! same thread until the next failing call. Strings returned through `out`
//! parameters are heap-allocated and must be released with [`iv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use integral_verify::catalog::{
    builtin_catalog, export_catalog, find_identity, load_catalog_file, m_transform_with, modular_check, parse_catalog,
    verify_identity_with, Identity,
};
use integral_verify::cli::{run_verify, RunConfig, DEFAULT_MODULAR_GRID};
use integral_verify::constants::named_constant;
use integral_verify::expr::{eval_expr, parse_expression};
use integral_verify::quadrature::QuadratureOptions;
use integral_verify::report::{render_report, ReportFormat};
use integral_verify::{Error, PrecisionContext, Real};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IvStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Syntax = 4,
    Domain = 5,
    Lookup = 6,
    Catalog = 7,
    NonConvergence = 8,
    Io = 9,
    Panic = 10,
}

/// Precision and quadrature settings.
pub struct IvContext {
    ctx: PrecisionContext,
    options: QuadratureOptions,
}

/// A list of identities.
pub struct IvCatalog {
    identities: Vec<Identity>,
    label: String,
}

/// Outcome of one identity.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct IvVerification {
    pub id: u32,
    pub pass: bool,
    pub converged: bool,
    pub nodes: u64,
    /// Relative residual rounded to a double.
    pub rel_residual: f64,
    pub elapsed_ms: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(IvStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn status_of(e: &Error) -> IvStatus {
    match e {
        Error::Config(_) => IvStatus::Config,
        Error::Syntax(_) => IvStatus::Syntax,
        Error::Domain { .. } => IvStatus::Domain,
        Error::Lookup { .. } => IvStatus::Lookup,
        Error::Integrand { source, .. } | Error::Term { source, .. } => status_of(source),
        Error::CatalogFormat { .. } | Error::CatalogSyntax { .. } | Error::DuplicateId { .. } => IvStatus::Catalog,
        Error::NonConvergence { .. } => IvStatus::NonConvergence,
        Error::Io { .. } => IvStatus::Io,
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn run(body: impl FnOnce() -> Result<(), Failure>) -> IvStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => IvStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            IvStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(IvStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(IvStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(IvStatus::Panic, "string contains NUL".into()))?;
    put(out, c.into_raw(), "out")
}

fn constant_value(text: &str, ctx: &PrecisionContext) -> Result<Real, Failure> {
    let e = parse_expression(text).map_err(Error::from)?;
    if e.has_var() {
        return Err(Failure(IvStatus::Config, format!("`{text}` must not depend on x")));
    }
    Ok(eval_expr(&e, &Real::zero(ctx), ctx)?)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn iv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn iv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn iv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a context for `digits` significant digits (at least 10).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iv_context_new(digits: u32, out: *mut *mut IvContext) -> IvStatus {
    run(|| {
        let ctx = PrecisionContext::new(digits)?;
        let h = Box::new(IvContext {
            ctx,
            options: QuadratureOptions::default(),
        });
        put(out, Box::into_raw(h), "out")
    })
}

/// Sets the maximum number of quadrature refinement levels (at least 1).
///
/// # Safety
/// `ctx` must be a live context handle.
#[no_mangle]
pub unsafe extern "C" fn iv_context_set_max_levels(ctx: *mut IvContext, levels: u32) -> IvStatus {
    run(|| {
        let c = ctx.as_mut().ok_or_else(|| null("ctx"))?;
        if levels == 0 {
            return Err(Failure(IvStatus::Config, "max levels must be at least 1".into()));
        }
        c.options.max_levels = levels;
        Ok(())
    })
}

/// # Safety
/// `ctx` must be null or a handle from [`iv_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iv_context_free(ctx: *mut IvContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Named constant (`pi`, `sqrt_pi`, `gamma`, `catalan`) as a decimal string.
///
/// # Safety
/// Pointers must be valid; `name` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn iv_constant(ctx: *const IvContext, name: *const c_char, out: *mut *mut c_char) -> IvStatus {
    run(|| {
        let c = handle(ctx, "ctx")?;
        let v = named_constant(text(name, "name")?, &c.ctx)?;
        put_string(out, v.to_decimal_string(c.ctx.target_digits() as usize))
    })
}

/// Evaluates `expr` at `x`, where `x` is itself a constant expression.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn iv_eval(
    ctx: *const IvContext,
    expr: *const c_char,
    x: *const c_char,
    out: *mut *mut c_char,
) -> IvStatus {
    run(|| {
        let c = handle(ctx, "ctx")?;
        let e = parse_expression(text(expr, "expr")?).map_err(Error::from)?;
        let at = constant_value(text(x, "x")?, &c.ctx)?;
        let v = eval_expr(&e, &at, &c.ctx)?;
        put_string(out, v.to_trimmed_string(c.ctx.target_digits() as usize))
    })
}

/// `M(y) = ∫₀^∞ e^(-x²) sech(xy) dx` for a constant expression `y ≥ 0`.
///
/// # Safety
/// Pointers must be valid; `y` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn iv_m_transform(ctx: *const IvContext, y: *const c_char, out: *mut *mut c_char) -> IvStatus {
    run(|| {
        let c = handle(ctx, "ctx")?;
        let y = constant_value(text(y, "y")?, &c.ctx)?;
        let m = m_transform_with(&y, &c.ctx, &c.options)?;
        put_string(out, m.to_decimal_string(c.ctx.target_digits() as usize))
    })
}

/// Residual `|y M(y) - √π M(π/y)|` for `y > 0` and whether it is within bound.
///
/// # Safety
/// Pointers must be valid; `y` NUL-terminated. `pass` may be null.
#[no_mangle]
pub unsafe extern "C" fn iv_modular_residual(
    ctx: *const IvContext,
    y: *const c_char,
    residual: *mut *mut c_char,
    pass: *mut bool,
) -> IvStatus {
    run(|| {
        let c = handle(ctx, "ctx")?;
        let y = constant_value(text(y, "y")?, &c.ctx)?;
        let r = modular_check(&y, &c.ctx, &c.options)?;
        if !pass.is_null() {
            pass.write(r.pass);
        }
        put_string(residual, r.residual.to_decimal_string(c.ctx.target_digits() as usize))
    })
}

fn boxed_catalog(identities: Vec<Identity>, label: String) -> *mut IvCatalog {
    Box::into_raw(Box::new(IvCatalog { identities, label }))
}

/// The built-in catalog of twelve identities.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iv_catalog_builtin(out: *mut *mut IvCatalog) -> IvStatus {
    run(|| put(out, boxed_catalog(builtin_catalog(), "builtin".into()), "out"))
}

/// Parses catalog text.
///
/// # Safety
/// Pointers must be valid; `source` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn iv_catalog_parse(source: *const c_char, out: *mut *mut IvCatalog) -> IvStatus {
    run(|| {
        let cat = parse_catalog(text(source, "text")?, "<text>")?;
        put(out, boxed_catalog(cat, "<text>".into()), "out")
    })
}

/// Loads a catalog file.
///
/// # Safety
/// Pointers must be valid; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn iv_catalog_load(path: *const c_char, out: *mut *mut IvCatalog) -> IvStatus {
    run(|| {
        let p = text(path, "path")?;
        let cat = load_catalog_file(Path::new(p))?;
        put(out, boxed_catalog(cat, p.to_string()), "out")
    })
}

/// Number of identities; 0 for a null handle.
///
/// # Safety
/// `cat` must be null or a live catalog handle.
#[no_mangle]
pub unsafe extern "C" fn iv_catalog_len(cat: *const IvCatalog) -> usize {
    cat.as_ref().map_or(0, |c| c.identities.len())
}

/// Identity id at `index`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn iv_catalog_id_at(cat: *const IvCatalog, index: usize, id: *mut u32) -> IvStatus {
    run(|| {
        let c = handle(cat, "cat")?;
        let i = c.identities.get(index).ok_or_else(|| {
            Failure(IvStatus::Lookup, format!("index {index} out of range for {} identities", c.identities.len()))
        })?;
        put(id, i.id, "id")
    })
}

/// Serializes the catalog in the text format accepted by [`iv_catalog_parse`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn iv_catalog_export(cat: *const IvCatalog, out: *mut *mut c_char) -> IvStatus {
    run(|| put_string(out, export_catalog(&handle(cat, "cat")?.identities)))
}

/// # Safety
/// `cat` must be null or a catalog handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iv_catalog_free(cat: *mut IvCatalog) {
    if !cat.is_null() {
        drop(Box::from_raw(cat));
    }
}

/// Verifies one identity of the catalog.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn iv_verify_identity(
    ctx: *const IvContext,
    cat: *const IvCatalog,
    id: u32,
    out: *mut IvVerification,
) -> IvStatus {
    run(|| {
        let c = handle(ctx, "ctx")?;
        let k = handle(cat, "cat")?;
        let r = verify_identity_with(find_identity(&k.identities, id)?, &c.ctx, &c.options)?;
        let v = IvVerification {
            id: r.id,
            pass: r.pass,
            converged: r.converged,
            nodes: r.nodes as u64,
            rel_residual: r.rel_residual.to_f64(),
            elapsed_ms: r.elapsed.as_millis() as u64,
        };
        put(out, v, "out")
    })
}

/// Full verification run rendered as a JSON report. `ids` may be null when
/// `n_ids` is 0, which selects every identity. The reciprocity and
/// derivative checks use the default grid.
///
/// # Safety
/// Pointers must be valid; `ids` must hold `n_ids` elements. `pass` may be null.
#[no_mangle]
pub unsafe extern "C" fn iv_verify_report_json(
    ctx: *const IvContext,
    cat: *const IvCatalog,
    ids: *const u32,
    n_ids: usize,
    json: *mut *mut c_char,
    pass: *mut bool,
) -> IvStatus {
    run(|| {
        let c = handle(ctx, "ctx")?;
        let k = handle(cat, "cat")?;
        let mut selection: Vec<u32> = if n_ids == 0 {
            k.identities.iter().map(|i| i.id).collect()
        } else if ids.is_null() {
            return Err(null("ids"));
        } else {
            std::slice::from_raw_parts(ids, n_ids).to_vec()
        };
        selection.sort_unstable();
        selection.dedup();
        let modular_grid = DEFAULT_MODULAR_GRID
            .iter()
            .map(|t| constant_value(t, &c.ctx))
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = RunConfig {
            ctx: c.ctx.clone(),
            catalog: k.identities.clone(),
            catalog_label: k.label.clone(),
            selection,
            modular_grid,
            options: c.options.clone(),
        };
        let report = run_verify(&cfg)?;
        if !pass.is_null() {
            pass.write(report.overall_pass());
        }
        let bytes = render_report(&report, ReportFormat::Json);
        put_string(json, String::from_utf8(bytes).expect("report is UTF-8"))
    })
}
