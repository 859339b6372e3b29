//! Line-oriented catalog files.
//!
//! ```text
//! identity 11
//! lhs
//! integral 0 inf : x*(3 - 4*pi*x^2)*exp(-pi*x*(x + 1))/sinh(pi*x)
//! rhs
//! const : 1/(2*pi)
//! end
//! ```
//!
//! Bounds are `0`, `1`, `inf` or a parenthesised constant expression.
//! Several items under one side are summed. Blank lines are ignored.

use std::collections::HashMap;
use std::path::Path;

use super::{Identity, IntegralTerm, SideSpec};
use crate::error::{Error, Result, SyntaxError};
use crate::expr::{parse_expression, print_expression, Expr};
use crate::quadrature::Interval;

fn bound_text(e: &Expr) -> String {
    match e {
        Expr::Literal(t) if t == "0" || t == "1" => t.clone(),
        other => format!("({})", print_expression(other)),
    }
}

fn write_side(out: &mut String, name: &str, side: &SideSpec) {
    out.push_str(name);
    out.push('\n');
    for t in &side.terms {
        let (a, b) = match &t.interval {
            Interval::SemiInfinite => ("0".to_string(), "inf".to_string()),
            Interval::Finite { lower, upper } => (bound_text(lower), bound_text(upper)),
        };
        out.push_str(&format!("integral {a} {b} : {}\n", print_expression(t.integrand())));
    }
    if let Some(c) = &side.exact_constant {
        out.push_str(&format!("const : {}\n", print_expression(c)));
    }
}

/// Renders `catalog` in the file format. The output depends only on the
/// expression trees, so re-exporting a loaded export gives the same bytes.
pub fn export_catalog(catalog: &[Identity]) -> String {
    let mut out = String::new();
    for i in catalog {
        out.push_str(&format!("identity {}\n", i.id));
        write_side(&mut out, "lhs", &i.lhs);
        write_side(&mut out, "rhs", &i.rhs);
        out.push_str("end\n");
    }
    out
}

struct Line<'a> {
    path: &'a str,
    number: usize,
    text: &'a str,
}

impl Line<'_> {
    fn error(&self, reason: impl Into<String>) -> Error {
        Error::CatalogFormat {
            path: self.path.to_string(),
            line: self.number,
            reason: reason.into(),
        }
    }

    /// Parses `self.text[offset..offset + len]` as an expression.
    fn expr(&self, offset: usize, len: usize) -> Result<Expr> {
        parse_expression(&self.text[offset..offset + len]).map_err(|e: SyntaxError| Error::CatalogSyntax {
            path: self.path.to_string(),
            line: self.number,
            column: self.text[..offset + e.span.start].chars().count() + 1,
            source: e,
        })
    }
}

enum Bound {
    Expr(Expr),
    Inf,
}

/// Reads one bound starting at byte `pos`; returns it and the end offset.
fn bound(line: &Line, pos: usize) -> Result<(Bound, usize)> {
    let rest = &line.text[pos..];
    if rest.starts_with('(') {
        let mut depth = 0usize;
        for (k, ch) in rest.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        let e = line.expr(pos + 1, k - 1)?;
                        if e.has_var() {
                            return Err(line.error("integration bound must not depend on x"));
                        }
                        return Ok((Bound::Expr(e), pos + k + 1));
                    }
                }
                _ => {}
            }
        }
        return Err(line.error("unbalanced parenthesis in bound"));
    }
    let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
    let word = &rest[..len];
    let b = match word {
        "0" | "1" => Bound::Expr(Expr::lit(word)),
        "inf" => Bound::Inf,
        "" => return Err(line.error("missing integration bound")),
        other => return Err(line.error(format!("bad bound `{other}`; expected 0, 1, inf or (expr)"))),
    };
    Ok((b, pos + len))
}

fn skip_ws(text: &str, pos: usize) -> usize {
    pos + text[pos..].len() - text[pos..].trim_start().len()
}

/// Offset of the expression after `:` at or after `pos`.
fn after_colon(line: &Line, pos: usize) -> Result<usize> {
    let pos = skip_ws(line.text, pos);
    if !line.text[pos..].starts_with(':') {
        return Err(line.error("expected `:` before the expression"));
    }
    Ok(pos + 1)
}

fn rest_expr(line: &Line, pos: usize) -> Result<Expr> {
    let start = skip_ws(line.text, pos);
    let end = line.text.trim_end().len().max(start);
    line.expr(start, end - start)
}

fn item(line: &Line, side: &mut PendingSide) -> Result<()> {
    let t = line.text;
    let head = skip_ws(t, 0);
    if let Some(after) = t[head..].strip_prefix("integral") {
        if !after.starts_with(char::is_whitespace) {
            return Err(line.error("expected bounds after `integral`"));
        }
        let p = skip_ws(t, head + "integral".len());
        let (lower, p) = bound(line, p)?;
        let p = skip_ws(t, p);
        let (upper, p) = bound(line, p)?;
        let p = after_colon(line, p)?;
        let integrand = rest_expr(line, p)?;
        let interval = match (lower, upper) {
            (Bound::Expr(Expr::Literal(z)), Bound::Inf) if z == "0" => Interval::SemiInfinite,
            (_, Bound::Inf) => return Err(line.error("an infinite upper bound needs lower bound 0")),
            (Bound::Inf, _) => return Err(line.error("lower bound cannot be inf")),
            (Bound::Expr(a), Bound::Expr(b)) => Interval::finite(a, b),
        };
        side.terms.push(IntegralTerm::new(interval, integrand));
        return Ok(());
    }
    if let Some(after) = t[head..].strip_prefix("const") {
        let p = head + "const".len() + (after.len() - after.trim_start().len());
        let p = after_colon(line, p)?;
        let c = rest_expr(line, p)?;
        if c.has_var() {
            return Err(line.error("a constant must not depend on x"));
        }
        if side.constant.replace(c).is_some() {
            return Err(line.error("a side has at most one constant"));
        }
        return Ok(());
    }
    Err(line.error(format!("expected `integral`, `const`, `lhs`, `rhs` or `end`, found `{}`", t.trim())))
}

#[derive(Default)]
struct PendingSide {
    terms: Vec<IntegralTerm>,
    constant: Option<Expr>,
}

struct Pending {
    id: u32,
    line: usize,
    lhs: Option<PendingSide>,
    rhs: Option<PendingSide>,
    current: Option<bool>, // Some(true) = lhs
}

fn finish_side(side: Option<PendingSide>, line: &Line, name: &str) -> Result<SideSpec> {
    let side = side.ok_or_else(|| line.error(format!("missing {name}")))?;
    if side.terms.is_empty() && side.constant.is_none() {
        return Err(line.error(format!("{name} has no items")));
    }
    SideSpec::new(side.terms, side.constant).map_err(|e| line.error(e.to_string()))
}

/// Parses catalog text; `path` only labels diagnostics.
pub fn parse_catalog(text: &str, path: &str) -> Result<Vec<Identity>> {
    let mut out: Vec<Identity> = Vec::new();
    let mut seen: HashMap<u32, usize> = HashMap::new();
    let mut pending: Option<Pending> = None;
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = Line {
            path,
            number: k + 1,
            text: raw,
        };
        last_line = line.number;
        let word = raw.trim();
        if word.is_empty() {
            continue;
        }
        match pending.as_mut() {
            None => {
                let id = word
                    .strip_prefix("identity")
                    .filter(|r| r.starts_with(char::is_whitespace))
                    .map(str::trim)
                    .ok_or_else(|| line.error(format!("expected `identity N`, found `{word}`")))?;
                let id: u32 = id
                    .parse()
                    .map_err(|_| line.error(format!("identity id `{id}` is not a non-negative integer")))?;
                if let Some(&first) = seen.get(&id) {
                    return Err(Error::DuplicateId {
                        path: path.to_string(),
                        id,
                        first_line: first,
                        second_line: line.number,
                    });
                }
                seen.insert(id, line.number);
                pending = Some(Pending {
                    id,
                    line: line.number,
                    lhs: None,
                    rhs: None,
                    current: None,
                });
            }
            Some(p) => match word {
                "lhs" | "rhs" => {
                    let is_lhs = word == "lhs";
                    let slot = if is_lhs { &mut p.lhs } else { &mut p.rhs };
                    if slot.is_some() {
                        return Err(line.error(format!("{word} given twice")));
                    }
                    *slot = Some(PendingSide::default());
                    p.current = Some(is_lhs);
                }
                "end" => {
                    let p = pending.take().expect("pending identity");
                    out.push(Identity {
                        id: p.id,
                        lhs: finish_side(p.lhs, &line, "lhs")?,
                        rhs: finish_side(p.rhs, &line, "rhs")?,
                        note: String::new(),
                    });
                }
                _ => {
                    let side = match p.current {
                        Some(true) => p.lhs.as_mut(),
                        Some(false) => p.rhs.as_mut(),
                        None => None,
                    }
                    .ok_or_else(|| line.error("item before `lhs` or `rhs`"))?;
                    item(&line, side)?;
                }
            },
        }
    }
    if let Some(p) = pending {
        return Err(Error::CatalogFormat {
            path: path.to_string(),
            line: last_line.max(p.line),
            reason: format!("identity {} is missing `end`", p.id),
        });
    }
    if out.is_empty() {
        return Err(Error::CatalogFormat {
            path: path.to_string(),
            line: last_line.max(1),
            reason: "catalog contains no identities".into(),
        });
    }
    Ok(out)
}

pub fn load_catalog_file(path: &Path) -> Result<Vec<Identity>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_catalog(&text, &path.display().to_string())
}
