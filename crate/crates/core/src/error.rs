use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Byte range into a parsed expression, `start..end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn contains(&self, offset: usize) -> bool {
        self.start <= offset && (offset < self.end || (self.start == self.end && offset == self.start))
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    UnexpectedToken,
    UnbalancedParenthesis,
    UnknownIdentifier,
    InvalidNumber,
    UnexpectedEnd,
}

/// Expression syntax error with the offending byte range.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {}: {reason}", span.start)]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub span: SourceSpan,
    pub reason: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Syntax(#[from] SyntaxError),

    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },

    #[error("unknown {kind} `{name}`")]
    Lookup { kind: &'static str, name: String },

    #[error("integrand failed at x = {abscissa}: {source}")]
    Integrand {
        abscissa: String,
        #[source]
        source: Box<Error>,
    },

    #[error("term {index}: {source}")]
    Term {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {reason}")]
    CatalogFormat {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("{path}:{line}:{column}: {source}")]
    CatalogSyntax {
        path: String,
        line: usize,
        /// 1-based column of the offending token.
        column: usize,
        #[source]
        source: SyntaxError,
    },

    #[error("{path}: identity {id} defined twice (lines {first_line} and {second_line})")]
    DuplicateId {
        path: String,
        id: u32,
        first_line: usize,
        second_line: usize,
    },

    #[error("{what} did not converge")]
    NonConvergence { what: String },

    #[error("failed to read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(expr: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            expr: expr.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
