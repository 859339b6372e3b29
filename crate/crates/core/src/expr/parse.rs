//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := factor (("*"|"/") factor)* ;
//! factor := "-" factor | base ("^" factor)? ;
//! base   := NUMBER | "x" | "pi" | "gamma" | "catalan"
//!         | FUNC "(" expr ")" | "(" expr ")" ;
//! ```

use super::{BinaryOp, Expr, UnaryOp};
use crate::constants::ConstantName;
use crate::error::{SourceSpan, SyntaxError, SyntaxErrorKind};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Ident(i) => format!("identifier `{i}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn err(kind: SyntaxErrorKind, span: SourceSpan, reason: impl Into<String>) -> SyntaxError {
    SyntaxError {
        kind,
        span,
        reason: reason.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, SourceSpan)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push((tok, SourceSpan::new(start, i)));
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut digits = i > start;
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let frac = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                digits |= i > frac;
            }
            if !digits {
                return Err(err(
                    SyntaxErrorKind::InvalidNumber,
                    SourceSpan::new(start, i),
                    "number has no digits",
                ));
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                let exp = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == exp {
                    return Err(err(
                        SyntaxErrorKind::InvalidNumber,
                        SourceSpan::new(start, i),
                        "exponent has no digits",
                    ));
                }
            }
            out.push((Tok::Number(text[start..i].to_string()), SourceSpan::new(start, i)));
            continue;
        }
        if c.is_ascii_lowercase() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), SourceSpan::new(start, i)));
            continue;
        }
        let len = text[start..].chars().next().map_or(1, char::len_utf8);
        return Err(err(
            SyntaxErrorKind::UnexpectedToken,
            SourceSpan::new(start, start + len),
            format!("unexpected character `{}`", &text[start..start + len]),
        ));
    }
    out.push((Tok::End, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> SyntaxError {
        let (tok, span) = &self.toks[self.pos];
        match tok {
            Tok::End => err(SyntaxErrorKind::UnexpectedEnd, *span, "unexpected end of input"),
            Tok::RParen => err(SyntaxErrorKind::UnbalancedParenthesis, *span, "unmatched `)`"),
            other => err(
                SyntaxErrorKind::UnexpectedToken,
                *span,
                format!("unexpected {}", other.describe()),
            ),
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::neg(self.factor()?));
        }
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn parenthesized(&mut self) -> Result<Expr, SyntaxError> {
        let (open, open_span) = self.bump();
        debug_assert_eq!(open, Tok::LParen);
        let inner = self.expr()?;
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(err(
                SyntaxErrorKind::UnbalancedParenthesis,
                open_span,
                "unclosed `(`",
            )),
            _ => Err(self.unexpected()),
        }
    }

    fn base(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(Expr::Literal(n))
            }
            Tok::LParen => self.parenthesized(),
            Tok::Ident(name) => {
                let span = self.span();
                self.bump();
                match name.as_str() {
                    "x" => return Ok(Expr::Var),
                    "pi" => return Ok(Expr::Const(ConstantName::Pi)),
                    "gamma" => return Ok(Expr::Const(ConstantName::Gamma)),
                    "catalan" => return Ok(Expr::Const(ConstantName::Catalan)),
                    _ => {}
                }
                let Some(op) = UnaryOp::from_name(&name) else {
                    return Err(err(
                        SyntaxErrorKind::UnknownIdentifier,
                        span,
                        format!("unknown identifier `{name}`"),
                    ));
                };
                if *self.peek() != Tok::LParen {
                    return Err(err(
                        SyntaxErrorKind::UnexpectedToken,
                        self.span(),
                        format!("expected `(` after `{name}`, found {}", self.peek().describe()),
                    ));
                }
                let arg = self.parenthesized()?;
                Ok(Expr::unary(op, arg))
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses `text` under the expression grammar.
pub fn parse_expression(text: &str) -> Result<Expr, SyntaxError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinaryOp::*;

    fn lit(s: &str) -> Expr {
        Expr::lit(s)
    }

    #[test]
    fn polynomial_factor() {
        let e = parse_expression("x*(3 - 4*pi*x^2)").unwrap();
        let chain = Expr::binary(
            Mul,
            Expr::binary(Mul, lit("4"), Expr::Const(ConstantName::Pi)),
            Expr::pow(Expr::Var, lit("2")),
        );
        let expected = Expr::binary(Mul, Expr::Var, Expr::binary(Sub, lit("3"), chain));
        assert_eq!(e, expected);
    }

    #[test]
    fn nested_functions() {
        let e = parse_expression("exp(-(ln(x))^2)").unwrap();
        let expected = Expr::unary(
            UnaryOp::Exp,
            Expr::neg(Expr::pow(Expr::unary(UnaryOp::Ln, Expr::Var), lit("2"))),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        // pow is right associative and binds tighter than unary minus
        assert_eq!(
            parse_expression("-x^2^3").unwrap(),
            Expr::neg(Expr::pow(Expr::Var, Expr::pow(lit("2"), lit("3"))))
        );
        // mul/div and add/sub are left associative
        assert_eq!(
            parse_expression("1-2-3").unwrap(),
            Expr::binary(Sub, Expr::binary(Sub, lit("1"), lit("2")), lit("3"))
        );
        assert_eq!(
            parse_expression("1/2*3").unwrap(),
            Expr::binary(Mul, Expr::binary(Div, lit("1"), lit("2")), lit("3"))
        );
        assert_eq!(
            parse_expression("2^-x").unwrap(),
            Expr::pow(lit("2"), Expr::neg(Expr::Var))
        );
        assert_eq!(parse_expression(" x\t+ 1 ").unwrap(), parse_expression("x+1").unwrap());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_expression("1.5e-3").unwrap(), lit("1.5e-3"));
        assert_eq!(parse_expression(".5").unwrap(), lit(".5"));
        assert_eq!(parse_expression("2.").unwrap(), lit("2."));
        let e = parse_expression("2e+x").unwrap_err();
        assert_eq!(e.kind, SyntaxErrorKind::InvalidNumber);
    }

    #[test]
    fn error_positions() {
        let cases: &[(&str, SyntaxErrorKind, usize)] = &[
            ("2*^x", SyntaxErrorKind::UnexpectedToken, 2),
            ("sinhh(x)", SyntaxErrorKind::UnknownIdentifier, 0),
            ("x + foo", SyntaxErrorKind::UnknownIdentifier, 4),
            ("(x + 1", SyntaxErrorKind::UnbalancedParenthesis, 0),
            ("x + 1)", SyntaxErrorKind::UnbalancedParenthesis, 5),
            ("exp x", SyntaxErrorKind::UnexpectedToken, 4),
            ("x $ 1", SyntaxErrorKind::UnexpectedToken, 2),
            ("X", SyntaxErrorKind::UnexpectedToken, 0),
            ("x +", SyntaxErrorKind::UnexpectedEnd, 3),
            ("", SyntaxErrorKind::UnexpectedEnd, 0),
            ("x 1", SyntaxErrorKind::UnexpectedToken, 2),
        ];
        for (text, kind, offset) in cases {
            let e = parse_expression(text).unwrap_err();
            assert_eq!(e.kind, *kind, "{text}: {e}");
            assert_eq!(e.span.start, *offset, "{text}: {e}");
            assert!(e.span.contains(*offset));
        }
    }

    #[test]
    fn unknown_identifier_span_covers_token() {
        let e = parse_expression("1 + sinhh(x)").unwrap_err();
        assert_eq!(e.span, SourceSpan::new(4, 9));
        assert!(e.to_string().contains("sinhh"));
    }
}
