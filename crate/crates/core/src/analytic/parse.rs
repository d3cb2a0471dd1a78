//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | factor
//! factor := base ('^' ['-'] integer)?
//! base   := number ['i'] | 'i' | 'pi' | 'e' | 'z' | func '(' expr ')' | '(' expr ')'
//! func   := exp | log | sqrt | sin | cos
//! ```
//!
//! The Unicode minus sign and multiplication sign are accepted as aliases.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use super::expr::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at line {line}, column {column}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    NonIntegerExponent(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier `{id}`"),
            ParseErrorKind::NonIntegerExponent(tok) => {
                write!(f, "exponent must be an integer, found `{tok}`")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Imag(f64),
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
            Tok::Num(_, text) => format!("number `{text}`"),
            Tok::Imag(v) => format!("imaginary literal `{v}i`"),
            Tok::Ident(id) => format!("`{id}`"),
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

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let (l0, c0) = (line, column);
        if ch == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' | '\u{00d7}' | '\u{00b7}' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            i += 1;
            column += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when followed by digits, so `2*e` and `2e` stay distinct
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lexeme: String = chars[start..i].iter().collect();
            column += i - start;
            let value: f64 = lexeme.parse().map_err(|_| ParseError {
                line: l0,
                column: c0,
                kind: ParseErrorKind::Syntax(format!("malformed number `{lexeme}`")),
            })?;
            let followed_by_i = i < chars.len()
                && chars[i] == 'i'
                && !(i + 1 < chars.len() && chars[i + 1].is_ascii_alphanumeric());
            let tok = if followed_by_i {
                i += 1;
                column += 1;
                Tok::Imag(value)
            } else {
                Tok::Num(value, lexeme)
            };
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(ParseError {
            line: l0,
            column: c0,
            kind: ParseErrorKind::Syntax(format!("unexpected character `{ch}`")),
        });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            column: t.column,
            kind,
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = self.peek().tok.describe();
        self.error_here(ParseErrorKind::Syntax(format!(
            "expected {wanted}, found {found}"
        )))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(Expr::neg(self.unary()?))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.factor(),
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if self.peek().tok == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().tok.clone() {
            Tok::Num(_, text) => {
                if !text.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(self.error_here(ParseErrorKind::NonIntegerExponent(text)));
                }
                let n: i32 = text.parse().map_err(|_| {
                    self.error_here(ParseErrorKind::Syntax(format!(
                        "exponent `{text}` out of range"
                    )))
                })?;
                self.bump();
                Ok(Expr::pow(base, if negative { -n } else { n }))
            }
            Tok::Imag(v) => Err(self.error_here(ParseErrorKind::NonIntegerExponent(format!(
                "{v}i"
            )))),
            Tok::Ident(id) => {
                Err(self.error_here(ParseErrorKind::NonIntegerExponent(id)))
            }
            Tok::LParen => Err(self.error_here(ParseErrorKind::NonIntegerExponent(
                "parenthesized expression".into(),
            ))),
            _ => Err(self.unexpected("an integer exponent")),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(v, _) => {
                self.bump();
                Ok(Expr::constant(Complex64::new(v, 0.0)))
            }
            Tok::Imag(v) => {
                self.bump();
                Ok(Expr::constant(Complex64::new(0.0, v)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(ref id) => {
                let value = match id.as_str() {
                    "z" => Some(Expr::Var),
                    "i" => Some(Expr::constant(Complex64::new(0.0, 1.0))),
                    "pi" => Some(Expr::constant(Complex64::new(std::f64::consts::PI, 0.0))),
                    "e" => Some(Expr::constant(Complex64::new(std::f64::consts::E, 0.0))),
                    _ => None,
                };
                if let Some(v) = value {
                    self.bump();
                    return Ok(v);
                }
                let Some(func) = Func::from_name(id) else {
                    return Err(ParseError {
                        line: t.line,
                        column: t.column,
                        kind: ParseErrorKind::UnknownIdentifier(id.clone()),
                    });
                };
                self.bump();
                if self.peek().tok != Tok::LParen {
                    return Err(self.unexpected("`(` after function name"));
                }
                self.bump();
                let arg = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(Expr::call(func, arg))
            }
            _ => Err(self.unexpected("a number, `z`, a function or `(`")),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_caret_reports_column_three() {
        let err = parse_expr("z^^2").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn unknown_identifier() {
        let err = parse_expr("2*w").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("w".into()));
        assert_eq!(err.column, 3);
    }

    #[test]
    fn non_integer_exponent() {
        let err = parse_expr("z^2.5").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonIntegerExponent("2.5".into()));
        let err = parse_expr("z^z").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::NonIntegerExponent(_)));
    }

    #[test]
    fn multiline_positions() {
        let err = parse_expr("z +\n  $").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn complex_literals_and_constants() {
        let e = parse_expr("1+2i").unwrap();
        assert_eq!(e, Expr::constant(Complex64::new(1.0, 2.0)));
        let e = parse_expr("2*e - e*2").unwrap();
        assert_eq!(e, Expr::constant(Complex64::new(0.0, 0.0)));
        let e = parse_expr("1e-3").unwrap();
        assert_eq!(e, Expr::constant(Complex64::new(1e-3, 0.0)));
        assert_eq!(parse_expr("i").unwrap(), Expr::constant(Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn unicode_minus() {
        assert_eq!(parse_expr("1 \u{2212} z").unwrap(), parse_expr("1 - z").unwrap());
    }

    #[test]
    fn unbalanced_parenthesis() {
        let err = parse_expr("(z + 1").unwrap_err();
        assert_eq!(err.column, 7);
    }
}
