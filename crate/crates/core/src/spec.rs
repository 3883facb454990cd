//! Text formats: the polytope spec file and the PL expression grammar.
//!
//! A spec file is JSON with rationals kept as strings:
//!
//! ```json
//! { "dim": 2, "name": "cp2",
//!   "halfspaces": [ { "normal": [-1, 0], "bound": "1" },
//!                   { "normal": [0, -1], "bound": "1" },
//!                   { "normal": [1, 1],  "bound": "1" } ] }
//! ```
//!
//! Each half-space reads `⟨normal, x⟩ ≤ bound`.
//!
//! PL expressions are `max(e1, e2, ...)` or a single `e`, where each `e` is a
//! sum of rational terms `c` and `c*xj`, e.g. `max(0, 1/2 + x1 - 3*x2)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{build_polytope, GeometryError, HalfSpace, Polytope};
use crate::pl::AffineFunction;
use crate::scalar::{fmt_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("PL expression, offset {offset}: {message}")]
    Expression { offset: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceEntry {
    pub normal: Vec<i64>,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub halfspaces: Vec<HalfSpaceEntry>,
}

impl SpecFile {
    pub fn from_polytope(p: &Polytope<Rational>, name: Option<&str>) -> Self {
        Self {
            dim: p.dim(),
            name: name.map(str::to_string),
            halfspaces: p
                .halfspaces()
                .iter()
                .map(|h| HalfSpaceEntry { normal: h.normal.clone(), bound: fmt_rational(&h.bound) })
                .collect(),
        }
    }

    pub fn to_polytope(&self) -> Result<Polytope<Rational>, ParseError> {
        let mut hs = Vec::with_capacity(self.halfspaces.len());
        for (i, entry) in self.halfspaces.iter().enumerate() {
            if entry.normal.len() != self.dim {
                return Err(ParseError::Field {
                    field: format!("halfspaces[{i}].normal"),
                    message: format!("expected {} components, found {}", self.dim, entry.normal.len()),
                });
            }
            let bound = parse_rational(&entry.bound).ok_or_else(|| ParseError::Field {
                field: format!("halfspaces[{i}].bound"),
                message: format!("`{}` is not a rational such as \"7/2\" or \"3\"", entry.bound),
            })?;
            hs.push(HalfSpace::new(entry.normal.clone(), bound));
        }
        Ok(build_polytope(self.dim, hs)?)
    }
}

/// Parses spec text into a validated polytope.
pub fn parse_spec(text: &str) -> Result<Polytope<Rational>, ParseError> {
    parse_spec_file(text)?.to_polytope()
}

pub fn parse_spec_file(text: &str) -> Result<SpecFile, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Pretty-printed spec text for `p`.
pub fn emit_spec(p: &Polytope<Rational>, name: Option<&str>) -> String {
    let mut s = serde_json::to_string_pretty(&SpecFile::from_polytope(p, name)).expect("spec serializes");
    s.push('\n');
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token<'a> {
    Max,
    Open,
    Close,
    Comma,
    Plus,
    Minus,
    Star,
    Number(&'a str),
    Var(usize),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token<'_>)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Token::Open,
            b')' => Token::Close,
            b',' => Token::Comma,
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.' || bytes[i] == b'/') {
                    i += 1;
                }
                out.push((start, Token::Number(&src[start..i])));
                continue;
            }
            b'x' => {
                i += 1;
                let digits = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let index: usize = src[digits..i]
                    .parse()
                    .ok()
                    .filter(|&k| k >= 1)
                    .ok_or(ParseError::Expression { offset: start, message: "variables are x1, x2, ...".into() })?;
                out.push((start, Token::Var(index - 1)));
                continue;
            }
            _ if src[i..].starts_with("max") => {
                i += 3;
                out.push((start, Token::Max));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Expression { offset: start, message: format!("unexpected character `{ch}`") });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    end: usize,
    dim: usize,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.pos).map(|t| t.1)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Expression { offset: self.offset(), message: message.into() })
    }

    fn expect(&mut self, want: Token<'a>, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn number(&mut self, text: &str) -> Result<Rational, ParseError> {
        match parse_rational(text) {
            Some(r) => Ok(r),
            None => self.error(format!("`{text}` is not a rational literal")),
        }
    }

    /// `term := number ['*' var] | var`
    fn term(&mut self, negative: bool, acc: &mut AffineFunction<Rational>) -> Result<(), ParseError> {
        let (coeff, var) = match self.peek() {
            Some(Token::Number(text)) => {
                let c = self.number(text)?;
                self.pos += 1;
                if self.peek() == Some(Token::Star) {
                    self.pos += 1;
                    match self.peek() {
                        Some(Token::Var(j)) => {
                            self.pos += 1;
                            (c, Some(j))
                        }
                        _ => return self.error("expected a variable after `*`"),
                    }
                } else {
                    (c, None)
                }
            }
            Some(Token::Var(j)) => {
                self.pos += 1;
                (Rational::from_integer(1.into()), Some(j))
            }
            _ => return self.error("expected a number or a variable"),
        };
        let coeff = if negative { -coeff } else { coeff };
        match var {
            Some(j) if j >= self.dim => self.error(format!("x{} exceeds the dimension {}", j + 1, self.dim)),
            Some(j) => {
                acc.gradient[j] += coeff;
                Ok(())
            }
            None => {
                acc.constant += coeff;
                Ok(())
            }
        }
    }

    /// `expr := ['+'|'-']* term (('+'|'-')+ term)*`
    fn expr(&mut self) -> Result<AffineFunction<Rational>, ParseError> {
        let mut acc = AffineFunction::constant(self.dim, Rational::from_integer(0.into()));
        let mut first = true;
        loop {
            let mut negative = false;
            let mut saw_sign = false;
            while let Some(t @ (Token::Plus | Token::Minus)) = self.peek() {
                negative ^= t == Token::Minus;
                saw_sign = true;
                self.pos += 1;
            }
            if !first && !saw_sign {
                return Ok(acc);
            }
            self.term(negative, &mut acc)?;
            first = false;
        }
    }

    fn parse(&mut self) -> Result<Vec<AffineFunction<Rational>>, ParseError> {
        let pieces = if self.peek() == Some(Token::Max) {
            self.pos += 1;
            self.expect(Token::Open, "`(` after max")?;
            let mut pieces = vec![self.expr()?];
            while self.peek() == Some(Token::Comma) {
                self.pos += 1;
                pieces.push(self.expr()?);
            }
            self.expect(Token::Close, "`,` or `)`")?;
            pieces
        } else {
            vec![self.expr()?]
        };
        if self.pos != self.tokens.len() {
            return self.error("trailing input");
        }
        Ok(pieces)
    }
}

/// Parses a PL expression into its affine pieces in dimension `dim`.
pub fn parse_pl(src: &str, dim: usize) -> Result<Vec<AffineFunction<Rational>>, ParseError> {
    let tokens = tokenize(src)?;
    ExprParser { tokens, pos: 0, end: src.len(), dim }.parse()
}
