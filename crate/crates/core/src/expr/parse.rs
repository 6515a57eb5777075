//! Recursive-descent parser for the scalar-field grammar.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := factor (("*" | "/") factor)*
//! factor  := "-" factor | power
//! power   := primary ("^" factor)?
//! primary := NUMBER | "x1" | "x2" | "x3" | FUNC "(" expr ")" | TABLE "(" expr ")" | "(" expr ")"
//! ```
//!
//! Unary minus applies to a whole power, so `-x1^2` is `-(x1^2)`, and `^` is
//! right-associative. The tree mirrors the source text: nothing is folded.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::{Axis, Func, HermiteTable, Node, ScalarField};

/// Tables that may be referenced by name in parsed text.
pub type TableRegistry = HashMap<String, Arc<HermiteTable>>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: expected {expected}, found {found}")]
    SyntaxError {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::SyntaxError { position, .. } | ParseError::UnknownIdentifier { position, .. } => *position,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
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
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
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

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, start));
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value = lit.parse::<f64>().map_err(|_| ParseError::SyntaxError {
                position: start,
                expected: "decimal literal".into(),
                found: format!("`{lit}`"),
            })?;
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ParseError::SyntaxError {
                position: start,
                expected: "expression".into(),
                found: format!("`{ch}`"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    tables: Option<&'a TableRegistry>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn position(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::SyntaxError {
            position: self.position(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<ScalarField, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let node = match self.peek() {
                Tok::Plus => Node::Add as fn(_, _) -> _,
                Tok::Minus => Node::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = ScalarField::from_node(node(lhs, rhs));
        }
    }

    fn term(&mut self) -> Result<ScalarField, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let node = match self.peek() {
                Tok::Star => Node::Mul as fn(_, _) -> _,
                Tok::Slash => Node::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = ScalarField::from_node(node(lhs, rhs));
        }
    }

    fn factor(&mut self) -> Result<ScalarField, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.factor()?;
            return Ok(ScalarField::from_node(Node::Neg(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ScalarField, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(ScalarField::from_node(Node::Pow(base, exponent)));
        }
        Ok(base)
    }

    fn call_argument(&mut self) -> Result<ScalarField, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let arg = self.expr()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(arg)
    }

    fn primary(&mut self) -> Result<ScalarField, ParseError> {
        let position = self.position();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(ScalarField::constant(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(axis) = variable(&name) {
                    return Ok(ScalarField::var(axis));
                }
                if let Some(func) = Func::from_name(&name) {
                    let arg = self.call_argument()?;
                    return Ok(ScalarField::from_node(Node::Func(func, arg)));
                }
                if let Some(table) = self.tables.and_then(|t| t.get(&name)).cloned() {
                    let arg = self.call_argument()?;
                    return Ok(ScalarField::from_node(Node::Table { table, order: 0, arg }));
                }
                Err(ParseError::UnknownIdentifier { name, position })
            }
            _ => Err(self.error("number, variable, function or `(`")),
        }
    }
}

fn variable(name: &str) -> Option<Axis> {
    match name {
        "x1" => Some(Axis::X1),
        "x2" => Some(Axis::X2),
        "x3" => Some(Axis::X3),
        _ => None,
    }
}

/// True for identifiers reserved by the grammar (variables and functions).
pub(crate) fn is_reserved(name: &str) -> bool {
    variable(name).is_some() || Func::from_name(name).is_some()
}

/// Parses a scalar field.
pub fn parse(text: &str) -> Result<ScalarField, ParseError> {
    parse_inner(text, None)
}

/// Parses a scalar field that may call the given tables, e.g. `T1(x1)`.
pub fn parse_with_tables(text: &str, tables: &TableRegistry) -> Result<ScalarField, ParseError> {
    parse_inner(text, Some(tables))
}

fn parse_inner(text: &str, tables: Option<&TableRegistry>) -> Result<ScalarField, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        tables,
    };
    let out = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error("operator or end of input"));
    }
    Ok(out)
}
