//! Recursive-descent parser for the expression language.
//!
//! Grammar:
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' signed-number)?
//! base   := number | ident | func '(' expr ')' | '(' expr ')' | '-' base
//! ```
//! Identifiers are the jet coordinate names (`x`, `t`, `z`, `z_x`, ...,
//! up to order 4, x-suffixes before t-suffixes) and the parameter names
//! below. Anything else is rejected with its position.

use super::expr::{Func, JetExpr};
use super::variable::JetVariable;
use thiserror::Error;

/// Parameter names the parser accepts as symbolic constants.
pub const PARAMETER_NAMES: [&str; 7] = ["lambda", "m1", "m2", "alpha", "beta", "eta", "s"];

#[derive(Debug, Clone, Error, PartialEq)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

/// Parses source text into an expression tree.
pub fn parse(source: &str) -> Result<JetExpr, ParseError> {
    let mut p = Parser { src: source, pos: 0 };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, expected: char) -> bool {
        if self.peek() == Some(expected) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<JetExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.bump();
                    self.skip_ws();
                    let rhs = self.term()?;
                    lhs = JetExpr::Add(lhs.into(), rhs.into());
                }
                Some('-') => {
                    self.bump();
                    self.skip_ws();
                    let rhs = self.term()?;
                    lhs = JetExpr::Sub(lhs.into(), rhs.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<JetExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.bump();
                    self.skip_ws();
                    let rhs = self.factor()?;
                    lhs = JetExpr::Mul(lhs.into(), rhs.into());
                }
                Some('/') => {
                    self.bump();
                    self.skip_ws();
                    let rhs = self.factor()?;
                    lhs = JetExpr::Div(lhs.into(), rhs.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<JetExpr, ParseError> {
        let base = self.base()?;
        self.skip_ws();
        if self.eat('^') {
            self.skip_ws();
            let negative = self.eat('-');
            let n = self.number()?;
            let exponent = if negative { -n } else { n };
            Ok(JetExpr::Pow(base.into(), exponent))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<JetExpr, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.skip_ws();
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some('-') => {
                self.bump();
                self.skip_ws();
                // a sign folds into an adjacent literal; anything else
                // (including a parenthesized literal) stays a negation node
                if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
                    let n = self.number()?;
                    Ok(JetExpr::Const(-n))
                } else {
                    Ok(JetExpr::Neg(self.base()?.into()))
                }
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number().map(JetExpr::Const),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == '.' {
                self.bump();
            } else {
                break;
            }
        }
        // scientific notation
        if matches!(self.peek(), Some('e') | Some('E')) {
            let mark = self.pos;
            self.bump();
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.bump();
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            } else {
                self.pos = mark; // not an exponent, e.g. `2exp(x)` is invalid anyway
            }
        }
        let text = &self.src[start..self.pos];
        if text.is_empty() {
            return Err(self.error("expected a number"));
        }
        text.parse::<f64>().map_err(|_| ParseError {
            position: start,
            message: format!("invalid number literal `{text}`"),
        })
    }

    fn identifier(&mut self) -> Result<JetExpr, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.bump();
            } else {
                break;
            }
        }
        let name = &self.src[start..self.pos];
        if let Some(func) = Func::from_name(name) {
            self.skip_ws();
            if !self.eat('(') {
                return Err(self.error(format!("expected '(' after function `{name}`")));
            }
            let arg = self.expr()?;
            self.skip_ws();
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(JetExpr::Fun(func, arg.into()));
        }
        match JetVariable::from_name(name) {
            Ok(v) => Ok(JetExpr::Var(v)),
            Err(true) => Err(ParseError {
                position: start,
                message: format!("derivative `{name}` exceeds the order-4 cap"),
            }),
            Err(false) => {
                if PARAMETER_NAMES.contains(&name) {
                    Ok(JetExpr::Param(name.to_string()))
                } else {
                    Err(ParseError {
                        position: start,
                        message: format!("unknown identifier `{name}`"),
                    })
                }
            }
        }
    }
}
