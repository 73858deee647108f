//! Integer-linear correction exponents such as `(q-1)*o1 + 2*o2`.
//!
//! Coefficients may depend linearly on the local dimension `q`; the value
//! is reduced mod q when the correction is applied.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// `constant + per_q · q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Coef {
    pub constant: i64,
    pub per_q: i64,
}

impl Coef {
    pub const fn int(value: i64) -> Self {
        Self {
            constant: value,
            per_q: 0,
        }
    }

    /// `q − 1`.
    pub const Q_MINUS_ONE: Coef = Coef {
        constant: -1,
        per_q: 1,
    };

    pub fn at(self, q: u32) -> i64 {
        self.constant + self.per_q * i64::from(q)
    }

    fn is_zero(self) -> bool {
        self.constant == 0 && self.per_q == 0
    }

    fn add(self, rhs: Self) -> Self {
        Self {
            constant: self.constant + rhs.constant,
            per_q: self.per_q + rhs.per_q,
        }
    }

    fn neg(self) -> Self {
        Self {
            constant: -self.constant,
            per_q: -self.per_q,
        }
    }

    fn mul(self, rhs: Self) -> Option<Self> {
        if self.per_q != 0 && rhs.per_q != 0 {
            return None;
        }
        Some(Self {
            constant: self.constant * rhs.constant,
            per_q: self.constant * rhs.per_q + self.per_q * rhs.constant,
        })
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.per_q, self.constant) {
            (0, c) => write!(f, "{c}"),
            (1, 0) => f.write_str("q"),
            (p, 0) => write!(f, "{p}*q"),
            (p, c) => {
                f.write_str("(")?;
                if p == 1 {
                    f.write_str("q")?;
                } else {
                    write!(f, "{p}*q")?;
                }
                if c < 0 {
                    write!(f, "-{})", -c)
                } else {
                    write!(f, "+{c})")
                }
            }
        }
    }
}

/// `constant + Σ coef_v · v` over outcome variables `v`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearExpr {
    pub constant: Coef,
    /// Terms in order of first appearance; coefficients are never zero.
    pub terms: Vec<(String, Coef)>,
}

impl LinearExpr {
    pub fn var(name: impl Into<String>, coef: Coef) -> Self {
        let mut e = Self::default();
        e.add_term(name.into(), coef);
        e
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(v, _)| v.as_str())
    }

    fn add_term(&mut self, name: String, coef: Coef) {
        if let Some(slot) = self.terms.iter_mut().find(|(v, _)| *v == name) {
            slot.1 = slot.1.add(coef);
        } else {
            self.terms.push((name, coef));
        }
        self.terms.retain(|(_, c)| !c.is_zero());
    }

    fn plus(mut self, rhs: Self) -> Self {
        self.constant = self.constant.add(rhs.constant);
        for (v, c) in rhs.terms {
            self.add_term(v, c);
        }
        self
    }

    fn negated(self) -> Self {
        Self {
            constant: self.constant.neg(),
            terms: self.terms.into_iter().map(|(v, c)| (v, c.neg())).collect(),
        }
    }

    fn times(self, rhs: Self) -> std::result::Result<Self, String> {
        let (scalar, expr) = match (self.terms.is_empty(), rhs.terms.is_empty()) {
            (true, _) => (self.constant, rhs),
            (_, true) => (rhs.constant, self),
            _ => return Err("product of two outcome variables is not linear".into()),
        };
        let scale = |c: Coef| {
            scalar
                .mul(c)
                .ok_or_else(|| "coefficient quadratic in q is not supported".to_string())
        };
        let mut out = Self {
            constant: scale(expr.constant)?,
            terms: Vec::new(),
        };
        for (v, c) in expr.terms {
            out.add_term(v, scale(c)?);
        }
        Ok(out)
    }

    /// Value for the given outcome bindings (not yet reduced mod q).
    pub fn eval(&self, q: u32, bindings: &HashMap<String, u32>) -> Result<i64> {
        let mut total = self.constant.at(q);
        for (v, c) in &self.terms {
            let value = bindings
                .get(v)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            total += c.at(q) * i64::from(*value);
        }
        Ok(total)
    }

    /// Parse an expression in `+ - * ( )`, integers, `q` and identifiers.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Err("empty exponent expression".into());
        }
        let mut parser = ExprParser { tokens, pos: 0 };
        let expr = parser.sum()?;
        match parser.tokens.get(parser.pos) {
            None => Ok(expr),
            Some(t) => Err(format!("unexpected token `{t}` in exponent")),
        }
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.terms {
            let (neg, mag) = if c.per_q == 0 && c.constant < 0 {
                (true, c.neg())
            } else {
                (false, *c)
            };
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
                (true, false) => {}
            }
            if mag == Coef::int(1) {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
            first = false;
        }
        if !self.constant.is_zero() || first {
            let c = self.constant;
            if first {
                write!(f, "{c}")?;
            } else if c.per_q == 0 && c.constant < 0 {
                write!(f, " - {}", -c.constant)?;
            } else {
                write!(f, " + {c}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(i64),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Int(v) => write!(f, "{v}"),
            Token::Ident(s) => f.write_str(s),
            Token::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(text: &str) -> std::result::Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
            }
            let v = s.parse().map_err(|_| format!("integer `{s}` too large"))?;
            tokens.push(Token::Int(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
            }
            tokens.push(Token::Ident(s));
        } else if "+-*()".contains(c) {
            tokens.push(Token::Sym(c));
            chars.next();
        } else {
            return Err(format!("unexpected character `{c}` in exponent"));
        }
    }
    Ok(tokens)
}

struct ExprParser {
    tokens: Vec<Token>,
    pos: usize,
}

impl ExprParser {
    fn peek_sym(&self, sym: char) -> bool {
        self.tokens.get(self.pos) == Some(&Token::Sym(sym))
    }

    fn sum(&mut self) -> std::result::Result<LinearExpr, String> {
        let mut acc = self.product()?;
        loop {
            if self.peek_sym('+') {
                self.pos += 1;
                acc = acc.plus(self.product()?);
            } else if self.peek_sym('-') {
                self.pos += 1;
                acc = acc.plus(self.product()?.negated());
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> std::result::Result<LinearExpr, String> {
        let mut acc = self.factor()?;
        while self.peek_sym('*') {
            self.pos += 1;
            acc = acc.times(self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> std::result::Result<LinearExpr, String> {
        let token = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| "exponent ends unexpectedly".to_string())?;
        self.pos += 1;
        match token {
            Token::Int(v) => Ok(LinearExpr {
                constant: Coef::int(v),
                terms: Vec::new(),
            }),
            Token::Ident(name) if name == "q" => Ok(LinearExpr {
                constant: Coef {
                    constant: 0,
                    per_q: 1,
                },
                terms: Vec::new(),
            }),
            Token::Ident(name) => Ok(LinearExpr::var(name, Coef::int(1))),
            Token::Sym('-') => Ok(self.factor()?.negated()),
            Token::Sym('(') => {
                let inner = self.sum()?;
                if !self.peek_sym(')') {
                    return Err("missing `)` in exponent".into());
                }
                self.pos += 1;
                Ok(inner)
            }
            Token::Sym(c) => Err(format!("unexpected `{c}` in exponent")),
        }
    }
}
