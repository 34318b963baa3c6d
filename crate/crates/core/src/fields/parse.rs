//! Recursive-descent parser for field elements and places.
//!
//! Grammar:
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | 't' | '(' expr ')'
//! ```
//! The Unicode minus sign is accepted wherever `-` is.

use super::{arith, Field, FieldElement, Place, Poly, RationalFunction};
use crate::error::{Error, Result};

/// Largest total degree of a parsed rational function.
pub const MAX_DEGREE: usize = 4096;
/// Largest absolute exponent accepted after `^`. Equal to [`MAX_DEGREE`] so
/// that every printed element parses again.
pub const MAX_EXPONENT: i64 = MAX_DEGREE as i64;
const MAX_DEPTH: usize = 128;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<(Tok, String)>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            '0'..='9' => {
                let mut n = c.to_string();
                while let Some(&d) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    n.push(d);
                    chars.next();
                }
                out.push((Tok::Int(n.clone()), n));
                continue;
            }
            't' => Tok::T,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return Err(Error::parse(other.to_string(), "unexpected character")),
        };
        out.push((tok, c.to_string()));
    }
    Ok(out)
}

struct Parser {
    field: Field,
    toks: Vec<(Tok, String)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> String {
        self.toks
            .get(self.pos)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| "<end>".into())
    }

    fn err(&self, msg: &str) -> Error {
        Error::parse(self.here(), msg)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn bounded(&self, x: FieldElement) -> Result<FieldElement> {
        if let FieldElement::Function(f) = &x {
            if f.size() > MAX_DEGREE {
                return Err(self.err("degree exceeds parser limit"));
            }
        }
        Ok(x)
    }

    fn lift<T>(&self, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::ZeroElement => self.err("division by zero"),
            Error::Overflow(w) => self.err(&format!("overflow in {w}")),
            other => other,
        })
    }

    fn expr(&mut self) -> Result<FieldElement> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                let r = self.term()?;
                acc = self.bounded(self.lift(acc.try_add(&r))?)?;
            } else if self.eat(&Tok::Minus) {
                let r = self.term()?;
                acc = self.bounded(self.lift(acc.try_add(&r.neg_checked()?))?)?;
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                let r = self.unary()?;
                self.check_degree(&acc, &r)?;
                acc = self.lift(acc.try_mul(&r))?;
            } else if self.eat(&Tok::Slash) {
                let r = self.unary()?;
                if r.is_zero() {
                    return Err(Error::parse(self.toks[self.pos - 1].1.clone(), "division by zero"));
                }
                self.check_degree(&acc, &r)?;
                let inv = self.lift(r.try_inv())?;
                acc = self.lift(acc.try_mul(&inv))?;
            } else {
                break;
            }
        }
        self.bounded(acc)
    }

    fn check_degree(&self, a: &FieldElement, b: &FieldElement) -> Result<()> {
        if let (FieldElement::Function(x), FieldElement::Function(y)) = (a, b) {
            if x.size() + y.size() > MAX_DEGREE {
                return Err(self.err("degree exceeds parser limit"));
            }
        }
        Ok(())
    }

    fn unary(&mut self) -> Result<FieldElement> {
        if self.eat(&Tok::Minus) {
            self.depth += 1;
            if self.depth > MAX_DEPTH {
                return Err(self.err("nesting too deep"));
            }
            let x = self.unary()?.neg_checked()?;
            self.depth -= 1;
            return Ok(x);
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let neg = self.eat(&Tok::Minus);
        let tok = self.here();
        let Some(Tok::Int(n)) = self.peek().cloned() else {
            return Err(self.err("expected integer exponent"));
        };
        self.pos += 1;
        let e: i64 = n
            .parse()
            .ok()
            .filter(|e: &i64| *e <= MAX_EXPONENT)
            .ok_or_else(|| Error::parse(tok.clone(), "exponent too large"))?;
        let e = if neg { -e } else { e };
        if base.is_zero() && e < 0 {
            return Err(Error::parse(tok, "division by zero"));
        }
        if let FieldElement::Function(f) = &base {
            if f.size().saturating_mul(e.unsigned_abs() as usize) > MAX_DEGREE {
                return Err(Error::parse(tok, "degree exceeds parser limit"));
            }
        }
        self.lift(base.try_pow(e))
    }

    fn atom(&mut self) -> Result<FieldElement> {
        let tok = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                match self.field {
                    Field::Rational => {
                        let v: i128 = n.parse().map_err(|_| Error::parse(tok, "integer too large"))?;
                        Ok(FieldElement::Rational(super::Rational::integer(v)))
                    }
                    Field::Function { p } => {
                        let r = n.bytes().fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p);
                        Ok(self.field.integer(r as i64))
                    }
                }
            }
            Some(Tok::T) => {
                self.pos += 1;
                self.field
                    .t()
                    .map_err(|_| Error::parse(tok, "the variable t is not available over Q"))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let x = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                Ok(x)
            }
            _ => Err(self.err("expected an integer, `t`, or `(`")),
        }
    }
}

impl FieldElement {
    fn neg_checked(&self) -> Result<FieldElement> {
        match self {
            FieldElement::Rational(r) => r
                .checked_neg()
                .map(FieldElement::Rational)
                .ok_or_else(|| Error::parse(r.to_string(), "overflow in negation")),
            _ => Ok(self.neg()),
        }
    }
}

pub(super) fn parse_element(field: Field, s: &str) -> Result<FieldElement> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::parse("<end>", "empty element"));
    }
    let mut parser = Parser {
        field,
        toks,
        pos: 0,
        depth: 0,
    };
    let x = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return Err(parser.err("unexpected trailing input"));
    }
    Ok(x)
}

pub(super) fn parse_place(field: Field, s: &str) -> Result<Place> {
    let s = s.trim();
    match field {
        Field::Rational => {
            if s == "real" || s == "inf" || s == "∞" {
                return Ok(Place::Real);
            }
            let n = s
                .strip_prefix("p:")
                .ok_or_else(|| Error::parse(s, "expected `p:<prime>` or `real`"))?;
            let l: u64 = n.trim().parse().map_err(|_| Error::parse(n, "expected a prime"))?;
            if !arith::is_prime(l) {
                return Err(Error::parse(n, "not a prime"));
            }
            Ok(Place::Prime(l))
        }
        Field::Function { .. } => {
            if s == "inf" || s == "∞" {
                return Ok(Place::Infinity);
            }
            let f = parse_element(field, s)?;
            let FieldElement::Function(RationalFunction { num, den }) = f else {
                unreachable!()
            };
            if !den.is_one() || num.deg() == 0 {
                return Err(Error::parse(s, "a finite place is a nonconstant polynomial"));
            }
            if num.deg() > 64 {
                return Err(Error::parse(s, "place degree exceeds 64"));
            }
            let pi: Poly = num.monic();
            if pi != num {
                return Err(Error::parse(s, "a finite place must be monic"));
            }
            if !pi.is_irreducible() {
                return Err(Error::parse(s, "a finite place must be irreducible"));
            }
            Ok(Place::Finite(pi))
        }
    }
}
