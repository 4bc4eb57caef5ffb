//! Polynomial text format.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-' factor | power
//! power   := primary ['^' integer]
//! primary := number | 'x' index | '(' expr ')'
//! number  := decimal [exponent] | integer '/' integer
//! ```
//!
//! Parsing is exact over rationals; the result is converted to the target
//! scalar at the very end. Printing lists terms by descending total degree,
//! `x1` before `x2` within a degree, with explicit `*` and no unary `+`.

use std::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::exponent::Exponent;
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::real::{FromRational, Real, TextCoefficient};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some(t) = lx.next_token()? {
            out.push(t);
        }
        Ok(out)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'x' | b'X' => {
                self.pos += 1;
                let d = self.digits();
                if d.is_empty() {
                    return Err(syntax(start, "expected variable index after `x`"));
                }
                let idx: usize = d.parse().map_err(|_| syntax(start, "variable index too large"))?;
                Tok::Var(idx)
            }
            b'0'..=b'9' | b'.' => Tok::Num(self.number(start)?),
            other => return Err(syntax(start, format!("unexpected character `{}`", other as char))),
        };
        Ok(Some((start, tok)))
    }

    fn number(&mut self, start: usize) -> Result<BigRational> {
        let int_part = self.digits();
        let mut frac_part = "";
        if self.peek() == Some(b'.') {
            self.pos += 1;
            frac_part = self.digits();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(syntax(start, "malformed number"));
        }
        let mut mantissa: BigInt = format!("{int_part}{frac_part}")
            .parse()
            .map_err(|_| syntax(start, "malformed number"))?;
        let mut exp10: i64 = -(frac_part.len() as i64);
        if matches!(self.peek(), Some(b'e' | b'E')) {
            self.pos += 1;
            let mut sign = 1i64;
            match self.peek() {
                Some(b'+') => self.pos += 1,
                Some(b'-') => {
                    sign = -1;
                    self.pos += 1
                }
                _ => {}
            }
            let d = self.digits();
            let e: i64 = d.parse().map_err(|_| syntax(start, "malformed exponent"))?;
            if e > 4000 {
                return Err(syntax(start, "exponent out of range"));
            }
            exp10 += sign * e;
        }
        let ten = BigInt::from(10);
        let mut value = if exp10 >= 0 {
            mantissa *= Pow::pow(&ten, exp10 as u64);
            BigRational::from_integer(mantissa)
        } else {
            BigRational::new(mantissa, Pow::pow(&ten, (-exp10) as u64))
        };
        // rational literal p/q
        if self.peek() == Some(b'/') {
            if !frac_part.is_empty() || !value.is_integer() {
                return Err(syntax(start, "rational literals need integer numerator"));
            }
            self.pos += 1;
            self.skip_ws();
            let qpos = self.pos;
            let q = self.digits();
            if q.is_empty() {
                return Err(syntax(qpos, "expected integer denominator"));
            }
            let q: BigInt = q.parse().map_err(|_| syntax(qpos, "malformed denominator"))?;
            if q.is_zero() {
                return Err(syntax(qpos, "zero denominator"));
            }
            value /= BigRational::from_integer(q);
        }
        Ok(value)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    nvars: usize,
    end: usize,
}

type Exact = Poly<BigRational>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Exact> {
        let mut acc = match self.peek() {
            Some(Tok::Plus) => {
                self.bump();
                self.term()?
            }
            Some(Tok::Minus) => {
                self.bump();
                self.term()?.neg()
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Exact> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Exact> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Exact> {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(q)) if q.is_integer() => {
                let k: u32 = q
                    .to_integer()
                    .try_into()
                    .map_err(|_| syntax(at, "exponent too large"))?;
                if k > 1000 {
                    return Err(syntax(at, "exponent too large"));
                }
                base.pow(k)
            }
            _ => Err(syntax(at, "expected nonnegative integer exponent")),
        }
    }

    fn primary(&mut self) -> Result<Exact> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(q)) => Ok(Poly::constant(self.nvars, q)),
            Some(Tok::Var(i)) => {
                if i == 0 || i > self.nvars {
                    return Err(Error::VariableOutOfRange {
                        index: i,
                        nvars: self.nvars,
                    });
                }
                Ok(Poly::variable(self.nvars, i - 1))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let close = self.here();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(syntax(close, "expected `)`")),
                }
            }
            Some(t) => Err(syntax(at, format!("unexpected token {t:?}"))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

/// Parses with exact rational coefficients.
pub fn parse_exact(text: &str, nvars: usize) -> Result<Poly<BigRational>> {
    if nvars == 0 {
        return Err(Error::Invalid("polynomials need at least one variable".into()));
    }
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        nvars,
        end: text.len(),
    };
    let out = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(syntax(p.here(), "trailing input"));
    }
    Ok(out)
}

/// Parses the text format and converts coefficients to `T`.
pub fn parse_polynomial<T: Real + FromRational>(text: &str, nvars: usize) -> Result<Poly<T>> {
    parse_exact(text, nvars)?.to_real()
}

/// Largest variable index mentioned in `text` (0 if none); useful to infer
/// the ambient dimension.
pub fn max_variable_index(text: &str) -> Result<usize> {
    Ok(Lexer::tokens(text)?
        .into_iter()
        .filter_map(|(_, t)| match t {
            Tok::Var(i) => Some(i),
            _ => None,
        })
        .max()
        .unwrap_or(0))
}

fn write_monomial(out: &mut String, e: &Exponent) {
    let mut first = true;
    for (i, &a) in e.entries().iter().enumerate() {
        if a == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        let _ = write!(out, "x{}", i + 1);
        if a > 1 {
            let _ = write!(out, "^{a}");
        }
    }
}

/// Canonical printing.
pub fn format_polynomial<C: TextCoefficient>(f: &Poly<C>) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    // highest degree first, x1 before x2 within a degree
    let mut terms: Vec<_> = f.terms().collect();
    terms.sort_by_key(|(e, _)| std::cmp::Reverse(e.total_degree()));
    let mut out = String::new();
    for (i, (e, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative_value();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs_value();
        if e.is_zero() {
            let _ = write!(out, "{a}");
        } else if a.is_one() {
            write_monomial(&mut out, e);
        } else {
            let _ = write!(out, "{a}*");
            write_monomial(&mut out, e);
        }
    }
    out
}

impl<C: TextCoefficient> std::fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_polynomial(self))
    }
}
