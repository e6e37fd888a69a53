//! Deterministic text form of polynomials and its parser.
//!
//! A term looks like `-5/72*eta3^2*W*zv^2*zu*n^-3/2`: an optional sign, a
//! rational, then `*`-separated factors. Terms are joined by ` + ` or ` - `
//! and appear in key order, then monomial order. The zero polynomial is `0`.
//! The parser accepts any product order and sums repeated terms, so
//! `parse(render(p)) == p` and hand-written input such as `zv^2*eta3/12` works.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{AsymPoly, EtaMonomial, EtaPoly, Symbol, TermKey, Variables};
use crate::{Error, Result};

fn push_rational(out: &mut String, r: &BigRational) {
    out.push_str(&r.numer().to_string());
    if !r.denom().is_one() {
        out.push('/');
        out.push_str(&r.denom().to_string());
    }
}

fn push_factor(out: &mut String, name: &str, power: u8) {
    match power {
        0 => return,
        1 => out.push_str(name),
        p => out.push_str(&format!("{name}^{p}")),
    }
    out.push('*');
}

fn push_term(out: &mut String, first: bool, coeff: &BigRational, factors: &str) {
    let negative = coeff.is_negative();
    match (first, negative) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
    }
    let magnitude = coeff.abs();
    if factors.is_empty() {
        push_rational(out, &magnitude);
    } else if magnitude.is_one() {
        out.push_str(factors);
    } else {
        push_rational(out, &magnitude);
        out.push('*');
        out.push_str(factors);
    }
}

fn monomial_factors(m: &EtaMonomial) -> String {
    let mut s = String::new();
    for sym in Symbol::ALL {
        push_factor(&mut s, sym.name(), m.exponent(sym));
    }
    s
}

fn order_factor(order: u8) -> &'static str {
    ["", "n^-1/2", "n^-1", "n^-3/2"][order as usize]
}

pub(super) fn render(p: &AsymPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    let mut first = true;
    for (key, coeff) in p.terms() {
        let mut vars = String::new();
        match p.variables() {
            Variables::Symmetric => push_factor(&mut vars, "z", key.zv),
            Variables::Split => {
                push_factor(&mut vars, "zv", key.zv);
                push_factor(&mut vars, "zu", key.zu);
            }
        }
        vars.push_str(order_factor(key.order));
        for (m, r) in coeff.terms() {
            let mut factors = monomial_factors(m);
            factors.push_str(&vars);
            let factors = factors.trim_end_matches('*');
            push_term(&mut out, first, r, factors);
            first = false;
        }
    }
    out
}

pub(super) fn render_eta(p: &EtaPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, r)) in p.terms().enumerate() {
        let factors = monomial_factors(m);
        push_term(&mut out, i == 0, r, factors.trim_end_matches('*'));
    }
    out
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

#[derive(Default)]
struct Term {
    coeff: Option<BigRational>,
    mono: EtaMonomial,
    zv: u8,
    zu: u8,
    z: u8,
    order: u8,
    saw_split: bool,
    saw_symmetric: bool,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += want.len_utf8();
            true
        } else {
            false
        }
    }

    /// `+`, `-` or the Unicode minus sign.
    fn sign(&mut self) -> Option<bool> {
        self.skip_ws();
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(false)
            }
            Some('-') | Some('\u{2212}') => {
                self.bump();
                Some(true)
            }
            _ => None,
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a number");
        }
        BigInt::parse_bytes(&self.src.as_bytes()[start..self.pos], 10)
            .map_or_else(|| self.error("bad number"), Ok)
    }

    fn small(&mut self) -> Result<u8> {
        let at = self.pos;
        let v = self.integer()?;
        u8::try_from(v).or_else(|_| {
            self.pos = at;
            self.error("exponent too large")
        })
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn power(&mut self) -> Result<u8> {
        if self.eat('^') {
            self.small()
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self, t: &mut Term, divide: bool) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let r = BigRational::from_integer(self.integer()?);
                let r = if divide {
                    if r.is_zero() {
                        return self.error("division by zero");
                    }
                    r.recip()
                } else {
                    r
                };
                t.coeff = Some(t.coeff.take().unwrap_or_else(BigRational::one) * r);
                return Ok(());
            }
            Some('(') => return self.error("parentheses are not supported"),
            _ => {}
        }
        if divide {
            return self.error("only numbers may follow '/'");
        }
        let at = self.pos;
        let name = self.ident();
        if name.is_empty() {
            return self.error("expected a number or a symbol");
        }
        if name == "n" {
            return self.order_factor(t);
        }
        let p = self.power()?;
        let bump = |slot: &mut u8| *slot = slot.saturating_add(p);
        match name {
            "zv" => {
                bump(&mut t.zv);
                t.saw_split = true;
            }
            "zu" => {
                bump(&mut t.zu);
                t.saw_split = true;
            }
            "z" => {
                bump(&mut t.z);
                t.saw_symmetric = true;
            }
            _ => match Symbol::from_name(name) {
                Some(s) => t.mono = t.mono.with(s, p),
                None => {
                    self.pos = at;
                    return self.error(format!("unknown symbol {name:?}"));
                }
            },
        }
        Ok(())
    }

    // n^-1/2, n^-1, n^-3/2
    fn order_factor(&mut self, t: &mut Term) -> Result<()> {
        if !self.eat('^') || self.sign() != Some(true) {
            return self.error("expected n^-k or n^-k/2");
        }
        let k = self.small()?;
        let save = self.pos;
        let order = if self.eat('/') {
            match self.integer() {
                Ok(two) if two == BigInt::from(2) => k as u32,
                _ => {
                    self.pos = save;
                    return self.error("n exponent denominator must be 2");
                }
            }
        } else {
            2 * k as u32
        };
        if t.order != 0 {
            return self.error("repeated n factor");
        }
        if order == 0 || order > super::MAX_ORDER as u32 {
            return self.error("n exponent outside the retained orders");
        }
        t.order = order as u8;
        Ok(())
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = Term::default();
        self.factor(&mut t, false)?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') | Some('\u{b7}') => {
                    self.bump();
                    self.factor(&mut t, false)?;
                }
                Some('/') => {
                    self.bump();
                    self.factor(&mut t, true)?;
                }
                _ => return Ok(t),
            }
        }
    }

    fn terms(&mut self) -> Result<alloc::vec::Vec<(bool, Term)>> {
        let mut out = alloc::vec::Vec::new();
        let mut negative = self.sign().unwrap_or(false);
        loop {
            out.push((negative, self.term()?));
            self.skip_ws();
            if self.pos == self.src.len() {
                return Ok(out);
            }
            negative = match self.sign() {
                Some(s) => s,
                None => return self.error("expected '+' or '-'"),
            };
        }
    }
}

fn signed(negative: bool, t: &Term) -> BigRational {
    let c = t.coeff.clone().unwrap_or_else(BigRational::one);
    if negative {
        -c
    } else {
        c
    }
}

pub(super) fn parse(src: &str, vars: Option<Variables>) -> Result<AsymPoly> {
    let mut parser = Parser { src, pos: 0 };
    let terms = parser.terms()?;
    let split = terms.iter().any(|(_, t)| t.saw_split);
    let symmetric = terms.iter().any(|(_, t)| t.saw_symmetric);
    let kind = match (vars, split, symmetric) {
        (_, true, true) => return parser.error("z cannot be mixed with zv/zu"),
        (Some(Variables::Symmetric), true, _) => {
            return parser.error("zv/zu in a symmetric polynomial")
        }
        (Some(Variables::Split), _, true) => return parser.error("z in a split polynomial"),
        (Some(v), _, _) => v,
        (None, _, true) => Variables::Symmetric,
        (None, _, false) => Variables::Split,
    };
    let mut p = AsymPoly::zero(kind);
    for (negative, t) in &terms {
        let key = TermKey::new(t.order, t.zv + t.z, t.zu);
        p.add_term(key, EtaPoly::term(signed(*negative, t), t.mono))
            .map_err(|e| e.context(format!("in {src:?}")))?;
    }
    Ok(p)
}

pub(super) fn parse_eta(src: &str) -> Result<EtaPoly> {
    let mut parser = Parser { src, pos: 0 };
    let mut out = EtaPoly::zero();
    for (negative, t) in parser.terms()? {
        if t.saw_split || t.saw_symmetric || t.order != 0 {
            return Err(Error::Parse {
                position: 0,
                message: "a coefficient cannot contain quantile variables or n".into(),
            });
        }
        out.add_term(t.mono, signed(negative, &t));
    }
    Ok(out)
}
