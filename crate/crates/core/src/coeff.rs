//! Backend-polymorphic coefficients: exact ℚ(i) or arbitrary-precision floats.
//!
//! A computation runs under exactly one backend, chosen up front; mixing two
//! backends in one arithmetic expression is a programming error and panics
//! (the family parser makes it impossible for inputs to do this).  Fallible
//! field operations (division, square root) return `Result` instead.
//!
//! This module also owns the little coefficient-expression language used in
//! family files, so inputs can say `"sqrt(30)/3"` or `"-1-sqrt(3)*i"` and get
//! either an exact value or a correctly rounded big float depending on the
//! backend.

use crate::bigc::{BigC, FloatCtx};
use crate::err::{self, Result};
use crate::gauss::GaussQ;
use crate::qq::{parse_q, Q};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum Backend {
    Exact,
    Float(Arc<FloatCtx>),
}

impl Backend {
    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Exact)
    }

    pub fn describe(&self) -> String {
        match self {
            Backend::Exact => "exact".into(),
            Backend::Float(ctx) => format!("float(prec={}, ztol={})", ctx.prec, ctx.eps_text),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Coeff {
    G(GaussQ),
    B(BigC),
}

impl Coeff {
    pub fn zero(backend: &Backend) -> Coeff {
        match backend {
            Backend::Exact => Coeff::G(GaussQ::zero()),
            Backend::Float(ctx) => Coeff::B(BigC::zero(ctx)),
        }
    }

    pub fn one(backend: &Backend) -> Coeff {
        match backend {
            Backend::Exact => Coeff::G(GaussQ::one()),
            Backend::Float(ctx) => Coeff::B(BigC::one(ctx)),
        }
    }

    pub fn from_i64(n: i64, backend: &Backend) -> Coeff {
        match backend {
            Backend::Exact => Coeff::G(GaussQ::from_int(n)),
            Backend::Float(ctx) => Coeff::B(BigC::from_f64(n as f64, 0.0, ctx)),
        }
    }

    pub fn from_q_pair(re: &Q, im: &Q, backend: &Backend) -> Coeff {
        match backend {
            Backend::Exact => Coeff::G(GaussQ::new(re.clone(), im.clone())),
            Backend::Float(ctx) => Coeff::B(BigC::from_q(re, im, ctx)),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Coeff::G(_) => Backend::Exact,
            Coeff::B(b) => Backend::Float(b.ctx.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::G(g) => g.is_zero(),
            Coeff::B(b) => b.is_zero(),
        }
    }

    /// Zero test without logging a tolerance decision (pre-filtering only).
    pub fn is_zero_quiet(&self) -> bool {
        match self {
            Coeff::G(g) => g.is_zero(),
            Coeff::B(b) => b.is_zero_quiet(),
        }
    }

    pub fn add(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::G(a), Coeff::G(b)) => Coeff::G(a.add(b)),
            (Coeff::B(a), Coeff::B(b)) => Coeff::B(a.add(b)),
            _ => panic!("mixed coefficient backends"),
        }
    }

    pub fn sub(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::G(a), Coeff::G(b)) => Coeff::G(a.sub(b)),
            (Coeff::B(a), Coeff::B(b)) => Coeff::B(a.sub(b)),
            _ => panic!("mixed coefficient backends"),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::G(a) => Coeff::G(a.neg()),
            Coeff::B(a) => Coeff::B(a.neg()),
        }
    }

    pub fn mul(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::G(a), Coeff::G(b)) => Coeff::G(a.mul(b)),
            (Coeff::B(a), Coeff::B(b)) => Coeff::B(a.mul(b)),
            _ => panic!("mixed coefficient backends"),
        }
    }

    pub fn conj(&self) -> Coeff {
        match self {
            Coeff::G(a) => Coeff::G(a.conj()),
            Coeff::B(a) => Coeff::B(a.conj()),
        }
    }

    pub fn inv(&self) -> Result<Coeff> {
        match self {
            Coeff::G(a) => a
                .inv()
                .map(Coeff::G)
                .ok_or_else(|| err::internal("inverse of exact zero")),
            Coeff::B(a) => a.inv().map(Coeff::B),
        }
    }

    pub fn div(&self, o: &Coeff) -> Result<Coeff> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn sqrt(&self) -> Result<Coeff> {
        match self {
            Coeff::G(a) => a.sqrt().map(Coeff::G).ok_or_else(|| {
                err::unrepresentable(format!(
                    "sqrt({a}) is not in Q(i); use the float backend"
                ))
            }),
            Coeff::B(a) => Ok(Coeff::B(a.sqrt())),
        }
    }

    pub fn pow(&self, mut n: usize) -> Coeff {
        let mut base = self.clone();
        let mut acc = Coeff::one(&self.backend());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Equality up to the backend's zero tolerance.
    pub fn eq_c(&self, o: &Coeff) -> bool {
        self.sub(o).is_zero()
    }

    pub fn eq_c_quiet(&self, o: &Coeff) -> bool {
        self.sub(o).is_zero_quiet()
    }

    pub fn to_f64c(&self) -> (f64, f64) {
        match self {
            Coeff::G(g) => g.to_f64(),
            Coeff::B(b) => b.to_f64c(),
        }
    }

    /// Deterministic canonical rendering; doubles as a sort/dedup key.
    pub fn canon(&self) -> String {
        match self {
            Coeff::G(g) => g.canon(),
            Coeff::B(b) => b.canon(),
        }
    }

    /// Exact value if the backend is exact.
    pub fn as_gauss(&self) -> Option<&GaussQ> {
        match self {
            Coeff::G(g) => Some(g),
            Coeff::B(_) => None,
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::G(g) => write!(f, "{g}"),
            Coeff::B(b) => write!(f, "{}+{}i", b.re, b.im),
        }
    }
}

// ---------------------------------------------------------------------------
// Coefficient expressions: +, -, *, /, sqrt(...), i, numbers.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // optional exponent part: e±ddd
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                out.push(Tok::Num(chars[start..i].iter().collect()));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            _ => return Err(err::input(format!("unexpected character {c:?} in {s:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    backend: &'a Backend,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Coeff> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Coeff> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = acc.div(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Coeff> {
        match self.bump() {
            Some(Tok::Minus) => Ok(self.factor()?.neg()),
            Some(Tok::Plus) => self.factor(),
            Some(Tok::Num(n)) => self.number(&n),
            Some(Tok::Ident(id)) if id == "i" => {
                let i = Coeff::from_q_pair(&Q::zero(), &Q::one(), self.backend);
                Ok(i)
            }
            Some(Tok::Ident(id)) if id == "sqrt" => {
                match self.bump() {
                    Some(Tok::LParen) => {}
                    _ => return Err(err::input("sqrt must be followed by (")),
                }
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => {}
                    _ => return Err(err::input("unclosed sqrt(")),
                }
                inner.sqrt()
            }
            Some(Tok::Ident(id)) => Err(err::input(format!("unknown identifier {id:?}"))),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(err::input("unbalanced parentheses")),
                }
            }
            other => Err(err::input(format!("unexpected token {other:?}"))),
        }
    }

    fn number(&mut self, text: &str) -> Result<Coeff> {
        // "12", "1.5", "2.5e-3" — exact backend turns all of these into rationals.
        let (mantissa, exp10) = match text.to_ascii_lowercase().split_once('e') {
            Some((m, e)) => {
                let e: i32 = e
                    .parse()
                    .map_err(|_| err::input(format!("bad exponent in {text:?}")))?;
                (m.to_string(), e)
            }
            None => (text.to_string(), 0),
        };
        let mut v = parse_q(&mantissa)?;
        if exp10 != 0 {
            let pow = BigRational::from_integer(BigInt::from(10u32).pow(exp10.unsigned_abs()));
            v = if exp10 > 0 { v * pow } else { v / pow };
        }
        Ok(Coeff::from_q_pair(&v, &Q::zero(), self.backend))
    }
}

/// Parse a coefficient expression under the given backend.
pub fn parse_expr(s: &str, backend: &Backend) -> Result<Coeff> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(err::input("empty coefficient expression"));
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        backend,
    };
    let v = p.expr()?;
    if p.pos != toks.len() {
        return Err(err::input(format!("trailing garbage in expression {s:?}")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qq::q;

    #[test]
    fn exact_expressions() {
        let b = Backend::Exact;
        let v = parse_expr("1/2 - 3*i", &b).unwrap();
        assert_eq!(v.as_gauss().unwrap(), &GaussQ::new(q(1, 2), q(-3, 1)));
        let v = parse_expr("sqrt(9/4)", &b).unwrap();
        assert_eq!(v.as_gauss().unwrap(), &GaussQ::from_q(q(3, 2)));
        let v = parse_expr("(1+i)*(1-i)", &b).unwrap();
        assert_eq!(v.as_gauss().unwrap(), &GaussQ::from_int(2));
        let v = parse_expr("sqrt(-1)", &b).unwrap();
        assert_eq!(v.as_gauss().unwrap(), &GaussQ::i());
        // 2.5e-1 = 1/4
        let v = parse_expr("2.5e-1", &b).unwrap();
        assert_eq!(v.as_gauss().unwrap(), &GaussQ::from_q(q(1, 4)));
    }

    #[test]
    fn exact_sqrt_30_is_rejected() {
        let e = parse_expr("sqrt(30)/3", &Backend::Exact).unwrap_err();
        assert!(matches!(e, crate::err::Error::Unrepresentable(_)));
    }

    #[test]
    fn float_expressions() {
        let ctx = FloatCtx::new(256, "1e-40").unwrap();
        let b = Backend::Float(ctx);
        let v = parse_expr("sqrt(30)/3", &b).unwrap();
        let (re, im) = v.to_f64c();
        assert!((re - 30f64.sqrt() / 3.0).abs() < 1e-14);
        assert_eq!(im, 0.0);
        let w = parse_expr("-1 - sqrt(3)*i", &b).unwrap();
        let (re, im) = w.to_f64c();
        assert!((re + 1.0).abs() < 1e-14);
        assert!((im + 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn mixed_backend_panics() {
        let ctx = FloatCtx::new(128, "1e-20").unwrap();
        let a = Coeff::one(&Backend::Exact);
        let b = Coeff::one(&Backend::Float(ctx));
        let r = std::panic::catch_unwind(|| a.add(&b));
        assert!(r.is_err());
    }

    #[test]
    fn pow_and_eq() {
        let b = Backend::Exact;
        let two = Coeff::from_i64(2, &b);
        assert!(two.pow(10).eq_c(&Coeff::from_i64(1024, &b)));
        assert!(two.pow(0).eq_c(&Coeff::one(&b)));
    }
}
