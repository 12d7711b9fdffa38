//! Exact rational exponents and valuations.
//!
//! All t-adic geometry in this crate (exponents of Puiseux series, radii of
//! Berkovich disks, path distances, polygon slopes) lives in ℚ ∪ {+∞} and is
//! computed exactly with `BigRational`.  Floats never enter here, regardless of
//! which coefficient backend is active.

use crate::err::{self, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

pub type Q = BigRational;

/// `q(n, d)` = the rational n/d.
pub fn q(n: i64, d: i64) -> Q {
    assert!(d != 0, "zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn qz(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// A valuation: a rational number or +∞ (the valuation of zero).
///
/// The derived `Ord` is correct because the `Fin` variant precedes `Inf`:
/// every finite value compares below `Inf`, and finite values compare as
/// rationals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Fin(Q),
    Inf,
}

impl Val {
    pub fn zero() -> Val {
        Val::Fin(Q::zero())
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Val::Inf)
    }

    pub fn fin(&self) -> Result<&Q> {
        match self {
            Val::Fin(v) => Ok(v),
            Val::Inf => Err(err::internal("expected a finite valuation, found +inf")),
        }
    }

    pub fn add(&self, other: &Val) -> Val {
        match (self, other) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }

    /// Subtract a finite rational (Inf stays Inf).
    pub fn sub_q(&self, other: &Q) -> Val {
        match self {
            Val::Fin(a) => Val::Fin(a - other),
            Val::Inf => Val::Inf,
        }
    }

    pub fn min_with(self, other: Val) -> Val {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn scale(&self, k: i64) -> Val {
        match self {
            Val::Fin(a) => Val::Fin(a * qz(k)),
            Val::Inf => Val::Inf,
        }
    }
}

impl From<Q> for Val {
    fn from(v: Q) -> Val {
        Val::Fin(v)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(v) => write!(f, "{}", q_str(v)),
            Val::Inf => write!(f, "inf"),
        }
    }
}

/// Canonical "p/q" (or "p" for integers) rendering used in reports and sort keys.
pub fn q_str(v: &Q) -> String {
    if v.denom().is_one() {
        format!("{}", v.numer())
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parse "p/q", "p", or a plain decimal like "-1.25" into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| err::input(format!("bad rational numerator in {s:?}")))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| err::input(format!("bad rational denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(err::input(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse()
                .map_err(|_| err::input(format!("bad decimal in {s:?}")))?
        };
        let frac_digits = frac.len() as u32;
        let frac_num: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse()
                .map_err(|_| err::input(format!("bad decimal in {s:?}")))?
        };
        if frac_num.is_negative() {
            return Err(err::input(format!("bad decimal in {s:?}")));
        }
        let den = BigInt::from(10u32).pow(frac_digits);
        let mag = int.abs() * &den + frac_num;
        let signed = if neg { -mag } else { mag };
        return Ok(BigRational::new(signed, den));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| err::input(format!("bad rational {s:?}")))?;
    Ok(BigRational::from_integer(n))
}

/// lcm of the exponent denominators of a set of rationals (the ramification
/// index of a series with those exponents).  Errors if it does not fit in u64.
pub fn ram_of<'a>(exps: impl Iterator<Item = &'a Q>) -> Result<u64> {
    let mut acc = BigInt::one();
    for e in exps {
        let d = e.denom();
        acc = num::integer::lcm(acc, d.clone());
    }
    acc.to_u64()
        .ok_or_else(|| err::internal("ramification index overflows u64"))
}

/// Exact square root of a rational if it is a perfect square, else None.
pub fn sqrt_exact(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Compare a/b with c/d as slopes without constructing rationals (b, d > 0).
pub fn slope_cmp(a: &Q, b: &Q) -> Ordering {
    a.cmp(b)
}
