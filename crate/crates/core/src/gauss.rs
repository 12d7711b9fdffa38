//! The exact coefficient field ℚ(i): complex numbers with rational real and
//! imaginary parts.  Every operation is a field operation; nothing rounds.
//! Square roots exist only when the argument is a perfect square in ℚ(i),
//! and `sqrt` says so honestly by returning `None` otherwise.

use crate::qq::{q_str, sqrt_exact, Q};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussQ {
    pub re: Q,
    pub im: Q,
}

impl GaussQ {
    pub fn new(re: Q, im: Q) -> GaussQ {
        GaussQ { re, im }
    }

    pub fn zero() -> GaussQ {
        GaussQ::new(Q::zero(), Q::zero())
    }

    pub fn one() -> GaussQ {
        GaussQ::new(Q::one(), Q::zero())
    }

    pub fn i() -> GaussQ {
        GaussQ::new(Q::zero(), Q::one())
    }

    pub fn from_int(n: i64) -> GaussQ {
        GaussQ::new(BigRational::from_integer(n.into()), Q::zero())
    }

    pub fn from_q(v: Q) -> GaussQ {
        GaussQ::new(v, Q::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &GaussQ) -> GaussQ {
        GaussQ::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &GaussQ) -> GaussQ {
        GaussQ::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn neg(&self) -> GaussQ {
        GaussQ::new(-self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, o: &GaussQ) -> GaussQ {
        GaussQ::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn conj(&self) -> GaussQ {
        GaussQ::new(self.re.clone(), -self.im.clone())
    }

    /// |z|² = re² + im², an exact rational.
    pub fn norm_sq(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; None for zero.
    pub fn inv(&self) -> Option<GaussQ> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(GaussQ::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn div(&self, o: &GaussQ) -> Option<GaussQ> {
        o.inv().map(|v| self.mul(&v))
    }

    /// Exact square root in ℚ(i) when one exists.
    ///
    /// (p+qi)² = a+bi requires |a+bi| ∈ ℚ and (a+|a+bi|)/2 a rational square;
    /// both conditions are checked exactly.
    pub fn sqrt(&self) -> Option<GaussQ> {
        if self.is_zero() {
            return Some(GaussQ::zero());
        }
        if self.im.is_zero() {
            return if self.re.is_negative() {
                sqrt_exact(&(-self.re.clone())).map(|s| GaussQ::new(Q::zero(), s))
            } else {
                sqrt_exact(&self.re).map(GaussQ::from_q)
            };
        }
        let n = sqrt_exact(&self.norm_sq())?;
        let two = BigRational::from_integer(2.into());
        let p2 = (&self.re + &n) / &two;
        let p = sqrt_exact(&p2)?;
        if p.is_zero() {
            return None; // im != 0 but p = 0 cannot square to self
        }
        let qq = &self.im / (&two * &p);
        let cand = GaussQ::new(p, qq);
        if cand.mul(&cand) == *self {
            Some(cand)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Canonical text form, also used as a deterministic sort key.
    pub fn canon(&self) -> String {
        if self.im.is_zero() {
            q_str(&self.re)
        } else if self.re.is_zero() {
            format!("{}i", q_str(&self.im))
        } else if self.im.is_negative() {
            format!("{}{}i", q_str(&self.re), q_str(&self.im))
        } else {
            format!("{}+{}i", q_str(&self.re), q_str(&self.im))
        }
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canon())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qq::q;

    #[test]
    fn field_ops() {
        let a = GaussQ::new(q(1, 2), q(3, 1));
        let b = GaussQ::new(q(-2, 1), q(1, 4));
        let prod = a.mul(&b);
        // (1/2 + 3i)(-2 + i/4) = -1 + 1/8 i - 6i + 3/4 i² = -7/4 - 47/8 i
        assert_eq!(prod, GaussQ::new(q(-7, 4), q(-47, 8)));
        let back = prod.div(&b).unwrap();
        assert_eq!(back, a);
        assert_eq!(a.sub(&a), GaussQ::zero());
    }

    #[test]
    fn sqrt_of_minus_one_is_i() {
        let m1 = GaussQ::from_int(-1);
        assert_eq!(m1.sqrt(), Some(GaussQ::i()));
    }

    #[test]
    fn sqrt_exact_cases() {
        // (2+3i)² = -5+12i
        let z = GaussQ::new(q(-5, 1), q(12, 1));
        let r = z.sqrt().unwrap();
        assert_eq!(r.mul(&r), z);
        // sqrt(2) is not in ℚ(i)
        assert_eq!(GaussQ::from_int(2).sqrt(), None);
        // sqrt of i is not in ℚ(i) (needs sqrt(1/2))
        assert_eq!(GaussQ::i().sqrt(), None);
        assert_eq!(GaussQ::from_int(9).sqrt(), Some(GaussQ::from_int(3)));
        assert_eq!(
            GaussQ::from_int(-16).sqrt(),
            Some(GaussQ::new(q(0, 1), q(4, 1)))
        );
    }

    #[test]
    fn canonical_strings() {
        assert_eq!(GaussQ::new(q(1, 2), q(-3, 4)).canon(), "1/2-3/4i");
        assert_eq!(GaussQ::new(q(0, 1), q(1, 1)).canon(), "1i");
        assert_eq!(GaussQ::from_int(-2).canon(), "-2");
    }
}
