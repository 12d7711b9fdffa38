//! Formal Puiseux series with explicit truncation tracking.
//!
//! A series is a finite list of (rational exponent, coefficient) terms in
//! strictly increasing exponent order together with a truncation bound: every
//! exponent of the true object below `trunc` is represented, nothing at or
//! above `trunc` is known.  `trunc = Inf` means the series is exact.  The
//! t-adic valuation of Σ aₙ t^{qₙ} is q₀ (so |x| = e^{−val x} under the
//! convention used throughout the crate: bigger valuation = smaller element).
//!
//! Truncations propagate pessimistically through arithmetic, and asking a
//! question the truncation cannot answer (the valuation of a series with no
//! known terms, a coefficient at or beyond the bound, an inverse to an
//! unsupported order) is a `PrecisionExhausted` error, never a guess.

use crate::coeff::{Backend, Coeff};
use crate::err::{self, Result};
use crate::qq::{q_str, ram_of, Q, Val};
use num::complex::Complex64;
use num::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug)]
pub struct Pux {
    terms: Vec<(Q, Coeff)>,
    trunc: Val,
    backend: Backend,
}

impl Pux {
    /// Normalizing constructor: sorts, merges equal exponents, drops zero
    /// coefficients and anything at or beyond the truncation.
    pub fn new(terms: Vec<(Q, Coeff)>, trunc: Val, backend: Backend) -> Pux {
        let mut map: BTreeMap<Q, Coeff> = BTreeMap::new();
        for (e, c) in terms {
            if Val::Fin(e.clone()) >= trunc {
                continue;
            }
            match map.remove(&e) {
                Some(prev) => {
                    let s = prev.add(&c);
                    map.insert(e, s);
                }
                None => {
                    map.insert(e, c);
                }
            }
        }
        let terms: Vec<(Q, Coeff)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Pux {
            terms,
            trunc,
            backend,
        }
    }

    pub fn zero(backend: &Backend) -> Pux {
        Pux {
            terms: vec![],
            trunc: Val::Inf,
            backend: backend.clone(),
        }
    }

    pub fn one(backend: &Backend) -> Pux {
        Pux::from_coeff(Coeff::one(backend))
    }

    pub fn from_i64(n: i64, backend: &Backend) -> Pux {
        Pux::from_coeff(Coeff::from_i64(n, backend))
    }

    pub fn from_coeff(c: Coeff) -> Pux {
        let backend = c.backend();
        Pux::new(vec![(Q::zero(), c)], Val::Inf, backend)
    }

    /// c·t^e as an exact series.
    pub fn monomial(e: Q, c: Coeff) -> Pux {
        let backend = c.backend();
        Pux::new(vec![(e, c)], Val::Inf, backend)
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn terms(&self) -> &[(Q, Coeff)] {
        &self.terms
    }

    pub fn trunc(&self) -> &Val {
        &self.trunc
    }

    /// Exactly the zero series.
    pub fn is_known_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_inf()
    }

    /// No known terms but finitely truncated: could be zero, could be deeper.
    pub fn is_empty_unknown(&self) -> bool {
        self.terms.is_empty() && !self.trunc.is_inf()
    }

    /// The valuation, if the truncation can certify it.
    pub fn val(&self) -> Result<Val> {
        match self.terms.first() {
            Some((e, _)) => Ok(Val::Fin(e.clone())),
            None if self.trunc.is_inf() => Ok(Val::Inf),
            None => Err(err::precision(format!(
                "valuation unknown: no terms below truncation {}",
                self.trunc
            ))),
        }
    }

    /// A certified lower bound for the valuation (never errors).
    pub fn val_lb(&self) -> Val {
        match self.terms.first() {
            Some((e, _)) => Val::Fin(e.clone()),
            None => self.trunc.clone(),
        }
    }

    pub fn leading(&self) -> Result<(Q, Coeff)> {
        match self.terms.first() {
            Some((e, c)) => Ok((e.clone(), c.clone())),
            None => Err(err::precision("leading term of a series with none known")),
        }
    }

    /// Coefficient at exponent e (zero counts as known when e < trunc).
    pub fn coeff_at(&self, e: &Q) -> Result<Coeff> {
        for (te, tc) in &self.terms {
            if te == e {
                return Ok(tc.clone());
            }
        }
        if Val::Fin(e.clone()) < self.trunc {
            Ok(Coeff::zero(&self.backend))
        } else {
            Err(err::precision(format!(
                "coefficient at t^{} lies beyond truncation {}",
                q_str(e),
                self.trunc
            )))
        }
    }

    pub fn add(&self, o: &Pux) -> Pux {
        let trunc = self.trunc.clone().min_with(o.trunc.clone());
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Pux::new(terms, trunc, self.backend.clone())
    }

    pub fn sub(&self, o: &Pux) -> Pux {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Pux {
        Pux {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
            trunc: self.trunc.clone(),
            backend: self.backend.clone(),
        }
    }

    pub fn mul(&self, o: &Pux) -> Pux {
        // Result is known below min(t₁+v₂, t₂+v₁), valuations as lower bounds.
        let trunc = self
            .trunc
            .add(&o.val_lb())
            .min_with(o.trunc.add(&self.val_lb()));
        let mut acc: BTreeMap<Q, Coeff> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1 + e2;
                if Val::Fin(e.clone()) >= trunc {
                    continue;
                }
                let p = c1.mul(c2);
                match acc.remove(&e) {
                    Some(prev) => {
                        acc.insert(e, prev.add(&p));
                    }
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        let terms: Vec<(Q, Coeff)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Pux {
            terms,
            trunc,
            backend: self.backend.clone(),
        }
    }

    pub fn mul_coeff(&self, c: &Coeff) -> Pux {
        if c.is_zero_quiet() {
            return Pux::zero(&self.backend);
        }
        Pux {
            terms: self
                .terms
                .iter()
                .map(|(e, tc)| (e.clone(), tc.mul(c)))
                .collect(),
            trunc: self.trunc.clone(),
            backend: self.backend.clone(),
        }
    }

    /// Multiply by the monomial t^e (exact shift of all exponents).
    pub fn mul_mono(&self, e: &Q) -> Pux {
        Pux {
            terms: self
                .terms
                .iter()
                .map(|(te, tc)| (te + e, tc.clone()))
                .collect(),
            trunc: match &self.trunc {
                Val::Fin(t) => Val::Fin(t + e),
                Val::Inf => Val::Inf,
            },
            backend: self.backend.clone(),
        }
    }

    pub fn pow(&self, n: usize) -> Pux {
        let mut acc = Pux::one(&self.backend);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drop everything at exponent ≥ e and cap the truncation there.
    pub fn truncate_at(&self, e: &Q) -> Pux {
        let cap = Val::Fin(e.clone());
        Pux {
            terms: self
                .terms
                .iter()
                .filter(|(te, _)| Val::Fin(te.clone()) < cap)
                .cloned()
                .collect(),
            trunc: self.trunc.clone().min_with(cap),
            backend: self.backend.clone(),
        }
    }

    /// Multiplicative inverse, correct below t^order.
    ///
    /// A series known below T with valuation v determines its inverse only
    /// below T − 2v; asking beyond that is a precision error.
    pub fn invert(&self, order: &Q) -> Result<Pux> {
        let (v, lead) = match self.terms.first() {
            Some((e, c)) => (e.clone(), c.clone()),
            None if self.trunc.is_inf() => {
                return Err(err::internal("inverse of the zero series"))
            }
            None => {
                return Err(err::precision(
                    "inverse of a series with no known terms",
                ))
            }
        };
        if let Val::Fin(t) = &self.trunc {
            let cap = t - &v - &v;
            if &cap < order {
                return Err(err::precision(format!(
                    "inverse requested below t^{} but truncation only supports t^{}",
                    q_str(order),
                    q_str(&cap)
                )));
            }
        }
        let ginv = Pux::monomial(-v.clone(), lead.inv()?);
        // fg = 1 + u with val(u) > 0; under the float backend the constant may
        // be 1 + (roundoff), which the normalizing subtraction sweeps into the
        // zero tolerance.
        let fg = self.mul(&ginv);
        let u = fg.sub(&Pux::one(&self.backend));
        if let Some((ue, _)) = u.terms.first() {
            if ue <= &Q::zero() {
                return Err(err::internal(format!(
                    "inverse residual has non-positive valuation {}",
                    q_str(ue)
                )));
            }
        }
        let w_target = order + &v;
        let mu = u.neg();
        let mut sum = Pux::one(&self.backend);
        let mut p = Pux::one(&self.backend);
        let mut guard = 0usize;
        loop {
            p = p.mul(&mu).truncate_at(&w_target);
            if p.terms.is_empty() {
                break;
            }
            sum = sum.add(&p);
            guard += 1;
            if guard > 100_000 {
                return Err(err::internal("inverse expansion failed to terminate"));
            }
        }
        let mut out = ginv.mul(&sum).truncate_at(order);
        // The cap analysis above certifies knowledge below t^order even when
        // intermediate truncation bookkeeping was more pessimistic.
        out.trunc = Val::Fin(order.clone());
        Ok(out)
    }

    /// self / g, correct below t^order.
    pub fn div(&self, g: &Pux, order: &Q) -> Result<Pux> {
        let vf = match self.val_lb() {
            Val::Fin(v) => v,
            Val::Inf => return Ok(Pux::zero(&self.backend)), // exact zero numerator
        };
        let inv_order = order - &vf;
        Ok(self.mul(&g.invert(&inv_order)?).truncate_at(order))
    }

    /// Ramification index: lcm of exponent denominators.
    pub fn ram(&self) -> Result<u64> {
        if self.terms.is_empty() {
            return Ok(1);
        }
        ram_of(self.terms.iter().map(|(e, _)| e))
    }

    /// Evaluate at a concrete complex t (principal branch for fractional
    /// exponents).  Verification-layer use only.
    pub fn eval_f64(&self, t: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let (re, im) = c.to_f64c();
            let ef = e.to_f64().unwrap_or(f64::NAN);
            acc += Complex64::new(re, im) * t.powf(ef);
        }
        acc
    }

    /// Exact-equality test: the difference is the known-zero series.
    /// (Under the float backend "known zero" already absorbs the tolerance.)
    pub fn eq_series(&self, o: &Pux) -> bool {
        self.sub(o).is_known_zero()
    }

    /// Deterministic rendering usable as a sort/dedup key.
    pub fn canon_key(&self) -> String {
        let mut s = String::new();
        for (e, c) in &self.terms {
            s.push_str(&format!("{}:{};", q_str(e), c.canon()));
        }
        s.push_str(&format!("|{}", self.trunc));
        s
    }
}

impl fmt::Display for Pux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            if self.trunc.is_inf() {
                return write!(f, "0");
            }
            return write!(f, "O(t^{})", self.trunc);
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*t^{}", q_str(e))?;
            }
        }
        if !self.trunc.is_inf() {
            write!(f, " + O(t^{})", self.trunc)?;
        }
        Ok(())
    }
}

/// Valuation of a difference, the workhorse of tree geometry.
pub fn val_of_diff(a: &Pux, b: &Pux) -> Result<Val> {
    a.sub(b).val()
}
