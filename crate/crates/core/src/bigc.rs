//! Arbitrary-precision complex floats: the non-exact coefficient backend.
//!
//! A `BigC` is a pair of `astro_float::BigFloat`s plus a shared context fixing
//! the working precision in bits and the zero tolerance ε_z.  Anything with
//! magnitude ≤ ε_z is *treated as zero*; every place that decision actually
//! fires is counted (and the first few are recorded) in the context so reports
//! can disclose how often results leaned on the tolerance.

use crate::err::{self, Result};
use crate::qq::Q;
use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use std::fmt;
use std::sync::{Arc, Mutex};

const RM: RoundingMode = RoundingMode::ToEven;

/// How many individual tolerance decisions to keep verbatim in the log.
const LOG_SAMPLE_CAP: usize = 32;

#[derive(Default)]
pub struct TolLog {
    pub decisions: u64,
    pub samples: Vec<String>,
}

pub struct FloatCtx {
    pub prec: usize,
    pub eps: BigFloat,
    /// Printable form of ε_z as given by the user.
    pub eps_text: String,
    consts: Mutex<Consts>,
    log: Mutex<TolLog>,
}

impl fmt::Debug for FloatCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FloatCtx(prec={}, eps={})", self.prec, self.eps_text)
    }
}

impl FloatCtx {
    pub fn new(prec: usize, eps_text: &str) -> Result<Arc<FloatCtx>> {
        if prec < 64 || prec > 1 << 20 {
            return Err(err::input(format!(
                "float precision {prec} out of range (64..=1048576 bits)"
            )));
        }
        let mut consts = Consts::new().map_err(|e| err::internal(format!("consts: {e:?}")))?;
        let eps = BigFloat::parse(eps_text, Radix::Dec, prec, RM, &mut consts);
        if eps.is_nan() || eps.sign().map(|s| s.to_int()).unwrap_or(0) < 0 {
            return Err(err::input(format!("bad zero tolerance {eps_text:?}")));
        }
        Ok(Arc::new(FloatCtx {
            prec,
            eps,
            eps_text: eps_text.to_string(),
            consts: Mutex::new(consts),
            log: Mutex::new(TolLog::default()),
        }))
    }

    /// Record that a tolerance decision fired ("this tiny thing was called zero").
    pub fn note(&self, what: &str) {
        let mut log = self.log.lock().unwrap();
        log.decisions += 1;
        if log.samples.len() < LOG_SAMPLE_CAP {
            log.samples.push(what.to_string());
        }
    }

    pub fn decisions(&self) -> u64 {
        self.log.lock().unwrap().decisions
    }

    pub fn samples(&self) -> Vec<String> {
        self.log.lock().unwrap().samples.clone()
    }

    pub fn parse(&self, s: &str) -> Result<BigFloat> {
        let mut consts = self.consts.lock().unwrap();
        let v = BigFloat::parse(s, Radix::Dec, self.prec, RM, &mut consts);
        if v.is_nan() {
            return Err(err::input(format!("unparseable float literal {s:?}")));
        }
        Ok(v)
    }

    pub fn from_f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.prec)
    }

    pub fn from_q(&self, v: &Q) -> BigFloat {
        let n = BigFloat::parse(
            &v.numer().to_string(),
            Radix::Dec,
            self.prec,
            RM,
            &mut self.consts.lock().unwrap(),
        );
        let d = BigFloat::parse(
            &v.denom().to_string(),
            Radix::Dec,
            self.prec,
            RM,
            &mut self.consts.lock().unwrap(),
        );
        n.div(&d, self.prec, RM)
    }

    /// Magnitude-below-tolerance test on a single real float (no logging).
    pub fn below_eps(&self, x: &BigFloat) -> bool {
        x.abs().partial_cmp(&self.eps) != Some(std::cmp::Ordering::Greater)
    }
}

/// Extract an f64 from a BigFloat (astro-float has no direct conversion).
/// Round-trips through the decimal rendering; good to full f64 precision.
pub fn bf_to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let s = format!("{v}");
    s.parse::<f64>().unwrap_or(f64::NAN)
}

#[derive(Clone)]
pub struct BigC {
    pub re: BigFloat,
    pub im: BigFloat,
    pub ctx: Arc<FloatCtx>,
}

impl fmt::Debug for BigC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigC({} + {}i)", self.re, self.im)
    }
}

impl BigC {
    pub fn new(re: BigFloat, im: BigFloat, ctx: Arc<FloatCtx>) -> BigC {
        BigC { re, im, ctx }
    }

    pub fn zero(ctx: &Arc<FloatCtx>) -> BigC {
        BigC::new(ctx.from_f64(0.0), ctx.from_f64(0.0), ctx.clone())
    }

    pub fn one(ctx: &Arc<FloatCtx>) -> BigC {
        BigC::new(ctx.from_f64(1.0), ctx.from_f64(0.0), ctx.clone())
    }

    pub fn from_f64(re: f64, im: f64, ctx: &Arc<FloatCtx>) -> BigC {
        BigC::new(ctx.from_f64(re), ctx.from_f64(im), ctx.clone())
    }

    pub fn from_q(re: &Q, im: &Q, ctx: &Arc<FloatCtx>) -> BigC {
        BigC::new(ctx.from_q(re), ctx.from_q(im), ctx.clone())
    }

    fn p(&self) -> usize {
        self.ctx.prec
    }

    pub fn add(&self, o: &BigC) -> BigC {
        BigC::new(
            self.re.add(&o.re, self.p(), RM),
            self.im.add(&o.im, self.p(), RM),
            self.ctx.clone(),
        )
    }

    pub fn sub(&self, o: &BigC) -> BigC {
        BigC::new(
            self.re.sub(&o.re, self.p(), RM),
            self.im.sub(&o.im, self.p(), RM),
            self.ctx.clone(),
        )
    }

    pub fn neg(&self) -> BigC {
        BigC::new(self.re.neg(), self.im.neg(), self.ctx.clone())
    }

    pub fn mul(&self, o: &BigC) -> BigC {
        let p = self.p();
        let re = self
            .re
            .mul(&o.re, p, RM)
            .sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self
            .re
            .mul(&o.im, p, RM)
            .add(&self.im.mul(&o.re, p, RM), p, RM);
        BigC::new(re, im, self.ctx.clone())
    }

    pub fn conj(&self) -> BigC {
        BigC::new(self.re.clone(), self.im.neg(), self.ctx.clone())
    }

    /// |z|² as a real BigFloat.
    pub fn abs_sq(&self) -> BigFloat {
        let p = self.p();
        self.re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    /// |z| (max-norm would do for tolerance tests, but the euclidean norm keeps
    /// cluster radii geometrically meaningful).
    pub fn abs(&self) -> BigFloat {
        self.abs_sq().sqrt(self.p(), RM)
    }

    /// Tolerance-aware zero test.  Exact zeros are free; a nonzero value below
    /// ε_z 'counts' as a tolerance decision and is logged.
    pub fn is_zero(&self) -> bool {
        if self.re.is_zero() && self.im.is_zero() {
            return true;
        }
        if self.ctx.below_eps(&self.re) && self.ctx.below_eps(&self.im) {
            self.ctx.note(&format!("treated {:?} as zero", self));
            return true;
        }
        false
    }

    /// Zero test that does not consume a tolerance decision (for callers that
    /// only probe, e.g. candidate filtering before a verified check).
    pub fn is_zero_quiet(&self) -> bool {
        (self.re.is_zero() && self.im.is_zero())
            || (self.ctx.below_eps(&self.re) && self.ctx.below_eps(&self.im))
    }

    pub fn inv(&self) -> Result<BigC> {
        let n = self.abs_sq();
        if n.is_zero() || self.ctx.below_eps(&n) {
            return Err(err::precision(
                "division by a value within the zero tolerance",
            ));
        }
        let p = self.p();
        Ok(BigC::new(
            self.re.div(&n, p, RM),
            self.im.neg().div(&n, p, RM),
            self.ctx.clone(),
        ))
    }

    pub fn div(&self, o: &BigC) -> Result<BigC> {
        Ok(self.mul(&o.inv()?))
    }

    /// Division without the ε_z gate, for numeric iterations (Aberth, Newton
    /// polishing) where tiny denominators are legitimate.  None on exact zero.
    pub fn div_raw(&self, o: &BigC) -> Option<BigC> {
        let n = o.abs_sq();
        if n.is_zero() {
            return None;
        }
        let p = self.p();
        let inv = BigC::new(
            o.re.div(&n, p, RM),
            o.im.neg().div(&n, p, RM),
            o.ctx.clone(),
        );
        Some(self.mul(&inv))
    }

    /// Principal complex square root.
    pub fn sqrt(&self) -> BigC {
        let p = self.p();
        if self.re.is_zero() && self.im.is_zero() {
            return BigC::zero(&self.ctx);
        }
        let mag = self.abs();
        let two = self.ctx.from_f64(2.0);
        let w = mag.add(&self.re.abs(), p, RM).div(&two, p, RM).sqrt(p, RM);
        let nonneg =
            self.re.sign().map(|s| s.to_int()).unwrap_or(1) >= 0 || self.re.is_zero();
        if nonneg {
            if w.is_zero() {
                return BigC::zero(&self.ctx);
            }
            let im = self.im.div(&w.mul(&two, p, RM), p, RM);
            BigC::new(w, im, self.ctx.clone())
        } else {
            let re = self.im.abs().div(&w.mul(&two, p, RM), p, RM);
            let im = if self.im.sign().map(|s| s.to_int()).unwrap_or(1) >= 0 {
                w
            } else {
                w.neg()
            };
            BigC::new(re, im, self.ctx.clone())
        }
    }

    pub fn to_f64c(&self) -> (f64, f64) {
        (bf_to_f64(&self.re), bf_to_f64(&self.im))
    }

    /// Deterministic text form (full precision), used in sort keys and reports.
    pub fn canon(&self) -> String {
        format!("{}|{}", self.re, self.im)
    }
}
