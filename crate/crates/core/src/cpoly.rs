//! Polynomials over the residue field (plain complex coefficients).
//!
//! These show up as residue equations of Newton-polygon edges and as the
//! numerators/denominators of reduced maps.  Root finding is backend-aware:
//! under the exact backend roots are extracted only when they exist in ℚ(i)
//! (via verified snapping, exact deflation, and the exact quadratic formula) —
//! anything else is an honest `Unrepresentable`.  Under the float backend an
//! Aberth–Ehrlich iteration at full working precision finds all roots and
//! clusters them into multiplicities.

use crate::bigc::{bf_to_f64, BigC};
use crate::coeff::{Backend, Coeff};
use crate::err::{self, Result};
use crate::gauss::GaussQ;
use crate::qq::Q;
use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::ToPrimitive;
use std::fmt;

#[derive(Clone, Debug)]
pub struct CPoly {
    /// c[i] is the coefficient of z^i; highest entry is nonzero (or the vec is
    /// empty, representing the zero polynomial).
    pub c: Vec<Coeff>,
}

impl CPoly {
    pub fn new(mut c: Vec<Coeff>) -> CPoly {
        while let Some(last) = c.last() {
            if last.is_zero() {
                c.pop();
            } else {
                break;
            }
        }
        CPoly { c }
    }

    pub fn zero() -> CPoly {
        CPoly { c: vec![] }
    }

    pub fn constant(v: Coeff) -> CPoly {
        CPoly::new(vec![v])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn backend(&self) -> Option<Backend> {
        self.c.first().map(|c| c.backend())
    }

    pub fn lead(&self) -> Option<&Coeff> {
        self.c.last()
    }

    pub fn eval(&self, z: &Coeff) -> Coeff {
        let backend = z.backend();
        let mut acc = Coeff::zero(&backend);
        for c in self.c.iter().rev() {
            acc = acc.mul(z).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> CPoly {
        if self.c.len() <= 1 {
            return CPoly::zero();
        }
        let backend = self.c[0].backend();
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, v)| v.mul(&Coeff::from_i64(i as i64, &backend)))
            .collect();
        CPoly::new(c)
    }

    pub fn add(&self, o: &CPoly) -> CPoly {
        let n = self.c.len().max(o.c.len());
        let backend = self
            .backend()
            .or_else(|| o.backend())
            .unwrap_or(Backend::Exact);
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i).cloned().unwrap_or_else(|| Coeff::zero(&backend));
            let b = o.c.get(i).cloned().unwrap_or_else(|| Coeff::zero(&backend));
            c.push(a.add(&b));
        }
        CPoly::new(c)
    }

    pub fn sub(&self, o: &CPoly) -> CPoly {
        self.add(&o.scale(&Coeff::from_i64(
            -1,
            &o.backend().or_else(|| self.backend()).unwrap_or(Backend::Exact),
        )))
    }

    pub fn scale(&self, k: &Coeff) -> CPoly {
        CPoly::new(self.c.iter().map(|v| v.mul(k)).collect())
    }

    pub fn mul(&self, o: &CPoly) -> CPoly {
        if self.is_zero() || o.is_zero() {
            return CPoly::zero();
        }
        let backend = self.c[0].backend();
        let mut c = vec![Coeff::zero(&backend); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        CPoly::new(c)
    }

    /// Monic multiple of z - r.
    pub fn linear(r: &Coeff) -> CPoly {
        let backend = r.backend();
        CPoly::new(vec![r.neg(), Coeff::one(&backend)])
    }

    /// Π (z - rᵢ).
    pub fn from_roots(roots: &[Coeff], backend: &Backend) -> CPoly {
        let mut p = CPoly::constant(Coeff::one(backend));
        for r in roots {
            p = p.mul(&CPoly::linear(r));
        }
        p
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divrem(&self, d: &CPoly) -> Result<(CPoly, CPoly)> {
        if d.is_zero() {
            return Err(err::internal("polynomial division by zero"));
        }
        let backend = d.c[0].backend();
        let dd = d.degree().unwrap();
        let dl = d.lead().unwrap().clone();
        let mut rem = self.c.clone();
        if rem.len() < d.c.len() {
            return Ok((CPoly::zero(), CPoly::new(rem)));
        }
        let mut quo = vec![Coeff::zero(&backend); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let coef = rem[i].div(&dl)?;
            if coef.is_zero_quiet() {
                continue;
            }
            quo[i - dd] = coef.clone();
            for j in 0..=dd {
                let sub = coef.mul(&d.c[j]);
                rem[i - dd + j] = rem[i - dd + j].sub(&sub);
            }
        }
        rem.truncate(dd);
        Ok((CPoly::new(quo), CPoly::new(rem)))
    }

    pub fn monic(&self) -> Result<CPoly> {
        match self.lead() {
            None => Err(err::internal("monic of zero polynomial")),
            Some(l) => Ok(self.scale(&l.inv()?)),
        }
    }

    /// Monic gcd by the Euclidean algorithm.  Exact and reliable over ℚ(i);
    /// over floats it is only used where results get independently verified.
    pub fn gcd(&self, o: &CPoly) -> Result<CPoly> {
        let mut a = self.clone();
        let mut b = o.clone();
        let mut guard = 0;
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r;
            guard += 1;
            if guard > 4096 {
                return Err(err::internal("gcd failed to terminate"));
            }
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic()
        }
    }

    /// Multiplicity of `r` as a root (0 if not a root).
    pub fn root_multiplicity(&self, r: &Coeff) -> Result<usize> {
        let mut p = self.clone();
        let mut m = 0;
        let lin = CPoly::linear(r);
        loop {
            if p.degree().is_none() || p.degree() == Some(0) {
                return Ok(m);
            }
            if !p.eval(r).is_zero() {
                return Ok(m);
            }
            let (q, rem) = p.divrem(&lin)?;
            if !rem.is_zero() {
                // eval said zero (within tolerance) but division disagrees:
                // only possible through tolerance interplay; stop counting.
                return Ok(m);
            }
            m += 1;
            p = q;
        }
    }

    pub fn to_f64_coeffs(&self) -> Vec<Complex64> {
        self.c
            .iter()
            .map(|c| {
                let (re, im) = c.to_f64c();
                Complex64::new(re, im)
            })
            .collect()
    }

    pub fn canon(&self) -> String {
        let parts: Vec<String> = self.c.iter().map(|c| c.canon()).collect();
        parts.join(",")
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero_quiet() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// All roots with multiplicities, Σ mult = degree.
///
/// Exact backend: roots must lie in ℚ(i) (after stripping zero roots, via
/// verified snapping of float approximations, exact deflation, and the exact
/// quadratic formula); otherwise `Unrepresentable`.
/// Float backend: Aberth iteration at working precision, then clustering.
pub fn roots_with_mult(p: &CPoly) -> Result<Vec<(Coeff, usize)>> {
    let deg = p
        .degree()
        .ok_or_else(|| err::internal("roots of the zero polynomial"))?;
    if deg == 0 {
        return Ok(vec![]);
    }
    let backend = p.c[0].backend();
    match &backend {
        Backend::Exact => roots_exact(p),
        Backend::Float(_) => roots_float(p),
    }
}

fn roots_exact(p: &CPoly) -> Result<Vec<(Coeff, usize)>> {
    let mut out: Vec<(Coeff, usize)> = Vec::new();
    let mut work = p.clone();
    let backend = Backend::Exact;

    // zero roots first
    let mut zero_mult = 0;
    while !work.c.is_empty() && work.c[0].is_zero() {
        work.c.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        out.push((Coeff::zero(&backend), zero_mult));
    }

    loop {
        match work.degree() {
            None => return Err(err::internal("deflation reached zero polynomial")),
            Some(0) => break,
            Some(1) => {
                let r = work.c[0].neg().div(&work.c[1])?;
                push_root(&mut out, r, 1);
                break;
            }
            Some(2) => {
                // exact quadratic formula; fails honestly on irrational roots
                let (a, b, c) = (work.c[2].clone(), work.c[1].clone(), work.c[0].clone());
                let disc = b.mul(&b).sub(&Coeff::from_i64(4, &backend).mul(&a).mul(&c));
                let sq = disc.sqrt()?; // Unrepresentable when not a ℚ(i) square
                let two_a = Coeff::from_i64(2, &backend).mul(&a);
                let r1 = b.neg().add(&sq).div(&two_a)?;
                let r2 = b.neg().sub(&sq).div(&two_a)?;
                if r1.eq_c(&r2) {
                    push_root(&mut out, r1, 2);
                } else {
                    push_root(&mut out, r1, 1);
                    push_root(&mut out, r2, 1);
                }
                break;
            }
            Some(_) => {
                // find a ℚ(i) root by snapping a float approximation
                let approx = aberth_f64(&work.to_f64_coeffs());
                let mut found = None;
                'snap: for z in &approx {
                    for max_den in [64i64, 1_000_000] {
                        if let Some(r) = snap_gauss(*z, max_den) {
                            let cand = Coeff::G(r);
                            if work.eval(&cand).is_zero() {
                                found = Some(cand);
                                break 'snap;
                            }
                        }
                    }
                }
                match found {
                    Some(r) => {
                        let m = work.root_multiplicity(&r)?;
                        if m == 0 {
                            return Err(err::internal("verified root failed to deflate"));
                        }
                        let lin = CPoly::linear(&r);
                        for _ in 0..m {
                            let (quo, rem) = work.divrem(&lin)?;
                            if !rem.is_zero() {
                                return Err(err::internal("deflation left a remainder"));
                            }
                            work = quo;
                        }
                        push_root(&mut out, r, m);
                    }
                    None => {
                        return Err(err::unrepresentable(format!(
                            "irreducible factor of degree {} has no ℚ(i) roots: {}",
                            work.degree().unwrap(),
                            work
                        )))
                    }
                }
            }
        }
    }

    let total: usize = out.iter().map(|(_, m)| m).sum();
    if total != p.degree().unwrap() {
        return Err(err::internal(format!(
            "root multiplicities sum to {total}, degree is {}",
            p.degree().unwrap()
        )));
    }
    sort_roots(&mut out);
    Ok(out)
}

fn roots_float(p: &CPoly) -> Result<Vec<(Coeff, usize)>> {
    let ctx = match &p.c[0] {
        Coeff::B(b) => b.ctx.clone(),
        _ => unreachable!(),
    };
    let deg = p.degree().unwrap();

    // strip exact zero roots cheaply (saves the iteration some conditioning)
    let mut work = p.clone();
    let mut zero_mult = 0;
    while !work.c.is_empty() && work.c[0].is_zero() {
        work.c.remove(0);
        zero_mult += 1;
    }

    let mut roots: Vec<BigC> = Vec::new();
    if work.degree().unwrap_or(0) > 0 {
        roots = aberth_big(&work)?;
    }

    // cluster within sqrt(eps_z): a perturbation of size eps splits an
    // m-fold root by ~eps^{1/m}, far below sqrt(eps) for the precisions and
    // degrees used here, while distinct roots of our residue equations stay
    // order-one apart.
    let prec = ctx.prec;
    let rm = astro_float::RoundingMode::ToEven;
    let cluster_tol = ctx.eps.sqrt(prec, rm);
    let mut items: Vec<BigC> = roots;
    items.sort_by_key(|z| z.canon());
    let mut clusters: Vec<Vec<BigC>> = Vec::new();
    'outer: for z in items {
        for cl in clusters.iter_mut() {
            let d = cl[0].sub(&z).abs();
            if d.partial_cmp(&cluster_tol) != Some(std::cmp::Ordering::Greater) {
                cl.push(z);
                continue 'outer;
            }
        }
        clusters.push(vec![z]);
    }

    let mut out: Vec<(Coeff, usize)> = Vec::new();
    if zero_mult > 0 {
        out.push((Coeff::B(BigC::zero(&ctx)), zero_mult));
    }
    for cl in clusters {
        let m = cl.len();
        let mut mean = BigC::zero(&ctx);
        for z in &cl {
            mean = mean.add(z);
        }
        let mut mean = mean.mul(&BigC::from_f64(1.0 / m as f64, 0.0, &ctx));
        if m >= 2 {
            mean = polish_cluster(&work, &mean, m);
        }
        out.push((Coeff::B(mean), m));
    }
    let total: usize = out.iter().map(|(_, m)| m).sum();
    if total != deg {
        return Err(err::internal(format!(
            "float root clustering lost mass: {total} of {deg}"
        )));
    }
    sort_roots(&mut out);
    Ok(out)
}

fn push_root(out: &mut Vec<(Coeff, usize)>, r: Coeff, m: usize) {
    for (er, em) in out.iter_mut() {
        if er.eq_c_quiet(&r) {
            *em += m;
            return;
        }
    }
    out.push((r, m));
}

fn sort_roots(out: &mut [(Coeff, usize)]) {
    out.sort_by_key(|(r, _)| r.canon());
}

/// Snap a float to a Gaussian rational with small denominators; caller must
/// verify exactly.
fn snap_gauss(z: Complex64, max_den: i64) -> Option<GaussQ> {
    let re = snap_q(z.re, max_den)?;
    let im = snap_q(z.im, max_den)?;
    Some(GaussQ::new(re, im))
}

fn snap_q(x: f64, max_den: i64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    // continued fraction expansion
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    for _ in 0..40 {
        let approx = p1 as f64 / q1 as f64;
        if (approx - x).abs() < 1e-12 * x.abs().max(1.0) {
            break;
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let r = 1.0 / frac;
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        frac = r - a;
        let (p2, q2) = (
            (a as i64).checked_mul(p1)?.checked_add(p0)?,
            (a as i64).checked_mul(q1)?.checked_add(q0)?,
        );
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if q1 > max_den {
            return None;
        }
    }
    let cand = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    let back = cand.to_f64()?;
    if (back - x).abs() <= 1e-9 * x.abs().max(1.0) {
        Some(cand)
    } else {
        None
    }
}

/// Aberth–Ehrlich in f64; returns approximations good enough for snapping.
pub fn aberth_f64(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return vec![];
    }
    let lead = coeffs[deg];
    let mut bound: f64 = 0.0;
    for c in &coeffs[..deg] {
        bound = bound.max((c / lead).norm());
    }
    let r = 1.0 + bound;
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (deg as f64) + 0.4;
            Complex64::from_polar(r, th)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..600 {
        let mut maxcorr: f64 = 0.0;
        let zs = z.clone();
        for i in 0..deg {
            let (p, dp) = eval(zs[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() == 0.0 {
                Complex64::new(1e-8, 1e-8)
            } else {
                p / dp
            };
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in zs.iter().enumerate() {
                if j != i {
                    let d = zs[i] - zj;
                    if d.norm() > 1e-300 {
                        s += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let corr = if denom.norm() < 1e-300 { w } else { w / denom };
            z[i] -= corr;
            maxcorr = maxcorr.max(corr.norm());
        }
        if maxcorr < 1e-13 {
            break;
        }
    }
    z
}

/// Aberth–Ehrlich over big floats at context precision.
fn aberth_big(p: &CPoly) -> Result<Vec<BigC>> {
    let ctx = match &p.c[0] {
        Coeff::B(b) => b.ctx.clone(),
        _ => return Err(err::internal("aberth_big on exact backend")),
    };
    let deg = p.degree().unwrap();
    // warm start from f64 so the big-float phase only polishes
    let start = aberth_f64(&p.to_f64_coeffs());
    let mut z: Vec<BigC> = start
        .iter()
        .map(|s| {
            let (re, im) = (s.re, s.im);
            let re = if re.is_finite() { re } else { 1.0 };
            let im = if im.is_finite() { im } else { 1.0 };
            BigC::from_f64(re, im, &ctx)
        })
        .collect();
    // perturb exact collisions from the warm start
    for i in 0..z.len() {
        for j in 0..i {
            if z[i].sub(&z[j]).is_zero_quiet() {
                let nudge = BigC::from_f64(1e-3 * (i as f64 + 1.0), 1e-3, &ctx);
                z[i] = z[i].add(&nudge);
            }
        }
    }
    let prec = ctx.prec;
    let _rm = astro_float::RoundingMode::ToEven;
    // stop once corrections fall below ~2^(8-prec)
    let stop = {
        let bits = prec.saturating_sub(8);
        let digits = (bits as f64 * 0.301) as usize;
        ctx.parse(&format!("1e-{digits}"))?
    };
    let dp_poly = p.derivative();
    let maxiter = 200 + 4 * prec;
    let mut best = f64::INFINITY;
    let mut stale = 0usize;
    for _ in 0..maxiter {
        let zs = z.clone();
        let mut maxcorr = ctx.from_f64(0.0);
        for i in 0..deg {
            let zi = Coeff::B(zs[i].clone());
            let pv = match p.eval(&zi) {
                Coeff::B(v) => v,
                _ => unreachable!(),
            };
            if pv.re.is_zero() && pv.im.is_zero() {
                continue;
            }
            let dv = match dp_poly.eval(&zi) {
                Coeff::B(v) => v,
                _ => unreachable!(),
            };
            // raw divisions: tolerance gating would sabotage convergence near
            // multiple roots where p' is legitimately tiny
            let w = match pv.div_raw(&dv) {
                Some(w) => w,
                None => BigC::from_f64(1e-8, 1e-8, &ctx),
            };
            let mut s = BigC::zero(&ctx);
            for (j, zj) in zs.iter().enumerate() {
                if i != j {
                    let d = zs[i].sub(zj);
                    if let Some(inv) = BigC::one(&ctx).div_raw(&d) {
                        s = s.add(&inv);
                    }
                }
            }
            let denom = BigC::one(&ctx).sub(&w.mul(&s));
            let corr = match w.div_raw(&denom) {
                Some(c) => c,
                None => w,
            };
            z[i] = z[i].sub(&corr);
            let cn = corr.abs();
            if cn.partial_cmp(&maxcorr) == Some(std::cmp::Ordering::Greater) {
                maxcorr = cn;
            }
        }
        if maxcorr.partial_cmp(&stop) != Some(std::cmp::Ordering::Greater) {
            break;
        }
        // clusters around multiple roots stall at the evaluation noise floor
        // (far above `stop`); once small corrections stop shrinking, more
        // rounds only burn time — the cluster polish below recovers the
        // accuracy.  Corrections above the gate are the global phase still
        // wandering, which may plateau legitimately and must not be cut off.
        let mc = bf_to_f64(&maxcorr);
        if !mc.is_finite() || mc >= 1e-10 {
            best = f64::INFINITY;
            stale = 0;
        } else if mc < best * 0.5 {
            best = mc;
            stale = 0;
        } else {
            stale += 1;
            if stale > 15 {
                break;
            }
        }
    }
    Ok(z)
}

/// Polish the center of an m-fold root cluster: the (m−1)-st derivative has
/// a simple root there, where big-float Newton converges quadratically all
/// the way to working precision.  Aberth alone leaves a multiple root with
/// only about half the working digits, which is not enough for callers that
/// shift a polynomial by the root and trust the cancellation.
fn polish_cluster(p: &CPoly, start: &BigC, m: usize) -> BigC {
    let ctx = start.ctx.clone();
    let mut g = p.clone();
    for _ in 1..m {
        g = g.derivative();
    }
    let gd = g.derivative();
    let stop = {
        let digits = (ctx.prec.saturating_sub(8) as f64 * 0.301) as usize;
        match ctx.parse(&format!("1e-{digits}")) {
            Ok(s) => s,
            Err(_) => return start.clone(),
        }
    };
    let mut z = start.clone();
    for _ in 0..64 {
        let gv = match g.eval(&Coeff::B(z.clone())) {
            Coeff::B(v) => v,
            _ => return z,
        };
        if gv.re.is_zero() && gv.im.is_zero() {
            break;
        }
        let dv = match gd.eval(&Coeff::B(z.clone())) {
            Coeff::B(v) => v,
            _ => return z,
        };
        let Some(step) = gv.div_raw(&dv) else { break };
        z = z.sub(&step);
        if step.abs().partial_cmp(&stop) != Some(std::cmp::Ordering::Greater) {
            break;
        }
    }
    z
}

/// Yun-style squarefree decomposition over the exact backend: returns
/// [(g₁,1), (g₂,2), ...] with p = lead · Π gᵢ^i and the gᵢ squarefree,
/// pairwise coprime.  Used to read off hole depths without factoring.
pub fn squarefree_decomposition(p: &CPoly) -> Result<Vec<(CPoly, usize)>> {
    let d = p
        .degree()
        .ok_or_else(|| err::internal("squarefree decomposition of zero"))?;
    if d == 0 {
        return Ok(vec![]);
    }
    let p = p.monic()?;
    let dp = p.derivative();
    let a0 = p.gcd(&dp)?;
    if a0.degree() == Some(0) {
        return Ok(vec![(p, 1)]);
    }
    let mut out = Vec::new();
    let (mut b, r) = p.divrem(&a0)?;
    if !r.is_zero() {
        return Err(err::internal("squarefree: gcd does not divide"));
    }
    let (mut c, r) = dp.divrem(&a0)?;
    if !r.is_zero() {
        return Err(err::internal("squarefree: gcd does not divide derivative"));
    }
    let mut i = 1usize;
    loop {
        // d = c - b'
        let dpoly = c.sub(&b.derivative());
        let g = b.gcd(&dpoly)?;
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), i));
        }
        let (nb, r) = b.divrem(&g)?;
        if !r.is_zero() {
            return Err(err::internal("squarefree: factor does not divide"));
        }
        let (nc, r) = dpoly.divrem(&g)?;
        if !r.is_zero() {
            return Err(err::internal("squarefree: derivative part does not divide"));
        }
        b = nb;
        c = nc;
        i += 1;
        if b.degree() == Some(0) {
            break;
        }
        if i > 512 {
            return Err(err::internal("squarefree decomposition runaway"));
        }
    }
    Ok(out)
}

/// Convenience for tests and the verify layer.
pub fn eval_f64(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

#[allow(unused)]
fn bf_dbg(v: &astro_float::BigFloat) -> f64 {
    bf_to_f64(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigc::FloatCtx;
    use crate::qq::q;

    fn b() -> Backend {
        Backend::Exact
    }

    fn poly(coeffs: &[i64]) -> CPoly {
        CPoly::new(coeffs.iter().map(|&n| Coeff::from_i64(n, &b())).collect())
    }

    #[test]
    fn divrem_roundtrip() {
        // (z²+1)(z-3) + (z+7)
        let a = poly(&[1, 0, 1]).mul(&poly(&[-3, 1])).add(&poly(&[7, 1]));
        let (quo, rem) = a.divrem(&poly(&[-3, 1])).unwrap();
        let back = quo.mul(&poly(&[-3, 1])).add(&rem);
        assert_eq!(back.canon(), a.canon());
    }

    #[test]
    fn exact_roots_with_multiplicity() {
        // (z-1)²(z+2) = z³ - 3z + 2
        let p = poly(&[2, -3, 0, 1]);
        let roots = roots_with_mult(&p).unwrap();
        assert_eq!(roots.len(), 2);
        let mut found = std::collections::BTreeMap::new();
        for (r, m) in &roots {
            found.insert(r.canon(), *m);
        }
        assert_eq!(found.get("1"), Some(&2));
        assert_eq!(found.get("-2"), Some(&1));
    }

    #[test]
    fn exact_quadratic_with_gaussian_roots() {
        // z² + 1 → ±i
        let p = poly(&[1, 0, 1]);
        let roots = roots_with_mult(&p).unwrap();
        let keys: Vec<String> = roots.iter().map(|(r, _)| r.canon()).collect();
        assert!(keys.contains(&"1i".to_string()));
        assert!(keys.contains(&"-1i".to_string()));
    }

    #[test]
    fn irrational_roots_are_unrepresentable_exactly() {
        // z² - 2
        let p = poly(&[-2, 0, 1]);
        let e = roots_with_mult(&p).unwrap_err();
        assert!(matches!(e, crate::err::Error::Unrepresentable(_)));
        // degree 3 with irrational pair: (z²-2)(z-1) = z³ - z² - 2z + 2:
        // the rational root is snapped out first, then the quadratic fails.
        let p = poly(&[2, -2, -1, 1]);
        let e = roots_with_mult(&p).unwrap_err();
        assert!(matches!(e, crate::err::Error::Unrepresentable(_)));
    }

    #[test]
    fn rational_root_snapping_on_higher_degree() {
        // (z - 1/2)(z + 3)(z - 2)(z + i)(z - i): degree 5, all in ℚ(i)
        let half = Coeff::from_q_pair(&q(1, 2), &q(0, 1), &b());
        let i = Coeff::from_q_pair(&q(0, 1), &q(1, 1), &b());
        let roots = vec![
            half.clone(),
            Coeff::from_i64(-3, &b()),
            Coeff::from_i64(2, &b()),
            i.neg(),
            i.clone(),
        ];
        let p = CPoly::from_roots(&roots, &b());
        let found = roots_with_mult(&p).unwrap();
        assert_eq!(found.len(), 5);
        for (r, m) in found {
            assert_eq!(m, 1);
            assert!(roots.iter().any(|x| x.eq_c(&r)), "unexpected root {r}");
        }
    }

    #[test]
    fn float_roots_cluster_multiplicities() {
        let ctx = FloatCtx::new(256, "1e-40").unwrap();
        let fb = Backend::Float(ctx.clone());
        // (z-2)²(z²+2z+4): the quartic reduction shape
        let two = Coeff::from_i64(2, &fb);
        let p = CPoly::from_roots(&[two.clone(), two.clone()], &fb).mul(&CPoly::new(vec![
            Coeff::from_i64(4, &fb),
            Coeff::from_i64(2, &fb),
            Coeff::from_i64(1, &fb),
        ]));
        let roots = roots_with_mult(&p).unwrap();
        assert_eq!(roots.len(), 3);
        let mut mults: Vec<usize> = roots.iter().map(|(_, m)| *m).collect();
        mults.sort();
        assert_eq!(mults, vec![1, 1, 2]);
        for (r, m) in roots {
            let (re, im) = r.to_f64c();
            if m == 2 {
                assert!((re - 2.0).abs() < 1e-30 && im.abs() < 1e-30);
            } else {
                // roots of z²+2z+4 are -1 ± i sqrt(3)
                assert!((re + 1.0).abs() < 1e-30);
                assert!((im.abs() - 3f64.sqrt()).abs() < 1e-30);
            }
        }
    }

    #[test]
    fn squarefree_decomposition_depths() {
        // (z-1)³(z+2)² (z-5)
        let p = poly(&[-1, 1]).mul(&poly(&[-1, 1])).mul(&poly(&[-1, 1]))
            .mul(&poly(&[2, 1]))
            .mul(&poly(&[2, 1]))
            .mul(&poly(&[-5, 1]));
        let sf = squarefree_decomposition(&p).unwrap();
        let mut seen = std::collections::BTreeMap::new();
        for (g, m) in sf {
            seen.insert(m, g.degree().unwrap());
        }
        assert_eq!(seen.get(&1), Some(&1)); // z-5
        assert_eq!(seen.get(&2), Some(&1)); // z+2
        assert_eq!(seen.get(&3), Some(&1)); // z-1
    }

    #[test]
    fn gcd_exact() {
        let a = poly(&[-1, 1]).mul(&poly(&[2, 1])); // (z-1)(z+2)
        let bb = poly(&[-1, 1]).mul(&poly(&[5, 1])); // (z-1)(z+5)
        let g = a.gcd(&bb).unwrap();
        assert_eq!(g.degree(), Some(1));
        assert!(g.eval(&Coeff::one(&b())).is_zero());
    }
}
