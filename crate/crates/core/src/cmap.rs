//! Rational maps on the complex sphere, as they arise from reductions of
//! degenerating families: a low-degree core map plus "holes" — points where
//! the original degree went missing, each carrying a positive integer depth.
//!
//! The atomic part of the limit measure lives on forward and backward orbits
//! of the holes; its masses satisfy
//!
//!     D · μ({b}) = deg_b(core) · μ({core(b)}) + depth(b)
//!
//! where D is the original degree.  All masses come out as exact rationals
//! whatever the coefficient backend, because only integer degrees and depths
//! enter the linear system.

use crate::coeff::{Backend, Coeff};
use crate::cpoly::{roots_with_mult, CPoly};
use crate::err::{self, Result};
use crate::qq::Q;
use num::{One, Zero};
use std::fmt;

/// A point of the complex sphere.
#[derive(Clone, Debug)]
pub enum CPoint {
    Fin(Coeff),
    Inf,
}

impl CPoint {
    pub fn eq(&self, o: &CPoint) -> bool {
        match (self, o) {
            (CPoint::Inf, CPoint::Inf) => true,
            (CPoint::Fin(a), CPoint::Fin(b)) => a.eq_c(b),
            _ => false,
        }
    }

    pub fn canon(&self) -> String {
        match self {
            CPoint::Inf => "~inf".into(),
            CPoint::Fin(c) => c.canon(),
        }
    }
}

impl fmt::Display for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CPoint::Inf => write!(f, "∞"),
            CPoint::Fin(c) => write!(f, "{c}"),
        }
    }
}

/// A rational self-map of the sphere in an affine chart, kept with coprime
/// numerator and denominator.  The zero denominator encodes the constant ∞.
#[derive(Clone, Debug)]
pub struct CRat {
    pub num: CPoly,
    pub den: CPoly,
}

impl CRat {
    pub fn new(num: CPoly, den: CPoly) -> Result<CRat> {
        if num.is_zero() && den.is_zero() {
            return Err(err::input("rational map needs a nonzero coordinate pair"));
        }
        Ok(CRat { num, den })
    }

    pub fn backend(&self) -> Backend {
        self.num
            .backend()
            .or_else(|| self.den.backend())
            .expect("coordinate pair is never all zero")
    }

    pub fn degree(&self) -> usize {
        let dn = self.num.degree().map(|d| d + 1).unwrap_or(0);
        let dd = self.den.degree().map(|d| d + 1).unwrap_or(0);
        dn.max(dd).saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, p: &CPoint) -> Result<CPoint> {
        match p {
            CPoint::Fin(z) => {
                let n = self.num.eval(z);
                let d = self.den.eval(z);
                match (n.is_zero(), d.is_zero()) {
                    (true, true) => Err(err::precision(
                        "evaluation hit a common zero of a coprime pair; coefficients too fuzzy",
                    )),
                    (_, true) => Ok(CPoint::Inf),
                    (_, false) => Ok(CPoint::Fin(n.div(&d).unwrap())),
                }
            }
            CPoint::Inf => {
                let e = self.degree();
                let ci = |p: &CPoly| {
                    p.c.get(e)
                        .cloned()
                        .unwrap_or_else(|| Coeff::zero(&self.backend()))
                };
                let (ln, ld) = (ci(&self.num), ci(&self.den));
                match (ln.is_zero(), ld.is_zero()) {
                    (true, true) => Err(err::internal("degree collapsed at ∞")),
                    (false, true) => Ok(CPoint::Inf),
                    (_, false) => Ok(CPoint::Fin(ln.div(&ld).unwrap())),
                }
            }
        }
    }

    /// The same map written in the chart w = 1/z (so ∞ becomes the origin).
    pub fn inf_chart(&self) -> CRat {
        let e = self.degree();
        let be = self.backend();
        let rev = |p: &CPoly| {
            let mut c = vec![Coeff::zero(&be); e + 1];
            for (i, v) in p.c.iter().enumerate() {
                c[e - i] = v.clone();
            }
            CPoly::new(c)
        };
        CRat {
            num: rev(&self.den),
            den: rev(&self.num),
        }
    }

    /// Local degree of the map at a point (0 for constant maps).
    pub fn local_degree_at(&self, p: &CPoint) -> Result<usize> {
        if self.is_constant() {
            return Ok(0);
        }
        match p {
            CPoint::Inf => self.inf_chart().local_degree_at(&CPoint::Fin(Coeff::zero(
                &self.backend(),
            ))),
            CPoint::Fin(z) => {
                let g = match self.eval(p)? {
                    CPoint::Inf => self.den.clone(),
                    CPoint::Fin(w) => self.num.sub(&self.den.scale(&w)),
                };
                g.root_multiplicity(z)
            }
        }
    }

    /// Derivative at a finite point where the map is finite.
    fn deriv_at(&self, z: &Coeff) -> Result<Coeff> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(err::input("derivative at a pole"));
        }
        let n1 = self.num.derivative().eval(z);
        let d1 = self.den.derivative().eval(z);
        let top = n1.mul(&d).sub(&self.num.eval(z).mul(&d1));
        Ok(top.div(&d.mul(&d)).unwrap())
    }

    /// Multiplier at a fixed point (must actually be fixed).
    pub fn multiplier_at(&self, p: &CPoint) -> Result<Coeff> {
        if !self.eval(p)?.eq(p) {
            return Err(err::input("multiplier requested at a non-fixed point"));
        }
        match p {
            CPoint::Inf => self
                .inf_chart()
                .deriv_at(&Coeff::zero(&self.backend())),
            CPoint::Fin(z) => self.deriv_at(z),
        }
    }

    /// All fixed points with multiplicities (e + 1 in total).
    pub fn fixed_points(&self) -> Result<Vec<(CPoint, usize)>> {
        let e = self.degree();
        let be = self.backend();
        // num(z) − z·den(z)
        let mut shifted = vec![Coeff::zero(&be)];
        shifted.extend(self.den.c.iter().cloned());
        let g = self.num.sub(&CPoly::new(shifted));
        if g.is_zero() {
            return Err(err::input("the identity map fixes everything"));
        }
        let mut out: Vec<(CPoint, usize)> = Vec::new();
        let mut found = 0usize;
        for (r, m) in roots_with_mult(&g)? {
            out.push((CPoint::Fin(r), m));
            found += m;
        }
        let expect = e + 1;
        if found < expect {
            out.push((CPoint::Inf, expect - found));
        }
        Ok(out)
    }

    /// Preimages of a point with local multiplicities (e in total).
    pub fn preimages_of(&self, p: &CPoint) -> Result<Vec<(CPoint, usize)>> {
        let e = self.degree();
        if e == 0 {
            return Err(err::input("preimages under a constant map"));
        }
        let g = match p {
            CPoint::Inf => self.den.clone(),
            CPoint::Fin(w) => self.num.sub(&self.den.scale(w)),
        };
        let mut out: Vec<(CPoint, usize)> = Vec::new();
        let mut found = 0usize;
        if !g.is_zero() {
            for (r, m) in roots_with_mult(&g)? {
                out.push((CPoint::Fin(r), m));
                found += m;
            }
        }
        if found < e {
            out.push((CPoint::Inf, e - found));
        }
        Ok(out)
    }

    /// Composition self ∘ other.
    pub fn compose(&self, other: &CRat) -> Result<CRat> {
        let e = self.degree();
        let be = self.backend();
        let (n, d) = (&other.num, &other.den);
        // powers n^i d^(e−i)
        let mut npow = vec![CPoly::constant(Coeff::one(&be))];
        let mut dpow = vec![CPoly::constant(Coeff::one(&be))];
        for i in 1..=e {
            npow.push(npow[i - 1].mul(n));
            dpow.push(dpow[i - 1].mul(d));
        }
        let expand = |p: &CPoly| {
            let mut acc = CPoly::zero();
            for (i, c) in p.c.iter().enumerate() {
                acc = acc.add(&npow[i].mul(&dpow[e - i]).scale(c));
            }
            acc
        };
        let out = CRat::new(expand(&self.num), expand(&self.den))?;
        if out.degree() != e * other.degree() {
            return Err(err::precision(format!(
                "composition degree {} instead of {}; leading coefficients cancelled numerically",
                out.degree(),
                e * other.degree()
            )));
        }
        Ok(out)
    }

    pub fn iterate(&self, n: usize) -> Result<CRat> {
        if n == 0 {
            return Err(err::input("zeroth iterate"));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// Equality as maps: coordinate pairs are only defined up to a common
    /// scalar, so compare cross-multiplied.
    pub fn eq_projective(&self, o: &CRat) -> bool {
        self.num.mul(&o.den).sub(&o.num.mul(&self.den)).is_zero()
    }

    pub fn canon(&self) -> String {
        format!("({})/({})", self.num.canon(), self.den.canon())
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// A degree-D coordinate pair reduced to its coprime core, with the missing
/// degree located at holes.
pub struct ReducedMap {
    pub d_total: usize,
    pub core: CRat,
    /// Hole locations with depths; depths sum to d_total − deg(core) unless
    /// part of the factor resisted exact factoring.
    pub holes: Vec<(CPoint, usize)>,
    /// Common factor whose roots exist only over ℂ, with its degree.
    pub unresolved: Option<(CPoly, usize)>,
}

impl ReducedMap {
    /// Reduce the pair (a, b), understood as homogeneous of degree `d_total`
    /// in the chart z (so a common power of the far coordinate shows up as a
    /// hole at ∞).
    pub fn from_pair(a: &CPoly, b: &CPoly, d_total: usize) -> Result<ReducedMap> {
        if a.is_zero() && b.is_zero() {
            return Err(err::input("zero coordinate pair"));
        }
        let top = a
            .degree()
            .unwrap_or(0)
            .max(b.degree().unwrap_or(0));
        if top > d_total {
            return Err(err::input(format!(
                "pair has degree {top}, exceeds declared {d_total}"
            )));
        }
        let mut holes: Vec<(CPoint, usize)> = Vec::new();
        if d_total > top {
            holes.push((CPoint::Inf, d_total - top));
        }
        let be = a
            .backend()
            .or_else(|| b.backend())
            .expect("pair is not all zero");
        let (core, finite_holes, unresolved) = match be {
            Backend::Exact => reduce_exact(a, b)?,
            Backend::Float(_) => reduce_float(a, b)?,
        };
        holes.extend(finite_holes);
        let accounted: usize = holes.iter().map(|(_, m)| m).sum::<usize>()
            + core.degree()
            + unresolved.as_ref().map(|(_, d)| *d).unwrap_or(0);
        if accounted != d_total {
            return Err(err::internal(format!(
                "degree bookkeeping failed: {accounted} of {d_total}"
            )));
        }
        Ok(ReducedMap {
            d_total,
            core,
            holes,
            unresolved,
        })
    }

    /// The reduction pattern of a Newton map whose visible roots carry the
    /// given labels and multiplicities: for P = Π (z − αᵢ)^{kᵢ} the pair is
    /// (zP′ − P, P′), padded to total degree `d_total` (roots that escaped
    /// the chart surface as a hole at ∞).
    pub fn newton_from_labels(labels: &[(Coeff, usize)], d_total: usize) -> Result<ReducedMap> {
        if labels.is_empty() {
            return Err(err::input("need at least one root label"));
        }
        let be = labels[0].0.backend();
        let m: usize = labels.iter().map(|(_, k)| k).sum();
        if m > d_total {
            return Err(err::input("label multiplicities exceed the total degree"));
        }
        let mut p = CPoly::constant(Coeff::one(&be));
        for (alpha, k) in labels {
            let lin = CPoly::linear(alpha);
            for _ in 0..*k {
                p = p.mul(&lin);
            }
        }
        let dp = p.derivative();
        // z·P′ − P
        let mut zdp = vec![Coeff::zero(&be)];
        zdp.extend(dp.c.iter().cloned());
        let a = CPoly::new(zdp).sub(&p);
        ReducedMap::from_pair(&a, &dp, d_total)
    }

    /// Whether the pattern is the degenerate one: a constant core sitting
    /// inside its own hole set, where iterates lose all meaning.
    pub fn is_indeterminate(&self) -> Result<bool> {
        if !self.core.is_constant() {
            return Ok(false);
        }
        let be = self.core.backend();
        let v = self.core.eval(&CPoint::Fin(Coeff::zero(&be)))?;
        Ok(self.hole_depth_at(&v) > 0)
    }

    /// The reduction pattern of the n-th iterate, assembled without ever
    /// composing the degree-dⁿ pair: the core iterates on its own, and the
    /// iterate's hole at x collects s_h · deg_x(coreᵏ) · d^(n−k−1) over all
    /// k < n and holes h with coreᵏ(x) = h.  Total depth dⁿ − (deg core)ⁿ
    /// is enforced.
    pub fn iterate_factored(&self, n: usize) -> Result<ReducedMap> {
        if n == 0 {
            return Err(err::input("zeroth iterate"));
        }
        if self.is_indeterminate()? {
            return Err(err::input(
                "indeterminate pattern: iterates of the family do not converge",
            ));
        }
        if self.unresolved.is_some() {
            return Err(err::unrepresentable(
                "hole locations are not representable exactly; use the float backend",
            ));
        }
        let d = self.d_total;
        let dn = (d as u64)
            .checked_pow(n as u32)
            .filter(|v| *v <= u32::MAX as u64)
            .ok_or_else(|| err::budget("iterate degree overflows"))? as usize;

        let mut holes: Vec<(CPoint, usize)> = Vec::new();
        let add = |p: &CPoint, depth: usize, holes: &mut Vec<(CPoint, usize)>| {
            for (q, m) in holes.iter_mut() {
                if q.eq(p) {
                    *m += depth;
                    return;
                }
            }
            holes.push((p.clone(), depth));
        };
        let e = self.core.degree();
        for (h, s) in &self.holes {
            // level k: all (x, deg_x coreᵏ) with coreᵏ(x) = h
            let mut level: Vec<(CPoint, usize)> = vec![(h.clone(), 1)];
            for k in 0..n {
                let w = (d as u64).pow((n - k - 1) as u32) as usize * s;
                for (x, deg) in &level {
                    add(x, w * deg, &mut holes);
                }
                if k + 1 < n {
                    if e == 0 {
                        // a constant core reaches a hole never (the constant
                        // is not a hole — checked above), so deeper levels
                        // are empty
                        break;
                    }
                    let mut next: Vec<(CPoint, usize)> = Vec::new();
                    for (x, deg) in &level {
                        for (y, m) in self.core.preimages_of(x)? {
                            next.push((y, m * deg));
                        }
                    }
                    level = next;
                }
            }
        }

        let core = if e == 0 {
            self.core.clone()
        } else {
            self.core.iterate(n)?
        };
        let en = (e as u64).pow(n as u32) as usize;
        let total: usize = holes.iter().map(|(_, m)| m).sum();
        let expect_core = if e == 0 { 0 } else { en };
        if total + expect_core != dn {
            return Err(err::internal(format!(
                "iterate holes carry depth {total}, expected {}",
                dn - expect_core
            )));
        }
        Ok(ReducedMap {
            d_total: dn,
            core,
            holes,
            unresolved: None,
        })
    }

    pub fn hole_depth_at(&self, p: &CPoint) -> usize {
        self.holes
            .iter()
            .find(|(h, _)| h.eq(p))
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }

    pub fn total_hole_depth(&self) -> usize {
        self.holes.iter().map(|(_, m)| m).sum::<usize>()
            + self.unresolved.as_ref().map(|(_, d)| *d).unwrap_or(0)
    }

    /// Atomic masses of the limit measure: exact rationals on the forward
    /// closure of the holes, optionally expanded `back_depth` levels of
    /// preimages, with the unlisted remainder returned as `tail`.
    pub fn atomic_masses(&self, budget: usize, back_depth: usize) -> Result<AtomicMeasure> {
        if self.unresolved.is_some() {
            return Err(err::unrepresentable(
                "hole locations are not representable exactly; use the float backend",
            ));
        }
        if self.holes.is_empty() {
            return Ok(AtomicMeasure {
                atoms: vec![],
                tail: Q::zero(),
                notes: vec![],
            });
        }
        let dq = Q::from_integer((self.d_total as i64).into());
        let mut notes: Vec<String> = Vec::new();

        // forward closure of the hole set
        let mut nodes: Vec<CPoint> = Vec::new();
        let mut image: Vec<usize> = Vec::new();
        let find = |nodes: &[CPoint], p: &CPoint| nodes.iter().position(|n| n.eq(p));
        for (h, _) in &self.holes {
            if find(&nodes, h).is_none() {
                nodes.push(h.clone());
            }
        }
        let mut i = 0;
        while i < nodes.len() {
            if nodes.len() > budget {
                return Err(err::budget(format!(
                    "forward orbit of the holes exceeded {budget} points without closing"
                )));
            }
            let img = self.core.eval(&nodes[i])?;
            let j = match find(&nodes, &img) {
                Some(j) => j,
                None => {
                    nodes.push(img);
                    nodes.len() - 1
                }
            };
            image.push(j);
            i += 1;
        }

        let deg: Vec<usize> = nodes
            .iter()
            .map(|p| self.core.local_degree_at(p))
            .collect::<Result<_>>()?;
        let s: Vec<Q> = nodes
            .iter()
            .map(|p| Q::from_integer((self.hole_depth_at(p) as i64).into()))
            .collect();

        // solve the functional graph: cycles first, then pull back along it
        let mut mass: Vec<Option<Q>> = vec![None; nodes.len()];
        for start in 0..nodes.len() {
            if mass[start].is_some() {
                continue;
            }
            // find the cycle this node flows into
            let mut seen = vec![usize::MAX; nodes.len()];
            let mut k = start;
            let mut step = 0usize;
            while seen[k] == usize::MAX && mass[k].is_none() {
                seen[k] = step;
                step += 1;
                k = image[k];
            }
            if mass[k].is_none() {
                // k opens a fresh cycle; unroll the relation around it once
                // per node: μ(c) (1 − Π degᵢ / D^L) = Σ prefixᵢ·sᵢ / D^(i+1)
                let mut cyc = vec![k];
                let mut j = image[k];
                while j != k {
                    cyc.push(j);
                    j = image[j];
                }
                let ln = cyc.len();
                for r in 0..ln {
                    let mut rhs = Q::zero();
                    let mut prefix = Q::one();
                    let mut dl = Q::one();
                    for i in 0..ln {
                        let c = cyc[(r + i) % ln];
                        dl = dl * &dq;
                        rhs = rhs + &prefix * &s[c] / &dl;
                        prefix = prefix * Q::from_integer((deg[c] as i64).into());
                    }
                    let shrink = Q::one() - prefix / dl;
                    if shrink.is_zero() {
                        // Π deg = D^L needs every local degree to be D,
                        // impossible once a hole has taken degree away
                        return Err(err::internal("cycle with no mass contraction"));
                    }
                    mass[cyc[r]] = Some(rhs / shrink);
                }
            }
        }
        // nodes off the cycles, in image-solved order
        loop {
            let mut progressed = false;
            for i in 0..nodes.len() {
                if mass[i].is_none() {
                    if let Some(m) = &mass[image[i]] {
                        let degq = Q::from_integer((deg[i] as i64).into());
                        mass[i] = Some((degq * m + &s[i]) / &dq);
                        progressed = true;
                    }
                }
            }
            if mass.iter().all(|m| m.is_some()) {
                break;
            }
            if !progressed {
                return Err(err::internal("orbit graph failed to resolve"));
            }
        }

        let mut atoms: Vec<(CPoint, Q)> = nodes
            .into_iter()
            .zip(mass.into_iter().map(|m| m.unwrap()))
            .collect();

        // backward expansion: each preimage c of an atom b gains
        // deg_c·μ(b)/D (new points are never holes — holes are closed above)
        let mut frontier: Vec<usize> = (0..atoms.len()).collect();
        for _ in 0..back_depth {
            let mut next: Vec<usize> = Vec::new();
            for &fi in &frontier {
                let (p, m) = atoms[fi].clone();
                let pre = match self.core.preimages_of(&p) {
                    Ok(pre) => pre,
                    Err(crate::err::Error::Unrepresentable(_))
                    | Err(crate::err::Error::PrecisionExhausted(_)) => {
                        notes.push(format!(
                            "preimages of {p} not representable exactly; their mass stays in the tail"
                        ));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                for (c, k) in pre {
                    if atoms.iter().any(|(a, _)| a.eq(&c)) {
                        continue;
                    }
                    let mu = Q::from_integer((k as i64).into()) * &m / &dq;
                    if !mu.is_zero() {
                        atoms.push((c, mu));
                        next.push(atoms.len() - 1);
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }

        atoms.retain(|(_, m)| !m.is_zero());
        let listed: Q = atoms.iter().map(|(_, m)| m.clone()).sum();
        let tail = Q::one() - listed;
        if tail < Q::zero() {
            return Err(err::internal("atomic masses exceed total mass"));
        }
        atoms.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.canon().cmp(&b.0.canon())));
        Ok(AtomicMeasure { atoms, tail, notes })
    }
}

/// Exact route: polynomial gcd, then factor the common part over ℚ(i).
fn reduce_exact(a: &CPoly, b: &CPoly) -> Result<(CRat, Vec<(CPoint, usize)>, Option<(CPoly, usize)>)> {
    let g = a.gcd(b)?;
    let core = CRat::new(a.divrem(&g)?.0, b.divrem(&g)?.0)?;
    if g.degree().unwrap_or(0) == 0 {
        return Ok((core, vec![], None));
    }
    match roots_with_mult(&g) {
        Ok(rs) => Ok((
            core,
            rs.into_iter().map(|(r, m)| (CPoint::Fin(r), m)).collect(),
            None,
        )),
        Err(crate::err::Error::Unrepresentable(_)) => {
            let d = g.degree().unwrap();
            Ok((core, vec![], Some((g, d))))
        }
        Err(e) => Err(e),
    }
}

/// Float route: polynomial gcd is numerically meaningless, so match root
/// clusters of the two coordinates and rebuild the coprime parts from the
/// surviving roots.
fn reduce_float(a: &CPoly, b: &CPoly) -> Result<(CRat, Vec<(CPoint, usize)>, Option<(CPoly, usize)>)> {
    let be = a.backend();
    if a.is_zero() || b.is_zero() {
        // nothing to cancel against
        return Ok((CRat::new(a.clone(), b.clone())?, vec![], None));
    }
    let ra = roots_with_mult(a)?;
    let rb = roots_with_mult(b)?;
    let mut holes: Vec<(CPoint, usize)> = Vec::new();
    let mut keep_a: Vec<(Coeff, usize)> = Vec::new();
    let mut rb_left: Vec<(Coeff, usize)> = rb;
    for (r, ma) in ra {
        match rb_left.iter().position(|(s, _)| s.eq_c(&r)) {
            Some(j) => {
                let (s, mb) = rb_left[j].clone();
                let common = ma.min(mb);
                holes.push((CPoint::Fin(r.clone()), common));
                if ma > common {
                    keep_a.push((r, ma - common));
                }
                if mb > common {
                    rb_left[j] = (s, mb - common);
                } else {
                    rb_left.remove(j);
                }
            }
            None => keep_a.push((r, ma)),
        }
    }
    let rebuild = |lead: &Coeff, roots: &[(Coeff, usize)]| {
        let mut p = CPoly::constant(lead.clone());
        for (r, m) in roots {
            let lin = CPoly::linear(r);
            for _ in 0..*m {
                p = p.mul(&lin);
            }
        }
        p
    };
    let la = a.lead().cloned().unwrap_or_else(|| Coeff::one(be.as_ref().unwrap()));
    let lb = b.lead().cloned().unwrap_or_else(|| Coeff::one(be.as_ref().unwrap()));
    let core = CRat::new(rebuild(&la, &keep_a), rebuild(&lb, &rb_left))?;
    Ok((core, holes, None))
}

pub struct AtomicMeasure {
    pub atoms: Vec<(CPoint, Q)>,
    /// Mass carried by the infinitely many unlisted backward atoms.
    pub tail: Q,
    pub notes: Vec<String>,
}

impl AtomicMeasure {
    pub fn mass_at(&self, p: &CPoint) -> Q {
        self.atoms
            .iter()
            .find(|(a, _)| a.eq(p))
            .map(|(_, m)| m.clone())
            .unwrap_or_else(Q::zero)
    }
}

/// Conjugate a quadratic polynomial λz² + βz + γ to the monic centered form
/// w² + c by w = M(z) = az + b; returns (c, a, b).
pub fn monic_centered_quadratic(f: &CPoly) -> Result<(Coeff, Coeff, Coeff)> {
    if f.degree() != Some(2) {
        return Err(err::input("normal form needs a degree-2 polynomial"));
    }
    let be = f.backend().unwrap();
    let lam = f.c[2].clone();
    let beta = f.c[1].clone();
    let gamma = f.c[0].clone();
    let two = Coeff::from_i64(2, &be);
    let four = Coeff::from_i64(4, &be);
    let b = beta.div(&two).unwrap();
    let c = lam
        .mul(&gamma)
        .add(&b)
        .sub(&beta.mul(&beta).div(&four).unwrap());
    Ok((c, lam, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qq::q;

    fn b() -> Backend {
        Backend::Exact
    }

    fn ci(v: i64) -> Coeff {
        Coeff::from_i64(v, &b())
    }

    fn poly(cs: &[i64]) -> CPoly {
        CPoly::new(cs.iter().map(|&v| ci(v)).collect())
    }

    #[test]
    fn classic_two_root_newton_map() {
        let rm = ReducedMap::newton_from_labels(&[(ci(0), 1), (ci(1), 1)], 2).unwrap();
        assert!(rm.holes.is_empty());
        assert_eq!(rm.core.degree(), 2);
        // z² / (2z − 1)
        assert!(rm.core.num.sub(&poly(&[0, 0, 1])).is_zero());
        assert!(rm.core.den.sub(&poly(&[-1, 2])).is_zero());

        let fx = rm.core.fixed_points().unwrap();
        assert_eq!(fx.len(), 3);
        for (p, m) in &fx {
            assert_eq!(*m, 1);
            let lam = rm.core.multiplier_at(p).unwrap();
            match p {
                CPoint::Inf => assert!(lam.eq_c(&ci(2))),
                CPoint::Fin(_) => assert!(lam.is_zero()),
            }
        }
    }

    #[test]
    fn multiplier_reflects_root_multiplicity() {
        // a triple root keeps multiplier (k−1)/k = 2/3 after reduction
        let rm = ReducedMap::newton_from_labels(&[(ci(5), 3)], 3).unwrap();
        assert_eq!(rm.core.degree(), 1);
        assert_eq!(rm.hole_depth_at(&CPoint::Fin(ci(5))), 2);
        let lam = rm.core.multiplier_at(&CPoint::Fin(ci(5))).unwrap();
        assert!(lam.eq_c(&Coeff::from_q_pair(&q(2, 3), &q(0, 1), &b())));
    }

    #[test]
    fn reduction_strips_both_chart_poles() {
        // (2z³ − z², 3z² − 2z) at declared degree 4: holes at 0 and ∞
        let a = poly(&[0, 0, -1, 2]);
        let bb = poly(&[0, -2, 3]);
        let rm = ReducedMap::from_pair(&a, &bb, 4).unwrap();
        assert_eq!(rm.core.degree(), 2);
        assert_eq!(rm.hole_depth_at(&CPoint::Fin(ci(0))), 1);
        assert_eq!(rm.hole_depth_at(&CPoint::Inf), 1);
        assert!(rm.core.num.sub(&poly(&[0, -1, 2])).is_zero());
        assert!(rm.core.den.sub(&poly(&[-2, 3])).is_zero());

        // the same pattern from labels: a double root at 0, simple at 1,
        // and one root escaped to ∞
        let rm2 = ReducedMap::newton_from_labels(&[(ci(0), 2), (ci(1), 1)], 4).unwrap();
        assert!(rm2.core.num.sub(&rm.core.num).is_zero());
        assert!(rm2.core.den.sub(&rm.core.den).is_zero());
        assert_eq!(rm2.hole_depth_at(&CPoint::Inf), 1);
        assert_eq!(rm2.hole_depth_at(&CPoint::Fin(ci(0))), 1);
    }

    #[test]
    fn atomic_masses_of_fixed_holes() {
        // degree 3, hole of depth 1 at the fixed point 0 of the degree-2
        // core: μ({0}) = 1/(3−1) = 1/2, one backward level adds 1/6 at 1/2
        let rm = ReducedMap::newton_from_labels(&[(ci(0), 2), (ci(1), 1)], 3).unwrap();
        let am = rm.atomic_masses(16, 1).unwrap();
        assert_eq!(am.mass_at(&CPoint::Fin(ci(0))), q(1, 2));
        let half = Coeff::from_q_pair(&q(1, 2), &q(0, 1), &b());
        assert_eq!(am.mass_at(&CPoint::Fin(half)), q(1, 6));
        assert_eq!(am.tail, q(1, 3));
    }

    #[test]
    fn atomic_masses_with_two_holes() {
        let a = poly(&[0, 0, -1, 2]);
        let bb = poly(&[0, -2, 3]);
        let rm = ReducedMap::from_pair(&a, &bb, 4).unwrap();
        let am = rm.atomic_masses(16, 1).unwrap();
        // both holes are fixed simple points of the core: 1/(4−1) each
        assert_eq!(am.mass_at(&CPoint::Fin(ci(0))), q(1, 3));
        assert_eq!(am.mass_at(&CPoint::Inf), q(1, 3));
        // one backward level: the other preimages 1/2 (of 0) and 2/3 (of ∞)
        let half = Coeff::from_q_pair(&q(1, 2), &q(0, 1), &b());
        let twothirds = Coeff::from_q_pair(&q(2, 3), &q(0, 1), &b());
        assert_eq!(am.mass_at(&CPoint::Fin(half)), q(1, 12));
        assert_eq!(am.mass_at(&CPoint::Fin(twothirds)), q(1, 12));
        assert_eq!(am.tail, q(1, 6));
        // deeper expansion hits preimages that live off ℚ(i); the masses
        // already listed stay exact and the note records the cut
        let am2 = rm.atomic_masses(16, 3).unwrap();
        assert!(!am2.notes.is_empty());
        assert!(am2.tail > Q::zero());
    }

    #[test]
    fn constant_core_puts_all_mass_at_the_escape() {
        // single simple label, everything else escaped: the pair collapses
        // to the constants (α, 1), so the whole degree sits at ∞ and the
        // mass identity forces μ(∞) = 3/3 = 1 (the fixed orbit 7 gets none)
        let rm = ReducedMap::newton_from_labels(&[(ci(7), 1)], 3).unwrap();
        assert_eq!(rm.core.degree(), 0);
        assert_eq!(rm.hole_depth_at(&CPoint::Inf), 3);
        let am = rm.atomic_masses(16, 0).unwrap();
        assert_eq!(am.mass_at(&CPoint::Inf), Q::one());
        assert_eq!(am.mass_at(&CPoint::Fin(ci(7))), Q::zero());
        assert_eq!(am.tail, Q::zero());
        assert_eq!(am.atoms.len(), 1);
    }

    #[test]
    fn composition_and_iteration() {
        let rm = ReducedMap::newton_from_labels(&[(ci(0), 1), (ci(1), 1)], 2).unwrap();
        let f2 = rm.core.iterate(2).unwrap();
        assert_eq!(f2.degree(), 4);
        for z in [ci(2), ci(-3), ci(5)] {
            let once = rm.core.eval(&CPoint::Fin(z.clone())).unwrap();
            let twice = rm.core.eval(&once).unwrap();
            assert!(f2.eval(&CPoint::Fin(z)).unwrap().eq(&twice));
        }
    }

    #[test]
    fn chart_flip_and_local_degrees() {
        let rm = ReducedMap::newton_from_labels(&[(ci(0), 1), (ci(1), 1)], 2).unwrap();
        // z²/(2z−1): local degree 2 exactly at the two critical fixed points
        assert_eq!(rm.core.local_degree_at(&CPoint::Fin(ci(0))).unwrap(), 2);
        assert_eq!(rm.core.local_degree_at(&CPoint::Fin(ci(1))).unwrap(), 2);
        assert_eq!(rm.core.local_degree_at(&CPoint::Inf).unwrap(), 1);
        assert_eq!(rm.core.local_degree_at(&CPoint::Fin(ci(4))).unwrap(), 1);
    }

    #[test]
    fn factored_iterate_of_a_degenerate_cubic() {
        // hole of depth 1 at the non-critical fixed point 0 of the core:
        // the square has degree 9, core the squared map, and holes at 0
        // (depth 3·1 + 1·1 = 4) and at the preimage 1/2 (depth 1)
        let rm = ReducedMap::newton_from_labels(&[(ci(0), 2), (ci(1), 1)], 3).unwrap();
        let it = rm.iterate_factored(2).unwrap();
        assert_eq!(it.d_total, 9);
        assert_eq!(it.core.degree(), 4);
        assert!(it.core.eq_projective(&rm.core.iterate(2).unwrap()));
        assert_eq!(it.hole_depth_at(&CPoint::Fin(ci(0))), 4);
        let half = Coeff::from_q_pair(&q(1, 2), &q(0, 1), &b());
        assert_eq!(it.hole_depth_at(&CPoint::Fin(half)), 1);

        // the limit measure does not feel iteration: the same atoms with
        // the same exact masses fall out of the squared pattern
        let am1 = rm.atomic_masses(16, 1).unwrap();
        let am2 = it.atomic_masses(16, 0).unwrap();
        assert_eq!(am2.mass_at(&CPoint::Fin(ci(0))), q(1, 2));
        assert_eq!(
            am1.mass_at(&CPoint::Fin(ci(0))),
            am2.mass_at(&CPoint::Fin(ci(0)))
        );
        let half = Coeff::from_q_pair(&q(1, 2), &q(0, 1), &b());
        assert_eq!(am2.mass_at(&CPoint::Fin(half)), q(1, 6));
    }

    #[test]
    fn factored_iterate_with_a_constant_core() {
        // all mass already at ∞; squaring keeps the constant core and puts
        // the full degree 9 into the ∞ hole
        let rm = ReducedMap::newton_from_labels(&[(ci(7), 1)], 3).unwrap();
        assert!(!rm.is_indeterminate().unwrap());
        let it = rm.iterate_factored(2).unwrap();
        assert_eq!(it.d_total, 9);
        assert_eq!(it.core.degree(), 0);
        assert_eq!(it.hole_depth_at(&CPoint::Inf), 9);
        let am = it.atomic_masses(16, 0).unwrap();
        assert_eq!(am.mass_at(&CPoint::Inf), Q::one());
    }

    #[test]
    fn indeterminate_pattern_refuses_iteration() {
        // constant core at ∞ inside a depth-3 hole at ∞
        let a = CPoly::constant(ci(1));
        let bb = CPoly::zero();
        let rm = ReducedMap::from_pair(&a, &bb, 3).unwrap();
        assert!(rm.is_indeterminate().unwrap());
        assert!(rm.iterate_factored(2).is_err());
    }

    #[test]
    fn quadratic_normal_form() {
        let f = poly(&[5, 12, 3]);
        let (c, a, bb) = monic_centered_quadratic(&f).unwrap();
        assert!(c.eq_c(&ci(-15)));
        // check g(M(z)) = M(f(z)) on samples, where g(w) = w² + c
        for z in [ci(0), ci(1), ci(-2), ci(7)] {
            let m = |v: &Coeff| a.mul(v).add(&bb);
            let lhs = {
                let w = m(&z);
                w.mul(&w).add(&c)
            };
            let rhs = m(&f.eval(&z));
            assert!(lhs.eq_c(&rhs));
        }
    }

    #[test]
    fn float_reduction_matches_exact_pattern() {
        use crate::bigc::FloatCtx;
        let ctx = FloatCtx::new(128, "1e-25").unwrap();
        let fb = Backend::Float(ctx);
        let cf = |v: i64| Coeff::from_i64(v, &fb);
        let a = CPoly::new(vec![cf(0), cf(0), cf(-1), cf(2)]);
        let bb = CPoly::new(vec![cf(0), cf(-2), cf(3)]);
        let rm = ReducedMap::from_pair(&a, &bb, 4).unwrap();
        assert_eq!(rm.core.degree(), 2);
        assert_eq!(rm.hole_depth_at(&CPoint::Inf), 1);
        assert_eq!(rm.holes.len(), 2);
        let am = rm.atomic_masses(16, 0).unwrap();
        assert_eq!(am.mass_at(&CPoint::Inf), q(1, 3));
        assert_eq!(am.tail, q(1, 3));
    }
}
