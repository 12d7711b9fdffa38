//! Rational maps over the Puiseux field, kept as homogeneous coordinate
//! pairs in the affine chart.
//!
//! The centrepiece is `push_forward`: the image of a type II point.  After
//! moving the ball to the Gauss point the image center is found among the
//! finitely many coefficient ratios fᵢ/gᵢ — along any branch of the tree the
//! objective D(c) = minᵢ val(fᵢ − c·gᵢ) is nondecreasing until it reaches its
//! plateau, so no other points can beat every ratio — and the image radius is
//! D(c*) − minᵢ val(gᵢ).  Because the whole pipeline leans on this one
//! computation, every call validates itself: a batch of distinct-residue
//! type I samples from the ball is pushed through the map, each image must
//! land in the computed ball, and the join of the images must reproduce the
//! computed point exactly.  A failure is a hard internal error, never a
//! warning.

use crate::berk::{BPoint, Dir};
use crate::cmap::{CPoint, ReducedMap};
use crate::coeff::{Backend, Coeff};
use crate::cpoly::CPoly;
use crate::err::{self, Result};
use crate::lpoly::{LPoly, RootBranch};
use crate::puiseux::Pux;
use crate::qq::{Q, Val};
use crate::sampler::Sampler;
use num::Zero;

/// Multiply every coefficient by the exact monomial t^e.
fn lp_mul_mono(p: &LPoly, e: &Q) -> LPoly {
    LPoly::new(
        p.c.iter().map(|v| v.mul_mono(e)).collect(),
        p.backend().clone(),
    )
}

#[derive(Clone)]
pub struct LRat {
    pub num: LPoly,
    pub den: LPoly,
    /// Homogeneous degree: coordinate pairs are degree-d forms, so chart
    /// degrees may drop below d when ∞ absorbs part of the map.
    pub d: usize,
    backend: Backend,
}

/// The action of a map at a type II point seen through frames on both sides:
/// source frame at the point, target frame at its image.  The reduction of
/// the framed map is nonconstant — the core's degree is the local degree —
/// and its local degrees at residue points are the directional
/// multiplicities.
pub struct LocalAction {
    pub image: BPoint,
    pub reduced: ReducedMap,
    /// deg of the core; ≥ 1 always.
    pub degree: usize,
}

impl LocalAction {
    /// Multiplicity of the map along one tangent direction at the source
    /// point (the local degree of the induced residue map there).
    pub fn multiplicity_toward(&self, dir: &Dir) -> Result<usize> {
        let p = match dir {
            Dir::Inf => CPoint::Inf,
            Dir::Res(c) => CPoint::Fin(c.clone()),
        };
        self.reduced.core.local_degree_at(&p)
    }
}

/// A chart region cut out by valuation conditions around a center.
/// Radii are valuations: larger value = smaller disk.
pub enum Region {
    /// val(x − center) ≥ rad (closed) or > rad (open).
    Ball { center: Pux, rad: Q, closed: bool },
    /// The complement on the sphere, ∞ included: val(x − center) < rad
    /// when `of_closed` (complement of the closed ball), ≤ otherwise.
    Outside { center: Pux, rad: Q, of_closed: bool },
    /// The open annulus lo < val(x − center) < hi.
    Annulus { center: Pux, lo: Q, hi: Q },
}

impl LRat {
    pub fn new(num: LPoly, den: LPoly, d: usize) -> Result<LRat> {
        if num.is_zero() && den.is_zero() {
            return Err(err::input("zero coordinate pair"));
        }
        if num.c.len() > d + 1 || den.c.len() > d + 1 {
            return Err(err::input(format!(
                "coordinate pair exceeds declared degree {d}"
            )));
        }
        let backend = num.backend().clone();
        Ok(LRat { num, den, d, backend })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    /// The dynamical Newton map of the monic polynomial with the given
    /// roots: N = (zP′ − P)/P′.  Built twice — once by expanding the pair
    /// directly and once through the elementary symmetric functions — and
    /// the two constructions must agree coefficient by coefficient.
    pub fn newton_from_roots(roots: &[Pux], backend: &Backend) -> Result<LRat> {
        let d = roots.len();
        if d < 2 {
            return Err(err::input("a Newton map needs degree at least 2"));
        }
        // direct route
        let p = LPoly::from_roots(roots, backend);
        let dp = p.derivative();
        let mut zdp = vec![Pux::zero(backend)];
        zdp.extend(dp.c.iter().cloned());
        let a_direct = LPoly::new(zdp, backend.clone()).sub(&p);

        // symmetric-function route: with σₖ the elementary symmetric
        // functions of the roots,
        //   zP′ − P = Σₖ (−1)ᵏ (d−k−1) σₖ z^(d−k)
        //   P′      = Σₖ (−1)ᵏ (d−k)   σₖ z^(d−k−1)
        let mut sigma: Vec<Pux> = vec![Pux::one(backend)];
        for r in roots {
            let mut next = Vec::with_capacity(sigma.len() + 1);
            next.push(sigma[0].clone());
            for k in 1..sigma.len() {
                next.push(sigma[k].add(&sigma[k - 1].mul(r)));
            }
            next.push(sigma[sigma.len() - 1].mul(r));
            sigma = next;
        }
        let mut ac = vec![Pux::zero(backend); d + 1];
        let mut bc = vec![Pux::zero(backend); d];
        for (k, s) in sigma.iter().enumerate() {
            let sgn: i64 = if k % 2 == 0 { 1 } else { -1 };
            let ka = (d as i64) - (k as i64) - 1;
            ac[d - k] = s.mul_coeff(&Coeff::from_i64(sgn * ka, backend));
            if d - k >= 1 {
                let kb = (d as i64) - (k as i64);
                bc[d - k - 1] = s.mul_coeff(&Coeff::from_i64(sgn * kb, backend));
            }
        }
        let a_sym = LPoly::new(ac, backend.clone());
        let b_sym = LPoly::new(bc, backend.clone());

        for j in 0..=d {
            if !a_direct.coeff(j).eq_series(&a_sym.coeff(j)) {
                return Err(err::internal(format!(
                    "numerator routes disagree at z^{j}"
                )));
            }
            if !dp.coeff(j).eq_series(&b_sym.coeff(j)) {
                return Err(err::internal(format!(
                    "denominator routes disagree at z^{j}"
                )));
            }
        }
        LRat::new(a_sym, b_sym, d)
    }

    /// Evaluate at a type I point, to the requested series order.
    /// `None` means the point is a pole (maps to ∞).
    pub fn eval_type1(&self, x: &Pux, order: &Q) -> Result<Option<Pux>> {
        let av = self.num.eval(x);
        let bv = self.den.eval(x);
        if bv.is_known_zero() {
            return Ok(None);
        }
        if av.is_known_zero() {
            return Ok(Some(Pux::zero(&self.backend)));
        }
        Ok(Some(av.div(&bv, order)?))
    }

    /// The polynomial whose roots are the finite preimages of γ (or of ∞
    /// when γ is `None`).
    pub fn fiber_poly(&self, gamma: Option<&Pux>) -> LPoly {
        match gamma {
            None => self.den.clone(),
            Some(g) => self.num.sub(&self.den.mul_series(g)),
        }
    }

    /// Multiplier (derivative value) at a type I point, to the given order.
    pub fn multiplier_at_type1(&self, x: &Pux, order: &Q) -> Result<Pux> {
        let top = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        let tv = top.eval(x);
        let bv = self.den.eval(x);
        let b2 = bv.mul(&bv);
        if b2.is_known_zero() {
            return Err(err::input("multiplier at a pole"));
        }
        tv.div(&b2, order)
    }

    /// Composition self ∘ other as degree d₁·d₂ forms, never reduced:
    /// degree bookkeeping downstream wants the genuine iterate.
    pub fn compose(&self, other: &LRat) -> Result<LRat> {
        let e = self.d;
        let be = &self.backend;
        let one = || LPoly::new(vec![Pux::one(be)], be.clone());
        let mut npow = vec![one()];
        let mut dpow = vec![one()];
        for i in 1..=e {
            npow.push(npow[i - 1].mul(&other.num));
            dpow.push(dpow[i - 1].mul(&other.den));
        }
        let expand = |p: &LPoly| {
            let mut acc = LPoly::new(vec![], be.clone());
            for i in 0..=e {
                let c = p.coeff(i);
                if c.is_known_zero() {
                    continue;
                }
                acc = acc.add(&npow[i].mul(&dpow[e - i]).mul_series(&c));
            }
            acc
        };
        LRat::new(expand(&self.num), expand(&self.den), e * other.d)
    }

    /// Conjugation by the affine frame M(w) = a + t^ρ·w: the map M⁻¹∘φ∘M
    /// in the new coordinate.  The scale stays an exact monomial so no
    /// truncation enters.
    pub fn conjugate_frame(&self, rho: &Q, a: &Pux) -> Result<LRat> {
        let (am, bm) = self.compose_frame_arg(rho, a);
        let anew = lp_mul_mono(&am.sub(&bm.mul_series(a)), &-rho.clone());
        LRat::new(anew, bm, self.d)
    }

    /// The pair (num∘M, den∘M) for M(w) = a + t^ρ·w.
    fn compose_frame_arg(&self, rho: &Q, a: &Pux) -> (LPoly, LPoly) {
        let sub = |p: &LPoly| {
            let sh = p.shift_by(a);
            let c = sh
                .c
                .iter()
                .enumerate()
                .map(|(j, v)| v.mul_mono(&(rho * Q::from_integer(j.into()))))
                .collect();
            LPoly::new(c, self.backend.clone())
        };
        (sub(&self.num), sub(&self.den))
    }

    /// Reduction at a type II point: conjugate the ball to the Gauss point,
    /// normalize the pair by the minimal coefficient valuation, and take
    /// residues.  The result is a degree-d pattern on the residue sphere;
    /// its core is nonconstant exactly when the point is fixed.
    pub fn reduction_at(&self, xi: &BPoint) -> Result<ReducedMap> {
        let (center, rad) = match xi {
            BPoint::II { center, rad } => (center, rad),
            _ => return Err(err::input("reduction exists only at type II points")),
        };
        let conj = self.conjugate_frame(rad, center)?;
        let mut vstar: Option<Q> = None;
        for c in conj.num.c.iter().chain(conj.den.c.iter()) {
            if c.is_known_zero() {
                continue;
            }
            if let Val::Fin(v) = c.val()? {
                vstar = Some(match vstar.take() {
                    Some(w) if w <= v => w,
                    _ => v,
                });
            }
        }
        let vstar = vstar.ok_or_else(|| err::internal("conjugated pair is zero"))?;
        let res = |p: &LPoly| -> Result<CPoly> {
            let mut c = Vec::with_capacity(p.c.len());
            for v in &p.c {
                c.push(v.coeff_at(&vstar)?);
            }
            Ok(CPoly::new(c))
        };
        ReducedMap::from_pair(&res(&conj.num)?, &res(&conj.den)?, self.d)
    }

    /// Image of a type II point, computed exactly and validated by sampling.
    pub fn push_forward(&self, xi: &BPoint, sampler: &mut Sampler) -> Result<BPoint> {
        let (center, rad) = match xi {
            BPoint::II { center, rad } => (center.clone(), rad.clone()),
            _ => return Err(err::input("push-forward implemented for type II points")),
        };
        let (f, g) = self.compose_frame_arg(&rad, &center);
        let m = f.c.len().max(g.c.len());

        // the minimal denominator valuation, exact
        let mut val_g: Option<Val> = None;
        for c in &g.c {
            if c.is_known_zero() {
                continue;
            }
            val_g = Some(match val_g.take() {
                None => c.val()?,
                Some(w) => w.min_with(c.val()?),
            });
        }
        let val_g = match val_g {
            Some(Val::Fin(v)) => v,
            _ => return Err(err::internal("denominator vanished under conjugation")),
        };

        // a working order the ratio truncations have to clear before the
        // objective values can be trusted
        let mut spread = Q::zero();
        for c in f.c.iter().chain(g.c.iter()) {
            if let Ok(Val::Fin(v)) = c.val() {
                let av = if v < Q::zero() { -v } else { v };
                if av > spread {
                    spread = av;
                }
            }
        }
        let two = Q::from_integer(2.into());
        let four = Q::from_integer(4.into());
        let mut order = &spread * &two + &four;

        let mut found: Option<(Q, Vec<Pux>)> = None; // (D_max, maximizing centers)
        'retry: for _ in 0..8 {
            let mut dmax: Option<Q> = None;
            let mut winners: Vec<Pux> = Vec::new();
            for i in 0..m {
                let gi = g.coeff(i);
                if gi.is_known_zero() {
                    continue;
                }
                let fi = f.coeff(i);
                let c = if fi.is_known_zero() {
                    Pux::zero(&self.backend)
                } else {
                    fi.div(&gi, &order)?
                };
                // D(c) = minⱼ val(fⱼ − c·gⱼ); exact leading terms decide it,
                // truncation floors must clear the running minimum or the
                // whole pass retries at a higher order
                let mut dmin: Option<Q> = None;
                let mut floors: Vec<Q> = Vec::new();
                for j in 0..m {
                    let diff = f.coeff(j).sub(&c.mul(&g.coeff(j)));
                    match diff.terms().first() {
                        Some((e, _)) => {
                            dmin = Some(match dmin.take() {
                                Some(w) if w <= *e => w,
                                _ => e.clone(),
                            });
                        }
                        None => {
                            if let Val::Fin(tb) = diff.trunc() {
                                floors.push(tb.clone());
                            }
                            // no terms with trunc ∞: the difference is exactly
                            // zero and never constrains the minimum
                        }
                    }
                }
                let decided = match &dmin {
                    Some(d) => floors.iter().all(|tb| tb >= d),
                    None => floors.is_empty(),
                };
                if !decided {
                    order = &order * &two + &four;
                    continue 'retry;
                }
                let dmin = dmin.ok_or_else(|| {
                    err::internal("objective degenerate: the map collapses the ball")
                })?;
                match &mut dmax {
                    None => {
                        dmax = Some(dmin);
                        winners = vec![c];
                    }
                    Some(mx) => {
                        if dmin > *mx {
                            *mx = dmin;
                            winners = vec![c];
                        } else if dmin == *mx {
                            winners.push(c);
                        }
                    }
                }
            }
            let dmax = dmax.ok_or_else(|| err::internal("no usable coefficient ratios"))?;
            // the centers must be known past the image radius
            let rad_img = &dmax - &val_g;
            if order < rad_img {
                order = &rad_img * &two + &four;
                continue 'retry;
            }
            found = Some((dmax, winners));
            break;
        }
        let (dmax, winners) = found.ok_or_else(|| {
            err::precision("image undetermined after raising the working order")
        })?;
        let rad_img = &dmax - &val_g;

        // all maximizers must name the same ball; among them keep the
        // center with the smallest ramification as the representative
        let mut pick: Option<(u64, BPoint)> = None;
        for w in &winners {
            let trimmed = w.truncate_at(&rad_img);
            let pt = BPoint::type2(&trimmed, &rad_img)?;
            if let Some((_, prev)) = &pick {
                if !prev.eq(&pt)? {
                    return Err(err::internal(
                        "objective plateau names two different image balls",
                    ));
                }
            }
            let r = trimmed.ram()?;
            if pick.as_ref().map(|(pr, _)| r < *pr).unwrap_or(true) {
                pick = Some((r, pt));
            }
        }
        let image = pick.unwrap().1;

        self.validate_push_forward(&center, &rad, &image, sampler)?;
        Ok(image)
    }

    /// The local action at a type II point: compute the image, frame both
    /// sides, reduce.
    pub fn local_action(&self, xi: &BPoint, sampler: &mut Sampler) -> Result<LocalAction> {
        let image = self.push_forward(xi, sampler)?;
        self.local_action_with_image(xi, &image)
    }

    /// Same with the image already known.  Self-guarding: a wrong image
    /// makes the framed map move the Gauss point, the reduction collapses
    /// to a constant, and that is a hard error here.
    pub fn local_action_with_image(&self, xi: &BPoint, image: &BPoint) -> Result<LocalAction> {
        let (a1, r1) = match xi {
            BPoint::II { center, rad } => (center, rad),
            _ => return Err(err::input("local action exists only at type II points")),
        };
        let (a2, r2) = match image {
            BPoint::II { center, rad } => (center, rad),
            _ => return Err(err::internal("image of a type II point must be type II")),
        };
        // ψ = M₂⁻¹ ∘ φ ∘ M₁ with M₁(w) = a₁ + t^{r₁}w, M₂(w) = a₂ + t^{r₂}w
        let (am, bm) = self.compose_frame_arg(r1, a1);
        let psi_num = lp_mul_mono(&am.sub(&bm.mul_series(a2)), &-r2.clone());
        let psi = LRat::new(psi_num, bm, self.d)?;
        let reduced = psi.reduction_at(&BPoint::gauss(&self.backend))?;
        let degree = reduced.core.degree();
        if degree == 0 {
            return Err(err::internal(
                "framed reduction came out constant; the supplied image ball is wrong",
            ));
        }
        Ok(LocalAction {
            image: image.clone(),
            reduced,
            degree,
        })
    }

    /// The reduction at the Gauss point together with the indeterminacy
    /// flag: the limit is indeterminate when the core collapses to a
    /// constant sitting in its own hole set.
    pub fn subalgebraic_limit(&self) -> Result<(ReducedMap, bool)> {
        let rm = self.reduction_at(&BPoint::gauss(&self.backend))?;
        let indeterminate = if rm.core.is_constant() {
            let v = rm
                .core
                .eval(&CPoint::Fin(Coeff::zero(&self.backend)))?;
            rm.hole_depth_at(&v) > 0
        } else {
            false
        };
        Ok((rm, indeterminate))
    }

    /// Preimages of a type I target (`None` = ∞) counted in a region, with
    /// multiplicity, via the Newton polygon of the shifted fiber polynomial.
    pub fn preimage_count_in_region(&self, gamma: Option<&Pux>, region: &Region) -> Result<usize> {
        let fib = self.fiber_poly(gamma);
        let at_inf = self.d - fib.degree()?;
        let center = match region {
            Region::Ball { center, .. }
            | Region::Outside { center, .. }
            | Region::Annulus { center, .. } => center,
        };
        let shifted = if center.is_known_zero() {
            fib
        } else {
            fib.shift_by(center)
        };
        let edges = shifted.polygon()?;
        let count = |pred: &dyn Fn(&Val) -> bool| -> usize {
            edges
                .iter()
                .filter(|(v, _)| pred(v))
                .map(|(_, m)| m)
                .sum()
        };
        Ok(match region {
            Region::Ball { rad, closed, .. } => {
                let r = Val::Fin(rad.clone());
                if *closed {
                    count(&|v| *v >= r)
                } else {
                    count(&|v| *v > r)
                }
            }
            Region::Outside { rad, of_closed, .. } => {
                let r = Val::Fin(rad.clone());
                let fin = if *of_closed {
                    count(&|v| *v < r)
                } else {
                    count(&|v| *v <= r)
                };
                fin + at_inf
            }
            Region::Annulus { lo, hi, .. } => {
                let (l, h) = (Val::Fin(lo.clone()), Val::Fin(hi.clone()));
                count(&|v| *v > l && *v < h)
            }
        })
    }

    /// All preimages of a type I target (`None` = ∞): the finite ones as
    /// expanded root branches, plus the multiplicity that sits at ∞.
    pub fn type1_fiber(&self, gamma: Option<&Pux>, order: &Q) -> Result<(Vec<RootBranch>, usize)> {
        let fib = self.fiber_poly(gamma);
        let deg = fib.degree()?;
        let branches = fib.puiseux_roots(order)?;
        Ok((branches, self.d - deg))
    }

    /// The full fiber of a type II point, as (point, local degree) pairs
    /// whose degrees sum to d.
    ///
    /// Three type I points in pairwise different directions at the ball pin
    /// the fiber down.  At a fiber point the tangent map sends the direction
    /// toward ∞ to a single direction at the target; at least two of the
    /// three spanning points avoid it, and every local preimage of those two
    /// sits strictly inside the fiber point (a direction's image is a ball
    /// with the same boundary, or all of P¹ — either way it swallows the
    /// spanning point's whole direction, so a genuine fiber root lands
    /// inside).  Preimages of different spanning points occupy different
    /// directions, which makes the fiber point exactly the join of such a
    /// pair.  Candidates are therefore all cross joins; each is confirmed by
    /// pushing it forward, graded by its local degree, and the degrees must
    /// account for all of d.
    pub fn type2_fiber(&self, v: &BPoint, sampler: &mut Sampler) -> Result<Vec<(BPoint, usize)>> {
        let (av, rho) = match v {
            BPoint::II { center, rad } => (center, rad),
            _ => return Err(err::input("ball fibers exist only for type II points")),
        };
        // spanning points with full-degree fiber polynomials; a handful of
        // residues can fail (they kill the leading coefficient), never all
        let mut span: Vec<(Pux, LPoly)> = Vec::new();
        for u in 1..=(2 * self.d as i64 + 6) {
            let y = av.add(&Pux::monomial(rho.clone(), Coeff::from_i64(u, &self.backend)));
            let fib = self.fiber_poly(Some(&y));
            if fib.degree().map(|e| e == self.d).unwrap_or(false) {
                span.push((y, fib));
                if span.len() == 3 {
                    break;
                }
            }
        }
        if span.len() < 3 {
            return Err(err::internal(
                "no spanning triple with full fibers; the map degenerates on the whole ball",
            ));
        }

        let mut spread = Q::zero();
        for c in self.num.c.iter().chain(self.den.c.iter()) {
            if let Ok(Val::Fin(v)) = c.val() {
                let av = if v < Q::zero() { -v } else { v };
                if av > spread {
                    spread = av;
                }
            }
        }
        let ra = if rho < &Q::zero() { -rho.clone() } else { rho.clone() };
        let two = Q::from_integer(2.into());
        let four = Q::from_integer(4.into());
        let mut order = (&spread + &ra) * &two + &four;

        let mut last_err: Option<crate::err::Error> = None;
        for _ in 0..6 {
            match self.type2_fiber_pass(v, &span, &order, sampler) {
                Ok(out) => return Ok(out),
                Err(e) if e.is_precision() => {
                    last_err = Some(e);
                    order = &order * &two + &four;
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or_else(|| err::precision("ball fiber did not resolve")))
    }

    fn type2_fiber_pass(
        &self,
        v: &BPoint,
        span: &[(Pux, LPoly)],
        order: &Q,
        sampler: &mut Sampler,
    ) -> Result<Vec<(BPoint, usize)>> {
        let mut fibers: Vec<Vec<crate::lpoly::RootBranch>> = Vec::new();
        for (_, poly) in span {
            fibers.push(poly.puiseux_roots(order)?);
        }
        let mut cands: Vec<BPoint> = Vec::new();
        for (i, ra) in fibers.iter().enumerate() {
            for rb in fibers.iter().skip(i + 1) {
                for a in ra {
                    for b in rb {
                        let j = BPoint::type1(a.series.clone())
                            .join(&BPoint::type1(b.series.clone()))?;
                        if !j.is_type2() {
                            continue;
                        }
                        let mut fresh = true;
                        for c in &cands {
                            if c.eq(&j)? {
                                fresh = false;
                                break;
                            }
                        }
                        if fresh {
                            cands.push(j);
                        }
                    }
                }
            }
        }
        let mut out: Vec<(BPoint, usize)> = Vec::new();
        let mut total = 0usize;
        for c in cands {
            let img = self.push_forward(&c, sampler)?;
            if img.eq(v)? {
                let la = self.local_action_with_image(&c, &img)?;
                total += la.degree;
                out.push((c, la.degree));
            }
        }
        if total != self.d {
            return Err(err::precision(format!(
                "ball fiber accounts for degree {total} of {}; joins still unresolved",
                self.d
            )));
        }
        Ok(out)
    }

    /// Push a batch of distinct-residue type I points of the ball through
    /// the map; each finite image must sit inside the computed ball and the
    /// join of all of them must reproduce the image point exactly.
    fn validate_push_forward(
        &self,
        center: &Pux,
        rad: &Q,
        image: &BPoint,
        sampler: &mut Sampler,
    ) -> Result<()> {
        let need = self.d + 5;
        let attempts = 3 * self.d + 5;
        let order = image.rad().unwrap() + Q::from_integer(2.into());
        let mut used: Vec<Coeff> = Vec::new();
        let mut images: Vec<BPoint> = Vec::new();
        for _ in 0..attempts {
            let u = sampler.next_label(&self.backend, &used);
            used.push(u.clone());
            let x = center.add(&Pux::monomial(rad.clone(), u));
            if let Some(w) = self.eval_type1(&x, &order)? {
                let pt = BPoint::type1(w);
                if !pt.le(image)? {
                    return Err(err::internal(format!(
                        "sample image {pt} escapes the computed ball {image}"
                    )));
                }
                images.push(pt);
            }
            if images.len() >= need {
                break;
            }
        }
        if images.len() < need {
            return Err(err::internal(format!(
                "only {} of {} validation samples evaluated",
                images.len(),
                need
            )));
        }
        let mut join = images[0].clone();
        for pt in &images[1..] {
            join = join.join(pt)?;
        }
        if !join.eq(image)? {
            return Err(err::internal(format!(
                "join of sample images is {join}, computed image is {image}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmap::CPoint;
    use crate::qq::{q, qz};

    fn b() -> Backend {
        Backend::Exact
    }

    fn mono(n: i64, d: i64, c: i64) -> Pux {
        Pux::monomial(q(n, d), Coeff::from_i64(c, &b()))
    }

    /// Newton map of the cubic with roots 1/t, −1/t, 1/t³.
    fn worked_cubic() -> LRat {
        let roots = vec![mono(-1, 1, 1), mono(-1, 1, -1), mono(-3, 1, 1)];
        LRat::newton_from_roots(&roots, &b()).unwrap()
    }

    fn zero_ball(rad: i64) -> BPoint {
        BPoint::type2(&Pux::zero(&b()), &qz(rad)).unwrap()
    }

    #[test]
    fn newton_routes_agree_and_coefficients_match() {
        let n = worked_cubic();
        // with σ₁ = t⁻³, σ₂ = −t⁻², σ₃ = −t⁻⁵:
        // num = 2z³ − σ₁z² + σ₃, den = 3z² − 2σ₁z + σ₂
        assert!(n.num.coeff(3).eq_series(&Pux::from_i64(2, &b())));
        assert!(n.num.coeff(2).eq_series(&mono(-3, 1, -1)));
        assert!(n.num.coeff(1).is_known_zero());
        assert!(n.num.coeff(0).eq_series(&mono(-5, 1, -1)));
        assert!(n.den.coeff(2).eq_series(&Pux::from_i64(3, &b())));
        assert!(n.den.coeff(1).eq_series(&mono(-3, 1, -2)));
        assert!(n.den.coeff(0).eq_series(&mono(-2, 1, -1)));
    }

    #[test]
    fn gauss_point_maps_to_the_spine() {
        let n = worked_cubic();
        let mut smp = Sampler::new(7);
        let img = n.push_forward(&BPoint::gauss(&b()), &mut smp).unwrap();
        assert!(img.eq(&zero_ball(-2)).unwrap());
    }

    #[test]
    fn spine_dynamics_of_the_worked_cubic() {
        // hand-traced objective values along the zero-centered spine: at
        // radius −1 the ratio candidates score D(t⁻³) = −7, D(0) = −5,
        // D(−t⁻³/3) = −7, so the max −5 gives back radius −5−(−4) = −1; the
        // same bookkeeping at −2 and −3 shows the whole segment between the
        // two branch vertices is fixed pointwise
        let n = worked_cubic();
        let mut smp = Sampler::new(11);
        for rad in [-1i64, -2, -3] {
            let img = n.push_forward(&zero_ball(rad), &mut smp).unwrap();
            assert!(
                img.eq(&zero_ball(rad)).unwrap(),
                "spine point at radius {rad} should be fixed"
            );
        }
    }

    #[test]
    fn inversion_fixes_gauss_and_flips_balls() {
        // 1/z as a degree-1 pair
        let num = LPoly::new(vec![Pux::one(&b())], b());
        let den = LPoly::new(vec![Pux::zero(&b()), Pux::one(&b())], b());
        let inv = LRat::new(num, den, 1).unwrap();
        let mut smp = Sampler::new(3);
        let img = inv.push_forward(&BPoint::gauss(&b()), &mut smp).unwrap();
        assert!(img.eq(&BPoint::gauss(&b())).unwrap());
        let img = inv.push_forward(&zero_ball(-2), &mut smp).unwrap();
        assert!(img.eq(&zero_ball(2)).unwrap());
        // an off-center ball: 1/(t+h) = t⁻¹ − t⁻²h + …, so the ball at t
        // with radius 3 lands at t⁻¹ with the radius shifted by −2·val(t)
        let ball = BPoint::type2(&mono(1, 1, 1), &qz(3)).unwrap();
        let img = inv.push_forward(&ball, &mut smp).unwrap();
        let expect = BPoint::type2(&mono(-1, 1, 1), &qz(1)).unwrap();
        assert!(img.eq(&expect).unwrap());
    }

    #[test]
    fn reduction_at_gauss_of_unit_roots() {
        // roots 2 and 3 stay visible at the Gauss point: the reduction is
        // the honest degree-2 Newton map of (z−2)(z−3) and fixes both roots
        let n = LRat::newton_from_roots(&[Pux::from_i64(2, &b()), Pux::from_i64(3, &b())], &b())
            .unwrap();
        let rm = n.reduction_at(&BPoint::gauss(&b())).unwrap();
        assert_eq!(rm.core.degree(), 2);
        assert!(rm.holes.is_empty());
        let two = CPoint::Fin(Coeff::from_i64(2, &b()));
        assert!(rm.core.eval(&two).unwrap().eq(&two));
    }

    #[test]
    fn reduction_at_an_unfixed_point_is_constant() {
        // the worked cubic moves the Gauss point, so the induced residue
        // pattern is constant: core degree 0, all three degrees in holes
        let n = worked_cubic();
        let rm = n.reduction_at(&BPoint::gauss(&b())).unwrap();
        assert_eq!(rm.d_total, 3);
        assert_eq!(rm.core.degree(), 0);
        assert_eq!(rm.total_hole_depth(), 3);
    }

    #[test]
    fn reduction_at_the_fixed_vertex_has_full_degree() {
        let n = worked_cubic();
        let rm = n.reduction_at(&zero_ball(-3)).unwrap();
        assert_eq!(rm.d_total, 3);
        assert!(rm.core.degree() >= 1, "fixed point must have nonconstant reduction");
        assert_eq!(rm.core.degree() + rm.total_hole_depth(), 3);
    }

    #[test]
    fn composition_degree_and_pointwise_agreement() {
        let n = LRat::newton_from_roots(&[Pux::from_i64(0, &b()), Pux::from_i64(1, &b())], &b())
            .unwrap();
        let n2 = n.compose(&n).unwrap();
        assert_eq!(n2.d, 4);
        let x = Pux::from_i64(3, &b());
        let once = n.eval_type1(&x, &qz(8)).unwrap().unwrap();
        let twice = n.eval_type1(&once, &qz(8)).unwrap().unwrap();
        let direct = n2.eval_type1(&x, &qz(8)).unwrap().unwrap();
        let d = direct.sub(&twice);
        assert!(d.terms().is_empty(), "iterate mismatch: {d}");
    }

    #[test]
    fn conjugation_by_frame_round_trips() {
        let n = worked_cubic();
        // frame M(w) = t⁻¹ + t⁻²·w, evaluated against the raw map
        let a = mono(-1, 1, 1);
        let rho = q(-2, 1);
        let conj = n.conjugate_frame(&rho, &a).unwrap();
        let w = Pux::from_i64(2, &b());
        let x = a.add(&w.mul_mono(&rho));
        let direct = n.eval_type1(&x, &qz(6)).unwrap().unwrap();
        let expect = direct.sub(&a).mul_mono(&-rho.clone());
        let got = conj.eval_type1(&w, &qz(6)).unwrap().unwrap();
        let d = got.sub(&expect);
        assert!(d.terms().is_empty(), "conjugation mismatch: {d}");
    }

    #[test]
    fn fiber_polynomial_of_generic_label() {
        // the fiber of γ = 1 over the worked cubic: two preimages at
        // valuation −1 and one at −3
        let n = worked_cubic();
        let fib = n.fiber_poly(Some(&Pux::one(&b())));
        let edges = fib.polygon().unwrap();
        assert_eq!(edges, vec![(Val::Fin(qz(-1)), 2), (Val::Fin(qz(-3)), 1)]);
    }

    #[test]
    fn multiplier_at_a_simple_root_vanishes() {
        let n = LRat::newton_from_roots(&[Pux::from_i64(2, &b()), Pux::from_i64(3, &b())], &b())
            .unwrap();
        let m = n
            .multiplier_at_type1(&Pux::from_i64(2, &b()), &qz(4))
            .unwrap();
        assert!(m.is_known_zero());
    }

    #[test]
    fn local_action_degrees_along_the_spine() {
        // branch vertices of the worked cubic carry local degree 2 (their
        // valence is 3), the moving Gauss point and the fixed midpoint 1
        let n = worked_cubic();
        let mut smp = Sampler::new(5);
        for (rad, want) in [(0i64, 1usize), (-1, 2), (-2, 1), (-3, 2)] {
            let la = n.local_action(&zero_ball(rad), &mut smp).unwrap();
            assert_eq!(la.degree, want, "local degree at radius {rad}");
        }
        // the Gauss point moves to the spine point at radius −2
        let la = n.local_action(&BPoint::gauss(&b()), &mut smp).unwrap();
        assert!(la.image.eq(&zero_ball(-2)).unwrap());
        assert_eq!(la.degree, 1);
    }

    #[test]
    fn local_action_rejects_a_wrong_image() {
        let n = worked_cubic();
        let r = n.local_action_with_image(&BPoint::gauss(&b()), &zero_ball(-1));
        assert!(matches!(r.err(), Some(crate::err::Error::Internal(_))));
    }

    #[test]
    fn directional_multiplicities_at_a_branch_vertex() {
        // at the inner vertex the two visible roots ±t⁻¹ give critical
        // directions (multiplicity 2 each); a generic direction has 1
        let n = worked_cubic();
        let mut smp = Sampler::new(9);
        let la = n.local_action(&zero_ball(-1), &mut smp).unwrap();
        assert!(la.image.eq(&zero_ball(-1)).unwrap());
        let m = |c: i64| {
            la.multiplicity_toward(&Dir::Res(Coeff::from_i64(c, &b())))
                .unwrap()
        };
        assert_eq!(m(1), 2);
        assert_eq!(m(-1), 2);
        assert_eq!(m(5), 1);
        assert_eq!(la.multiplicity_toward(&Dir::Inf).unwrap(), 1);
    }

    #[test]
    fn subalgebraic_limit_of_an_escaping_family_is_indeterminate() {
        // all three roots drift to ∞: constant core at ∞ inside a depth-3
        // hole there
        let n = worked_cubic();
        let (rm, indet) = n.subalgebraic_limit().unwrap();
        assert!(indet);
        assert_eq!(rm.core.degree(), 0);
        assert_eq!(rm.hole_depth_at(&CPoint::Inf), 3);
    }

    #[test]
    fn subalgebraic_limit_with_two_surviving_roots() {
        // roots 0, 1, i/t: the escaping root leaves a simple hole at ∞ and
        // the core is the Newton map of z(z−1); not indeterminate
        let i_over_t = Pux::monomial(q(-1, 1), Coeff::from_q_pair(&qz(0), &qz(1), &b()));
        let n = LRat::newton_from_roots(
            &[Pux::zero(&b()), Pux::one(&b()), i_over_t],
            &b(),
        )
        .unwrap();
        let (rm, indet) = n.subalgebraic_limit().unwrap();
        assert!(!indet);
        assert_eq!(rm.core.degree(), 2);
        assert_eq!(rm.hole_depth_at(&CPoint::Inf), 1);
        let want = ReducedMap::newton_from_labels(
            &[(Coeff::zero(&b()), 1), (Coeff::one(&b()), 1)],
            3,
        )
        .unwrap();
        assert!(rm.core.eq_projective(&want.core));
    }

    #[test]
    fn preimage_counts_partition_the_sphere() {
        // fiber of γ = 1 under the worked cubic: two preimages at val −1,
        // one at val −3, none at ∞
        let n = worked_cubic();
        let zero = Pux::zero(&b());
        let ball = |rad: i64, closed: bool| Region::Ball {
            center: zero.clone(),
            rad: qz(rad),
            closed,
        };
        let one = Pux::one(&b());
        assert_eq!(n.preimage_count_in_region(Some(&one), &ball(-2, true)).unwrap(), 2);
        assert_eq!(n.preimage_count_in_region(Some(&one), &ball(-1, true)).unwrap(), 2);
        assert_eq!(n.preimage_count_in_region(Some(&one), &ball(-1, false)).unwrap(), 0);
        let outside = Region::Outside {
            center: zero.clone(),
            rad: qz(-2),
            of_closed: true,
        };
        assert_eq!(n.preimage_count_in_region(Some(&one), &outside).unwrap(), 1);
        let annulus = Region::Annulus {
            center: zero.clone(),
            lo: qz(-2),
            hi: qz(0),
        };
        assert_eq!(n.preimage_count_in_region(Some(&one), &annulus).unwrap(), 2);

        // poles: two finite ones (val 1 and val −3) and ∞ itself
        let everything = Region::Outside {
            center: zero.clone(),
            rad: qz(10),
            of_closed: true,
        };
        assert_eq!(n.preimage_count_in_region(None, &everything).unwrap(), 3);
        assert_eq!(n.preimage_count_in_region(None, &ball(0, true)).unwrap(), 1);
    }

    #[test]
    fn type1_fiber_reports_the_escape_to_infinity() {
        // degenerate direction: γ = 2/3·z-leading ratio kills the cubic
        // term... instead check ∞ itself: the fiber of ∞ is den's roots
        // plus one at ∞
        let n = worked_cubic();
        let (branches, at_inf) = n.type1_fiber(None, &qz(6)).unwrap();
        assert_eq!(at_inf, 1);
        let total: usize = branches.iter().map(|b| b.mult).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn ball_fiber_of_the_image_of_gauss() {
        // N⁻¹(ξ_{0,−2}) = the Gauss point, the ball itself (it is fixed),
        // and one point beyond the outer vertex, each with local degree 1
        let n = worked_cubic();
        let mut smp = Sampler::new(13);
        let target = zero_ball(-2);
        let fiber = n.type2_fiber(&target, &mut smp).unwrap();
        assert_eq!(fiber.len(), 3);
        assert!(fiber.iter().all(|(_, m)| *m == 1));
        let gauss = BPoint::gauss(&b());
        let mut seen_gauss = false;
        let mut seen_self = false;
        let mut seen_outer = false;
        for (p, _) in &fiber {
            if p.eq(&gauss).unwrap() {
                seen_gauss = true;
            } else if p.eq(&target).unwrap() {
                seen_self = true;
            } else {
                // beyond the outer vertex: not contained in the ball at −2
                assert!(!p.le(&target).unwrap());
                seen_outer = true;
            }
        }
        assert!(seen_gauss && seen_self && seen_outer);
    }

    #[test]
    fn ball_fiber_of_the_gauss_point() {
        // N⁻¹(ξ_g): degree 2 in the annulus between the vertices (one ball
        // of degree 2 or two of degree 1) and degree 1 beyond the outer
        // vertex — matching the fiber polygon of a generic unit target
        let n = worked_cubic();
        let mut smp = Sampler::new(17);
        let g = BPoint::gauss(&b());
        let fiber = n.type2_fiber(&g, &mut smp).unwrap();
        let total: usize = fiber.iter().map(|(_, m)| m).sum();
        assert_eq!(total, 3);
        let inner = zero_ball(-2);
        let mut annulus_deg = 0usize;
        let mut outer_deg = 0usize;
        for (p, m) in &fiber {
            if p.le(&inner).unwrap() {
                annulus_deg += m;
            } else {
                outer_deg += m;
            }
        }
        assert_eq!(annulus_deg, 2);
        assert_eq!(outer_deg, 1);
    }
}
