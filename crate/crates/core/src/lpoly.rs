//! Polynomials over the Puiseux field: Newton polygons, root counts in disks,
//! and Puiseux root expansions.
//!
//! The Newton polygon is computed twice when coefficients carry uncertainty:
//! once treating every unknown coefficient as absent (its true valuation might
//! be anything ≥ its truncation, including +∞) and once pinning it at the
//! truncation bound.  The two readings bracket the truth; when they agree the
//! polygon is exact, when they disagree the caller gets `PrecisionExhausted`
//! (or `BoundaryAmbiguous` for a disk count whose only disagreement sits on an
//! edge whose slope equals the queried radius).

use crate::coeff::{Backend, Coeff};
use crate::cpoly::{roots_with_mult, CPoly};
use crate::err::{self, Result};
use crate::puiseux::Pux;
use crate::qq::{q_str, Q, Val};
use num::rational::BigRational;
use num::{One, Zero};
use std::fmt;

#[derive(Clone, Debug)]
pub struct LPoly {
    /// c[i] = coefficient of x^i.  Trailing *known-zero* coefficients are
    /// trimmed; trailing unknowns stay (the degree is then uncertain).
    pub c: Vec<Pux>,
    backend: Backend,
}

/// One Puiseux root branch (or unresolved cluster of branches).
///
/// `series` agrees with every root in the branch at all exponents < `known_to`;
/// when `resolved` is false the branch is a cluster of `mult` roots whose next
/// exponent is exactly `known_to` but whose residue there was not computable
/// over the active backend (or lies beyond the requested order).
#[derive(Clone, Debug)]
pub struct RootBranch {
    pub series: Pux,
    pub known_to: Val,
    pub mult: usize,
    pub resolved: bool,
}

impl LPoly {
    pub fn new(mut c: Vec<Pux>, backend: Backend) -> LPoly {
        while let Some(last) = c.last() {
            if last.is_known_zero() {
                c.pop();
            } else {
                break;
            }
        }
        LPoly { c, backend }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Exact degree; errors if the leading coefficient is uncertain.
    pub fn degree(&self) -> Result<usize> {
        match self.c.last() {
            None => Err(err::input("degree of the zero polynomial")),
            Some(top) if top.is_empty_unknown() => Err(err::precision(
                "leading coefficient known only as a truncation bound",
            )),
            Some(_) => Ok(self.c.len() - 1),
        }
    }

    pub fn coeff(&self, i: usize) -> Pux {
        self.c
            .get(i)
            .cloned()
            .unwrap_or_else(|| Pux::zero(&self.backend))
    }

    pub fn eval(&self, x: &Pux) -> Pux {
        let mut acc = Pux::zero(&self.backend);
        for c in self.c.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> LPoly {
        if self.c.len() <= 1 {
            return LPoly::new(vec![], self.backend.clone());
        }
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, v)| v.mul_coeff(&Coeff::from_i64(i as i64, &self.backend)))
            .collect();
        LPoly::new(c, self.backend.clone())
    }

    pub fn add(&self, o: &LPoly) -> LPoly {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i).add(&o.coeff(i)));
        }
        LPoly::new(c, self.backend.clone())
    }

    pub fn sub(&self, o: &LPoly) -> LPoly {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i).sub(&o.coeff(i)));
        }
        LPoly::new(c, self.backend.clone())
    }

    pub fn mul(&self, o: &LPoly) -> LPoly {
        if self.is_zero() || o.is_zero() {
            return LPoly::new(vec![], self.backend.clone());
        }
        let mut c = vec![Pux::zero(&self.backend); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        LPoly::new(c, self.backend.clone())
    }

    pub fn mul_series(&self, s: &Pux) -> LPoly {
        LPoly::new(self.c.iter().map(|v| v.mul(s)).collect(), self.backend.clone())
    }

    /// Monic Π (x − rᵢ).
    pub fn from_roots(roots: &[Pux], backend: &Backend) -> LPoly {
        let mut p = LPoly::new(vec![Pux::one(backend)], backend.clone());
        for r in roots {
            let lin = LPoly::new(vec![r.neg(), Pux::one(backend)], backend.clone());
            p = p.mul(&lin);
        }
        p
    }

    /// p(s + x): shift of the argument by a series.
    pub fn shift_by(&self, s: &Pux) -> LPoly {
        let n = self.c.len();
        if n == 0 {
            return self.clone();
        }
        // powers of s
        let mut pw: Vec<Pux> = Vec::with_capacity(n);
        pw.push(Pux::one(&self.backend));
        for k in 1..n {
            pw.push(pw[k - 1].mul(s));
        }
        // binomials as exact rationals
        let mut out = vec![Pux::zero(&self.backend); n];
        for (i, ci) in self.c.iter().enumerate() {
            let mut binom = BigRational::one();
            for j in 0..=i {
                // binom = C(i, j)
                let coeff = Coeff::from_q_pair(&binom, &Q::zero(), &self.backend);
                out[j] = out[j].add(&ci.mul(&pw[i - j]).mul_coeff(&coeff));
                if j < i {
                    let num = BigRational::from_integer((i - j).into());
                    let den = BigRational::from_integer((j + 1).into());
                    binom = binom * num / den;
                }
            }
        }
        LPoly::new(out, self.backend.clone())
    }

    // -- Newton polygon ----------------------------------------------------

    /// Exact Newton polygon: list of (root valuation, multiplicity), with
    /// valuation Inf for roots at the shift origin, sorted by descending
    /// valuation.  Σ multiplicities = degree.
    pub fn polygon(&self) -> Result<Vec<(Val, usize)>> {
        let (a, b) = self.dual_polygons()?;
        if a == b {
            Ok(a)
        } else {
            Err(err::precision(format!(
                "newton polygon depends on coefficients beyond truncation ({} vs {})",
                fmt_edges(&a),
                fmt_edges(&b)
            )))
        }
    }

    /// The two polygon readings: (unknowns absent, unknowns at their bound).
    fn dual_polygons(&self) -> Result<(Vec<(Val, usize)>, Vec<(Val, usize)>)> {
        if self.c.is_empty() {
            return Err(err::input("newton polygon of the zero polynomial"));
        }
        let mut known: Vec<(usize, Q)> = Vec::new();
        let mut pessim: Vec<(usize, Q)> = Vec::new();
        for (i, ci) in self.c.iter().enumerate() {
            if let Some((e, _)) = ci.terms().first() {
                known.push((i, e.clone()));
                pessim.push((i, e.clone()));
            } else if let Val::Fin(t) = ci.trunc() {
                pessim.push((i, t.clone()));
            }
            // known-zero coefficients participate in neither reading
        }
        if known.is_empty() && pessim.is_empty() {
            return Err(err::input("newton polygon of the zero polynomial"));
        }
        if known.is_empty() {
            return Err(err::precision(
                "newton polygon: no coefficient has a known term",
            ));
        }
        let deg = self.c.len() - 1;
        let a = edges_of(&known, deg);
        let b = edges_of(&pessim, deg);
        Ok((a, b))
    }

    /// Number of roots x with val(x − center) ≥ radius (closed) or > radius
    /// (strict), counted with multiplicity.  Exact or an honest error.
    pub fn count_roots_in_disk(&self, center: &Pux, radius: &Q, closed: bool) -> Result<usize> {
        let shifted = if center.is_known_zero() {
            self.clone()
        } else {
            self.shift_by(center)
        };
        let (pa, pb) = shifted.dual_polygons()?;
        let ca = count_edges(&pa, radius, closed);
        let cb = count_edges(&pb, radius, closed);
        if ca == cb {
            return Ok(ca);
        }
        let on_boundary = pa
            .iter()
            .chain(pb.iter())
            .any(|(l, _)| matches!(l, Val::Fin(v) if v == radius));
        if on_boundary {
            Err(err::boundary(format!(
                "root count in disk of radius {} straddles the boundary at current truncation",
                q_str(radius)
            )))
        } else {
            Err(err::precision(format!(
                "root count in disk of radius {} uncertain ({} vs {})",
                q_str(radius),
                ca,
                cb
            )))
        }
    }

    // -- Puiseux roots -------------------------------------------------------

    /// Expand all roots as Puiseux series up to (exclusive) exponent `order`.
    pub fn puiseux_roots(&self, order: &Q) -> Result<Vec<RootBranch>> {
        let deg = self.degree()?;
        if deg == 0 {
            return Ok(vec![]);
        }
        let mut out = Vec::new();
        self.roots_rec(&Pux::zero(&self.backend), None, order, 0, &mut out)?;
        let total: usize = out.iter().map(|b| b.mult).sum();
        if total != deg {
            return Err(err::internal(format!(
                "puiseux root multiplicities sum to {total}, degree is {deg}"
            )));
        }
        Ok(out)
    }

    fn roots_rec(
        &self,
        prefix: &Pux,
        lam_min: Option<&Q>,
        order: &Q,
        depth: usize,
        out: &mut Vec<RootBranch>,
    ) -> Result<()> {
        if depth > 256 {
            return Err(err::precision(
                "puiseux expansion exceeded recursion depth; root structure too fine for the truncation",
            ));
        }
        let edges = self.polygon()?;
        for (lam, width) in edges {
            match &lam {
                Val::Inf => {
                    // roots exactly equal to the accumulated prefix
                    out.push(RootBranch {
                        series: prefix.clone(),
                        known_to: Val::Inf,
                        mult: width,
                        resolved: true,
                    });
                }
                Val::Fin(l) => {
                    if let Some(lm) = lam_min {
                        if l <= lm {
                            continue; // artifact of shifting: belongs to other branches
                        }
                    }
                    if l >= order {
                        // a width-1 edge is a single root already separated
                        // from the others; wider edges are unsplit clusters
                        out.push(RootBranch {
                            series: prefix.clone(),
                            known_to: lam.clone(),
                            mult: width,
                            resolved: width == 1,
                        });
                        continue;
                    }
                    let phi = self.residue_poly(l)?;
                    let roots = match roots_with_mult(&phi) {
                        Ok(r) => r,
                        Err(e) if matches!(e, crate::err::Error::Unrepresentable(_)) => {
                            out.push(RootBranch {
                                series: prefix.clone(),
                                known_to: lam.clone(),
                                mult: width,
                                resolved: false,
                            });
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    let got: usize = roots.iter().map(|(_, m)| m).sum();
                    if got != width {
                        return Err(err::internal(format!(
                            "residue equation of width-{width} edge has {got} roots"
                        )));
                    }
                    for (cres, _m) in roots {
                        if cres.is_zero_quiet() {
                            return Err(err::internal("zero residue on a polygon edge"));
                        }
                        let step = Pux::monomial(l.clone(), cres);
                        let prefix2 = prefix.add(&step);
                        let shifted = self.shift_by(&step);
                        shifted.roots_rec(&prefix2, Some(l), order, depth + 1, out)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Residue equation of the polygon edge with root valuation `l`: the
    /// complex polynomial Σ lc(c_i) · c^(i−i₀) over the edge's lattice points.
    fn residue_poly(&self, l: &Q) -> Result<CPoly> {
        // reconstruct the edge from the exact polygon's supporting line
        let mut pts: Vec<(usize, Q)> = Vec::new();
        for (i, ci) in self.c.iter().enumerate() {
            if let Some((e, _)) = ci.terms().first() {
                pts.push((i, e.clone()));
            }
        }
        // minimal value of v_i + l·i locates the supporting line
        let mut best: Option<Q> = None;
        for (i, v) in &pts {
            let key = v + l * BigRational::from_integer((*i).into());
            best = match best {
                None => Some(key),
                Some(b) => Some(if key < b { key } else { b }),
            };
        }
        let base = best.ok_or_else(|| err::internal("residue poly of empty polygon"))?;
        let on_edge: Vec<usize> = pts
            .iter()
            .filter(|(i, v)| v + l * BigRational::from_integer((*i).into()) == base)
            .map(|(i, _)| *i)
            .collect();
        let i0 = *on_edge.first().unwrap();
        let i1 = *on_edge.last().unwrap();
        let mut coeffs = Vec::with_capacity(i1 - i0 + 1);
        for i in i0..=i1 {
            let expected = &base - l * BigRational::from_integer(i.into());
            coeffs.push(self.c[i].coeff_at(&expected)?);
        }
        Ok(CPoly::new(coeffs))
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_known_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "[{c}]")?,
                1 => write!(f, "[{c}]·x")?,
                _ => write!(f, "[{c}]·x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Lower convex hull → (λ, mult) edges, λ descending, Inf first.
fn edges_of(points: &[(usize, Q)], deg: usize) -> Vec<(Val, usize)> {
    let _ = deg;
    if points.is_empty() {
        return vec![];
    }
    let ord0 = points[0].0;
    let mut out = Vec::new();
    if ord0 > 0 {
        out.push((Val::Inf, ord0));
    }
    // monotone chain (points already sorted by index, indices distinct)
    let mut hull: Vec<(usize, Q)> = Vec::new();
    for p in points {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // keep b only if slope(a,b) < slope(b,p): cross check in ℚ
            let lhs = (&b.1 - &a.1) * BigRational::from_integer((p.0 - b.0).into());
            let rhs = (&p.1 - &b.1) * BigRational::from_integer((b.0 - a.0).into());
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    for w in hull.windows(2) {
        let (i0, v0) = &w[0];
        let (i1, v1) = &w[1];
        let width = i1 - i0;
        let slope = (v1 - v0) / BigRational::from_integer(width.into());
        out.push((Val::Fin(-slope), width));
    }
    out
}

fn count_edges(edges: &[(Val, usize)], radius: &Q, closed: bool) -> usize {
    edges
        .iter()
        .filter(|(l, _)| match l {
            Val::Inf => true,
            Val::Fin(v) => {
                if closed {
                    v >= radius
                } else {
                    v > radius
                }
            }
        })
        .map(|(_, m)| m)
        .sum()
}

fn fmt_edges(edges: &[(Val, usize)]) -> String {
    let parts: Vec<String> = edges
        .iter()
        .map(|(l, m)| format!("({l},{m})"))
        .collect();
    format!("[{}]", parts.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qq::{q, qz};

    fn b() -> Backend {
        Backend::Exact
    }

    fn mono(n: i64, d: i64, c: i64) -> Pux {
        Pux::monomial(q(n, d), Coeff::from_i64(c, &b()))
    }

    fn ipoly(coeffs: Vec<Pux>) -> LPoly {
        LPoly::new(coeffs, b())
    }

    #[test]
    fn polygon_of_x2_minus_t() {
        let p = ipoly(vec![mono(1, 1, -1), Pux::zero(&b()), Pux::one(&b())]);
        let edges = p.polygon().unwrap();
        assert_eq!(edges, vec![(Val::Fin(q(1, 2)), 2)]);
    }

    #[test]
    fn polygon_with_mixed_valuations() {
        // 3x² − 2t^{-3}x − t^{-2} → [(1,1), (−3,1)]
        let p = ipoly(vec![mono(-2, 1, -1), mono(-3, 1, -2), Pux::from_i64(3, &b())]);
        let edges = p.polygon().unwrap();
        assert_eq!(
            edges,
            vec![(Val::Fin(qz(1)), 1), (Val::Fin(qz(-3)), 1)]
        );
    }

    #[test]
    fn polygon_of_worked_cubic_fiber() {
        // Fiber polynomial of the Newton map of roots {1/t, −1/t, 1/t³} over a
        // unit-valuation sample γ=1:
        //   2z³ − (σ₁ + 3γ)z² + 2γσ₁ z + (σ₃ − γσ₂),
        // σ₁ = t^{-3}, σ₂ = −t^{-2}, σ₃ = −t^{-5}.
        // Hand-computed hull: two roots of valuation −1, one of valuation −3.
        let c0 = mono(-5, 1, -1).add(&mono(-2, 1, 1));
        let c1 = mono(-3, 1, 2);
        let c2 = mono(-3, 1, -1).add(&Pux::from_i64(-3, &b()));
        let c3 = Pux::from_i64(2, &b());
        let p = ipoly(vec![c0, c1, c2, c3]);
        let edges = p.polygon().unwrap();
        assert_eq!(
            edges,
            vec![(Val::Fin(qz(-1)), 2), (Val::Fin(qz(-3)), 1)]
        );
    }

    #[test]
    fn polygon_with_zero_roots() {
        // x³ − t·x: one root at 0, two of valuation 1/2
        let p = ipoly(vec![
            Pux::zero(&b()),
            mono(1, 1, -1),
            Pux::zero(&b()),
            Pux::one(&b()),
        ]);
        let edges = p.polygon().unwrap();
        assert_eq!(edges, vec![(Val::Inf, 1), (Val::Fin(q(1, 2)), 2)]);
    }

    #[test]
    fn harmless_unknown_keeps_polygon_exact() {
        // x² + O(t³)·x − t: the unknown sits strictly above the hull
        let unknown = Pux::new(vec![], Val::Fin(qz(3)), b());
        let p = ipoly(vec![mono(1, 1, -1), unknown, Pux::one(&b())]);
        assert_eq!(p.polygon().unwrap(), vec![(Val::Fin(q(1, 2)), 2)]);
    }

    #[test]
    fn hull_relevant_unknown_is_an_error() {
        // x² + O(t^{1/4})·x − t: the bound dips below the hull
        let unknown = Pux::new(vec![], Val::Fin(q(1, 4)), b());
        let p = ipoly(vec![mono(1, 1, -1), unknown, Pux::one(&b())]);
        assert!(p.polygon().is_err());
        // counting away from the contested region still fails honestly
        let e = p
            .count_roots_in_disk(&Pux::zero(&b()), &q(3, 10), true)
            .unwrap_err();
        assert!(matches!(e, crate::err::Error::PrecisionExhausted(_)));
        // a query whose disagreement sits exactly on an edge slope reports
        // the sharper boundary condition
        let e = p
            .count_roots_in_disk(&Pux::zero(&b()), &q(1, 4), false)
            .unwrap_err();
        assert!(matches!(e, crate::err::Error::BoundaryAmbiguous(_)));
    }

    #[test]
    fn disk_counts() {
        let p = ipoly(vec![mono(1, 1, -1), Pux::zero(&b()), Pux::one(&b())]);
        let zero = Pux::zero(&b());
        assert_eq!(p.count_roots_in_disk(&zero, &qz(2), true).unwrap(), 0);
        assert_eq!(p.count_roots_in_disk(&zero, &q(1, 2), true).unwrap(), 2);
        assert_eq!(p.count_roots_in_disk(&zero, &q(1, 2), false).unwrap(), 0);
        assert_eq!(p.count_roots_in_disk(&zero, &qz(0), true).unwrap(), 2);
    }

    #[test]
    fn shifted_disk_count() {
        // roots t and −t: disk around center t of radius 3/2 (strict) holds one
        let p = LPoly::from_roots(&[mono(1, 1, 1), mono(1, 1, -1)], &b());
        let center = mono(1, 1, 1);
        assert_eq!(p.count_roots_in_disk(&center, &q(3, 2), true).unwrap(), 1);
        // both lie in the closed disk of radius 1 around t (they differ at t¹)
        assert_eq!(p.count_roots_in_disk(&center, &qz(1), true).unwrap(), 2);
        assert_eq!(p.count_roots_in_disk(&center, &qz(1), false).unwrap(), 1);
    }

    #[test]
    fn roots_of_x2_minus_t_are_sqrt_branches() {
        let p = ipoly(vec![mono(1, 1, -1), Pux::zero(&b()), Pux::one(&b())]);
        let roots = p.puiseux_roots(&qz(3)).unwrap();
        assert_eq!(roots.len(), 2);
        for br in &roots {
            assert!(br.resolved);
            assert_eq!(br.mult, 1);
            let (e, c) = br.series.leading().unwrap();
            assert_eq!(e, q(1, 2));
            let sq = c.mul(&c);
            assert!(sq.eq_c(&Coeff::one(&b())));
        }
    }

    #[test]
    fn quadratic_with_catalan_tail() {
        // x² + x + t: branches −t − t² − 2t³ − ... and −1 + t + t² + 2t³ + ...
        let p = ipoly(vec![mono(1, 1, 1), Pux::one(&b()), Pux::one(&b())]);
        let roots = p.puiseux_roots(&qz(4)).unwrap();
        assert_eq!(roots.len(), 2);
        let small = roots
            .iter()
            .find(|r| r.series.val().unwrap() == Val::Fin(qz(1)))
            .unwrap();
        assert!(small.resolved);
        for (k, expect) in [(1i64, -1i64), (2, -1), (3, -2)] {
            assert!(
                small
                    .series
                    .coeff_at(&qz(k))
                    .unwrap()
                    .eq_c(&Coeff::from_i64(expect, &b())),
                "coefficient at t^{k}"
            );
        }
        let unit = roots
            .iter()
            .find(|r| r.series.val().unwrap() == Val::Fin(qz(0)))
            .unwrap();
        for (k, expect) in [(0i64, -1i64), (1, 1), (2, 1), (3, 2)] {
            assert!(unit
                .series
                .coeff_at(&qz(k))
                .unwrap()
                .eq_c(&Coeff::from_i64(expect, &b())));
        }
    }

    #[test]
    fn exact_double_root_terminates() {
        let r = mono(1, 1, 1);
        let p = LPoly::from_roots(&[r.clone(), r.clone()], &b());
        let roots = p.puiseux_roots(&qz(6)).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].mult, 2);
        assert!(roots[0].resolved);
        assert!(roots[0].series.eq_series(&r));
        assert!(roots[0].known_to.is_inf());
    }

    #[test]
    fn irrational_residue_clusters_exactly() {
        // x² − 2t²: residues ±√2 do not exist over ℚ(i)
        let p = ipoly(vec![mono(2, 1, -2), Pux::zero(&b()), Pux::one(&b())]);
        let roots = p.puiseux_roots(&qz(5)).unwrap();
        assert_eq!(roots.len(), 1);
        let cl = &roots[0];
        assert!(!cl.resolved);
        assert_eq!(cl.mult, 2);
        assert_eq!(cl.known_to, Val::Fin(qz(1)));
        assert!(cl.series.is_known_zero());
    }

    #[test]
    fn irrational_residue_resolves_under_float() {
        use crate::bigc::FloatCtx;
        let ctx = FloatCtx::new(192, "1e-30").unwrap();
        let fb = Backend::Float(ctx);
        let p = LPoly::new(
            vec![
                Pux::monomial(qz(2), Coeff::from_i64(-2, &fb)),
                Pux::zero(&fb),
                Pux::one(&fb),
            ],
            fb.clone(),
        );
        let roots = p.puiseux_roots(&qz(5)).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!(r.resolved);
            let (e, c) = r.series.leading().unwrap();
            assert_eq!(e, qz(1));
            let (re, _) = c.to_f64c();
            assert!((re.abs() - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn simple_root_beyond_order_stays_resolved() {
        // x − t⁵ expanded only to order 3: the single root sits beyond the
        // horizon but is separated, so the branch is resolved with the
        // honest next-exponent bound recorded
        let p = ipoly(vec![mono(5, 1, -1), Pux::one(&b())]);
        let roots = p.puiseux_roots(&qz(3)).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].resolved);
        assert_eq!(roots[0].mult, 1);
        assert_eq!(roots[0].known_to, Val::Fin(qz(5)));
        assert!(roots[0].series.is_known_zero());
    }

    #[test]
    fn fractional_ramified_branch() {
        // (x² − t)(x − t²) exercises mixed ramification
        let tsq = mono(2, 1, 1);
        let x2t = ipoly(vec![mono(1, 1, -1), Pux::zero(&b()), Pux::one(&b())]);
        let p = x2t.mul(&LPoly::new(vec![tsq.neg(), Pux::one(&b())], b()));
        let roots = p.puiseux_roots(&qz(4)).unwrap();
        assert_eq!(roots.len(), 3);
        let vals: Vec<Val> = roots.iter().map(|r| r.series.val().unwrap()).collect();
        assert!(vals.contains(&Val::Fin(qz(2))));
        assert_eq!(vals.iter().filter(|v| **v == Val::Fin(q(1, 2))).count(), 2);
    }
}
