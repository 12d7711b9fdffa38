//! Structure of a degenerating Newton family seen from the tree side: the
//! fixed hull spanned by the roots, the critical portrait hanging off it,
//! the collapse pattern at every branch vertex (period one), and the search
//! for repelling cycles of balls that carry quadratic-or-bigger limits at
//! higher periods.

use num::{One, Zero};

use crate::berk::{BPoint, Dir, FiniteTree};
use crate::cmap::{CPoint, ReducedMap};
use crate::coeff::{Backend, Coeff};
use crate::cpoly::{eval_f64, CPoly};
use crate::err::{self, Result};
use crate::lpoly::LPoly;
use crate::lrat::LRat;
use crate::puiseux::Pux;
use crate::qq::{Q, Val};
use crate::sampler::Sampler;

/// Join of the whole set: the smallest ball containing every listed point.
pub fn hull_top(pts: &[BPoint]) -> Result<BPoint> {
    let mut it = pts.iter();
    let mut top = it
        .next()
        .ok_or_else(|| err::input("hull of an empty set"))?
        .clone();
    for p in it {
        top = top.join(p)?;
    }
    Ok(top)
}

/// Nearest point of the hull of `pts` to `x`.  The hull is the union of
/// paths between the listed points, extended to ∞ when `with_inf` is set.
/// The deepest join of `x` against the set lies on `x`'s path toward ∞ and
/// is the entry point into the hull — unless it sits above the hull's top,
/// in which case the top itself is closest.
pub fn visible_point(pts: &[BPoint], with_inf: bool, x: &BPoint) -> Result<BPoint> {
    if matches!(x, BPoint::Inf) {
        return if with_inf {
            Ok(BPoint::inf())
        } else {
            hull_top(pts)
        };
    }
    let mut best: Option<BPoint> = None;
    for p in pts {
        let j = x.join(p)?;
        best = match best {
            None => Some(j),
            Some(cur) => {
                if j.rad().unwrap() > cur.rad().unwrap() {
                    Some(j)
                } else {
                    Some(cur)
                }
            }
        };
    }
    let j = best.ok_or_else(|| err::input("hull of an empty set"))?;
    if with_inf {
        return Ok(j);
    }
    let top = hull_top(pts)?;
    if j.le(&top)? {
        Ok(j)
    } else {
        Ok(top)
    }
}

/// Whether `p` lies on the closed path from `bot` up to `top` (both balls,
/// `bot` the smaller), endpoints included.
pub fn on_segment(p: &BPoint, bot: &BPoint, top: &BPoint) -> Result<bool> {
    Ok(bot.le(p)? && p.le(top)?)
}

fn strictly_between(p: &BPoint, bot: &BPoint, top: &BPoint) -> Result<bool> {
    Ok(on_segment(p, bot, top)? && !p.eq(bot)? && !p.eq(top)?)
}

/// The hull of the roots together with ∞, its branch vertices graded by
/// local degree, and the sub-hulls the dynamics preserves.
pub struct FixedTreeReport {
    /// Hull of roots ∪ {∞}: every point of it maps into it.
    pub h_fix: FiniteTree,
    /// Hull of the roots alone.
    pub h_r: FiniteTree,
    /// Branch vertices (tree valence ≥ 3) with their local degrees,
    /// ordered from the ∞ end inward (radius increasing).
    pub v: Vec<(BPoint, usize)>,
    /// Hull of the branch vertices.
    pub h_v: FiniteTree,
    /// Hull of the branch vertices with the ray to ∞ attached; away from ∞
    /// this set is fixed pointwise.
    pub h_v_inf: FiniteTree,
    /// Nearest point of the branch-vertex hull to ∞ (its top vertex).
    pub pi_v_of_inf: BPoint,
    /// A single branch vertex means the whole family is one conjugacy
    /// class with a degree-d limit: potentially good reduction.
    pub good_reduction: bool,
}

/// Build the fixed hull of the family and grade its branch vertices.
/// Every branch vertex is checked to be fixed under the map, and its local
/// degree is computed twice — as tree valence minus one and as the degree
/// of the two-frame reduction — with any disagreement a hard error.
pub fn fixed_tree(map: &LRat, roots: &[Pux], sampler: &mut Sampler) -> Result<FixedTreeReport> {
    let mut pts: Vec<BPoint> = roots.iter().map(|r| BPoint::type1(r.clone())).collect();
    pts.push(BPoint::inf());
    let h_fix = FiniteTree::build(&pts)?;

    let mut v: Vec<(BPoint, usize)> = Vec::new();
    for (i, vert) in h_fix.verts.iter().enumerate() {
        let valence = h_fix.valence(i);
        if valence < 3 {
            continue;
        }
        let image = map.push_forward(vert, sampler)?;
        if !image.eq(vert)? {
            return Err(err::internal(
                "a branch vertex of the root hull is not fixed by the map",
            ));
        }
        let la = map.local_action_with_image(vert, vert)?;
        if la.degree != valence - 1 {
            return Err(err::internal(format!(
                "local degree {} disagrees with tree valence {} at a branch vertex",
                la.degree, valence
            )));
        }
        v.push((vert.clone(), la.degree));
    }
    if v.is_empty() {
        return Err(err::internal("root hull has no branch vertex"));
    }
    // a tree with d root ends branches away exactly d − 1 times in total
    let excess: usize = v.iter().map(|(_, deg)| deg - 1).sum();
    if excess != map.d - 1 {
        return Err(err::internal(format!(
            "branch degrees account for {excess} splittings, expected {}",
            map.d - 1
        )));
    }

    let h_r = FiniteTree::build(
        &roots
            .iter()
            .map(|r| BPoint::type1(r.clone()))
            .collect::<Vec<_>>(),
    )?;
    let vpts: Vec<BPoint> = v.iter().map(|(p, _)| p.clone()).collect();
    let h_v = FiniteTree::build(&vpts)?;
    let mut vpts_inf = vpts.clone();
    vpts_inf.push(BPoint::inf());
    let h_v_inf = FiniteTree::build(&vpts_inf)?;
    let pi_v_of_inf = h_v.verts[h_v.root].clone();
    if !pi_v_of_inf.eq(&h_fix.verts[h_fix.root])? {
        return Err(err::internal(
            "top branch vertex differs from the top of the root hull",
        ));
    }
    let good_reduction = v.len() == 1;
    Ok(FixedTreeReport {
        h_fix,
        h_r,
        v,
        h_v,
        h_v_inf,
        pi_v_of_inf,
        good_reduction,
    })
}

/// How a critical direction behaves under the vertex's reduced map.
#[derive(Clone, Debug, PartialEq)]
pub enum Freedom {
    /// The direction falls into an attracting basin of the reduced map and
    /// never leaves the vertex's shadow.
    Captured,
    /// The direction's forward orbit under the reduced map lands exactly on
    /// a hole after this many steps; from there the ball maps over the whole
    /// sphere and the reduction stops steering it.
    TotallyFree { hole_step: usize },
    /// Neither event within budget (for instance an orbit parked on a
    /// repelling fixed point, or one that cycles without converging).
    Unknown,
}

/// One critical point of the family: a root (each root is superattracting)
/// or a zero of the second derivative of the defining polynomial.
pub struct CriticalBranch {
    pub series: Pux,
    pub mult: usize,
    pub is_root: bool,
    /// Nearest point of the branch-vertex hull; always one of the branch
    /// vertices.
    pub visible: BPoint,
    /// Direction at the visible vertex pointing toward the critical point.
    pub label: Dir,
    pub freedom: Freedom,
}

pub struct CriticalPortrait {
    pub branches: Vec<CriticalBranch>,
    /// Hull of the critical set with the ray to ∞.
    pub h_big: FiniteTree,
    /// Hull of the critical set alone.
    pub h_crit: FiniteTree,
    /// Where the map has local degree ≥ 2: the branch vertices together
    /// with the parts of the critical hull sticking out of the vertex hull.
    pub ramification: String,
}

const CONV_TOL: f64 = 1e-8;
const ESCAPE: f64 = 1e8;
const ITER_BUDGET: usize = 10_000;

/// Follow a direction label under the vertex's reduced map.  The first
/// `max_exact` steps run in exact coefficient arithmetic so a hole hit is a
/// genuine equality (up to the backend's zero tolerance); afterwards the
/// orbit continues in double precision looking for convergence to an
/// attracting fixed point.
fn classify_direction(rm: &ReducedMap, start: &CPoint, max_exact: usize) -> Result<Freedom> {
    if rm.hole_depth_at(start) > 0 {
        return Ok(Freedom::TotallyFree { hole_step: 0 });
    }
    let mut u = start.clone();
    for k in 1..=max_exact {
        u = rm.core.eval(&u)?;
        if rm.hole_depth_at(&u) > 0 {
            return Ok(Freedom::TotallyFree { hole_step: k });
        }
    }
    // numeric phase: convergence to an attracting fixed point ⇒ captured
    let num = rm.core.num.to_f64_coeffs();
    let den = rm.core.den.to_f64_coeffs();
    let dn = rm.core.num.derivative().to_f64_coeffs();
    let dd = rm.core.den.derivative().to_f64_coeffs();
    let mut z = match &u {
        CPoint::Inf => return Ok(Freedom::Unknown),
        CPoint::Fin(c) => {
            let (re, im) = c.to_f64c();
            num::complex::Complex64::new(re, im)
        }
    };
    let mut still = 0usize;
    for _ in 0..ITER_BUDGET {
        let b = eval_f64(&den, z);
        if b.norm() == 0.0 {
            return Ok(Freedom::Unknown);
        }
        let nz = eval_f64(&num, z) / b;
        if !nz.re.is_finite() || !nz.im.is_finite() || nz.norm() > ESCAPE {
            return Ok(Freedom::Unknown);
        }
        if (nz - z).norm() < CONV_TOL {
            still += 1;
            if still >= 3 {
                // attracting ⟺ |derivative| < 1 at the resting point
                let b2 = b * b;
                if b2.norm() == 0.0 {
                    return Ok(Freedom::Unknown);
                }
                let der = (eval_f64(&dn, nz) * eval_f64(&den, nz)
                    - eval_f64(&num, nz) * eval_f64(&dd, nz))
                    / (eval_f64(&den, nz) * eval_f64(&den, nz));
                return Ok(if der.norm() < 1.0 - 1e-9 {
                    Freedom::Captured
                } else {
                    Freedom::Unknown
                });
            }
        } else {
            still = 0;
        }
        z = nz;
    }
    Ok(Freedom::Unknown)
}

/// Series order deep enough to separate the family's branches: a multiple
/// of the largest valuation scale in play plus slack.
fn working_order(roots: &[Pux]) -> Q {
    let mut m = Q::zero();
    for r in roots {
        if let Ok(Val::Fin(v)) = r.val() {
            let a = if v < Q::zero() { -v } else { v };
            if a > m {
                m = a;
            }
        }
    }
    m * Q::from_integer(4.into()) + Q::from_integer(16.into())
}

/// Locate every critical point of the map — the roots themselves plus the
/// zeros of the second derivative of the root polynomial — project each
/// onto the branch-vertex hull, and classify its direction under the
/// reduced map there.  At each branch vertex the projected multiplicities
/// must account for exactly 2·(local degree) − 2 critical points.
pub fn critical_portrait(
    map: &LRat,
    roots: &[Pux],
    tree: &FixedTreeReport,
) -> Result<CriticalPortrait> {
    let be = map.backend().clone();
    let p = LPoly::from_roots(roots, &be);
    let pdd = p.derivative().derivative();
    let base = working_order(roots);
    let mut free = None;
    let mut last_err = None;
    for mult in [1i64, 2, 4] {
        let order = &base * Q::from_integer(mult.into());
        match pdd.puiseux_roots(&order) {
            Ok(b) => {
                free = Some(b);
                break;
            }
            Err(e) if e.is_precision() => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    let free = match free {
        Some(b) => b,
        None => return Err(last_err.unwrap()),
    };

    let vpts: Vec<BPoint> = tree.v.iter().map(|(p, _)| p.clone()).collect();
    let find_vertex = |w: &BPoint| -> Result<BPoint> {
        for (vp, _) in &tree.v {
            if vp.eq(w)? {
                return Ok(vp.clone());
            }
        }
        Err(err::internal(
            "a critical point projects to the vertex hull away from every branch vertex",
        ))
    };

    // reduced maps at the branch vertices, computed once
    let mut cores: Vec<ReducedMap> = Vec::new();
    for (vp, _) in &tree.v {
        cores.push(map.reduction_at(vp)?);
    }
    let vertex_index = |w: &BPoint| -> Result<usize> {
        for (i, (vp, _)) in tree.v.iter().enumerate() {
            if vp.eq(w)? {
                return Ok(i);
            }
        }
        Err(err::internal("visible vertex missing from the vertex list"))
    };

    let mut branches: Vec<CriticalBranch> = Vec::new();
    for r in roots {
        let visible = find_vertex(&visible_point(&vpts, false, &BPoint::type1(r.clone()))?)?;
        let label = visible.direction_of(&BPoint::type1(r.clone()))?;
        branches.push(CriticalBranch {
            series: r.clone(),
            mult: 1,
            is_root: true,
            visible,
            label,
            freedom: Freedom::Captured,
        });
    }
    for rb in &free {
        let visible = find_vertex(&visible_point(
            &vpts,
            false,
            &BPoint::type1(rb.series.clone()),
        )?)?;
        let label = visible.direction_of(&BPoint::type1(rb.series.clone()))?;
        let start = match &label {
            Dir::Res(u) => CPoint::Fin(u.clone()),
            Dir::Inf => CPoint::Inf,
        };
        let idx = vertex_index(&visible)?;
        let freedom = classify_direction(&cores[idx], &start, map.d + 2)?;
        branches.push(CriticalBranch {
            series: rb.series.clone(),
            mult: rb.mult,
            is_root: false,
            visible,
            label,
            freedom,
        });
    }

    // per-vertex count: critical multiplicity visible there is 2·deg − 2
    for (vp, deg) in &tree.v {
        let mut seen = 0usize;
        for b in &branches {
            if b.visible.eq(vp)? {
                seen += b.mult;
            }
        }
        if seen != 2 * deg - 2 {
            return Err(err::internal(format!(
                "{seen} critical points visible at a branch vertex of local degree {deg}, expected {}",
                2 * deg - 2
            )));
        }
    }

    // hulls of the critical set (deduplicated: a root can be critical twice
    // over, but it enters the hull once)
    let mut crit_pts: Vec<BPoint> = Vec::new();
    let mut keys: Vec<String> = Vec::new();
    for b in &branches {
        let k = b.series.canon_key();
        if !keys.contains(&k) {
            keys.push(k);
            crit_pts.push(BPoint::type1(b.series.clone()));
        }
    }
    let h_crit = FiniteTree::build(&crit_pts)?;
    let mut crit_inf = crit_pts.clone();
    crit_inf.push(BPoint::inf());
    let h_big = FiniteTree::build(&crit_inf)?;

    let n_free = branches.iter().filter(|b| !b.is_root).count();
    let ramification = format!(
        "local degree ≥ 2 exactly on the {} branch vertices and on the critical hull's \
         overhang outside the vertex hull ({} free critical branches)",
        tree.v.len(),
        n_free
    );

    Ok(CriticalPortrait {
        branches,
        h_big,
        h_crit,
        ramification,
    })
}

/// One conjugacy class the family collapses into at period one: a branch
/// vertex, the moving frame that centers it, and the degree-d limit with
/// its holes.  Present for every branch vertex.
pub struct PeriodOneClass {
    pub vertex: BPoint,
    pub degree: usize,
    pub frame_center: Pux,
    pub frame_rho: Q,
    /// Residue labels of the roots that stay visible in this frame, with
    /// multiplicities; the remaining roots escape and surface as a hole
    /// at ∞.
    pub labels: Vec<(Coeff, usize)>,
    pub limit: ReducedMap,
}

fn cpoly_proportional(p: &CPoly, q: &CPoly) -> bool {
    match (p.lead(), q.lead()) {
        (Some(lp), Some(lq)) => p.scale(lq).sub(&q.scale(lp)).is_zero(),
        _ => p.is_zero() && q.is_zero(),
    }
}

/// Structural equality of reduction patterns: same total degree, cores
/// equal as maps (coordinate pairs are only defined up to a scalar), holes
/// equal as a multiset.
pub fn reduced_maps_match(a: &ReducedMap, b: &ReducedMap) -> Result<bool> {
    if a.d_total != b.d_total || a.core.degree() != b.core.degree() {
        return Ok(false);
    }
    if !a.core.eq_projective(&b.core) {
        return Ok(false);
    }
    if a.holes.len() != b.holes.len() {
        return Ok(false);
    }
    let mut used = vec![false; b.holes.len()];
    'outer: for (h, m) in &a.holes {
        for (j, (h2, m2)) in b.holes.iter().enumerate() {
            if !used[j] && m == m2 && h.eq(h2) {
                used[j] = true;
                continue 'outer;
            }
        }
        return Ok(false);
    }
    match (&a.unresolved, &b.unresolved) {
        (None, None) => Ok(true),
        (Some((p, dp)), Some((q_, dq))) => Ok(dp == dq && cpoly_proportional(p, q_)),
        _ => Ok(false),
    }
}

/// Every branch vertex carries a period-one class.  The limit is computed
/// two independent ways — reducing the frame-conjugated map, and building
/// the degenerate Newton pattern straight from the residue labels of the
/// visible roots — and the two must agree exactly.
pub fn period_one_rescalings(
    map: &LRat,
    roots: &[Pux],
    tree: &FixedTreeReport,
) -> Result<Vec<PeriodOneClass>> {
    let mut out = Vec::new();
    for (vp, deg) in &tree.v {
        let a = vp
            .center()
            .ok_or_else(|| err::internal("branch vertex without a center"))?
            .clone();
        let rho = vp
            .rad()
            .ok_or_else(|| err::internal("branch vertex without a radius"))?
            .clone();
        let limit = map.reduction_at(vp)?;
        if limit.core.degree() != *deg {
            return Err(err::internal(format!(
                "class limit has core degree {}, vertex has local degree {deg}",
                limit.core.degree()
            )));
        }

        let mut labels: Vec<(Coeff, usize)> = Vec::new();
        for r in roots {
            let diff = r.sub(&a);
            let inside = match diff.val()? {
                Val::Inf => true,
                Val::Fin(v) => v >= rho,
            };
            if !inside {
                continue;
            }
            let u = diff.coeff_at(&rho)?;
            let mut merged = false;
            for (l, m) in labels.iter_mut() {
                if l.eq_c(&u) {
                    *m += 1;
                    merged = true;
                    break;
                }
            }
            if !merged {
                labels.push((u, 1));
            }
        }
        let rebuilt = ReducedMap::newton_from_labels(&labels, map.d)?;
        if !reduced_maps_match(&limit, &rebuilt)? {
            return Err(err::internal(
                "frame reduction and label construction disagree on a class limit",
            ));
        }

        out.push(PeriodOneClass {
            vertex: vp.clone(),
            degree: *deg,
            frame_center: a,
            frame_rho: rho,
            labels,
            limit,
        });
    }
    if out.len() > map.d - 1 {
        return Err(err::internal(format!(
            "{} period-one classes exceed the degree bound {}",
            out.len(),
            map.d - 1
        )));
    }
    Ok(out)
}

/// Knobs for the higher-period search.
pub struct SearchConfig {
    /// Longest return time considered.
    pub max_period: usize,
    /// Hard cap on forward evaluations per critical orbit.
    pub orbit_budget: usize,
    /// How many successive pull-backs may be taken while waiting for the
    /// contraction ratio to stabilize.
    pub pullback_levels: usize,
    /// Series order used for orbit evaluation.
    pub order: Q,
}

impl SearchConfig {
    pub fn for_family(d: usize, roots: &[Pux]) -> SearchConfig {
        SearchConfig {
            max_period: d,
            orbit_budget: 64,
            pullback_levels: 6,
            order: working_order(roots),
        }
    }
}

/// A repelling cycle of balls with a nonlinear limit: the period, the ball
/// the cycle runs through, the frame centering it, and the reduction of the
/// frame-conjugated q-th iterate.
pub struct RescalingRecord {
    pub period: usize,
    /// The free critical point whose orbit found the cycle.
    pub critical: Pux,
    pub xi_inf: BPoint,
    pub frame_center: Pux,
    pub frame_rho: Q,
    /// Path distance from the Gauss point to the cycle ball.
    pub dist_from_gauss: Q,
    /// Local degree of the q-th iterate along the cycle.
    pub expansion: usize,
    pub limit: ReducedMap,
    /// True when the cycle closed exactly under q push-forwards and the
    /// conjugated iterate reduced to the expected degree.
    pub verified: bool,
}

pub struct SearchOutcome {
    pub records: Vec<RescalingRecord>,
    pub notes: Vec<String>,
}

/// All preimages of `target` under the q-th iterate, with the local degree
/// of the iterate at each, by chaining ball fibers.  `prune` gives the
/// forward orbit x₁, …, x_{q−1} of a point the wanted chain must shadow: at
/// intermediate level j only fiber points whose ball contains x_{q−j} are
/// kept.  Pass None to keep everything.
fn chained_fiber(
    map: &LRat,
    target: &BPoint,
    q: usize,
    prune: Option<&[Pux]>,
    sampler: &mut Sampler,
) -> Result<Vec<(BPoint, usize)>> {
    let mut level: Vec<(BPoint, usize)> = vec![(target.clone(), 1)];
    for j in 1..=q {
        let mut next: Vec<(BPoint, usize)> = Vec::new();
        for (p, mdeg) in &level {
            for (z, dz) in map.type2_fiber(p, sampler)? {
                next.push((z, dz * mdeg));
            }
        }
        if j < q {
            if let Some(orbit) = prune {
                // the true chain's level-j point is the (q−j)-th forward
                // image of the cycle ball, and that ball contains the
                // shadowing orbit point
                let probe = BPoint::type1(orbit[q - j - 1].clone());
                let mut kept = Vec::new();
                for (z, dz) in next {
                    if probe.le(&z)? {
                        kept.push((z, dz));
                    }
                }
                next = kept;
            }
        }
        level = next;
    }
    Ok(level)
}

/// The unique point of the chained fiber lying strictly between `bot` and
/// `top` on the tree, with its chain degree.
fn fiber_point_on_segment(
    map: &LRat,
    target: &BPoint,
    q: usize,
    bot: &BPoint,
    top: &BPoint,
    orbit: &[Pux],
    sampler: &mut Sampler,
) -> Result<(BPoint, usize)> {
    for prune in [Some(orbit), None] {
        let fiber = chained_fiber(map, target, q, prune, sampler)?;
        let mut hits: Vec<(BPoint, usize)> = Vec::new();
        for (z, dz) in fiber {
            if strictly_between(&z, bot, top)? {
                let mut dup = false;
                for (h, _) in &hits {
                    if h.eq(&z)? {
                        dup = true;
                        break;
                    }
                }
                if !dup {
                    hits.push((z, dz));
                }
            }
        }
        match hits.len() {
            1 => return Ok(hits.pop().unwrap()),
            0 if prune.is_some() => continue, // pruning was too aggressive; retry in full
            n => {
                return Err(err::internal(format!(
                    "{n} pulled-back vertices on the landing segment, expected exactly one"
                )))
            }
        }
    }
    Err(err::internal(
        "no pulled-back vertex on the landing segment",
    ))
}

enum Candidate {
    Record(Box<RescalingRecord>),
    Skip(String),
}

/// Search for repelling ball cycles seeded by one critical orbit: the ball
/// direction leaves its vertex through a hole of the reduced map at step ℓ,
/// the point orbit returns to the same directional ball at step q > ℓ, and
/// the cycle ball is the limit of pulling the vertex back along the landing
/// segment.
#[allow(clippy::too_many_arguments)]
fn build_record(
    map: &LRat,
    w: &BPoint,
    critical: &Pux,
    orbit: &[Pux],
    q: usize,
    cfg: &SearchConfig,
    sampler: &mut Sampler,
) -> Result<Candidate> {
    let c_pt = BPoint::type1(critical.clone());
    let xq_pt = BPoint::type1(orbit[q - 1].clone());
    let eta = c_pt.join(&xq_pt)?;
    if !eta.is_type2() {
        return Ok(Candidate::Skip(
            "critical point is exactly periodic; no ball cycle to extract".into(),
        ));
    }

    let (xi1, k1) = fiber_point_on_segment(map, w, q, &eta, w, orbit, sampler)?;
    if k1 < 2 {
        return Ok(Candidate::Skip(
            "landing segment pulls back with degree one; the cycle there is not repelling".into(),
        ));
    }
    let r1 = w.dist(&xi1)?.fin()?.clone();

    // pull the vertex back down the segment until the step ratio goes
    // geometric; with constant expansion K the very first step already
    // satisfies δ₁ = r₁/K and the limit distance is r₁·K/(K−1)
    let mut dists: Vec<Q> = vec![r1.clone()];
    let mut cur = xi1.clone();
    let mut rho_inf: Option<Q> = None;
    for _ in 1..cfg.pullback_levels {
        let (nxt, _) = fiber_point_on_segment(map, &cur, q, &eta, &cur, orbit, sampler)?;
        let rn = w.dist(&nxt)?.fin()?.clone();
        dists.push(rn);
        cur = nxt;

        let m = dists.len();
        let d_new = &dists[m - 1] - &dists[m - 2];
        let d_prev = if m >= 3 {
            &dists[m - 2] - &dists[m - 3]
        } else {
            dists[0].clone()
        };
        if d_prev.is_zero() || d_new.is_zero() || d_new >= d_prev {
            return Ok(Candidate::Skip(
                "pull-back steps fail to contract; no finite cycle ball on the segment".into(),
            ));
        }
        let ratio = &d_new / &d_prev;
        let kq = Q::from_integer((k1 as i64).into());
        let matches_k = (&ratio * &kq) == Q::one();
        let stabilized = if m >= 3 {
            let d_prev2 = if m >= 4 {
                &dists[m - 3] - &dists[m - 4]
            } else {
                dists[0].clone()
            };
            !d_prev2.is_zero() && &d_prev * &d_prev == &d_new * &d_prev2
        } else {
            false
        };
        if matches_k || stabilized {
            let tail = &d_new * &ratio / (Q::one() - &ratio);
            rho_inf = Some(dists[m - 1].clone() + tail);
            break;
        }
    }
    let Some(depth) = rho_inf else {
        return Ok(Candidate::Skip(
            "pull-back ratios did not stabilize within the level budget".into(),
        ));
    };
    let w_rad = w.rad().unwrap().clone();
    let rho = &w_rad + &depth;

    let xi_inf = BPoint::type2(eta.center().unwrap(), &rho)?;
    // the cycle must close exactly in q steps, not fewer
    let mut p = xi_inf.clone();
    for j in 1..=q {
        p = map.push_forward(&p, sampler)?;
        if j < q && p.eq(&xi_inf)? {
            return Err(err::internal(
                "cycle ball closed before the detected period",
            ));
        }
    }
    if !p.eq(&xi_inf)? {
        return Ok(Candidate::Skip(
            "extrapolated ball is not periodic; candidate rejected".into(),
        ));
    }

    let center = xi_inf.center().unwrap().clone();
    let conj = map.conjugate_frame(&rho, &center)?;
    let mut iter = conj.clone();
    for _ in 1..q {
        iter = conj.compose(&iter)?;
    }
    let limit = iter.reduction_at(&BPoint::gauss(map.backend()))?;
    if limit.core.degree() != k1 {
        return Err(err::internal(format!(
            "conjugated iterate reduces to degree {}, cycle expansion says {k1}",
            limit.core.degree()
        )));
    }
    let dist_from_gauss = BPoint::gauss(map.backend()).dist(&xi_inf)?.fin()?.clone();

    Ok(Candidate::Record(Box::new(RescalingRecord {
        period: q,
        critical: critical.clone(),
        xi_inf,
        frame_center: center,
        frame_rho: rho,
        dist_from_gauss,
        expansion: k1,
        limit,
        verified: true,
    })))
}

/// Follow every free critical direction that is not captured.  A record
/// needs the reduced orbit to hit a hole at some step ℓ ≥ 0 and the point
/// orbit to re-enter the critical's own directional ball at a later step q;
/// the repelling ball cycle is then pinned down by exact pull-backs and
/// certified by pushing it forward around the cycle.
pub fn higher_period_search(
    map: &LRat,
    tree: &FixedTreeReport,
    portrait: &CriticalPortrait,
    cfg: &SearchConfig,
    sampler: &mut Sampler,
) -> Result<SearchOutcome> {
    let mut records: Vec<RescalingRecord> = Vec::new();
    let mut notes: Vec<String> = Vec::new();

    for br in &portrait.branches {
        if br.is_root || matches!(br.freedom, Freedom::Captured) {
            continue;
        }
        let w = &br.visible;
        let dir = &br.label;
        if matches!(dir, Dir::Inf) {
            notes.push(
                "a free critical direction points to ∞ at its vertex; not followed".into(),
            );
            continue;
        }
        let rm = map.reduction_at(w)?;
        let start = match dir {
            Dir::Res(u) => CPoint::Fin(u.clone()),
            Dir::Inf => unreachable!(),
        };

        // first hole hit of the reduced orbit, the step the ball breaks free
        let mut ell: Option<usize> = None;
        if rm.hole_depth_at(&start) > 0 {
            ell = Some(0);
        } else {
            let mut u = start.clone();
            for k in 1..cfg.max_period {
                u = rm.core.eval(&u)?;
                if rm.hole_depth_at(&u) > 0 {
                    ell = Some(k);
                    break;
                }
            }
        }
        let Some(ell) = ell else { continue };

        // point orbit of the critical itself, watching for the first
        // re-entry into its own directional ball
        let mut orbit: Vec<Pux> = Vec::new();
        let mut x = br.series.clone();
        let mut found: Option<usize> = None;
        let cap = cfg.max_period.min(cfg.orbit_budget);
        for k in 1..=cap {
            let Some(nx) = map.eval_type1(&x, &cfg.order)? else {
                notes.push("critical orbit ran into a pole exactly; abandoned".into());
                break;
            };
            x = nx;
            orbit.push(x.clone());
            if k <= ell {
                continue;
            }
            let xp = BPoint::type1(x.clone());
            if xp.le(w)? && w.direction_of(&xp)?.eq(dir) {
                found = Some(k);
                break;
            }
        }
        let Some(q) = found else { continue };

        match build_record(map, w, &br.series, &orbit, q, cfg, sampler)? {
            Candidate::Skip(msg) => notes.push(msg),
            Candidate::Record(rec) => {
                let mut dup = false;
                for r in &records {
                    if r.xi_inf.eq(&rec.xi_inf)? {
                        dup = true;
                        break;
                    }
                }
                if !dup {
                    records.push(*rec);
                }
            }
        }
    }

    let allowed = map.d.saturating_sub(3);
    if records.len() > allowed {
        return Err(err::internal(format!(
            "{} ball cycles found, degree {} admits at most {allowed}",
            records.len(),
            map.d
        )));
    }
    let _ = tree;
    Ok(SearchOutcome { records, notes })
}

/// Stability bookkeeping for a reduction pattern: hole depths against the
/// half-degree bars, whether the core is a polynomial, and its degree
/// against the doubling cap for higher-period limits of a degree-d family.
pub struct SemistabilityReport {
    pub d_total: usize,
    pub core_degree: usize,
    /// The core's full preimage of ∞ is {∞}.
    pub is_polynomial: bool,
    /// 2^(d−3): the cap on the core degree of any higher-period limit.
    pub degree_bound: usize,
    pub within_degree_bound: bool,
    pub max_hole_depth: usize,
    /// Every hole depth ≤ (D+1)/2 and no fixed hole of depth ≥ D/2.
    pub semistable: bool,
    pub violations: Vec<String>,
}

pub fn bounds_and_semistability(limit: &ReducedMap, d: usize) -> Result<SemistabilityReport> {
    if limit.unresolved.is_some() {
        return Err(err::unrepresentable(
            "hole locations are not representable exactly; use the float backend",
        ));
    }
    let dt = limit.d_total;
    let mut violations = Vec::new();
    let mut max_depth = 0usize;
    for (h, s) in &limit.holes {
        max_depth = max_depth.max(*s);
        if 2 * s > dt + 1 {
            violations.push(format!(
                "hole of depth {s} exceeds the semistable bar ({dt}+1)/2"
            ));
        } else if 2 * s >= dt {
            let img = limit.core.eval(h)?;
            if img.eq(h) {
                violations.push(format!("fixed hole of depth {s} ≥ {dt}/2"));
            }
        }
    }
    let e = limit.core.degree();
    let is_polynomial = e >= 1 && limit.core.den.degree() == Some(0);
    let degree_bound = 1usize << d.saturating_sub(3);
    Ok(SemistabilityReport {
        d_total: dt,
        core_degree: e,
        is_polynomial,
        degree_bound,
        within_degree_bound: e <= degree_bound,
        max_hole_depth: max_depth,
        semistable: violations.is_empty(),
        violations,
    })
}
