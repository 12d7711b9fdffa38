//! Points and finite subtrees of the Berkovich projective line over the
//! Puiseux field.
//!
//! A type II point is the closed ball ξ_{a,ρ} = {x : val(x − a) ≥ ρ} with
//! rational ρ; its canonical form truncates the center below ρ (terms at
//! exponent ≥ ρ do not move the ball).  Type I points are classical series
//! points, plus ∞.  Type III/IV points cannot be represented — every radius
//! is rational and every center a finite series — which is exactly the class
//! of points the algorithms here produce.
//!
//! All geometry predicates answer exactly or fail with a precision error;
//! they never guess past a truncation bound.

use crate::coeff::{Backend, Coeff};
use crate::err::{self, Result};
use crate::puiseux::Pux;
use crate::qq::{q_str, Q, Val};
use std::fmt;

/// A tangent direction at a type II point: one per residue class, plus the
/// direction toward larger balls (and ultimately ∞).
#[derive(Clone, Debug)]
pub enum Dir {
    Inf,
    Res(Coeff),
}

impl PartialEq for Dir {
    fn eq(&self, o: &Dir) -> bool {
        match (self, o) {
            (Dir::Inf, Dir::Inf) => true,
            (Dir::Res(a), Dir::Res(b)) => a.eq_c(b),
            _ => false,
        }
    }
}

impl Dir {

    pub fn canon(&self) -> String {
        match self {
            Dir::Inf => "inf".into(),
            Dir::Res(c) => c.canon(),
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dir::Inf => write!(f, "∞"),
            Dir::Res(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum BPoint {
    /// Type II: the closed ball with center `center` and radius valuation
    /// `rad`.  Canonical: center carries only exponents < rad and is exact.
    II { center: Pux, rad: Q },
    /// A finite classical point, possibly known only up to truncation.
    I { pt: Pux },
    /// The point at infinity.
    Inf,
}

impl BPoint {
    pub fn gauss(backend: &Backend) -> BPoint {
        BPoint::II {
            center: Pux::zero(backend),
            rad: Q::from_integer(0.into()),
        }
    }

    /// Canonicalizing type II constructor.  Errors if the center is not
    /// known below the radius (the ball would not be determined).
    pub fn type2(center: &Pux, rad: &Q) -> Result<BPoint> {
        if let Val::Fin(t) = center.trunc() {
            if t < rad {
                return Err(err::precision(format!(
                    "ball of radius {} needs its center below t^{}, center known only to O(t^{})",
                    q_str(rad),
                    q_str(rad),
                    q_str(t)
                )));
            }
        }
        let kept: Vec<_> = center
            .terms()
            .iter()
            .filter(|(e, _)| e < rad)
            .cloned()
            .collect();
        Ok(BPoint::II {
            center: Pux::new(kept, Val::Inf, center.backend().clone()),
            rad: rad.clone(),
        })
    }

    pub fn type1(pt: Pux) -> BPoint {
        BPoint::I { pt }
    }

    pub fn inf() -> BPoint {
        BPoint::Inf
    }

    pub fn is_type2(&self) -> bool {
        matches!(self, BPoint::II { .. })
    }

    pub fn rad(&self) -> Option<&Q> {
        match self {
            BPoint::II { rad, .. } => Some(rad),
            _ => None,
        }
    }

    pub fn center(&self) -> Option<&Pux> {
        match self {
            BPoint::II { center, .. } => Some(center),
            BPoint::I { pt } => Some(pt),
            BPoint::Inf => None,
        }
    }

    /// Radius as an extended rational: Inf for type I points.
    fn rad_val(&self) -> Val {
        match self {
            BPoint::II { rad, .. } => Val::Fin(rad.clone()),
            _ => Val::Inf,
        }
    }

    pub fn eq(&self, o: &BPoint) -> Result<bool> {
        match (self, o) {
            (BPoint::Inf, BPoint::Inf) => Ok(true),
            (BPoint::Inf, _) | (_, BPoint::Inf) => Ok(false),
            (BPoint::II { center: a, rad: ra }, BPoint::II { center: b, rad: rb }) => {
                if ra != rb {
                    return Ok(false);
                }
                // same ball iff the centers agree below the radius
                let d = a.sub(b);
                match d.terms().first() {
                    Some((e, _)) => Ok(e >= ra),
                    None => {
                        if *d.trunc() >= Val::Fin(ra.clone()) {
                            Ok(true)
                        } else {
                            Err(err::precision("ball equality undecided at truncation"))
                        }
                    }
                }
            }
            (BPoint::I { pt: a }, BPoint::I { pt: b }) => {
                let d = a.sub(b);
                if d.is_known_zero() {
                    Ok(true)
                } else if d.terms().is_empty() {
                    Err(err::precision("point equality undecided at truncation"))
                } else {
                    Ok(false)
                }
            }
            _ => Ok(false),
        }
    }

    /// The smallest ball containing both points (their join toward ∞).
    pub fn join(&self, o: &BPoint) -> Result<BPoint> {
        match (self, o) {
            (BPoint::Inf, _) | (_, BPoint::Inf) => Ok(BPoint::Inf),
            _ => {
                let a = self.center().unwrap();
                let b = o.center().unwrap();
                let cap = self.rad_val().min_with(o.rad_val());
                let d = a.sub(b);
                let j = match d.terms().first() {
                    Some((e, _)) => Val::Fin(e.clone()).min_with(cap),
                    None => {
                        if *d.trunc() >= cap {
                            cap
                        } else {
                            return Err(err::precision(
                                "join radius undecided: centers agree to the truncation bound",
                            ));
                        }
                    }
                };
                match j {
                    Val::Inf => Ok(self.clone()), // two equal type I points
                    Val::Fin(r) => BPoint::type2(a, &r),
                }
            }
        }
    }

    /// Containment of balls: self ≤ o iff ball(self) ⊆ ball(o).
    pub fn le(&self, o: &BPoint) -> Result<bool> {
        match (self, o) {
            (BPoint::Inf, BPoint::Inf) => Ok(true),
            (BPoint::Inf, _) | (_, BPoint::Inf) => Ok(false),
            (_, BPoint::I { .. }) => self.eq(o),
            (x, BPoint::II { center: b, rad: rb }) => {
                if x.rad_val() < Val::Fin(rb.clone()) {
                    return Ok(false);
                }
                let d = x.center().unwrap().sub(b);
                match d.terms().first() {
                    Some((e, _)) => Ok(e >= rb),
                    None => {
                        if *d.trunc() >= Val::Fin(rb.clone()) {
                            Ok(true)
                        } else {
                            Err(err::precision("containment undecided at truncation"))
                        }
                    }
                }
            }
        }
    }

    /// Path distance in the tree metric.  Finite between type II points,
    /// infinite for distinct points when either end is type I or ∞.
    pub fn dist(&self, o: &BPoint) -> Result<Val> {
        if self.eq(o)? {
            return Ok(Val::zero());
        }
        match (self, o) {
            (BPoint::II { rad: ra, .. }, BPoint::II { rad: rb, .. }) => {
                let j = self.join(o)?;
                let rj = j.rad().ok_or_else(|| err::internal("join of balls not a ball"))?;
                Ok(Val::Fin((ra - rj) + (rb - rj)))
            }
            _ => Ok(Val::Inf),
        }
    }

    /// The tangent direction at `self` (a type II point) toward `target`.
    pub fn direction_of(&self, target: &BPoint) -> Result<Dir> {
        let (a, rad) = match self {
            BPoint::II { center, rad } => (center, rad),
            _ => return Err(err::input("directions exist only at type II points")),
        };
        if self.eq(target)? {
            return Err(err::input("direction of a point from itself"));
        }
        match target {
            BPoint::Inf => Ok(Dir::Inf),
            _ => {
                if target.le(self)? {
                    let d = target.center().unwrap().sub(a);
                    Ok(Dir::Res(d.coeff_at(rad)?))
                } else {
                    Ok(Dir::Inf)
                }
            }
        }
    }

    /// Deterministic key for sorting and display; not an equality oracle
    /// under the float backend (use `eq`).
    pub fn canon_key(&self) -> String {
        match self {
            BPoint::Inf => "~inf".into(),
            BPoint::I { pt } => format!("I|{}", pt.canon_key()),
            BPoint::II { center, rad } => format!("B|{}|{}", q_str(rad), center.canon_key()),
        }
    }
}

impl fmt::Display for BPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BPoint::Inf => write!(f, "∞"),
            BPoint::I { pt } => write!(f, "pt({pt})"),
            BPoint::II { center, rad } => write!(f, "ξ({center}; {})", q_str(rad)),
        }
    }
}

/// Where a point projects onto a finite tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Loc {
    Vertex(usize),
    /// Interior of the edge from parent(bot) down to bot, at this radius.
    EdgeInterior { bot: usize, rad: Q },
    /// On the ray from the root toward ∞ (only when the tree carries one).
    RayInterior { rad: Q },
    Inf,
}

/// Where a point sits relative to a finite tree: on it, or in which
/// complementary component.
#[derive(Clone, Debug, PartialEq)]
pub enum Comp {
    AtVertex(usize),
    OnEdge { bot: usize, rad: Q },
    OnRay { rad: Q },
    AtInf,
    /// Strictly inside the component hanging at a vertex in an off-tree
    /// direction (`Dir::Inf` means the component toward ∞).
    BallAt { vert: usize, dir: Dir },
    /// Strictly inside the annulus component hanging off the open edge
    /// above `bot`.
    OffEdge { bot: usize, rad: Q },
    /// Hanging off the interior of the ∞-ray.
    OffRay { rad: Q },
}

/// The convex hull of a finite point set: a finite tree of type II branch
/// vertices with the input points attached as ends.
pub struct FiniteTree {
    pub verts: Vec<BPoint>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// Input points that are not vertices, attached at their deepest
    /// containing vertex with the outgoing direction recorded.
    pub ends: Vec<(BPoint, usize, Dir)>,
    pub has_inf: bool,
    pub root: usize,
}

impl FiniteTree {
    /// Build the hull of `points`.  ∞ may be included; all joins the input
    /// generates become vertices.
    pub fn build(points: &[BPoint]) -> Result<FiniteTree> {
        let mut has_inf = false;
        let mut finite: Vec<BPoint> = Vec::new();
        for p in points {
            match p {
                BPoint::Inf => has_inf = true,
                _ => finite.push(p.clone()),
            }
        }
        // candidate vertices: type II inputs and all pairwise joins
        let mut cand: Vec<BPoint> = finite.iter().filter(|p| p.is_type2()).cloned().collect();
        for i in 0..finite.len() {
            for j in (i + 1)..finite.len() {
                let jn = finite[i].join(&finite[j])?;
                if jn.is_type2() {
                    cand.push(jn);
                }
            }
        }
        let mut verts: Vec<BPoint> = Vec::new();
        'outer: for c in cand {
            for v in &verts {
                if v.eq(&c)? {
                    continue 'outer;
                }
            }
            verts.push(c);
        }
        if verts.is_empty() {
            return Err(err::input(
                "hull has no branch vertices; need at least two distinct finite points or a ball",
            ));
        }
        verts.sort_by(|a, b| {
            let (ra, rb) = (a.rad().unwrap(), b.rad().unwrap());
            ra.cmp(rb).then_with(|| a.canon_key().cmp(&b.canon_key()))
        });

        let n = verts.len();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        for i in 0..n {
            let mut best: Option<usize> = None;
            for j in 0..n {
                if i == j {
                    continue;
                }
                if verts[i].le(&verts[j])? && !verts[i].eq(&verts[j])? {
                    best = match best {
                        None => Some(j),
                        Some(k) => {
                            if verts[j].rad().unwrap() > verts[k].rad().unwrap() {
                                Some(j)
                            } else {
                                Some(k)
                            }
                        }
                    };
                }
            }
            parent[i] = best;
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(err::internal(format!(
                "hull is not connected: {} top vertices",
                roots.len()
            )));
        }
        let root = roots[0];

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            if let Some(p) = parent[i] {
                children[p].push(i);
            }
        }

        let mut ends: Vec<(BPoint, usize, Dir)> = Vec::new();
        for p in &finite {
            let mut is_vertex = false;
            for v in &verts {
                if v.eq(p)? {
                    is_vertex = true;
                    break;
                }
            }
            if is_vertex {
                continue;
            }
            let mut deepest: Option<usize> = None;
            for (i, v) in verts.iter().enumerate() {
                if p.le(v)? {
                    deepest = match deepest {
                        None => Some(i),
                        Some(k) => {
                            if verts[i].rad().unwrap() > verts[k].rad().unwrap() {
                                Some(i)
                            } else {
                                Some(k)
                            }
                        }
                    };
                }
            }
            let at = deepest
                .ok_or_else(|| err::internal("input point outside the hull's top ball"))?;
            let dir = verts[at].direction_of(p)?;
            // join-closure guarantees ends and edges occupy distinct directions
            for c in &children[at] {
                if verts[at].direction_of(&verts[*c])?.eq(&dir) {
                    return Err(err::internal("end shares a direction with a tree edge"));
                }
            }
            for (_, v2, d2) in &ends {
                if *v2 == at && d2.eq(&dir) {
                    return Err(err::internal("two ends share a direction"));
                }
            }
            ends.push((p.clone(), at, dir));
        }

        Ok(FiniteTree {
            verts,
            parent,
            children,
            ends,
            has_inf,
            root,
        })
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn find_vertex(&self, p: &BPoint) -> Result<Option<usize>> {
        for (i, v) in self.verts.iter().enumerate() {
            if v.eq(p)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Number of tree directions at a vertex: edges, attached ends, and the
    /// ∞-ray at the root when present.
    pub fn valence(&self, i: usize) -> usize {
        let mut v = self.children[i].len();
        if self.parent[i].is_some() {
            v += 1;
        }
        v += self.ends.iter().filter(|(_, at, _)| *at == i).count();
        if i == self.root && self.has_inf {
            v += 1;
        }
        v
    }

    /// Projection of a point onto the tree (the closest tree point).
    pub fn project(&self, p: &BPoint) -> Result<Loc> {
        if matches!(p, BPoint::Inf) {
            return Ok(if self.has_inf {
                Loc::Inf
            } else {
                Loc::Vertex(self.root)
            });
        }
        // the deepest join against the vertex set lies on the tree (or its
        // continuation toward ∞): the vertex set is join-closed
        let mut j: Option<BPoint> = None;
        for v in &self.verts {
            let cand = p.join(v)?;
            j = match j {
                None => Some(cand),
                Some(cur) => {
                    if cand.rad().unwrap() > cur.rad().unwrap() {
                        Some(cand)
                    } else {
                        Some(cur)
                    }
                }
            };
        }
        let j = j.unwrap();
        let rj = j.rad().unwrap().clone();
        let root_rad = self.verts[self.root].rad().unwrap();
        if rj < *root_rad {
            return Ok(if self.has_inf {
                Loc::RayInterior { rad: rj }
            } else {
                Loc::Vertex(self.root)
            });
        }
        if let Some(i) = self.find_vertex(&j)? {
            return Ok(Loc::Vertex(i));
        }
        // j is interior to exactly one edge: find the unique top vertex of
        // the subtree under j
        let mut bot: Option<usize> = None;
        for (i, v) in self.verts.iter().enumerate() {
            if v.le(&j)? {
                bot = match bot {
                    None => Some(i),
                    Some(k) => {
                        if self.verts[i].rad().unwrap() < self.verts[k].rad().unwrap() {
                            Some(i)
                        } else {
                            Some(k)
                        }
                    }
                };
            }
        }
        let bot = bot.ok_or_else(|| err::internal("edge point with empty subtree"))?;
        match self.parent[bot] {
            Some(u) => {
                if self.verts[u].rad().unwrap() >= &rj {
                    return Err(err::internal("projection escaped its edge"));
                }
            }
            None => return Err(err::internal("projection above the root after radius check")),
        }
        Ok(Loc::EdgeInterior { bot, rad: rj })
    }

    /// Classify where `p` sits: on the tree, or inside which complementary
    /// component.
    pub fn component_of(&self, p: &BPoint) -> Result<Comp> {
        if matches!(p, BPoint::Inf) {
            return Ok(if self.has_inf {
                Comp::AtInf
            } else {
                Comp::BallAt {
                    vert: self.root,
                    dir: Dir::Inf,
                }
            });
        }
        match self.project(p)? {
            Loc::Inf => Ok(Comp::AtInf),
            Loc::Vertex(i) => {
                if self.verts[i].eq(p)? {
                    Ok(Comp::AtVertex(i))
                } else {
                    Ok(Comp::BallAt {
                        vert: i,
                        dir: self.verts[i].direction_of(p)?,
                    })
                }
            }
            Loc::EdgeInterior { bot, rad } => {
                let j = BPoint::type2(p.center().unwrap(), &rad)?;
                if j.eq(p)? {
                    Ok(Comp::OnEdge { bot, rad })
                } else {
                    Ok(Comp::OffEdge { bot, rad })
                }
            }
            Loc::RayInterior { rad } => {
                let j = BPoint::type2(p.center().unwrap(), &rad)?;
                if j.eq(p)? {
                    Ok(Comp::OnRay { rad })
                } else {
                    Ok(Comp::OffRay { rad })
                }
            }
        }
    }

    /// Graphviz rendering: solid tree edges with lengths, dashed ends.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph tree {\n  rankdir=BT;\n  node [shape=ellipse];\n");
        for (i, v) in self.verts.iter().enumerate() {
            s.push_str(&format!("  v{i} [label=\"{v}\"];\n"));
        }
        for (i, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                let len = self.verts[i].rad().unwrap() - self.verts[*p].rad().unwrap();
                s.push_str(&format!("  v{i} -- v{p} [label=\"{}\"];\n", q_str(&len)));
            }
        }
        for (k, (p, at, dir)) in self.ends.iter().enumerate() {
            s.push_str(&format!(
                "  e{k} [label=\"{p}\", shape=plaintext];\n  e{k} -- v{at} [style=dashed, label=\"{dir}\"];\n"
            ));
        }
        if self.has_inf {
            s.push_str(&format!(
                "  inf [label=\"∞\", shape=plaintext];\n  inf -- v{} [style=dashed];\n",
                self.root
            ));
        }
        s.push_str("}\n");
        s
    }
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

    fn ball0(rad: i64) -> BPoint {
        BPoint::type2(&Pux::zero(&b()), &qz(rad)).unwrap()
    }

    #[test]
    fn canonical_center_drops_terms_at_and_above_radius() {
        let c = Pux::from_i64(1, &b()).add(&mono(1, 1, 1)).add(&mono(2, 1, 1));
        let p = BPoint::type2(&c, &qz(1)).unwrap();
        let q2 = BPoint::type2(&Pux::from_i64(1, &b()), &qz(1)).unwrap();
        assert!(p.eq(&q2).unwrap());
        // differing only at the radius exponent is still the same ball
        let c2 = Pux::from_i64(1, &b()).add(&mono(1, 1, 5));
        assert!(p.eq(&BPoint::type2(&c2, &qz(1)).unwrap()).unwrap());
    }

    #[test]
    fn underdetermined_center_is_rejected() {
        let c = Pux::new(vec![], Val::Fin(q(1, 2)), b());
        assert!(BPoint::type2(&c, &qz(1)).is_err());
    }

    #[test]
    fn join_and_distance() {
        let g = BPoint::gauss(&b());
        let big = ball0(-2);
        let j = g.join(&big).unwrap();
        assert!(j.eq(&big).unwrap());
        assert_eq!(g.dist(&big).unwrap(), Val::Fin(qz(2)));
        assert!(g.le(&big).unwrap());
        assert!(!big.le(&g).unwrap());

        // disjoint balls of equal radius join at the valuation of the gap
        let p1 = BPoint::type2(&mono(1, 1, 1), &qz(2)).unwrap();
        let p2 = BPoint::type2(&mono(1, 1, 3), &qz(2)).unwrap();
        let j = p1.join(&p2).unwrap();
        assert!(j.eq(&BPoint::type2(&mono(1, 1, 1), &qz(1)).unwrap()).unwrap());
        assert_eq!(p1.dist(&p2).unwrap(), Val::Fin(qz(2)));

        // type I points join at the valuation of their difference
        let a = BPoint::type1(mono(1, 1, 1));
        let bb = BPoint::type1(mono(1, 1, -1));
        let j = a.join(&bb).unwrap();
        assert!(j.eq(&BPoint::type2(&mono(1, 1, 1), &qz(1)).unwrap()).unwrap());
        assert_eq!(a.dist(&bb).unwrap(), Val::Inf);
        assert!(a.join(&BPoint::gauss(&b())).unwrap().eq(&BPoint::gauss(&b())).unwrap());
    }

    #[test]
    fn join_precision_error() {
        let a = BPoint::type1(Pux::new(vec![], Val::Fin(qz(2)), b()));
        let bb = BPoint::type1(Pux::new(vec![], Val::Fin(qz(3)), b()));
        assert!(a.join(&bb).is_err());
    }

    #[test]
    fn directions_at_gauss() {
        let g = BPoint::gauss(&b());
        let d = g.direction_of(&BPoint::type1(mono(1, 1, 1))).unwrap();
        assert!(matches!(&d, Dir::Res(c) if c.is_zero()));
        let d = g
            .direction_of(&BPoint::type1(Pux::from_i64(1, &b()).add(&mono(1, 1, 1))))
            .unwrap();
        assert!(matches!(&d, Dir::Res(c) if c.eq_c(&Coeff::one(&b()))));
        assert!(matches!(g.direction_of(&BPoint::Inf).unwrap(), Dir::Inf));
        assert!(matches!(g.direction_of(&ball0(-2)).unwrap(), Dir::Inf));
        let d = g
            .direction_of(&BPoint::type2(&Pux::from_i64(5, &b()), &qz(3)).unwrap())
            .unwrap();
        assert!(matches!(&d, Dir::Res(c) if c.eq_c(&Coeff::from_i64(5, &b()))));
    }

    /// Hull of {t⁻¹, −t⁻¹, t⁻³, ∞}: two branch vertices at radii −1 and −3.
    fn newton_cubic_tree() -> FiniteTree {
        let pts = vec![
            BPoint::type1(mono(-1, 1, 1)),
            BPoint::type1(mono(-1, 1, -1)),
            BPoint::type1(mono(-3, 1, 1)),
            BPoint::Inf,
        ];
        FiniteTree::build(&pts).unwrap()
    }

    #[test]
    fn hull_of_cubic_fixed_points() {
        let t = newton_cubic_tree();
        assert_eq!(t.len(), 2);
        assert!(t.verts[t.root].eq(&ball0(-3)).unwrap());
        let other = 1 - t.root;
        assert!(t.verts[other].eq(&ball0(-1)).unwrap());
        assert_eq!(t.parent[other], Some(t.root));
        // root: one child + the t⁻³ end + ∞; inner vertex: parent + two ends
        assert_eq!(t.valence(t.root), 3);
        assert_eq!(t.valence(other), 3);
        assert_eq!(t.ends.len(), 3);
    }

    #[test]
    fn projection_onto_edge_and_components() {
        let t = newton_cubic_tree();
        let inner = 1 - t.root;

        // a ball on the spine between the two vertices
        let mid = ball0(-2);
        assert_eq!(
            t.project(&mid).unwrap(),
            Loc::EdgeInterior { bot: inner, rad: qz(-2) }
        );
        assert_eq!(
            t.component_of(&mid).unwrap(),
            Comp::OnEdge { bot: inner, rad: qz(-2) }
        );

        // the closed ball at its own radius valuation is the spine point
        // itself: center translates at the radius do not leave the ball
        let same = BPoint::type2(&mono(-2, 1, 1), &qz(-2)).unwrap();
        assert!(same.eq(&mid).unwrap());

        // a deeper ball around t⁻² leaves the spine at radius −2 and lives
        // in the annulus component of the edge
        let hang = BPoint::type2(&mono(-2, 1, 1), &q(-3, 2)).unwrap();
        assert_eq!(
            t.component_of(&hang).unwrap(),
            Comp::OffEdge { bot: inner, rad: qz(-2) }
        );
        let pt = BPoint::type1(mono(-2, 1, 1));
        assert_eq!(
            t.component_of(&pt).unwrap(),
            Comp::OffEdge { bot: inner, rad: qz(-2) }
        );

        // the constant point 5 hangs below the inner vertex in the zero
        // residue direction
        match t.component_of(&BPoint::type1(Pux::from_i64(5, &b()))).unwrap() {
            Comp::BallAt { vert, dir: Dir::Res(c) } => {
                assert_eq!(vert, inner);
                assert!(c.is_zero());
            }
            other => panic!("unexpected component {other:?}"),
        }

        // vertices classify as themselves
        assert_eq!(t.component_of(&ball0(-1)).unwrap(), Comp::AtVertex(inner));

        // above the root: on the ray toward ∞
        assert_eq!(t.component_of(&ball0(-5)).unwrap(), Comp::OnRay { rad: qz(-5) });
        assert_eq!(t.component_of(&BPoint::Inf).unwrap(), Comp::AtInf);
    }

    #[test]
    fn rayless_tree_sends_outer_points_to_the_root_ball() {
        // same tree but without ∞: points above the root live in the
        // ∞-direction component at the root
        let pts = vec![
            BPoint::type1(mono(-1, 1, 1)),
            BPoint::type1(mono(-1, 1, -1)),
            BPoint::type1(mono(-3, 1, 1)),
        ];
        let t = FiniteTree::build(&pts).unwrap();
        assert!(!t.has_inf);
        assert_eq!(t.valence(t.root), 2);
        let c = t.component_of(&ball0(-5)).unwrap();
        assert_eq!(c, Comp::BallAt { vert: t.root, dir: Dir::Inf });
        let c = t.component_of(&BPoint::Inf).unwrap();
        assert_eq!(c, Comp::BallAt { vert: t.root, dir: Dir::Inf });
    }

    #[test]
    fn single_ball_tree() {
        let t = FiniteTree::build(&[BPoint::gauss(&b()), BPoint::Inf]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.valence(t.root), 1);
        let c = t.component_of(&BPoint::type1(mono(1, 1, 1))).unwrap();
        assert!(matches!(c, Comp::BallAt { dir: Dir::Res(_), .. }));
    }

    #[test]
    fn dot_export_mentions_every_vertex() {
        let t = newton_cubic_tree();
        let dot = t.to_dot();
        assert!(dot.contains("v0"));
        assert!(dot.contains("v1"));
        assert!(dot.contains("inf"));
        assert!(dot.contains("style=dashed"));
    }
}
