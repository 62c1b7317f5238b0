// SPDX-License-Identifier: Apache-2.0
//! Scattering diagrams: walls, path-ordered products around a point,
//! minimal forms and the two completion algorithms.

mod origin;
mod perturb;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{angle_cmp, angle_cmp_from, LatticeVector};
use crate::rational::{self, Q};
use crate::series::{same_ctx, RingContext, TermRecord, TruncatedSeries, Variable};
use crate::vertex::{TorusAutomorphism, WallCrossingAutomorphism};

pub use origin::scatter_at_origin;
pub use perturb::{
    collide, scatter_by_perturbation, scatter_by_perturbation_with, PerturbationOptions, PerturbationResult,
    PerturbedDiagram, PerturbedWall, StandardDiagram, StandardLine, TaylorData,
};
pub(crate) use perturb::{perturb_lines, LineSeed};

/// A point of `M_R = Q^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Q,
    pub y: Q,
}

impl Point {
    pub fn origin() -> Self {
        Point { x: Q::zero(), y: Q::zero() }
    }

    pub fn new(x: Q, y: Q) -> Self {
        Point { x, y }
    }

    pub fn is_origin(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `self + s * d`.
    pub fn offset(&self, s: &Q, d: LatticeVector) -> Point {
        Point { x: &self.x + s * rational::q(d.a), y: &self.y + s * rational::q(d.b) }
    }

    fn minus(&self, other: &Point) -> (Q, Q) {
        (&self.x - &other.x, &self.y - &other.y)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!([rational::to_string(&self.x), rational::to_string(&self.y)])
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", rational::to_string(&self.x), rational::to_string(&self.y))
    }
}

/// `(u1, u2) ^ (d.a, d.b)` for a rational vector against a lattice vector.
fn wedge_q(u: &(Q, Q), d: LatticeVector) -> Q {
    &u.0 * rational::q(d.b) - &u.1 * rational::q(d.a)
}

pub(crate) fn locate_on(kind: WallKind, base: &Point, direction: LatticeVector, p: &Point) -> Option<Incidence> {
    let v = p.minus(base);
    if !wedge_q(&v, direction).is_zero() {
        return None;
    }
    match kind {
        WallKind::Line => Some(Incidence::Interior),
        WallKind::Ray => {
            let dot = &v.0 * rational::q(direction.a) + &v.1 * rational::q(direction.b);
            if dot.is_zero() {
                Some(Incidence::Boundary)
            } else if dot.is_positive() {
                Some(Incidence::Interior)
            } else {
                None
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WallKind {
    Line,
    Ray,
}

/// How a point lies on the support of a wall.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Incidence {
    Interior,
    /// The initial point of a ray.
    Boundary,
}

/// Where a wall of a perturbed diagram came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// One of the lines obtained by factoring the `i`-th input line; `subset`
    /// lists the second indices of the variables `u_{i j}` in its coefficient.
    Leaf { line: usize, subset: Vec<u32>, weight: u32 },
    /// Produced by the collision of two earlier walls (indices into the
    /// perturbed diagram).
    Collision { parents: [usize; 2] },
}

/// A ray or line `(d, f)` with `f = 1 + sum_w c_w z^{w m0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub kind: WallKind,
    pub base: Point,
    direction: LatticeVector,
    function: TruncatedSeries,
}

impl Wall {
    pub fn new(kind: WallKind, base: Point, direction: LatticeVector, function: TruncatedSeries) -> Result<Self> {
        if !direction.is_primitive() {
            return Err(Error::InvalidWall(format!("direction {direction} is not primitive")));
        }
        let one = TruncatedSeries::one(function.context());
        let rest = function.sub(&one)?;
        if !rest.in_maximal_ideal() {
            return Err(Error::InvalidWall(format!("function {function} is not 1 modulo the maximal ideal")));
        }
        for m in rest.laurent_support() {
            if !(m.same_ray(&direction)) {
                return Err(Error::InvalidWall(format!(
                    "exponent {m} is not a positive multiple of the direction {direction}"
                )));
            }
        }
        Ok(Wall { kind, base, direction, function })
    }

    pub fn line(direction: LatticeVector, function: TruncatedSeries) -> Result<Self> {
        Self::new(WallKind::Line, Point::origin(), direction, function)
    }

    pub fn ray(direction: LatticeVector, function: TruncatedSeries) -> Result<Self> {
        Self::new(WallKind::Ray, Point::origin(), direction, function)
    }

    /// Builds `f = 1 + sum_w c_w z^{w m0}` from the coefficient series `c_w`.
    pub fn from_coeffs(
        kind: WallKind,
        base: Point,
        direction: LatticeVector,
        ctx: &Arc<RingContext>,
        coeffs: &BTreeMap<u32, TruncatedSeries>,
    ) -> Result<Self> {
        let mut f = TruncatedSeries::one(ctx);
        for (&w, c) in coeffs {
            if w == 0 {
                return Err(Error::InvalidWall("weight 0 in wall function".into()));
            }
            if c.laurent_support().iter().any(|m| !m.is_zero()) {
                return Err(Error::InvalidWall("wall coefficient carries a Laurent monomial".into()));
            }
            f = f.add(&c.shift(direction * w as i64))?;
        }
        Self::new(kind, base, direction, f)
    }

    pub fn direction(&self) -> LatticeVector {
        self.direction
    }

    pub fn function(&self) -> &TruncatedSeries {
        &self.function
    }

    pub fn context(&self) -> &Arc<RingContext> {
        self.function.context()
    }

    pub fn logf(&self) -> Result<TruncatedSeries> {
        self.function.log()
    }

    pub fn is_trivial(&self) -> bool {
        self.function.is_one()
    }

    /// The coefficients `c_w` of `f = 1 + sum_w c_w z^{w m0}`.
    pub fn coeffs(&self) -> BTreeMap<u32, TruncatedSeries> {
        let ctx = self.context();
        let mut by_w: BTreeMap<u32, Vec<_>> = BTreeMap::new();
        for (mono, c) in self.function.terms() {
            if mono.m.is_zero() {
                continue;
            }
            let w = mono.m.index().expect("nonzero exponent") as u32;
            let mut formal = mono.clone();
            formal.m = LatticeVector::ZERO;
            by_w.entry(w).or_default().push((formal, c.clone()));
        }
        by_w.into_iter().map(|(w, t)| (w, TruncatedSeries::from_terms(ctx, t))).collect()
    }

    /// The same wall moved so that its support passes through the origin.
    pub fn translated_to_origin(&self) -> Wall {
        Wall { base: Point::origin(), ..self.clone() }
    }

    /// Position of `p` relative to the support, if it lies on it.
    pub fn locate(&self, p: &Point) -> Option<Incidence> {
        locate_on(self.kind, &self.base, self.direction, p)
    }

    /// For a line, the foot of the perpendicular from the origin; for a ray,
    /// its initial point.
    fn canonical_base(&self) -> Point {
        match self.kind {
            WallKind::Ray => self.base.clone(),
            WallKind::Line => {
                let d = self.direction;
                let norm = rational::q(d.a * d.a + d.b * d.b);
                let s = -(&self.base.x * rational::q(d.a) + &self.base.y * rational::q(d.b)) / norm;
                self.base.offset(&s, d)
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ctx = self.context();
        let f: Vec<serde_json::Value> = self
            .coeffs()
            .iter()
            .map(|(w, c)| {
                let terms: Vec<serde_json::Value> =
                    c.terms().map(|(mono, q)| crate::series::term_json(ctx, mono, q, false)).collect();
                serde_json::json!({"w": w, "coef_terms": terms})
            })
            .collect();
        serde_json::json!({
            "kind": self.kind,
            "base": self.base.to_json(),
            "direction": [self.direction.a, self.direction.b],
            "f": f,
        })
    }
}

/// Orders walls by the angle of their direction, then kind, then base point.
pub fn wall_cmp(a: &Wall, b: &Wall) -> Ordering {
    angle_cmp(&a.direction, &b.direction)
        .then(a.kind.cmp(&b.kind))
        .then_with(|| a.base.cmp(&b.base))
}

/// A finite collection of walls over one coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScatteringDiagram {
    ctx: Arc<RingContext>,
    walls: Vec<Wall>,
}

/// A small counter-clockwise loop around `center`, starting just after the
/// ray `center + R_{>0} start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpec {
    pub center: Point,
    pub start: LatticeVector,
}

impl LoopSpec {
    pub fn new(center: Point, start: LatticeVector) -> Result<Self> {
        if start.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(LoopSpec { center, start })
    }

    pub fn at_origin(start: LatticeVector) -> Result<Self> {
        Self::new(Point::origin(), start)
    }
}

/// One wall crossing of a loop: the wall index, the direction from the loop
/// center at which it is met, and whether its automorphism enters inverted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub wall: usize,
    pub at: LatticeVector,
    pub inverse: bool,
}

/// The ordered crossings of a loop and the composite automorphism
/// `theta_s o ... o theta_1`.
#[derive(Clone, Debug)]
pub struct PathProduct {
    pub crossings: Vec<Crossing>,
    pub automorphism: TorusAutomorphism,
}

#[derive(Deserialize)]
struct DiagramFile {
    ring: RingFile,
    walls: Vec<WallFile>,
}

#[derive(Deserialize)]
struct RingFile {
    variables: Vec<VariableFile>,
    order: u32,
}

#[derive(Deserialize)]
struct VariableFile {
    name: String,
    #[serde(default)]
    square_zero: bool,
}

#[derive(Deserialize)]
struct WallFile {
    kind: WallKind,
    #[serde(default)]
    base: Option<[String; 2]>,
    direction: [i64; 2],
    f: Vec<CoeffFile>,
}

#[derive(Deserialize)]
struct CoeffFile {
    w: u32,
    coef_terms: Vec<TermRecord>,
}

/// A direction from which a loop may start without running along any of
/// the given directions.
pub(crate) fn generic_start(dirs: &[LatticeVector]) -> LatticeVector {
    (1i64..)
        .map(|c| LatticeVector::new(-c, -(c + 1)))
        .find(|s| dirs.iter().all(|d| !d.is_parallel(s)))
        .expect("some direction avoids finitely many lines")
}

impl ScatteringDiagram {
    pub fn new(ctx: &Arc<RingContext>, walls: Vec<Wall>) -> Result<Self> {
        if walls.iter().any(|w| !same_ctx(w.context(), ctx)) {
            return Err(Error::ContextMismatch);
        }
        Ok(ScatteringDiagram { ctx: ctx.clone(), walls })
    }

    /// Lines through the origin, one per `(direction, function)` pair.
    pub fn lines_through_origin(ctx: &Arc<RingContext>, lines: &[(LatticeVector, TruncatedSeries)]) -> Result<Self> {
        let walls = lines.iter().map(|(d, f)| Wall::line(*d, f.clone())).collect::<Result<Vec<_>>>()?;
        Self::new(ctx, walls)
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn rays(&self) -> impl Iterator<Item = &Wall> {
        self.walls.iter().filter(|w| w.kind == WallKind::Ray)
    }

    pub fn lines(&self) -> impl Iterator<Item = &Wall> {
        self.walls.iter().filter(|w| w.kind == WallKind::Line)
    }

    pub fn push(&mut self, wall: Wall) -> Result<()> {
        if !same_ctx(wall.context(), &self.ctx) {
            return Err(Error::ContextMismatch);
        }
        self.walls.push(wall);
        Ok(())
    }

    /// The ray (or line) of the given kind and direction through the origin.
    pub fn wall_at_origin(&self, kind: WallKind, direction: LatticeVector) -> Option<&Wall> {
        self.walls.iter().find(|w| w.kind == kind && w.direction == direction && w.base.is_origin())
    }

    /// Merges walls with equal support by multiplying their functions,
    /// drops trivial walls, and sorts canonically.
    pub fn minimalize(&self) -> Result<Self> {
        let mut merged: Vec<Wall> = Vec::new();
        let mut index: BTreeMap<(WallKind, LatticeVector, Point), usize> = BTreeMap::new();
        for w in &self.walls {
            let base = w.canonical_base();
            match index.get(&(w.kind, w.direction, base.clone())) {
                Some(&i) => {
                    let f = merged[i].function.mul(&w.function)?;
                    merged[i].function = f;
                }
                None => {
                    index.insert((w.kind, w.direction, base.clone()), merged.len());
                    merged.push(Wall { base, ..w.clone() });
                }
            }
        }
        merged.retain(|w| !w.is_trivial());
        merged.sort_by(wall_cmp);
        Ok(ScatteringDiagram { ctx: self.ctx.clone(), walls: merged })
    }

    /// Every wall translated to the origin, in minimal form.
    pub fn asymptotic(&self) -> Result<Self> {
        ScatteringDiagram { ctx: self.ctx.clone(), walls: self.walls.iter().map(Wall::translated_to_origin).collect() }
            .minimalize()
    }

    /// The wall crossings of an infinitesimal loop around `lp.center` in
    /// angular order, and their composite.
    pub fn path_ordered_product(&self, lp: &LoopSpec) -> Result<PathProduct> {
        let mut hits: Vec<Crossing> = Vec::new();
        for (i, w) in self.walls.iter().enumerate() {
            let Some(inc) = w.locate(&lp.center) else { continue };
            if w.is_trivial() {
                continue;
            }
            if w.direction.is_parallel(&lp.start) {
                return Err(Error::InvalidArgument(format!(
                    "loop start direction {} runs along wall {i}",
                    lp.start
                )));
            }
            hits.push(Crossing { wall: i, at: w.direction, inverse: false });
            if inc == Incidence::Interior {
                hits.push(Crossing { wall: i, at: -w.direction, inverse: true });
            }
        }
        hits.sort_by(|a, b| angle_cmp_from(&lp.start, &a.at, &b.at).then(a.wall.cmp(&b.wall)));
        let mut logs: BTreeMap<usize, WallCrossingAutomorphism> = BTreeMap::new();
        let mut thetas = Vec::with_capacity(hits.len());
        for c in &hits {
            let theta = match logs.entry(c.wall) {
                std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::btree_map::Entry::Vacant(e) => {
                    let w = &self.walls[c.wall];
                    e.insert(WallCrossingAutomorphism::new(w.logf()?, w.direction.normal()?)?)
                }
            };
            thetas.push(if c.inverse { theta.inverse() } else { theta.clone() });
        }
        let automorphism = TorusAutomorphism::compose(&self.ctx, &thetas)?;
        Ok(PathProduct { crossings: hits, automorphism })
    }

    /// Points where a small loop may detect inconsistency: initial points of
    /// rays and pairwise intersections of non-parallel walls.
    pub fn singular_points(&self) -> Vec<Point> {
        let mut pts = std::collections::BTreeSet::new();
        for w in &self.walls {
            if w.kind == WallKind::Ray {
                pts.insert(w.base.clone());
            }
        }
        for (i, a) in self.walls.iter().enumerate() {
            for b in &self.walls[i + 1..] {
                if let Some(p) = intersect_supports(a, b) {
                    pts.insert(p);
                }
            }
        }
        pts.into_iter().collect()
    }

    /// Whether the loop around every singular point is the identity.
    pub fn is_consistent(&self) -> Result<bool> {
        for p in self.singular_points() {
            let dirs: Vec<LatticeVector> = self.walls.iter().map(|w| w.direction).collect();
            let lp = LoopSpec::new(p, generic_start(&dirs))?;
            if !self.path_ordered_product(&lp)?.automorphism.is_identity() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The full loop around the origin of the asymptotic diagram.
    pub fn origin_loop_is_identity(&self) -> Result<bool> {
        let asym = self.asymptotic()?;
        let dirs: Vec<LatticeVector> = asym.walls.iter().map(|w| w.direction).collect();
        let lp = LoopSpec::at_origin(generic_start(&dirs))?;
        Ok(asym.path_ordered_product(&lp)?.automorphism.is_identity())
    }

    /// Applies a ring homomorphism given on variables to every wall function.
    pub fn substitute(&self, target: &Arc<RingContext>, map: &BTreeMap<String, TruncatedSeries>) -> Result<Self> {
        let walls = self
            .walls
            .iter()
            .map(|w| Wall::new(w.kind, w.base.clone(), w.direction, w.function.substitute(target, map)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScatteringDiagram { ctx: target.clone(), walls })
    }

    /// Truncates every wall function to a smaller order.
    pub fn truncate_to(&self, target: &Arc<RingContext>) -> Result<Self> {
        let walls = self
            .walls
            .iter()
            .map(|w| Ok(Wall { function: w.function.truncate_to(target)?, ..w.clone() }))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScatteringDiagram { ctx: target.clone(), walls })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vars: Vec<serde_json::Value> = self
            .ctx
            .variables()
            .iter()
            .map(|v| serde_json::json!({"name": v.name, "square_zero": v.square_zero}))
            .collect();
        serde_json::json!({
            "ring": {"variables": vars, "order": self.ctx.order()},
            "walls": self.walls.iter().map(Wall::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: DiagramFile = serde_json::from_value(value.clone())?;
        let vars = file
            .ring
            .variables
            .into_iter()
            .map(|v| Variable { name: v.name, square_zero: v.square_zero })
            .collect();
        let ctx = RingContext::new(vars, file.ring.order)?;
        let mut walls = Vec::with_capacity(file.walls.len());
        for w in file.walls {
            let base = match w.base {
                Some([x, y]) => Point::new(rational::parse(&x)?, rational::parse(&y)?),
                None => Point::origin(),
            };
            let direction = LatticeVector::from(w.direction);
            let mut coeffs: BTreeMap<u32, TruncatedSeries> = BTreeMap::new();
            for c in w.f {
                if c.coef_terms.iter().any(|t| t.m.is_some()) {
                    return Err(Error::Parse("wall coefficient terms must not carry \"m\"".into()));
                }
                let s = TruncatedSeries::from_records(&ctx, &c.coef_terms)?;
                let entry = coeffs.entry(c.w).or_insert_with(|| TruncatedSeries::zero(&ctx));
                *entry = entry.add(&s)?;
            }
            walls.push(Wall::from_coeffs(w.kind, base, direction, &ctx, &coeffs)?);
        }
        Ok(ScatteringDiagram { ctx, walls })
    }
}

/// The single intersection point of two non-parallel supports, boundary
/// points included.
pub(crate) fn intersect_supports(a: &Wall, b: &Wall) -> Option<Point> {
    let (p, s, _) = intersect_params(&a.base, a.direction, &b.base, b.direction)?;
    if a.kind == WallKind::Ray && s.is_negative() {
        return None;
    }
    if b.kind == WallKind::Ray && b.locate(&p).is_none() {
        return None;
    }
    Some(p)
}

/// Solves `p1 + s d1 = p2 + r d2`, returning the point, `s` and `r`.
pub(crate) fn intersect_params(p1: &Point, d1: LatticeVector, p2: &Point, d2: LatticeVector) -> Option<(Point, Q, Q)> {
    let det = d1.wedge(&d2);
    if det == 0 {
        return None;
    }
    let det = rational::q(det);
    let v = p2.minus(p1);
    let s = wedge_q(&v, d2) / &det;
    let r = wedge_q(&v, d1) / &det;
    Some((p1.offset(&s, d1), s, r))
}

impl fmt::Display for ScatteringDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.walls {
            let kind = match w.kind {
                WallKind::Line => "line",
                WallKind::Ray => "ray",
            };
            writeln!(f, "{kind} {} + R{} : {}", w.base, w.direction, w.function)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn ctx2(order: u32) -> Arc<RingContext> {
        RingContext::with_names(&["t1", "t2"], order).unwrap()
    }

    fn two_lines(c: &Arc<RingContext>, l1: u32, l2: u32) -> ScatteringDiagram {
        let one = TruncatedSeries::one(c);
        let t1x = &TruncatedSeries::var(c, "t1").unwrap() * &TruncatedSeries::x(c);
        let t2y = &TruncatedSeries::var(c, "t2").unwrap() * &TruncatedSeries::y(c);
        ScatteringDiagram::lines_through_origin(
            c,
            &[(LatticeVector::E1, (&one + &t1x).pow(l1)), (LatticeVector::E2, (&one + &t2y).pow(l2))],
        )
        .unwrap()
    }

    #[test]
    fn two_line_loop_is_the_commutator() {
        let c = ctx2(4);
        let d = two_lines(&c, 1, 1);
        let lp = LoopSpec::at_origin(LatticeVector::new(1, -1)).unwrap();
        let prod = d.path_ordered_product(&lp).unwrap();
        let order: Vec<(usize, bool)> = prod.crossings.iter().map(|c| (c.wall, c.inverse)).collect();
        // Starting in the fourth quadrant: +x axis, +y axis, -x axis, -y axis.
        assert_eq!(order, vec![(0, false), (1, false), (0, true), (1, true)]);
        assert!(!prod.automorphism.is_identity());
    }

    #[test]
    fn single_line_loop_is_identity() {
        let c = ctx2(5);
        let one = TruncatedSeries::one(&c);
        let f = &one + &(&TruncatedSeries::var(&c, "t1").unwrap() * &TruncatedSeries::x(&c));
        let d = ScatteringDiagram::lines_through_origin(&c, &[(LatticeVector::E1, f)]).unwrap();
        let lp = LoopSpec::at_origin(LatticeVector::new(1, 1)).unwrap();
        assert!(d.path_ordered_product(&lp).unwrap().automorphism.is_identity());
        assert!(d.path_ordered_product(&LoopSpec::at_origin(LatticeVector::new(-2, 0)).unwrap()).is_err());
    }

    #[test]
    fn completed_two_line_diagram_is_consistent() {
        let c = ctx2(7);
        let mut d = two_lines(&c, 1, 1);
        let one = TruncatedSeries::one(&c);
        let t1t2xy = &(&TruncatedSeries::var(&c, "t1").unwrap() * &TruncatedSeries::var(&c, "t2").unwrap())
            * &TruncatedSeries::z(&c, LatticeVector::new(1, 1));
        d.push(Wall::ray(LatticeVector::new(1, 1), &one + &t1t2xy).unwrap()).unwrap();
        for start in [LatticeVector::new(-1, -2), LatticeVector::new(1, -3), LatticeVector::new(2, 1)] {
            let lp = LoopSpec::at_origin(start).unwrap();
            assert!(d.path_ordered_product(&lp).unwrap().automorphism.is_identity());
        }
        assert!(d.is_consistent().unwrap());
    }

    #[test]
    fn wall_validation_and_coeffs() {
        let c = ctx2(3);
        let t1 = TruncatedSeries::var(&c, "t1").unwrap();
        let one = TruncatedSeries::one(&c);
        assert!(Wall::line(LatticeVector::new(2, 0), &one + &t1.shift(LatticeVector::new(2, 0))).is_err());
        assert!(Wall::line(LatticeVector::E1, &one + &t1.shift(LatticeVector::new(-1, 0))).is_err());
        assert!(Wall::line(LatticeVector::E1, &one + &TruncatedSeries::x(&c)).is_err());
        let f = &(&one + &t1.shift(LatticeVector::E1)) + &t1.pow(2).scale(&q(3)).shift(LatticeVector::new(2, 0));
        let w = Wall::line(LatticeVector::E1, f.clone()).unwrap();
        let co = w.coeffs();
        assert_eq!(co.len(), 2);
        assert_eq!(co[&2], t1.pow(2).scale(&q(3)));
        let rebuilt = Wall::from_coeffs(WallKind::Line, Point::origin(), LatticeVector::E1, &c, &co).unwrap();
        assert_eq!(rebuilt, w);
    }

    #[test]
    fn minimalize_merges_and_drops() {
        let c = ctx2(4);
        let one = TruncatedSeries::one(&c);
        let t1 = TruncatedSeries::var(&c, "t1").unwrap();
        let m = LatticeVector::new(1, 1);
        let f1 = &one + &t1.shift(m);
        let f2 = &one + &t1.pow(2).shift(m);
        let d = ScatteringDiagram::new(
            &c,
            vec![
                Wall::ray(m, f1.clone()).unwrap(),
                Wall::ray(LatticeVector::E2, one.clone()).unwrap(),
                Wall::ray(m, f2.clone()).unwrap(),
                Wall::line(m, f1.clone()).unwrap(),
            ],
        )
        .unwrap();
        let min = d.minimalize().unwrap();
        assert_eq!(min.walls().len(), 2);
        assert_eq!(min.walls()[0].kind, WallKind::Line);
        assert_eq!(min.walls()[1].function(), &(&f1 * &f2));
        assert_eq!(min.minimalize().unwrap(), min);
    }

    #[test]
    fn lines_merge_through_any_base_point() {
        let c = ctx2(3);
        let one = TruncatedSeries::one(&c);
        let f = &one + &TruncatedSeries::var(&c, "t1").unwrap().shift(LatticeVector::E1);
        let a = Wall::new(WallKind::Line, Point::new(q(3), q(1)), LatticeVector::E1, f.clone()).unwrap();
        let b = Wall::new(WallKind::Line, Point::new(q(-7), q(1)), LatticeVector::E1, f.clone()).unwrap();
        let min = ScatteringDiagram::new(&c, vec![a, b]).unwrap().minimalize().unwrap();
        assert_eq!(min.walls().len(), 1);
        assert_eq!(min.walls()[0].base, Point::new(q(0), q(1)));
    }

    #[test]
    fn json_round_trip() {
        let c = ctx2(3);
        let d = two_lines(&c, 2, 1);
        let v = d.to_json();
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.starts_with(r#"{"ring":{"variables":[{"name":"t1","square_zero":false}"#));
        assert!(text.contains(r#""kind":"line","base":["0","0"],"direction":[1,0],"f":[{"w":1,"coef_terms":[{"vars":{"t1":1},"coef":"2"}]}"#));
        let back = ScatteringDiagram::from_json(&v).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn locate_on_rays() {
        let c = ctx2(2);
        let one = TruncatedSeries::one(&c);
        let f = &one + &TruncatedSeries::var(&c, "t1").unwrap().shift(LatticeVector::new(1, 2));
        let w = Wall::new(WallKind::Ray, Point::new(q(1), q(1)), LatticeVector::new(1, 2), f).unwrap();
        assert_eq!(w.locate(&Point::new(q(1), q(1))), Some(Incidence::Boundary));
        assert_eq!(w.locate(&Point::new(q(2), q(3))), Some(Incidence::Interior));
        assert_eq!(w.locate(&Point::new(q(0), q(-1))), None);
        assert_eq!(w.locate(&Point::new(q(2), q(2))), None);
    }
}
