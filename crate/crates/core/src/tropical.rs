// SPDX-License-Identifier: Apache-2.0
//! Rational tropical curves read off from perturbed diagrams, their
//! multiplicities, the counts `N^trop_m(w)` and the aggregation of those
//! counts into the logarithm of a scattered ray function.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{angle_cmp, LatticeVector};
use crate::rational::{self, Q};
use crate::scattering::{perturb_lines, LineSeed, PerturbedDiagram, Point, Provenance, StandardDiagram, WallKind};
use crate::series::TruncatedSeries;

/// Directions `m_i` and weight vectors `w_i` for a tropical count.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightData {
    m: Vec<LatticeVector>,
    w: Vec<Vec<u32>>,
}

impl WeightData {
    /// Sorts each weight vector ascending. Fails on non-primitive
    /// directions, zero weights or `sum |w_i| m_i = 0`.
    pub fn new(m: Vec<LatticeVector>, mut w: Vec<Vec<u32>>) -> Result<Self> {
        if m.len() != w.len() {
            return Err(Error::InvalidArgument("one weight vector per direction is required".into()));
        }
        if let Some(bad) = m.iter().find(|v| !v.is_primitive()) {
            return Err(Error::InvalidArgument(format!("direction {bad} is not primitive")));
        }
        if w.iter().flatten().any(|&x| x == 0) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        for wi in &mut w {
            wi.sort_unstable();
        }
        let data = WeightData { m, w };
        if data.m_out().is_zero() {
            return Err(Error::InvalidArgument("the outgoing direction sum |w_i| m_i vanishes".into()));
        }
        Ok(data)
    }

    pub fn m(&self) -> &[LatticeVector] {
        &self.m
    }

    pub fn w(&self) -> &[Vec<u32>] {
        &self.w
    }

    pub fn size(&self, i: usize) -> u32 {
        self.w[i].iter().sum()
    }

    pub fn m_out(&self) -> LatticeVector {
        self.m
            .iter()
            .enumerate()
            .fold(LatticeVector::ZERO, |acc, (i, &mi)| acc + mi * self.size(i) as i64)
    }

    pub fn w_out(&self) -> u32 {
        self.m_out().index().expect("validated nonzero") as u32
    }

    pub fn num_lines(&self) -> usize {
        self.w.iter().map(Vec::len).sum()
    }

    /// `prod_{ij} w_ij`.
    pub fn weight_product(&self) -> Q {
        self.w.iter().flatten().map(|&x| rational::q(x as i64)).product()
    }
}

/// Order of the stabiliser of `((w_1, k_1), ..., (w_l, k_l))` in the
/// symmetric group.
pub fn aut_order(w: &[u32], k: &[u32]) -> Result<u64> {
    if w.len() != k.len() {
        return Err(Error::InvalidArgument("weight and multiplicity vectors differ in length".into()));
    }
    let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for pair in w.iter().zip(k) {
        *counts.entry((*pair.0, *pair.1)).or_default() += 1;
    }
    Ok(counts.values().map(|&c| (1..=c).product::<u64>()).product())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveEdge {
    pub id: usize,
    pub weight: u32,
    /// Primitive direction pointing away from `from`.
    pub direction: LatticeVector,
    pub bounded: bool,
    /// Vertex index of the start point.
    pub from: usize,
    /// Vertex index of the end point for bounded edges.
    pub to: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafLabel {
    pub i: usize,
    #[serde(rename = "J")]
    pub subset: Vec<u32>,
    pub w: u32,
}

/// A rational tropical curve with its embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurveRecord {
    pub vertices: Vec<Point>,
    pub edges: Vec<CurveEdge>,
    pub leaves: Vec<LeafLabel>,
    pub out_edge: usize,
    pub multiplicity: u64,
    /// For a curve without vertices (a single line), a point of it.
    pub anchor: Point,
}

impl TropicalCurveRecord {
    /// `sum w(E) m(E)` over edges leaving each vertex; zero everywhere on a
    /// balanced curve.
    pub fn imbalance(&self) -> Vec<LatticeVector> {
        let mut sums = vec![LatticeVector::ZERO; self.vertices.len()];
        for e in &self.edges {
            let v = e.direction * e.weight as i64;
            if !self.vertices.is_empty() {
                sums[e.from] = sums[e.from] + v;
            }
            if let Some(t) = e.to {
                sums[t] = sums[t] - v;
            }
        }
        sums
    }

    pub fn is_balanced(&self) -> bool {
        self.imbalance().iter().all(LatticeVector::is_zero)
    }

    /// Trivalent tree: every vertex meets three edges and the edge count is
    /// one less than the vertex count plus the number of unbounded ends.
    pub fn is_trivalent_tree(&self) -> bool {
        if self.vertices.is_empty() {
            return self.edges.len() == 1;
        }
        let mut valence = vec![0usize; self.vertices.len()];
        let mut bounded = 0;
        for e in &self.edges {
            valence[e.from] += 1;
            if let Some(t) = e.to {
                valence[t] += 1;
                bounded += 1;
            }
        }
        valence.iter().all(|&v| v == 3) && bounded + 1 == self.vertices.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pt = |p: &Point| serde_json::json!([rational::to_string(&p.x), rational::to_string(&p.y)]);
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                let from = if self.vertices.is_empty() { pt(&self.anchor) } else { pt(&self.vertices[e.from]) };
                serde_json::json!({
                    "dir": [e.direction.a, e.direction.b],
                    "w": e.weight,
                    "bounded": e.bounded,
                    "from": from,
                    "to": e.to.map(|t| pt(&self.vertices[t])),
                })
            })
            .collect();
        serde_json::json!({
            "edges": edges,
            "leaves": self.leaves,
            "mult": self.multiplicity,
        })
    }
}

/// Builds the tropical curve of wall `idx` of a perturbed diagram from its
/// ancestry, checks balancing, the disjointness of the leaf index sets and
/// the identity `c = w_out * Mult * prod_leaves (c_leaf / w_leaf)` between
/// the wall coefficient and the curve.
pub fn curve_from_ray(p: &PerturbedDiagram, idx: usize) -> Result<TropicalCurveRecord> {
    let walls = p.walls();
    let target = walls.get(idx).ok_or_else(|| Error::InvalidArgument(format!("no wall {idx}")))?;
    let leaf_label = |i: usize| -> Result<LeafLabel> {
        match &walls[i].provenance {
            Provenance::Leaf { line, subset, weight } => Ok(LeafLabel { i: *line, subset: subset.clone(), w: *weight }),
            Provenance::Collision { .. } => Err(Error::Tropical(format!("wall {i} has no leaf label"))),
        }
    };
    if target.kind == WallKind::Line {
        return Ok(TropicalCurveRecord {
            vertices: Vec::new(),
            edges: vec![CurveEdge {
                id: 0,
                weight: target.weight,
                direction: target.direction,
                bounded: false,
                from: 0,
                to: None,
            }],
            leaves: vec![leaf_label(idx)?],
            out_edge: 0,
            multiplicity: 1,
            anchor: target.base.clone(),
        });
    }

    let mut rays: Vec<usize> =
        p.ancestors(idx).into_iter().filter(|&i| walls[i].kind == WallKind::Ray).collect();
    rays.sort_by(|&a, &b| {
        walls[a]
            .round
            .cmp(&walls[b].round)
            .then_with(|| angle_cmp(&walls[a].direction, &walls[b].direction))
            .then(a.cmp(&b))
    });
    let vertex_of: BTreeMap<usize, usize> = rays.iter().enumerate().map(|(v, &r)| (r, v)).collect();
    let vertices: Vec<Point> = rays.iter().map(|&r| walls[r].base.clone()).collect();

    let mut edges = Vec::new();
    let mut leaves = Vec::new();
    let mut leaf_factor = Q::one();
    let mut leaf_mask = 0u64;
    let mut multiplicity: u64 = 1;
    for &r in &rays {
        let Provenance::Collision { parents } = &walls[r].provenance else {
            return Err(Error::Tropical(format!("ray {r} has no parents")));
        };
        let (a, b) = (&walls[parents[0]], &walls[parents[1]]);
        multiplicity *= a.weight as u64 * b.weight as u64 * a.direction.wedge(&b.direction).unsigned_abs();
        for &q in parents {
            let pw = &walls[q];
            if pw.kind == WallKind::Line {
                if leaf_mask & pw.mask != 0 {
                    return Err(Error::Tropical("leaf index sets overlap".into()));
                }
                leaf_mask |= pw.mask;
                leaf_factor *= &pw.coef / rational::q(pw.weight as i64);
                leaves.push(leaf_label(q)?);
                edges.push(CurveEdge {
                    id: edges.len(),
                    weight: pw.weight,
                    direction: -pw.direction,
                    bounded: false,
                    from: vertex_of[&r],
                    to: None,
                });
            } else {
                edges.push(CurveEdge {
                    id: edges.len(),
                    weight: pw.weight,
                    direction: pw.direction,
                    bounded: true,
                    from: vertex_of[&q],
                    to: Some(vertex_of[&r]),
                });
            }
        }
    }
    let out_edge = edges.len();
    edges.push(CurveEdge {
        id: out_edge,
        weight: target.weight,
        direction: target.direction,
        bounded: false,
        from: vertex_of[&idx],
        to: None,
    });
    let curve = TropicalCurveRecord { vertices, edges, leaves, out_edge, multiplicity, anchor: target.base.clone() };
    if !curve.is_balanced() {
        return Err(Error::Tropical(format!("curve of wall {idx} is not balanced")));
    }
    if !curve.is_trivalent_tree() {
        return Err(Error::Tropical(format!("curve of wall {idx} is not a trivalent tree")));
    }
    let expected = rational::q(target.weight as i64) * rational::q(multiplicity as i64) * leaf_factor;
    if expected != target.coef {
        return Err(Error::Tropical(format!(
            "wall {idx} coefficient {} differs from w_out * Mult * leaf factors = {}",
            rational::to_string(&target.coef),
            rational::to_string(&expected)
        )));
    }
    Ok(curve)
}

/// The outcome of a tropical count.
#[derive(Clone, Debug)]
pub struct TropicalCount {
    pub value: Q,
    pub curves: Vec<TropicalCurveRecord>,
    pub seed: u64,
    pub perturbed: PerturbedDiagram,
}

/// `N^trop_m(w)`: the weighted number of rational tropical curves with one
/// incoming unbounded edge of weight `w_ij` on each of the general lines
/// `d_ij` parallel to `m_i`.
pub fn ntrop(data: &WeightData, seed: u64) -> Result<Q> {
    Ok(ntrop_with_curves(data, seed)?.value)
}

/// [`ntrop`] together with the contributing curves.
///
/// Each line carries `1 + u_ij z^{w_ij m_i}`. The sum of multiplicities
/// over rays whose leaves are all lines is cross-checked against
/// `prod w_ij * sum coef / w_out`.
pub fn ntrop_with_curves(data: &WeightData, seed: u64) -> Result<TropicalCount> {
    let mut seeds = Vec::new();
    let mut labels = Vec::new();
    for (i, wi) in data.w.iter().enumerate() {
        for (j, &w) in wi.iter().enumerate() {
            let bit = labels.len();
            if bit >= 64 {
                return Err(Error::InvalidArgument("more than 64 lines".into()));
            }
            labels.push((i, j as u32 + 1));
            seeds.push(LineSeed {
                direction: data.m[i],
                weight: w,
                coef: Q::one(),
                mask: 1 << bit,
                provenance: Provenance::Leaf { line: i, subset: vec![j as u32 + 1], weight: w },
            });
        }
    }
    let full: u64 = if labels.len() == 64 { u64::MAX } else { (1u64 << labels.len()) - 1 };
    let cap = labels.len() as u32;
    let (walls, rounds, used_seed, _) = perturb_lines(&seeds, cap, seed, 32)?;
    let perturbed = PerturbedDiagram::new(labels, cap, walls, rounds)?;

    let mut value = Q::zero();
    let mut coef_sum = Q::zero();
    let mut curves = Vec::new();
    for (idx, w) in perturbed.walls().iter().enumerate() {
        if w.mask != full {
            continue;
        }
        if w.exponent() != data.m_out() {
            return Err(Error::Tropical(format!("full ray {idx} points along {} instead of m_out", w.exponent())));
        }
        let curve = curve_from_ray(&perturbed, idx)?;
        value += rational::q(curve.multiplicity as i64);
        coef_sum += &w.coef;
        curves.push(curve);
    }
    let via_coef = coef_sum * data.weight_product() / rational::q(data.w_out() as i64);
    if via_coef != value {
        return Err(Error::Tropical(format!(
            "curve count {} disagrees with coefficient count {}",
            rational::to_string(&value),
            rational::to_string(&via_coef)
        )));
    }
    Ok(TropicalCount { value, curves, seed: used_seed, perturbed })
}

/// Caches `N^trop` values across calls.
#[derive(Debug, Default)]
pub struct NtropCache {
    seed: u64,
    values: BTreeMap<WeightData, Q>,
}

impl NtropCache {
    pub fn new(seed: u64) -> Self {
        NtropCache { seed, values: BTreeMap::new() }
    }

    pub fn get(&mut self, data: &WeightData) -> Result<Q> {
        if let Some(v) = self.values.get(data) {
            return Ok(v.clone());
        }
        let v = ntrop(data, self.seed)?;
        self.values.insert(data.clone(), v.clone());
        Ok(v)
    }
}

/// One factor `a_{ikw} t_i^k` available on line `i`.
#[derive(Clone, Debug)]
struct Atom {
    w: u32,
    k: u32,
    a: Q,
}

/// Sum over weight vectors `w` and multiplicity vectors `k` of
/// `w_out N^trop(w) / |Aut(w, k)| prod a_{i k_ij w_ij} t_i^{k_ij} z^{m_out}`
/// for `m_out` a positive multiple of `ray_direction`, truncated at the
/// context order of the standard diagram. Data with a single incoming edge
/// are skipped, so along an input line's direction only the scattered ray
/// is described.
pub fn aggregate_log_f(
    d: &StandardDiagram,
    ray_direction: LatticeVector,
    ntrop_supplier: &mut dyn FnMut(&WeightData) -> Result<Q>,
) -> Result<TruncatedSeries> {
    let ctx = d.context().clone();
    let order = ctx.order();
    let taylor = d.taylor(order)?;
    let n = d.lines().len();
    let mut atoms: Vec<Vec<Atom>> = vec![Vec::new(); n];
    for (&(i, k, w), a) in taylor.entries() {
        if !a.is_zero() && k <= order {
            atoms[i].push(Atom { w, k, a: a.clone() });
        }
    }
    let dirs: Vec<LatticeVector> = d.lines().iter().map(|l| l.direction).collect();
    let names: Vec<&str> = d.lines().iter().map(|l| l.variable.as_str()).collect();

    // Multisets of atoms per line, each as a list of multiplicities.
    let mut out = TruncatedSeries::zero(&ctx);
    let mut choice: Vec<Vec<u32>> = atoms.iter().map(|a| vec![0; a.len()]).collect();
    enumerate(&atoms, 0, 0, order, &mut choice, &mut |choice| {
        let mut w_vecs = Vec::with_capacity(n);
        let mut m_out = LatticeVector::ZERO;
        let mut coef = Q::one();
        let mut aut: u64 = 1;
        let mut t_exps: Vec<u32> = vec![0; n];
        for i in 0..n {
            let mut wi = Vec::new();
            for (x, &mult) in choice[i].iter().enumerate() {
                let at = &atoms[i][x];
                for _ in 0..mult {
                    wi.push(at.w);
                    coef *= &at.a;
                }
                t_exps[i] += at.k * mult;
                aut *= (1..=mult as u64).product::<u64>();
                m_out = m_out + dirs[i] * (at.w * mult) as i64;
            }
            w_vecs.push(wi);
        }
        // A single leg is the incoming line itself, not a scattered ray.
        let legs: usize = w_vecs.iter().map(Vec::len).sum();
        if legs < 2 || m_out.is_zero() || !m_out.same_ray(&ray_direction) {
            return Ok(());
        }
        let data = WeightData::new(dirs.clone(), w_vecs)?;
        let nt = ntrop_supplier(&data)?;
        if nt.is_zero() {
            return Ok(());
        }
        let c = rational::q(data.w_out() as i64) * nt * coef / rational::q(aut as i64);
        let vars: Vec<(&str, u8)> =
            names.iter().zip(&t_exps).filter(|(_, &e)| e > 0).map(|(nm, &e)| (*nm, e as u8)).collect();
        out = out.add(&TruncatedSeries::monomial(&ctx, m_out, &vars, c))?;
        Ok(())
    })?;
    Ok(out)
}

/// Visits every assignment of multiplicities to atoms with total `t`-degree
/// between 1 and `budget`.
fn enumerate(
    atoms: &[Vec<Atom>],
    line: usize,
    used: u32,
    budget: u32,
    choice: &mut Vec<Vec<u32>>,
    visit: &mut dyn FnMut(&Vec<Vec<u32>>) -> Result<()>,
) -> Result<()> {
    fn go(
        atoms: &[Vec<Atom>],
        pos: (usize, usize),
        used: u32,
        budget: u32,
        choice: &mut Vec<Vec<u32>>,
        visit: &mut dyn FnMut(&Vec<Vec<u32>>) -> Result<()>,
    ) -> Result<()> {
        let (line, x) = pos;
        if line == atoms.len() {
            return if used > 0 { visit(choice) } else { Ok(()) };
        }
        if x == atoms[line].len() {
            return go(atoms, (line + 1, 0), used, budget, choice, visit);
        }
        let k = atoms[line][x].k;
        let mut mult = 0;
        loop {
            choice[line][x] = mult;
            go(atoms, (line, x + 1), used + k * mult, budget, choice, visit)?;
            mult += 1;
            if used + k * mult > budget {
                break;
            }
        }
        choice[line][x] = 0;
        Ok(())
    }
    go(atoms, (line, 0), used, budget, choice, visit)
}

/// Orders curves by multiplicity, then by the outgoing edge's start point.
pub fn curve_cmp(a: &TropicalCurveRecord, b: &TropicalCurveRecord) -> Ordering {
    a.multiplicity.cmp(&b.multiplicity).then_with(|| a.anchor.cmp(&b.anchor))
}
