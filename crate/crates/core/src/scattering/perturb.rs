// SPDX-License-Identifier: Apache-2.0
//! Completion by deformation: every input line is factored over square-zero
//! variables `u_{ij}`, the factors are moved apart to general position, and
//! pairs of walls collide round by round until nothing new appears.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::rational::{self, Q};
use crate::series::{Monomial, RingContext, TruncatedSeries, Variable};

use super::{intersect_params, locate_on, Incidence, Point, Provenance, ScatteringDiagram, Wall, WallKind};

/// One input line of a standard diagram: a line through the origin whose
/// function involves a single formal variable of its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardLine {
    pub direction: LatticeVector,
    pub variable: String,
    pub function: TruncatedSeries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardDiagram {
    ctx: Arc<RingContext>,
    lines: Vec<StandardLine>,
}

impl StandardDiagram {
    /// Checks that `d` is standard. Trivial lines are discarded.
    pub fn from_diagram(d: &ScatteringDiagram) -> Result<Self> {
        let ctx = d.context().clone();
        let mut lines: Vec<StandardLine> = Vec::new();
        for w in d.walls() {
            if w.kind != WallKind::Line || !w.base.is_origin() {
                return Err(Error::InvalidArgument("a standard diagram consists of lines through the origin".into()));
            }
            if w.is_trivial() {
                continue;
            }
            let mut used: Option<usize> = None;
            for (mono, _) in w.function().terms() {
                for (v, &e) in mono.exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    match used {
                        None => used = Some(v),
                        Some(u) if u == v => {}
                        Some(_) => {
                            return Err(Error::InvalidArgument(format!(
                                "line along {} uses more than one variable",
                                w.direction()
                            )))
                        }
                    }
                }
            }
            let var = ctx.variables()[used.expect("nontrivial function has a variable")].name.clone();
            if lines.iter().any(|l| l.variable == var) {
                return Err(Error::InvalidArgument(format!("variable {var} is shared by two lines")));
            }
            lines.push(StandardLine { direction: w.direction(), variable: var, function: w.function().clone() });
        }
        Ok(StandardDiagram { ctx, lines })
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn lines(&self) -> &[StandardLine] {
        &self.lines
    }

    /// The coefficients `a_{ijw}` of `log f_i = sum_{j,w} w a_{ijw} z^{w m_i} t_i^j`
    /// up to `t`-degree `order`.
    pub fn taylor(&self, order: u32) -> Result<TaylorData> {
        let ck = self.ctx.with_order(order)?;
        let mut entries = BTreeMap::new();
        for (i, line) in self.lines.iter().enumerate() {
            let logf = line.function.embed(&ck)?.log()?;
            for (mono, c) in logf.terms() {
                let j = mono.degree();
                let w = mono.m.index()? as u32;
                entries.insert((i, j, w), c / rational::q(w as i64));
            }
        }
        Ok(TaylorData { order, directions: self.lines.iter().map(|l| l.direction).collect(), entries })
    }
}

/// The Taylor data `a_{ijw}` of a standard diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorData {
    pub order: u32,
    pub directions: Vec<LatticeVector>,
    entries: BTreeMap<(usize, u32, u32), Q>,
}

impl TaylorData {
    pub fn a(&self, i: usize, j: u32, w: u32) -> Q {
        self.entries.get(&(i, j, w)).cloned().unwrap_or_else(Q::zero)
    }

    /// Nonzero entries as `((i, j, w), a_{ijw})`.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, u32, u32), &Q)> {
        self.entries.iter()
    }

    pub fn num_lines(&self) -> usize {
        self.directions.len()
    }
}

/// A wall `1 + coef * u_mask * z^{weight * direction}` of a perturbed
/// diagram; bit `b` of `mask` stands for the `b`-th square-zero variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbedWall {
    pub kind: WallKind,
    pub base: Point,
    pub direction: LatticeVector,
    pub weight: u32,
    pub coef: Q,
    pub mask: u64,
    pub round: u32,
    pub provenance: Provenance,
}

impl PerturbedWall {
    pub fn exponent(&self) -> LatticeVector {
        self.direction * self.weight as i64
    }

    pub fn degree(&self) -> u32 {
        self.mask.count_ones()
    }

    fn locate(&self, p: &Point) -> Option<Incidence> {
        locate_on(self.kind, &self.base, self.direction, p)
    }
}

/// An unplaced line for the collision process.
#[derive(Clone, Debug)]
pub(crate) struct LineSeed {
    pub direction: LatticeVector,
    pub weight: u32,
    pub coef: Q,
    pub mask: u64,
    pub provenance: Provenance,
}

/// The walls of a fully collided perturbed diagram together with the
/// square-zero coefficient ring.
#[derive(Clone, Debug)]
pub struct PerturbedDiagram {
    ctx: Arc<RingContext>,
    /// For every mask bit, the pair `(i, j)` of the variable `u_{ij}`, with
    /// `i` counted from 0 and `j` from 1.
    labels: Vec<(usize, u32)>,
    walls: Vec<PerturbedWall>,
    rounds: u32,
}

impl PerturbedDiagram {
    pub(crate) fn new(labels: Vec<(usize, u32)>, cap: u32, walls: Vec<PerturbedWall>, rounds: u32) -> Result<Self> {
        let vars = labels.iter().map(|(i, j)| Variable::square_zero(format!("u{}_{}", i + 1, j))).collect();
        let ctx = RingContext::new(vars, cap.max(1))?;
        Ok(PerturbedDiagram { ctx, labels, walls, rounds })
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn labels(&self) -> &[(usize, u32)] {
        &self.labels
    }

    pub fn walls(&self) -> &[PerturbedWall] {
        &self.walls
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    /// `coef * u_mask * z^m` in the square-zero ring.
    pub fn term(&self, coef: &Q, mask: u64, m: LatticeVector) -> TruncatedSeries {
        let exps: SmallVec<[u8; 12]> = (0..self.labels.len()).map(|b| ((mask >> b) & 1) as u8).collect();
        TruncatedSeries::from_monomial(&self.ctx, Monomial { m, exps }, coef.clone())
    }

    pub fn wall_function(&self, idx: usize) -> TruncatedSeries {
        let w = &self.walls[idx];
        &TruncatedSeries::one(&self.ctx) + &self.term(&w.coef, w.mask, w.exponent())
    }

    /// Every wall as a general [`Wall`], in creation order.
    pub fn to_diagram(&self) -> Result<ScatteringDiagram> {
        let walls = (0..self.walls.len())
            .map(|i| {
                let w = &self.walls[i];
                Wall::new(w.kind, w.base.clone(), w.direction, self.wall_function(i))
            })
            .collect::<Result<Vec<_>>>()?;
        ScatteringDiagram::new(&self.ctx, walls)
    }

    /// All walls moved to the origin and merged by support, over the
    /// square-zero ring.
    pub fn asymptotic(&self) -> Result<ScatteringDiagram> {
        let mut logs: BTreeMap<(WallKind, LatticeVector), TruncatedSeries> = BTreeMap::new();
        for w in &self.walls {
            // log(1 + c u z^m) = c u z^m since u^2 = 0
            let entry = logs.entry((w.kind, w.direction)).or_insert_with(|| TruncatedSeries::zero(&self.ctx));
            *entry = entry.add(&self.term(&w.coef, w.mask, w.exponent()))?;
        }
        let walls = logs
            .into_iter()
            .map(|((kind, dir), lf)| Wall::new(kind, Point::origin(), dir, lf.exp_series()?))
            .collect::<Result<Vec<_>>>()?;
        ScatteringDiagram::new(&self.ctx, walls)?.minimalize()
    }

    /// `idx` together with all walls it descends from, in increasing order.
    pub fn ancestors(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![idx];
        while let Some(i) = stack.pop() {
            out.push(i);
            if let Provenance::Collision { parents } = &self.walls[i].provenance {
                stack.extend_from_slice(parents);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The lines among the ancestors of `idx`.
    pub fn leaves(&self, idx: usize) -> Vec<usize> {
        self.ancestors(idx).into_iter().filter(|&i| self.walls[i].kind == WallKind::Line).collect()
    }
}

/// Options for [`scatter_by_perturbation_with`].
#[derive(Clone, Debug)]
pub struct PerturbationOptions {
    /// `k`: the number of square-zero variables per line and the order of
    /// the resulting asymptotic diagram.
    pub order: u32,
    pub seed: u64,
    /// Walls whose coefficient has more than this many `u` factors are not
    /// created. Defaults to `order`, which does not affect the asymptotic
    /// diagram modulo degree `order + 1`.
    pub degree_cap: Option<u32>,
    pub max_attempts: u32,
}

impl PerturbationOptions {
    pub fn new(order: u32, seed: u64) -> Self {
        PerturbationOptions { order, seed, degree_cap: None, max_attempts: 32 }
    }
}

#[derive(Clone, Debug)]
pub struct PerturbationResult {
    /// The seed whose offsets passed the genericity check.
    pub seed: u64,
    pub attempts: u32,
    pub standard: StandardDiagram,
    pub taylor: TaylorData,
    pub perturbed: PerturbedDiagram,
    /// The asymptotic diagram over the square-zero ring.
    pub asymptotic_u: ScatteringDiagram,
    /// The asymptotic diagram with `t_i = sum_j u_{ij}` inverted, truncated
    /// at `order`.
    pub asymptotic: ScatteringDiagram,
}

pub fn scatter_by_perturbation(d: &ScatteringDiagram, order: u32, seed: u64) -> Result<PerturbationResult> {
    scatter_by_perturbation_with(d, &PerturbationOptions::new(order, seed))
}

pub fn scatter_by_perturbation_with(d: &ScatteringDiagram, opts: &PerturbationOptions) -> Result<PerturbationResult> {
    let k = opts.order;
    if k == 0 {
        return Err(Error::InvalidArgument("perturbation order must be positive".into()));
    }
    let standard = StandardDiagram::from_diagram(d)?;
    let taylor = standard.taylor(k)?;
    let n = standard.lines.len();
    if n * k as usize > 64 {
        return Err(Error::InvalidArgument(format!("{n} lines at order {k} need more than 64 square-zero variables")));
    }
    let labels: Vec<(usize, u32)> = (0..n).flat_map(|i| (1..=k).map(move |j| (i, j))).collect();

    let mut seeds = Vec::new();
    for i in 0..n {
        for subset in 1u64..(1 << k) {
            let size = subset.count_ones();
            let fact = rational::factorial(size as u64);
            for (&(li, j, w), a) in taylor.entries.range((i, size, 0)..=(i, size, u32::MAX)) {
                debug_assert!(li == i && j == size);
                seeds.push(LineSeed {
                    direction: standard.lines[i].direction,
                    weight: w,
                    coef: &fact * rational::q(w as i64) * a,
                    mask: subset << (i as u32 * k),
                    provenance: Provenance::Leaf {
                        line: i,
                        subset: (0..k).filter(|b| subset >> b & 1 == 1).map(|b| b + 1).collect(),
                        weight: w,
                    },
                });
            }
        }
    }
    let cap = opts.degree_cap.unwrap_or(k);
    let (walls, rounds, seed, attempts) = perturb_lines(&seeds, cap, opts.seed, opts.max_attempts)?;
    let perturbed = PerturbedDiagram::new(labels, cap, walls, rounds)?;
    let asymptotic_u = perturbed.asymptotic()?;

    let tctx = standard.ctx.with_order(k)?;
    let names: Vec<&str> = standard.lines.iter().map(|l| l.variable.as_str()).collect();
    let mut walls = Vec::new();
    for w in asymptotic_u.walls() {
        let f = invert_substitution(w.function(), &perturbed.labels, &tctx, &names, k)?;
        walls.push(Wall::new(w.kind, Point::origin(), w.direction(), f)?);
    }
    let asymptotic = ScatteringDiagram::new(&tctx, walls)?.minimalize()?;
    Ok(PerturbationResult { seed, attempts, standard, taylor, perturbed, asymptotic_u, asymptotic })
}

/// Rewrites a series in the `u_{ij}` as a series in the `t_i`, inverting
/// `t_i -> sum_j u_{ij}`: the coefficient of `t^alpha` is that of any
/// `u_J` of type `alpha` divided by `prod alpha_i!`. Fails unless all
/// `u_J` of one type carry the same coefficient.
fn invert_substitution(
    f: &TruncatedSeries,
    labels: &[(usize, u32)],
    tctx: &Arc<RingContext>,
    names: &[&str],
    k: u32,
) -> Result<TruncatedSeries> {
    let mut groups: BTreeMap<(LatticeVector, Vec<u32>), (Q, u64)> = BTreeMap::new();
    for (mono, c) in f.terms() {
        let mut alpha = vec![0u32; names.len()];
        for (b, &e) in mono.exps.iter().enumerate() {
            if e > 0 {
                alpha[labels[b].0] += 1;
            }
        }
        match groups.get_mut(&(mono.m, alpha.clone())) {
            Some((c0, count)) => {
                if c0 != c {
                    return Err(Error::Decomposition(format!(
                        "coefficients of z^{} are not symmetric in the u variables",
                        mono.m
                    )));
                }
                *count += 1;
            }
            None => {
                groups.insert((mono.m, alpha), (c.clone(), 1));
            }
        }
    }
    let mut out = TruncatedSeries::zero(tctx);
    for ((m, alpha), (c, count)) in groups {
        let expected: Q = alpha.iter().map(|&a| rational::binomial(k as i64, a as u64)).product();
        if rational::q(count as i64) != expected {
            return Err(Error::Decomposition(format!("z^{m}: only {count} of {expected} symmetric terms present")));
        }
        let denom: Q = alpha.iter().map(|&a| rational::factorial(a as u64)).product();
        let vars: Vec<(&str, u8)> =
            names.iter().zip(&alpha).filter(|(_, &a)| a > 0).map(|(n, &a)| (*n, a as u8)).collect();
        out = out.add(&TruncatedSeries::monomial(tctx, m, &vars, c / denom))?;
    }
    Ok(out)
}

/// The outgoing data `(primitive direction, weight, coefficient)` of the
/// collision of `1 + c1 z^{w1 m1}` with `1 + c2 z^{w2 m2}`, or `None` when
/// `w1 m1 + w2 m2 = 0`.
pub(crate) fn collision_data(
    w1: u32,
    m1: LatticeVector,
    c1: &Q,
    w2: u32,
    m2: LatticeVector,
    c2: &Q,
) -> Option<(LatticeVector, u32, Q)> {
    let v = m1 * w1 as i64 + m2 * w2 as i64;
    if v.is_zero() {
        return None;
    }
    let w_out = v.index().expect("nonzero");
    let coef = c1 * c2 * rational::q(w_out * m1.wedge(&m2).abs());
    Some((v.primitive().expect("nonzero"), w_out as u32, coef))
}

/// Places the lines at seeded offsets and runs collision rounds, retrying
/// with the next seed while the configuration is not general. Returns the
/// walls, the number of productive rounds, the seed used and the number of
/// attempts.
pub(crate) fn perturb_lines(
    lines: &[LineSeed],
    cap: u32,
    seed: u64,
    max_attempts: u32,
) -> Result<(Vec<PerturbedWall>, u32, u64, u32)> {
    let mut last = seed;
    for attempt in 0..max_attempts.max(1) {
        let s = seed.wrapping_add(attempt as u64);
        last = s;
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let scale = rational::q(1i64 << 31);
        let mut walls: Vec<PerturbedWall> = lines
            .iter()
            .map(|l| {
                let x: i64 = rng.gen_range(-(1i64 << 31)..(1i64 << 31));
                let y: i64 = rng.gen_range(-(1i64 << 31)..(1i64 << 31));
                PerturbedWall {
                    kind: WallKind::Line,
                    base: Point::new(rational::q(x) / &scale, rational::q(y) / &scale),
                    direction: l.direction,
                    weight: l.weight,
                    coef: l.coef.clone(),
                    mask: l.mask,
                    round: 0,
                    provenance: l.provenance.clone(),
                }
            })
            .collect();
        let rounds = run_rounds(&mut walls, cap);
        if is_general(&walls, cap) {
            return Ok((walls, rounds, s, attempt + 1));
        }
    }
    Err(Error::Genericity { attempts: max_attempts.max(1), last_seed: last })
}

/// Collision point of two walls if it lies in the interior of both.
fn interior_meet(a: &PerturbedWall, b: &PerturbedWall) -> Option<Point> {
    let (p, s, r) = intersect_params(&a.base, a.direction, &b.base, b.direction)?;
    if a.kind == WallKind::Ray && !s.is_positive() {
        return None;
    }
    if b.kind == WallKind::Ray && !r.is_positive() {
        return None;
    }
    Some(p)
}

fn run_rounds(walls: &mut Vec<PerturbedWall>, cap: u32) -> u32 {
    let mut fresh = 0;
    let mut round = 0;
    loop {
        let len = walls.len();
        let mut added = Vec::new();
        for b in fresh..len {
            for a in 0..b {
                let (wa, wb) = (&walls[a], &walls[b]);
                if wa.mask & wb.mask != 0 || (wa.mask | wb.mask).count_ones() > cap {
                    continue;
                }
                let Some(p) = interior_meet(wa, wb) else { continue };
                let Some((dir, w, coef)) =
                    collision_data(wa.weight, wa.direction, &wa.coef, wb.weight, wb.direction, &wb.coef)
                else {
                    continue;
                };
                if coef.is_zero() {
                    continue;
                }
                added.push(PerturbedWall {
                    kind: WallKind::Ray,
                    base: p,
                    direction: dir,
                    weight: w,
                    coef,
                    mask: wa.mask | wb.mask,
                    round: round + 1,
                    provenance: Provenance::Collision { parents: [a, b] },
                });
            }
        }
        if added.is_empty() {
            return round;
        }
        round += 1;
        fresh = len;
        walls.extend(added);
    }
}

/// No point lies on three walls with pairwise disjoint index sets whose
/// combined degree is within the cap.
fn is_general(walls: &[PerturbedWall], cap: u32) -> bool {
    let mut at: HashMap<Point, Vec<usize>> = HashMap::new();
    for b in 0..walls.len() {
        for a in 0..b {
            let (wa, wb) = (&walls[a], &walls[b]);
            if wa.mask & wb.mask != 0 || (wa.mask | wb.mask).count_ones() > cap {
                continue;
            }
            let Some((p, _, _)) = intersect_params(&wa.base, wa.direction, &wb.base, wb.direction) else { continue };
            if wa.locate(&p).is_none() || wb.locate(&p).is_none() {
                continue;
            }
            let list = at.entry(p).or_default();
            list.push(a);
            list.push(b);
        }
    }
    for list in at.values_mut() {
        list.sort_unstable();
        list.dedup();
        if list.len() < 3 {
            continue;
        }
        for (x, &i) in list.iter().enumerate() {
            for (y, &j) in list.iter().enumerate().skip(x + 1) {
                if walls[i].mask & walls[j].mask != 0 {
                    continue;
                }
                for &l in &list[y + 1..] {
                    let m = walls[l].mask;
                    if m & (walls[i].mask | walls[j].mask) == 0
                        && (m | walls[i].mask | walls[j].mask).count_ones() <= cap
                    {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The square-zero coefficient of a binomial wall: `(c, variable bitmask)`.
fn binomial_part(w: &Wall) -> Result<(Q, u64, u32)> {
    let ctx = w.context();
    let rest = w.function().sub(&TruncatedSeries::one(ctx))?;
    let mut terms = rest.terms();
    let (Some((mono, c)), None) = (terms.next(), terms.next()) else {
        return Err(Error::Collision(format!("wall function {} is not a binomial", w.function())));
    };
    if ctx.num_vars() > 64 {
        return Err(Error::Collision("more than 64 variables".into()));
    }
    let mut mask = 0u64;
    for (b, &e) in mono.exps.iter().enumerate() {
        if e > 1 || (e == 1 && !ctx.variables()[b].square_zero) {
            return Err(Error::Collision("wall coefficient is not a product of square-zero variables".into()));
        }
        if e == 1 {
            mask |= 1 << b;
        }
    }
    Ok((c.clone(), mask, mono.m.index()? as u32))
}

/// The ray produced by two binomial walls meeting at one interior point,
/// or `None` when their exponents cancel.
pub fn collide(w1: &Wall, w2: &Wall) -> Result<Option<Wall>> {
    w1.function().check_same(w2.function())?;
    let (c1, i1, k1) = binomial_part(w1)?;
    let (c2, i2, k2) = binomial_part(w2)?;
    if i1 & i2 != 0 {
        return Err(Error::Collision("index sets overlap".into()));
    }
    let Some((dir, w_out, coef)) = collision_data(k1, w1.direction(), &c1, k2, w2.direction(), &c2) else {
        return Ok(None);
    };
    let meet = intersect_params(&w1.base, w1.direction(), &w2.base, w2.direction())
        .map(|t| t.0)
        .filter(|p| w1.locate(p) == Some(Incidence::Interior) && w2.locate(p) == Some(Incidence::Interior))
        .ok_or_else(|| Error::Collision("supports do not meet in one interior point".into()))?;
    let ctx = w1.context();
    let exps: SmallVec<[u8; 12]> = (0..ctx.num_vars()).map(|b| (((i1 | i2) >> b) & 1) as u8).collect();
    let term = TruncatedSeries::from_monomial(ctx, Monomial { m: dir * w_out as i64, exps }, coef);
    let f = &TruncatedSeries::one(ctx) + &term;
    Ok(Some(Wall::new(WallKind::Ray, meet, dir, f)?))
}
