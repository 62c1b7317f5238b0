// SPDX-License-Identifier: Apache-2.0
//! Enumerative invariants read off scattered functions, together with the
//! closed-form multiple-cover contributions and BPS inversion.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::rational::{self, Q};
use crate::scattering::{scatter_at_origin, ScatteringDiagram, WallKind};
use crate::series::{Monomial, RingContext, TruncatedSeries, Variable};
use crate::tropical::WeightData;

/// A sequence of non-negative parts; order matters and zeros are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartition {
    parts: Vec<u32>,
}

impl OrderedPartition {
    pub fn new(parts: Vec<u32>) -> Self {
        OrderedPartition { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Every ordered partition of `size` with `len` parts, in lexicographic
    /// order of the part sequences.
    pub fn all(size: u32, len: usize) -> Vec<OrderedPartition> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(len);
        fn go(left: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<OrderedPartition>) {
            if slots == 0 {
                if left == 0 {
                    out.push(OrderedPartition::new(cur.clone()));
                }
                return;
            }
            if slots == 1 {
                cur.push(left);
                out.push(OrderedPartition::new(cur.clone()));
                cur.pop();
                return;
            }
            for p in 0..=left {
                cur.push(p);
                go(left - p, slots - 1, cur, out);
                cur.pop();
            }
        }
        go(size, len, &mut cur, &mut out);
        out
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("-");
        }
        let s: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        f.write_str(&s.join("+"))
    }
}

impl FromStr for OrderedPartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" {
            return Ok(OrderedPartition::new(Vec::new()));
        }
        s.split('+')
            .map(|p| p.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad partition part in {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(OrderedPartition::new)
    }
}

/// Ordered partitions indexed by level `r = 1..d`, each part of level `r`
/// divisible by `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedPartition {
    levels: Vec<OrderedPartition>,
}

impl GradedPartition {
    pub fn new(levels: Vec<OrderedPartition>) -> Result<Self> {
        for (i, level) in levels.iter().enumerate() {
            let r = i as u32 + 1;
            if level.parts.iter().any(|p| p % r != 0) {
                return Err(Error::InvalidArgument(format!("level {r} part of {level} is not divisible by {r}")));
            }
        }
        Ok(GradedPartition { levels })
    }

    /// The single-level graded partition.
    pub fn ungraded(p: OrderedPartition) -> Self {
        GradedPartition { levels: vec![p] }
    }

    pub fn levels(&self) -> &[OrderedPartition] {
        &self.levels
    }

    pub fn size(&self) -> u32 {
        self.levels.iter().map(OrderedPartition::size).sum()
    }

    /// Formal degree of the monomial `prod (s^r_xi)^{p^r_xi / r}`.
    pub fn degree(&self) -> u32 {
        self.levels.iter().enumerate().map(|(i, l)| l.size() / (i as u32 + 1)).sum()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.levels.iter().map(OrderedPartition::len).collect()
    }
}

impl fmt::Display for GradedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.levels.iter().map(ToString::to_string).collect();
        f.write_str(&s.join("/"))
    }
}

impl FromStr for GradedPartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GradedPartition::new(s.split('/').map(str::parse).collect::<Result<Vec<_>>>()?)
    }
}

/// Canonical key of a tuple of partitions, e.g. `2+1+0|1+1+1`.
pub fn partition_key<P: fmt::Display>(parts: &[P]) -> String {
    parts.iter().map(ToString::to_string).collect::<Vec<_>>().join("|")
}

/// Exact values under canonical string keys, in insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantTable {
    name: String,
    key_header: String,
    entries: Vec<(String, Q)>,
}

impl InvariantTable {
    pub fn new(name: impl Into<String>, key_header: impl Into<String>) -> Self {
        InvariantTable { name: name.into(), key_header: key_header.into(), entries: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Inserts or replaces.
    pub fn insert(&mut self, key: impl Into<String>, value: Q) {
        let key = key.into();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Q> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, Q)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{},value\n", self.key_header);
        for (k, v) in &self.entries {
            s.push_str(&format!("{},{}\n", k, rational::to_string(v)));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(k, v)| serde_json::json!({ "key": k, "value": rational::to_string(v) }))
            .collect();
        serde_json::json!({ "name": self.name, "key": self.key_header, "entries": entries })
    }
}

/// The commutator input `{(R(1,0), (1+t1 x)^l1), (R(0,1), (1+t2 y)^l2)}`.
pub fn commutator_diagram(l1: u32, l2: u32, order: u32) -> Result<ScatteringDiagram> {
    let ctx = RingContext::with_names(&["t1", "t2"], order)?;
    let one = TruncatedSeries::one(&ctx);
    let t1x = TruncatedSeries::var(&ctx, "t1")?.shift(LatticeVector::E1);
    let t2y = TruncatedSeries::var(&ctx, "t2")?.shift(LatticeVector::E2);
    ScatteringDiagram::lines_through_origin(
        &ctx,
        &[(LatticeVector::E1, (&one + &t1x).pow(l1)), (LatticeVector::E2, (&one + &t2y).pow(l2))],
    )
}

fn check_first_quadrant(direction: LatticeVector) -> Result<()> {
    if direction.a <= 0 || direction.b <= 0 || !direction.is_primitive() {
        return Err(Error::InvalidArgument(format!(
            "direction {direction} must be primitive with both entries positive"
        )));
    }
    Ok(())
}

/// Order needed to read `c^1..c^max_k` in direction `(a,b)`.
pub fn commutator_required_order(direction: LatticeVector, max_k: u32) -> u32 {
    (direction.a + direction.b) as u32 * max_k
}

/// `c^k_{a,b}(l1, l2)` for every `k` with `(a + b) k` within the order.
pub fn commutator_coeffs(l1: u32, l2: u32, direction: LatticeVector, order: u32) -> Result<InvariantTable> {
    check_first_quadrant(direction)?;
    let scattered = scatter_at_origin(&commutator_diagram(l1, l2, order)?)?;
    commutator_coeffs_from(&scattered, direction)
}

/// Reads `c^k` from a scattered commutator diagram over `t1, t2`.
pub fn commutator_coeffs_from(scattered: &ScatteringDiagram, direction: LatticeVector) -> Result<InvariantTable> {
    check_first_quadrant(direction)?;
    let ctx = scattered.context();
    let logf = match scattered.wall_at_origin(WallKind::Ray, direction) {
        Some(w) => w.logf()?,
        None => TruncatedSeries::zero(ctx),
    };
    let (a, b) = (direction.a as u32, direction.b as u32);
    let mut table = InvariantTable::new(format!("c^k_{direction}"), "k");
    let mut k = 1;
    while (a + b) * k <= ctx.order() {
        let coef = logf.coeff(direction * k as i64, &[("t1", (a * k) as u8), ("t2", (b * k) as u8)]);
        table.insert(k.to_string(), coef / rational::q(k as i64));
        k += 1;
    }
    Ok(table)
}

/// One incoming line of a Gromov-Witten geometry: its primitive direction
/// and the number of factors `1 + s^r_xi z^{r m}` at each level `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GwLine {
    pub direction: LatticeVector,
    pub lengths: Vec<usize>,
}

/// The diagram `prod_r prod_xi (1 + s^r_xi z^{r m_i})` on each line, with
/// one formal variable per factor.
#[derive(Clone, Debug)]
pub struct GwGeometry {
    lines: Vec<GwLine>,
    /// `names[i][r-1][xi-1]`.
    names: Vec<Vec<Vec<String>>>,
    diagram: ScatteringDiagram,
}

const LINE_LETTERS: [&str; 6] = ["s", "t", "u", "v", "w", "y"];

impl GwGeometry {
    pub fn new(lines: Vec<GwLine>, order: u32) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::InvalidArgument("at least one line is required".into()));
        }
        let mut names = Vec::new();
        let mut vars = Vec::new();
        for (i, line) in lines.iter().enumerate() {
            if !line.direction.is_primitive() {
                return Err(Error::InvalidArgument(format!("direction {} is not primitive", line.direction)));
            }
            let letter = LINE_LETTERS.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("a{}_", i + 1));
            let mut per_level = Vec::new();
            for (ri, &len) in line.lengths.iter().enumerate() {
                let level: Vec<String> = (1..=len)
                    .map(|xi| if ri == 0 { format!("{letter}{xi}") } else { format!("{letter}{xi}^{}", ri + 1) })
                    .collect();
                vars.extend(level.iter().map(|n| Variable::new(n.clone())));
                per_level.push(level);
            }
            names.push(per_level);
        }
        let ctx = RingContext::new(vars, order)?;
        let one = TruncatedSeries::one(&ctx);
        let mut walls = Vec::new();
        for (line, per_level) in lines.iter().zip(&names) {
            let mut f = one.clone();
            for (ri, level) in per_level.iter().enumerate() {
                for name in level {
                    let factor = &one + &TruncatedSeries::var(&ctx, name)?.shift(line.direction * (ri as i64 + 1));
                    f = f.mul(&factor)?;
                }
            }
            walls.push((line.direction, f));
        }
        let diagram = ScatteringDiagram::lines_through_origin(&ctx, &walls)?;
        Ok(GwGeometry { lines, names, diagram })
    }

    /// Two lines with a single level each.
    pub fn commutator(m1: LatticeVector, m2: LatticeVector, l1: usize, l2: usize, order: u32) -> Result<Self> {
        Self::new(
            vec![GwLine { direction: m1, lengths: vec![l1] }, GwLine { direction: m2, lengths: vec![l2] }],
            order,
        )
    }

    pub fn lines(&self) -> &[GwLine] {
        &self.lines
    }

    pub fn diagram(&self) -> &ScatteringDiagram {
        &self.diagram
    }

    pub fn context(&self) -> &Arc<RingContext> {
        self.diagram.context()
    }

    pub fn variable_names(&self) -> &[Vec<Vec<String>>] {
        &self.names
    }

    pub fn scatter(&self) -> Result<ScatteringDiagram> {
        scatter_at_origin(&self.diagram)
    }

    /// `log f` attached to the outgoing primitive direction. With two lines
    /// and `out` equal to one of them, this is the input line's function.
    /// Otherwise it is the scattered ray along `out` alone.
    pub fn log_f_out(&self, scattered: &ScatteringDiagram, out: LatticeVector) -> Result<TruncatedSeries> {
        let ctx = self.context();
        if self.lines.len() == 2 {
            if let Some(line) = self.lines.iter().position(|l| l.direction == out) {
                let w = scattered
                    .wall_at_origin(WallKind::Line, out)
                    .or_else(|| self.diagram.walls().get(line))
                    .ok_or_else(|| Error::InvalidArgument(format!("no line along {out}")))?;
                return w.logf();
            }
        }
        match scattered.wall_at_origin(WallKind::Ray, out) {
            Some(w) => w.logf(),
            None => Ok(TruncatedSeries::zero(ctx)),
        }
    }

    fn check_shape(&self, g: &[GradedPartition]) -> Result<()> {
        if g.len() != self.lines.len() {
            return Err(Error::InvalidArgument("one graded partition per line is required".into()));
        }
        for (gi, line) in g.iter().zip(&self.lines) {
            if gi.lengths() != line.lengths {
                return Err(Error::InvalidArgument(format!(
                    "partition {gi} does not have level lengths {:?}",
                    line.lengths
                )));
            }
        }
        Ok(())
    }

    /// `sum |G_i| m_i`.
    pub fn direction_of(&self, g: &[GradedPartition]) -> LatticeVector {
        g.iter()
            .zip(&self.lines)
            .fold(LatticeVector::ZERO, |acc, (gi, l)| acc + l.direction * gi.size() as i64)
    }

    fn monomial(&self, g: &[GradedPartition], m: LatticeVector) -> Result<Monomial> {
        let ctx = self.context();
        let mut exps = smallvec::SmallVec::from_elem(0u8, ctx.num_vars());
        for (gi, per_level) in g.iter().zip(&self.names) {
            for (ri, (level, names)) in gi.levels().iter().zip(per_level).enumerate() {
                for (&p, name) in level.parts().iter().zip(names) {
                    exps[ctx.index_of(name)?] = (p / (ri as u32 + 1)) as u8;
                }
            }
        }
        Ok(Monomial { m, exps })
    }

    /// `N_m[G]` from the coefficient of `s^{G_1} t^{G_2} ... z^{k m'_out}`
    /// in `log f_{m'_out}`, which is `k N_m[G]`.
    pub fn invariant(&self, scattered: &ScatteringDiagram, g: &[GradedPartition]) -> Result<Q> {
        self.check_shape(g)?;
        let degree: u32 = g.iter().map(GradedPartition::degree).sum();
        if degree > self.context().order() {
            return Err(Error::InsufficientOrder { have: self.context().order(), need: degree });
        }
        let m = self.direction_of(g);
        let k = m.index().map_err(|_| Error::InvalidArgument("partition sizes give the zero direction".into()))?;
        let logf = self.log_f_out(scattered, m.primitive()?)?;
        Ok(logf.coefficient(&self.monomial(g, m)?) / rational::q(k))
    }

    /// Every `N_m[G]` with `sum |G_i| m_i` a positive multiple of `out` and
    /// monomial degree within the order, zero values included.
    pub fn table(&self, scattered: &ScatteringDiagram, out: LatticeVector) -> Result<InvariantTable> {
        if !out.is_primitive() {
            return Err(Error::InvalidArgument(format!("outgoing direction {out} is not primitive")));
        }
        let order = self.context().order();
        let per_line: Vec<Vec<GradedPartition>> =
            self.lines.iter().map(|l| graded_partitions_up_to(&l.lengths, order)).collect();
        let logf = self.log_f_out(scattered, out)?;
        let mut table = InvariantTable::new(format!("N[G] out {out}"), "partitions");
        let mut chosen: Vec<GradedPartition> = Vec::with_capacity(self.lines.len());
        let mut rows = Vec::new();
        self.combine(&per_line, order, &mut chosen, &mut |g| {
            let m = self.direction_of(g);
            if !m.is_zero() && m.same_ray(&out) {
                rows.push(g.to_vec());
            }
        });
        for g in rows {
            let m = self.direction_of(&g);
            let k = m.index()?;
            let v = logf.coefficient(&self.monomial(&g, m)?) / rational::q(k);
            table.insert(partition_key(&g), v);
        }
        Ok(table)
    }

    fn combine(
        &self,
        per_line: &[Vec<GradedPartition>],
        budget: u32,
        chosen: &mut Vec<GradedPartition>,
        visit: &mut dyn FnMut(&[GradedPartition]),
    ) {
        let i = chosen.len();
        if i == per_line.len() {
            visit(chosen);
            return;
        }
        for g in &per_line[i] {
            let d = g.degree();
            if d <= budget {
                chosen.push(g.clone());
                self.combine(per_line, budget - d, chosen, visit);
                chosen.pop();
            }
        }
    }
}

/// Graded partitions with the given level lengths and monomial degree at
/// most `max_degree`, ordered by degree and then lexicographically.
pub fn graded_partitions_up_to(lengths: &[usize], max_degree: u32) -> Vec<GradedPartition> {
    let slots: usize = lengths.iter().sum();
    let mut out = Vec::new();
    for deg in 0..=max_degree {
        for exps in OrderedPartition::all(deg, slots) {
            let mut levels = Vec::with_capacity(lengths.len());
            let mut pos = 0;
            for (ri, &len) in lengths.iter().enumerate() {
                let r = ri as u32 + 1;
                levels.push(OrderedPartition::new(exps.parts()[pos..pos + len].iter().map(|e| e * r).collect()));
                pos += len;
            }
            out.push(GradedPartition { levels });
        }
    }
    out
}

/// `N_m[(P_1, P_2)]` for the two-line geometry with `l1`, `l2` points on
/// lines of directions `m1`, `m2`, keyed like `2+1+0|1+1+1`.
pub fn gw_from_scattering(
    m1: LatticeVector,
    m2: LatticeVector,
    l1: usize,
    l2: usize,
    out: LatticeVector,
    order: u32,
) -> Result<InvariantTable> {
    let geo = GwGeometry::commutator(m1, m2, l1, l2, order)?;
    let scattered = geo.scatter()?;
    geo.table(&scattered, out)
}

/// `N_m[G]` for lines with factors `(1 + s^r_xi z^{r m_i})`.
pub fn gw_graded(lines: Vec<GwLine>, out: LatticeVector, order: u32) -> Result<InvariantTable> {
    let geo = GwGeometry::new(lines, order)?;
    let scattered = geo.scatter()?;
    geo.table(&scattered, out)
}

/// `R_d = (-1)^{d-1} / d^2`.
pub fn r_d(d: u32) -> Q {
    r_rd(1, d)
}

/// `R^r_d = (-1)^{d-1} / (r d^2)`.
pub fn r_rd(r: u32, d: u32) -> Q {
    let sign = if d % 2 == 1 { 1 } else { -1 };
    rational::frac(sign, r as i64 * d as i64 * d as i64)
}

/// `M_P[d] = binom(d(w-1) - 1, d - 1) / d^2` with the generalised binomial.
pub fn m_p_d(w: u32, d: u32) -> Q {
    let top = d as i64 * (w as i64 - 1) - 1;
    rational::binomial(top, d as u64 - 1) / rational::q(d as i64 * d as i64)
}

/// `R_{P|w} = sum over compatible set partitions of prod_j R_{w_j}`.
///
/// A compatible set partition assigns each weight to one part of `P` so
/// that the weights assigned to part `j` sum to `p_j`.
pub fn r_compatible(p: &OrderedPartition, w: &[u32]) -> Q {
    fn count(w: &[u32], remaining: &mut [u32]) -> u64 {
        let Some((&first, rest)) = w.split_first() else {
            return remaining.iter().all(|&r| r == 0) as u64;
        };
        let mut total = 0;
        for j in 0..remaining.len() {
            if remaining[j] >= first {
                remaining[j] -= first;
                total += count(rest, remaining);
                remaining[j] += first;
            }
        }
        total
    }
    let mut remaining = p.parts().to_vec();
    let n = count(w, &mut remaining);
    if n == 0 {
        return Q::zero();
    }
    rational::q(n as i64) * w.iter().map(|&x| r_d(x)).product::<Q>()
}

/// Integer partitions of `n` as ascending vectors.
pub fn weight_vectors(n: u32) -> Vec<Vec<u32>> {
    fn go(left: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for part in min..=left {
            cur.push(part);
            go(left - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out
}

/// `N_m[P]` through the degeneration formula,
/// `sum_w N^rel(w) prod_i (prod_j w_ij / |Aut(w_i)|) R_{P_i|w_i}` with
/// `N^rel(w) = N^trop(w) / prod w_ij`.
pub fn degeneration_check(
    p: &[OrderedPartition],
    m: &[LatticeVector],
    ntrop_supplier: &mut dyn FnMut(&WeightData) -> Result<Q>,
) -> Result<Q> {
    if p.len() != m.len() {
        return Err(Error::InvalidArgument("one partition per direction is required".into()));
    }
    let choices: Vec<Vec<Vec<u32>>> = p.iter().map(|pi| weight_vectors(pi.size())).collect();
    let mut total = Q::zero();
    let mut idx = vec![0usize; p.len()];
    loop {
        let w: Vec<Vec<u32>> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
        let mut factor = Q::one();
        for (pi, wi) in p.iter().zip(&w) {
            factor *= r_compatible(pi, wi) / rational::q(aut_of(wi) as i64);
            if factor.is_zero() {
                break;
            }
        }
        if !factor.is_zero() {
            let data = WeightData::new(m.to_vec(), w)?;
            let nrel = ntrop_supplier(&data)? / data.weight_product();
            total += nrel * data.weight_product() * factor;
        }
        // Odometer over the weight-vector choices.
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(total);
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `|Aut(w)|` for a weight vector alone: the product of factorials of the
/// multiplicities of equal entries.
fn aut_of(w: &[u32]) -> u64 {
    let mut out = 1u64;
    let mut run = 0u64;
    for i in 0..w.len() {
        run = if i > 0 && w[i] == w[i - 1] { run + 1 } else { 1 };
        out *= run;
    }
    out
}

/// Whether a series to be inverted is an ordinary one or comes from an
/// orbifold (graded) geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Ordinary,
    Graded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpsReport {
    pub w: u32,
    pub n: Vec<Q>,
    pub integral: Vec<bool>,
    pub all_integral: bool,
}

impl BpsReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "w": self.w,
            "n": self.n.iter().map(rational::to_string).collect::<Vec<_>>(),
            "integral": self.integral,
            "all_integral": self.all_integral,
        })
    }
}

/// Solves `N[k] = sum_{d | k} n[k/d] M(d, (k/d) w)` for `n`, where
/// `M(d, v) = binom(d(v-1)-1, d-1) / d^2`. `big_n[0]` is `N[1]`.
pub fn bps_invert(big_n: &[Q], w: u32) -> Result<BpsReport> {
    if w == 0 {
        return Err(Error::InvalidArgument("w must be positive".into()));
    }
    let mut n: Vec<Q> = Vec::with_capacity(big_n.len());
    for k in 1..=big_n.len() as u32 {
        let mut v = big_n[k as usize - 1].clone();
        for d in 2..=k {
            if k % d == 0 {
                let e = k / d;
                v -= &n[e as usize - 1] * m_p_d(e * w, d);
            }
        }
        n.push(v);
    }
    let integral: Vec<bool> = n.iter().map(rational::is_integer).collect();
    let all_integral = integral.iter().all(|&b| b);
    Ok(BpsReport { w, n, integral, all_integral })
}

/// [`bps_invert`] refusing graded series, whose multiple-cover kernel is
/// not known.
pub fn bps_invert_checked(big_n: &[Q], w: u32, kind: SeriesKind) -> Result<BpsReport> {
    match kind {
        SeriesKind::Ordinary => bps_invert(big_n, w),
        SeriesKind::Graded => Err(Error::InvalidArgument(
            "BPS inversion is not defined for graded (orbifold) series: the multiple-cover kernel is unknown".into(),
        )),
    }
}

/// `N[k] = sum_{d | k} n[k/d] M(d, (k/d) w)`; the inverse of [`bps_invert`].
pub fn bps_aggregate(n: &[Q], w: u32) -> Vec<Q> {
    (1..=n.len() as u32)
        .map(|k| {
            (1..=k)
                .filter(|d| k % d == 0)
                .map(|d| {
                    let e = k / d;
                    &n[e as usize - 1] * m_p_d(e * w, d)
                })
                .sum()
        })
        .collect()
}
