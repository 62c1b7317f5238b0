// SPDX-License-Identifier: Apache-2.0
//! Truncated multivariate formal power series over `Q`.
//!
//! A series is a finite sum of terms `c * z^m * v_1^{e_1} ... v_r^{e_r}`
//! where `z^m` is a Laurent monomial in `x = z^(1,0)`, `y = z^(0,1)` and the
//! `v_i` are formal variables of a [`RingContext`]. Every term whose total
//! formal degree exceeds the context order is discarded, and a square-zero
//! variable never appears with exponent above one.
//!
//! Terms are kept in a `BTreeMap`, so iteration follows the canonical
//! monomial order `(m.a, m.b, e_1, ..., e_r)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::rational::{self, Q};

/// Exponent of a formal variable. Orders are capped well below `u8::MAX`.
pub type Exp = u8;

pub const MAX_ORDER: u32 = 120;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub square_zero: bool,
}

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable { name: name.into(), square_zero: false }
    }

    pub fn square_zero(name: impl Into<String>) -> Self {
        Variable { name: name.into(), square_zero: true }
    }
}

/// Ordered formal variables and a truncation order `k`: everything of total
/// formal degree above `k` is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingContext {
    variables: Vec<Variable>,
    order: u32,
}

impl RingContext {
    pub fn new(variables: Vec<Variable>, order: u32) -> Result<Arc<Self>> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidContext(format!("order must lie in 1..={MAX_ORDER}, got {order}")));
        }
        for (i, v) in variables.iter().enumerate() {
            if v.name.is_empty() || v.name == "x" || v.name == "y" {
                return Err(Error::InvalidContext(format!("reserved or empty variable name {:?}", v.name)));
            }
            if variables[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidContext(format!("duplicate variable {:?}", v.name)));
            }
        }
        Ok(Arc::new(RingContext { variables, order }))
    }

    /// Context with ordinary (non-nilpotent) variables named as given.
    pub fn with_names(names: &[&str], order: u32) -> Result<Arc<Self>> {
        RingContext::new(names.iter().map(|n| Variable::new(*n)).collect(), order)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Same variables, different truncation order.
    pub fn with_order(&self, order: u32) -> Result<Arc<Self>> {
        RingContext::new(self.variables.clone(), order)
    }

    fn zero_exps(&self) -> SmallVec<[Exp; 12]> {
        SmallVec::from_elem(0, self.variables.len())
    }

    /// Whether an exponent vector survives truncation and nilpotency.
    fn admits(&self, exps: &[Exp]) -> bool {
        let deg: u32 = exps.iter().map(|&e| e as u32).sum();
        deg <= self.order
            && self.variables.iter().zip(exps).all(|(v, &e)| !v.square_zero || e <= 1)
    }
}

/// `z^m` times a monomial in the formal variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub m: LatticeVector,
    pub exps: SmallVec<[Exp; 12]>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }
}

/// An element of `k[M] (x) R` truncated at the context order.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    ctx: Arc<RingContext>,
    terms: BTreeMap<Monomial, Q>,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for TruncatedSeries {}

pub(crate) fn same_ctx(a: &Arc<RingContext>, b: &Arc<RingContext>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl TruncatedSeries {
    pub fn zero(ctx: &Arc<RingContext>) -> Self {
        TruncatedSeries { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &Arc<RingContext>) -> Self {
        Self::constant(ctx, Q::one())
    }

    pub fn constant(ctx: &Arc<RingContext>, c: Q) -> Self {
        Self::monomial(ctx, LatticeVector::ZERO, &[], c)
    }

    /// `z^m` with coefficient one.
    pub fn z(ctx: &Arc<RingContext>, m: LatticeVector) -> Self {
        Self::monomial(ctx, m, &[], Q::one())
    }

    pub fn x(ctx: &Arc<RingContext>) -> Self {
        Self::z(ctx, LatticeVector::E1)
    }

    pub fn y(ctx: &Arc<RingContext>) -> Self {
        Self::z(ctx, LatticeVector::E2)
    }

    /// The formal variable with the given name.
    pub fn var(ctx: &Arc<RingContext>, name: &str) -> Result<Self> {
        let i = ctx.index_of(name)?;
        let mut exps = ctx.zero_exps();
        exps[i] = 1;
        Ok(Self::from_monomial(ctx, Monomial { m: LatticeVector::ZERO, exps }, Q::one()))
    }

    /// `c * z^m * prod v^e` with the exponents given by variable name.
    pub fn monomial(ctx: &Arc<RingContext>, m: LatticeVector, vars: &[(&str, Exp)], c: Q) -> Self {
        let mut exps = ctx.zero_exps();
        for (name, e) in vars {
            let i = ctx.index_of(name).expect("unknown variable in monomial");
            exps[i] += e;
        }
        Self::from_monomial(ctx, Monomial { m, exps }, c)
    }

    pub fn from_monomial(ctx: &Arc<RingContext>, mono: Monomial, c: Q) -> Self {
        let mut s = Self::zero(ctx);
        assert_eq!(mono.exps.len(), ctx.num_vars(), "monomial arity does not match context");
        if !c.is_zero() && ctx.admits(&mono.exps) {
            s.terms.insert(mono, c);
        }
        s
    }

    /// Builds a series from raw terms, merging duplicates and normalising.
    pub fn from_terms(ctx: &Arc<RingContext>, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut s = Self::zero(ctx);
        for (mono, c) in terms {
            assert_eq!(mono.exps.len(), ctx.num_vars(), "monomial arity does not match context");
            if ctx.admits(&mono.exps) {
                s.add_term(mono, c);
            }
        }
        s
    }

    fn add_term(&mut self, mono: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(mono, c)| mono.m.is_zero() && mono.degree() == 0 && c.is_one())
                .unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Q)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Q {
        self.terms.get(mono).cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficient of `z^m * prod v^e`, exponents given by name.
    pub fn coeff(&self, m: LatticeVector, vars: &[(&str, Exp)]) -> Q {
        let mut exps = self.ctx.zero_exps();
        for (name, e) in vars {
            match self.ctx.index_of(name) {
                Ok(i) => exps[i] += e,
                Err(_) => return Q::zero(),
            }
        }
        self.coefficient(&Monomial { m, exps })
    }

    /// Smallest formal degree of a term, `None` for zero.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    /// Whether every term lies in the maximal ideal (formal degree >= 1).
    pub fn in_maximal_ideal(&self) -> bool {
        self.terms.keys().all(|m| m.degree() >= 1)
    }

    fn require_maximal_ideal(&self, what: &str) -> Result<()> {
        if self.in_maximal_ideal() {
            Ok(())
        } else {
            Err(Error::NotInMaximalIdeal(format!("{what}: {self}")))
        }
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(mono.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(mono.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        TruncatedSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), -v.clone())).collect(),
        }
    }

    /// Multiplies every term by `z^m`.
    pub fn shift(&self, m: LatticeVector) -> Self {
        TruncatedSeries {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mono, v)| (Monomial { m: mono.m + m, exps: mono.exps.clone() }, v.clone()))
                .collect(),
        }
    }

    /// Exact truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let ctx = &self.ctx;
        let order = ctx.order;
        if self.is_zero() || other.is_zero() {
            return Self::zero(ctx);
        }
        let nz: Vec<usize> = ctx
            .variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.square_zero)
            .map(|(i, _)| i)
            .collect();
        let mut rhs: Vec<(u32, &Monomial, &Q)> =
            other.terms.iter().map(|(m, c)| (m.degree(), m, c)).collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc: std::collections::HashMap<Monomial, Q> = std::collections::HashMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > order {
                continue;
            }
            let budget = order - da;
            for &(db, mb, cb) in &rhs {
                if db > budget {
                    break;
                }
                if nz.iter().any(|&i| ma.exps[i] + mb.exps[i] > 1) {
                    continue;
                }
                let mut exps = ma.exps.clone();
                for (e, f) in exps.iter_mut().zip(&mb.exps) {
                    *e += *f;
                }
                let mono = Monomial { m: ma.m + mb.m, exps };
                let prod = ca * cb;
                match acc.get_mut(&mono) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(mono, prod);
                    }
                }
            }
        }
        TruncatedSeries {
            ctx: ctx.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// `self^e` for `e >= 0`.
    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(&self.ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Splits `self = 1 + g`, failing unless `g` lies in the maximal ideal.
    fn unit_part(&self, what: &str) -> Result<Self> {
        let g = self.sub(&Self::one(&self.ctx))?;
        if !g.in_maximal_ideal() {
            return Err(Error::NotInMaximalIdeal(format!("{what} needs constant term 1, got {self}")));
        }
        Ok(g)
    }

    /// `self^e` for any integer `e`; negative powers require `self = 1 mod m_R`.
    pub fn int_pow(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            return Ok(self.pow(e as u32));
        }
        let g = self.unit_part("negative power")?;
        Ok(geometric_inverse(&g).pow((-e) as u32))
    }

    /// `log(1 + g) = sum_{i>=1} (-1)^{i+1} g^i / i`.
    pub fn log_one_plus(&self) -> Result<Self> {
        self.require_maximal_ideal("log_one_plus")?;
        let mut out = Self::zero(&self.ctx);
        let mut power = self.clone();
        let mut i: i64 = 1;
        while !power.is_zero() {
            let c = rational::frac(if i % 2 == 1 { 1 } else { -1 }, i);
            out = out.add(&power.scale(&c))?;
            power = power.mul_unchecked(self);
            i += 1;
        }
        Ok(out)
    }

    /// `log(self)` for `self = 1 mod m_R`.
    pub fn log(&self) -> Result<Self> {
        self.unit_part("log")?.log_one_plus()
    }

    /// `exp(h) = sum_{i>=0} h^i / i!`.
    pub fn exp_series(&self) -> Result<Self> {
        self.require_maximal_ideal("exp_series")?;
        let mut out = Self::one(&self.ctx);
        let mut term = Self::one(&self.ctx);
        let mut i: i64 = 1;
        loop {
            term = term.mul_unchecked(self).scale(&rational::frac(1, i));
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
            i += 1;
        }
        Ok(out)
    }

    /// Truncates into `target`, which must have the same variables.
    pub fn truncate_to(&self, target: &Arc<RingContext>) -> Result<Self> {
        if target.variables != self.ctx.variables {
            return Err(Error::ContextMismatch);
        }
        Ok(Self::from_terms(target, self.terms.iter().map(|(m, c)| (m.clone(), c.clone()))))
    }

    /// Embeds into `target` matching variables by name; every variable with
    /// a nonzero exponent must exist in `target`.
    pub fn embed(&self, target: &Arc<RingContext>) -> Result<Self> {
        let map: Vec<usize> = self
            .ctx
            .variables
            .iter()
            .map(|v| target.index_of(&v.name).unwrap_or(usize::MAX))
            .collect();
        let mut out = Self::zero(target);
        for (mono, c) in &self.terms {
            let mut exps = target.zero_exps();
            for (i, &e) in mono.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if map[i] == usize::MAX {
                    return Err(Error::UnknownVariable(self.ctx.variables[i].name.clone()));
                }
                exps[map[i]] = e;
            }
            if target.admits(&exps) {
                out.add_term(Monomial { m: mono.m, exps }, c.clone());
            }
        }
        Ok(out)
    }

    /// The ring homomorphism into `target` sending each variable named in
    /// `replacements` to the given series and every other variable to the
    /// variable of the same name in `target`.
    pub fn substitute(
        &self,
        target: &Arc<RingContext>,
        replacements: &BTreeMap<String, TruncatedSeries>,
    ) -> Result<Self> {
        for (name, r) in replacements {
            self.ctx.index_of(name)?;
            if !same_ctx(r.context(), target) {
                return Err(Error::ContextMismatch);
            }
        }
        let images: Vec<Option<TruncatedSeries>> = self
            .ctx
            .variables
            .iter()
            .map(|v| replacements.get(&v.name).cloned().or_else(|| Self::var(target, &v.name).ok()))
            .collect();
        let mut cache: Vec<Vec<TruncatedSeries>> = images
            .iter()
            .map(|s| match s {
                Some(s) => vec![Self::one(target), s.clone()],
                None => Vec::new(),
            })
            .collect();
        let mut out = Self::zero(target);
        for (mono, c) in &self.terms {
            for (i, &e) in mono.exps.iter().enumerate() {
                if e > 0 && images[i].is_none() {
                    return Err(Error::UnknownVariable(self.ctx.variables[i].name.clone()));
                }
            }
            let mut prod = Self::monomial(target, mono.m, &[], c.clone());
            for (i, &e) in mono.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let image = images[i].as_ref().expect("checked above");
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul_unchecked(image);
                    cache[i].push(next);
                }
                prod = prod.mul_unchecked(&cache[i][e as usize]);
                if prod.is_zero() {
                    break;
                }
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    /// The image under `var -> sum(replacements)`, the inclusion of
    /// `t_i -> u_i1 + ... + u_ik` into a square-zero ring.
    pub fn substitute_sum(&self, target: &Arc<RingContext>, var: &str, replacements: &[&str]) -> Result<Self> {
        let mut sum = Self::zero(target);
        for r in replacements {
            let i = target.index_of(r)?;
            if !target.variables[i].square_zero {
                return Err(Error::InvalidArgument(format!("replacement variable {r:?} is not square-zero")));
            }
            sum = sum.add(&Self::var(target, r)?)?;
        }
        let mut map = BTreeMap::new();
        map.insert(var.to_string(), sum);
        self.substitute(target, &map)
    }

    /// Sum of the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial, &Q) -> bool) -> Self {
        TruncatedSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(m, c)| keep(m, c)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Terms of exactly formal degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        self.filter(|m, _| m.degree() == d)
    }

    /// Distinct Laurent exponents carried by the series.
    pub fn laurent_support(&self) -> Vec<LatticeVector> {
        let mut v: Vec<LatticeVector> = self.terms.keys().map(|m| m.m).collect();
        v.dedup();
        v
    }

    /// Canonical JSON term list.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.terms.iter().map(|(m, c)| term_json(&self.ctx, m, c, true)).collect())
    }

    /// Parses the canonical term list into `ctx`.
    pub fn from_json(ctx: &Arc<RingContext>, value: &serde_json::Value) -> Result<Self> {
        let terms: Vec<TermRecord> = serde_json::from_value(value.clone())?;
        Self::from_records(ctx, &terms)
    }

    pub(crate) fn from_records(ctx: &Arc<RingContext>, terms: &[TermRecord]) -> Result<Self> {
        let mut out = Self::zero(ctx);
        for t in terms {
            let mut exps = ctx.zero_exps();
            for (name, &e) in &t.vars {
                let i = ctx.index_of(name)?;
                if e > MAX_ORDER {
                    return Err(Error::Parse(format!("exponent {e} too large")));
                }
                exps[i] = exps[i].saturating_add(e as Exp);
            }
            let m = t.m.map(LatticeVector::from).unwrap_or(LatticeVector::ZERO);
            if ctx.admits(&exps) {
                out.add_term(Monomial { m, exps }, t.coef.clone());
            }
        }
        Ok(out)
    }
}

pub(crate) fn term_json(ctx: &RingContext, mono: &Monomial, c: &Q, with_m: bool) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    if with_m {
        obj.insert("m".into(), serde_json::json!([mono.m.a, mono.m.b]));
    }
    let mut vars = serde_json::Map::new();
    for (v, &e) in ctx.variables.iter().zip(&mono.exps) {
        if e > 0 {
            vars.insert(v.name.clone(), serde_json::json!(e));
        }
    }
    obj.insert("vars".into(), serde_json::Value::Object(vars));
    obj.insert("coef".into(), serde_json::Value::String(rational::to_string(c)));
    serde_json::Value::Object(obj)
}

/// One serialised term: `{"m":[a,b], "vars":{name:exp}, "coef":"p/q"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct TermRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<[i64; 2]>,
    #[serde(default)]
    pub vars: BTreeMap<String, u32>,
    #[serde(serialize_with = "rational::serialize", deserialize_with = "rational::deserialize")]
    pub coef: Q,
}

/// `(1 + g)^{-1}` by the geometric series.
fn geometric_inverse(g: &TruncatedSeries) -> TruncatedSeries {
    let ctx = g.context();
    let mut out = TruncatedSeries::one(ctx);
    let mut power = TruncatedSeries::one(ctx);
    let minus_g = g.neg();
    loop {
        power = power.mul_unchecked(&minus_g);
        if power.is_zero() {
            break;
        }
        for (m, c) in power.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
    }
    out
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in self.ctx.variables.iter().zip(&mono.exps) {
                match e {
                    0 => {}
                    1 => factors.push(v.name.clone()),
                    _ => factors.push(format!("{}^{}", v.name, e)),
                }
            }
            for (name, e) in [("x", mono.m.a), ("y", mono.m.b)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() || !abs.is_one() {
                factors.insert(0, rational::to_string(&abs));
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&TruncatedSeries> for &TruncatedSeries {
            type Output = TruncatedSeries;
            /// Panics on context mismatch; use the fallible method to handle it.
            fn $method(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                TruncatedSeries::$inner(self, rhs).expect("series from different contexts")
            }
        }
    };
}

forward_op!(Add, add, add);
forward_op!(Sub, sub, sub);
forward_op!(Mul, mul, mul);

impl std::ops::Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn ctx2(order: u32) -> Arc<RingContext> {
        RingContext::with_names(&["t1", "t2"], order).unwrap()
    }

    fn v(ctx: &Arc<RingContext>, n: &str) -> TruncatedSeries {
        TruncatedSeries::var(ctx, n).unwrap()
    }

    #[test]
    fn context_validation() {
        assert!(RingContext::with_names(&["t", "t"], 3).is_err());
        assert!(RingContext::with_names(&["x"], 3).is_err());
        assert!(RingContext::with_names(&["t"], 0).is_err());
    }

    #[test]
    fn product_of_binomials() {
        let ctx = ctx2(4);
        let x = TruncatedSeries::x(&ctx);
        let y = TruncatedSeries::y(&ctx);
        let one = TruncatedSeries::one(&ctx);
        let a = &one + &(&v(&ctx, "t1") * &x);
        let b = &one + &(&v(&ctx, "t2") * &y);
        let p = &a * &b;
        let xy = TruncatedSeries::z(&ctx, LatticeVector::new(1, 1));
        let expected = &(&(&one + &(&v(&ctx, "t1") * &x)) + &(&v(&ctx, "t2") * &y))
            + &(&(&v(&ctx, "t1") * &v(&ctx, "t2")) * &xy);
        assert_eq!(p, expected);
        assert_eq!(&one * &p, p);
    }

    #[test]
    fn square_zero_multiplication() {
        let ctx = RingContext::new(vec![Variable::square_zero("u11")], 4).unwrap();
        let one = TruncatedSeries::one(&ctx);
        let f = &one + &(&v(&ctx, "u11") * &TruncatedSeries::x(&ctx));
        let sq = &f * &f;
        let expected = &one + &(&v(&ctx, "u11") * &TruncatedSeries::x(&ctx)).scale(&q(2));
        assert_eq!(sq, expected);
    }

    #[test]
    fn mul_rejects_context_mismatch() {
        let a = TruncatedSeries::one(&ctx2(3));
        let b = TruncatedSeries::one(&ctx2(4));
        assert!(matches!(a.mul(&b), Err(Error::ContextMismatch)));
    }

    #[test]
    fn mercator_series() {
        let ctx = RingContext::with_names(&["t"], 3).unwrap();
        let tx = &v(&ctx, "t") * &TruncatedSeries::x(&ctx);
        let l = tx.log_one_plus().unwrap();
        assert_eq!(l.coeff(LatticeVector::new(1, 0), &[("t", 1)]), q(1));
        assert_eq!(l.coeff(LatticeVector::new(2, 0), &[("t", 2)]), frac(-1, 2));
        assert_eq!(l.coeff(LatticeVector::new(3, 0), &[("t", 3)]), frac(1, 3));
        assert_eq!(l.len(), 3);
        assert!(TruncatedSeries::zero(&ctx).log_one_plus().unwrap().is_zero());
    }

    #[test]
    fn log_of_inverse_fourth_power() {
        let ctx = RingContext::with_names(&["q"], 3).unwrap();
        let one = TruncatedSeries::one(&ctx);
        let f = (&one - &v(&ctx, "q")).int_pow(-4).unwrap();
        let l = f.log().unwrap();
        assert_eq!(l.coeff(LatticeVector::ZERO, &[("q", 1)]), q(4));
        assert_eq!(l.coeff(LatticeVector::ZERO, &[("q", 2)]), q(2));
        assert_eq!(l.coeff(LatticeVector::ZERO, &[("q", 3)]), frac(4, 3));
    }

    #[test]
    fn log_requires_maximal_ideal() {
        let ctx = ctx2(3);
        let bad = &TruncatedSeries::x(&ctx) + &v(&ctx, "t1");
        assert!(matches!(bad.log_one_plus(), Err(Error::NotInMaximalIdeal(_))));
        assert!(matches!(bad.exp_series(), Err(Error::NotInMaximalIdeal(_))));
    }

    #[test]
    fn exponential_basics() {
        let ctx = ctx2(6);
        assert!(TruncatedSeries::zero(&ctx).exp_series().unwrap().is_one());
        let one = TruncatedSeries::one(&ctx);
        let f = &one + &(&(&v(&ctx, "t1") * &v(&ctx, "t2")) * &TruncatedSeries::z(&ctx, LatticeVector::new(1, 1)));
        let back = f.log().unwrap().exp_series().unwrap();
        assert_eq!(back, f);

        let h = (&v(&ctx, "t1") * &TruncatedSeries::z(&ctx, LatticeVector::new(2, -1))).scale(&frac(3, 2));
        let e = h.exp_series().unwrap();
        assert_eq!(e.coeff(LatticeVector::new(4, -2), &[("t1", 2)]), frac(9, 8));
        assert_eq!(e.coeff(LatticeVector::new(6, -3), &[("t1", 3)]), frac(27, 48));
    }

    #[test]
    fn integer_powers() {
        let ctx = RingContext::with_names(&["q"], 3).unwrap();
        let one = TruncatedSeries::one(&ctx);
        let qv = v(&ctx, "q");
        let inv = (&one + &qv).int_pow(-1).unwrap();
        let expected = TruncatedSeries::from_terms(
            &ctx,
            (0..=3u8).map(|i| {
                let mut exps = SmallVec::new();
                exps.push(i);
                (Monomial { m: LatticeVector::ZERO, exps }, if i % 2 == 0 { q(1) } else { q(-1) })
            }),
        );
        assert_eq!(inv, expected);
        assert!((&one + &qv).int_pow(0).unwrap().is_one());
        assert!(TruncatedSeries::x(&ctx).int_pow(-1).is_err());

        let ctx = ctx2(4);
        let one = TruncatedSeries::one(&ctx);
        let w = &(&v(&ctx, "t1") * &v(&ctx, "t2")) * &TruncatedSeries::z(&ctx, LatticeVector::new(1, 1));
        let p = (&one - &w).int_pow(-4).unwrap();
        let expected = &(&one + &w.scale(&q(4))) + &(&w * &w).scale(&q(10));
        assert_eq!(p, expected);
    }

    #[test]
    fn substitution_into_square_zero_ring() {
        let src = RingContext::with_names(&["t"], 2).unwrap();
        let dst = RingContext::new(vec![Variable::square_zero("u1"), Variable::square_zero("u2")], 2).unwrap();
        let one = TruncatedSeries::one(&src);
        let tx = &v(&src, "t") * &TruncatedSeries::x(&src);
        let img = (&one + &tx).substitute_sum(&dst, "t", &["u1", "u2"]).unwrap();
        let dx = TruncatedSeries::x(&dst);
        let expected = &TruncatedSeries::one(&dst) + &(&(&v(&dst, "u1") + &v(&dst, "u2")) * &dx);
        assert_eq!(img, expected);

        let t2 = (&v(&src, "t") * &v(&src, "t")).substitute_sum(&dst, "t", &["u1", "u2"]).unwrap();
        assert_eq!(t2, (&v(&dst, "u1") * &v(&dst, "u2")).scale(&q(2)));

        // log(1 + t x) = u1 x + u2 x - u1 u2 x^2
        let l = tx.log_one_plus().unwrap().substitute_sum(&dst, "t", &["u1", "u2"]).unwrap();
        let x2 = TruncatedSeries::z(&dst, LatticeVector::new(2, 0));
        let expected = &(&(&v(&dst, "u1") + &v(&dst, "u2")) * &dx) - &(&(&v(&dst, "u1") * &v(&dst, "u2")) * &x2);
        assert_eq!(l, expected);

        assert!(tx.substitute_sum(&dst, "s", &["u1"]).is_err());
        assert!(tx.substitute_sum(&dst, "t", &["u9"]).is_err());
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let ctx = ctx2(3);
        let f = &(&TruncatedSeries::one(&ctx) + &(&v(&ctx, "t1") * &TruncatedSeries::x(&ctx)).scale(&frac(-3, 4)))
            + &v(&ctx, "t2");
        let j = f.to_json();
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(
            text,
            r#"[{"m":[0,0],"vars":{},"coef":"1"},{"m":[0,0],"vars":{"t2":1},"coef":"1"},{"m":[1,0],"vars":{"t1":1},"coef":"-3/4"}]"#
        );
        assert_eq!(TruncatedSeries::from_json(&ctx, &j).unwrap(), f);
    }
}
