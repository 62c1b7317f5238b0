// SPDX-License-Identifier: Apache-2.0
//! Log derivations of `k[M] (x) R`, the Lie bracket, wall-crossing
//! automorphisms `exp(log f d_n0)` and the operator logarithm of a composite.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::rational::{self, Q};
use crate::series::{same_ctx, Monomial, RingContext, TruncatedSeries};

/// `sum_i c_i z^{m_i} d_{n_i}`, stored as one vector in `N (x) Q` per
/// monomial `z^m * (formal monomial)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogDerivation {
    ctx: Arc<RingContext>,
    terms: BTreeMap<Monomial, (Q, Q)>,
}

/// One summand `c z^m d_n` of an element of the Lie algebra `h_R`, with
/// `n = n(m)` the rotated primitive normal of `m` and `c` a series in the
/// formal variables only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HTerm {
    pub coef: TruncatedSeries,
    pub m: LatticeVector,
    pub n: LatticeVector,
}

impl LogDerivation {
    pub fn zero(ctx: &Arc<RingContext>) -> Self {
        LogDerivation { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    /// `s d_n` for an arbitrary series `s`.
    pub fn from_series(s: &TruncatedSeries, n: LatticeVector) -> Self {
        let mut d = Self::zero(s.context());
        let (p, q) = (rational::q(n.a), rational::q(n.b));
        for (mono, c) in s.terms() {
            d.add_term(mono.clone(), (c * &p, c * &q));
        }
        d
    }

    /// `c z^m d_n` where `c` is a series in the formal variables.
    pub fn from_term(coef: &TruncatedSeries, m: LatticeVector, n: LatticeVector) -> Self {
        Self::from_series(&coef.shift(m), n)
    }

    fn add_term(&mut self, mono: Monomial, v: (Q, Q)) {
        let entry = self.terms.entry(mono.clone()).or_insert_with(|| (Q::zero(), Q::zero()));
        entry.0 += v.0;
        entry.1 += v.1;
        if entry.0.is_zero() && entry.1.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &(Q, Q))> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(Error::ContextMismatch);
        }
        let mut out = self.clone();
        for (mono, v) in &other.terms {
            out.add_term(mono.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (mono, (p, q)) in &self.terms {
            out.add_term(mono.clone(), (p * c, q * c));
        }
        out
    }

    /// Terms whose formal degree is exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        LogDerivation {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, v)| (m.clone(), v.clone())).collect(),
        }
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    /// Membership in `g_R`: every coefficient lies in the maximal ideal.
    pub fn in_g(&self) -> bool {
        self.terms.keys().all(|m| m.degree() >= 1)
    }

    /// Membership in `h_R`: every term has `m != 0` and `<m, n> = 0`.
    pub fn in_h(&self) -> bool {
        self.terms.iter().all(|(mono, (p, q))| {
            !mono.m.is_zero() && (rational::q(mono.m.a) * p + rational::q(mono.m.b) * q).is_zero()
        })
    }

    /// The derivation `z^m -> <m, n> z^m` extended linearly; formal
    /// variables are constants.
    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        if !same_ctx(&self.ctx, f.context()) {
            return Err(Error::ContextMismatch);
        }
        let mut out = TruncatedSeries::zero(&self.ctx);
        for (mono, (p, q)) in &self.terms {
            let term = TruncatedSeries::from_monomial(&self.ctx, mono.clone(), Q::one());
            // Derivative of f along (p, q), then multiplied by the monomial.
            let df = TruncatedSeries::from_terms(
                &self.ctx,
                f.terms().filter_map(|(fm, fc)| {
                    let w = rational::q(fm.m.a) * p + rational::q(fm.m.b) * q;
                    if w.is_zero() {
                        None
                    } else {
                        Some((fm.clone(), fc * w))
                    }
                }),
            );
            out = out.add(&term.mul(&df)?)?;
        }
        Ok(out)
    }

    /// `[z^m d_n, z^m' d_n'] = z^{m+m'} d_{<m',n> n' - <m,n'> n}`, extended
    /// bilinearly and truncated.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(Error::ContextMismatch);
        }
        let mut out = Self::zero(&self.ctx);
        for (m1, (p1, q1)) in &self.terms {
            for (m2, (p2, q2)) in &other.terms {
                let prod = TruncatedSeries::from_monomial(&self.ctx, m1.clone(), Q::one())
                    .mul(&TruncatedSeries::from_monomial(&self.ctx, m2.clone(), Q::one()))?;
                let Some((mono, _)) = prod.terms().next() else { continue };
                // <m2, n1> and <m1, n2>
                let a = rational::q(m2.m.a) * p1 + rational::q(m2.m.b) * q1;
                let b = rational::q(m1.m.a) * p2 + rational::q(m1.m.b) * q2;
                let v = (&a * p2 - &b * p1, &a * q2 - &b * q1);
                out.add_term(mono.clone(), v);
            }
        }
        Ok(out)
    }

    /// `exp(xi)(f) = f + sum_{i>=1} xi^i(f) / i!`.
    pub fn exp_apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        if !self.in_g() {
            return Err(Error::NotInMaximalIdeal("exponential of a derivation outside g_R".into()));
        }
        let mut out = f.clone();
        let mut term = f.clone();
        let mut i: i64 = 1;
        loop {
            term = self.apply(&term)?.scale(&rational::frac(1, i));
            if term.is_zero() {
                return Ok(out);
            }
            out = out.add(&term)?;
            i += 1;
        }
    }

    /// Splits into `c z^m d_{n(m)}` summands, one per Laurent exponent `m`.
    ///
    /// Fails on a term with `m = 0` or with a normal vector not orthogonal to
    /// `m`, i.e. on anything outside `h_R`.
    pub fn decompose(&self) -> Result<Vec<HTerm>> {
        let mut by_m: BTreeMap<LatticeVector, Vec<(Monomial, Q)>> = BTreeMap::new();
        for (mono, (p, q)) in &self.terms {
            let m = mono.m;
            if m.is_zero() {
                return Err(Error::Decomposition(format!("term with m = 0: {mono:?}")));
            }
            let n = m.normal()?;
            // (p, q) = c * n requires p * n.b == q * n.a.
            if p * rational::q(n.b) != q * rational::q(n.a) {
                return Err(Error::Decomposition(format!(
                    "normal ({}, {}) is not orthogonal to m = {m}",
                    rational::to_string(p),
                    rational::to_string(q)
                )));
            }
            let c = if n.a != 0 { p / rational::q(n.a) } else { q / rational::q(n.b) };
            let mut formal = mono.clone();
            formal.m = LatticeVector::ZERO;
            by_m.entry(m).or_default().push((formal, c));
        }
        by_m.into_iter()
            .map(|(m, terms)| {
                Ok(HTerm { coef: TruncatedSeries::from_terms(&self.ctx, terms), m, n: m.normal()? })
            })
            .collect()
    }

    /// Canonical JSON: the series term schema plus `"n":[p,q]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(mono, (p, q))| {
                    let mut t = crate::series::term_json(&self.ctx, mono, &Q::one(), true);
                    let obj = t.as_object_mut().expect("object");
                    obj.remove("coef");
                    obj.insert(
                        "n".into(),
                        serde_json::json!([rational::to_string(p), rational::to_string(q)]),
                    );
                    t
                })
                .collect(),
        )
    }
}

/// `exp(log f d_n0)` for a wall function `f` supported on multiples of one
/// primitive `m0` orthogonal to `n0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallCrossingAutomorphism {
    logf: TruncatedSeries,
    n0: LatticeVector,
    function: TruncatedSeries,
    inverse_function: TruncatedSeries,
}

impl WallCrossingAutomorphism {
    pub fn new(logf: TruncatedSeries, n0: LatticeVector) -> Result<Self> {
        if !n0.is_primitive() {
            return Err(Error::InvalidWall(format!("normal {n0} is not primitive")));
        }
        if !logf.in_maximal_ideal() {
            return Err(Error::NotInMaximalIdeal(format!("wall function log {logf}")));
        }
        let mut dir: Option<LatticeVector> = None;
        for m in logf.laurent_support() {
            if m.is_zero() || m.pair(&n0) != 0 {
                return Err(Error::InvalidWall(format!("exponent {m} is not a nonzero multiple of the wall direction")));
            }
            let p = m.primitive()?;
            match dir {
                None => dir = Some(p),
                Some(d) if d == p => {}
                Some(_) => return Err(Error::InvalidWall("exponents on both sides of the wall direction".into())),
            }
        }
        let function = logf.exp_series()?;
        let inverse_function = logf.neg().exp_series()?;
        Ok(WallCrossingAutomorphism { logf, n0, function, inverse_function })
    }

    /// From the wall function `f = 1 mod m_R`.
    pub fn from_function(f: &TruncatedSeries, n0: LatticeVector) -> Result<Self> {
        Self::new(f.log()?, n0)
    }

    pub fn logf(&self) -> &TruncatedSeries {
        &self.logf
    }

    pub fn n0(&self) -> LatticeVector {
        self.n0
    }

    pub fn function(&self) -> &TruncatedSeries {
        &self.function
    }

    pub fn context(&self) -> &Arc<RingContext> {
        self.logf.context()
    }

    /// Inverse element: same normal, negated logarithm.
    pub fn inverse(&self) -> Self {
        WallCrossingAutomorphism {
            logf: self.logf.neg(),
            n0: self.n0,
            function: self.inverse_function.clone(),
            inverse_function: self.function.clone(),
        }
    }

    pub fn as_derivation(&self) -> LogDerivation {
        LogDerivation::from_series(&self.logf, self.n0)
    }

    /// Applies the automorphism using `z^m -> f^{<m, n0>} z^m`.
    pub fn act(&self, g: &TruncatedSeries) -> Result<TruncatedSeries> {
        g.check_same(&self.logf)?;
        let mut groups: BTreeMap<i64, Vec<(Monomial, Q)>> = BTreeMap::new();
        for (mono, c) in g.terms() {
            groups.entry(mono.m.pair(&self.n0)).or_default().push((mono.clone(), c.clone()));
        }
        let ctx = g.context();
        let mut powers = PowerCache::new(&self.function, &self.inverse_function);
        let mut out = TruncatedSeries::zero(ctx);
        for (e, terms) in groups {
            let part = TruncatedSeries::from_terms(ctx, terms);
            let factor = powers.get(e);
            out = out.add(&part.mul(factor)?)?;
        }
        Ok(out)
    }

    /// Applies `exp(log f d_n0)` through the defining exponential series.
    pub fn act_by_series(&self, g: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.as_derivation().exp_apply(g)
    }
}

/// Integer powers `f^e` of a unit and its inverse, computed on demand.
struct PowerCache<'a> {
    pos: Vec<TruncatedSeries>,
    neg: Vec<TruncatedSeries>,
    f: &'a TruncatedSeries,
    finv: &'a TruncatedSeries,
}

impl<'a> PowerCache<'a> {
    fn new(f: &'a TruncatedSeries, finv: &'a TruncatedSeries) -> Self {
        let one = TruncatedSeries::one(f.context());
        PowerCache { pos: vec![one.clone()], neg: vec![one], f, finv }
    }

    fn get(&mut self, e: i64) -> &TruncatedSeries {
        let (table, base) = if e >= 0 { (&mut self.pos, self.f) } else { (&mut self.neg, self.finv) };
        let k = e.unsigned_abs() as usize;
        while table.len() <= k {
            let next = &table[table.len() - 1] * base;
            table.push(next);
        }
        &table[k]
    }
}

/// A ring automorphism of `k[M] (x) R` over `R`, stored through the images
/// `x -> x * X`, `y -> y * Y` with `X, Y = 1 mod m_R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusAutomorphism {
    x_factor: TruncatedSeries,
    y_factor: TruncatedSeries,
}

impl TorusAutomorphism {
    pub fn identity(ctx: &Arc<RingContext>) -> Self {
        TorusAutomorphism { x_factor: TruncatedSeries::one(ctx), y_factor: TruncatedSeries::one(ctx) }
    }

    pub fn context(&self) -> &Arc<RingContext> {
        self.x_factor.context()
    }

    /// `theta o self`.
    pub fn then(&self, theta: &WallCrossingAutomorphism) -> Result<Self> {
        let x = self.x_factor.shift(LatticeVector::E1);
        let y = self.y_factor.shift(LatticeVector::E2);
        Ok(TorusAutomorphism {
            x_factor: theta.act(&x)?.shift(-LatticeVector::E1),
            y_factor: theta.act(&y)?.shift(-LatticeVector::E2),
        })
    }

    /// The composite `theta_s o ... o theta_1` of `[theta_1, ..., theta_s]`.
    pub fn compose(ctx: &Arc<RingContext>, thetas: &[WallCrossingAutomorphism]) -> Result<Self> {
        thetas.iter().try_fold(Self::identity(ctx), |acc, t| acc.then(t))
    }

    pub fn image_x(&self) -> TruncatedSeries {
        self.x_factor.shift(LatticeVector::E1)
    }

    pub fn image_y(&self) -> TruncatedSeries {
        self.y_factor.shift(LatticeVector::E2)
    }

    pub fn is_identity(&self) -> bool {
        self.x_factor.is_one() && self.y_factor.is_one()
    }

    /// Truncates to a smaller order with the same variables.
    pub fn truncate_to(&self, target: &Arc<RingContext>) -> Result<Self> {
        Ok(TorusAutomorphism {
            x_factor: self.x_factor.truncate_to(target)?,
            y_factor: self.y_factor.truncate_to(target)?,
        })
    }

    /// Applies the automorphism as a ring homomorphism.
    pub fn apply(&self, g: &TruncatedSeries) -> Result<TruncatedSeries> {
        g.check_same(&self.x_factor)?;
        let mut xp: HashMap<i64, TruncatedSeries> = HashMap::new();
        let mut yp: HashMap<i64, TruncatedSeries> = HashMap::new();
        let mut out = TruncatedSeries::zero(g.context());
        for (mono, c) in g.terms() {
            let fx = match xp.get(&mono.m.a) {
                Some(s) => s.clone(),
                None => {
                    let s = self.x_factor.int_pow(mono.m.a)?;
                    xp.insert(mono.m.a, s.clone());
                    s
                }
            };
            let fy = match yp.get(&mono.m.b) {
                Some(s) => s.clone(),
                None => {
                    let s = self.y_factor.int_pow(mono.m.b)?;
                    yp.insert(mono.m.b, s.clone());
                    s
                }
            };
            let term = TruncatedSeries::from_monomial(g.context(), mono.clone(), c.clone());
            out = out.add(&term.mul(&fx.mul(&fy)?)?)?;
        }
        Ok(out)
    }

    /// The operator logarithm `sum (-1)^{i+1} (theta - Id)^i / i`, returned
    /// as a log derivation through its values on `x` and `y`.
    pub fn log(&self) -> Result<LogDerivation> {
        let ctx = self.context().clone();
        let one = TruncatedSeries::one(&ctx);
        for f in [&self.x_factor, &self.y_factor] {
            if !f.sub(&one)?.in_maximal_ideal() {
                return Err(Error::NotInMaximalIdeal("automorphism is not the identity modulo m_R".into()));
            }
        }
        let mut parts = Vec::with_capacity(2);
        for gen in [TruncatedSeries::x(&ctx), TruncatedSeries::y(&ctx)] {
            let mut acc = TruncatedSeries::zero(&ctx);
            let mut delta = gen.clone();
            let mut i: i64 = 1;
            loop {
                delta = self.apply(&delta)?.sub(&delta)?;
                if delta.is_zero() {
                    break;
                }
                let sign = if i % 2 == 1 { 1 } else { -1 };
                acc = acc.add(&delta.scale(&rational::frac(sign, i)))?;
                i += 1;
            }
            parts.push(acc);
        }
        // xi(x) = x * sum c <e1, n> z^m, xi(y) = y * sum c <e2, n> z^m
        let mut out = LogDerivation::zero(&ctx);
        for (mono, c) in parts[0].shift(-LatticeVector::E1).terms() {
            out.add_term(mono.clone(), (c.clone(), Q::zero()));
        }
        for (mono, c) in parts[1].shift(-LatticeVector::E2).terms() {
            out.add_term(mono.clone(), (Q::zero(), c.clone()));
        }
        Ok(out)
    }
}

/// Composes `[theta_1, ..., theta_s]` as `theta_s o ... o theta_1` and returns
/// the logarithm of the composite.
pub fn compose_and_log(ctx: &Arc<RingContext>, thetas: &[WallCrossingAutomorphism]) -> Result<LogDerivation> {
    TorusAutomorphism::compose(ctx, thetas)?.log()
}
