// SPDX-License-Identifier: Apache-2.0
//! Random inputs shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropvert::rational::frac;
use tropvert::scattering::ScatteringDiagram;
use tropvert::{LatticeVector, Q, RingContext, TruncatedSeries};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero rational with small numerator and denominator.
pub fn small_rational(rng: &mut ChaCha8Rng) -> Q {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-3..=3);
    }
    frac(n, rng.gen_range(1..=3))
}

/// A primitive vector with entries in `[-3, 3]`.
pub fn primitive(rng: &mut ChaCha8Rng) -> LatticeVector {
    loop {
        let v = LatticeVector::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        if v.is_primitive() {
            return v;
        }
    }
}

/// A standard diagram: `n` lines through the origin with pairwise
/// non-parallel directions, line `i` carrying
/// `1 + sum c t_i^j z^{w m_i}` over a few random `(j, w)`.
pub fn random_standard(rng: &mut ChaCha8Rng, max_lines: usize, order: u32) -> ScatteringDiagram {
    let n = rng.gen_range(1..=max_lines);
    let names: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let ctx = RingContext::with_names(&refs, order).unwrap();
    let mut dirs: Vec<LatticeVector> = Vec::new();
    while dirs.len() < n {
        let d = primitive(rng);
        if dirs.iter().all(|e| !e.is_parallel(&d)) {
            dirs.push(d);
        }
    }
    let lines: Vec<(LatticeVector, TruncatedSeries)> = dirs
        .iter()
        .zip(&names)
        .map(|(&d, name)| (d, random_line_function(rng, &ctx, name, d)))
        .collect();
    ScatteringDiagram::lines_through_origin(&ctx, &lines).unwrap()
}

pub fn random_line_function(
    rng: &mut ChaCha8Rng,
    ctx: &Arc<RingContext>,
    var: &str,
    d: LatticeVector,
) -> TruncatedSeries {
    let mut f = TruncatedSeries::one(ctx);
    let lead = TruncatedSeries::monomial(ctx, d, &[(var, 1)], small_rational(rng));
    f = f.add(&lead).unwrap();
    for _ in 0..rng.gen_range(0..=2) {
        let j = rng.gen_range(1..=2u8);
        let w = rng.gen_range(1..=2i64);
        f = f.add(&TruncatedSeries::monomial(ctx, d * w, &[(var, j)], small_rational(rng))).unwrap();
    }
    f
}

/// A random series over `ctx` with small Laurent exponents and every
/// term in the maximal ideal when `in_ideal` holds.
pub fn random_series(rng: &mut ChaCha8Rng, ctx: &Arc<RingContext>, terms: usize, in_ideal: bool) -> TruncatedSeries {
    let names: Vec<String> = ctx.variables().iter().map(|v| v.name.clone()).collect();
    let mut out = TruncatedSeries::zero(ctx);
    for _ in 0..terms {
        let m = LatticeVector::new(rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        let mut vars: Vec<(&str, u8)> = Vec::new();
        for n in &names {
            let e = rng.gen_range(0..=2u8);
            if e > 0 {
                vars.push((n.as_str(), e));
            }
        }
        if in_ideal && vars.is_empty() {
            vars.push((names[0].as_str(), 1));
        }
        out = out.add(&TruncatedSeries::monomial(ctx, m, &vars, small_rational(rng))).unwrap();
    }
    out
}
