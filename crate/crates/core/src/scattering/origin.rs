// SPDX-License-Identifier: Apache-2.0
//! Order-by-order completion of a diagram of lines through the origin.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{angle_cmp_from, LatticeVector};
use crate::series::TruncatedSeries;
use crate::vertex::{TorusAutomorphism, WallCrossingAutomorphism};

use super::{generic_start, ScatteringDiagram, Wall, WallKind};

/// Adds rays from the origin until the loop around the origin is the
/// identity modulo terms of degree above the context order.
///
/// At stage `j` the loop product is taken in the ring truncated at degree
/// `j`. Its logarithm vanishes below degree `j`, and every degree-`j` term
/// `c z^m d_{n(m)}` is cancelled by a ray along `m` carrying
/// `log f = -c z^m`. The result holds the input lines and the new rays in
/// minimal form.
pub fn scatter_at_origin(d: &ScatteringDiagram) -> Result<ScatteringDiagram> {
    let ctx = d.context().clone();
    let mut lines: Vec<(LatticeVector, TruncatedSeries)> = Vec::new();
    for w in d.walls() {
        if w.kind != WallKind::Line || !w.base.is_origin() {
            return Err(Error::InvalidArgument("only lines through the origin can be scattered here".into()));
        }
        if !w.is_trivial() {
            lines.push((w.direction(), w.logf()?));
        }
    }
    let mut rays: BTreeMap<LatticeVector, TruncatedSeries> = BTreeMap::new();

    for j in 1..=ctx.order() {
        let cj = ctx.with_order(j)?;
        let mut crossings: Vec<(LatticeVector, usize, WallCrossingAutomorphism)> = Vec::new();
        for (idx, (dir, lf)) in lines.iter().enumerate() {
            let lf = lf.truncate_to(&cj)?;
            if lf.is_zero() {
                continue;
            }
            let theta = WallCrossingAutomorphism::new(lf, dir.normal()?)?;
            crossings.push((-*dir, idx, theta.inverse()));
            crossings.push((*dir, idx, theta));
        }
        for (idx, (dir, lf)) in rays.iter().enumerate() {
            let lf = lf.truncate_to(&cj)?;
            if lf.is_zero() {
                continue;
            }
            crossings.push((*dir, lines.len() + idx, WallCrossingAutomorphism::new(lf, dir.normal()?)?));
        }
        let dirs: Vec<LatticeVector> = crossings.iter().map(|c| c.0).collect();
        let start = generic_start(&dirs);
        crossings.sort_by(|a, b| angle_cmp_from(&start, &a.0, &b.0).then(a.1.cmp(&b.1)));
        let thetas: Vec<WallCrossingAutomorphism> = crossings.into_iter().map(|c| c.2).collect();
        let xi = TorusAutomorphism::compose(&cj, &thetas)?.log()?;
        if xi.min_degree().is_some_and(|m| m < j) {
            return Err(Error::Decomposition(format!("loop product is not the identity below degree {j}")));
        }
        for term in xi.homogeneous_part(j).decompose()? {
            let dir = term.m.primitive()?;
            let add = term.coef.shift(term.m).neg().embed(&ctx)?;
            let entry = rays.entry(dir).or_insert_with(|| TruncatedSeries::zero(&ctx));
            *entry = entry.add(&add)?;
        }
    }

    let mut walls: Vec<Wall> = d.walls().to_vec();
    for (dir, lf) in rays {
        walls.push(Wall::ray(dir, lf.exp_series()?)?);
    }
    ScatteringDiagram::new(&ctx, walls)?.minimalize()
}
