// SPDX-License-Identifier: Apache-2.0
//! Property tests across the ring, the group, diagrams and invariants.

mod common;

use std::collections::BTreeMap;

use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use tropvert::invariants::{
    bps_aggregate, bps_invert, commutator_coeffs_from, commutator_diagram, degeneration_check, GradedPartition,
    GwGeometry, OrderedPartition,
};
use tropvert::scattering::{scatter_at_origin, scatter_by_perturbation, StandardDiagram, WallKind};
use tropvert::tropical::{aggregate_log_f, curve_from_ray, ntrop, NtropCache, WeightData};
use tropvert::vertex::{compose_and_log, TorusAutomorphism, WallCrossingAutomorphism};
use tropvert::{rational, LatticeVector, Q, RingContext, TruncatedSeries, Variable};

use common::*;

fn ctx2(order: u32, square_zero: bool) -> std::sync::Arc<RingContext> {
    let vars = if square_zero {
        vec![Variable::new("a"), Variable::square_zero("b")]
    } else {
        vec![Variable::new("a"), Variable::new("b")]
    };
    RingContext::new(vars, order).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), order in 1u32..=4, sz in any::<bool>()) {
        let mut r = rng(seed);
        let c = ctx2(order, sz);
        let (a, b, d) = (random_series(&mut r, &c, 4, false), random_series(&mut r, &c, 4, false), random_series(&mut r, &c, 4, false));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&d).unwrap(), a.mul(&b.mul(&d).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&d).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&d).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&TruncatedSeries::one(&c)).unwrap(), a.clone());
    }

    #[test]
    fn exp_log_inverse(seed in any::<u64>(), order in 1u32..=6, sz in any::<bool>()) {
        let mut r = rng(seed);
        let c = ctx2(order, sz);
        let g = random_series(&mut r, &c, 3, true);
        prop_assert_eq!(g.log_one_plus().unwrap().exp_series().unwrap(), &TruncatedSeries::one(&c) + &g);
        prop_assert_eq!(g.exp_series().unwrap().log().unwrap(), g.clone());
    }

    #[test]
    fn int_pow_inverse(seed in any::<u64>(), order in 1u32..=5, e in 1i64..=4) {
        let mut r = rng(seed);
        let c = ctx2(order, false);
        let f = &TruncatedSeries::one(&c) + &random_series(&mut r, &c, 3, true);
        prop_assert!(f.int_pow(e).unwrap().mul(&f.int_pow(-e).unwrap()).unwrap().is_one());
    }

    #[test]
    fn substitute_sum_is_a_homomorphism(seed in any::<u64>(), order in 1u32..=4) {
        let mut r = rng(seed);
        let src = RingContext::with_names(&["t", "a"], order).unwrap();
        let tgt = RingContext::new(
            vec![Variable::new("a"), Variable::square_zero("u1"), Variable::square_zero("u2"), Variable::square_zero("u3")],
            order,
        ).unwrap();
        let (f, g) = (random_series(&mut r, &src, 3, false), random_series(&mut r, &src, 3, true));
        let s = |x: &TruncatedSeries| x.substitute_sum(&tgt, "t", &["u1", "u2", "u3"]).unwrap();
        prop_assert_eq!(s(&f.mul(&g).unwrap()), s(&f).mul(&s(&g)).unwrap());
        prop_assert_eq!(s(&g.log_one_plus().unwrap()), s(&g).log_one_plus().unwrap());
    }

    #[test]
    fn truncation_coherence(seed in any::<u64>(), high in 2u32..=5) {
        let mut r = rng(seed);
        let big = ctx2(high, false);
        let small = big.with_order(high - 1).unwrap();
        let (f, g) = (random_series(&mut r, &big, 3, true), random_series(&mut r, &big, 3, false));
        let t = |x: &TruncatedSeries| x.truncate_to(&small).unwrap();
        prop_assert_eq!(t(&f.mul(&g).unwrap()), t(&f).mul(&t(&g)).unwrap());
        prop_assert_eq!(t(&f.exp_series().unwrap()), t(&f).exp_series().unwrap());
    }

    #[test]
    fn generator_closed_form(seed in any::<u64>(), order in 1u32..=4) {
        let mut r = rng(seed);
        let c = RingContext::with_names(&["t"], order).unwrap();
        let m0 = primitive(&mut r);
        let f = random_line_function(&mut r, &c, "t", m0);
        let theta = WallCrossingAutomorphism::from_function(&f, m0.rotate90()).unwrap();
        let x = TruncatedSeries::x(&c);
        let y = TruncatedSeries::y(&c);
        prop_assert_eq!(theta.act(&x).unwrap(), f.int_pow(-m0.b).unwrap().mul(&x).unwrap());
        prop_assert_eq!(theta.act(&y).unwrap(), f.int_pow(m0.a).unwrap().mul(&y).unwrap());
    }

    #[test]
    fn group_property_and_h_closure(seed in any::<u64>(), order in 1u32..=4) {
        let mut r = rng(seed);
        let c = RingContext::with_names(&["t1", "t2"], order).unwrap();
        let (m1, m2) = (primitive(&mut r), primitive(&mut r));
        let a = WallCrossingAutomorphism::from_function(&random_line_function(&mut r, &c, "t1", m1), m1.rotate90()).unwrap();
        let b = WallCrossingAutomorphism::from_function(&random_line_function(&mut r, &c, "t2", m2), m2.rotate90()).unwrap();
        let x = TruncatedSeries::x(&c);
        let y = TruncatedSeries::y(&c);
        let thetas = [a.clone(), b.clone()];
        let comp = TorusAutomorphism::compose(&c, &thetas).unwrap();
        prop_assert_eq!(comp.image_x(), b.act(&a.act(&x).unwrap()).unwrap());
        prop_assert_eq!(comp.image_y(), b.act(&a.act(&y).unwrap()).unwrap());
        let xi = compose_and_log(&c, &thetas).unwrap();
        prop_assert!(xi.in_h());
        prop_assert_eq!(xi.exp_apply(&x).unwrap(), comp.image_x());
        prop_assert_eq!(xi.exp_apply(&y).unwrap(), comp.image_y());
    }

    #[test]
    fn parallel_crossings_commute(seed in any::<u64>(), order in 1u32..=4) {
        let mut r = rng(seed);
        let c = RingContext::with_names(&["t1", "t2"], order).unwrap();
        let m = primitive(&mut r);
        let a = WallCrossingAutomorphism::from_function(&random_line_function(&mut r, &c, "t1", m), m.rotate90()).unwrap();
        let b = WallCrossingAutomorphism::from_function(&random_line_function(&mut r, &c, "t2", m), m.rotate90()).unwrap();
        let ab = TorusAutomorphism::compose(&c, &[a.clone(), b.clone()]).unwrap();
        let ba = TorusAutomorphism::compose(&c, &[b, a]).unwrap();
        prop_assert_eq!(ab, ba);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scattered_diagrams_are_consistent_and_confined(seed in any::<u64>(), order in 1u32..=4) {
        let mut r = rng(seed);
        let d = random_standard(&mut r, 3, order);
        let s = scatter_at_origin(&d).unwrap();
        prop_assert!(s.origin_loop_is_identity().unwrap());
        prop_assert!(s.is_consistent().unwrap());
        let dirs: Vec<LatticeVector> = d.walls().iter().map(|w| w.direction()).collect();
        for ray in s.rays() {
            let v = ray.direction();
            let inside = dirs.iter().any(|m| m.same_ray(&v)) || dirs.iter().enumerate().any(|(i, mi)| {
                dirs.iter().skip(i + 1).any(|mj| {
                    let det = mi.wedge(mj);
                    det != 0 && v.wedge(mj) * det.signum() >= 0 && mi.wedge(&v) * det.signum() >= 0
                })
            });
            prop_assert!(inside, "ray {} leaves the cone of {:?}", v, dirs);
        }
    }

    #[test]
    fn perturbation_matches_direct(seed in any::<u64>(), order in 1u32..=3, pseed in 0u64..1000) {
        let mut r = rng(seed);
        let d = random_standard(&mut r, 3, order);
        let direct = scatter_at_origin(&d).unwrap();
        let a = scatter_by_perturbation(&d, order, pseed).unwrap();
        prop_assert_eq!(&a.asymptotic, &direct);
        let b = scatter_by_perturbation(&d, order, pseed + 17).unwrap();
        prop_assert_eq!(&b.asymptotic, &direct);
        for idx in 0..a.perturbed.walls().len() {
            let curve = curve_from_ray(&a.perturbed, idx).unwrap();
            prop_assert!(curve.is_balanced());
            prop_assert!(curve.is_trivalent_tree());
        }
    }

    #[test]
    fn scattering_is_functorial(seed in any::<u64>(), order in 1u32..=4) {
        let mut r = rng(seed);
        let d = random_standard(&mut r, 3, order);
        let names: Vec<String> = d.context().variables().iter().map(|v| v.name.clone()).collect();
        let target = RingContext::with_names(&["s"], order).unwrap();
        let s = TruncatedSeries::var(&target, "s").unwrap();
        let map: BTreeMap<String, TruncatedSeries> =
            names.iter().map(|n| (n.clone(), s.scale(&small_rational(&mut r)))).collect();
        let lhs = scatter_at_origin(&d.substitute(&target, &map).unwrap().minimalize().unwrap()).unwrap();
        let rhs = scatter_at_origin(&d).unwrap().substitute(&target, &map).unwrap().minimalize().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn aggregation_matches_scattering(seed in any::<u64>(), order in 1u32..=3) {
        let mut r = rng(seed);
        let d = random_standard(&mut r, 2, order);
        let s = scatter_at_origin(&d).unwrap();
        let std = StandardDiagram::from_diagram(&d).unwrap();
        let mut cache = NtropCache::new(seed % 97);
        let mut dirs: Vec<LatticeVector> = s.rays().map(|w| w.direction()).collect();
        dirs.push(primitive(&mut r));
        for dir in dirs {
            let agg = aggregate_log_f(&std, dir, &mut |w| cache.get(w)).unwrap();
            let direct = match s.wall_at_origin(WallKind::Ray, dir) {
                Some(w) => w.logf().unwrap(),
                None => TruncatedSeries::zero(d.context()),
            };
            prop_assert_eq!(agg, direct, "direction {}", dir);
        }
    }

    #[test]
    fn ntrop_is_a_label_invariant_natural_number(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (m1, m2) = loop {
            let (a, b) = (primitive(&mut r), primitive(&mut r));
            if !a.is_parallel(&b) {
                break (a, b);
            }
        };
        let w1: Vec<u32> = (0..r.gen_range(1..=2)).map(|_| r.gen_range(1..=2)).collect();
        let w2: Vec<u32> = (0..r.gen_range(1..=2)).map(|_| r.gen_range(1..=2)).collect();
        let data = WeightData::new(vec![m1, m2], vec![w1.clone(), w2.clone()]).unwrap();
        let v = ntrop(&data, seed).unwrap();
        prop_assert!(rational::is_integer(&v) && v >= Q::zero());
        let mut p1 = w1.clone();
        p1.shuffle(&mut r);
        let permuted = WeightData::new(vec![m1, m2], vec![p1, w2]).unwrap();
        prop_assert_eq!(ntrop(&permuted, seed.wrapping_add(1)).unwrap(), v);
    }

    #[test]
    fn bps_round_trip(seed in any::<u64>(), w in 1u32..=4, len in 1usize..=8) {
        let mut r = rng(seed);
        let big_n: Vec<Q> = (0..len).map(|_| small_rational(&mut r)).collect();
        let inv = bps_invert(&big_n, w).unwrap();
        prop_assert_eq!(bps_aggregate(&inv.n, w), big_n);
    }
}

#[test]
fn specialization_identity() {
    for l in 1..=3u32 {
        for (l1, l2) in [(l, l), (l, 1)] {
            let scattered = scatter_at_origin(&commutator_diagram(l1, l2, 6).unwrap()).unwrap();
            let geo = GwGeometry::commutator(LatticeVector::E1, LatticeVector::E2, l1 as usize, l2 as usize, 6).unwrap();
            let gs = geo.scatter().unwrap();
            for dir in [LatticeVector::new(1, 1), LatticeVector::new(2, 1), LatticeVector::new(1, 2)] {
                let c = commutator_coeffs_from(&scattered, dir).unwrap();
                let (a, b) = (dir.a as u32, dir.b as u32);
                for k in 1..=3u32 {
                    if (a + b) * k > 6 {
                        continue;
                    }
                    let mut sum = Q::zero();
                    for p1 in OrderedPartition::all(a * k, l1 as usize) {
                        for p2 in OrderedPartition::all(b * k, l2 as usize) {
                            sum += geo
                                .invariant(&gs, &[GradedPartition::ungraded(p1.clone()), GradedPartition::ungraded(p2)])
                                .unwrap();
                        }
                    }
                    assert_eq!(&sum, c.get(&k.to_string()).unwrap(), "l=({l1},{l2}) dir {dir} k {k}");
                }
            }
        }
    }
}

#[test]
fn permutation_equivariance_and_two_paths() {
    let geo = GwGeometry::commutator(LatticeVector::E1, LatticeVector::E2, 3, 3, 6).unwrap();
    let gs = geo.scatter().unwrap();
    let mut cache = NtropCache::new(3);
    let mut r = rng(11);
    for s1 in 1..=3 {
        for s2 in 1..=3 {
            for p1 in OrderedPartition::all(s1, 3) {
                let p2 = OrderedPartition::all(s2, 3).choose(&mut r).unwrap().clone();
                let g = |a: &OrderedPartition, b: &OrderedPartition| {
                    geo.invariant(&gs, &[GradedPartition::ungraded(a.clone()), GradedPartition::ungraded(b.clone())])
                        .unwrap()
                };
                let v = g(&p1, &p2);
                let mut parts = p1.parts().to_vec();
                parts.shuffle(&mut r);
                assert_eq!(g(&OrderedPartition::new(parts), &p2), v);
                let via = degeneration_check(&[p1.clone(), p2.clone()], &[LatticeVector::E1, LatticeVector::E2], &mut |w| {
                    cache.get(w)
                })
                .unwrap();
                assert_eq!(via, v, "{p1}|{p2}");
            }
        }
    }
}
