//! Invariants checked on randomly generated inputs.

mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use percoflow::capacity::{
    atom_at_zero, edge_value, fixed_to_f64, sample, sample_edges, CapacityAssignment, CapacityLaw, PcTable,
    CAP_SCALE,
};
use percoflow::continuum::{
    flat_cut_bound, i_omega, i_omega_subdivided, positivity, tilted_limit_2d, NuModel, PolyhedralCut,
};
use percoflow::cylinder::{build_cylinder_instance, nu_cylinder, phi_cyl, tau};
use percoflow::flow::{cut_capacity, max_flow, max_flow_with, min_cut_is_cutset, Solver};
use percoflow::geometry::{
    dist_l2, dist_linf, edge_in_set, halfspace, hd_measure_facet, make_cylinder, Closure, ConvexPolytope, Domain,
};
use percoflow::lattice::{automorphism_apply, discretize, relabeling, Lattice, SignedPermutation};

fn law_strategy() -> impl Strategy<Value = CapacityLaw> {
    prop_oneof![
        (0.0..=1.0f64, 0.5..3.0f64).prop_map(|(p, hi)| CapacityLaw::Bernoulli { p, hi }),
        (0.0..1.0f64, 1.0..2.0f64).prop_map(|(a, b)| CapacityLaw::Uniform { a, b }),
        (0.5..2.0f64).prop_map(|rate| CapacityLaw::Exponential { rate }),
    ]
}

fn instance() -> impl Strategy<Value = (Domain, u32, CapacityLaw, u64)> {
    (
        prop_oneof![Just(Domain::unit_square()), Just(Domain::l_shape())],
        2u32..7,
        law_strategy(),
        any::<u64>(),
    )
}

fn random_source_side(lat: &Lattice, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut side = vec![false; lat.num_vertices()];
    for (v, s) in side.iter_mut().enumerate() {
        *s = rng.random_bool(0.5) && !lat.gamma2().contains(&v);
    }
    for &v in lat.gamma1() {
        side[v] = true;
    }
    lat.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| side[e.u] != side[e.v])
        .map(|(i, _)| i)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn duality_and_weak_duality((dom, n, law, seed) in instance()) {
        let lat = discretize(&dom, n).unwrap();
        let caps = sample(&law, &lat, seed);
        let r = max_flow(&lat, &caps, lat.gamma1(), lat.gamma2()).unwrap();
        prop_assert_eq!(r.value, cut_capacity(&r.cut.edges, &caps).unwrap());
        prop_assert!(min_cut_is_cutset(&lat, &r.cut.edges, lat.gamma1(), lat.gamma2()));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let cut = random_source_side(&lat, &mut rng);
            prop_assert!(min_cut_is_cutset(&lat, &cut, lat.gamma1(), lat.gamma2()));
            prop_assert!(r.value <= cut_capacity(&cut, &caps).unwrap());
        }
    }

    #[test]
    fn solvers_agree((dom, n, law, seed) in instance()) {
        let lat = discretize(&dom, n).unwrap();
        let caps = sample(&law, &lat, seed);
        let a = max_flow_with(&lat, &caps, lat.gamma1(), lat.gamma2(), Solver::PushRelabel).unwrap();
        let b = max_flow_with(&lat, &caps, lat.gamma1(), lat.gamma2(), Solver::Augmenting).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(a.cut, b.cut);
    }

    #[test]
    fn integer_scaling((dom, n, law, seed) in instance(), lambda in 1i64..6) {
        let lat = discretize(&dom, n).unwrap();
        let caps = sample(&law, &lat, seed);
        let base = max_flow(&lat, &caps, lat.gamma1(), lat.gamma2()).unwrap().value;
        let scaled = max_flow(&lat, &caps.scaled(lambda), lat.gamma1(), lat.gamma2()).unwrap().value;
        prop_assert_eq!(scaled, lambda * base);
    }

    #[test]
    fn monotone_in_one_edge((dom, n, law, seed) in instance(), pick in any::<usize>(), bump in 1i64..(4 * CAP_SCALE)) {
        let lat = discretize(&dom, n).unwrap();
        let caps = sample(&law, &lat, seed);
        let before = max_flow(&lat, &caps, lat.gamma1(), lat.gamma2()).unwrap().value;
        let mut more = caps.clone();
        let e = pick % lat.num_edges();
        more.values[e] += bump;
        let after = max_flow(&lat, &more, lat.gamma1(), lat.gamma2()).unwrap().value;
        prop_assert!(after >= before);
    }

    #[test]
    fn mirror_symmetry_of_the_square(n in 1u32..8, law in law_strategy(), seed in any::<u64>()) {
        let lat = discretize(&Domain::unit_square(), n).unwrap();
        let caps = sample(&law, &lat, seed);
        let base = max_flow(&lat, &caps, lat.gamma1(), lat.gamma2()).unwrap().value;
        for sym in [SignedPermutation::reflection(2, 0, 0.5), SignedPermutation::reflection(2, 1, 0.5)] {
            let image = automorphism_apply(&lat, &sym).unwrap();
            let map = relabeling(&lat, &sym).unwrap();
            let mut moved = vec![0; lat.num_edges()];
            for (e, &t) in caps.values.iter().enumerate() {
                moved[map.edge[e]] = t;
            }
            let moved = CapacityAssignment::from_values(moved);
            let v = max_flow(&image, &moved, image.gamma1(), image.gamma2()).unwrap().value;
            prop_assert_eq!(v, base);
        }
    }

    #[test]
    fn sampling_is_keyed_by_edge(law in law_strategy(), seed in any::<u64>(), idx in 0u64..10_000) {
        let all = sample_edges(&law, 10_000, seed);
        prop_assert_eq!(all.values[idx as usize], edge_value(&law, seed, idx));
        prop_assert_eq!(sample_edges(&law, 10_000, seed), all);
    }

    #[test]
    fn quantization_error(c in 0.0..100.0f64) {
        let caps = sample_edges(&CapacityLaw::Constant { c }, 1, 0);
        prop_assert!((fixed_to_f64(caps.values[0]) - c).abs() <= 0.5 / CAP_SCALE as f64 + 1e-12);
    }

    #[test]
    fn lattice_basics(n in 1u32..12) {
        let dom = Domain::unit_square();
        let lat = discretize(&dom, n).unwrap();
        prop_assert_eq!(&lat, &discretize(&dom, n).unwrap());
        for i in 0..=n as i64 {
            for j in 0..=n as i64 {
                prop_assert!(lat.index_of(&[i, j]).is_some());
            }
        }
        if n >= 2 {
            prop_assert_eq!(lat.gamma1().len(), n as usize + 1);
            prop_assert_eq!(lat.gamma2().len(), n as usize + 1);
        }
        prop_assert!(lat.gamma1().iter().all(|v| !lat.gamma2().contains(v)));
    }

    #[test]
    fn edge_membership_is_symmetric(p in prop::array::uniform2(-0.5..1.5f64), q in prop::array::uniform2(-0.5..1.5f64)) {
        let pieces = Domain::l_shape().pieces;
        for c in [Closure::Open, Closure::Closed] {
            prop_assert_eq!(edge_in_set(&p, &q, &pieces, c), edge_in_set(&q, &p, &pieces, c));
        }
    }

    #[test]
    fn distance_vanishes_on_the_closure(x in prop::array::uniform2(-1.0..2.0f64)) {
        let sq = ConvexPolytope::aabb(&[0.0, 0.0], &[1.0, 1.0]);
        let inside = sq.contains(&x);
        let set = [sq.to_set()];
        prop_assert_eq!(dist_linf(&x, &set) <= 1e-12, inside);
        prop_assert_eq!(dist_l2(&x, &set) <= 1e-12, inside);
        prop_assert!(dist_linf(&x, &set) <= dist_l2(&x, &set) + 1e-12);
    }

    #[test]
    fn facet_measure_is_additive(cut in 0.01..0.99f64) {
        let cube = ConvexPolytope::aabb(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]);
        let lo = ConvexPolytope::new(vec![halfspace(&[0.0, 1.0, 0.0], cut)]);
        let hi = ConvexPolytope::new(vec![halfspace(&[0.0, -1.0, 0.0], -cut)]);
        let whole = hd_measure_facet(&cube, 1, None);
        let parts = hd_measure_facet(&cube, 1, Some(&lo)) + hd_measure_facet(&cube, 1, Some(&hi));
        prop_assert!((whole - parts).abs() < 1e-9);
    }

    #[test]
    fn cylinder_contains_its_base(theta in 0.0..PI, h in 0.2..2.0f64, side in 0.5..3.0f64) {
        let v = [theta.cos(), theta.sin()];
        let spec = nu_cylinder(&v, side, h).unwrap();
        let flipped = nu_cylinder(&[-v[0], -v[1]], side, h).unwrap();
        let e = &spec.base_edges[0];
        for t in [-0.5, -0.25, 0.0, 0.25, 0.5] {
            let x = [t * e[0], t * e[1]];
            prop_assert!(spec.contains(&x));
            prop_assert!(flipped.contains(&x));
        }
        prop_assert!((spec.polytope().volume() - flipped.polytope().volume()).abs() < 1e-9);
    }

    #[test]
    fn cylinder_flows_are_monotone(seed in any::<u64>(), law in law_strategy()) {
        let spec = make_cylinder(&[0.5, 0.0], &[vec![1.0, 0.0]], 0.5, &[0.0, 1.0]).unwrap();
        let inst = build_cylinder_instance(&spec, 4).unwrap();
        let caps = sample(&law, &inst.lattice, seed);
        let mut more = caps.clone();
        more.values.iter_mut().for_each(|t| *t += CAP_SCALE / 4);
        let (t0, t1) = (tau(&inst, &caps).unwrap(), tau(&inst, &more).unwrap());
        let (p0, p1) = (phi_cyl(&inst, &caps).unwrap(), phi_cyl(&inst, &more).unwrap());
        prop_assert!(0 <= t0 && t0 <= t1);
        prop_assert!(0 <= p0 && p0 <= p1);
    }

    #[test]
    fn tilted_limit_is_nonincreasing(theta in 0.0..(2.0 * PI), a in 0.0..1.5f64, b in 0.0..1.5f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let v = [theta.cos(), theta.sin()];
        let nu = NuModel::L1Scaled { c: 1.0 };
        let at0 = tilted_limit_2d(&v, 0.0, &nu).unwrap();
        prop_assert!((at0 - nu.eval(&v)).abs() < 1e-12);
        let small = tilted_limit_2d(&v, lo, &nu).unwrap();
        let large = tilted_limit_2d(&v, hi, &nu).unwrap();
        prop_assert!(large <= small + 1e-9);
    }

    #[test]
    fn positivity_is_monotone(p in 0.0..1.0f64, q in 0.0..1.0f64) {
        let pc = PcTable::default();
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let weak = CapacityLaw::Bernoulli { p: lo, hi: 1.0 };
        let strong = CapacityLaw::Bernoulli { p: hi, hi: 1.0 };
        prop_assert!(atom_at_zero(&strong) <= atom_at_zero(&weak));
        if positivity(&weak, 2, &pc).unwrap() {
            prop_assert!(positivity(&strong, 2, &pc).unwrap());
        }
    }

    #[test]
    fn unit_nu_measures_area(a in 0.05..0.95f64, b in 0.05..0.95f64, s in 0.0..0.9f64, t in 0.0..0.9f64) {
        let dom = Domain::unit_square();
        let cut = PolyhedralCut::new(vec![halfspace(&[1.0, a - b], a)]);
        let v = i_omega(&cut, &dom, &NuModel::Constant { nu: 1.0 }).unwrap();
        let length = (1.0 + (b - a).powi(2)).sqrt();
        prop_assert!((v.value - length).abs() < 1e-9);
        let planes = [halfspace(&[0.0, 1.0], 0.05 + s), halfspace(&[1.0, 0.0], 0.05 + t)];
        let split = i_omega_subdivided(&cut, &dom, &NuModel::L1Scaled { c: 1.0 }, &planes).unwrap();
        prop_assert!((split.value - (1.0 + (b - a).abs())).abs() < 1e-9);
    }

    #[test]
    fn flat_bound_within_cross_section_bounds(c in 0.0..3.0f64, k in 2usize..20) {
        let dom = Domain::l_shape();
        let offsets: Vec<f64> = (1..k).map(|i| 2.0 * i as f64 / k as f64 + 1e-3).collect();
        let nu = NuModel::L1Scaled { c };
        let b = flat_cut_bound(&dom, &nu, &[1.0, 0.0], &offsets).unwrap();
        let areas: Vec<f64> = offsets
            .iter()
            .filter(|&&o| o > 0.0 && o < 2.0)
            .map(|&o| if o < 1.0 { 1.0 } else { 0.5 })
            .collect();
        let min_area = areas.iter().copied().fold(f64::INFINITY, f64::min);
        let max_area = areas.iter().copied().fold(0.0, f64::max);
        prop_assert!(b.value >= nu.nu_min(2) * min_area - 1e-12);
        prop_assert!(b.value <= nu.nu_max(2) * max_area + 1e-12);
    }
}

#[test]
fn changing_the_seed_changes_the_field() {
    let lat = discretize(&Domain::unit_square(), 8).unwrap();
    let law = CapacityLaw::Uniform { a: 0.0, b: 1.0 };
    let base = sample(&law, &lat, 0);
    for seed in 1..=10 {
        assert_ne!(sample(&law, &lat, seed), base);
    }
}

#[test]
fn quarter_turn_does_not_preserve_left_right_patches() {
    let lat = discretize(&Domain::unit_square(), 4).unwrap();
    let turn = SignedPermutation::quarter_turn(2, 0, 1, &[0.5, 0.5]);
    assert!(automorphism_apply(&lat, &turn).is_err());
}

#[test]
fn brute_force_matches_on_a_thin_strip() {
    let lat = common::grid(4, 2);
    let caps: Vec<i64> = (0..lat.num_edges() as i64).map(|i| (i % 3 + 1) * CAP_SCALE).collect();
    let (f1, f2) = (common::column(&lat, 0, 2), common::column(&lat, 3, 2));
    let oracle = common::brute_force_min_cut(&lat, &caps, &f1, &f2);
    let got = max_flow(&lat, &CapacityAssignment::from_values(caps), &f1, &f2).unwrap().value;
    assert_eq!(got, oracle);
}
