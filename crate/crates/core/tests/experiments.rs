//! Experiment-level behaviour: determinism, statistics and the Monte-Carlo
//! examples for cylinders.

use percoflow::capacity::{CapacityLaw, CAP_SCALE};
use percoflow::cylinder::{build_cylinder_instance, estimate_nu, nu_cylinder, tau_samples, NuRequest};
use percoflow::geometry::Domain;
use percoflow::harness::{run_converge, run_phase, write_csv, ExperimentConfig};
use percoflow::lattice::discretize;

fn csv_for(threads: usize) -> Vec<u8> {
    let mut cfg = ExperimentConfig::new(
        Domain::l_shape(),
        CapacityLaw::Exponential { rate: 1.0 },
        vec![4, 8, 12],
        24,
        2024,
    );
    cfg.threads = Some(threads);
    cfg.record_timing = false;
    let mut buf = Vec::new();
    write_csv(&mut buf, &run_converge(&cfg).unwrap().rows).unwrap();
    buf
}

#[test]
fn output_is_identical_for_any_thread_count() {
    let one = csv_for(1);
    assert_eq!(one, csv_for(3));
    assert_eq!(one, csv_for(8));
    assert!(String::from_utf8(one).unwrap().starts_with("n,mean,std,ci95,trials,seconds\n"));
}

#[test]
fn records_regenerate_exactly() {
    let cfg = ExperimentConfig::new(Domain::unit_square(), CapacityLaw::Uniform { a: 0.0, b: 1.0 }, vec![3, 6], 5, 77);
    let a = run_converge(&cfg).unwrap().records;
    let b = run_converge(&cfg).unwrap().records;
    let strip = |v: &[percoflow::harness::TrialRecord]| {
        v.iter().map(|r| (r.n, r.trial, r.seed, r.value, r.cut_size)).collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn spread_shrinks_with_mesh() {
    let cfg = ExperimentConfig::new(Domain::unit_square(), CapacityLaw::Exponential { rate: 1.0 }, vec![8, 16, 32], 200, 11);
    let rows = run_converge(&cfg).unwrap().rows;
    assert!(rows[1].std <= rows[0].std, "{rows:?}");
    assert!(rows[2].std <= rows[1].std, "{rows:?}");
}

#[test]
fn degenerate_bernoulli_ends() {
    let cfg = ExperimentConfig::new(Domain::unit_square(), CapacityLaw::Constant { c: 1.0 }, vec![4, 8], 5, 1);
    let rep = run_phase(&cfg, &[0.0, 1.0], 1.0, None).unwrap();
    assert_eq!(rep.means[0], vec![0.0, 0.0]);
    assert_eq!(rep.means[1], vec![1.25, 1.125]);
    assert_eq!(rep.transition, Some(0.0));
}

#[test]
fn failing_mesh_is_reported() {
    let dom = Domain::from_json_str(
        r#"{"dim":2,"pieces":[{"halfspaces":[
            {"normal":[-1,0],"offset":0},{"normal":[1,0],"offset":1},
            {"normal":[0,-1],"offset":0},{"normal":[0,1],"offset":1}]}],
          "gamma1":[{"piece":0,"facet":0,"region":{"halfspaces":[{"normal":[0,1],"offset":0.4}]}}],
          "gamma2":[{"piece":0,"facet":0,"region":{"halfspaces":[{"normal":[0,-1],"offset":-0.6}]}}]}"#,
    )
    .unwrap();
    let cfg = ExperimentConfig::new(dom, CapacityLaw::Constant { c: 1.0 }, vec![1, 20], 1, 0);
    let err = run_converge(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("n = 1"));
}

#[test]
fn nu_scales_trial_by_trial() {
    let spec = nu_cylinder(&[0.6, 0.8], 2.0, 0.5).unwrap();
    let inst = build_cylinder_instance(&spec, 6).unwrap();
    let one = tau_samples(&inst, &CapacityLaw::Constant { c: 1.0 }, 4, 3).unwrap();
    let two = tau_samples(&inst, &CapacityLaw::Constant { c: 2.0 }, 4, 3).unwrap();
    for (a, b) in one.iter().zip(&two) {
        assert_eq!(2 * a, *b);
    }
    let uni = tau_samples(&inst, &CapacityLaw::Uniform { a: 0.0, b: 1.0 }, 4, 3).unwrap();
    let uni2 = tau_samples(&inst, &CapacityLaw::Uniform { a: 0.0, b: 2.0 }, 4, 3).unwrap();
    for (a, b) in uni.iter().zip(&uni2) {
        assert!((2 * a - b).abs() <= inst.lattice.num_edges() as i64, "{a} {b}");
    }
}

#[test]
fn subcritical_bernoulli_has_vanishing_nu() {
    let req = NuRequest {
        direction: vec![0.0, 1.0],
        law: CapacityLaw::Bernoulli { p: 0.3, hi: 1.0 },
        base_size: 4.0,
        half_height: None,
        n_values: vec![32],
        trials: 50,
        seed: 5,
    };
    let est = estimate_nu(&req).unwrap();
    assert!(est.point() < 0.05, "{est:?}");
}

#[test]
fn nu_does_not_depend_much_on_height() {
    let mk = |h: f64| NuRequest {
        direction: vec![1.0, 0.0],
        law: CapacityLaw::Uniform { a: 0.0, b: 1.0 },
        base_size: 4.0,
        half_height: Some(h),
        n_values: vec![16],
        trials: 60,
        seed: 8,
    };
    let flat = estimate_nu(&mk(1.0)).unwrap();
    let tall = estimate_nu(&mk(2.0)).unwrap();
    let gap = (flat.point() - tall.point()).abs();
    assert!(gap <= 3.0 * (flat.point_ci95() + tall.point_ci95()), "{flat:?} {tall:?}");
}

#[test]
fn connectivity_of_discretized_domains() {
    for n in [2, 8, 16] {
        assert!(discretize(&Domain::l_shape(), n).unwrap().is_connected());
    }
    assert_eq!(CAP_SCALE, 1 << 20);
}
