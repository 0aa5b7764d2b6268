mod common;

use rand::Rng;
use srht::cvar::{
    bisection_solve, genfun_solve, project_ball, project_simplex2, project_sphere, surrogate_value, CvarParams,
    Surrogate,
};
use srht::exact::{solve_bnb, BnbOptions};
use srht::saa::saa_objective;
use srht::Error;

fn params() -> CvarParams {
    CvarParams {
        precision: 0.02,
        ..CvarParams::default()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn certified_level_bounds_the_detector_and_the_exact_optimum() {
    for seed in 0..3 {
        let inst = common::SmallFamily::default().instance(seed);
        let exact = solve_bnb(&inst, &BnbOptions::default()).unwrap().s_star;
        for (surrogate, sol) in [
            (Surrogate::Cvar, bisection_solve(&inst, &params()).unwrap()),
            (Surrogate::Genfun, genfun_solve(&inst, &params()).unwrap()),
        ] {
            let theta = &sol.iterate.theta;
            match surrogate {
                Surrogate::Cvar => assert!((norm(theta) - 1.0).abs() < 1e-12),
                Surrogate::Genfun => assert!(norm(theta) <= 1.0 + 1e-12),
            }
            assert!(sol.t_value <= 0.0);
            let at_theta = saa_objective(&inst, theta).unwrap().s_hat;
            assert!(at_theta <= sol.s + 1e-9, "{surrogate:?}: {at_theta} > {}", sol.s);
            assert!(exact <= sol.s + 1e-9);
            let (t, _) = surrogate_value(sol.s, &inst, theta, surrogate, &params());
            assert!(t <= 1e-9, "{t}");
        }
    }
}

#[test]
fn bisection_trace_shrinks_monotonically() {
    let inst = common::SmallFamily::default().instance(1);
    let sol = bisection_solve(&inst, &params()).unwrap();
    for pair in sol.trace.windows(2) {
        assert!(pair[1].s_lb >= pair[0].s_lb && pair[1].s_ub <= pair[0].s_ub);
        assert!(pair[1].wall_time >= pair[0].wall_time);
    }
    let last = sol.trace.last().unwrap();
    assert!(last.s_ub - last.s_lb <= 0.02);
    assert_eq!(last.s_ub, sol.s);
}

#[test]
fn solver_is_deterministic_per_seed() {
    let inst = common::SmallFamily::default().instance(2);
    let a = bisection_solve(&inst, &params()).unwrap();
    let b = bisection_solve(&inst, &params()).unwrap();
    assert_eq!(a.s, b.s);
    assert_eq!(a.iterate, b.iterate);
}

#[test]
fn infeasible_upper_level_is_reported() {
    let inst = common::SmallFamily {
        separation: 0.1,
        ..common::SmallFamily::default()
    }
    .instance(0);
    let p = CvarParams {
        s_ub: 0.01,
        ..params()
    };
    match bisection_solve(&inst, &p) {
        Err(Error::InvalidInterval { s_ub, value }) => {
            assert_eq!(s_ub, 0.01);
            assert!(value > 0.0);
        }
        other => panic!("expected an invalid interval, got {other:?}"),
    }
}

#[test]
fn parameters_are_validated() {
    let inst = common::SmallFamily::default().instance(0);
    let bad = [
        CvarParams { s_lb: 0.5, s_ub: 0.4, ..params() },
        CvarParams { precision: 0.0, ..params() },
        CvarParams { lambda_min: 0.0, ..params() },
        CvarParams { beta_bound: Some(-1.0), ..params() },
    ];
    for p in bad {
        assert!(matches!(bisection_solve(&inst, &p), Err(Error::Config(_))), "{p:?}");
    }
}

#[test]
fn projections_land_on_their_sets() {
    let mut r = srht::rng::rng(5);
    for _ in 0..1000 {
        let tau = [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
        let p = project_simplex2(tau);
        assert!(p[0] >= 0.0 && p[1] >= 0.0 && (p[0] + p[1] - 1.0).abs() < 1e-15);
        // Brute force over the segment.
        let dist = |a: f64| (tau[0] - a).powi(2) + (tau[1] - 1.0 + a).powi(2);
        let best = (0..=10_000).map(|i| dist(i as f64 / 10_000.0)).fold(f64::INFINITY, f64::min);
        assert!(dist(p[0]) <= best + 1e-12);
    }
    let mut v = vec![3.0, 4.0];
    project_ball(&mut v);
    assert!((norm(&v) - 1.0).abs() < 1e-15);
    let mut inside = vec![0.3, 0.4];
    project_ball(&mut inside);
    assert_eq!(inside, vec![0.3, 0.4]);
    let mut zero = vec![0.0, 0.0, 0.0];
    project_sphere(&mut zero);
    assert_eq!(zero, vec![1.0, 0.0, 0.0]);
}
