mod common;

use proptest::prelude::*;
use srht::exact::{solve_bnb, BnbOptions};
use srht::saa::{SaaInstance, SampleBlock};
use srht::sinkhorn::{optimize_lambda, row_fractions, IntervalSet, SinkhornBall};

fn bits_strategy() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1usize..6, 1usize..6).prop_flat_map(|(n, m)| prop::collection::vec(prop::collection::vec(any::<bool>(), m), n))
}

fn worst(eps: f64, rho: f64, bits: &[Vec<bool>]) -> f64 {
    optimize_lambda(&SinkhornBall::new(eps, rho, 1).unwrap(), bits).unwrap().value
}

fn swapped(inst: &SaaInstance) -> SaaInstance {
    let negate = |b: &SampleBlock| -> Vec<Vec<f64>> {
        b.features.iter().map(|f| f.iter().map(|v| -v).collect()).collect()
    };
    SaaInstance::from_features([negate(&inst.blocks[1]), negate(&inst.blocks[0])], inst.blocks[0].m, [inst.balls[1], inst.balls[0]])
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn worst_case_lies_between_mean_and_row_max(
        bits in bits_strategy(),
        eps in 0.01f64..2.0,
        rho in 0.0f64..1.0,
    ) {
        let v = worst(eps, rho, &bits);
        let fractions = row_fractions(&bits);
        let n = fractions.len() as f64;
        let mean = fractions.iter().sum::<f64>() / n;
        let row_max = fractions.iter().filter(|&&q| q > 0.0).count() as f64 / n;
        prop_assert!(mean - 1e-12 <= v && v <= row_max + 1e-12, "{mean} ≤ {v} ≤ {row_max}");
    }

    #[test]
    fn worst_case_grows_with_the_radius(
        bits in bits_strategy(),
        eps in 0.01f64..2.0,
        rho in 0.0f64..1.0,
        extra in 0.0f64..1.0,
    ) {
        prop_assert!(worst(eps, rho, &bits) <= worst(eps, rho + extra, &bits) + 1e-12);
    }

    #[test]
    fn worst_case_grows_with_the_errors(
        bits in bits_strategy(),
        eps in 0.01f64..2.0,
        rho in 0.0f64..1.0,
        pick in any::<prop::sample::Index>(),
    ) {
        let mut more = bits.clone();
        let cells = bits.len() * bits[0].len();
        let c = pick.index(cells);
        more[c / bits[0].len()][c % bits[0].len()] = true;
        prop_assert!(worst(eps, rho, &bits) <= worst(eps, rho, &more) + 1e-12);
    }

    #[test]
    fn log_probabilities_agree_with_probabilities(
        center in -3.0f64..3.0,
        std in 0.05f64..2.0,
        lo in -2.0f64..2.0,
        width in 0.01f64..3.0,
    ) {
        let e = IntervalSet::new(vec![(lo, lo + width), (lo + width + 0.5, f64::INFINITY)]).unwrap();
        let p = e.normal_prob(center, std);
        let lp = e.log_normal_prob(center, std);
        prop_assert!(lp <= 0.0);
        if p > 1e-300 {
            prop_assert!((lp.exp() - p).abs() <= 1e-12 * p.max(1e-300) + 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exact_optimum_ignores_feature_scale(seed in 0u64..1000, scale in 0.05f64..20.0) {
        let inst = common::random_feature_instance(seed, 3, 2, 2, 0.1, 0.05);
        let base = solve_bnb(&inst, &BnbOptions::default()).unwrap();
        let scaled = solve_bnb(&inst.scaled(scale), &BnbOptions::default()).unwrap();
        prop_assert!((base.s_star - scaled.s_star).abs() < 1e-9);
    }

    #[test]
    fn exact_optimum_ignores_hypothesis_labels(seed in 0u64..1000) {
        let inst = common::random_feature_instance(seed, 3, 2, 2, 0.1, 0.05);
        let base = solve_bnb(&inst, &BnbOptions::default()).unwrap();
        let swap = solve_bnb(&swapped(&inst), &BnbOptions::default()).unwrap();
        prop_assert!((base.s_star - swap.s_star).abs() < 1e-9, "{} vs {}", base.s_star, swap.s_star);
    }

    #[test]
    fn exact_solver_is_deterministic(seed in 0u64..1000) {
        let inst = common::SmallFamily::default().instance(seed);
        let a = solve_bnb(&inst, &BnbOptions::default()).unwrap();
        let b = solve_bnb(&inst, &BnbOptions::default()).unwrap();
        prop_assert_eq!(a.s_star, b.s_star);
        prop_assert_eq!(a.theta, b.theta);
        prop_assert_eq!(a.pattern, b.pattern);
    }
}
