mod common;

use proptest::prelude::*;
use robrec_core::oracle::{brute_adv, brute_eval, brute_inc, brute_robrec, enumerate_feasible, extreme_point_value};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eval_dominates_every_sampled_scenario(seed in 0u64..10_000, k in 0usize..12) {
        let inst = common::small_corpus(1, seed)[k].1.clone();
        let mut rng = common::rng(seed);
        let all = enumerate_feasible(&inst.feasible).unwrap();
        let x = &all[seed as usize % all.len()];
        let eval = brute_eval(&inst, x).unwrap();
        let cx = x.dot(&inst.first_stage);
        for _ in 0..100 {
            let c = common::random_scenario(&inst.uncertainty, &mut rng);
            let (inc, _) = brute_inc(&inst, x, &c).unwrap();
            prop_assert!(cx + inc <= eval + 1e-9, "{} + {} > {}", cx, inc, eval);
        }
    }

    #[test]
    fn robust_optimum_is_the_smallest_evaluation(seed in 0u64..10_000, k in 0usize..12) {
        let inst = common::small_corpus(1, seed)[k].1.clone();
        let (opt, x_opt) = brute_robrec(&inst).unwrap();
        prop_assert!((brute_eval(&inst, &x_opt).unwrap() - opt).abs() < 1e-9);
        for x in enumerate_feasible(&inst.feasible).unwrap() {
            prop_assert!(opt <= brute_eval(&inst, &x).unwrap() + 1e-9);
        }
    }

    #[test]
    fn vertex_value_never_exceeds_the_adversary(seed in 0u64..10_000, n in 2usize..=6) {
        let mut rng = common::rng(seed);
        let inst = common::small_knapsack(n, &mut rng, 1.0);
        prop_assert!(extreme_point_value(&inst).unwrap() <= brute_adv(&inst).unwrap() + 1e-9);
    }
}
