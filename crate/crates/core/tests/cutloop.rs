mod common;

use proptest::prelude::*;
use robrec_core::cutloop::{adversarial_lb_traced, eval_solution_traced, lb_heuristic, max_min_bracket};
use robrec_core::mip::Limits;
use robrec_core::model::{BracketStatus, Instance};
use robrec_core::oracle::{brute_adv, brute_eval, brute_maxmin, enumerate_feasible, neighborhood};

fn instance(seed: u64, k: usize, extra: bool) -> Instance {
    let inst = common::small_corpus(1, seed)[k].1.clone();
    if extra {
        common::with_random_extra(&inst, &mut common::rng(seed ^ 0xe))
    } else {
        inst
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_converges_to_brute_value(seed in 0u64..10_000, k in 0usize..12, extra in any::<bool>()) {
        let inst = instance(seed, k, extra);
        for x in enumerate_feasible(&inst.feasible).unwrap().iter().take(6) {
            let (b, trace) = eval_solution_traced(&inst, x, 0.0, 60.0, None).unwrap();
            let exact = brute_eval(&inst, x).unwrap();
            prop_assert_eq!(b.status, BracketStatus::Converged);
            prop_assert!((b.lb - exact).abs() <= 1e-6 && (b.ub - exact).abs() <= 1e-6, "[{}, {}] vs {}", b.lb, b.ub, exact);
            prop_assert!(inst.uncertainty.contains(b.witness_scenario.as_ref().unwrap(), 1e-9));
            for w in trace.windows(2) {
                prop_assert!(w[1].lb >= w[0].lb - 1e-9 && w[1].ub <= w[0].ub + 1e-9, "{:?}", w);
            }
            // each iteration adds a distinct neighbor, so the loop cannot
            // run longer than the neighborhood is large
            let size = neighborhood(&inst, x).unwrap().len();
            prop_assert!(b.iterations <= size + 1, "{} iterations for {} neighbors", b.iterations, size);
        }
    }

    #[test]
    fn adversary_brackets_the_exact_value(seed in 0u64..10_000, k in 0usize..12, extra in any::<bool>()) {
        let inst = instance(seed, k, extra);
        let (b, trace) = adversarial_lb_traced(&inst, 0.0, 60.0).unwrap();
        let exact = brute_adv(&inst).unwrap();
        prop_assert!((b.lb - exact).abs() <= 1e-6 && (b.ub - exact).abs() <= 1e-6, "[{}, {}] vs {}", b.lb, b.ub, exact);
        prop_assert!(b.lb >= lb_heuristic(&inst, Limits::default()).unwrap() - 1e-9);
        prop_assert!(inst.uncertainty.contains(b.witness_scenario.as_ref().unwrap(), 1e-9));
        for w in trace.windows(2) {
            prop_assert!(w[1].lb >= w[0].lb - 1e-9 && w[1].ub <= w[0].ub + 1e-9, "{:?}", w);
        }
    }

    #[test]
    fn max_min_matches_enumeration(seed in 0u64..10_000, k in 0usize..12) {
        let inst = instance(seed, k, false);
        let b = max_min_bracket(&inst, 0.0, 60.0).unwrap();
        let exact = brute_maxmin(&inst).unwrap();
        prop_assert!((b.lb - exact).abs() <= 1e-6, "{} vs {}", b.lb, exact);
    }

    #[test]
    fn positive_epsilon_keeps_a_valid_bracket(seed in 0u64..10_000, k in 0usize..12, eps in 0.001f64..0.5) {
        let inst = instance(seed, k, false);
        let (b, _) = adversarial_lb_traced(&inst, eps, 60.0).unwrap();
        let exact = brute_adv(&inst).unwrap();
        prop_assert!(b.lb <= exact + 1e-6 && exact <= b.ub + 1e-6);
        let scale = if b.lb > 0.0 { b.lb } else { 1.0 };
        prop_assert!(b.ub - b.lb <= eps * scale + 1e-6, "[{}, {}]", b.lb, b.ub);
    }
}
