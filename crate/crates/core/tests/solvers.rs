mod common;

use proptest::prelude::*;
use rand::Rng;
use robrec_core::cutloop::master_lp;
use robrec_core::mip::Limits;
use robrec_core::model::{Selection, UncertaintyModel};
use robrec_core::oracle::{brute_inc, brute_rec, enumerate_feasible};
use robrec_core::solvers::{
    incremental_via_rec_reduction, max_scenario_value_u0, solve_incremental, solve_recoverable,
};

const LIMITS: Limits = Limits { time_limit_s: 60.0, gap: 0.0 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn incremental_and_recoverable_match_enumeration(seed in 0u64..10_000, k in 0usize..12) {
        let mut rng = common::rng(seed);
        let inst = if k == 11 {
            common::small_knapsack(rng.gen_range(3..=10), &mut rng, [0.0, 0.3, 0.5, 1.0][k % 4])
        } else {
            common::small_corpus(1, seed)[k].1.clone()
        };
        let c = common::random_scenario(&inst.uncertainty, &mut rng);
        let rec = solve_recoverable(&inst, &c, LIMITS).unwrap();
        prop_assert!((rec.value.unwrap() - brute_rec(&inst, &c).unwrap().0).abs() < 1e-9);
        for x in enumerate_feasible(&inst.feasible).unwrap().iter().take(8) {
            let inc = solve_incremental(&inst, x, &c, LIMITS).unwrap();
            prop_assert!((inc.value.unwrap() - brute_inc(&inst, x, &c).unwrap().0).abs() < 1e-9);
        }
    }

    #[test]
    fn recoverable_is_monotone_in_costs(seed in 0u64..10_000, k in 0usize..12) {
        let mut rng = common::rng(seed);
        let inst = common::small_corpus(1, seed)[k].1.clone();
        let c = common::random_scenario(&inst.uncertainty, &mut rng);
        let higher: Vec<f64> = c.iter().map(|&v| v + if rng.gen_bool(0.5) { rng.gen_range(0.0..5.0) } else { 0.0 }).collect();
        let lo = solve_recoverable(&inst, &c, LIMITS).unwrap().value.unwrap();
        let hi = solve_recoverable(&inst, &higher, LIMITS).unwrap().value.unwrap();
        prop_assert!(lo <= hi + 1e-9, "{} > {}", lo, hi);
    }

    #[test]
    fn closed_form_matches_single_cut_master(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=12);
        let deviation: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=30) as f64).collect();
        let u = UncertaintyModel {
            nominal: (0..n).map(|_| rng.gen_range(0.0..10.0)).collect(),
            budget: rng.gen_range(0.0..=1.5) * deviation.iter().sum::<f64>(),
            deviation,
            extra: Vec::new(),
        };
        let y = Selection::new((0..n).map(|_| rng.gen_bool(0.6)).collect());
        let closed = max_scenario_value_u0(&y, &u).unwrap();
        let (lp, _) = master_lp(&u, &[(0.0, &y)]).unwrap();
        prop_assert!((closed - lp).abs() <= 1e-6, "{} vs {}", closed, lp);
    }
}

#[test]
fn reduction_agrees_with_direct_incremental() {
    let mut rng = common::rng(200);
    let mut cases = 0;
    for (_, inst) in common::small_corpus(50, 5) {
        let all = enumerate_feasible(&inst.feasible).unwrap();
        let x = &all[rng.gen_range(0..all.len())];
        let c = common::random_scenario(&inst.uncertainty, &mut rng);
        let direct = solve_incremental(&inst, x, &c, LIMITS).unwrap().value.unwrap();
        let v = incremental_via_rec_reduction(&inst, x, &c).unwrap();
        if inst.feasible.equal_cardinality.is_some() {
            assert!((v - direct).abs() < 1e-6, "{v} vs {direct}");
            cases += 1;
        } else {
            // a cheaper subset of I(x) may reach further, never the other way
            assert!(v <= direct + 1e-6, "{v} vs {direct}");
        }
    }
    assert!(cases >= 200, "only {cases} cases exercised");
}
