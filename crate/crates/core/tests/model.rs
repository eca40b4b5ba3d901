mod common;

use proptest::prelude::*;
use robrec_core::cutloop::{adversarial_lb, eval_solution};
use robrec_core::fixtures::{counterexample, toy3};
use robrec_core::model::{
    in_neighborhood, load_instance, overlap_requirement, save_instance, validate, Instance, Scenario,
};
use robrec_core::oracle::enumerate_feasible;

fn corpus_instance(seed: u64, k: usize) -> Instance {
    let corpus = common::small_corpus(k / 12 + 1, seed);
    corpus[k % corpus.len()].1.clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equal_cardinality_neighborhood_is_overlap(seed in 0u64..1000, k in 0usize..24, pct in 0u32..=100) {
        let inst = corpus_instance(seed, k);
        prop_assume!(inst.feasible.equal_cardinality.is_some());
        let m = inst.feasible.equal_cardinality.unwrap();
        let alpha = pct as f64 / 100.0;
        let need = overlap_requirement(m, alpha);
        let all = enumerate_feasible(&inst.feasible).unwrap();
        for x in &all {
            for y in &all {
                prop_assert_eq!(in_neighborhood(x, y, alpha).unwrap(), x.overlap(y) >= need, "x={} y={} alpha={}", x, y, alpha);
            }
        }
    }

    #[test]
    fn save_then_load_is_identity(seed in 0u64..1000, k in 0usize..36) {
        let mut inst = corpus_instance(seed, k);
        if k % 2 == 0 {
            inst = common::with_random_extra(&inst, &mut common::rng(seed));
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&inst, &path).unwrap();
        let back = load_instance(&path).unwrap();
        prop_assert_eq!(back.to_json(), inst.to_json());
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn generated_scenarios_are_members(seed in 0u64..1000, k in 0usize..36) {
        let inst = corpus_instance(seed, k);
        let u = &inst.uncertainty;
        prop_assert!(u.contains(&u.nominal_scenario(), 1e-9));
        let c = common::random_scenario(u, &mut common::rng(seed));
        let delta: Vec<f64> = c.iter().zip(&u.nominal).map(|(a, b)| a - b).collect();
        prop_assert!(u.contains(&Scenario::from_delta(u, delta), 1e-9));
    }
}

#[test]
fn solver_witnesses_are_members() {
    for inst in [toy3(), counterexample()] {
        let u = &inst.uncertainty;
        let adv = adversarial_lb(&inst, 0.0, 60.0).unwrap();
        assert!(u.contains(adv.witness_scenario.as_ref().unwrap(), 1e-9));
        for x in enumerate_feasible(&inst.feasible).unwrap() {
            let b = eval_solution(&inst, &x, 0.0, 60.0, None).unwrap();
            assert!(u.contains(b.witness_scenario.as_ref().unwrap(), 1e-9));
        }
    }
}

#[test]
fn corpus_instances_validate() {
    for (label, inst) in common::small_corpus(10, 3) {
        assert!(validate(&inst).is_empty(), "{label}: {:?}", validate(&inst));
    }
}
