//! Selection, assignment and minimum knapsack: feasible-set builders and the
//! random instance generators of the computational study.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{FeasibleSetSpec, Instance, LinearConstraint, UncertaintyModel};

/// `sum x = p` over `n` items.
pub fn build_selection(n: usize, p: usize) -> Result<FeasibleSetSpec> {
    if p < 1 || p > n {
        return Err(Error::Precondition(format!("selection needs 1 <= p <= n, got p = {p}, n = {n}")));
    }
    Ok(FeasibleSetSpec {
        n,
        constraints: vec![LinearConstraint::eq((0..n).map(|i| (i, 1.0)), p as f64)],
        equal_cardinality: Some(p),
        integral_polytope: true,
    })
}

/// Perfect matchings of an `m x m` grid; variable `(i, j)` has index `i * m + j`.
pub fn build_assignment(m: usize) -> Result<FeasibleSetSpec> {
    if m < 1 {
        return Err(Error::Precondition("assignment needs m >= 1".into()));
    }
    let mut constraints = Vec::with_capacity(2 * m);
    for i in 0..m {
        constraints.push(LinearConstraint::eq((0..m).map(|j| (i * m + j, 1.0)), 1.0));
    }
    for j in 0..m {
        constraints.push(LinearConstraint::eq((0..m).map(|i| (i * m + j, 1.0)), 1.0));
    }
    Ok(FeasibleSetSpec { n: m * m, constraints, equal_cardinality: Some(m), integral_polytope: true })
}

/// `sum w x >= W`.
pub fn build_min_knapsack(w: &[f64], cap: f64) -> Result<FeasibleSetSpec> {
    if w.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Precondition("knapsack weights must be nonnegative".into()));
    }
    let total: f64 = w.iter().sum();
    if cap > total {
        return Err(Error::Precondition(format!("capacity {cap} exceeds total weight {total}")));
    }
    let row = LinearConstraint::ge(w.iter().copied().enumerate(), cap);
    // an all-zero row (W <= 0 with w = 0) is vacuous and dropped
    let constraints = if row.coeffs().is_empty() { Vec::new() } else { vec![row] };
    Ok(FeasibleSetSpec { n: w.len(), constraints, equal_cardinality: None, integral_polytope: false })
}

/// Generator stream for instance `index` under `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw(rng: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi) as f64).collect()
}

/// Costs per protocol: `C, c` in {1..20}, `d` in {0..100}, `budget = 0.1 sum d`.
fn protocol_instance(feasible: FeasibleSetSpec, rng: &mut ChaCha8Rng) -> Instance {
    let n = feasible.n;
    let first_stage = draw(rng, n, 1, 20);
    let nominal = draw(rng, n, 1, 20);
    let deviation = draw(rng, n, 0, 100);
    let budget = 0.1 * deviation.iter().sum::<f64>();
    Instance {
        feasible,
        first_stage,
        uncertainty: UncertaintyModel { nominal, deviation, budget, extra: Vec::new() },
        alpha: 0.0,
    }
}

/// Random assignment instance with `alpha = 0`; set the recovery fraction with
/// [`Instance::with_alpha`].
pub fn gen_random_assignment(m: usize, seed: u64) -> Result<Instance> {
    gen_random_assignment_at(m, seed, 0)
}

pub fn gen_random_assignment_at(m: usize, seed: u64, index: u64) -> Result<Instance> {
    let mut rng = rng_for(seed, index);
    Ok(protocol_instance(build_assignment(m)?, &mut rng))
}

/// Random minimum knapsack instance: weights in {1..20}, `W = 0.3 sum w`.
pub fn gen_random_knapsack(n: usize, seed: u64) -> Result<Instance> {
    gen_random_knapsack_at(n, seed, 0)
}

pub fn gen_random_knapsack_at(n: usize, seed: u64, index: u64) -> Result<Instance> {
    if n < 1 {
        return Err(Error::Precondition("knapsack needs n >= 1".into()));
    }
    let mut rng = rng_for(seed, index);
    let mut inst = protocol_instance(build_selection(n, 1)?, &mut rng);
    let w = draw(&mut rng, n, 1, 20);
    let cap = 0.3 * w.iter().sum::<f64>();
    inst.feasible = build_min_knapsack(&w, cap)?;
    Ok(inst)
}

/// Random `p`-of-`n` selection instance with the protocol cost ranges.
pub fn gen_random_selection_at(n: usize, p: usize, seed: u64, index: u64) -> Result<Instance> {
    let mut rng = rng_for(seed, index);
    Ok(protocol_instance(build_selection(n, p)?, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use crate::oracle::enumerate_feasible;

    #[test]
    fn selection_counts() {
        assert_eq!(enumerate_feasible(&build_selection(3, 2).unwrap()).unwrap().len(), 3);
        assert_eq!(enumerate_feasible(&build_selection(1, 1).unwrap()).unwrap().len(), 1);
        assert!(build_selection(3, 0).is_err());
        assert!(build_selection(3, 4).is_err());
    }

    #[test]
    fn assignment_small_cases() {
        let pts = enumerate_feasible(&build_assignment(1).unwrap()).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].to_string(), "1");
        assert_eq!(build_assignment(3).unwrap().constraints.len(), 6);
    }

    #[test]
    fn knapsack_extremes() {
        let w = [2.0, 2.0, 2.0];
        assert_eq!(enumerate_feasible(&build_min_knapsack(&w, 0.0).unwrap()).unwrap().len(), 8);
        let full = enumerate_feasible(&build_min_knapsack(&w, 6.0).unwrap()).unwrap();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].to_string(), "1,1,1");
        assert!(build_min_knapsack(&w, 6.5).is_err());
    }

    #[test]
    fn generators_follow_protocol() {
        let a = gen_random_assignment(10, 7).unwrap();
        assert_eq!(a.n(), 100);
        let d: f64 = a.uncertainty.deviation.iter().sum();
        assert!((a.uncertainty.budget - 0.1 * d).abs() < 1e-9);
        assert!(validate(&a).is_empty());
        assert_eq!(a, gen_random_assignment(10, 7).unwrap());
        assert_ne!(a, gen_random_assignment_at(10, 7, 1).unwrap());

        let k = gen_random_knapsack(100, 3).unwrap();
        let row = &k.feasible.constraints[0];
        let w: f64 = row.coeffs().iter().map(|&(_, a)| a).sum();
        assert!((row.rhs - 0.3 * w).abs() < 1e-9);
        assert!(validate(&k).is_empty());
    }
}
