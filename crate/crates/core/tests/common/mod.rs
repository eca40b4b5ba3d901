#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robrec_core::model::{Instance, LinearConstraint, UncertaintyModel};
use robrec_core::problems::{
    build_min_knapsack, gen_random_assignment_at, gen_random_knapsack_at, gen_random_selection_at,
};

pub const ALPHAS: [f64; 4] = [0.0, 0.3, 0.5, 1.0];

/// Small instances of all three families drawn with the study's generator:
/// selection n in 4..=8, assignment m in {2, 3}, knapsack n in 4..=8, each
/// at every alpha in [`ALPHAS`].
pub fn small_corpus(per_family: usize, seed: u64) -> Vec<(String, Instance)> {
    let mut out = Vec::new();
    for k in 0..per_family {
        let idx = k as u64;
        let n = 4 + k % 5;
        let p = 1 + (k / 5) % (n - 1);
        let sel = gen_random_selection_at(n, p, seed, idx).unwrap();
        let asg = gen_random_assignment_at(2 + k % 2, seed, 1000 + idx).unwrap();
        let knap = gen_random_knapsack_at(4 + k % 5, seed, 2000 + idx).unwrap();
        for &a in &ALPHAS {
            out.push((format!("selection n={n} p={p} #{k} alpha={a}"), sel.with_alpha(a)));
            out.push((format!("assignment m={} #{k} alpha={a}", 2 + k % 2), asg.with_alpha(a)));
            out.push((format!("knapsack n={} #{k} alpha={a}", 4 + k % 5), knap.with_alpha(a)));
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random scenario of the instance's uncertainty set: a random deviation
/// scaled into the budget.
pub fn random_scenario(u: &UncertaintyModel, rng: &mut impl Rng) -> Vec<f64> {
    let mut delta: Vec<f64> = u.deviation.iter().map(|&d| rng.gen_range(0.0..=1.0) * d).collect();
    let s: f64 = delta.iter().sum();
    if s > u.budget && s > 0.0 {
        delta.iter_mut().for_each(|v| *v *= u.budget / s);
    }
    u.nominal.iter().zip(&delta).map(|(c, d)| c + d).collect()
}

/// Knapsack instance with small weights so neighborhoods stay varied.
pub fn small_knapsack(n: usize, rng: &mut impl Rng, alpha: f64) -> Instance {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=6) as f64).collect();
    let cap = (0.4 * w.iter().sum::<f64>()).round();
    let feasible = build_min_knapsack(&w, cap).unwrap();
    let deviation: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=10) as f64).collect();
    let budget = rng.gen_range(0..=deviation.iter().sum::<f64>() as u32) as f64;
    Instance::new(
        feasible,
        (0..n).map(|_| rng.gen_range(0..=10) as f64).collect(),
        UncertaintyModel {
            nominal: (0..n).map(|_| rng.gen_range(1..=10) as f64).collect(),
            deviation,
            budget,
            extra: Vec::new(),
        },
        alpha,
    )
    .unwrap()
}

/// Adds one random coupling row `sum g_i delta_i <= h` with `h >= 0`.
pub fn with_random_extra(inst: &Instance, rng: &mut impl Rng) -> Instance {
    let n = inst.n();
    let g: Vec<(usize, f64)> = (0..n)
        .filter_map(|i| {
            let v = rng.gen_range(-2..=3) as f64;
            (v != 0.0).then_some((i, v))
        })
        .collect();
    let mut out = inst.clone();
    if !g.is_empty() {
        let h = rng.gen_range(0..=10) as f64;
        out.uncertainty.extra.push(LinearConstraint::le(g, h));
    }
    out
}

use robrec_core::lp::{LpModel, LpResult, LpStatus, ObjSense};
use robrec_core::model::Sense;

/// Random LP that is feasible by construction (rows are built around a
/// point inside the box) and bounded (every unbounded direction costs).
pub fn random_lp(rng: &mut impl Rng) -> LpModel {
    let n = rng.gen_range(1..=8);
    let m = rng.gen_range(1..=6);
    let sense = if rng.gen_bool(0.5) { ObjSense::Minimize } else { ObjSense::Maximize };
    let mut lp = LpModel::new(sense);
    let mut point = Vec::with_capacity(n);
    for _ in 0..n {
        let c = rng.gen_range(-6..=6) as f64;
        let lo = rng.gen_range(-3..=1) as f64;
        // an open upper bound only where the objective pushes down
        let pushes_down = match sense {
            ObjSense::Minimize => c >= 0.0,
            ObjSense::Maximize => c <= 0.0,
        };
        let hi = if pushes_down && rng.gen_bool(0.3) { f64::INFINITY } else { lo + rng.gen_range(0..=5) as f64 };
        lp.add_var(c, lo, hi);
        point.push(if hi.is_finite() { rng.gen_range(lo..=hi) } else { lo + rng.gen_range(0.0..3.0) });
    }
    for _ in 0..m {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .filter_map(|j| {
                let a = rng.gen_range(-4..=4) as f64;
                (a != 0.0).then_some((j, a))
            })
            .collect();
        if coeffs.is_empty() {
            continue;
        }
        let act: f64 = coeffs.iter().map(|&(j, a)| a * point[j]).sum();
        let row = match rng.gen_range(0..3) {
            0 => LinearConstraint::le(coeffs, (act + rng.gen_range(0.0..2.0)).ceil()),
            1 => LinearConstraint::ge(coeffs, (act - rng.gen_range(0.0..2.0)).floor()),
            _ => LinearConstraint::eq(coeffs, act),
        };
        lp.add_row(row);
    }
    lp
}

/// Certifies optimality from the returned duals alone: primal feasibility,
/// dual sign feasibility, and equal primal and dual objectives.
pub fn check_strong_duality(lp: &LpModel, r: &LpResult, tol: f64) -> Result<(), String> {
    if r.status != LpStatus::Optimal {
        return Err(format!("status {:?}", r.status));
    }
    let viol = lp.max_violation(&r.primal);
    if viol > tol {
        return Err(format!("primal violation {viol}"));
    }
    let s = match lp.sense {
        ObjSense::Minimize => 1.0,
        ObjSense::Maximize => -1.0,
    };
    // work in minimization form: y' = s * y
    let mut dual_obj = 0.0;
    let mut reduced: Vec<f64> = lp.objective.iter().map(|c| s * c).collect();
    for (row, &y) in lp.rows.iter().zip(&r.dual) {
        let y = s * y;
        let ok = match row.sense {
            Sense::Le => y <= tol,
            Sense::Ge => y >= -tol,
            Sense::Eq => true,
        };
        if !ok {
            return Err(format!("dual sign wrong: {y} on {:?} row", row.sense));
        }
        dual_obj += row.rhs * y;
        for &(j, a) in row.coeffs() {
            reduced[j] -= a * y;
        }
    }
    for (j, &d) in reduced.iter().enumerate() {
        if d > tol {
            if !lp.lower[j].is_finite() {
                return Err(format!("reduced cost {d} on column {j} without lower bound"));
            }
            dual_obj += d * lp.lower[j];
        } else if d < -tol {
            if !lp.upper[j].is_finite() {
                return Err(format!("reduced cost {d} on column {j} without upper bound"));
            }
            dual_obj += d * lp.upper[j];
        }
    }
    let primal = s * lp.objective_value(&r.primal);
    if (primal - dual_obj).abs() > tol * (1.0 + primal.abs()) {
        return Err(format!("primal {primal} vs dual {dual_obj}"));
    }
    if (s * r.objective - primal).abs() > tol * (1.0 + primal.abs()) {
        return Err(format!("reported objective {} vs {}", r.objective, s * primal));
    }
    Ok(())
}

/// Random pure 0-1 program with integer data; may be infeasible.
pub fn random_binary_program(rng: &mut impl Rng) -> (ObjSense, Vec<f64>, Vec<LinearConstraint>) {
    let n = rng.gen_range(1..=12);
    let sense = if rng.gen_bool(0.5) { ObjSense::Minimize } else { ObjSense::Maximize };
    let costs: Vec<f64> = (0..n).map(|_| rng.gen_range(-10..=10) as f64).collect();
    let rows = (0..rng.gen_range(1..=4))
        .filter_map(|_| {
            let coeffs: Vec<(usize, f64)> = (0..n)
                .filter_map(|j| {
                    let a = rng.gen_range(-5..=5) as f64;
                    (a != 0.0 && rng.gen_bool(0.7)).then_some((j, a))
                })
                .collect();
            if coeffs.is_empty() {
                return None;
            }
            let pos: f64 = coeffs.iter().map(|c| c.1.max(0.0)).sum();
            let neg: f64 = coeffs.iter().map(|c| c.1.min(0.0)).sum();
            let rhs = rng.gen_range(neg as i32..=pos as i32) as f64;
            Some(match rng.gen_range(0..5) {
                0 | 1 => LinearConstraint::le(coeffs, rhs),
                2 | 3 => LinearConstraint::ge(coeffs, rhs),
                _ => LinearConstraint::eq(coeffs, rhs),
            })
        })
        .collect();
    (sense, costs, rows)
}

/// Exhaustive optimum of a 0-1 program, `None` when infeasible.
pub fn enumerate_binary_program(sense: ObjSense, costs: &[f64], rows: &[LinearConstraint]) -> Option<f64> {
    let n = costs.len();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        let x: Vec<f64> = (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
        let ok = rows.iter().all(|r| {
            let a = r.activity(&x);
            match r.sense {
                Sense::Le => a <= r.rhs,
                Sense::Ge => a >= r.rhs,
                Sense::Eq => a == r.rhs,
            }
        });
        if ok {
            let v: f64 = costs.iter().zip(&x).map(|(c, x)| c * x).sum();
            best = Some(match (best, sense) {
                (None, _) => v,
                (Some(b), ObjSense::Minimize) => b.min(v),
                (Some(b), ObjSense::Maximize) => b.max(v),
            });
        }
    }
    best
}
