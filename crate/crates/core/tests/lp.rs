mod common;

use proptest::prelude::*;
use robrec_core::lp::{lp_solve, LpModel, LpStatus, ObjSense};
use robrec_core::model::{LinearConstraint, Sense};

/// Hyperplanes bounding the feasible region: every row and every bound.
fn hyperplanes(lp: &LpModel) -> Vec<(Vec<f64>, f64)> {
    let n = lp.num_vars();
    let mut out = Vec::new();
    for r in &lp.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in r.coeffs() {
            a[j] += v;
        }
        out.push((a, r.rhs));
    }
    for j in 0..n {
        for b in [lp.lower[j], lp.upper[j]] {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            out.push((a, b));
        }
    }
    out
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Best objective over all vertices of a bounded LP, `None` if infeasible.
fn vertex_optimum(lp: &LpModel) -> Option<f64> {
    let n = lp.num_vars();
    let planes = hyperplanes(lp);
    let mut best: Option<f64> = None;
    let mut pick = Vec::new();
    fn rec(
        start: usize,
        n: usize,
        planes: &[(Vec<f64>, f64)],
        pick: &mut Vec<usize>,
        lp: &LpModel,
        best: &mut Option<f64>,
    ) {
        if pick.len() == n {
            let a = pick.iter().map(|&i| planes[i].0.clone()).collect();
            let b = pick.iter().map(|&i| planes[i].1).collect();
            if let Some(x) = solve_square(a, b) {
                if lp.max_violation(&x) <= 1e-7 {
                    let v = lp.objective_value(&x);
                    *best = Some(match (*best, lp.sense) {
                        (None, _) => v,
                        (Some(b), ObjSense::Minimize) => b.min(v),
                        (Some(b), ObjSense::Maximize) => b.max(v),
                    });
                }
            }
            return;
        }
        for i in start..planes.len() {
            pick.push(i);
            rec(i + 1, n, planes, pick, lp, best);
            pick.pop();
        }
    }
    rec(0, n, &planes, &mut pick, lp, &mut best);
    best
}

fn boxed(mut lp: LpModel) -> LpModel {
    for j in 0..lp.num_vars() {
        if !lp.upper[j].is_finite() {
            lp.upper[j] = lp.lower[j] + 5.0;
        }
    }
    lp
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn strong_duality_on_feasible_bounded_lps(seed in any::<u64>()) {
        let lp = common::random_lp(&mut common::rng(seed));
        let r = lp_solve(&lp).unwrap();
        prop_assert!(common::check_strong_duality(&lp, &r, 1e-6).is_ok(), "{:?}", common::check_strong_duality(&lp, &r, 1e-6));
    }

    #[test]
    fn agrees_with_vertex_enumeration(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let mut lp = boxed(common::random_lp(&mut rng));
        // extra rows unrelated to the construction point, possibly infeasible
        if seed % 3 == 0 {
            use rand::Rng;
            let coeffs: Vec<(usize, f64)> = (0..lp.num_vars()).map(|j| (j, rng.gen_range(-3..=3) as f64)).collect();
            lp.add_row(LinearConstraint::ge(coeffs, rng.gen_range(-5..=8) as f64));
        }
        let r = lp_solve(&lp).unwrap();
        match vertex_optimum(&lp) {
            None => prop_assert_eq!(r.status, LpStatus::Infeasible),
            Some(v) => {
                prop_assert_eq!(r.status, LpStatus::Optimal);
                prop_assert!((r.objective - v).abs() <= 1e-6 * (1.0 + v.abs()), "{} vs {}", r.objective, v);
            }
        }
    }

    #[test]
    fn resolving_is_bit_identical(seed in any::<u64>()) {
        let lp = common::random_lp(&mut common::rng(seed));
        let a = lp_solve(&lp).unwrap();
        let b = lp_solve(&lp).unwrap();
        prop_assert_eq!(a.primal.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.primal.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}

#[test]
fn larger_random_lps_keep_strong_duality() {
    use rand::Rng;
    let mut rng = common::rng(15);
    for k in 0..1000 {
        // stack two random blocks with a coupling row to reach up to 15 columns
        let a = common::random_lp(&mut rng);
        let b = common::random_lp(&mut rng);
        let mut lp = LpModel::new(a.sense);
        let off = a.num_vars();
        for j in 0..off {
            lp.add_var(a.objective[j], a.lower[j], a.upper[j]);
        }
        let flip = if a.sense == b.sense { 1.0 } else { -1.0 };
        for j in 0..b.num_vars().min(15 - off.min(15)) {
            lp.add_var(flip * b.objective[j], b.lower[j], b.upper[j]);
        }
        let nb = lp.num_vars() - off;
        for r in &a.rows {
            lp.add_row(r.clone());
        }
        for r in &b.rows {
            if r.max_index().map_or(true, |i| i < nb) {
                lp.add_row(r.shifted(off));
            }
        }
        if lp.num_vars() > 1 && rng.gen_bool(0.5) {
            // slack coupling row that any feasible point of the blocks satisfies
            lp.add_row(LinearConstraint::new([(0, 1.0), (lp.num_vars() - 1, 1.0)], Sense::Le, 1e6));
        }
        let r = lp_solve(&lp).unwrap();
        if let Err(e) = common::check_strong_duality(&lp, &r, 1e-6) {
            panic!("LP #{k}: {e}");
        }
    }
}
