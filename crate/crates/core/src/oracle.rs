//! Brute-force ground truth by enumeration of the feasible set.
//!
//! Nothing here calls the branch-and-bound kernel; the only shared piece is
//! the simplex, run with tightened tolerances.

use crate::error::{Error, Result};
use crate::lp::{lp_solve_with, LpModel, LpOptions, LpStatus, ObjSense};
use crate::model::{in_neighborhood, FeasibleSetSpec, Instance, LinearConstraint, Selection, SolutionPair};

pub const ENUMERATION_LIMIT: usize = 20;
pub const ROBREC_LIMIT: usize = 14;
pub const PAIR_LIMIT: usize = 12;
pub const VERTEX_LIMIT: usize = 6;

fn guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Guard { n, limit })
    } else {
        Ok(())
    }
}

/// All points of the feasible set, lexicographic with ones first
/// (`1,1,0` precedes `1,0,1`).
pub fn enumerate_feasible(spec: &FeasibleSetSpec) -> Result<Vec<Selection>> {
    let n = spec.n;
    guard(n, ENUMERATION_LIMIT)?;
    let mut out = Vec::new();
    let mut v = vec![0.0; n];
    let total = 1u64 << n;
    for k in (0..total).rev() {
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = ((k >> (n - 1 - i)) & 1) as f64;
        }
        if spec.constraints.iter().all(|c| c.is_satisfied(&v, 1e-9)) {
            out.push(Selection::from_reals(&v));
        }
    }
    Ok(out)
}

/// Enumerated neighborhood of `x` (membership in the feasible set included).
pub fn neighborhood(inst: &Instance, x: &Selection) -> Result<Vec<Selection>> {
    let all = enumerate_feasible(&inst.feasible)?;
    let mut out = Vec::new();
    for y in all {
        if in_neighborhood(x, &y, inst.alpha)? {
            out.push(y);
        }
    }
    Ok(out)
}

/// `min c.y` over the neighborhood of `x`, first minimizer in enumeration order.
pub fn brute_inc(inst: &Instance, x: &Selection, costs: &[f64]) -> Result<(f64, Selection)> {
    require_member(inst, x)?;
    let mut best: Option<(f64, Selection)> = None;
    for y in neighborhood(inst, x)? {
        let v = y.dot(costs);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, y));
        }
    }
    best.ok_or_else(|| Error::Precondition("empty neighborhood".into()))
}

/// `min C.x + c.y` over all feasible pairs.
pub fn brute_rec(inst: &Instance, costs: &[f64]) -> Result<(f64, SolutionPair)> {
    let all = enumerate_feasible(&inst.feasible)?;
    let mut best: Option<(f64, SolutionPair)> = None;
    for x in &all {
        let cx = x.dot(&inst.first_stage);
        for y in &all {
            if !in_neighborhood(x, y, inst.alpha)? {
                continue;
            }
            let v = cx + y.dot(costs);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, SolutionPair { x: x.clone(), y: y.clone() }));
            }
        }
    }
    best.ok_or_else(|| Error::Precondition("feasible set is empty".into()))
}

fn require_member(inst: &Instance, x: &Selection) -> Result<()> {
    if x.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: x.len() });
    }
    if !inst.feasible.contains(x) {
        return Err(Error::Precondition(format!("x = {x} is not feasible")));
    }
    Ok(())
}

/// `max t` s.t. `t <= k + (nominal + delta).y` for every `(k, y)`, delta in U.
/// Variable 0 is `t`, variables `1..=n` are delta.
fn scenario_lp(inst: &Instance, rows: &[(f64, &Selection)]) -> Result<(f64, Vec<f64>)> {
    let u = &inst.uncertainty;
    let n = inst.n();
    let mut lp = LpModel::new(ObjSense::Maximize);
    lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
    for &d in &u.deviation {
        lp.add_var(0.0, 0.0, d);
    }
    lp.add_row(LinearConstraint::le((1..=n).map(|i| (i, 1.0)), u.budget));
    for r in &u.extra {
        lp.add_row(r.shifted(1));
    }
    for &(k, y) in rows {
        // t - delta.y <= k + nominal.y
        let coeffs = std::iter::once((0, 1.0)).chain(y.ones().map(|i| (i + 1, -1.0)));
        lp.add_row(LinearConstraint::le(coeffs, k + y.dot(&u.nominal)));
    }
    let r = lp_solve_with(&lp, LpOptions::precise())?;
    match r.status {
        LpStatus::Optimal => Ok((r.objective, r.primal[1..].to_vec())),
        other => Err(Error::Numerical(format!("scenario LP ended {other:?}"))),
    }
}

/// Exact `Eval(x)` including the first-stage term.
pub fn brute_eval(inst: &Instance, x: &Selection) -> Result<f64> {
    brute_eval_detail(inst, x).map(|(v, _)| v)
}

/// `Eval(x)` and a maximizing deviation vector.
pub fn brute_eval_detail(inst: &Instance, x: &Selection) -> Result<(f64, Vec<f64>)> {
    guard(inst.n(), ENUMERATION_LIMIT)?;
    require_member(inst, x)?;
    let ys = neighborhood(inst, x)?;
    let rows: Vec<(f64, &Selection)> = ys.iter().map(|y| (0.0, y)).collect();
    let (v, delta) = scenario_lp(inst, &rows)?;
    Ok((x.dot(&inst.first_stage) + v, delta))
}

/// Exact optimum by minimizing [`brute_eval`] over the feasible set; the first
/// minimizer in enumeration order is returned.
pub fn brute_robrec(inst: &Instance) -> Result<(f64, Selection)> {
    guard(inst.n(), ROBREC_LIMIT)?;
    let mut best: Option<(f64, Selection)> = None;
    for x in enumerate_feasible(&inst.feasible)? {
        let v = brute_eval(inst, &x)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b - 1e-9) {
            best = Some((v, x));
        }
    }
    best.ok_or_else(|| Error::Precondition("feasible set is empty".into()))
}

/// `max over c in U of Rec(c)`, by one scenario LP over every feasible pair.
pub fn brute_adv(inst: &Instance) -> Result<f64> {
    guard(inst.n(), PAIR_LIMIT)?;
    let all = enumerate_feasible(&inst.feasible)?;
    let mut pairs = Vec::new();
    for x in &all {
        for y in &all {
            if in_neighborhood(x, y, inst.alpha)? {
                pairs.push((x.dot(&inst.first_stage), y));
            }
        }
    }
    scenario_lp(inst, &pairs).map(|(v, _)| v)
}

/// `max min_y c.y` over the scenario set, `y` ranging over the feasible set.
pub fn brute_maxmin(inst: &Instance) -> Result<f64> {
    let all = enumerate_feasible(&inst.feasible)?;
    let rows: Vec<(f64, &Selection)> = all.iter().map(|y| (0.0, y)).collect();
    scenario_lp(inst, &rows).map(|(v, _)| v)
}

/// Vertices of the deviation polytope, by solving every square subsystem of
/// active constraints and keeping the feasible, distinct solutions.
pub fn deviation_vertices(inst: &Instance) -> Result<Vec<Vec<f64>>> {
    let n = inst.n();
    guard(n, VERTEX_LIMIT)?;
    let u = &inst.uncertainty;
    // each candidate hyperplane as (dense coefficients, rhs)
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        planes.push((e.clone(), 0.0));
        planes.push((e, u.deviation[i]));
    }
    planes.push((vec![1.0; n], u.budget));
    for r in &u.extra {
        let mut a = vec![0.0; n];
        for &(i, v) in r.coeffs() {
            a[i] = v;
        }
        planes.push((a, r.rhs));
    }
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for subset in combinations(planes.len(), n) {
        let a: Vec<Vec<f64>> = subset.iter().map(|&k| planes[k].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&k| planes[k].1).collect();
        let Some(p) = solve_square(a, b) else { continue };
        if !u.contains_delta(&p, 1e-9) {
            continue;
        }
        if !vertices.iter().any(|v| v.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-9)) {
            vertices.push(p);
        }
    }
    Ok(vertices)
}

/// The largest `Rec(nominal + delta)` over vertices of the deviation polytope.
/// Underestimates the adversarial value whenever the worst scenario is not a
/// vertex.
pub fn extreme_point_value(inst: &Instance) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for delta in deviation_vertices(inst)? {
        let c: Vec<f64> = inst.uncertainty.nominal.iter().zip(&delta).map(|(a, b)| a + b).collect();
        best = best.max(brute_rec(inst, &c)?.0);
    }
    Ok(best)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}
