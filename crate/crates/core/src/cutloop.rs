//! Constraint generation: a master LP picks the worst scenario against the
//! solutions found so far, an oracle answers with the best solution for that
//! scenario, and the loop stops when the two values meet.

use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{lp_feasible, lp_solve_with, LpModel, LpOptions, LpStatus, ObjSense};
use crate::mip::Limits;
use crate::model::{Bracket, BracketStatus, Instance, LinearConstraint, Scenario, Selection, UncertaintyModel};
use crate::solvers::{solve_deterministic, solve_incremental, solve_recoverable};

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_TIME_LIMIT: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub lb: f64,
    pub ub: f64,
    pub elapsed: f64,
}

pub fn write_trace_csv(rows: &[TraceRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "iter,lb,ub,elapsed")?;
    for r in rows {
        writeln!(out, "{},{},{},{:.6}", r.iter, r.lb, r.ub, r.elapsed)?;
    }
    Ok(())
}

/// A solution handed to the master: the row `t <= kappa + (nominal + delta).y`.
#[derive(Debug, Clone)]
struct Cut {
    kappa: f64,
    x: Option<Selection>,
    y: Selection,
}

struct Answer {
    /// Proven lower bound on the oracle's minimum at the queried scenario.
    lower: f64,
    cut: Option<Cut>,
    exact: bool,
}

/// Solves the master over the accumulated cuts; returns its value and the
/// maximizing deviation vector.
pub fn master_lp(u: &UncertaintyModel, cuts: &[(f64, &Selection)]) -> Result<(f64, Vec<f64>)> {
    let n = u.n();
    let mut lp = LpModel::new(ObjSense::Maximize);
    lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
    for &d in &u.deviation {
        lp.add_var(0.0, 0.0, d);
    }
    lp.add_row(LinearConstraint::le((1..=n).map(|i| (i, 1.0)), u.budget));
    for r in &u.extra {
        lp.add_row(r.shifted(1));
    }
    for &(kappa, y) in cuts {
        let coeffs = std::iter::once((0, 1.0)).chain(y.ones().map(|i| (i + 1, -1.0)));
        lp.add_row(LinearConstraint::le(coeffs, kappa + y.dot(&u.nominal)));
    }
    let r = lp_solve_with(&lp, LpOptions::precise())?;
    match r.status {
        LpStatus::Optimal => Ok((r.objective, r.primal[1..].to_vec())),
        s => Err(Error::Numerical(format!("master LP ended {s:?}"))),
    }
}

fn converged(lb: f64, ub: f64, epsilon: f64) -> bool {
    let slack = 1e-9 * ub.abs().max(1.0);
    if lb > 0.0 {
        ub - lb <= epsilon * lb + slack
    } else {
        ub - lb <= epsilon + slack
    }
}

fn remaining(start: Instant, limit: f64) -> f64 {
    (limit - start.elapsed().as_secs_f64()).max(0.0)
}

/// Generic loop over `max_{c in U} min_{cut} (kappa + c.y)`.
///
/// The oracle gets the costs, the time left and a relative gap it may stop
/// at. Its proven bound feeds `lb` and its incumbent becomes the cut, so the
/// bracket is valid either way; a repeated inexact cut is retried exactly.
fn generate(
    u: &UncertaintyModel,
    epsilon: f64,
    time_limit_s: f64,
    initial_delta: Vec<f64>,
    mut oracle: impl FnMut(&[f64], Limits) -> Result<Answer>,
) -> Result<(Bracket, Vec<TraceRow>, Option<Cut>)> {
    if !(epsilon >= 0.0) {
        return Err(Error::Precondition(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let start = Instant::now();
    let inner_gap = epsilon / 4.0;
    let mut delta = initial_delta;
    let mut cuts: Vec<Cut> = Vec::new();
    let mut seen: HashSet<(Option<Selection>, Selection)> = HashSet::new();
    let mut lb = f64::NEG_INFINITY;
    let mut ub = f64::INFINITY;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let status = loop {
        iterations += 1;
        let costs: Vec<f64> = u.nominal.iter().zip(&delta).map(|(a, b)| a + b).collect();
        let limits = |gap| Limits { time_limit_s: remaining(start, time_limit_s), gap };
        let mut ans = oracle(&costs, limits(inner_gap))?;
        lb = lb.max(ans.lower);
        let mut cut = ans.cut.take();
        if !ans.exact && cut.as_ref().is_some_and(|c| seen.contains(&(c.x.clone(), c.y.clone()))) {
            ans = oracle(&costs, limits(0.0))?;
            lb = lb.max(ans.lower);
            cut = ans.cut.take();
        }
        let Some(cut) = cut else { break BracketStatus::TimeLimit };
        if !seen.insert((cut.x.clone(), cut.y.clone())) {
            // the master already holds this solution
            break if ans.exact || converged(lb, ub, epsilon) {
                BracketStatus::Converged
            } else {
                BracketStatus::TimeLimit
            };
        }
        cuts.push(cut);
        let rows: Vec<(f64, &Selection)> = cuts.iter().map(|c| (c.kappa, &c.y)).collect();
        let (value, next) = master_lp(u, &rows)?;
        ub = ub.min(value);
        trace.push(TraceRow { iter: iterations, lb, ub, elapsed: start.elapsed().as_secs_f64() });
        delta = next;
        if converged(lb, ub, epsilon) {
            break BracketStatus::Converged;
        }
        if remaining(start, time_limit_s) <= 0.0 {
            break BracketStatus::TimeLimit;
        }
    };
    let bracket = Bracket {
        lb,
        ub: ub.max(lb),
        status,
        iterations,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        witness_scenario: Some(Scenario::from_delta(u, delta)),
        witness_solution: None,
    };
    Ok((bracket, trace, cuts.pop()))
}

/// `(v, c0)`: the largest level `v` such that raising every cost below `v`
/// up to `v` (within its deviation) still fits in the scenario set.
pub fn heuristic_level(u: &UncertaintyModel) -> Result<(f64, Scenario)> {
    let n = u.n();
    let top = u.worst().into_iter().fold(0.0, f64::max);
    let lift = |v: f64| -> Vec<f64> {
        (0..n).map(|i| (v - u.nominal[i]).clamp(0.0, u.deviation[i])).collect()
    };
    if u.is_budgeted_only() {
        let total = |v: f64| lift(v).iter().sum::<f64>();
        if total(top) <= u.budget {
            return Ok((top, Scenario::from_delta(u, u.deviation.clone())));
        }
        let mut points: Vec<f64> = u
            .nominal
            .iter()
            .zip(&u.deviation)
            .flat_map(|(&c, &d)| [c, c + d])
            .chain([0.0, top])
            .filter(|p| (0.0..=top).contains(p))
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let mut prev = 0.0;
        for &p in &points {
            let fp = total(p);
            if fp > u.budget {
                let fprev = total(prev);
                let v = prev + (u.budget - fprev) * (p - prev) / (fp - fprev);
                let mut delta = lift(v);
                // absorb rounding so the budget row holds exactly
                let s: f64 = delta.iter().sum();
                if s > u.budget && s > 0.0 {
                    delta.iter_mut().for_each(|d| *d *= u.budget / s);
                }
                return Ok((v, Scenario::from_delta(u, delta)));
            }
            prev = p;
        }
        unreachable!("total(top) exceeds the budget, so some breakpoint does");
    }
    let mut rows = vec![LinearConstraint::le((0..n).map(|i| (i, 1.0)), u.budget)];
    rows.extend(u.extra.iter().cloned());
    let probe = |v: f64| lp_feasible(&rows, &lift(v), &u.deviation);
    let (ok, w) = probe(top)?;
    if ok {
        return Ok((top, Scenario::from_delta(u, w.unwrap_or_else(|| lift(top)))));
    }
    let (ok, w0) = probe(0.0)?;
    if !ok {
        return Err(Error::Precondition("delta = 0 is not in the scenario set".into()));
    }
    let (mut lo, mut hi) = (0.0, top);
    let mut witness = w0.unwrap_or_else(|| vec![0.0; n]);
    while hi - lo > 1e-6 * top {
        let mid = 0.5 * (lo + hi);
        match probe(mid)? {
            (true, w) => {
                lo = mid;
                witness = w.unwrap_or_else(|| lift(mid));
            }
            (false, _) => hi = mid,
        }
    }
    Ok((lo, Scenario::from_delta(u, witness)))
}

pub fn heuristic_scenario(u: &UncertaintyModel) -> Result<Scenario> {
    heuristic_level(u).map(|(_, s)| s)
}

/// Bracket on `Eval(x)`, first-stage term included.
pub fn eval_solution(
    inst: &Instance,
    x: &Selection,
    epsilon: f64,
    time_limit_s: f64,
    c_init: Option<&Scenario>,
) -> Result<Bracket> {
    eval_solution_traced(inst, x, epsilon, time_limit_s, c_init).map(|(b, _)| b)
}

pub fn eval_solution_traced(
    inst: &Instance,
    x: &Selection,
    epsilon: f64,
    time_limit_s: f64,
    c_init: Option<&Scenario>,
) -> Result<(Bracket, Vec<TraceRow>)> {
    if x.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: x.len() });
    }
    if !inst.feasible.contains(x) {
        return Err(Error::Precondition(format!("x = {x} is not in the feasible set")));
    }
    let u = &inst.uncertainty;
    let delta = match c_init {
        Some(s) => s.delta.clone(),
        None => heuristic_scenario(u)?.delta,
    };
    let (mut b, trace, last) = generate(u, epsilon, time_limit_s, delta, |c, limits| {
        let r = solve_incremental(inst, x, c, limits)?;
        Ok(Answer {
            lower: r.safe_lower(),
            exact: r.is_optimal(),
            cut: r.solution.map(|y| Cut { kappa: 0.0, x: None, y }),
        })
    })?;
    let cx = x.dot(&inst.first_stage);
    b.lb += cx;
    b.ub += cx;
    b.witness_solution = last.map(|c| c.y);
    let trace = trace.into_iter().map(|t| TraceRow { lb: t.lb + cx, ub: t.ub + cx, ..t }).collect();
    Ok((b, trace))
}

/// Bracket on `max over c in U of Rec(c)`, a lower bound on the robust optimum.
pub fn adversarial_lb(inst: &Instance, epsilon: f64, time_limit_s: f64) -> Result<Bracket> {
    adversarial_lb_traced(inst, epsilon, time_limit_s).map(|(b, _)| b)
}

pub fn adversarial_lb_traced(
    inst: &Instance,
    epsilon: f64,
    time_limit_s: f64,
) -> Result<(Bracket, Vec<TraceRow>)> {
    let u = &inst.uncertainty;
    let c0 = heuristic_scenario(u)?;
    let (mut b, trace, last) = generate(u, epsilon, time_limit_s, c0.delta, |c, limits| {
        let r = solve_recoverable(inst, c, limits)?;
        Ok(Answer {
            lower: r.safe_lower(),
            exact: r.is_optimal(),
            cut: r.solution.map(|p| Cut { kappa: p.x.dot(&inst.first_stage), x: Some(p.x), y: p.y }),
        })
    })?;
    b.witness_solution = last.and_then(|c| c.x);
    Ok((b, trace))
}

/// `Rec(c0)` at the heuristic scenario; the MIP's bound if it times out.
pub fn lb_heuristic(inst: &Instance, limits: Limits) -> Result<f64> {
    let c0 = heuristic_scenario(&inst.uncertainty)?;
    Ok(solve_recoverable(inst, &c0.costs, limits)?.safe_lower())
}

/// Bracket on `max over c in U of min over y in X of c.y` (no first stage).
pub fn max_min_bracket(inst: &Instance, epsilon: f64, time_limit_s: f64) -> Result<Bracket> {
    let u = &inst.uncertainty;
    let c0 = heuristic_scenario(u)?;
    let (mut b, _, last) = generate(u, epsilon, time_limit_s, c0.delta, |c, limits| {
        let r = solve_deterministic(&inst.feasible, c, limits)?;
        Ok(Answer {
            lower: r.safe_lower(),
            exact: r.is_optimal(),
            cut: r.solution.map(|y| Cut { kappa: 0.0, x: None, y }),
        })
    })?;
    b.witness_solution = last.map(|c| c.y);
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{counterexample, toy3};

    fn sel(s: &str) -> Selection {
        s.parse().unwrap()
    }

    #[test]
    fn heuristic_examples() {
        let u = toy3().uncertainty;
        let (v, c0) = heuristic_level(&u).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        assert_eq!(c0.costs, vec![3.0, 3.0, 4.0]);
        let mut g0 = u.clone();
        g0.budget = 0.0;
        assert_eq!(heuristic_scenario(&g0).unwrap().costs, g0.nominal);
        let mut big = u.clone();
        big.budget = 100.0;
        assert_eq!(heuristic_scenario(&big).unwrap().costs, big.worst());
    }

    #[test]
    fn heuristic_with_extra_rows_matches_closed_form_when_loose() {
        let u = toy3().uncertainty;
        let mut v = u.clone();
        v.extra.push(LinearConstraint::le([(0, 1.0), (1, 1.0)], 10.0));
        let (a, _) = heuristic_level(&u).unwrap();
        let (b, s) = heuristic_level(&v).unwrap();
        assert!((a - b).abs() <= 1e-6 * 7.0, "{a} vs {b}");
        assert!(v.contains(&s, 1e-7));
    }

    #[test]
    fn toy3_eval_and_adversary() {
        let inst = toy3();
        let b = eval_solution(&inst, &sel("1,1,0"), 1e-6, 60.0, None).unwrap();
        assert_eq!(b.status, BracketStatus::Converged);
        assert!((b.lb - 9.0).abs() < 1e-6 && (b.ub - 9.0).abs() < 1e-6, "{b:?}");
        let b = adversarial_lb(&inst, 1e-6, 60.0).unwrap();
        assert!((b.lb - 9.0).abs() < 1e-6, "{b:?}");
        assert_eq!(lb_heuristic(&inst, Limits::default()).unwrap(), 9.0);
    }

    #[test]
    fn counterexample_adversary_sits_inside() {
        let inst = counterexample();
        let b = eval_solution(&inst, &sel("1,0"), 1e-6, 60.0, None).unwrap();
        assert!((b.ub - 0.5).abs() < 1e-6);
        let w = b.witness_scenario.unwrap();
        assert!((w.costs[0] - 0.5).abs() < 1e-6 && (w.costs[1] - 0.5).abs() < 1e-6);
        let b = adversarial_lb(&inst, 1e-6, 60.0).unwrap();
        assert!((b.lb - 0.5).abs() < 1e-6);
    }

    #[test]
    fn zero_budget_takes_one_iteration() {
        let mut inst = toy3();
        inst.uncertainty.budget = 0.0;
        let b = eval_solution(&inst, &sel("1,1,0"), 0.01, 60.0, None).unwrap();
        assert_eq!(b.iterations, 1);
        assert_eq!(b.lb, 6.0);
    }

    #[test]
    fn trace_is_monotone_and_serializes() {
        let inst = toy3();
        let (_, trace) = eval_solution_traced(&inst, &sel("1,0,1"), 0.0, 60.0, None).unwrap();
        for w in trace.windows(2) {
            assert!(w[1].lb >= w[0].lb && w[1].ub <= w[0].ub);
        }
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("iter,lb,ub,elapsed\n1,"));
    }
}
