//! Lower bounds from relaxed incremental problems, the two-solve upper bound,
//! the resulting first-stage choice, and the ratio report combining them.

use std::time::Instant;

use serde::Serialize;

use crate::cutloop::{adversarial_lb, eval_solution, heuristic_scenario, max_min_bracket};
use crate::error::{Error, Result};
use crate::lp::{LpModel, ObjSense};
use crate::mip::{mip_solve_from, mip_solve_limits, Limits, MipModel, MipStatus};
use crate::model::{Bracket, Instance, LinearConstraint, Selection, Sense};
use crate::solvers::{solve_deterministic, solve_recoverable};

/// A bound together with whether the MIP behind it finished.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    /// False when a time limit cut the solve short; `value` is then the
    /// solver's proven bound, still valid but weaker.
    pub proven: bool,
    pub elapsed_seconds: f64,
}

/// Appends the dual of the inner maximization over deviations for the
/// second-stage block starting at column `y`:
///
/// * `u_i >= 0` prices `delta_i <= d_i` (cost `d_i`),
/// * `pi >= 0` prices the budget row (cost `budget`),
/// * `w_k` prices extra row `k` (cost `rhs_k`), with `w_k >= 0` for `<=`,
///   `w_k <= 0` for `>=`, free for `=`,
///
/// and the row `-y_i + pi + u_i + sum_k G_ki w_k >= 0` for every `delta_i`.
fn add_adversary_dual(lp: &mut LpModel, inst: &Instance, y: usize) {
    let n = inst.n();
    let u = &inst.uncertainty;
    let u0 = lp.num_vars();
    for &d in &u.deviation {
        lp.add_var(d, 0.0, f64::INFINITY);
    }
    let pi = lp.add_var(u.budget, 0.0, f64::INFINITY);
    let w0 = lp.num_vars();
    for r in &u.extra {
        let (l, h) = match r.sense {
            Sense::Le => (0.0, f64::INFINITY),
            Sense::Ge => (f64::NEG_INFINITY, 0.0),
            Sense::Eq => (f64::NEG_INFINITY, f64::INFINITY),
        };
        lp.add_var(r.rhs, l, h);
    }
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (k, r) in u.extra.iter().enumerate() {
        for &(i, g) in r.coeffs() {
            columns[i].push((w0 + k, g));
        }
    }
    for (i, col) in columns.into_iter().enumerate() {
        let coeffs = [(y + i, -1.0), (pi, 1.0), (u0 + i, 1.0)].into_iter().chain(col);
        lp.add_row(LinearConstraint::ge(coeffs, 0.0));
    }
}

/// Relaxed-evaluation lower bound: the recovery `y` keeps only the
/// cardinality (equal cardinality) or exclusion row, is made continuous, and
/// the inner adversary is dualized.
///
/// Columns: `x` binary, `y`, `z = x*y` in `[0,1]`, then the dual block.
pub fn lb_selection(inst: &Instance, limits: Limits) -> Result<BoundValue> {
    let n = inst.n();
    let u = &inst.uncertainty;
    let mut lp = LpModel::new(ObjSense::Minimize);
    for &c in &inst.first_stage {
        lp.add_var(c, 0.0, 1.0);
    }
    for &c in &u.nominal {
        lp.add_var(c, 0.0, 1.0);
    }
    for _ in 0..n {
        lp.add_var(0.0, 0.0, 1.0);
    }
    let (y, z) = (n, 2 * n);
    lp.rows.extend(inst.feasible.constraints.iter().cloned());
    match inst.overlap_requirement() {
        Some(l) => {
            let m = inst.feasible.equal_cardinality.unwrap_or(0) as f64;
            lp.add_row(LinearConstraint::eq((0..n).map(|i| (y + i, 1.0)), m));
            lp.add_row(LinearConstraint::ge((0..n).map(|i| (z + i, 1.0)), l as f64));
        }
        None => {
            let coeffs = (0..n).flat_map(|i| [(z + i, 1.0), (i, inst.alpha - 1.0)]);
            lp.add_row(LinearConstraint::ge(coeffs, 0.0));
        }
    }
    for i in 0..n {
        lp.add_row(LinearConstraint::le([(z + i, 1.0), (i, -1.0)], 0.0));
        lp.add_row(LinearConstraint::le([(z + i, 1.0), (y + i, -1.0)], 0.0));
    }
    add_adversary_dual(&mut lp, inst, y);
    solve_bound(&MipModel::new(lp, (0..n).collect()), limits, 0.0)
}

fn solve_bound(model: &MipModel, limits: Limits, constant: f64) -> Result<BoundValue> {
    solve_bound_from(model, limits, constant, None).map(|(b, _)| b)
}

fn solve_bound_from(
    model: &MipModel,
    limits: Limits,
    constant: f64,
    start: Option<&[f64]>,
) -> Result<(BoundValue, Option<Vec<f64>>)> {
    let r = match start {
        Some(p) => mip_solve_from(model, limits, p)?,
        None => mip_solve_limits(model, limits)?,
    };
    match r.status {
        MipStatus::Infeasible => Err(Error::Precondition("bound model infeasible: empty feasible set".into())),
        _ => Ok((
            BoundValue {
                value: constant + if r.is_optimal() { r.value.unwrap_or(r.best_bound) } else { r.best_bound },
                proven: r.is_optimal(),
                elapsed_seconds: r.elapsed_seconds,
            },
            r.incumbent,
        )),
    }
}

fn lagrangian_applicable(inst: &Instance) -> Result<usize> {
    if !inst.feasible.integral_polytope {
        return Err(Error::Precondition(
            "Lagrangian bound needs an integral feasible polytope (integral_polytope = true)".into(),
        ));
    }
    inst.overlap_requirement().ok_or_else(|| {
        Error::Precondition("Lagrangian bound needs an equal cardinality problem".into())
    })
}

/// Lagrangian lower bound for multiplier `mu >= 0` on the overlap row:
/// `y` ranges over the LP relaxation of the feasible set, `x` stays binary.
pub fn lb_lagrangian(inst: &Instance, mu: f64, limits: Limits) -> Result<BoundValue> {
    let (model, constant) = lagrangian_model(inst, mu)?;
    solve_bound(&model, limits, constant)
}

/// The rows do not depend on `mu`, so points of one model are feasible for all.
fn lagrangian_model(inst: &Instance, mu: f64) -> Result<(MipModel, f64)> {
    let l = lagrangian_applicable(inst)?;
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::Precondition(format!("multiplier must be finite and >= 0, got {mu}")));
    }
    let n = inst.n();
    let mut lp = LpModel::new(ObjSense::Minimize);
    for &c in &inst.first_stage {
        lp.add_var(c, 0.0, 1.0);
    }
    for &c in &inst.uncertainty.nominal {
        lp.add_var(c, 0.0, 1.0);
    }
    for _ in 0..n {
        lp.add_var(-mu, 0.0, 1.0);
    }
    let (y, z) = (n, 2 * n);
    for row in &inst.feasible.constraints {
        lp.add_row(row.clone());
        lp.add_row(row.shifted(y));
    }
    for i in 0..n {
        lp.add_row(LinearConstraint::le([(z + i, 1.0), (i, -1.0)], 0.0));
        lp.add_row(LinearConstraint::le([(z + i, 1.0), (y + i, -1.0)], 0.0));
    }
    add_adversary_dual(&mut lp, inst, y);
    Ok((MipModel::new(lp, (0..n).collect()), mu * l as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagrangianSearch {
    pub mu_star: f64,
    pub value: f64,
    /// Every probe finished within its time limit.
    pub all_proven: bool,
    pub probes: Vec<(f64, f64)>,
    pub elapsed_seconds: f64,
}

/// Golden-section search for the best multiplier on `[0, max(nominal + d)]`
/// down to an interval of width 0.1. The bound is concave in `mu`; the best
/// probe is returned whatever the search quality.
pub fn lb_lagrangian_opt(inst: &Instance, limits: Limits) -> Result<LagrangianSearch> {
    lagrangian_applicable(inst)?;
    let start = Instant::now();
    let hi_end = inst.uncertainty.worst().into_iter().fold(0.0, f64::max);
    let mut probes: Vec<(f64, f64)> = Vec::new();
    let mut all_proven = true;
    // incumbents of earlier probes seed the later ones
    let mut pool: Vec<Vec<f64>> = Vec::new();
    let mut eval = |mu: f64, probes: &mut Vec<(f64, f64)>| -> Result<f64> {
        let (model, constant) = lagrangian_model(inst, mu)?;
        let start = pool
            .iter()
            .min_by(|a, b| model.lp.objective_value(a).total_cmp(&model.lp.objective_value(b)));
        let (b, inc) = solve_bound_from(&model, limits, constant, start.map(Vec::as_slice))?;
        if let Some(v) = inc {
            pool.push(v);
        }
        all_proven &= b.proven;
        probes.push((mu, b.value));
        Ok(b.value)
    };
    eval(0.0, &mut probes)?;
    if hi_end > 0.0 {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.0, hi_end);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut fc = eval(c, &mut probes)?;
        let mut fd = eval(d, &mut probes)?;
        while b - a > 0.1 {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = eval(c, &mut probes)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = eval(d, &mut probes)?;
            }
        }
    }
    let &(mu_star, value) = probes
        .iter()
        .fold(None, |best: Option<&(f64, f64)>, p| match best {
            Some(b) if b.1 >= p.1 => Some(b),
            _ => Some(p),
        })
        .expect("at least one probe");
    Ok(LagrangianSearch { mu_star, value, all_proven, probes, elapsed_seconds: start.elapsed().as_secs_f64() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperBound {
    pub ub: f64,
    pub rec_nominal: Option<f64>,
    pub rec_worst: Option<f64>,
    pub x_under: Option<Selection>,
    pub x_over: Option<Selection>,
    /// Some solve stopped early; `ub` uses whatever incumbents exist.
    pub partial: bool,
    pub elapsed_seconds: f64,
}

/// `min(Rec(nominal) + budget, Rec(nominal + d))`, with the first stages of
/// both optimal pairs.
pub fn upper_bound(inst: &Instance, limits: Limits) -> Result<UpperBound> {
    let start = Instant::now();
    let u = &inst.uncertainty;
    let lo = solve_recoverable(inst, &u.nominal, limits)?;
    let hi = solve_recoverable(inst, &u.worst(), limits)?;
    let partial = !(lo.is_optimal() && hi.is_optimal());
    let a = lo.value.map(|v| v + u.budget);
    let b = hi.value;
    let ub = match (a, b) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => f64::INFINITY,
    };
    Ok(UpperBound {
        ub,
        rec_nominal: lo.value,
        rec_worst: hi.value,
        x_under: lo.solution.map(|p| p.x),
        x_over: hi.solution.map(|p| p.x),
        partial,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Choice {
    pub x: Selection,
    pub eval: Bracket,
    pub eval_under: Option<Bracket>,
    pub eval_over: Option<Bracket>,
    pub upper: UpperBound,
}

/// Evaluates both candidate first stages and keeps the one with the smaller
/// evaluation upper bound, preferring the nominal one on ties.
pub fn choose_first_stage(inst: &Instance, epsilon: f64, limits: Limits) -> Result<Choice> {
    let upper = upper_bound(inst, limits)?;
    choose_from(inst, epsilon, limits, upper)
}

fn choose_from(inst: &Instance, epsilon: f64, limits: Limits, upper: UpperBound) -> Result<Choice> {
    let t = limits.time_limit_s;
    let eval_under = upper.x_under.as_ref().map(|x| eval_solution(inst, x, epsilon, t, None)).transpose()?;
    let eval_over = match (&upper.x_over, &upper.x_under) {
        (Some(xo), Some(xu)) if xo == xu => eval_under.clone(),
        (Some(xo), _) => Some(eval_solution(inst, xo, epsilon, t, None)?),
        _ => None,
    };
    let (x, eval) = match (&eval_under, &eval_over) {
        (Some(a), Some(b)) if b.ub < a.ub => (upper.x_over.clone(), b.clone()),
        (Some(a), _) => (upper.x_under.clone(), a.clone()),
        (None, Some(b)) => (upper.x_over.clone(), b.clone()),
        (None, None) => return Err(Error::Solver("no first-stage candidate within the time limit".into())),
    };
    Ok(Choice { x: x.expect("candidate present"), eval, eval_under, eval_over, upper })
}

/// Which lower bounds a report computes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioConfig {
    pub epsilon: f64,
    pub time_limit_s: f64,
    pub heuristic: bool,
    pub adversarial: bool,
    pub selection: bool,
    pub lagrangian: bool,
    pub lemmas: bool,
}

impl Default for RatioConfig {
    fn default() -> Self {
        RatioConfig {
            epsilon: crate::cutloop::DEFAULT_EPSILON,
            time_limit_s: crate::cutloop::DEFAULT_TIME_LIMIT,
            heuristic: true,
            adversarial: true,
            selection: true,
            lagrangian: true,
            lemmas: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PerMethod {
    pub heuristic: Option<f64>,
    pub adversarial: Option<f64>,
    pub selection: Option<f64>,
    pub lagrangian: Option<f64>,
}

impl PerMethod {
    pub fn best(&self) -> Option<f64> {
        [self.heuristic, self.adversarial, self.selection, self.lagrangian]
            .into_iter()
            .flatten()
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LemmaBounds {
    pub lemma1_c0: Option<f64>,
    pub lemma2_sigma: Option<f64>,
    pub lemma3_beta: Option<f64>,
    pub lemma4_beta: Option<f64>,
    pub lemma5_q: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub upper: f64,
    pub eval: f64,
    pub heuristic: f64,
    pub adversarial: f64,
    pub selection: f64,
    pub lagrangian: f64,
    pub lemmas: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TimedOut {
    pub upper: bool,
    pub eval: bool,
    pub heuristic: bool,
    pub adversarial: bool,
    pub selection: bool,
    pub lagrangian: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub ub: f64,
    pub ub_partial: bool,
    pub rec_c0: Option<f64>,
    pub rho_c0: Option<f64>,
    /// Smaller evaluation upper bound of the two candidate first stages.
    pub eval_best: Option<f64>,
    pub chosen_x: Option<Selection>,
    pub lb_by_method: PerMethod,
    pub rho_by_method: PerMethod,
    pub lagrangian_mu: Option<f64>,
    pub lemma_bounds: LemmaBounds,
    pub timings: Timings,
    pub timed_out: TimedOut,
    pub failures: Vec<String>,
}

impl RatioReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str = "ub,rec_c0,rho_c0,eval_best,lb_h,lb_adv,lb_sel,lb_lag,\
rho_h,rho_adv,rho_sel,rho_lag,lemma1,lemma2,lemma3,lemma4,lemma5,failures";

    pub fn csv_row(&self) -> String {
        let f = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        let l = &self.lb_by_method;
        let r = &self.rho_by_method;
        let m = &self.lemma_bounds;
        [
            format!("{}", self.ub),
            f(self.rec_c0),
            f(self.rho_c0),
            f(self.eval_best),
            f(l.heuristic),
            f(l.adversarial),
            f(l.selection),
            f(l.lagrangian),
            f(r.heuristic),
            f(r.adversarial),
            f(r.selection),
            f(r.lagrangian),
            f(m.lemma1_c0),
            f(m.lemma2_sigma),
            f(m.lemma3_beta),
            f(m.lemma4_beta),
            f(m.lemma5_q),
            self.failures.len().to_string(),
        ]
        .join(",")
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else if num <= 1e-12 && den >= -1e-12 {
        Some(1.0)
    } else {
        None
    }
}

/// `max (nominal_i + d_i) / nominal_i`; items with zero cost in every scenario
/// are skipped, a zero nominal with positive deviation has no finite value.
pub fn lemma2_sigma(inst: &Instance) -> Option<f64> {
    let u = &inst.uncertainty;
    let mut sigma: f64 = 1.0;
    for (&c, &d) in u.nominal.iter().zip(&u.deviation) {
        if c > 0.0 {
            sigma = sigma.max((c + d) / c);
        } else if d > 0.0 {
            return None;
        }
    }
    Some(sigma)
}

/// `1 / beta` with `beta = min(1, budget / D)`; plain budgeted set only.
pub fn lemma4_beta(inst: &Instance) -> Option<f64> {
    let u = &inst.uncertainty;
    if !u.is_budgeted_only() {
        return None;
    }
    let total = u.total_deviation();
    if total <= 0.0 {
        return Some(1.0);
    }
    let beta = (u.budget / total).min(1.0);
    (beta > 0.0).then(|| 1.0 / beta)
}

/// `q + 1` with `q` the number of uncertain items, tightened to `n/m + 1`
/// under equal cardinality when every `d_i >= budget / n`; plain budgeted set only.
pub fn lemma5_q(inst: &Instance) -> Option<f64> {
    let u = &inst.uncertainty;
    if !u.is_budgeted_only() {
        return None;
    }
    let n = inst.n() as f64;
    let q = u.deviation.iter().filter(|&&d| d > 0.0).count() as f64;
    let mut bound = q + 1.0;
    if let Some(m) = inst.feasible.equal_cardinality {
        if u.deviation.iter().all(|&d| d >= u.budget / n) {
            bound = bound.min(n / m as f64 + 1.0);
        }
    }
    Some(bound)
}

/// `1 + budget / (min C.x + L)` where `L` is a lower bound on
/// `max_c min_y c.y`.
pub fn lemma3_beta(inst: &Instance, min_first_stage: f64, max_min_lower: f64) -> Option<f64> {
    let budget = inst.uncertainty.budget;
    let den = min_first_stage + max_min_lower;
    if budget <= 0.0 {
        Some(1.0)
    } else if den > 0.0 {
        Some(1.0 + budget / den)
    } else {
        None
    }
}

/// Computes every configured bound; failures of individual parts are
/// recorded and the rest of the report is still filled in.
pub fn ratio_report(inst: &Instance, config: &RatioConfig) -> RatioReport {
    let limits = Limits::with_time(config.time_limit_s);
    let mut failures = Vec::new();
    let mut timings = Timings::default();
    let mut timed_out = TimedOut::default();
    let mut lbs = PerMethod::default();
    let mut lemma = LemmaBounds::default();
    let note = |what: &str, e: Error, failures: &mut Vec<String>| failures.push(format!("{what}: {e}"));

    let (ub, ub_partial, choice) = match upper_bound(inst, limits) {
        Ok(up) => {
            timings.upper = up.elapsed_seconds;
            timed_out.upper = up.partial;
            let (ub, partial) = (up.ub, up.partial);
            let t = Instant::now();
            let choice = match choose_from(inst, config.epsilon, limits, up) {
                Ok(c) => Some(c),
                Err(e) => {
                    note("eval", e, &mut failures);
                    None
                }
            };
            timings.eval = t.elapsed().as_secs_f64();
            if let Some(c) = &choice {
                timed_out.eval = [&c.eval_under, &c.eval_over]
                    .into_iter()
                    .flatten()
                    .any(|b| b.status != crate::model::BracketStatus::Converged);
            }
            (ub, partial, choice)
        }
        Err(e) => {
            note("upper bound", e, &mut failures);
            (f64::INFINITY, true, None)
        }
    };
    let eval_best = choice.as_ref().map(|c| c.eval.ub);

    // heuristic scenario bound; also feeds the first lemma
    let mut rec_c0 = None;
    let t = Instant::now();
    match heuristic_scenario(&inst.uncertainty)
        .and_then(|c0| solve_recoverable(inst, &c0.costs, limits).map(|r| (c0, r)))
    {
        Ok((c0, r)) => {
            rec_c0 = Some(r.safe_lower());
            timed_out.heuristic = !r.is_optimal();
            if config.heuristic {
                lbs.heuristic = rec_c0;
            }
            if let (true, Some(p)) = (r.is_optimal(), &r.solution) {
                let u = &inst.uncertainty;
                let cx = p.x.dot(&inst.first_stage);
                let den = cx + p.y.dot(&c0.costs);
                let a = cx + p.y.dot(&u.nominal) + u.budget;
                let b = cx + p.y.dot(&u.worst());
                lemma.lemma1_c0 = ratio(a.min(b), den);
            }
        }
        Err(e) => note("heuristic", e, &mut failures),
    }
    timings.heuristic = t.elapsed().as_secs_f64();
    let rho_c0 = rec_c0.and_then(|r| ratio(ub, r));

    if config.adversarial {
        let t = Instant::now();
        match adversarial_lb(inst, config.epsilon, config.time_limit_s) {
            Ok(b) => {
                timed_out.adversarial = b.status != crate::model::BracketStatus::Converged;
                lbs.adversarial = Some(b.lb);
            }
            Err(e) => note("adversarial", e, &mut failures),
        }
        timings.adversarial = t.elapsed().as_secs_f64();
    }
    if config.selection {
        match lb_selection(inst, limits) {
            Ok(b) => {
                timings.selection = b.elapsed_seconds;
                timed_out.selection = !b.proven;
                lbs.selection = Some(b.value);
            }
            Err(e) => note("selection", e, &mut failures),
        }
    }
    let mut lagrangian_mu = None;
    if config.lagrangian && lagrangian_applicable(inst).is_ok() {
        match lb_lagrangian_opt(inst, limits) {
            Ok(s) => {
                timings.lagrangian = s.elapsed_seconds;
                timed_out.lagrangian = !s.all_proven;
                lbs.lagrangian = Some(s.value);
                lagrangian_mu = Some(s.mu_star);
            }
            Err(e) => note("lagrangian", e, &mut failures),
        }
    }
    if config.lemmas {
        let t = Instant::now();
        lemma.lemma2_sigma = lemma2_sigma(inst);
        lemma.lemma4_beta = lemma4_beta(inst);
        lemma.lemma5_q = lemma5_q(inst);
        let min_cx = solve_deterministic(&inst.feasible, &inst.first_stage, limits);
        let maxmin = max_min_bracket(inst, config.epsilon, config.time_limit_s);
        match (min_cx, maxmin) {
            (Ok(a), Ok(b)) => lemma.lemma3_beta = lemma3_beta(inst, a.safe_lower(), b.lb),
            (Err(e), _) | (_, Err(e)) => note("lemma 3", e, &mut failures),
        }
        timings.lemmas = t.elapsed().as_secs_f64();
    }
    let rho = |lb: Option<f64>| match (eval_best, lb) {
        (Some(e), Some(l)) => ratio(e, l),
        _ => None,
    };
    let rho_by_method = PerMethod {
        heuristic: rho(lbs.heuristic),
        adversarial: rho(lbs.adversarial),
        selection: rho(lbs.selection),
        lagrangian: rho(lbs.lagrangian),
    };
    RatioReport {
        ub,
        ub_partial,
        rec_c0,
        rho_c0,
        eval_best,
        chosen_x: choice.map(|c| c.x),
        lb_by_method: lbs,
        rho_by_method,
        lagrangian_mu,
        lemma_bounds: lemma,
        timings,
        timed_out,
        failures,
    }
}
