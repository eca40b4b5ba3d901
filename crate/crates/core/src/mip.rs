//! Best-bound branch-and-bound for 0-1 programs over the simplex kernel.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LpModel, LpOptions, LpStatus, ObjSense, Reopt, Simplex};
use crate::model::{FeasibleSetSpec, LinearConstraint, Selection, Sense};

pub const TOL_INT: f64 = 1e-6;

/// Row slack accepted when checking a rounded incumbent against the original rows.
const TOL_ROW: f64 = 1e-6;

/// Branched nodes between two diving heuristics.
const DIVE_EVERY: usize = 100;

#[derive(Debug, Clone)]
pub struct MipModel {
    pub lp: LpModel,
    pub binaries: Vec<usize>,
}

impl MipModel {
    pub fn new(lp: LpModel, binaries: Vec<usize>) -> Self {
        MipModel { lp, binaries }
    }

    pub fn check(&self) -> Result<()> {
        self.lp.check()?;
        for &j in &self.binaries {
            if j >= self.lp.num_vars() {
                return Err(Error::Precondition(format!("binary index {j} out of range")));
            }
            if self.lp.lower[j] < -TOL_INT || self.lp.upper[j] > 1.0 + TOL_INT {
                return Err(Error::Precondition(format!("binary {j} has bounds outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// Time limit and relative gap target for one MIP solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub time_limit_s: f64,
    pub gap: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { time_limit_s: 600.0, gap: 0.0 }
    }
}

impl Limits {
    pub fn with_time(time_limit_s: f64) -> Self {
        Limits { time_limit_s, gap: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MipStatus {
    Optimal,
    FeasibleGap,
    Infeasible,
    TimeLimitNoIncumbent,
}

#[derive(Debug, Clone)]
pub struct MipResult {
    pub status: MipStatus,
    pub incumbent: Option<Vec<f64>>,
    /// Objective of the incumbent, in the model's sense.
    pub value: Option<f64>,
    /// Proven bound in the model's sense (lower for minimization).
    pub best_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub elapsed_seconds: f64,
    pub time_limited: bool,
}

impl MipResult {
    pub fn is_optimal(&self) -> bool {
        self.status == MipStatus::Optimal
    }

    fn infeasible(start: Instant, nodes: usize) -> Self {
        MipResult {
            status: MipStatus::Infeasible,
            incumbent: None,
            value: None,
            best_bound: f64::INFINITY,
            gap: f64::INFINITY,
            nodes,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            time_limited: false,
        }
    }
}

/// One progress record: (global bound, incumbent value or +inf), minimization sense.
pub type TracePoint = (f64, f64);

pub fn mip_solve(model: &MipModel, time_limit_s: f64, gap_target: f64) -> Result<MipResult> {
    solve_impl(model, time_limit_s, gap_target, None, None)
}

pub fn mip_solve_limits(model: &MipModel, limits: Limits) -> Result<MipResult> {
    solve_impl(model, limits.time_limit_s, limits.gap, None, None)
}

/// Starts from a known feasible point, which becomes the first incumbent if it
/// satisfies the rows.
pub fn mip_solve_from(model: &MipModel, limits: Limits, start: &[f64]) -> Result<MipResult> {
    solve_impl(model, limits.time_limit_s, limits.gap, Some(start), None)
}

/// As [`mip_solve`], also recording the bound/incumbent sequence after every node.
pub fn mip_solve_traced(
    model: &MipModel,
    time_limit_s: f64,
    gap_target: f64,
) -> Result<(MipResult, Vec<TracePoint>)> {
    let mut trace = Vec::new();
    let r = solve_impl(model, time_limit_s, gap_target, None, Some(&mut trace))?;
    Ok((r, trace))
}

/// Some point of the feasible set, or `None` when it is empty.
pub fn feasible_point(spec: &FeasibleSetSpec) -> Result<Option<Selection>> {
    let mut lp = LpModel::new(ObjSense::Minimize);
    for _ in 0..spec.n {
        lp.add_var(0.0, 0.0, 1.0);
    }
    lp.rows = spec.constraints.clone();
    let r = mip_solve(&MipModel::new(lp, (0..spec.n).collect()), 60.0, 0.0)?;
    match r.status {
        MipStatus::Infeasible => Ok(None),
        MipStatus::TimeLimitNoIncumbent => Err(Error::Solver("feasibility search timed out".into())),
        _ => Ok(r.incumbent.map(|v| Selection::from_reals(&v))),
    }
}

#[derive(Debug)]
struct Node {
    bound: f64,
    seq: u64,
    /// Per binary: -1 free, 0 or 1 fixed.
    fix: Vec<i8>,
    /// Binary position to branch on and its relaxation value.
    branch: usize,
    frac: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: smallest bound first, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Moves singleton rows into variable bounds. `None` if some bound pair crosses.
fn presolve(lp: &LpModel, binaries: &[usize]) -> Option<LpModel> {
    let mut out = lp.clone();
    out.rows.clear();
    for row in &lp.rows {
        if let [(j, a)] = row.coeffs() {
            let v = row.rhs / a;
            let (tighten_upper, tighten_lower) = match (row.sense, *a > 0.0) {
                (Sense::Eq, _) => (true, true),
                (Sense::Le, true) | (Sense::Ge, false) => (true, false),
                _ => (false, true),
            };
            if tighten_upper {
                out.upper[*j] = out.upper[*j].min(v);
            }
            if tighten_lower {
                out.lower[*j] = out.lower[*j].max(v);
            }
        } else if row.coeffs().is_empty() {
            let ok = match row.sense {
                Sense::Le => 0.0 <= row.rhs + TOL_ROW,
                Sense::Ge => 0.0 >= row.rhs - TOL_ROW,
                Sense::Eq => row.rhs.abs() <= TOL_ROW,
            };
            if !ok {
                return None;
            }
        } else {
            out.rows.push(row.clone());
        }
    }
    for &j in binaries {
        out.lower[j] = (out.lower[j] - TOL_INT).ceil().max(0.0);
        out.upper[j] = (out.upper[j] + TOL_INT).floor().min(1.0);
    }
    for j in 0..out.num_vars() {
        if out.lower[j] > out.upper[j] + 1e-9 {
            return None;
        }
        if out.lower[j] > out.upper[j] {
            out.upper[j] = out.lower[j];
        }
    }
    Some(out)
}

fn objective_is_integral(lp: &LpModel, is_binary: &[bool]) -> bool {
    lp.objective.iter().enumerate().all(|(j, &c)| {
        if is_binary[j] {
            (c - c.round()).abs() < 1e-12
        } else {
            c == 0.0
        }
    })
}

struct Search<'a> {
    original: &'a LpModel,
    lp: LpModel,
    binaries: &'a [usize],
    integral: bool,
    gap_target: f64,
    incumbent: Option<(Vec<f64>, f64)>,
    pc: Pseudocosts,
    /// Smallest bound among nodes dropped only because of the gap target.
    pruned_floor: f64,
}

/// Observed objective increase per unit of rounding, per binary and direction.
struct Pseudocosts {
    down: Vec<f64>,
    down_n: Vec<u32>,
    up: Vec<f64>,
    up_n: Vec<u32>,
}

impl Pseudocosts {
    fn new(n: usize) -> Self {
        Pseudocosts { down: vec![0.0; n], down_n: vec![0; n], up: vec![0.0; n], up_n: vec![0; n] }
    }

    fn record(&mut self, k: usize, to_one: bool, frac: f64, gain: f64) {
        let gain = gain.max(0.0);
        if to_one && frac < 1.0 - TOL_INT {
            self.up[k] += gain / (1.0 - frac);
            self.up_n[k] += 1;
        } else if !to_one && frac > TOL_INT {
            self.down[k] += gain / frac;
            self.down_n[k] += 1;
        }
    }
}

impl Search<'_> {
    /// Nodes whose relaxation value exceeds this cannot improve the incumbent.
    fn cutoff(&self) -> f64 {
        match &self.incumbent {
            None => f64::INFINITY,
            Some((_, v)) => {
                let rel = self.gap_target * v.abs();
                if self.integral {
                    (v - 1.0 + 1e-6).min(v - rel)
                } else {
                    v - rel.max(1e-9 * v.abs().max(1.0))
                }
            }
        }
    }

    /// Drops a node whose bound passes the cutoff, remembering the bound when
    /// the cutoff was loosened by a gap target.
    fn prune(&mut self, bound: f64) -> bool {
        let out = self.prunable(bound);
        if out {
            self.note_pruned(bound);
        }
        out
    }

    fn note_pruned(&mut self, bound: f64) {
        if self.gap_target <= 0.0 {
            return;
        }
        let floor = match &self.incumbent {
            // with integral values nothing above v - 1 beats the incumbent
            Some((_, v)) if self.integral && bound > v - 1.0 + 1e-6 => *v,
            _ => bound,
        };
        self.pruned_floor = self.pruned_floor.min(floor);
    }

    fn prunable(&self, bound: f64) -> bool {
        match &self.incumbent {
            None => false,
            Some(_) if self.integral => bound > self.cutoff(),
            Some(_) => bound >= self.cutoff(),
        }
    }

    /// Fractional binary with the best pseudocost product, ties to the lowest
    /// index. Positions without history use the average of those with one.
    fn branching_position(&self, x: &[f64]) -> Option<usize> {
        let avg = |sum: &[f64], cnt: &[u32]| {
            let (s, c) = sum.iter().zip(cnt).filter(|(_, &c)| c > 0).fold((0.0, 0u32), |a, (s, c)| (a.0 + s, a.1 + c));
            if c > 0 { s / c as f64 } else { 1.0 }
        };
        let (avg_down, avg_up) = (avg(&self.pc.down, &self.pc.down_n), avg(&self.pc.up, &self.pc.up_n));
        let mut best = None;
        let mut best_score = f64::NEG_INFINITY;
        for (k, &j) in self.binaries.iter().enumerate() {
            let f = x[j] - x[j].floor();
            if f.min(1.0 - f) <= TOL_INT {
                continue;
            }
            let per = |sum: f64, cnt: u32, fallback: f64| if cnt > 0 { sum / cnt as f64 } else { fallback };
            let down = f * per(self.pc.down[k], self.pc.down_n[k], avg_down);
            let up = (1.0 - f) * per(self.pc.up[k], self.pc.up_n[k], avg_up);
            let score = down.max(1e-6) * up.max(1e-6);
            if score > best_score {
                best_score = score;
                best = Some(k);
            }
        }
        best
    }

    /// Rounds the binaries of an integral relaxation point and keeps it if it
    /// satisfies the original rows and improves the incumbent.
    fn offer(&mut self, x: &[f64]) -> bool {
        let mut v = x.to_vec();
        for &j in self.binaries {
            v[j] = v[j].round();
        }
        for (j, val) in v.iter_mut().enumerate() {
            *val = val.clamp(self.lp.lower[j], self.lp.upper[j]);
        }
        let rows_ok = self.original.rows.iter().all(|r| r.is_satisfied(&v, TOL_ROW));
        if !rows_ok {
            return false;
        }
        let value = self.original.objective_value(&v);
        let better = self.incumbent.as_ref().is_none_or(|(_, inc)| value < *inc - 1e-12);
        if better {
            self.incumbent = Some((v, value));
        }
        better
    }

    fn apply(&self, sx: &mut Simplex, applied: &mut [i8], fix: &[i8]) {
        for (k, &j) in self.binaries.iter().enumerate() {
            if applied[k] != fix[k] {
                let (l, u) = match fix[k] {
                    0 => (0.0, 0.0),
                    1 => (1.0, 1.0),
                    _ => (self.lp.lower[j], self.lp.upper[j]),
                };
                sx.set_bounds(j, l, u);
                applied[k] = fix[k];
            }
        }
    }

    /// Re-solves the node relaxation from scratch with its fixings.
    fn cold_solve(&self, fix: &[i8]) -> Result<(Simplex, LpStatus)> {
        let mut lp = self.lp.clone();
        for (k, &j) in self.binaries.iter().enumerate() {
            if fix[k] >= 0 {
                lp.lower[j] = fix[k] as f64;
                lp.upper[j] = fix[k] as f64;
            }
        }
        let mut sx = Simplex::new(&lp, LpOptions::default());
        let st = sx.solve()?;
        Ok((sx, st))
    }

    /// Fix-and-resolve dive from the current relaxation; works on a copy.
    fn dive(&mut self, sx: &Simplex, fix: &[i8], deadline: &dyn Fn() -> bool) -> Result<()> {
        let mut sx = sx.clone();
        let mut fix = fix.to_vec();
        let mut applied = fix.clone();
        for _ in 0..=self.binaries.len() {
            if deadline() {
                return Ok(());
            }
            let x = sx.structural_values();
            // fix the least fractional free binary to its rounding
            let mut pick: Option<(usize, f64)> = None;
            let mut all_integral = true;
            for (k, &j) in self.binaries.iter().enumerate() {
                let f = x[j] - x[j].floor();
                let frac = f.min(1.0 - f);
                if frac > TOL_INT {
                    all_integral = false;
                }
                if fix[k] < 0 && pick.is_none_or(|(_, pf)| frac < pf) {
                    pick = Some((k, frac));
                }
            }
            if all_integral {
                self.offer(&x);
                return Ok(());
            }
            let Some((k, _)) = pick else { return Ok(()) };
            let j = self.binaries[k];
            let first = x[j].round() as i8;
            let mut ok = false;
            for val in [first, 1 - first] {
                fix[k] = val;
                self.apply(&mut sx, &mut applied, &fix);
                match sx.reoptimize(self.cutoff()) {
                    Ok(Reopt::Optimal) => {
                        ok = true;
                        break;
                    }
                    Ok(_) => continue,
                    Err(_) => return Ok(()),
                }
            }
            if !ok {
                return Ok(());
            }
        }
        Ok(())
    }
}

fn solve_impl(
    model: &MipModel,
    time_limit_s: f64,
    gap_target: f64,
    start_point: Option<&[f64]>,
    mut trace: Option<&mut Vec<TracePoint>>,
) -> Result<MipResult> {
    model.check()?;
    let start = Instant::now();
    let sign = match model.lp.sense {
        ObjSense::Minimize => 1.0,
        ObjSense::Maximize => -1.0,
    };
    let mut original = model.lp.clone();
    original.sense = ObjSense::Minimize;
    original.objective.iter_mut().for_each(|c| *c *= sign);
    let Some(lp) = presolve(&original, &model.binaries) else {
        return Ok(MipResult::infeasible(start, 0));
    };
    let mut is_binary = vec![false; lp.num_vars()];
    for &j in &model.binaries {
        is_binary[j] = true;
    }
    let mut search = Search {
        original: &original,
        integral: objective_is_integral(&lp, &is_binary),
        lp,
        binaries: &model.binaries,
        gap_target: gap_target.max(0.0),
        incumbent: None,
        pc: Pseudocosts::new(model.binaries.len()),
        pruned_floor: f64::INFINITY,
    };
    if let Some(p) = start_point {
        if p.len() == original.num_vars() {
            search.offer(p);
        }
    }
    let timed_out = || start.elapsed().as_secs_f64() > time_limit_s;

    let nb = model.binaries.len();
    let root_fix = vec![-1i8; nb];
    let mut sx = Simplex::new(&search.lp, LpOptions::default());
    match sx.solve()? {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Ok(MipResult::infeasible(start, 1)),
        LpStatus::Unbounded => return Err(Error::Solver("LP relaxation is unbounded".into())),
    }
    let root_bound = sx.objective();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut nodes = 1usize;
    let x = sx.structural_values();
    match search.branching_position(&x) {
        None => {
            search.offer(&x);
        }
        Some(k) => {
            search.dive(&sx, &root_fix, &timed_out)?;
            let frac = x[model.binaries[k]];
            heap.push(Node { bound: root_bound, seq, fix: root_fix.clone(), branch: k, frac });
        }
    }
    let mut applied = root_fix;
    let mut global_bound = root_bound;
    let mut time_limited = false;
    let mut since_dive = 0usize;

    // children are solved as soon as their parent is branched on, so every
    // queued node carries its own relaxation value
    while let Some(node) = heap.pop() {
        global_bound = global_bound.max(node.bound.min(search.cutoff()).min(search.pruned_floor));
        if search.prune(node.bound) {
            continue;
        }
        if let Some((_, inc)) = &search.incumbent {
            if inc - node.bound <= search.gap_target * inc.abs() + 1e-9 * inc.abs().max(1.0) {
                // every open node is at least this bound
                global_bound = node.bound;
                heap.push(node);
                break;
            }
        }
        if timed_out() {
            time_limited = true;
            heap.push(node);
            break;
        }
        let near = node.frac.round() as i8;
        for val in [near, 1 - near] {
            let mut fix = node.fix.clone();
            fix[node.branch] = val;
            nodes += 1;
            search.apply(&mut sx, &mut applied, &fix);
            let r = sx.reoptimize(search.cutoff());
            let outcome = match r {
                Ok(o) => o,
                Err(_) => {
                    let (fresh, st) = search.cold_solve(&fix)?;
                    sx = fresh;
                    applied = fix.clone();
                    match st {
                        LpStatus::Optimal if search.prunable(sx.objective()) => Reopt::Cutoff,
                        LpStatus::Optimal => Reopt::Optimal,
                        LpStatus::Infeasible => Reopt::Infeasible,
                        LpStatus::Unbounded => {
                            return Err(Error::Solver("LP relaxation is unbounded".into()))
                        }
                    }
                }
            };
            if outcome == Reopt::Infeasible {
                continue;
            }
            search.pc.record(node.branch, val == 1, node.frac, sx.objective() - node.bound);
            if outcome == Reopt::Cutoff {
                // the dual objective at the stop is a bound on the child
                let floor = sx.objective().max(node.bound);
                search.note_pruned(floor);
                continue;
            }
            let obj = sx.objective().max(node.bound);
            if search.prune(obj) {
                continue;
            }
            let x = sx.structural_values();
            match search.branching_position(&x) {
                None => {
                    search.offer(&x);
                }
                Some(k) => {
                    since_dive += 1;
                    if since_dive >= DIVE_EVERY {
                        since_dive = 0;
                        search.dive(&sx, &fix, &timed_out)?;
                    }
                    let frac = x[model.binaries[k]];
                    seq += 1;
                    heap.push(Node { bound: obj, seq, fix, branch: k, frac });
                }
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            let open = heap.peek().map_or(f64::INFINITY, |n| n.bound);
            let inc = search.incumbent.as_ref().map_or(f64::INFINITY, |(_, v)| *v);
            global_bound = global_bound.max(open.min(inc).min(search.pruned_floor));
            t.push((global_bound, inc));
        }
    }

    let elapsed_seconds = start.elapsed().as_secs_f64();
    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    match search.incumbent {
        None if heap.is_empty() => Ok(MipResult::infeasible(start, nodes)),
        None => Ok(MipResult {
            status: MipStatus::TimeLimitNoIncumbent,
            incumbent: None,
            value: None,
            best_bound: sign * open_bound.max(global_bound.min(open_bound)),
            gap: f64::INFINITY,
            nodes,
            elapsed_seconds,
            time_limited,
        }),
        Some((v, value)) => {
            let floor = open_bound.min(search.pruned_floor);
            let bound = if search.integral && floor > value - 1.0 + 1e-6 {
                // nothing left can reach the next integer below the incumbent
                value
            } else {
                floor.min(value)
            };
            let gap = (value - bound).max(0.0) / value.abs().max(1e-10);
            let status = if gap <= 1e-9 { MipStatus::Optimal } else { MipStatus::FeasibleGap };
            Ok(MipResult {
                status,
                incumbent: Some(v),
                value: Some(sign * value),
                best_bound: sign * bound,
                gap,
                nodes,
                elapsed_seconds,
                time_limited,
            })
        }
    }
}

/// Convenience for building pure 0-1 models: `n` binaries with the given costs.
pub fn binary_model(sense: ObjSense, costs: &[f64], rows: Vec<LinearConstraint>) -> MipModel {
    let mut lp = LpModel::new(sense);
    for &c in costs {
        lp.add_var(c, 0.0, 1.0);
    }
    lp.rows = rows;
    MipModel::new(lp, (0..costs.len()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_knapsack_example() {
        let m = binary_model(
            ObjSense::Minimize,
            &[1.0, 2.0, 3.0],
            vec![LinearConstraint::ge([(0, 2.0), (1, 2.0), (2, 2.0)], 4.0)],
        );
        let r = mip_solve(&m, 10.0, 0.0).unwrap();
        assert_eq!(r.status, MipStatus::Optimal);
        assert_eq!(r.value, Some(3.0));
        assert_eq!(r.incumbent.unwrap(), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn contradictory_fixings_infeasible() {
        let m = binary_model(
            ObjSense::Minimize,
            &[1.0],
            vec![LinearConstraint::ge([(0, 1.0)], 1.0), LinearConstraint::le([(0, 1.0)], 0.0)],
        );
        assert_eq!(mip_solve(&m, 10.0, 0.0).unwrap().status, MipStatus::Infeasible);
    }

    #[test]
    fn maximization_and_continuous_parts() {
        // max 3a + 2b + t  s.t. a + b <= 1, t <= 0.5 + a, t in [0, 10]
        let mut lp = LpModel::new(ObjSense::Maximize);
        lp.add_var(3.0, 0.0, 1.0);
        lp.add_var(2.0, 0.0, 1.0);
        lp.add_var(1.0, 0.0, 10.0);
        lp.rows.push(LinearConstraint::le([(0, 1.0), (1, 1.0)], 1.0));
        lp.rows.push(LinearConstraint::le([(2, 1.0), (0, -1.0)], 0.5));
        let r = mip_solve(&MipModel::new(lp, vec![0, 1]), 10.0, 0.0).unwrap();
        assert_eq!(r.status, MipStatus::Optimal);
        assert!((r.value.unwrap() - 4.5).abs() < 1e-9);
        assert!((r.best_bound - 4.5).abs() < 1e-9);
    }

    #[test]
    fn empty_time_budget_still_returns_a_valid_bound() {
        let costs: Vec<f64> = (0..12).map(|i| ((i * 7) % 5 + 1) as f64).collect();
        let w: Vec<f64> = (0..12).map(|i| ((i * 3) % 4 + 1) as f64).collect();
        let row = LinearConstraint::ge(w.iter().copied().enumerate(), 9.5);
        let m = binary_model(ObjSense::Minimize, &costs, vec![row]);
        let exact = mip_solve(&m, 60.0, 0.0).unwrap();
        let r = mip_solve(&m, 0.0, 0.0).unwrap();
        let opt = exact.value.unwrap();
        assert!(r.best_bound <= opt + 1e-9);
        if let Some(v) = r.value {
            assert!(v >= opt - 1e-9);
        }
    }
}
