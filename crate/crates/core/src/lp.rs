//! Dense-tableau bounded-variable simplex.
//!
//! Every row `a x (sense) b` gets a logical column `s` with `a x + s = b`;
//! the sense is carried by the bounds of `s` (`<=`: `s >= 0`, `>=`: `s <= 0`,
//! `=`: `s = 0`). The tableau holds `B^-1 [A | I]`, so the logical block is
//! the basis inverse and reinversion only needs the original rows.
//!
//! Primal simplex (composite phase 1) solves a model from any basis. The dual
//! simplex re-optimizes after bound changes, which is what branch-and-bound
//! uses between nodes.

use crate::error::{Error, Result};
use crate::model::{LinearConstraint, Sense};

pub const TOL_FEAS: f64 = 1e-7;
pub const TOL_OPT: f64 = 1e-6;

const PIVOT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
pub struct LpModel {
    pub sense: ObjSense,
    pub objective: Vec<f64>,
    pub rows: Vec<LinearConstraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpModel {
    pub fn new(sense: ObjSense) -> Self {
        LpModel { sense, objective: Vec::new(), rows: Vec::new(), lower: Vec::new(), upper: Vec::new() }
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, row: LinearConstraint) {
        self.rows.push(row);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x)).fold(0.0, f64::max);
        let bounds = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| (l - v).max(v - u).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Precondition("bound vectors do not match objective length".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::Precondition("objective coefficient not finite".into()));
        }
        for (j, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::Precondition(format!("bad bounds [{l}, {u}] on variable {j}")));
            }
        }
        for (k, r) in self.rows.iter().enumerate() {
            if !r.rhs.is_finite() || r.coeffs().iter().any(|&(_, a)| !a.is_finite()) {
                return Err(Error::Precondition(format!("row {k} has non-finite data")));
            }
            if r.max_index().is_some_and(|i| i >= n) {
                return Err(Error::Precondition(format!("row {k} references a missing variable")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One multiplier per row, in the model's objective sense: for a
    /// minimization `<=` rows carry nonpositive and `>=` rows nonnegative duals.
    pub dual: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub tol_feas: f64,
    /// Reduced-cost threshold for optimality.
    pub tol_dual: f64,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { tol_feas: TOL_FEAS, tol_dual: 1e-9 }
    }
}

impl LpOptions {
    /// Tighter settings for ground-truth computations.
    pub fn precise() -> Self {
        LpOptions { tol_feas: 1e-9, tol_dual: 1e-11 }
    }
}

pub fn lp_solve(model: &LpModel) -> Result<LpResult> {
    lp_solve_with(model, LpOptions::default())
}

pub fn lp_solve_with(model: &LpModel, opts: LpOptions) -> Result<LpResult> {
    model.check()?;
    let mut s = Simplex::new(model, opts);
    let status = s.solve()?;
    let primal = s.structural_values();
    let objective = model.objective_value(&primal);
    let dual = if status == LpStatus::Optimal { s.duals() } else { vec![0.0; model.rows.len()] };
    Ok(LpResult { status, primal, dual, objective })
}

/// Phase-1 feasibility of `rows` within the box `[lower, upper]`.
pub fn lp_feasible(
    rows: &[LinearConstraint],
    lower: &[f64],
    upper: &[f64],
) -> Result<(bool, Option<Vec<f64>>)> {
    let model = LpModel {
        sense: ObjSense::Minimize,
        objective: vec![0.0; lower.len()],
        rows: rows.to_vec(),
        lower: lower.to_vec(),
        upper: upper.to_vec(),
    };
    let r = lp_solve(&model)?;
    match r.status {
        LpStatus::Optimal => Ok((true, Some(r.primal))),
        LpStatus::Infeasible => Ok((false, None)),
        LpStatus::Unbounded => Err(Error::Numerical("zero objective reported unbounded".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free variable resting at zero.
    Free,
}

enum Step {
    Flip(f64),
    Pivot { row: usize, theta: f64, to_upper: bool },
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Reopt {
    Optimal,
    Infeasible,
    /// Objective provably exceeds the cutoff.
    Cutoff,
}

#[derive(Clone)]
pub(crate) struct Simplex {
    m: usize,
    n: usize,
    nc: usize,
    rows: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    tab: Vec<f64>,
    cost: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    x: Vec<f64>,
    d: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    opts: LpOptions,
    sign: f64,
    since_reinvert: usize,
    scratch: Vec<(usize, f64)>,
    pivot_row: Vec<f64>,
}

impl Simplex {
    pub(crate) fn new(model: &LpModel, opts: LpOptions) -> Self {
        let m = model.rows.len();
        let n = model.num_vars();
        let nc = n + m;
        let sign = match model.sense {
            ObjSense::Minimize => 1.0,
            ObjSense::Maximize => -1.0,
        };
        let mut tab = vec![0.0; m * nc];
        let mut rows = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut lb = model.lower.clone();
        let mut ub = model.upper.clone();
        for (r, row) in model.rows.iter().enumerate() {
            for &(j, a) in row.coeffs() {
                tab[r * nc + j] = a;
            }
            tab[r * nc + n + r] = 1.0;
            rows.push(row.coeffs().to_vec());
            b.push(row.rhs);
            let (l, u) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lb.push(l);
            ub.push(u);
        }
        let mut cost: Vec<f64> = model.objective.iter().map(|c| sign * c).collect();
        cost.resize(nc, 0.0);
        let mut x = vec![0.0; nc];
        let mut state = vec![VarState::Basic; nc];
        for j in 0..n {
            let (s, v) = resting_place(lb[j], ub[j]);
            state[j] = s;
            x[j] = v;
        }
        let mut s = Simplex {
            m,
            n,
            nc,
            rows,
            b,
            tab,
            d: cost.clone(),
            cost,
            lb,
            ub,
            x,
            basis: (n..nc).collect(),
            state,
            opts,
            sign,
            since_reinvert: 0,
            scratch: Vec::new(),
            pivot_row: Vec::new(),
        };
        s.recompute_basic_values();
        s
    }

    #[inline]
    fn at(&self, r: usize, j: usize) -> f64 {
        self.tab[r * self.nc + j]
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.ub[j] - self.lb[j] <= 0.0
    }

    pub(crate) fn structural_values(&self) -> Vec<f64> {
        self.x[..self.n].to_vec()
    }

    /// Objective in the model's sense.
    pub(crate) fn objective(&self) -> f64 {
        self.sign * self.internal_objective()
    }

    fn internal_objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, v)| c * v).sum()
    }

    pub(crate) fn duals(&self) -> Vec<f64> {
        (0..self.m).map(|i| -self.sign * self.d[self.n + i]).collect()
    }

    fn reinvert_interval(&self) -> usize {
        (8 * self.m).max(500)
    }

    fn pivot_limit(&self) -> usize {
        50 * (self.m + self.nc) + 10_000
    }

    /// `x_B = B^-1 (b - N x_N)`, reading `B^-1` from the logical block.
    fn recompute_basic_values(&mut self) {
        let mut resid = self.b.clone();
        for (r, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                if self.state[j] != VarState::Basic {
                    resid[r] -= a * self.x[j];
                }
            }
            let s = self.n + r;
            if self.state[s] != VarState::Basic {
                resid[r] -= self.x[s];
            }
        }
        for r in 0..self.m {
            let row = &self.tab[r * self.nc + self.n..(r + 1) * self.nc];
            let v: f64 = row.iter().zip(&resid).map(|(a, b)| a * b).sum();
            self.x[self.basis[r]] = v;
        }
    }

    fn recompute_reduced_costs(&mut self) {
        self.d.copy_from_slice(&self.cost);
        for r in 0..self.m {
            let cb = self.cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.tab[r * self.nc..(r + 1) * self.nc];
            for (dk, a) in self.d.iter_mut().zip(row) {
                *dk -= cb * a;
            }
        }
        for &j in &self.basis {
            self.d[j] = 0.0;
        }
    }

    /// Rebuilds the tableau from the original rows for the current basis,
    /// repairing it with logicals if it turned out singular.
    fn reinvert(&mut self) {
        let (m, n, nc) = (self.m, self.n, self.nc);
        self.tab.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..m {
            for &(j, a) in &self.rows[r] {
                self.tab[r * nc + j] = a;
            }
            self.tab[r * nc + n + r] = 1.0;
        }
        let old = std::mem::take(&mut self.basis);
        let mut new_basis = vec![usize::MAX; m];
        for &j in &old {
            let mut best = None;
            let mut best_abs = 1e-9;
            for r in 0..m {
                if new_basis[r] == usize::MAX {
                    let a = self.tab[r * nc + j].abs();
                    if a > best_abs {
                        best_abs = a;
                        best = Some(r);
                    }
                }
            }
            match best {
                Some(r) => {
                    self.eliminate(r, j);
                    new_basis[r] = j;
                }
                None => {
                    let (s, v) = nearest_bound(self.lb[j], self.ub[j], self.x[j]);
                    self.state[j] = s;
                    self.x[j] = v;
                }
            }
        }
        for r in 0..m {
            if new_basis[r] != usize::MAX {
                continue;
            }
            let mut best = n + r;
            let mut best_abs = 0.0;
            for k in 0..nc {
                if self.state[k] != VarState::Basic {
                    let a = self.tab[r * nc + k].abs();
                    let prefer = if k >= n { 2.0 } else { 1.0 };
                    if a * prefer > best_abs {
                        best_abs = a * prefer;
                        best = k;
                    }
                }
            }
            self.eliminate(r, best);
            new_basis[r] = best;
            self.state[best] = VarState::Basic;
        }
        self.basis = new_basis;
        self.recompute_basic_values();
        self.recompute_reduced_costs();
        self.since_reinvert = 0;
    }

    /// Gauss-Jordan step on the tableau only.
    fn eliminate(&mut self, r: usize, j: usize) {
        let nc = self.nc;
        let piv = self.tab[r * nc + j];
        self.scratch.clear();
        for k in 0..nc {
            let v = self.tab[r * nc + k];
            if v != 0.0 {
                let v = v / piv;
                if v.abs() > DROP_TOL {
                    self.tab[r * nc + k] = v;
                    self.scratch.push((k, v));
                } else {
                    self.tab[r * nc + k] = 0.0;
                }
            }
        }
        self.tab[r * nc + j] = 1.0;
        let dense = self.scratch.len() * 3 > nc;
        if dense {
            self.pivot_row.clear();
            self.pivot_row.extend_from_slice(&self.tab[r * nc..(r + 1) * nc]);
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tab[i * nc + j];
            if f.abs() <= DROP_TOL {
                self.tab[i * nc + j] = 0.0;
                continue;
            }
            let row = &mut self.tab[i * nc..(i + 1) * nc];
            if dense {
                for (a, &p) in row.iter_mut().zip(&self.pivot_row) {
                    *a -= f * p;
                }
            } else {
                for &(k, v) in &self.scratch {
                    row[k] -= f * v;
                }
            }
            row[j] = 0.0;
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        self.eliminate(r, j);
        let f = self.d[j];
        if f != 0.0 {
            for &(k, v) in &self.scratch {
                self.d[k] -= f * v;
            }
        }
        self.d[j] = 0.0;
        self.basis[r] = j;
        self.state[j] = VarState::Basic;
        self.since_reinvert += 1;
    }

    fn entering_direction(&self, j: usize, dj: f64, tol: f64) -> Option<f64> {
        match self.state[j] {
            VarState::Basic => None,
            _ if self.is_fixed(j) => None,
            VarState::Lower if dj < -tol => Some(1.0),
            VarState::Upper if dj > tol => Some(-1.0),
            VarState::Free if dj.abs() > tol => Some(if dj < 0.0 { 1.0 } else { -1.0 }),
            _ => None,
        }
    }

    fn price(&self, dvec: &[f64], bland: bool) -> Option<(usize, f64)> {
        let tol = self.opts.tol_dual;
        let mut best: Option<(usize, f64)> = None;
        let mut best_val = 0.0;
        for (j, &dj) in dvec.iter().enumerate() {
            if let Some(dir) = self.entering_direction(j, dj, tol) {
                if bland {
                    return Some((j, dir));
                }
                if dj.abs() > best_val {
                    best_val = dj.abs();
                    best = Some((j, dir));
                }
            }
        }
        best
    }

    /// Basic rows outside their bounds: +1 above, -1 below.
    fn infeasibility_signs(&self) -> Vec<(usize, f64)> {
        let tol = self.opts.tol_feas;
        (0..self.m)
            .filter_map(|r| {
                let j = self.basis[r];
                let v = self.x[j];
                if v < self.lb[j] - tol {
                    Some((r, -1.0))
                } else if v > self.ub[j] + tol {
                    Some((r, 1.0))
                } else {
                    None
                }
            })
            .collect()
    }

    fn ratio_test(&self, j: usize, dir: f64, phase1: bool, bland: bool) -> Step {
        let tol = self.opts.tol_feas;
        let flip = if self.state[j] == VarState::Free { f64::INFINITY } else { self.ub[j] - self.lb[j] };
        // (row, exact ratio, relaxed ratio, |pivot|, leaves at upper)
        let mut cands: Vec<(usize, f64, f64, f64, bool)> = Vec::new();
        let mut theta_max = f64::INFINITY;
        for r in 0..self.m {
            let a = self.at(r, j);
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let rate = -dir * a;
            let bv = self.basis[r];
            let (v, l, u) = (self.x[bv], self.lb[bv], self.ub[bv]);
            let (target, relaxed, to_upper) = if rate < 0.0 {
                if phase1 && v > u + tol {
                    (u, u, true)
                } else if phase1 && v < l - tol {
                    continue;
                } else if l.is_finite() {
                    (l, l - tol, false)
                } else {
                    continue;
                }
            } else if phase1 && v < l - tol {
                (l, l, false)
            } else if phase1 && v > u + tol {
                continue;
            } else if u.is_finite() {
                (u, u + tol, true)
            } else {
                continue;
            };
            let exact = ((target - v) / rate).max(0.0);
            let relaxed = ((relaxed - v) / rate).max(0.0);
            theta_max = theta_max.min(relaxed);
            cands.push((r, exact, relaxed, a.abs(), to_upper));
        }
        let chosen = if bland {
            let min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            cands
                .iter()
                .filter(|c| c.1 <= min + 1e-12)
                .min_by_key(|c| self.basis[c.0])
                .copied()
        } else {
            cands
                .iter()
                .filter(|c| c.1 <= theta_max)
                .max_by(|a, b| a.3.total_cmp(&b.3))
                .copied()
        };
        match chosen {
            Some((row, theta, _, _, to_upper)) if theta < flip => Step::Pivot { row, theta, to_upper },
            _ if flip.is_finite() => Step::Flip(flip),
            _ => Step::Unbounded,
        }
    }

    fn move_entering(&mut self, j: usize, delta: f64) {
        if delta != 0.0 {
            for r in 0..self.m {
                let a = self.tab[r * self.nc + j];
                if a != 0.0 {
                    let bv = self.basis[r];
                    self.x[bv] -= a * delta;
                }
            }
            self.x[j] += delta;
        }
    }

    /// Primal simplex from the current basis.
    pub(crate) fn solve(&mut self) -> Result<LpStatus> {
        let limit = self.pivot_limit();
        let mut iters = 0usize;
        let mut degenerate = 0usize;
        let bland_after = 10 * (self.m + self.nc);
        let mut verified = false;
        let mut d1 = vec![0.0; self.nc];
        loop {
            iters += 1;
            if iters > limit {
                return Err(Error::Numerical(format!("simplex pivot limit {limit} exhausted")));
            }
            if self.since_reinvert >= self.reinvert_interval() {
                self.reinvert();
            }
            let infeasible = self.infeasibility_signs();
            let phase1 = !infeasible.is_empty();
            let bland = degenerate >= bland_after;
            let entering = if phase1 {
                d1.iter_mut().for_each(|v| *v = 0.0);
                for &(r, g) in &infeasible {
                    let row = &self.tab[r * self.nc..(r + 1) * self.nc];
                    for (acc, a) in d1.iter_mut().zip(row) {
                        *acc -= g * a;
                    }
                }
                self.price(&d1, bland)
            } else {
                self.price(&self.d, bland)
            };
            let Some((j, dir)) = entering else {
                if !verified && self.since_reinvert > 0 {
                    self.reinvert();
                    verified = true;
                    continue;
                }
                return Ok(if phase1 { LpStatus::Infeasible } else { LpStatus::Optimal });
            };
            verified = false;
            match self.ratio_test(j, dir, phase1, bland) {
                Step::Unbounded => {
                    if phase1 {
                        return Err(Error::Numerical("phase 1 ray without blocking row".into()));
                    }
                    if self.since_reinvert > 0 {
                        self.reinvert();
                        continue;
                    }
                    return Ok(LpStatus::Unbounded);
                }
                Step::Flip(theta) => {
                    self.move_entering(j, dir * theta);
                    let (s, v) = if dir > 0.0 {
                        (VarState::Upper, self.ub[j])
                    } else {
                        (VarState::Lower, self.lb[j])
                    };
                    self.state[j] = s;
                    self.x[j] = v;
                    degenerate = 0;
                }
                Step::Pivot { row, theta, to_upper } => {
                    if theta <= 1e-12 {
                        degenerate += 1;
                    } else {
                        degenerate = 0;
                    }
                    self.move_entering(j, dir * theta);
                    let leaving = self.basis[row];
                    if to_upper {
                        self.x[leaving] = self.ub[leaving];
                        self.state[leaving] = VarState::Upper;
                    } else {
                        self.x[leaving] = self.lb[leaving];
                        self.state[leaving] = VarState::Lower;
                    }
                    self.pivot(row, j);
                }
            }
        }
    }

    /// Changes the bounds of column `j`, keeping the basis dual feasible
    /// where possible. Basic values are updated; they may become infeasible.
    pub(crate) fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lb[j] = lower;
        self.ub[j] = upper;
        if self.state[j] == VarState::Basic {
            return;
        }
        let dj = self.d[j];
        let (s, v) = if lower == upper {
            (VarState::Lower, lower)
        } else if dj > 0.0 && lower.is_finite() {
            (VarState::Lower, lower)
        } else if dj < 0.0 && upper.is_finite() {
            (VarState::Upper, upper)
        } else {
            resting_place(lower, upper)
        };
        let delta = v - self.x[j];
        self.state[j] = s;
        self.move_entering(j, delta);
        self.x[j] = v;
    }

    fn dual_feasible(&self) -> bool {
        let tol = 1e-7;
        (0..self.nc).all(|j| match self.state[j] {
            VarState::Basic => true,
            _ if self.is_fixed(j) => true,
            VarState::Lower => self.d[j] >= -tol,
            VarState::Upper => self.d[j] <= tol,
            VarState::Free => self.d[j].abs() <= tol,
        })
    }

    /// Dual simplex; falls back to the primal method when the basis is not
    /// dual feasible or the dual iterations stall.
    pub(crate) fn reoptimize(&mut self, cutoff: f64) -> Result<Reopt> {
        if !self.dual_feasible() {
            return self.primal_reopt(cutoff);
        }
        let internal_cutoff = self.sign * cutoff;
        let tol = self.opts.tol_feas;
        let tol_d = self.opts.tol_dual;
        let limit = self.pivot_limit();
        for _ in 0..limit {
            if self.since_reinvert >= self.reinvert_interval() {
                self.reinvert();
                if !self.dual_feasible() {
                    return self.primal_reopt(cutoff);
                }
            }
            if self.sign > 0.0 && internal_cutoff.is_finite() {
                let obj = self.internal_objective();
                if obj > internal_cutoff + 1e-9 * (1.0 + obj.abs()) {
                    return Ok(Reopt::Cutoff);
                }
            }
            // leaving row: steepest edge, the B^-1 row norms are read off the
            // logical block of the tableau
            let mut leave = None;
            let mut worst = 0.0;
            for r in 0..self.m {
                let bv = self.basis[r];
                let v = self.x[bv];
                let viol = (self.lb[bv] - v).max(v - self.ub[bv]);
                if viol > tol {
                    let inv = &self.tab[r * self.nc + self.n..(r + 1) * self.nc];
                    let w: f64 = inv.iter().map(|a| a * a).sum();
                    let score = viol * viol / w.max(1e-12);
                    if score > worst {
                        worst = score;
                        leave = Some(r);
                    }
                }
            }
            let Some(r) = leave else {
                if !self.dual_feasible() {
                    return self.primal_reopt(cutoff);
                }
                return Ok(Reopt::Optimal);
            };
            let bv = self.basis[r];
            let increase = self.x[bv] < self.lb[bv];
            let target = if increase { self.lb[bv] } else { self.ub[bv] };
            // entering column by the (Harris) dual ratio test
            let mut theta_max = f64::INFINITY;
            self.scratch.clear();
            for k in 0..self.nc {
                let st = self.state[k];
                if st == VarState::Basic || self.is_fixed(k) {
                    continue;
                }
                let a = self.at(r, k);
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let dk = self.d[k];
                let ok = match st {
                    VarState::Lower => (a < 0.0) == increase,
                    VarState::Upper => (a > 0.0) == increase,
                    VarState::Free => true,
                    VarState::Basic => false,
                };
                if !ok {
                    continue;
                }
                let slack = match st {
                    VarState::Lower => dk.max(0.0),
                    VarState::Upper => (-dk).max(0.0),
                    _ => dk.abs(),
                };
                theta_max = theta_max.min((slack + tol_d) / a.abs());
                self.scratch.push((k, slack / a.abs()));
            }
            let entering = self
                .scratch
                .iter()
                .filter(|&&(_, ratio)| ratio <= theta_max)
                .max_by(|a, b| self.at(r, a.0).abs().total_cmp(&self.at(r, b.0).abs()))
                .map(|&(k, _)| k);
            let Some(j) = entering else {
                return Ok(Reopt::Infeasible);
            };
            let a = self.at(r, j);
            let delta = (self.x[bv] - target) / a;
            self.move_entering(j, delta);
            self.x[bv] = target;
            self.state[bv] = if increase { VarState::Lower } else { VarState::Upper };
            self.pivot(r, j);
        }
        self.primal_reopt(cutoff)
    }

    fn primal_reopt(&mut self, cutoff: f64) -> Result<Reopt> {
        match self.solve()? {
            LpStatus::Optimal => {
                if self.objective() > cutoff + 1e-9 * (1.0 + cutoff.abs()) {
                    Ok(Reopt::Cutoff)
                } else {
                    Ok(Reopt::Optimal)
                }
            }
            LpStatus::Infeasible => Ok(Reopt::Infeasible),
            LpStatus::Unbounded => Err(Error::Numerical("relaxation unbounded".into())),
        }
    }
}

fn resting_place(l: f64, u: f64) -> (VarState, f64) {
    if l.is_finite() {
        (VarState::Lower, l)
    } else if u.is_finite() {
        (VarState::Upper, u)
    } else {
        (VarState::Free, 0.0)
    }
}

fn nearest_bound(l: f64, u: f64, v: f64) -> (VarState, f64) {
    match (l.is_finite(), u.is_finite()) {
        (true, true) if (v - l).abs() <= (u - v).abs() => (VarState::Lower, l),
        (true, true) => (VarState::Upper, u),
        _ => resting_place(l, u),
    }
}
