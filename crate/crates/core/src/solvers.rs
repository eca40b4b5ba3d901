//! Incremental and recoverable problems as 0-1 programs, plus the closed-form
//! worst case of a fixed solution under the plain budgeted set.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{LpModel, ObjSense};
use crate::mip::{mip_solve_from, mip_solve_limits, Limits, MipModel, MipResult, MipStatus};
use crate::model::{
    overlap_requirement, FeasibleSetSpec, Instance, LinearConstraint, Selection, SolutionPair,
    UncertaintyModel,
};

/// Column offsets of the `x`, `y` and `z` blocks (each of length `n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairLayout {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl PairLayout {
    pub fn consecutive(n: usize) -> Self {
        PairLayout { x: 0, y: n, z: 2 * n }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    pub rows: Vec<LinearConstraint>,
    /// Whether the `z` block must be declared binary.
    pub z_binary: bool,
}

/// Rows encoding the recovery neighborhood.
///
/// With `x` fixed the rows involve `y` only. Otherwise `z_i` stands for
/// `x_i y_i`; under equal cardinality it is continuous with `z <= x`,
/// `z <= y` and `sum z >= l`. In the exclusion form `z` is pinned to the
/// product by `z <= x`, `z <= y`, `z >= x + y - 1`, so at integral `(x, y)`
/// it is integral as well and is kept continuous.
pub fn neighborhood_rows(
    x_fixed: Option<&Selection>,
    spec: &FeasibleSetSpec,
    alpha: f64,
    layout: PairLayout,
) -> Neighborhood {
    let n = spec.n;
    let mut rows = Vec::new();
    match x_fixed {
        Some(x) => {
            let size = x.count();
            let rhs = match spec.equal_cardinality {
                Some(m) => overlap_requirement(m, alpha) as f64,
                None => size as f64 - alpha * size as f64,
            };
            if size > 0 && rhs > 1e-9 {
                rows.push(LinearConstraint::ge(x.ones().map(|i| (layout.y + i, 1.0)), rhs));
            }
        }
        None => {
            let linking = match spec.equal_cardinality {
                Some(m) => {
                    let l = overlap_requirement(m, alpha) as f64;
                    (l > 0.0).then(|| LinearConstraint::ge((0..n).map(|i| (layout.z + i, 1.0)), l))
                }
                None => (alpha < 1.0).then(|| {
                    let coeffs =
                        (0..n).flat_map(|i| [(layout.x + i, 1.0 - alpha), (layout.z + i, -1.0)]);
                    LinearConstraint::le(coeffs, 0.0)
                }),
            };
            // a vacuous linking row leaves z unconstrained and unused
            if let Some(link) = linking {
                for i in 0..n {
                    rows.push(LinearConstraint::le([(layout.z + i, 1.0), (layout.x + i, -1.0)], 0.0));
                    rows.push(LinearConstraint::le([(layout.z + i, 1.0), (layout.y + i, -1.0)], 0.0));
                    if spec.equal_cardinality.is_none() {
                        rows.push(LinearConstraint::ge(
                            [(layout.z + i, 1.0), (layout.x + i, -1.0), (layout.y + i, -1.0)],
                            -1.0,
                        ));
                    }
                }
                rows.push(link);
            }
        }
    }
    Neighborhood { rows, z_binary: false }
}

/// Result of one incremental/recoverable solve.
#[derive(Debug, Clone, Serialize)]
pub struct Solved<T> {
    pub solution: Option<T>,
    pub value: Option<f64>,
    /// Proven lower bound on the optimum.
    pub bound: f64,
    pub status: MipStatus,
    pub elapsed_seconds: f64,
}

impl<T> Solved<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == MipStatus::Optimal
    }

    /// The bound on the optimum that is safe to use from below.
    pub fn safe_lower(&self) -> f64 {
        if self.is_optimal() {
            self.value.unwrap_or(self.bound)
        } else {
            self.bound
        }
    }

    fn from_mip(r: &MipResult, solution: Option<T>) -> Self {
        Solved {
            solution,
            value: r.value,
            bound: r.best_bound,
            status: r.status,
            elapsed_seconds: r.elapsed_seconds,
        }
    }
}

fn check_costs(inst: &Instance, costs: &[f64]) -> Result<()> {
    if costs.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: costs.len() });
    }
    Ok(())
}

fn check_member(inst: &Instance, x: &Selection) -> Result<()> {
    if x.len() != inst.n() {
        return Err(Error::Dimension { expected: inst.n(), got: x.len() });
    }
    if !inst.feasible.contains(x) {
        return Err(Error::Precondition(format!("x = {x} is not in the feasible set")));
    }
    Ok(())
}

/// `Inc(x, c)`: cheapest `y` in the neighborhood of `x`.
pub fn solve_incremental(
    inst: &Instance,
    x: &Selection,
    costs: &[f64],
    limits: Limits,
) -> Result<Solved<Selection>> {
    check_member(inst, x)?;
    check_costs(inst, costs)?;
    let n = inst.n();
    let mut lp = LpModel::new(ObjSense::Minimize);
    for &c in costs {
        lp.add_var(c, 0.0, 1.0);
    }
    lp.rows = inst.feasible.constraints.clone();
    lp.rows.extend(neighborhood_rows(Some(x), &inst.feasible, inst.alpha, PairLayout { x: 0, y: 0, z: 0 }).rows);
    let model = MipModel::new(lp, (0..n).collect());
    let r = mip_solve_from(&model, limits, &x.to_reals())?;
    let y = r.incumbent.as_deref().map(|v| Selection::from_reals(&v[..n]));
    let y = y.or_else(|| Some(x.clone()));
    let mut out = Solved::from_mip(&r, y);
    if out.value.is_none() {
        out.value = Some(x.dot(costs));
    }
    Ok(out)
}

/// Model of `Rec(c)` over variables `x | y | z`.
pub fn recoverable_model(inst: &Instance, costs: &[f64]) -> MipModel {
    let n = inst.n();
    let layout = PairLayout::consecutive(n);
    let mut lp = LpModel::new(ObjSense::Minimize);
    for &c in &inst.first_stage {
        lp.add_var(c, 0.0, 1.0);
    }
    for &c in costs {
        lp.add_var(c, 0.0, 1.0);
    }
    for _ in 0..n {
        lp.add_var(0.0, 0.0, 1.0);
    }
    for row in &inst.feasible.constraints {
        lp.rows.push(row.shifted(layout.x));
        lp.rows.push(row.shifted(layout.y));
    }
    let nb = neighborhood_rows(None, &inst.feasible, inst.alpha, layout);
    lp.rows.extend(nb.rows);
    let mut binaries: Vec<usize> = (0..2 * n).collect();
    if nb.z_binary {
        binaries.extend(2 * n..3 * n);
    }
    MipModel::new(lp, binaries)
}

/// `Rec(c)`: cheapest feasible pair under first-stage costs `C` and second-stage `c`.
pub fn solve_recoverable(inst: &Instance, costs: &[f64], limits: Limits) -> Result<Solved<SolutionPair>> {
    check_costs(inst, costs)?;
    let n = inst.n();
    let model = recoverable_model(inst, costs);
    let r = mip_solve_limits(&model, limits)?;
    if r.status == MipStatus::Infeasible {
        return Err(Error::Precondition("recoverable problem infeasible: empty feasible set".into()));
    }
    let pair = r.incumbent.as_deref().map(|v| SolutionPair {
        x: Selection::from_reals(&v[..n]),
        y: Selection::from_reals(&v[n..2 * n]),
    });
    Ok(Solved::from_mip(&r, pair))
}

/// `min c.y` over the feasible set.
pub fn solve_deterministic(spec: &FeasibleSetSpec, costs: &[f64], limits: Limits) -> Result<Solved<Selection>> {
    if costs.len() != spec.n {
        return Err(Error::Dimension { expected: spec.n, got: costs.len() });
    }
    let mut lp = LpModel::new(ObjSense::Minimize);
    for &c in costs {
        lp.add_var(c, 0.0, 1.0);
    }
    lp.rows = spec.constraints.clone();
    let r = mip_solve_limits(&MipModel::new(lp, (0..spec.n).collect()), limits)?;
    if r.status == MipStatus::Infeasible {
        return Err(Error::Precondition("feasible set is empty".into()));
    }
    let y = r.incumbent.as_deref().map(Selection::from_reals);
    Ok(Solved::from_mip(&r, y))
}

/// `max over c in U0 of c.y = min(nominal.y + budget, (nominal + d).y)`.
pub fn max_scenario_value_u0(y: &Selection, u: &UncertaintyModel) -> Result<f64> {
    if !u.is_budgeted_only() {
        return Err(Error::Precondition(
            "closed form needs the plain budgeted set; use the LP path for extra constraints".into(),
        ));
    }
    if y.len() != u.n() {
        return Err(Error::Dimension { expected: u.n(), got: y.len() });
    }
    let base = y.dot(&u.nominal);
    Ok((base + u.budget).min(base + y.dot(&u.deviation)))
}

/// `Inc(x, c)` computed as a recoverable problem whose first stage is forced
/// to `x` by prohibitive costs off `I(x)`.
///
/// The two agree whenever no feasible proper subset of `I(x)` has a larger
/// neighborhood than `x` itself, e.g. under equal cardinality.
pub fn incremental_via_rec_reduction(inst: &Instance, x: &Selection, costs: &[f64]) -> Result<f64> {
    check_member(inst, x)?;
    check_costs(inst, costs)?;
    let u = &inst.uncertainty;
    let big = inst.first_stage.iter().sum::<f64>() + u.worst().iter().sum::<f64>() + 1.0;
    let mut reduced = inst.clone();
    reduced.first_stage = (0..inst.n()).map(|i| if x.get(i) { 0.0 } else { big }).collect();
    let r = solve_recoverable(&reduced, costs, Limits::default())?;
    r.value.ok_or_else(|| Error::Solver("reduction solve produced no incumbent".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy3;
    use crate::problems::build_min_knapsack;

    fn sel(s: &str) -> Selection {
        s.parse().unwrap()
    }

    #[test]
    fn toy3_neighborhood_row() {
        let inst = toy3();
        let nb = neighborhood_rows(Some(&sel("1,1,0")), &inst.feasible, 0.5, PairLayout::consecutive(3));
        assert_eq!(nb.rows, vec![LinearConstraint::ge([(3, 1.0), (4, 1.0)], 1.0)]);
        let nb = neighborhood_rows(Some(&sel("1,1,0")), &inst.feasible, 1.0, PairLayout::consecutive(3));
        assert!(nb.rows.is_empty());
        let nb = neighborhood_rows(Some(&sel("1,1,0")), &inst.feasible, 0.0, PairLayout::consecutive(3));
        assert_eq!(nb.rows[0].rhs, 2.0);
    }

    #[test]
    fn toy3_incremental_and_recoverable() {
        let inst = toy3();
        let r = solve_incremental(&inst, &sel("1,1,0"), &[2.0, 1.0, 4.0], Limits::default()).unwrap();
        assert_eq!(r.value, Some(3.0));
        assert_eq!(r.solution, Some(sel("1,1,0")));
        let r = solve_recoverable(&inst, &[2.0, 1.0, 4.0], Limits::default()).unwrap();
        assert_eq!(r.value, Some(6.0));
        let r = solve_recoverable(&inst, &[5.0, 4.0, 4.0], Limits::default()).unwrap();
        assert_eq!(r.value, Some(11.0));
        let pair = r.solution.unwrap();
        assert_eq!((pair.x, pair.y), (sel("1,1,0"), sel("0,1,1")));
        assert_eq!(incremental_via_rec_reduction(&inst, &sel("1,1,0"), &[2.0, 1.0, 4.0]).unwrap(), 3.0);
    }

    #[test]
    fn knapsack_incremental() {
        let mut inst = toy3();
        inst.feasible = build_min_knapsack(&[2.0, 2.0, 2.0], 4.0).unwrap();
        let r = solve_incremental(&inst, &sel("1,1,0"), &[5.0, 5.0, 1.0], Limits::default()).unwrap();
        assert_eq!(r.value, Some(6.0));
        let y = r.solution.unwrap();
        assert!(y == sel("1,0,1") || y == sel("0,1,1"));
        assert_eq!(incremental_via_rec_reduction(&inst, &sel("1,1,0"), &[5.0, 5.0, 1.0]).unwrap(), 6.0);
    }

    #[test]
    fn closed_form_examples() {
        let u = toy3().uncertainty;
        assert_eq!(max_scenario_value_u0(&sel("1,1,0"), &u).unwrap(), 6.0);
        assert_eq!(max_scenario_value_u0(&sel("0,0,0"), &u).unwrap(), 0.0);
        let mut u0 = u.clone();
        u0.budget = 0.0;
        assert_eq!(max_scenario_value_u0(&sel("1,0,1"), &u0).unwrap(), 6.0);
        let mut v = u;
        v.extra.push(LinearConstraint::le([(0, 1.0)], 1.0));
        assert!(max_scenario_value_u0(&sel("1,1,0"), &v).is_err());
    }
}
