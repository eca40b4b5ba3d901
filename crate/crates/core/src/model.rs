//! Domain types, validation and the JSON instance format.
//!
//! All numbers in the on-disk format are decimal strings (plain JSON numbers
//! are accepted on load). Field order of [`Instance`] documents is fixed so
//! that `save(load(f))` is byte-stable.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Slack used when checking real-valued row activities.
pub const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// `sum coeffs[i] * v[i]  (sense)  rhs`, stored sparsely with sorted indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearConstraint {
    /// Duplicate indices are summed and zero entries dropped.
    pub fn new(coeffs: impl IntoIterator<Item = (usize, f64)>, sense: Sense, rhs: f64) -> Self {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, a) in coeffs {
            *merged.entry(i).or_insert(0.0) += a;
        }
        let coeffs = merged.into_iter().filter(|&(_, a)| a != 0.0).collect();
        LinearConstraint { coeffs, sense, rhs }
    }

    pub fn le(coeffs: impl IntoIterator<Item = (usize, f64)>, rhs: f64) -> Self {
        Self::new(coeffs, Sense::Le, rhs)
    }

    pub fn ge(coeffs: impl IntoIterator<Item = (usize, f64)>, rhs: f64) -> Self {
        Self::new(coeffs, Sense::Ge, rhs)
    }

    pub fn eq(coeffs: impl IntoIterator<Item = (usize, f64)>, rhs: f64) -> Self {
        Self::new(coeffs, Sense::Eq, rhs)
    }

    pub fn coeffs(&self) -> &[(usize, f64)] {
        &self.coeffs
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.last().map(|&(i, _)| i)
    }

    /// Same row with every variable index moved by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        LinearConstraint {
            coeffs: self.coeffs.iter().map(|&(i, a)| (i + offset, a)).collect(),
            sense: self.sense,
            rhs: self.rhs,
        }
    }

    pub fn activity(&self, v: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, a)| a * v[i]).sum()
    }

    /// Amount by which `v` violates the row (0 when satisfied).
    pub fn violation(&self, v: &[f64]) -> f64 {
        let lhs = self.activity(v);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }

    pub fn is_satisfied(&self, v: &[f64], tol: f64) -> bool {
        self.violation(v) <= tol * (1.0 + self.rhs.abs())
    }

    fn satisfied_by_zero(&self) -> bool {
        match self.sense {
            Sense::Le => 0.0 <= self.rhs + FEAS_TOL,
            Sense::Ge => 0.0 >= self.rhs - FEAS_TOL,
            Sense::Eq => self.rhs.abs() <= FEAS_TOL,
        }
    }
}

/// A 0-1 vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selection(Vec<bool>);

impl Selection {
    pub fn new(bits: Vec<bool>) -> Self {
        Selection(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Selection(vec![false; n])
    }

    /// Rounds each entry of a (near-)integral real vector.
    pub fn from_reals(v: &[f64]) -> Self {
        Selection(v.iter().map(|&a| a > 0.5).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn dot(&self, costs: &[f64]) -> f64 {
        self.ones().map(|i| costs[i]).sum()
    }

    pub fn to_reals(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn overlap(&self, other: &Selection) -> usize {
        self.0.iter().zip(&other.0).filter(|(&a, &b)| a && b).count()
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.0.iter().map(|&b| if b { "1" } else { "0" }).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| match t.trim() {
                "1" => Ok(true),
                "0" => Ok(false),
                other => Err(Error::Parse(format!("expected 0 or 1, found {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Selection)
    }
}

impl Serialize for Selection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|&b| b as u8))
    }
}

impl<'de> Deserialize<'de> for Selection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<u8> = Vec::deserialize(d)?;
        Ok(Selection(v.into_iter().map(|b| b != 0).collect()))
    }
}

/// Linear description of the 0-1 feasible set.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSetSpec {
    pub n: usize,
    pub constraints: Vec<LinearConstraint>,
    /// Every feasible point selects exactly this many elements.
    pub equal_cardinality: Option<usize>,
    /// User assertion that `{0 <= x <= 1 : rows}` has integral vertices.
    pub integral_polytope: bool,
}

impl FeasibleSetSpec {
    pub fn contains(&self, x: &Selection) -> bool {
        if x.len() != self.n {
            return false;
        }
        let v = x.to_reals();
        self.constraints.iter().all(|c| c.is_satisfied(&v, FEAS_TOL))
    }
}

/// Budgeted interval uncertainty, optionally cut by extra rows on the deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyModel {
    pub nominal: Vec<f64>,
    pub deviation: Vec<f64>,
    pub budget: f64,
    /// Rows over the deviation vector; empty means the plain budgeted set.
    pub extra: Vec<LinearConstraint>,
}

impl UncertaintyModel {
    pub fn n(&self) -> usize {
        self.nominal.len()
    }

    pub fn is_budgeted_only(&self) -> bool {
        self.extra.is_empty()
    }

    pub fn worst(&self) -> Vec<f64> {
        self.nominal.iter().zip(&self.deviation).map(|(c, d)| c + d).collect()
    }

    pub fn total_deviation(&self) -> f64 {
        self.deviation.iter().sum()
    }

    /// Membership of `nominal + delta`.
    pub fn contains_delta(&self, delta: &[f64], tol: f64) -> bool {
        if delta.len() != self.n() {
            return false;
        }
        let box_ok = delta
            .iter()
            .zip(&self.deviation)
            .all(|(&x, &d)| x >= -tol && x <= d + tol);
        let sum: f64 = delta.iter().sum();
        box_ok
            && sum <= self.budget + tol * (1.0 + self.budget)
            && self.extra.iter().all(|c| c.is_satisfied(delta, tol))
    }

    pub fn contains(&self, s: &Scenario, tol: f64) -> bool {
        s.costs.len() == self.n()
            && s.costs
                .iter()
                .zip(self.nominal.iter().zip(&s.delta))
                .all(|(c, (l, dl))| (c - l - dl).abs() <= tol * (1.0 + c.abs()))
            && self.contains_delta(&s.delta, tol)
    }

    pub fn nominal_scenario(&self) -> Scenario {
        Scenario::from_delta(self, vec![0.0; self.n()])
    }
}

/// Second-stage cost vector together with its deviation from nominal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub costs: Vec<f64>,
    pub delta: Vec<f64>,
}

impl Scenario {
    pub fn from_delta(u: &UncertaintyModel, delta: Vec<f64>) -> Self {
        let costs = u.nominal.iter().zip(&delta).map(|(c, d)| c + d).collect();
        Scenario { costs, delta }
    }
}

/// First-stage solution `x` and recovery `y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionPair {
    pub x: Selection,
    pub y: Selection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub feasible: FeasibleSetSpec,
    pub first_stage: Vec<f64>,
    pub uncertainty: UncertaintyModel,
    pub alpha: f64,
}

impl Instance {
    /// Builds and validates.
    pub fn new(
        feasible: FeasibleSetSpec,
        first_stage: Vec<f64>,
        uncertainty: UncertaintyModel,
        alpha: f64,
    ) -> Result<Self> {
        let inst = Instance { feasible, first_stage, uncertainty, alpha };
        let v = validate(&inst);
        if v.is_empty() {
            Ok(inst)
        } else {
            Err(Error::Validation(v))
        }
    }

    pub fn n(&self) -> usize {
        self.feasible.n
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Instance { alpha, ..self.clone() }
    }

    pub fn is_pair_feasible(&self, pair: &SolutionPair) -> bool {
        self.feasible.contains(&pair.x)
            && self.feasible.contains(&pair.y)
            && in_neighborhood(&pair.x, &pair.y, self.alpha).unwrap_or(false)
    }

    /// The size `m(1-alpha)` rounded up, when the problem has equal cardinality.
    pub fn overlap_requirement(&self) -> Option<usize> {
        self.feasible.equal_cardinality.map(|m| overlap_requirement(m, self.alpha))
    }
}

/// Certified interval produced by a constraint-generation loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lb: f64,
    pub ub: f64,
    pub status: BracketStatus,
    pub iterations: usize,
    pub elapsed_seconds: f64,
    pub witness_scenario: Option<Scenario>,
    pub witness_solution: Option<Selection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketStatus {
    Converged,
    TimeLimit,
    IterationLimit,
}

/// `|I(x) \ I(y)| <= alpha |I(x)|`. Membership of x, y in the feasible set
/// is not checked.
pub fn in_neighborhood(x: &Selection, y: &Selection, alpha: f64) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), got: y.len() });
    }
    let removed = x.bits().iter().zip(y.bits()).filter(|(&a, &b)| a && !b).count();
    Ok(removed as f64 <= alpha * x.count() as f64 + 1e-9)
}

/// `ceil(m (1 - alpha))` computed on the exact decimal value of `alpha`.
pub fn overlap_requirement(m: usize, alpha: f64) -> usize {
    let (num, den) = decimal_fraction(alpha.clamp(0.0, 1.0));
    let total = m as u128 * (den - num);
    total.div_ceil(den) as usize
}

/// `alpha` as `num / 10^k` using its shortest round-trip decimal form.
fn decimal_fraction(alpha: f64) -> (u128, u128) {
    let s = format!("{alpha}");
    let (int_part, frac_part) = s.split_once('.').unwrap_or((&s, ""));
    let den = 10u128.pow(frac_part.len() as u32);
    let int: u128 = int_part.parse().unwrap_or(0);
    let frac: u128 = if frac_part.is_empty() { 0 } else { frac_part.parse().unwrap_or(0) };
    (int * den + frac, den)
}

/// Every broken invariant of `inst`; an empty list means the instance is valid.
pub fn validate(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = inst.feasible.n;
    let u = &inst.uncertainty;
    for (field, len) in [
        ("C", inst.first_stage.len()),
        ("nominal", u.nominal.len()),
        ("deviation", u.deviation.len()),
    ] {
        if len != n {
            out.push(Violation::DimensionMismatch { field, expected: n, got: len });
        }
    }
    if !(0.0..=1.0).contains(&inst.alpha) {
        out.push(Violation::AlphaOutOfRange(inst.alpha));
    }
    for (field, v) in [("C", &inst.first_stage), ("nominal", &u.nominal), ("deviation", &u.deviation)] {
        if v.iter().any(|a| !a.is_finite()) {
            out.push(Violation::NonFinite(field));
        }
    }
    if !u.budget.is_finite() {
        out.push(Violation::NonFinite("budget"));
    }
    for (i, &c) in inst.first_stage.iter().enumerate() {
        if c < 0.0 {
            out.push(Violation::NegativeFirstStageCost(i));
        }
    }
    for (i, &c) in u.nominal.iter().enumerate() {
        if c < 0.0 {
            out.push(Violation::NegativeNominalCost(i));
        }
    }
    for (i, &d) in u.deviation.iter().enumerate() {
        if d < 0.0 {
            out.push(Violation::NegativeDeviation(i));
        }
    }
    if u.budget < 0.0 {
        out.push(Violation::NegativeBudget(u.budget));
    }
    let mut rows_ok = true;
    for (k, c) in inst.feasible.constraints.iter().enumerate() {
        for &(i, a) in c.coeffs() {
            if i >= n {
                rows_ok = false;
                out.push(Violation::IndexOutOfRange { constraint: k, index: i });
            }
            if a == 0.0 {
                out.push(Violation::ZeroCoefficient { constraint: k, index: i });
            }
        }
    }
    for (k, c) in u.extra.iter().enumerate() {
        let mut ok = true;
        for &(i, _) in c.coeffs() {
            if i >= n {
                ok = false;
                out.push(Violation::ExtraIndexOutOfRange { constraint: k, index: i });
            }
        }
        if ok && !c.satisfied_by_zero() {
            out.push(Violation::ZeroNotInV { constraint: k });
        }
    }
    if inst.feasible.equal_cardinality == Some(0) {
        out.push(Violation::ZeroCardinality);
    }
    if rows_ok {
        out.extend(check_feasible_set(&inst.feasible));
    }
    out
}

fn check_feasible_set(spec: &FeasibleSetSpec) -> Vec<Violation> {
    if spec.n <= crate::oracle::ENUMERATION_LIMIT {
        let points = match crate::oracle::enumerate_feasible(spec) {
            Ok(p) => p,
            Err(_) => return Vec::new(),
        };
        if points.is_empty() {
            return vec![Violation::EmptyFeasibleSet];
        }
        if let Some(m) = spec.equal_cardinality {
            if let Some(bad) = points.iter().find(|x| x.count() != m) {
                return vec![Violation::CardinalityMismatch { expected: m, found: bad.count() }];
            }
        }
        Vec::new()
    } else {
        match crate::mip::feasible_point(spec) {
            Ok(Some(_)) => Vec::new(),
            Ok(None) => vec![Violation::EmptyFeasibleSet],
            // an undecided solve is not evidence of emptiness
            Err(_) => Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON format

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Text(String),
    Plain(f64),
}

impl Num {
    fn value(&self) -> Result<f64> {
        match self {
            Num::Plain(v) => Ok(*v),
            Num::Text(s) => parse_decimal(s),
        }
    }
}

fn num(v: f64) -> Num {
    Num::Text(format!("{v}"))
}

/// Decimal string, optionally a `p/q` fraction.
fn parse_decimal(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let q: f64 = q.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        if q == 0.0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(p / q);
    }
    s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

#[derive(Serialize, Deserialize)]
struct RawConstraint {
    coeffs: BTreeMap<usize, Num>,
    sense: Sense,
    rhs: Num,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    constraints: Vec<RawConstraint>,
    equal_cardinality: Option<usize>,
    integral_polytope: bool,
    #[serde(rename = "C")]
    first_stage: Vec<Num>,
    nominal: Vec<Num>,
    deviation: Vec<Num>,
    budget: Num,
    #[serde(default)]
    extra_constraints: Vec<RawConstraint>,
    alpha: Num,
}

fn raw_constraint(c: &LinearConstraint) -> RawConstraint {
    RawConstraint {
        coeffs: c.coeffs().iter().map(|&(i, a)| (i, num(a))).collect(),
        sense: c.sense,
        rhs: num(c.rhs),
    }
}

/// Explicit zeros survive parsing so that validation can report them.
fn cooked_constraint(r: &RawConstraint) -> Result<LinearConstraint> {
    let coeffs = r
        .coeffs
        .iter()
        .map(|(&i, a)| Ok((i, a.value()?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LinearConstraint { coeffs, sense: r.sense, rhs: r.rhs.value()? })
}

fn values(v: &[Num]) -> Result<Vec<f64>> {
    v.iter().map(Num::value).collect()
}

impl Instance {
    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            n: self.feasible.n,
            constraints: self.feasible.constraints.iter().map(raw_constraint).collect(),
            equal_cardinality: self.feasible.equal_cardinality,
            integral_polytope: self.feasible.integral_polytope,
            first_stage: self.first_stage.iter().map(|&v| num(v)).collect(),
            nominal: self.uncertainty.nominal.iter().map(|&v| num(v)).collect(),
            deviation: self.uncertainty.deviation.iter().map(|&v| num(v)).collect(),
            budget: num(self.uncertainty.budget),
            extra_constraints: self.uncertainty.extra.iter().map(raw_constraint).collect(),
            alpha: num(self.alpha),
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("instance serializes");
        s.push('\n');
        s
    }

    /// Parses without validating.
    pub fn from_json_unchecked(text: &str) -> Result<Self> {
        let raw: RawInstance =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let constraints = raw.constraints.iter().map(cooked_constraint).collect::<Result<_>>()?;
        let extra = raw.extra_constraints.iter().map(cooked_constraint).collect::<Result<_>>()?;
        Ok(Instance {
            feasible: FeasibleSetSpec {
                n: raw.n,
                constraints,
                equal_cardinality: raw.equal_cardinality,
                integral_polytope: raw.integral_polytope,
            },
            first_stage: values(&raw.first_stage)?,
            uncertainty: UncertaintyModel {
                nominal: values(&raw.nominal)?,
                deviation: values(&raw.deviation)?,
                budget: raw.budget.value()?,
                extra,
            },
            alpha: raw.alpha.value()?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst = Self::from_json_unchecked(text)?;
        let v = validate(&inst);
        if v.is_empty() {
            Ok(inst)
        } else {
            Err(Error::Validation(v))
        }
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    Instance::from_json(&text)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, inst.to_json())?;
    Ok(())
}
