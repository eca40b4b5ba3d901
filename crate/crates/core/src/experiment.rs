//! Computational study runner: random instance cells per recovery fraction,
//! aggregated ratio tables as CSV, a gnuplot script for them, and the
//! fixture self-check.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::bounds::{ratio_report, RatioConfig, RatioReport};
use crate::cutloop::eval_solution;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::mip::Limits;
use crate::model::Instance;
use crate::oracle;
use crate::problems::{gen_random_assignment_at, gen_random_knapsack_at};
use crate::solvers::{solve_incremental, solve_recoverable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Assignment,
    Knapsack,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Assignment => "assignment",
            Family::Knapsack => "knapsack",
        }
    }

    pub fn default_size(self) -> usize {
        match self {
            Family::Assignment => 5,
            Family::Knapsack => 30,
        }
    }

    pub fn generate(self, size: usize, seed: u64, index: u64) -> Result<Instance> {
        match self {
            Family::Assignment => gen_random_assignment_at(size, seed, index),
            Family::Knapsack => gen_random_knapsack_at(size, seed, index),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assignment" => Ok(Family::Assignment),
            "knapsack" => Ok(Family::Knapsack),
            _ => Err(Error::Parse(format!("unknown family {s:?} (assignment|knapsack)"))),
        }
    }
}

/// How a timed-out run enters the average timings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeoutMode {
    /// Counted at the time limit.
    Capped,
    /// Left out of the average.
    Censored,
}

impl TimeoutMode {
    pub fn name(self) -> &'static str {
        match self {
            TimeoutMode::Capped => "capped",
            TimeoutMode::Censored => "censored",
        }
    }
}

impl std::str::FromStr for TimeoutMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "capped" => Ok(TimeoutMode::Capped),
            "censored" => Ok(TimeoutMode::Censored),
            _ => Err(Error::Parse(format!("unknown timeout mode {s:?} (capped|censored)"))),
        }
    }
}

pub fn default_alphas() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: Family,
    pub size: usize,
    pub alphas: Vec<f64>,
    pub instances: usize,
    pub seed: u64,
    pub ratio: RatioConfig,
    pub timeout_mode: TimeoutMode,
    /// Include the `t_*` columns; without them the output is byte-for-byte
    /// reproducible.
    pub timings: bool,
}

impl ExperimentConfig {
    pub fn new(family: Family) -> Self {
        ExperimentConfig {
            family,
            size: family.default_size(),
            alphas: default_alphas(),
            instances: 10,
            seed: 1,
            ratio: RatioConfig { lemmas: false, ..RatioConfig::default() },
            timeout_mode: TimeoutMode::Capped,
            timings: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub alpha_index: usize,
    pub instance: usize,
    pub report: std::result::Result<RatioReport, String>,
}

/// Runs every (alpha, instance) cell on the rayon pool. Cell `(a, k)` uses
/// generator stream `a * instances + k`; results come back in cell order.
pub fn run_cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let jobs: Vec<(usize, usize)> =
        (0..cfg.alphas.len()).flat_map(|a| (0..cfg.instances).map(move |k| (a, k))).collect();
    jobs.into_par_iter()
        .map(|(a, k)| {
            let index = (a * cfg.instances + k) as u64;
            let report = cfg
                .family
                .generate(cfg.size, cfg.seed, index)
                .map(|inst| ratio_report(&inst.with_alpha(cfg.alphas[a]), &cfg.ratio))
                .map_err(|e| e.to_string());
            Cell { alpha_index: a, instance: k, report }
        })
        .collect()
}

/// One aggregated line of the experiment table.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRow {
    pub alpha: f64,
    pub instances: usize,
    pub rho_c0: Option<f64>,
    pub rho_h: Option<f64>,
    pub rho_adv: Option<f64>,
    pub rho_sel: Option<f64>,
    pub rho_lag: Option<f64>,
    pub rho_best: Option<f64>,
    pub lag_ok: usize,
    pub failures: usize,
    pub min_rho: Option<f64>,
    pub t_ub: Option<f64>,
    pub t_eval: Option<f64>,
    pub t_h: Option<f64>,
    pub t_adv: Option<f64>,
    pub t_sel: Option<f64>,
    pub t_lag: Option<f64>,
}

fn mean(v: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let xs: Vec<f64> = v.into_iter().flatten().collect();
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Best available lower bound's ratio for one report.
pub fn rho_best(r: &RatioReport) -> Option<f64> {
    let lb = r.lb_by_method.best()?;
    let e = r.eval_best?;
    if lb > 0.0 {
        Some(e / lb)
    } else {
        (e <= 1e-12).then_some(1.0)
    }
}

pub fn aggregate(cfg: &ExperimentConfig, cells: &[Cell]) -> Vec<AlphaRow> {
    let limit = cfg.ratio.time_limit_s;
    let time = |t: f64, out: bool| -> Option<f64> {
        match (cfg.timeout_mode, out) {
            (TimeoutMode::Capped, _) => Some(t.min(limit)),
            (TimeoutMode::Censored, true) => None,
            (TimeoutMode::Censored, false) => Some(t),
        }
    };
    cfg.alphas
        .iter()
        .enumerate()
        .map(|(a, &alpha)| {
            let reports: Vec<&RatioReport> = cells
                .iter()
                .filter(|c| c.alpha_index == a)
                .filter_map(|c| c.report.as_ref().ok())
                .collect();
            let errors = cells.iter().filter(|c| c.alpha_index == a && c.report.is_err()).count();
            let failures = errors + reports.iter().filter(|r| !r.failures.is_empty()).count();
            let rho = |f: fn(&RatioReport) -> Option<f64>| mean(reports.iter().map(|r| f(r)));
            let tm = |f: fn(&RatioReport) -> (f64, bool)| {
                mean(reports.iter().map(|r| {
                    let (t, out) = f(r);
                    time(t, out)
                }))
            };
            let min_rho = reports
                .iter()
                .flat_map(|r| {
                    let m = &r.rho_by_method;
                    [r.rho_c0, m.heuristic, m.adversarial, m.selection, m.lagrangian]
                })
                .flatten()
                .reduce(f64::min);
            AlphaRow {
                alpha,
                instances: reports.len(),
                rho_c0: rho(|r| r.rho_c0),
                rho_h: rho(|r| r.rho_by_method.heuristic),
                rho_adv: rho(|r| r.rho_by_method.adversarial),
                rho_sel: rho(|r| r.rho_by_method.selection),
                rho_lag: rho(|r| r.rho_by_method.lagrangian),
                rho_best: rho(rho_best),
                lag_ok: reports.iter().filter(|r| r.lb_by_method.lagrangian.is_some() && !r.timed_out.lagrangian).count(),
                failures,
                min_rho,
                t_ub: tm(|r| (r.timings.upper, r.timed_out.upper)),
                t_eval: tm(|r| (r.timings.eval, r.timed_out.eval)),
                t_h: tm(|r| (r.timings.heuristic, r.timed_out.heuristic)),
                t_adv: tm(|r| (r.timings.adversarial, r.timed_out.adversarial)),
                t_sel: tm(|r| (r.timings.selection, r.timed_out.selection)),
                t_lag: tm(|r| (r.timings.lagrangian, r.timed_out.lagrangian)),
            }
        })
        .collect()
}

pub const RHO_COLUMNS: [&str; 6] = ["rho_c0", "rho_h", "rho_adv", "rho_sel", "rho_lag", "rho_best"];
pub const TIME_COLUMNS: [&str; 6] = ["t_ub", "t_eval", "t_h", "t_adv", "t_sel", "t_lag"];

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Experiment table: `#` comment lines with the protocol, a header, one row
/// per alpha.
pub fn to_csv(cfg: &ExperimentConfig, rows: &[AlphaRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# robrec experiment family={} size={}", cfg.family.name(), cfg.size);
    let _ = writeln!(
        out,
        "# instances_per_alpha={} seed={} epsilon={} time_limit={}",
        cfg.instances, cfg.seed, cfg.ratio.epsilon, cfg.ratio.time_limit_s
    );
    let _ = writeln!(out, "# generator: C,c_nominal ~ U{{1..20}}, d ~ U{{0..100}}, budget = 0.1*sum(d)");
    if cfg.family == Family::Knapsack {
        let _ = writeln!(out, "# knapsack: w ~ U{{1..20}}, W = 0.3*sum(w)");
    }
    let _ = writeln!(out, "# timeout_mode={}", cfg.timeout_mode.name());
    let mut header = vec!["alpha", "instances"];
    header.extend(RHO_COLUMNS);
    header.extend(["min_rho", "lag_ok", "failures"]);
    if cfg.timings {
        header.extend(TIME_COLUMNS);
    }
    let _ = writeln!(out, "{}", header.join(","));
    for r in rows {
        let mut f = vec![format!("{:.2}", r.alpha), r.instances.to_string()];
        f.extend([r.rho_c0, r.rho_h, r.rho_adv, r.rho_sel, r.rho_lag, r.rho_best].map(cell));
        f.extend([cell(r.min_rho), r.lag_ok.to_string(), r.failures.to_string()]);
        if cfg.timings {
            f.extend([r.t_ub, r.t_eval, r.t_h, r.t_adv, r.t_sel, r.t_lag].map(cell));
        }
        let _ = writeln!(out, "{}", f.join(","));
    }
    out
}

pub fn run_experiment(cfg: &ExperimentConfig) -> String {
    let cells = run_cells(cfg);
    to_csv(cfg, &aggregate(cfg, &cells))
}

/// Gnuplot script plotting every ratio and time column of an experiment CSV
/// against alpha. `data_path` is the file name written into the script.
pub fn plot_script(csv: &str, data_path: &str) -> Result<String> {
    let mut lines = csv.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty experiment CSV".into()))?
        .split(',')
        .collect();
    if header.first() != Some(&"alpha") {
        return Err(Error::Parse("experiment CSV must start with an alpha column".into()));
    }
    let rows: Vec<&str> = lines.collect();
    if rows.is_empty() {
        return Err(Error::Parse("experiment CSV has no data rows".into()));
    }
    for (i, r) in rows.iter().enumerate() {
        let fields: Vec<&str> = r.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::Parse(format!(
                "row {} has {} fields, header has {}",
                i + 1,
                fields.len(),
                header.len()
            )));
        }
        if fields[0].parse::<f64>().is_err() {
            return Err(Error::Parse(format!("row {}: alpha {:?} is not a number", i + 1, fields[0])));
        }
    }
    let column = |name: &str| header.iter().position(|h| *h == name).map(|p| p + 1);
    let style = if rows.len() == 1 { "points" } else { "linespoints" };
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile missing ''");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "set xlabel 'alpha'");
    let mut chart = |title: &str, ylabel: &str, file: &str, names: &[&str]| {
        let series: Vec<String> = names
            .iter()
            .filter_map(|n| column(n).map(|c| format!("'{data_path}' using 1:{c} with {style} title '{n}'")))
            .collect();
        if series.is_empty() {
            return;
        }
        let _ = writeln!(s, "\nset terminal pngcairo size 800,500");
        let _ = writeln!(s, "set output '{file}'");
        let _ = writeln!(s, "set title '{title}'");
        let _ = writeln!(s, "set ylabel '{ylabel}'");
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    };
    chart("average ratio", "rho", "ratios.png", &RHO_COLUMNS);
    chart("average time", "seconds", "times.png", &TIME_COLUMNS);
    Ok(s)
}

/// Result of one named comparison in [`check_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs()))
}

/// Solver paths against brute-force oracles on one instance.
pub fn check_instance(label: &str, inst: &Instance) -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    let mut push = |name: String, ok: bool, detail: String| out.push(CheckLine { name, ok, detail });
    let limits = Limits::default();
    let u = &inst.uncertainty;
    for x in oracle::enumerate_feasible(&inst.feasible)? {
        let brute = oracle::brute_eval(inst, &x)?;
        let b = eval_solution(inst, &x, 0.0, 60.0, None)?;
        push(format!("{label} eval x={x}"), close(b.ub, brute) && close(b.lb, brute), format!("{} vs {brute}", b.ub));
        for (cname, costs) in [("nominal", u.nominal.clone()), ("worst", u.worst())] {
            let got = solve_incremental(inst, &x, &costs, limits)?.value.unwrap_or(f64::NAN);
            let want = oracle::brute_inc(inst, &x, &costs)?.0;
            push(format!("{label} inc x={x} c={cname}"), close(got, want), format!("{got} vs {want}"));
        }
    }
    for (cname, costs) in [("nominal", u.nominal.clone()), ("worst", u.worst())] {
        let got = solve_recoverable(inst, &costs, limits)?.value.unwrap_or(f64::NAN);
        let want = oracle::brute_rec(inst, &costs)?.0;
        push(format!("{label} rec c={cname}"), close(got, want), format!("{got} vs {want}"));
    }
    let opt = oracle::brute_robrec(inst)?.0;
    let r = ratio_report(inst, &RatioConfig { epsilon: 1e-6, time_limit_s: 60.0, ..RatioConfig::default() });
    push(format!("{label} report"), r.failures.is_empty(), r.failures.join("; "));
    let m = &r.lb_by_method;
    for (name, lb) in [
        ("heuristic", m.heuristic),
        ("adversarial", m.adversarial),
        ("selection", m.selection),
        ("lagrangian", m.lagrangian),
    ] {
        if let Some(lb) = lb {
            push(format!("{label} lb {name} <= opt"), lb <= opt + 1e-6, format!("{lb} vs {opt}"));
        }
    }
    push(format!("{label} opt <= ub"), opt <= r.ub + 1e-6, format!("{opt} vs {}", r.ub));
    Ok(out)
}

/// Oracle comparisons on the bundled fixtures.
pub fn check_suite() -> Result<Vec<CheckLine>> {
    let mut out = check_instance("toy3", &fixtures::toy3())?;
    out.extend(check_instance("counterexample", &fixtures::counterexample())?);
    let ce = fixtures::counterexample();
    let ext = oracle::extreme_point_value(&ce)?;
    out.push(CheckLine { name: "counterexample extreme points".into(), ok: close(ext, 0.0), detail: format!("{ext}") });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(family: Family, size: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(family);
        cfg.size = size;
        cfg.alphas = vec![0.2, 0.6];
        cfg.instances = 2;
        cfg.timings = false;
        cfg.ratio.time_limit_s = 30.0;
        cfg
    }

    #[test]
    fn csv_shape_and_determinism() {
        let cfg = small(Family::Assignment, 3);
        let a = run_experiment(&cfg);
        assert_eq!(a, run_experiment(&cfg));
        let data: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 3);
        assert!(a.contains("# timeout_mode=capped"));
        assert!(!data[0].contains("t_ub"));
    }

    #[test]
    fn plot_script_columns() {
        let cfg = ExperimentConfig { timings: true, ..small(Family::Knapsack, 6) };
        let csv = run_experiment(&cfg);
        let s = plot_script(&csv, "table.csv").unwrap();
        for c in RHO_COLUMNS.iter().chain(&TIME_COLUMNS) {
            assert!(s.contains(&format!("title '{c}'")), "{c}");
        }
        assert!(plot_script("", "t.csv").is_err());
        assert!(plot_script("# only comments\nalpha,rho_c0\n", "t.csv").is_err());
        let one = plot_script("alpha,rho_c0\n0.1,1.5\n", "t.csv").unwrap();
        assert!(one.contains("with points"));
    }

    #[test]
    fn fixture_checks_pass() {
        for line in check_suite().unwrap() {
            assert!(line.ok, "{}: {}", line.name, line.detail);
        }
    }
}
