use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use robrec_core::bounds::{self, RatioConfig, RatioReport};
use robrec_core::cutloop::{self, write_trace_csv, DEFAULT_EPSILON, DEFAULT_TIME_LIMIT};
use robrec_core::error::Error;
use robrec_core::experiment::{self, ExperimentConfig, Family, TimeoutMode};
use robrec_core::mip::Limits;
use robrec_core::model::{load_instance, validate, Instance, Selection};
use robrec_core::{oracle, solvers};

#[derive(Parser)]
#[command(name = "robrec", version, about = "Robust recoverable 0-1 optimization under budgeted uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Relative accuracy of the constraint generation loops.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Time limit in seconds per solve.
    #[arg(long = "time-limit", default_value_t = DEFAULT_TIME_LIMIT)]
    time_limit: f64,
    /// Override the instance's recovery fraction.
    #[arg(long)]
    alpha: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Costs {
    Nominal,
    Worst,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Assignment,
    Knapsack,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Assignment => Family::Assignment,
            FamilyArg::Knapsack => Family::Knapsack,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TimeoutArg {
    Capped,
    Censored,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket on the worst-case cost of a first-stage solution.
    Eval {
        #[command(flatten)]
        common: Common,
        /// First-stage solution, e.g. 1,1,0.
        #[arg(long)]
        x: Selection,
        /// Write the iteration trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Adversarial lower bound: max over scenarios of the recoverable optimum.
    Adv {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Incremental problem for a fixed first stage.
    Inc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: Selection,
        #[arg(long, value_enum, default_value = "nominal")]
        costs: Costs,
    },
    /// Recoverable problem for one scenario.
    Rec {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "nominal")]
        costs: Costs,
    },
    /// Heuristic scenario spreading the budget over the cheapest items.
    Heuristic {
        #[command(flatten)]
        common: Common,
    },
    /// Upper bound from two recoverable problems.
    Ub {
        #[command(flatten)]
        common: Common,
    },
    /// Pick the better of the two upper-bound first stages.
    Choose {
        #[command(flatten)]
        common: Common,
    },
    /// Lower bound with a relaxed recovery set.
    LbSel {
        #[command(flatten)]
        common: Common,
    },
    /// Lagrangian lower bound; searches the multiplier unless --mu is given.
    LbLag {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Brute-force optimum (small instances only).
    Opt {
        #[command(flatten)]
        common: Common,
    },
    /// All bounds and ratios for one instance.
    Ratio {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Skip the analytic approximation bounds.
        #[arg(long)]
        no_lemmas: bool,
    },
    /// List every broken invariant of an instance file.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Generate a random instance of the computational study.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Assignment side length or knapsack item count.
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Generator stream within the seed.
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ratio tables over a grid of recovery fractions.
    Experiment {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Defaults to 5 for assignment, 30 for knapsack.
        #[arg(long)]
        size: Option<usize>,
        /// Comma-separated recovery fractions; defaults to 0.1,...,0.9.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        /// Instances per recovery fraction.
        #[arg(long, default_value_t = 10)]
        cells: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long = "time-limit", default_value_t = DEFAULT_TIME_LIMIT)]
        time_limit: f64,
        #[arg(long = "timeout-mode", value_enum, default_value = "capped")]
        timeout_mode: TimeoutArg,
        /// Leave out the timing columns so reruns give identical bytes.
        #[arg(long)]
        no_timings: bool,
        /// Also compute the analytic approximation bounds per instance.
        #[arg(long)]
        lemmas: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gnuplot script for an experiment CSV.
    PlotScript {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare every solver path against the brute-force oracles on the bundled fixtures.
    Check,
}

enum Failure {
    Input(anyhow::Error),
    Solver(anyhow::Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_)
            | Error::Parse(_)
            | Error::Validation(_)
            | Error::Dimension { .. }
            | Error::Precondition(_)
            | Error::Guard { .. } => Failure::Input(e.into()),
            Error::Numerical(_) | Error::Solver(_) => Failure::Solver(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, v: &impl serde::Serialize) -> Outcome {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    emit(out, &s)
}

fn load(c: &Common) -> Result<Instance, Failure> {
    let inst = load_instance(&c.instance)?;
    match c.alpha {
        Some(a) if !(0.0..=1.0).contains(&a) => {
            Err(Failure::Input(anyhow::anyhow!("alpha {a} outside [0,1]")))
        }
        Some(a) => Ok(inst.with_alpha(a)),
        None => Ok(inst),
    }
}

fn costs(inst: &Instance, which: Costs) -> Result<Vec<f64>, Failure> {
    let u = &inst.uncertainty;
    Ok(match which {
        Costs::Nominal => u.nominal.clone(),
        Costs::Worst => u.worst(),
        Costs::Heuristic => cutloop::heuristic_scenario(u)?.costs,
    })
}

fn write_trace(path: &Option<PathBuf>, rows: &[cutloop::TraceRow]) -> Outcome {
    if let Some(p) = path {
        let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        write_trace_csv(rows, f).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Eval { common, x, trace } => {
            let inst = load(&common)?;
            let (b, rows) = cutloop::eval_solution_traced(&inst, &x, common.epsilon, common.time_limit, None)?;
            write_trace(&trace, &rows)?;
            emit_json(&common.out, &json!({ "x": x, "value": b.ub, "bracket": b }))
        }
        Command::Adv { common, trace } => {
            let inst = load(&common)?;
            let (b, rows) = cutloop::adversarial_lb_traced(&inst, common.epsilon, common.time_limit)?;
            write_trace(&trace, &rows)?;
            emit_json(&common.out, &json!({ "value": b.lb, "bracket": b }))
        }
        Command::Inc { common, x, costs: which } => {
            let inst = load(&common)?;
            let c = costs(&inst, which)?;
            let r = solvers::solve_incremental(&inst, &x, &c, Limits::with_time(common.time_limit))?;
            emit_json(&common.out, &r)
        }
        Command::Rec { common, costs: which } => {
            let inst = load(&common)?;
            let c = costs(&inst, which)?;
            let r = solvers::solve_recoverable(&inst, &c, Limits::with_time(common.time_limit))?;
            emit_json(&common.out, &r)
        }
        Command::Heuristic { common } => {
            let inst = load(&common)?;
            let (level, s) = cutloop::heuristic_level(&inst.uncertainty)?;
            emit_json(&common.out, &json!({ "level": level, "scenario": s }))
        }
        Command::Ub { common } => {
            let inst = load(&common)?;
            emit_json(&common.out, &bounds::upper_bound(&inst, Limits::with_time(common.time_limit))?)
        }
        Command::Choose { common } => {
            let inst = load(&common)?;
            let c = bounds::choose_first_stage(&inst, common.epsilon, Limits::with_time(common.time_limit))?;
            emit_json(&common.out, &c)
        }
        Command::LbSel { common } => {
            let inst = load(&common)?;
            emit_json(&common.out, &bounds::lb_selection(&inst, Limits::with_time(common.time_limit))?)
        }
        Command::LbLag { common, mu } => {
            let inst = load(&common)?;
            let limits = Limits::with_time(common.time_limit);
            match mu {
                Some(mu) => emit_json(&common.out, &bounds::lb_lagrangian(&inst, mu, limits)?),
                None => emit_json(&common.out, &bounds::lb_lagrangian_opt(&inst, limits)?),
            }
        }
        Command::Opt { common } => {
            let inst = load(&common)?;
            let (value, x) = oracle::brute_robrec(&inst)?;
            emit_json(&common.out, &json!({ "value": value, "x": x }))
        }
        Command::Ratio { common, format, no_lemmas } => {
            let inst = load(&common)?;
            let cfg = RatioConfig {
                epsilon: common.epsilon,
                time_limit_s: common.time_limit,
                lemmas: !no_lemmas,
                ..RatioConfig::default()
            };
            let r = bounds::ratio_report(&inst, &cfg);
            match format {
                Format::Json => emit(&common.out, &(r.to_json() + "\n"))?,
                Format::Csv => emit(&common.out, &format!("{}\n{}\n", RatioReport::CSV_HEADER, r.csv_row()))?,
            }
            if r.failures.is_empty() {
                Ok(())
            } else {
                Err(Failure::Solver(anyhow::anyhow!("{}", r.failures.join("; "))))
            }
        }
        Command::Validate { instance } => {
            let text = fs::read_to_string(&instance).map_err(Error::from)?;
            let inst = robrec_core::model::Instance::from_json_unchecked(&text)?;
            let v = validate(&inst);
            let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            emit_json(&None, &json!({ "valid": v.is_empty(), "violations": list }))?;
            if v.is_empty() {
                Ok(())
            } else {
                Err(Error::Validation(v).into())
            }
        }
        Command::Gen { family, size, seed, index, alpha, out } => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Failure::Input(anyhow::anyhow!("alpha {alpha} outside [0,1]")));
            }
            let inst = Family::from(family).generate(size, seed, index)?.with_alpha(alpha);
            emit(&out, &inst.to_json())
        }
        Command::Experiment {
            family,
            size,
            alpha,
            cells,
            seed,
            epsilon,
            time_limit,
            timeout_mode,
            no_timings,
            lemmas,
            out,
        } => {
            let family = Family::from(family);
            let mut cfg = ExperimentConfig::new(family);
            cfg.size = size.unwrap_or(family.default_size());
            if let Some(a) = alpha {
                if a.is_empty() || a.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return Err(Failure::Input(anyhow::anyhow!("alphas must lie in [0,1]")));
                }
                cfg.alphas = a;
            }
            cfg.instances = cells;
            cfg.seed = seed;
            cfg.ratio.epsilon = epsilon;
            cfg.ratio.time_limit_s = time_limit;
            cfg.ratio.lemmas = lemmas;
            cfg.timeout_mode = match timeout_mode {
                TimeoutArg::Capped => TimeoutMode::Capped,
                TimeoutArg::Censored => TimeoutMode::Censored,
            };
            cfg.timings = !no_timings;
            emit(&out, &experiment::run_experiment(&cfg))
        }
        Command::PlotScript { csv, out } => {
            let text = fs::read_to_string(&csv).map_err(Error::from)?;
            let name = csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            emit(&out, &experiment::plot_script(&text, &name)?)
        }
        Command::Check => {
            let lines = experiment::check_suite()?;
            let mut bad = 0;
            for l in &lines {
                println!("{} {}{}", if l.ok { "ok  " } else { "FAIL" }, l.name, if l.ok { String::new() } else { format!(" ({})", l.detail) });
                bad += usize::from(!l.ok);
            }
            println!("{} checks, {} failed", lines.len(), bad);
            if bad == 0 {
                Ok(())
            } else {
                Err(Failure::Mismatch)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Mismatch) => ExitCode::from(3),
    }
}
