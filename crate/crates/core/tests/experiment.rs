use robrec_core::bounds::RatioConfig;
use robrec_core::experiment::{run_experiment, ExperimentConfig, Family, RHO_COLUMNS};

fn small(family: Family) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(family);
    cfg.size = if family == Family::Assignment { 3 } else { 8 };
    cfg.alphas = vec![0.2, 0.6];
    cfg.instances = 3;
    cfg.seed = 11;
    cfg.timings = false;
    cfg.ratio = RatioConfig { lemmas: false, time_limit_s: 60.0, ..RatioConfig::default() };
    cfg
}

#[test]
fn rows_hold_valid_ratios_and_repeat_exactly() {
    for family in [Family::Assignment, Family::Knapsack] {
        let cfg = small(family);
        let first = run_experiment(&cfg);
        assert_eq!(first, run_experiment(&cfg));
        let mut lines = first.lines().filter(|l| !l.starts_with('#'));
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let mut rows = 0;
        for line in lines {
            rows += 1;
            let cells: Vec<&str> = line.split(',').collect();
            for col in RHO_COLUMNS {
                let i = header.iter().position(|h| *h == col).unwrap();
                if let Ok(v) = cells[i].parse::<f64>() {
                    assert!(v >= 1.0 - 1e-6, "{col} = {v} in {line}");
                }
            }
            let fail = header.iter().position(|h| *h == "failures").unwrap();
            assert_eq!(cells[fail], "0", "{line}");
        }
        assert_eq!(rows, 2);
    }
}

#[test]
fn seeds_change_the_table() {
    let cfg = small(Family::Knapsack);
    let mut other = cfg.clone();
    other.seed = 12;
    assert_ne!(run_experiment(&cfg), run_experiment(&other));
}
