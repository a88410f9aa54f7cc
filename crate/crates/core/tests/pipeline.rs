use cascade_core::experiment::{run_experiment, run_sweep, ExperimentConfig, SweepGrid};
use cascade_core::features::FeatureVector;
use cascade_core::graph::{Family, NetworkSpec};
use cascade_core::rng::stream;
use cascade_core::stats::describe::{mean, median};
use cascade_core::stats::{analyze, AnalysisOptions, MissingPolicy};
use cascade_core::{Error, RunRow, RunTable};
use rand::Rng;

fn flat_features(below: usize) -> FeatureVector {
    FeatureVector {
        seed_mean_degree: 10.0,
        seed_max_degree: 12,
        nbr_min_degree: 3.0,
        nbr_mean_degree: 10.0,
        nbr_max_degree: 18.0,
        nbr_min_threshold: 0.05,
        nbr_mean_threshold: 0.5,
        nbr_max_threshold: 0.95,
        below_count: below,
        step1_min_threshold: 0.02,
        step1_mean_threshold: 0.5,
        step1_max_threshold: 0.98,
        nbr_missing: false,
        step1_missing: false,
    }
}

fn quick() -> AnalysisOptions {
    AnalysisOptions {
        bootstrap: 200,
        ..AnalysisOptions::default()
    }
}

#[test]
fn logit_linear_in_below_recovers_below() {
    let n_agents = 100_000usize;
    let mut rng = stream(400, 0);
    let rows = (0..400)
        .map(|i| {
            let below = rng.random_range(0..30usize);
            let y = -6.0 + 0.3 * below as f64;
            let odds = y.exp();
            let k = ((odds * (n_agents as f64 + 0.5) - 0.5) / (1.0 + odds)).round();
            RunRow {
                solution_index: i,
                features: flat_features(below),
                pi: k / n_agents as f64,
            }
        })
        .collect();
    let table = RunTable {
        config_label: "linear".into(),
        n_agents,
        rows,
    };
    let report = analyze(&table, &quick()).unwrap();
    assert_eq!(report.preferred_variables(), vec!["below".to_string()]);
    assert!(
        report.r_squared_full > 0.999,
        "R2 {}",
        report.r_squared_full
    );
    let slope = report.full.preferred.coefficient("below").unwrap().estimate;
    assert!((slope - 0.3).abs() < 1e-3);
}

#[test]
fn too_few_rows_is_a_data_error() {
    let table = RunTable {
        config_label: "short".into(),
        n_agents: 1000,
        rows: (0..30)
            .map(|i| RunRow {
                solution_index: i,
                features: flat_features(i),
                pi: 0.01 * i as f64,
            })
            .collect(),
    };
    match analyze(&table, &quick()) {
        Err(Error::Data(msg)) => assert!(msg.contains("fewer than 40 usable rows"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

fn random_config(n_solutions: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new("random-p0.01-s5", NetworkSpec::random(1000, 0.01), 5, 401);
    c.n_solutions = n_solutions;
    c.analysis = quick();
    c
}

#[test]
fn experiment_table_shape_and_determinism() {
    let cfg = random_config(1000);
    let a = run_experiment(&cfg).unwrap();
    assert_eq!(a.len(), 1000);
    assert!(a
        .rows
        .iter()
        .enumerate()
        .all(|(i, r)| r.solution_index == i));
    let b = run_experiment(&cfg).unwrap();
    let (mut ba, mut bb) = (Vec::new(), Vec::new());
    a.write_csv(&mut ba).unwrap();
    b.write_csv(&mut bb).unwrap();
    assert_eq!(ba, bb);

    let pi = a.percolations();
    assert!(mean(&pi) > median(&pi));
    assert!(pi.iter().all(|&p| p >= 5.0 / 1000.0));
}

#[test]
fn real_table_reduced_fit_is_nested() {
    let table = run_experiment(&random_config(400)).unwrap();
    let report = analyze(&table, &quick()).unwrap();
    assert!(report.reduced.screened_fit.r_squared <= report.full.screened_fit.r_squared + 1e-12);
    for v in report.reduced.candidates.iter() {
        assert!(!v.starts_with("step1_"));
    }
    for v in report.preferred_variables() {
        assert!(report.screening.kept().contains(&v));
    }

    let again = analyze(&table, &quick()).unwrap();
    assert_eq!(
        serde_json::to_string(&report).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
}

#[test]
fn missing_policies_are_both_reported() {
    let table = run_experiment(&random_config(300)).unwrap();
    let include = analyze(&table, &quick()).unwrap();
    let drop = analyze(
        &table,
        &AnalysisOptions {
            missing: MissingPolicy::Drop,
            ..quick()
        },
    )
    .unwrap();
    let dropped = table
        .rows
        .iter()
        .filter(|r| r.features.any_missing())
        .count();
    assert_eq!(include.n_used, 300);
    assert_eq!(drop.n_used, 300 - dropped);
    let alt = include.alternate.expect("drop policy leaves enough rows");
    assert_eq!(alt.missing, MissingPolicy::Drop);
    assert_eq!(alt.n_used, drop.n_used);
}

#[test]
fn singleton_sweep_reduces_to_its_report() {
    let grid = SweepGrid {
        configs: vec![random_config(200)],
    };
    let out = run_sweep(&grid).unwrap();
    assert_eq!(out.runs.len(), 1);
    assert_eq!(out.r_squared.rows.len(), 1);
    let row = out.r_squared.row(Family::Random).unwrap();
    assert_eq!(row.full.min, out.runs[0].report.r_squared_full);
    assert_eq!(row.full.max, row.full.average);
    let below = out.significance.row("below").unwrap();
    assert_eq!(below.small_world + below.scale_free, 0);
    assert_eq!(out.significance.configurations.random, 1);
}

#[test]
fn failing_configurations_are_recorded() {
    let mut bad = random_config(200);
    bad.label = "bad".into();
    bad.n_seeds = 1000;
    let grid = SweepGrid {
        configs: vec![random_config(200), bad.clone()],
    };
    let out = run_sweep(&grid).unwrap();
    assert_eq!(out.runs.len(), 1);
    assert_eq!(out.failures.len(), 1);
    assert_eq!(out.failures[0].label, "bad");
    assert!(run_sweep(&SweepGrid { configs: vec![bad] }).is_err());
}
