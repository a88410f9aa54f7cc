//! Experiment orchestration: one configuration produces a run table of
//! independent solutions; a sweep runs many configurations and aggregates
//! significance counts and R² per network family.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{draw_thresholds, run_cascade, select_seeds};
use crate::error::{Error, Result};
use crate::features::{critical_value, extract_features, CriticalValue, FEATURE_NAMES};
use crate::graph::{Family, NetworkSpec};
use crate::rng::{mix, stream};
use crate::stats::describe::{mean, median};
use crate::stats::pipeline::{analyze, AnalysisOptions, AnalysisReport};
use crate::table::{RunRow, RunTable};

pub const STANDARD_N_AGENTS: usize = 1000;
pub const STANDARD_N_SOLUTIONS: usize = 1000;
pub const MIN_SOLUTIONS: usize = 40;

fn default_solutions() -> usize {
    STANDARD_N_SOLUTIONS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub label: String,
    pub network: NetworkSpec,
    pub n_seeds: usize,
    #[serde(default = "default_solutions")]
    pub n_solutions: usize,
    #[serde(default)]
    pub critical_override: Option<f64>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub analysis: AnalysisOptions,
}

impl ExperimentConfig {
    pub fn new(
        label: impl Into<String>,
        network: NetworkSpec,
        n_seeds: usize,
        master_seed: u64,
    ) -> Self {
        ExperimentConfig {
            label: label.into(),
            network,
            n_seeds,
            n_solutions: STANDARD_N_SOLUTIONS,
            critical_override: None,
            master_seed,
            analysis: AnalysisOptions::default(),
        }
    }

    pub fn family(&self) -> Family {
        self.network.family()
    }

    pub fn critical_value(&self) -> Result<CriticalValue> {
        critical_value(&self.network, self.critical_override)
    }

    pub fn validate(&self) -> Result<()> {
        if self.label.is_empty() {
            return Err(Error::parameter("label", "must not be empty"));
        }
        self.network.validate()?;
        if self.n_seeds == 0 || self.n_seeds >= self.network.n_agents {
            return Err(Error::parameter(
                "n_seeds",
                format!("must lie in [1, n_agents), got {}", self.n_seeds),
            ));
        }
        if self.n_solutions < MIN_SOLUTIONS {
            return Err(Error::parameter(
                "n_solutions",
                format!("must be at least {MIN_SOLUTIONS}, got {}", self.n_solutions),
            ));
        }
        self.critical_value()?;
        self.analysis.validate()
    }
}

fn solve(cfg: &ExperimentConfig, crit: CriticalValue, index: usize) -> Result<RunRow> {
    let mut rng = stream(cfg.master_seed, index as u64);
    let n = cfg.network.n_agents;
    let g = cfg.network.generate(&mut rng)?;
    let thresholds = draw_thresholds(n, &mut rng);
    let seeds = select_seeds(n, cfg.n_seeds, &mut rng)?;
    let result = run_cascade(&g, &thresholds, &seeds)?;
    let features = extract_features(&g, &thresholds, &seeds, &result, crit);
    Ok(RunRow {
        solution_index: index,
        features,
        pi: result.percolation,
    })
}

/// Runs every solution of a configuration. Solution `i` draws its network,
/// thresholds and seeds from stream `i` under the master seed, so the table
/// is independent of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunTable> {
    cfg.validate()?;
    let crit = cfg.critical_value()?;
    let rows = (0..cfg.n_solutions)
        .into_par_iter()
        .map(|i| {
            solve(cfg, crit, i).map_err(|e| Error::Solution {
                solution: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunTable {
        config_label: cfg.label.clone(),
        n_agents: cfg.network.n_agents,
        rows,
    })
}

pub fn analyze_experiment(table: &RunTable, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    analyze(table, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub configs: Vec<ExperimentConfig>,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.configs.is_empty() {
            return Err(Error::parameter("configs", "grid is empty"));
        }
        let mut seen = BTreeSet::new();
        for c in &self.configs {
            if !seen.insert(c.label.as_str()) {
                return Err(Error::parameter(
                    "label",
                    format!("duplicate label `{}`", c.label),
                ));
            }
        }
        Ok(())
    }

    /// Sets the same analysis options on every configuration.
    pub fn with_analysis(mut self, opts: AnalysisOptions) -> Self {
        for c in &mut self.configs {
            c.analysis = opts;
        }
        self
    }

    pub fn with_solutions(mut self, n_solutions: usize) -> Self {
        for c in &mut self.configs {
            c.n_solutions = n_solutions;
        }
        self
    }
}

pub const STANDARD_SEEDS: [usize; 3] = [5, 10, 20];
pub const DEFAULT_GRID_SEED: u64 = 20_070_101;

/// The default 42-configuration grid spanning the published parameter
/// ranges: 12 random, 12 small-world and 18 scale-free configurations.
/// Each configuration's master seed is derived from `seed` and its
/// position in the grid.
pub fn standard_grid(seed: u64) -> SweepGrid {
    let n = STANDARD_N_AGENTS;
    let mut specs: Vec<(String, NetworkSpec, usize)> = Vec::new();
    for p in [0.005, 0.01, 0.02, 0.04] {
        for s in STANDARD_SEEDS {
            specs.push((format!("random-p{p}-s{s}"), NetworkSpec::random(n, p), s));
        }
    }
    for k in [5, 10, 20] {
        for beta in [0.01, 0.11] {
            for s in [5, 20] {
                specs.push((
                    format!("smallworld-n{k}-r{beta}-s{s}"),
                    NetworkSpec::small_world(n, k, beta),
                    s,
                ));
            }
        }
    }
    for (m0, m) in [(2usize, 1.0f64), (4, 2.0), (8, 5.0)] {
        for s in STANDARD_SEEDS {
            for rep in ["a", "b"] {
                specs.push((
                    format!("scalefree-m0{m0}-m{m}-s{s}-{rep}"),
                    NetworkSpec::scale_free(n, m0, m),
                    s,
                ));
            }
        }
    }
    SweepGrid {
        configs: specs
            .into_iter()
            .enumerate()
            .map(|(i, (label, spec, s))| ExperimentConfig::new(label, spec, s, mix(seed, i as u64)))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiSummary {
    pub mean: f64,
    pub median: f64,
    pub max: f64,
}

impl PiSummary {
    pub fn of(table: &RunTable) -> Self {
        let pi = table.percolations();
        PiSummary {
            mean: mean(&pi),
            median: median(&pi),
            max: pi.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// A configuration that ran and was analysed.
#[derive(Debug, Clone)]
pub struct ConfigRun {
    pub config: ExperimentConfig,
    pub table: RunTable,
    pub report: AnalysisReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFailure {
    pub label: String,
    pub family: Family,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRow {
    pub variable: String,
    pub random: usize,
    pub small_world: usize,
    pub scale_free: usize,
}

impl SignificanceRow {
    pub fn count(&self, family: Family) -> usize {
        match family {
            Family::Random => self.random,
            Family::SmallWorld => self.small_world,
            Family::ScaleFree => self.scale_free,
        }
    }
}

/// How often each variable is significant in the preferred full-set model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceCountTable {
    pub configurations: SignificanceRow,
    pub rows: Vec<SignificanceRow>,
}

impl SignificanceCountTable {
    pub fn row(&self, variable: &str) -> Option<&SignificanceRow> {
        self.rows.iter().find(|r| r.variable == variable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub average: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    fn of(values: &[f64]) -> Self {
        Spread {
            average: mean(values),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSquaredRow {
    pub family: Family,
    pub configurations: usize,
    pub full: Spread,
    pub reduced: Spread,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSquaredTable {
    pub rows: Vec<RSquaredRow>,
}

impl RSquaredTable {
    pub fn row(&self, family: Family) -> Option<&RSquaredRow> {
        self.rows.iter().find(|r| r.family == family)
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub runs: Vec<ConfigRun>,
    pub failures: Vec<ConfigFailure>,
    pub significance: SignificanceCountTable,
    pub r_squared: RSquaredTable,
}

/// Serializable digest of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub configurations: Vec<ConfigSummary>,
    pub failures: Vec<ConfigFailure>,
    pub significance: SignificanceCountTable,
    pub r_squared: RSquaredTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub label: String,
    pub family: Family,
    pub n_seeds: usize,
    pub rows: usize,
    pub pi: PiSummary,
    pub preferred_full: Vec<String>,
    pub r_squared_full: f64,
    pub r_squared_reduced: f64,
}

pub fn run_config(cfg: &ExperimentConfig) -> Result<ConfigRun> {
    let table = run_experiment(cfg)?;
    let report = analyze_experiment(&table, &cfg.analysis)?;
    Ok(ConfigRun {
        config: cfg.clone(),
        table,
        report,
    })
}

/// Runs and analyses every configuration. Failing configurations are
/// recorded and skipped; the sweep fails only when all of them fail.
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepOutcome> {
    grid.validate()?;
    let results: Vec<(ExperimentConfig, Result<ConfigRun>)> = grid
        .configs
        .par_iter()
        .map(|c| (c.clone(), run_config(c)))
        .collect();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (cfg, r) in results {
        match r {
            Ok(run) => runs.push(run),
            Err(e) => failures.push(ConfigFailure {
                label: cfg.label.clone(),
                family: cfg.family(),
                error: e.to_string(),
            }),
        }
    }
    if runs.is_empty() {
        return Err(Error::Data(format!(
            "every configuration failed; first error: {}",
            failures.first().map_or("none", |f| f.error.as_str())
        )));
    }
    Ok(SweepOutcome {
        significance: significance_counts(&runs),
        r_squared: r_squared_table(&runs),
        runs,
        failures,
    })
}

pub fn significance_counts(runs: &[ConfigRun]) -> SignificanceCountTable {
    let count_row = |variable: &str, hit: &dyn Fn(&ConfigRun) -> bool| {
        let mut row = SignificanceRow {
            variable: variable.to_string(),
            random: 0,
            small_world: 0,
            scale_free: 0,
        };
        for r in runs.iter().filter(|r| hit(r)) {
            match r.config.family() {
                Family::Random => row.random += 1,
                Family::SmallWorld => row.small_world += 1,
                Family::ScaleFree => row.scale_free += 1,
            }
        }
        row
    };
    let configurations = count_row("configurations", &|_| true);
    let rows = FEATURE_NAMES
        .iter()
        .map(|&v| {
            count_row(v, &|r: &ConfigRun| {
                let alpha = r.config.analysis.alpha_model;
                r.report
                    .full
                    .preferred
                    .coefficient(v)
                    .is_some_and(|c| c.p_value < alpha)
            })
        })
        .collect();
    SignificanceCountTable {
        configurations,
        rows,
    }
}

pub fn r_squared_table(runs: &[ConfigRun]) -> RSquaredTable {
    let rows = Family::ALL
        .iter()
        .filter_map(|&family| {
            let of_family: Vec<&ConfigRun> = runs
                .iter()
                .filter(|r| r.config.family() == family)
                .collect();
            if of_family.is_empty() {
                return None;
            }
            let full: Vec<f64> = of_family.iter().map(|r| r.report.r_squared_full).collect();
            let reduced: Vec<f64> = of_family
                .iter()
                .map(|r| r.report.r_squared_reduced)
                .collect();
            Some(RSquaredRow {
                family,
                configurations: of_family.len(),
                full: Spread::of(&full),
                reduced: Spread::of(&reduced),
            })
        })
        .collect();
    RSquaredTable { rows }
}

impl SweepOutcome {
    pub fn summary(&self) -> SweepSummary {
        SweepSummary {
            configurations: self
                .runs
                .iter()
                .map(|r| ConfigSummary {
                    label: r.config.label.clone(),
                    family: r.config.family(),
                    n_seeds: r.config.n_seeds,
                    rows: r.table.len(),
                    pi: PiSummary::of(&r.table),
                    preferred_full: r.report.preferred_variables(),
                    r_squared_full: r.report.r_squared_full,
                    r_squared_reduced: r.report.r_squared_reduced,
                })
                .collect(),
            failures: self.failures.clone(),
            significance: self.significance.clone(),
            r_squared: self.r_squared.clone(),
        }
    }
}

/// Row labels for the significance table, in display order.
pub const TABLE1_ROWS: [(&str, &str); 12] = [
    ("nbr_min_thr", "Min threshold of agents connected to seeds"),
    (
        "nbr_mean_thr",
        "Mean threshold of agents connected to seeds",
    ),
    ("nbr_max_thr", "Max threshold of agents connected to seeds"),
    ("below", "Agents connected to seeds below critical value"),
    ("seed_mean_deg", "Mean degree of seeds"),
    ("seed_max_deg", "Max degree of seeds"),
    ("nbr_min_deg", "Min degree of agents connected to seeds"),
    ("nbr_mean_deg", "Mean degree of agents connected to seeds"),
    ("nbr_max_deg", "Max degree of agents connected to seeds"),
    (
        "step1_min_thr",
        "Min threshold of agents next to step-1 switchers",
    ),
    (
        "step1_mean_thr",
        "Mean threshold of agents next to step-1 switchers",
    ),
    (
        "step1_max_thr",
        "Max threshold of agents next to step-1 switchers",
    ),
];

pub fn significance_text(table: &SignificanceCountTable) -> String {
    let mut out = String::new();
    let width = TABLE1_ROWS.iter().map(|(_, l)| l.len()).max().unwrap_or(0);
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}  {:>11}  {:>10}",
        "Variable", "Random", "Small world", "Scale free"
    );
    for (key, label) in TABLE1_ROWS {
        if let Some(r) = table.row(key) {
            let _ = writeln!(
                out,
                "{:<width$}  {:>8}  {:>11}  {:>10}",
                label, r.random, r.small_world, r.scale_free
            );
        }
    }
    let c = &table.configurations;
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}  {:>11}  {:>10}",
        "Configurations", c.random, c.small_world, c.scale_free
    );
    out
}

pub fn r_squared_text(table: &RSquaredTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12}  {:>26}  {:>26}",
        "", "full set of variables", "excluding once-removed"
    );
    let _ = writeln!(
        out,
        "{:<12}  {:>8}  {:>7}  {:>7}  {:>8}  {:>7}  {:>7}",
        "", "average", "min", "max", "average", "min", "max"
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{:<12}  {:>8.2}  {:>7.2}  {:>7.2}  {:>8.2}  {:>7.2}  {:>7.2}",
            r.family.display_name(),
            r.full.average,
            r.full.min,
            r.full.max,
            r.reduced.average,
            r.reduced.min,
            r.reduced.max
        );
    }
    out
}

/// Writes `<label>.csv` and `<label>.analysis.json` per configuration,
/// plus `sweep.json`, `table1.txt` and `table2.txt`.
pub fn write_sweep_outputs(outcome: &SweepOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for run in &outcome.runs {
        let csv = fs::File::create(dir.join(format!("{}.csv", run.config.label)))?;
        run.table.write_csv(std::io::BufWriter::new(csv))?;
        let json = serde_json::to_string_pretty(&run.report)?;
        fs::write(
            dir.join(format!("{}.analysis.json", run.config.label)),
            json + "\n",
        )?;
    }
    let summary = serde_json::to_string_pretty(&outcome.summary())?;
    fs::write(dir.join("sweep.json"), summary + "\n")?;
    fs::write(
        dir.join("table1.txt"),
        significance_text(&outcome.significance),
    )?;
    fs::write(dir.join("table2.txt"), r_squared_text(&outcome.r_squared))?;
    Ok(())
}
