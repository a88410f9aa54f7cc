//! End-to-end analysis of one run table.
//!
//! Screening runs once on all twelve variables. The regression stages then
//! run twice: on every screened-in variable, and on the same set without
//! the three once-removed variables.

use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_model, BootstrapReport};
use super::describe::empirical_logit;
use super::loess::{loess_screen, DEFAULT_SPAN, DEFAULT_THRESHOLD};
use super::ols::{backward_eliminate, ols_fit, Design, EliminationStep, RegressionModel};
use super::screening::{screen_variables, ScreeningReport, DEFAULT_ALPHA, MIN_ROWS};
use crate::error::{Error, Result};
use crate::features::{FEATURE_NAMES, ONCE_REMOVED};
use crate::rng::mix;
use crate::table::{RunRow, RunTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Keep rows with imputed features.
    #[default]
    Include,
    /// Drop rows where either missing flag is set.
    Drop,
}

impl MissingPolicy {
    fn other(self) -> Self {
        match self {
            MissingPolicy::Include => MissingPolicy::Drop,
            MissingPolicy::Drop => MissingPolicy::Include,
        }
    }

    fn keeps(self, row: &RunRow) -> bool {
        self == MissingPolicy::Include || !row.features.any_missing()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisOptions {
    pub alpha_screen: f64,
    pub alpha_model: f64,
    pub bootstrap: usize,
    pub span: f64,
    pub loess_threshold: f64,
    pub missing: MissingPolicy,
    /// Master seed for bootstrap resamples and permutation tests.
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            alpha_screen: DEFAULT_ALPHA,
            alpha_model: 0.05,
            bootstrap: 1000,
            span: DEFAULT_SPAN,
            loess_threshold: DEFAULT_THRESHOLD,
            missing: MissingPolicy::Include,
            seed: 0x5eed,
        }
    }
}

impl AnalysisOptions {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("alpha_screen", self.alpha_screen),
            ("alpha_model", self.alpha_model),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::parameter(
                    field,
                    format!("must lie in (0, 1), got {v}"),
                ));
            }
        }
        if self.bootstrap == 0 {
            return Err(Error::parameter("bootstrap", "must be at least 1"));
        }
        if !(self.span > 0.0 && self.span <= 1.0) {
            return Err(Error::parameter(
                "span",
                format!("must lie in (0, 1], got {}", self.span),
            ));
        }
        if self.loess_threshold.is_nan() || self.loess_threshold < 0.0 {
            return Err(Error::parameter("loess_threshold", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoessFlag {
    pub variable: String,
    pub score: f64,
    pub nonlinear: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSetAnalysis {
    /// Screened-in variables offered to the regression.
    pub candidates: Vec<String>,
    /// Candidates removed before fitting because they were collinear with
    /// earlier columns.
    pub collinear_dropped: Vec<String>,
    /// Fit on all remaining candidates.
    pub screened_fit: RegressionModel,
    pub elimination_trace: Vec<EliminationStep>,
    /// The preferred equation.
    pub preferred: RegressionModel,
    pub intercept_only: bool,
    pub bootstrap: BootstrapReport,
    /// Nonlinearity screen of each preferred-model variable against the
    /// preferred model's residuals.
    pub loess: Vec<LoessFlag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub missing: MissingPolicy,
    pub n_used: usize,
    pub kept: Vec<String>,
    pub preferred_full: Vec<String>,
    pub r_squared_full: f64,
    pub preferred_reduced: Vec<String>,
    pub r_squared_reduced: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config_label: String,
    pub n_rows: usize,
    pub n_used: usize,
    pub options: AnalysisOptions,
    pub screening: ScreeningReport,
    pub full: VariableSetAnalysis,
    /// Same pipeline without the once-removed variables.
    pub reduced: VariableSetAnalysis,
    /// Preferred-model R² with all variables.
    pub r_squared_full: f64,
    /// Preferred-model R² without the once-removed variables.
    pub r_squared_reduced: f64,
    /// Screening and elimination repeated under the other missing-row
    /// policy; `None` when that policy leaves too few rows.
    pub alternate: Option<PolicySummary>,
}

impl AnalysisReport {
    /// Variables in the preferred full-set model.
    pub fn preferred_variables(&self) -> Vec<String> {
        self.full.preferred.variables()
    }
}

struct Prepared {
    design: Design,
    pi: Vec<f64>,
    y: Vec<f64>,
}

fn prepare(table: &RunTable, policy: MissingPolicy) -> Result<Prepared> {
    let rows: Vec<&RunRow> = table.rows.iter().filter(|r| policy.keeps(r)).collect();
    if rows.len() < MIN_ROWS {
        return Err(Error::Data(format!(
            "fewer than {MIN_ROWS} usable rows ({} of {})",
            rows.len(),
            table.rows.len()
        )));
    }
    let mut design = Design::new(rows.len());
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        design.push(*name, rows.iter().map(|r| r.features.values()[j]).collect())?;
    }
    let pi: Vec<f64> = rows.iter().map(|r| r.pi).collect();
    let y = pi
        .iter()
        .map(|&p| empirical_logit(p, table.n_agents))
        .collect();
    Ok(Prepared { design, pi, y })
}

fn reduced_set(kept: &[String]) -> Vec<String> {
    kept.iter()
        .filter(|v| !ONCE_REMOVED.contains(&v.as_str()))
        .cloned()
        .collect()
}

// Removes collinear columns until the design has full rank.
fn full_rank(mut design: Design, y: &[f64]) -> Result<(Design, Vec<String>)> {
    let mut dropped = Vec::new();
    loop {
        match ols_fit(&design, y) {
            Ok(_) => return Ok((design, dropped)),
            Err(Error::RankDeficient { columns }) => {
                let removable: Vec<String> = columns
                    .into_iter()
                    .filter(|c| design.names().contains(c))
                    .collect();
                if removable.is_empty() {
                    return Err(Error::Data("intercept column is degenerate".into()));
                }
                for c in &removable {
                    design = design.without(c);
                }
                dropped.extend(removable);
            }
            Err(e) => return Err(e),
        }
    }
}

fn analyze_set(
    design: Design,
    y: &[f64],
    opts: &AnalysisOptions,
    seed: u64,
) -> Result<VariableSetAnalysis> {
    let candidates = design.names().to_vec();
    let (design, collinear_dropped) = full_rank(design, y)?;
    let elimination = backward_eliminate(&design, y, opts.alpha_model)?;
    let retained = elimination.model.variables();
    let preferred_design = design.select(&retained)?;
    let bootstrap = bootstrap_model(&preferred_design, y, opts.bootstrap, seed)?;
    let residuals = elimination.model.residuals(&preferred_design, y);
    let loess = retained
        .iter()
        .map(|v| {
            let x = preferred_design
                .column(v)
                .expect("retained variable is in the design");
            let r = loess_screen(x, &residuals, opts.span, opts.loess_threshold)?;
            Ok(LoessFlag {
                variable: v.clone(),
                score: r.score,
                nonlinear: r.nonlinear,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VariableSetAnalysis {
        candidates,
        collinear_dropped,
        screened_fit: elimination.initial,
        elimination_trace: elimination.trace,
        intercept_only: elimination.intercept_only,
        preferred: elimination.model,
        bootstrap,
        loess,
    })
}

// Screening plus elimination only, for the secondary missing-row policy.
fn summarize_policy(
    table: &RunTable,
    policy: MissingPolicy,
    opts: &AnalysisOptions,
) -> Result<PolicySummary> {
    let prep = prepare(table, policy)?;
    let screening = screen_variables(&prep.design, &prep.pi, opts.alpha_screen, mix(opts.seed, 0))?;
    let kept = screening.kept();
    let fit = |vars: &[String]| -> Result<RegressionModel> {
        let (d, _) = full_rank(prep.design.select(vars)?, &prep.y)?;
        Ok(backward_eliminate(&d, &prep.y, opts.alpha_model)?.model)
    };
    let full = fit(&kept)?;
    let reduced = fit(&reduced_set(&kept))?;
    Ok(PolicySummary {
        missing: policy,
        n_used: prep.y.len(),
        kept,
        preferred_full: full.variables(),
        r_squared_full: full.r_squared,
        preferred_reduced: reduced.variables(),
        r_squared_reduced: reduced.r_squared,
    })
}

/// Screening, least squares on the empirical logit, backward elimination,
/// bootstrap and LOESS screening, for the full and reduced variable sets.
pub fn analyze(table: &RunTable, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    opts.validate()?;
    let prep = prepare(table, opts.missing)?;
    let screening = screen_variables(&prep.design, &prep.pi, opts.alpha_screen, mix(opts.seed, 0))?;
    let kept = screening.kept();
    let full = analyze_set(prep.design.select(&kept)?, &prep.y, opts, mix(opts.seed, 1))?;
    let reduced = analyze_set(
        prep.design.select(&reduced_set(&kept))?,
        &prep.y,
        opts,
        mix(opts.seed, 2),
    )?;
    let alternate = match summarize_policy(table, opts.missing.other(), opts) {
        Ok(s) => Some(s),
        Err(Error::Data(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(AnalysisReport {
        config_label: table.config_label.clone(),
        n_rows: table.rows.len(),
        n_used: prep.y.len(),
        options: *opts,
        r_squared_full: full.preferred.r_squared,
        r_squared_reduced: reduced.preferred.r_squared,
        screening,
        full,
        reduced,
        alternate,
    })
}
