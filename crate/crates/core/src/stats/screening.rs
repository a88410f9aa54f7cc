//! Univariate screening: for each candidate variable, compare the cascade
//! sizes of solutions below the variable's first quartile with those above
//! its third quartile.

use serde::{Deserialize, Serialize};

use super::anderson_darling::{ad_permutation_test, ad_two_sample, PValueMethod, MIN_SAMPLE};
use super::describe::quartiles;
use super::ols::Design;
use crate::error::{Error, Result};
use crate::rng::stream;

pub const DEFAULT_ALPHA: f64 = 0.10;
pub const MIN_ROWS: usize = 40;
/// Below this combined group size the p-value comes from permutations.
pub const PERMUTATION_BELOW: usize = 100;
pub const N_PERMUTATIONS: usize = 999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenStatus {
    Tested,
    /// The variable does not vary.
    ZeroVariance,
    /// A quartile group has fewer than the minimum number of rows, which
    /// happens for heavily tied variables.
    SmallGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenedVariable {
    pub name: String,
    pub q1: f64,
    pub q3: f64,
    pub n_low: usize,
    pub n_high: usize,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub method: Option<PValueMethod>,
    pub status: ScreenStatus,
    pub kept: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningReport {
    pub alpha: f64,
    pub variables: Vec<ScreenedVariable>,
}

impl ScreeningReport {
    pub fn kept(&self) -> Vec<String> {
        self.variables
            .iter()
            .filter(|v| v.kept)
            .map(|v| v.name.clone())
            .collect()
    }
}

/// Screens every column of `design` against the cascade sizes `pi`,
/// keeping a variable iff the Anderson–Darling p-value is below `alpha`.
/// `seed` drives the permutation fallback.
pub fn screen_variables(
    design: &Design,
    pi: &[f64],
    alpha: f64,
    seed: u64,
) -> Result<ScreeningReport> {
    let n = design.n_obs();
    if n < MIN_ROWS {
        return Err(Error::Data(format!(
            "screening needs at least {MIN_ROWS} rows, got {n}"
        )));
    }
    if pi.len() != n {
        return Err(Error::Data(format!(
            "{} cascade sizes for {n} rows",
            pi.len()
        )));
    }
    let variables = design
        .names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col = design.column(name).expect("name comes from the design");
            screen_one(name, col, pi, alpha, seed, j as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScreeningReport { alpha, variables })
}

fn screen_one(
    name: &str,
    col: &[f64],
    pi: &[f64],
    alpha: f64,
    seed: u64,
    index: u64,
) -> Result<ScreenedVariable> {
    let (q1, q3) = quartiles(col)?;
    let low: Vec<f64> = col
        .iter()
        .zip(pi)
        .filter(|(v, _)| **v < q1)
        .map(|(_, p)| *p)
        .collect();
    let high: Vec<f64> = col
        .iter()
        .zip(pi)
        .filter(|(v, _)| **v > q3)
        .map(|(_, p)| *p)
        .collect();
    let mut out = ScreenedVariable {
        name: name.to_string(),
        q1,
        q3,
        n_low: low.len(),
        n_high: high.len(),
        statistic: None,
        p_value: None,
        method: None,
        status: ScreenStatus::Tested,
        kept: false,
    };
    let first = col[0];
    if col.iter().all(|&v| v == first) {
        out.status = ScreenStatus::ZeroVariance;
        return Ok(out);
    }
    if low.len() < MIN_SAMPLE || high.len() < MIN_SAMPLE {
        out.status = ScreenStatus::SmallGroup;
        return Ok(out);
    }
    let result = if low.len() + high.len() < PERMUTATION_BELOW {
        ad_permutation_test(&low, &high, N_PERMUTATIONS, &mut stream(seed, index))?
    } else {
        ad_two_sample(&low, &high)?
    };
    out.statistic = Some(result.standardized);
    out.p_value = Some(result.p_value);
    out.method = Some(result.method);
    out.kept = result.p_value < alpha;
    Ok(out)
}
