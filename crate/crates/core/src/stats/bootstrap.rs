//! Case-resampling bootstrap of a fitted regression.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ols::{ols_coefficients, ols_fit, Design};
use crate::error::{Error, Result};
use crate::rng::stream;

// a resample that stays rank deficient this many times aborts the bootstrap
const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCoefficient {
    pub name: String,
    pub estimate: f64,
    pub analytic_std_error: f64,
    pub bootstrap_mean: f64,
    pub bootstrap_std: f64,
    /// `(bootstrap_mean - estimate) / |estimate|`; `None` when the point
    /// estimate is exactly zero.
    pub relative_bias: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub resamples: usize,
    /// Resamples that had to be redrawn because their design was rank
    /// deficient.
    pub redrawn: usize,
    pub coefficients: Vec<BootstrapCoefficient>,
    /// Coefficients of each resample, `replicates[b][j]`.
    #[serde(skip)]
    pub replicates: Vec<Vec<f64>>,
}

/// Refits `design` on `resamples` row resamples drawn with replacement.
/// Resample `b` uses stream `b` under `seed`, so the report does not depend
/// on the thread count.
pub fn bootstrap_model(
    design: &Design,
    y: &[f64],
    resamples: usize,
    seed: u64,
) -> Result<BootstrapReport> {
    if resamples == 0 {
        return Err(Error::parameter("bootstrap", "need at least one resample"));
    }
    let point = ols_fit(design, y)?;
    let n = design.n_obs();

    let draws: Vec<Result<(Vec<f64>, usize)>> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let mut redrawn = 0;
            loop {
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
                match ols_coefficients(&design.rows(&idx), &ys) {
                    Ok(beta) => return Ok((beta, redrawn)),
                    Err(Error::RankDeficient { .. }) if redrawn < MAX_REDRAWS => redrawn += 1,
                    Err(e) => return Err(e),
                }
            }
        })
        .collect();

    let mut replicates = Vec::with_capacity(resamples);
    let mut redrawn = 0;
    for d in draws {
        let (beta, r) = d?;
        replicates.push(beta);
        redrawn += r;
    }

    let coefficients = point
        .coefficients
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let values: Vec<f64> = replicates.iter().map(|r| r[j]).collect();
            let mean = values.iter().sum::<f64>() / resamples as f64;
            let std = if resamples > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64)
                    .sqrt()
            } else {
                0.0
            };
            BootstrapCoefficient {
                name: c.name.clone(),
                estimate: c.estimate,
                analytic_std_error: c.std_error,
                bootstrap_mean: mean,
                bootstrap_std: std,
                relative_bias: (c.estimate != 0.0).then(|| (mean - c.estimate) / c.estimate.abs()),
            }
        })
        .collect();

    Ok(BootstrapReport {
        resamples,
        redrawn,
        coefficients,
        replicates,
    })
}
