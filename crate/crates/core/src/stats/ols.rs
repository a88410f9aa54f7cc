//! Ordinary least squares with classical inference, and backward
//! elimination on coefficient p-values.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub const INTERCEPT: &str = "(intercept)";

// |r_jj| below this fraction of the column norm marks a collinear column
const RANK_TOL: f64 = 1e-9;

/// Named regressor columns. The intercept is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n_obs: usize,
}

impl Design {
    pub fn new(n_obs: usize) -> Self {
        Design {
            names: Vec::new(),
            columns: Vec::new(),
            n_obs,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, column: Vec<f64>) -> Result<()> {
        let name = name.into();
        if column.len() != self.n_obs {
            return Err(Error::Data(format!(
                "column `{name}` has {} values, expected {}",
                column.len(),
                self.n_obs
            )));
        }
        self.names.push(name);
        self.columns.push(column);
        Ok(())
    }

    pub fn with_column(mut self, name: impl Into<String>, column: Vec<f64>) -> Result<Self> {
        self.push(name, column)?;
        Ok(self)
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    /// Subset of columns, in the order given.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Design> {
        let mut out = Design::new(self.n_obs);
        for name in names {
            let name = name.as_ref();
            let col = self
                .column(name)
                .ok_or_else(|| Error::Data(format!("unknown column `{name}`")))?;
            out.push(name, col.to_vec())?;
        }
        Ok(out)
    }

    pub fn without(&self, name: &str) -> Design {
        let mut out = Design::new(self.n_obs);
        for (n, c) in self.names.iter().zip(&self.columns) {
            if n != name {
                out.names.push(n.clone());
                out.columns.push(c.clone());
            }
        }
        out
    }

    /// Rows picked by index (with repetition allowed).
    pub fn rows(&self, indices: &[usize]) -> Design {
        Design {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| indices.iter().map(|&i| c[i]).collect())
                .collect(),
            n_obs: indices.len(),
        }
    }

    /// `n x (p + 1)` matrix with a leading column of ones.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_obs, self.columns.len() + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                self.columns[j - 1][i]
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    /// Intercept first, then regressors in design order.
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub residual_std_error: f64,
    pub df_resid: usize,
    pub n_obs: usize,
}

impl RegressionModel {
    /// Regressor names, intercept excluded.
    pub fn variables(&self) -> Vec<String> {
        self.coefficients[1..]
            .iter()
            .map(|c| c.name.clone())
            .collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }

    pub fn is_intercept_only(&self) -> bool {
        self.coefficients.len() == 1
    }

    /// Residuals `y - X beta` on a design with the same columns.
    pub fn residuals(&self, design: &Design, y: &[f64]) -> Vec<f64> {
        let beta = DVector::from_vec(self.estimates());
        let fitted = design.matrix() * beta;
        y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect()
    }
}

/// Least-squares coefficients via Householder QR, without inference.
/// Fails with the names of collinear columns when the design is rank
/// deficient.
pub fn ols_coefficients(design: &Design, y: &[f64]) -> Result<Vec<f64>> {
    Ok(decompose(design, y)?.beta.iter().copied().collect())
}

struct Decomposition {
    beta: DVector<f64>,
    r: DMatrix<f64>,
    ssr: f64,
}

fn decompose(design: &Design, y: &[f64]) -> Result<Decomposition> {
    let n = design.n_obs();
    let p = design.names().len() + 1;
    if y.len() != n {
        return Err(Error::Data(format!(
            "{} responses for {n} observations",
            y.len()
        )));
    }
    if n < p {
        return Err(Error::Data(format!(
            "{n} observations cannot identify {p} coefficients"
        )));
    }
    let x = design.matrix();
    let qr = x.clone().qr();
    let r = qr.r();
    let collinear: Vec<String> = (0..p)
        .filter(|&j| {
            let norm = x.column(j).norm();
            norm == 0.0 || r[(j, j)].abs() <= RANK_TOL * norm
        })
        .map(|j| {
            if j == 0 {
                INTERCEPT.to_string()
            } else {
                design.names()[j - 1].clone()
            }
        })
        .collect();
    if !collinear.is_empty() {
        return Err(Error::RankDeficient { columns: collinear });
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient { columns: vec![] })?;
    let resid = &yv - &x * &beta;
    Ok(Decomposition {
        beta,
        r,
        ssr: resid.norm_squared(),
    })
}

/// Least squares with an intercept. Standard errors use the unbiased
/// residual variance; p-values are two-sided Student t with `n - p`
/// degrees of freedom.
pub fn ols_fit(design: &Design, y: &[f64]) -> Result<RegressionModel> {
    let n = design.n_obs();
    let p = design.names().len() + 1;
    if n <= p {
        return Err(Error::Data(format!(
            "{n} observations are too few for {} regressors",
            p - 1
        )));
    }
    let Decomposition { beta, r, ssr } = decompose(design, y)?;
    let df = n - p;
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    let y_scale = y
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);

    // exact fits leave only rounding noise in the residuals
    let exact = ssr.sqrt() <= 1e-12 * y_scale;
    let sigma = if exact { 0.0 } else { (ssr / df as f64).sqrt() };
    let r_squared = if sst <= 1e-24 * y_scale * y_scale {
        0.0
    } else if exact {
        1.0
    } else {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    };

    let identity = DMatrix::<f64>::identity(p, p);
    let r_inv = r
        .solve_upper_triangular(&identity)
        .ok_or_else(|| Error::RankDeficient { columns: vec![] })?;
    let t_dist = StudentsT::new(0.0, 1.0, df as f64).map_err(|e| Error::Data(e.to_string()))?;
    let x = design.matrix();

    let coefficients = (0..p)
        .map(|j| {
            // row j of R^{-1} gives var(beta_j) = sigma^2 * |row|^2
            let se = sigma * r_inv.row(j).norm();
            let estimate = beta[j];
            let (t_stat, p_value) = if se > 0.0 {
                let t = estimate / se;
                (t, (2.0 * t_dist.sf(t.abs())).min(1.0))
            } else {
                let negligible = estimate.abs() * x.column(j).norm() <= 1e-10 * y_scale;
                if negligible {
                    (0.0, 1.0)
                } else {
                    (estimate.signum() * f64::INFINITY, 0.0)
                }
            };
            Coefficient {
                name: if j == 0 {
                    INTERCEPT.to_string()
                } else {
                    design.names()[j - 1].clone()
                },
                estimate,
                std_error: se,
                t_stat,
                p_value,
            }
        })
        .collect();

    Ok(RegressionModel {
        coefficients,
        r_squared,
        residual_std_error: sigma,
        df_resid: df,
        n_obs: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationStep {
    pub dropped: String,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Elimination {
    /// Fit on every supplied regressor.
    pub initial: RegressionModel,
    /// The preferred equation.
    pub model: RegressionModel,
    pub trace: Vec<EliminationStep>,
    pub intercept_only: bool,
}

// Index (into coefficients) of the regressor to drop next, if any: the
// largest p-value, provided it exceeds alpha. Ties go to the earlier column.
fn next_to_drop(model: &RegressionModel, alpha: f64) -> Option<usize> {
    let mut worst: Option<(usize, f64)> = None;
    for (j, c) in model.coefficients.iter().enumerate().skip(1) {
        if worst.is_none_or(|(_, p)| c.p_value > p) {
            worst = Some((j, c.p_value));
        }
    }
    worst.filter(|&(_, p)| p > alpha).map(|(j, _)| j)
}

/// Drops the single least significant regressor and refits, repeatedly,
/// until every remaining regressor has `p <= alpha`. The intercept always
/// stays.
pub fn backward_eliminate(design: &Design, y: &[f64], alpha: f64) -> Result<Elimination> {
    let initial = ols_fit(design, y)?;
    let mut current = design.clone();
    let mut model = initial.clone();
    let mut trace = Vec::new();
    while let Some(j) = next_to_drop(&model, alpha) {
        let worst = &model.coefficients[j];
        trace.push(EliminationStep {
            dropped: worst.name.clone(),
            p_value: worst.p_value,
        });
        current = current.without(&worst.name);
        model = ols_fit(&current, y)?;
    }
    Ok(Elimination {
        intercept_only: model.is_intercept_only(),
        initial,
        model,
        trace,
    })
}
