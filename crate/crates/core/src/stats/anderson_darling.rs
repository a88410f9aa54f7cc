//! Two-sample Anderson–Darling test in the k-sample form of Scholz and
//! Stephens, using the midrank statistic `A2akN` so that tied observations
//! are handled exactly.

use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum size of each sample.
pub const MIN_SAMPLE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Asymptotic,
    Permutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdResult {
    /// Midrank statistic `A2akN`.
    pub statistic: f64,
    /// `(A2akN - (k - 1)) / sigma_N`; 0 for degenerate input.
    pub standardized: f64,
    pub p_value: f64,
    /// Every observation in both samples has the same value.
    pub degenerate: bool,
    pub method: PValueMethod,
}

// Midrank statistic for k samples. Returns None when all values coincide.
fn midrank_statistic(samples: &[&[f64]]) -> Option<f64> {
    let mut pooled: Vec<(f64, usize)> = samples
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.iter().map(move |&x| (x, i)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let big_n = pooled.len() as f64;
    let k = samples.len();
    let sizes: Vec<f64> = samples.iter().map(|s| s.len() as f64).collect();

    let mut less_pooled = 0usize;
    let mut less_by_sample = vec![0usize; k];
    let mut equal_by_sample = vec![0usize; k];
    let mut sums = vec![0.0f64; k];
    let mut start = 0;
    let mut distinct = 0;
    while start < pooled.len() {
        let value = pooled[start].0;
        let mut end = start;
        equal_by_sample.iter_mut().for_each(|c| *c = 0);
        while end < pooled.len() && pooled[end].0 == value {
            equal_by_sample[pooled[end].1] += 1;
            end += 1;
        }
        distinct += 1;
        let tie = (end - start) as f64;
        let b = less_pooled as f64 + tie / 2.0;
        let denom = b * (big_n - b) - big_n * tie / 4.0;
        if denom > 0.0 {
            for i in 0..k {
                let m = less_by_sample[i] as f64 + equal_by_sample[i] as f64 / 2.0;
                sums[i] += tie / big_n * (big_n * m - b * sizes[i]).powi(2) / denom;
            }
        }
        for i in 0..k {
            less_by_sample[i] += equal_by_sample[i];
        }
        less_pooled = end;
        start = end;
    }
    if distinct < 2 {
        return None;
    }
    let total: f64 = sums.iter().zip(&sizes).map(|(s, n)| s / n).sum();
    Some(total * (big_n - 1.0) / big_n)
}

// Null variance of A2kN for k samples of the given sizes.
fn null_variance(sizes: &[usize]) -> f64 {
    let n = sizes.iter().sum::<usize>();
    let nf = n as f64;
    let k = sizes.len() as f64;
    let big_h: f64 = sizes.iter().map(|&s| 1.0 / s as f64).sum();
    let h: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
    // g = sum_{i=1}^{N-2} sum_{j=i+1}^{N-1} 1 / ((N - i) j)
    let mut g = 0.0;
    let mut tail = 0.0; // sum_{j=i+1}^{N-1} 1/j, built from i = N-2 downward
    for i in (1..n.saturating_sub(1)).rev() {
        tail += 1.0 / (i + 1) as f64;
        g += tail / (n - i) as f64;
    }
    let a = (4.0 * g - 6.0) * (k - 1.0) + (10.0 - 6.0 * g) * big_h;
    let b = (2.0 * g - 4.0) * k * k + 8.0 * h * k + (2.0 * g - 14.0 * h - 4.0) * big_h - 8.0 * h
        + 4.0 * g
        - 6.0;
    let c = (6.0 * h + 2.0 * g - 2.0) * k * k
        + (4.0 * h - 4.0 * g + 6.0) * k
        + (2.0 * h - 6.0) * big_h
        + 4.0 * h;
    let d = (2.0 * h + 6.0) * k * k - 4.0 * h * k;
    (a * nf.powi(3) + b * nf * nf + c * nf + d) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0))
}

// Upper-tail critical values of the standardized statistic for k - 1 = 1,
// from the Scholz–Stephens interpolation table.
const SIGNIFICANCE: [f64; 7] = [0.25, 0.1, 0.05, 0.025, 0.01, 0.005, 0.001];
const B0: [f64; 7] = [0.675, 1.281, 1.645, 1.96, 2.326, 2.573, 3.085];
const B1: [f64; 7] = [-0.245, 0.25, 0.678, 1.149, 1.822, 2.364, 3.615];
const B2: [f64; 7] = [-0.105, -0.305, -0.362, -0.391, -0.396, -0.345, -0.154];

struct Interpolation {
    critical: [f64; 7],
    // ln p = c0 + c1 t + c2 t^2
    coef: [f64; 3],
}

fn interpolation() -> &'static Interpolation {
    static TABLE: OnceLock<Interpolation> = OnceLock::new();
    TABLE.get_or_init(|| {
        let m = 1.0f64;
        let mut critical = [0.0; 7];
        for i in 0..7 {
            critical[i] = B0[i] + B1[i] / m.sqrt() + B2[i] / m;
        }
        let mut xtx = Matrix3::zeros();
        let mut xty = Vector3::zeros();
        for i in 0..7 {
            let row = Vector3::new(1.0, critical[i], critical[i] * critical[i]);
            xtx += row * row.transpose();
            xty += row * SIGNIFICANCE[i].ln();
        }
        let sol = xtx
            .lu()
            .solve(&xty)
            .expect("interpolation design is full rank");
        Interpolation {
            critical,
            coef: [sol[0], sol[1], sol[2]],
        }
    })
}

/// Asymptotic upper-tail p-value of the standardized statistic for two
/// samples. Inside the tabulated range this is the quadratic fit of
/// `ln p` on the critical values; above it the fit is continued along its
/// tangent, which keeps the p-value decreasing.
pub fn asymptotic_p_value(standardized: f64) -> f64 {
    let t = interpolation();
    let [c0, c1, c2] = t.coef;
    let top = t.critical[6];
    let log_p = if standardized <= top {
        c0 + c1 * standardized + c2 * standardized * standardized
    } else {
        let at_top = c0 + c1 * top + c2 * top * top;
        let slope = c1 + 2.0 * c2 * top;
        at_top + slope * (standardized - top)
    };
    log_p.exp().clamp(0.0, 1.0)
}

fn check_sizes(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() < MIN_SAMPLE || ys.len() < MIN_SAMPLE {
        return Err(Error::Data(format!(
            "Anderson-Darling needs at least {MIN_SAMPLE} observations per sample, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Data(
            "Anderson-Darling input contains non-finite values".into(),
        ));
    }
    Ok(())
}

fn standardize(statistic: f64, n1: usize, n2: usize) -> f64 {
    (statistic - 1.0) / null_variance(&[n1, n2]).sqrt()
}

fn degenerate_result(method: PValueMethod) -> AdResult {
    AdResult {
        statistic: 0.0,
        standardized: 0.0,
        p_value: 1.0,
        degenerate: true,
        method,
    }
}

/// Two-sample test with the asymptotic p-value.
pub fn ad_two_sample(xs: &[f64], ys: &[f64]) -> Result<AdResult> {
    check_sizes(xs, ys)?;
    let Some(statistic) = midrank_statistic(&[xs, ys]) else {
        return Ok(degenerate_result(PValueMethod::Asymptotic));
    };
    let standardized = standardize(statistic, xs.len(), ys.len());
    Ok(AdResult {
        statistic,
        standardized,
        p_value: asymptotic_p_value(standardized),
        degenerate: false,
        method: PValueMethod::Asymptotic,
    })
}

/// Two-sample test with a permutation p-value `(1 + #{A* >= A}) / (n + 1)`
/// over `n_permutations` relabellings of the pooled sample.
pub fn ad_permutation_test<R: Rng + ?Sized>(
    xs: &[f64],
    ys: &[f64],
    n_permutations: usize,
    rng: &mut R,
) -> Result<AdResult> {
    check_sizes(xs, ys)?;
    let Some(statistic) = midrank_statistic(&[xs, ys]) else {
        return Ok(degenerate_result(PValueMethod::Permutation));
    };
    let mut pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let n1 = xs.len();
    // relative slack so that permutations reproducing the observed split
    // count as ties despite summation order
    let cutoff = statistic * (1.0 - 1e-12);
    let mut at_least = 0usize;
    for _ in 0..n_permutations {
        pooled.shuffle(rng);
        let (a, b) = pooled.split_at(n1);
        if midrank_statistic(&[a, b]).is_some_and(|s| s >= cutoff) {
            at_least += 1;
        }
    }
    Ok(AdResult {
        statistic,
        standardized: standardize(statistic, xs.len(), ys.len()),
        p_value: (1 + at_least) as f64 / (n_permutations + 1) as f64,
        degenerate: false,
        method: PValueMethod::Permutation,
    })
}
