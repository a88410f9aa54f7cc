//! Degree-1 LOESS with tricube weights, used to screen a regressor for a
//! nonlinear relation with the response (or with regression residuals).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 20;
pub const DEFAULT_SPAN: f64 = 0.75;
pub const DEFAULT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoessReport {
    pub span: f64,
    /// Smoothed values at each input point, in input order.
    pub fitted: Vec<f64>,
    /// `1 - SSR(loess) / SSR(straight line)`.
    pub score: f64,
    pub nonlinear: bool,
}

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

/// Local linear smooth of `y` on `x` at every observed `x`, each fit using
/// the `ceil(span * n)` nearest neighbours.
pub fn loess_fit(x: &[f64], y: &[f64], span: f64) -> Result<Vec<f64>> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::Data(format!(
            "{} x values but {} y values",
            n,
            y.len()
        )));
    }
    if !(span > 0.0 && span <= 1.0) {
        return Err(Error::parameter(
            "span",
            format!("must lie in (0, 1], got {span}"),
        ));
    }
    let q = ((span * n as f64).ceil() as usize).min(n);
    if q < 3 {
        return Err(Error::parameter(
            "span",
            format!("{span} leaves {q} points per local fit; need at least 3"),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();

    let mut fitted_sorted = vec![0.0; n];
    let mut lo = 0;
    for i in 0..n {
        let xi = xs[i];
        // slide the q-window right while that brings it closer to xi
        while lo + q < n && xi - xs[lo] > xs[lo + q] - xi {
            lo += 1;
        }
        let hi = lo + q;
        let h = (xi - xs[lo]).max(xs[hi - 1] - xi);
        fitted_sorted[i] = if h <= 0.0 {
            let same: Vec<f64> = (0..n).filter(|&j| xs[j] == xi).map(|j| ys[j]).collect();
            same.iter().sum::<f64>() / same.len() as f64
        } else {
            local_linear(&xs[lo..hi], &ys[lo..hi], xi, h)
        };
    }

    let mut fitted = vec![0.0; n];
    for (pos, &i) in order.iter().enumerate() {
        fitted[i] = fitted_sorted[pos];
    }
    Ok(fitted)
}

fn local_linear(xs: &[f64], ys: &[f64], at: f64, h: f64) -> f64 {
    let (mut s0, mut s1, mut s2, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let d = x - at;
        let w = tricube(d.abs() / h);
        s0 += w;
        s1 += w * d;
        s2 += w * d * d;
        t0 += w * y;
        t1 += w * d * y;
    }
    let det = s0 * s2 - s1 * s1;
    if det <= 1e-12 * s0 * s2 || s0 == 0.0 {
        // a single distinct x carries all the weight: local constant
        if s0 > 0.0 {
            t0 / s0
        } else {
            ys.iter().sum::<f64>() / ys.len() as f64
        }
    } else {
        (s2 * t0 - s1 * t1) / det
    }
}

fn linear_ssr(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    x.iter()
        .zip(y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum()
}

/// Fits LOESS and a straight line to `(x, y)` and flags the relation as
/// nonlinear when LOESS removes more than `threshold` of the line's
/// residual sum of squares.
pub fn loess_screen(x: &[f64], y: &[f64], span: f64, threshold: f64) -> Result<LoessReport> {
    if x.len() < MIN_POINTS {
        return Err(Error::Data(format!(
            "LOESS screening needs at least {MIN_POINTS} points, got {}",
            x.len()
        )));
    }
    let fitted = loess_fit(x, y, span)?;
    let ssr_loess: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let ssr_line = linear_ssr(x, y);
    let scale: f64 = y.iter().map(|v| v * v).sum::<f64>();
    let score = if ssr_line <= 1e-20 * scale.max(f64::MIN_POSITIVE) {
        0.0
    } else {
        1.0 - ssr_loess / ssr_line
    };
    Ok(LoessReport {
        span,
        fitted,
        score,
        nonlinear: score > threshold,
    })
}
