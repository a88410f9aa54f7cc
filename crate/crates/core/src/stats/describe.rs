//! Descriptive helpers.

use crate::error::{Error, Result};

/// Linear-interpolation quantile of sorted data, `h = (n - 1) q`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// First and third quartiles.
pub fn quartiles(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 4 {
        return Err(Error::Data(format!(
            "quartiles need at least 4 observations, got {}",
            xs.len()
        )));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok((
        quantile_sorted(&sorted, 0.25),
        quantile_sorted(&sorted, 0.75),
    ))
}

/// Continuity-corrected log-odds of a cascade size: with `k = round(pi N)`
/// switched agents, `ln((k + 0.5) / (N - k + 0.5))`.
pub fn empirical_logit(pi: f64, n_agents: usize) -> f64 {
    let n = n_agents as f64;
    let k = (pi * n).round().clamp(0.0, n);
    ((k + 0.5) / (n - k + 0.5)).ln()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, 0.5)
}

/// Moment skewness `m3 / m2^{3/2}`; zero for constant data.
pub fn skewness(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mu).powi(3)).sum::<f64>() / n;
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartile_convention() {
        assert_eq!(
            quartiles(&[1., 2., 3., 4., 5., 6., 7., 8.]).unwrap(),
            (2.75, 6.25)
        );
        assert_eq!(quartiles(&[1., 2., 3., 4.]).unwrap(), (1.75, 3.25));
        assert_eq!(quartiles(&[3.5; 4]).unwrap(), (3.5, 3.5));
        assert!(quartiles(&[1., 2., 3.]).is_err());
    }

    #[test]
    fn logit_values() {
        assert_eq!(empirical_logit(0.5, 1000), 0.0);
        assert!((empirical_logit(1.0, 1000) - 2001f64.ln()).abs() < 1e-12);
        assert!((empirical_logit(0.005, 1000) - (5.5f64 / 995.5).ln()).abs() < 1e-12);
    }

    #[test]
    fn skewness_sign() {
        assert!(skewness(&[0., 0., 0., 1., 10.]) > 0.0);
        assert_eq!(skewness(&[2.0; 5]), 0.0);
    }
}
