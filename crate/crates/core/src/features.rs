//! Ex-ante explanatory variables for one solution.
//!
//! All twelve variables use only the network, the thresholds, the seeds and
//! the identity of the agents that switched in the first step.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cascade::{CascadeResult, SeedSet, ThresholdAssignment};
use crate::error::{Error, Result};
use crate::graph::{Graph, NetworkKind, NetworkSpec};

/// Stable column identifiers, in table order.
pub const FEATURE_NAMES: [&str; 12] = [
    "seed_mean_deg",
    "seed_max_deg",
    "nbr_min_deg",
    "nbr_mean_deg",
    "nbr_max_deg",
    "nbr_min_thr",
    "nbr_mean_thr",
    "nbr_max_thr",
    "below",
    "step1_min_thr",
    "step1_mean_thr",
    "step1_max_thr",
];

/// Columns describing agents adjacent to the first-step switchers.
pub const ONCE_REMOVED: [&str; 3] = ["step1_min_thr", "step1_mean_thr", "step1_max_thr"];

pub const FLAG_NAMES: [&str; 2] = ["nbr_missing", "step1_missing"];

/// Value imputed for threshold statistics over an empty agent set: the
/// unconditional threshold mean.
pub const IMPUTED_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub seed_mean_degree: f64,
    pub seed_max_degree: usize,
    pub nbr_min_degree: f64,
    pub nbr_mean_degree: f64,
    pub nbr_max_degree: f64,
    pub nbr_min_threshold: f64,
    pub nbr_mean_threshold: f64,
    pub nbr_max_threshold: f64,
    pub below_count: usize,
    pub step1_min_threshold: f64,
    pub step1_mean_threshold: f64,
    pub step1_max_threshold: f64,
    /// The seeds have no non-seed neighbours; `nbr_*` fields are imputed.
    pub nbr_missing: bool,
    /// Nobody switched in step 1, or the switchers have no eligible
    /// neighbours; `step1_*` fields are imputed.
    pub step1_missing: bool,
}

impl FeatureVector {
    /// The twelve variables as reals, in [`FEATURE_NAMES`] order.
    pub fn values(&self) -> [f64; 12] {
        [
            self.seed_mean_degree,
            self.seed_max_degree as f64,
            self.nbr_min_degree,
            self.nbr_mean_degree,
            self.nbr_max_degree,
            self.nbr_min_threshold,
            self.nbr_mean_threshold,
            self.nbr_max_threshold,
            self.below_count as f64,
            self.step1_min_threshold,
            self.step1_mean_threshold,
            self.step1_max_threshold,
        ]
    }

    pub fn any_missing(&self) -> bool {
        self.nbr_missing || self.step1_missing
    }
}

/// Threshold below which a seed neighbour counts toward `below`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CriticalValue(f64);

impl CriticalValue {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::parameter(
                "critical_value",
                format!("must lie in (0, 1), got {value}"),
            ));
        }
        Ok(CriticalValue(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Default critical value for scale-free networks.
pub const SCALE_FREE_CRITICAL: f64 = 0.2;

/// Network-specific critical value: `1/(pN)` for random networks, `1/n` for
/// small-world lattices with `n` immediate neighbours (shortcuts ignored),
/// and [`SCALE_FREE_CRITICAL`] for scale-free networks. An override, when
/// given, takes precedence for every family.
pub fn critical_value(spec: &NetworkSpec, override_value: Option<f64>) -> Result<CriticalValue> {
    if let Some(v) = override_value {
        return CriticalValue::new(v);
    }
    match spec.kind {
        NetworkKind::Random { p } => {
            let expected_degree = p * spec.n_agents as f64;
            if expected_degree <= 1.0 {
                return Err(Error::parameter(
                    "p",
                    format!("expected degree pN = {expected_degree} must exceed 1"),
                ));
            }
            CriticalValue::new(1.0 / expected_degree)
        }
        NetworkKind::SmallWorld { .. } => {
            let n = spec.effective_n_neighbors().unwrap_or(2);
            CriticalValue::new(1.0 / n as f64)
        }
        NetworkKind::ScaleFree { .. } => CriticalValue::new(SCALE_FREE_CRITICAL),
    }
}

/// Non-seed agents adjacent to at least one seed, ascending.
pub fn seed_neighborhood(g: &Graph, seeds: &SeedSet) -> Vec<usize> {
    let set: BTreeSet<usize> = seeds
        .as_slice()
        .iter()
        .flat_map(|&s| g.neighbors(s).iter().copied())
        .filter(|&j| !seeds.contains(j))
        .collect();
    set.into_iter().collect()
}

/// Agents adjacent to a first-step switcher that are neither seeds nor
/// first-step switchers themselves, ascending.
pub fn first_step_neighborhood(g: &Graph, seeds: &SeedSet, first_step: &[usize]) -> Vec<usize> {
    let switched: BTreeSet<usize> = first_step.iter().copied().collect();
    let set: BTreeSet<usize> = first_step
        .iter()
        .flat_map(|&a| g.neighbors(a).iter().copied())
        .filter(|&j| !seeds.contains(j) && !switched.contains(&j))
        .collect();
    set.into_iter().collect()
}

#[derive(Clone, Copy)]
struct Summary {
    min: f64,
    mean: f64,
    max: f64,
}

fn summarize<I: IntoIterator<Item = f64>>(values: I) -> Option<Summary> {
    let mut n = 0usize;
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        n += 1;
        sum += v;
        min = min.min(v);
        max = max.max(v);
    }
    if n == 0 {
        return None;
    }
    // clamp guards min <= mean <= max against summation rounding
    let mean = (sum / n as f64).clamp(min, max);
    Some(Summary { min, mean, max })
}

pub fn extract_features(
    g: &Graph,
    thresholds: &ThresholdAssignment,
    seeds: &SeedSet,
    result: &CascadeResult,
    crit: CriticalValue,
) -> FeatureVector {
    let seed_degrees: Vec<usize> = seeds
        .as_slice()
        .iter()
        .map(|&s| g.neighbors(s).len())
        .collect();
    let seed_max_degree = seed_degrees.iter().copied().max().unwrap_or(0);
    let seed_mean_degree =
        seed_degrees.iter().sum::<usize>() as f64 / seed_degrees.len().max(1) as f64;

    let hood = seed_neighborhood(g, seeds);
    let nbr_deg = summarize(hood.iter().map(|&j| g.neighbors(j).len() as f64));
    let nbr_thr = summarize(hood.iter().map(|&j| thresholds[j]));
    let below_count = hood
        .iter()
        .filter(|&&j| thresholds[j] < crit.value())
        .count();
    let nbr_missing = hood.is_empty();
    // no neighbours: degree statistics are 0, threshold statistics the mean
    let nbr_deg = nbr_deg.unwrap_or(Summary {
        min: 0.0,
        mean: 0.0,
        max: 0.0,
    });
    let imputed = Summary {
        min: IMPUTED_THRESHOLD,
        mean: IMPUTED_THRESHOLD,
        max: IMPUTED_THRESHOLD,
    };
    let nbr_thr = nbr_thr.unwrap_or(imputed);

    let step1 = first_step_neighborhood(g, seeds, result.first_step());
    let step1_thr = summarize(step1.iter().map(|&j| thresholds[j]));
    let step1_missing = step1_thr.is_none();
    let step1_thr = step1_thr.unwrap_or(imputed);

    FeatureVector {
        seed_mean_degree,
        seed_max_degree,
        nbr_min_degree: nbr_deg.min,
        nbr_mean_degree: nbr_deg.mean,
        nbr_max_degree: nbr_deg.max,
        nbr_min_threshold: nbr_thr.min,
        nbr_mean_threshold: nbr_thr.mean,
        nbr_max_threshold: nbr_thr.max,
        below_count,
        step1_min_threshold: step1_thr.min,
        step1_mean_threshold: step1_thr.mean,
        step1_max_threshold: step1_thr.max,
        nbr_missing,
        step1_missing,
    }
}
