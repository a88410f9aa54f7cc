//! Threshold cascades on random, small-world and scale-free networks, with
//! the tooling to ask how much of the eventual cascade size can be predicted
//! from information available before (or during the first step of) a run.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: network generators and the immutable [`Graph`] type.
//! - [`cascade`]: thresholds, seeds and the switching dynamics.
//! - [`features`]: the twelve ex-ante explanatory variables.
//! - [`stats`]: screening, logit least squares, backward elimination,
//!   bootstrap and LOESS screening.
//! - [`table`]: the per-solution run table and its CSV form.
//! - [`experiment`]: configurations, sweeps and the aggregate tables.

pub mod cascade;
pub mod error;
pub mod experiment;
pub mod features;
pub mod graph;
pub mod rng;
pub mod stats;
pub mod table;

pub use cascade::{CascadeResult, SeedSet, ThresholdAssignment};
pub use error::{Error, Result};
pub use features::{CriticalValue, FeatureVector};
pub use graph::{Graph, NetworkKind, NetworkSpec};
pub use table::{RunRow, RunTable};
