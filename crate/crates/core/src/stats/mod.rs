//! Statistical pipeline: quartile-split Anderson–Darling screening, least
//! squares on the empirical logit of the cascade size, backward
//! elimination, bootstrap validation and LOESS nonlinearity screening.

pub mod anderson_darling;
pub mod bootstrap;
pub mod describe;
pub mod loess;
pub mod ols;
pub mod pipeline;
pub mod screening;

pub use anderson_darling::{ad_permutation_test, ad_two_sample, AdResult};
pub use bootstrap::{bootstrap_model, BootstrapReport};
pub use describe::{empirical_logit, quantile_sorted, quartiles, skewness};
pub use loess::{loess_screen, LoessReport};
pub use ols::{backward_eliminate, ols_fit, Design, Elimination, RegressionModel};
pub use pipeline::{analyze, AnalysisOptions, AnalysisReport, MissingPolicy};
pub use screening::{screen_variables, ScreeningReport};
