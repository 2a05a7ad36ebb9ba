//! Reference detectors: PELT with a Gaussian cost, tabular CUSUM, and the
//! frequentist-MDL genetic algorithm for log-normal data.

mod cusum;
mod freq_mdl;
mod pelt;

pub use cusum::{cusum, estimate_sigma, CusumConfig, CusumResult};
pub use freq_mdl::{freq_mdl, lognormal_mle, run_freq_mdl_ga, FreqMdlValue, LogNormalFit};
pub use pelt::{pelt, PeltConfig, PeltCost};
