//! Multiple change-point detection for threshold-exceedance time series.
//!
//! A measurement series is reduced to the times its values exceed a
//! threshold; those event times are modeled as a segmented non-homogeneous
//! Poisson process. Candidate change-point configurations are scored by a
//! penalized Bayesian-MDL objective and searched with a genetic algorithm.
//! Baseline detectors (PELT, tabular CUSUM, a frequentist-MDL genetic
//! search) and a piecewise log-normal simulator round out the toolkit.

#![forbid(unsafe_code)]

pub mod baselines;
pub mod error;
pub mod ga;
pub mod nhpp;
pub mod objective;
pub mod report;
pub mod series;
pub mod simplex;
pub mod simulate;

pub use error::{Error, Result};
pub use ga::{run_ga, FittedChromosome, GaConfig, GaHistory, GenerationBest, MutationScheme};
pub use nhpp::{ChangePointConfig, IntensityFamily, SegmentParams, SegmentedModel};
pub use objective::{
    bayesian_mdl, fit_segments, FitOptions, Hyperparams, ObjectiveValue, SegmentFit,
};
pub use report::{confidence_bands, regime_rate_summary, DetectionResult, SPEC_VERSION};
pub use series::{ExceedanceData, MeasurementSeries};
pub use simulate::{preset, preset_settings, RegimeSpec, SimulationSetting};
