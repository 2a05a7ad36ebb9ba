//! Frequentist MDL for log-normal regimes and its genetic search.
//!
//! With per-regime log-means and a globally pooled log-variance, the score
//! (up to configuration-independent constants) is
//! `(T/2)·ln(σ̂²) + Σ_j ln(τ_j − τ_{j−1})/2 + ln(J) + Σ_{j=2}^J ln(τ_j)`.
//! The maximum-likelihood estimates are closed-form, so the genetic search
//! needs no inner optimizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::{run_ga_engine, GaConfig, GaHistory};
use crate::nhpp::ChangePointConfig;
use crate::objective::penalty;
use crate::series::MeasurementSeries;

/// Maximum-likelihood estimates for one regime on the log scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalFit {
    pub mu: f64,
    pub sigma2: f64,
}

/// Score of one configuration under the frequentist MDL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqMdlValue {
    pub mdl: f64,
    pub regimes: Vec<LogNormalFit>,
    /// Variance pooled over regime-centered log-residuals.
    pub pooled_sigma2: f64,
    /// Set when the pooled variance vanished and `mdl` is the −inf sentinel.
    pub degenerate: bool,
}

/// Log-normal MLE: `μ̂ = mean(ln y)`, `σ̂² = mean((ln y − μ̂)²)`.
pub fn lognormal_mle(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::invalid_input("cannot fit an empty segment"));
    }
    if let Some(bad) = values.iter().find(|v| **v <= 0.0) {
        return Err(Error::domain(format!(
            "log-normal fit requires positive values, got {bad}"
        )));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mu = logs.iter().sum::<f64>() / logs.len() as f64;
    let sigma2 = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / logs.len() as f64;
    Ok((mu, sigma2))
}

/// Evaluates the frequentist MDL of a configuration with `J >= 1`.
pub fn freq_mdl(series: &MeasurementSeries, config: &ChangePointConfig) -> Result<FreqMdlValue> {
    if config.j() == 0 {
        return Err(Error::invalid_input("freq_mdl requires at least one change-point"));
    }
    if config.horizon() != series.len() {
        return Err(Error::invalid_input(format!(
            "config horizon {} does not match series length {}",
            config.horizon(),
            series.len()
        )));
    }
    let values = series.values();
    let t_len = series.len() as f64;
    let mut regimes = Vec::with_capacity(config.j() + 1);
    let mut pooled_rss = 0.0;
    for (lo, hi) in config.segment_bounds() {
        let segment = &values[lo..hi];
        let (mu, sigma2) = lognormal_mle(segment)?;
        pooled_rss += sigma2 * segment.len() as f64;
        regimes.push(LogNormalFit { mu, sigma2 });
    }
    let pooled_sigma2 = pooled_rss / t_len;
    // Exactly-repeated values leave O(ulp^2) residuals after the mean
    // subtraction; anything at that scale is a perfect fit.
    let degenerate = pooled_sigma2 <= 1e-28;
    let mdl = if degenerate {
        f64::NEG_INFINITY
    } else {
        t_len / 2.0 * pooled_sigma2.ln() + penalty(config, 1)
    };
    Ok(FreqMdlValue {
        mdl,
        regimes,
        pooled_sigma2,
        degenerate,
    })
}

/// Genetic search with the frequentist MDL as fitness. Chromosomes without
/// change-points are inadmissible and rank worst.
pub fn run_freq_mdl_ga(
    series: &MeasurementSeries,
    cfg: &GaConfig,
) -> Result<GaHistory<FreqMdlValue>> {
    // Surface data problems before the generation loop starts.
    let (global_mu, global_sigma2) = lognormal_mle(series.values())?;
    run_ga_engine(series.len(), cfg, |config| {
        if config.j() == 0 {
            let detail = FreqMdlValue {
                mdl: f64::INFINITY,
                regimes: vec![LogNormalFit {
                    mu: global_mu,
                    sigma2: global_sigma2,
                }],
                pooled_sigma2: global_sigma2,
                degenerate: false,
            };
            return (f64::INFINITY, detail);
        }
        let value = freq_mdl(series, config).expect("validated inputs cannot fail");
        (value.mdl, value)
    })
}
