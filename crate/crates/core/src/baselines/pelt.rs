//! Pruned Exact Linear Time optimal partitioning.
//!
//! Minimizes `Σ_j C(segment_j) + β·J` exactly with the pruned recursion
//! `F(s) = min_t { F(t) + C(y_{(t+1):s}) + β }`, `F(0) = −β`. The cost is
//! twice the negative Gaussian log-likelihood of a segment with its own mean
//! and a global variance, computed on raw or log-transformed values.

use crate::error::{Error, Result};
use crate::series::MeasurementSeries;

/// Which values feed the Gaussian cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeltCost {
    /// Log-transform first; the right model for log-normal data.
    GaussianLogData,
    GaussianRaw,
}

#[derive(Debug, Clone)]
pub struct PeltConfig {
    /// Penalty per change-point; `None` uses `2·ln T`.
    pub beta: Option<f64>,
    /// Pruning constant `K`; zero is valid for the Gaussian likelihood cost.
    pub prune_constant: f64,
    pub cost: PeltCost,
}

impl Default for PeltConfig {
    fn default() -> Self {
        Self {
            beta: None,
            prune_constant: 0.0,
            cost: PeltCost::GaussianLogData,
        }
    }
}

struct GaussianCost {
    prefix: Vec<f64>,
    prefix_sq: Vec<f64>,
    sigma2: f64,
    log_norm: f64,
}

impl GaussianCost {
    fn new(x: &[f64]) -> Self {
        let n = x.len();
        let mut prefix = vec![0.0; n + 1];
        let mut prefix_sq = vec![0.0; n + 1];
        for (i, &v) in x.iter().enumerate() {
            prefix[i + 1] = prefix[i] + v;
            prefix_sq[i + 1] = prefix_sq[i] + v * v;
        }
        // Global variance from first differences; mean shifts contaminate a
        // direct estimate but barely move this one.
        let diff_sq: f64 = x.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
        let sigma2 = diff_sq / (2.0 * (n as f64 - 1.0));
        let log_norm = (2.0 * std::f64::consts::PI * sigma2).ln();
        Self {
            prefix,
            prefix_sq,
            sigma2,
            log_norm,
        }
    }

    /// Twice the negative log-likelihood of `x[a..b]` (0-based, half-open)
    /// under a segment-wise mean and the global variance.
    fn segment(&self, a: usize, b: usize) -> f64 {
        let len = (b - a) as f64;
        let sum = self.prefix[b] - self.prefix[a];
        let sum_sq = self.prefix_sq[b] - self.prefix_sq[a];
        let rss = (sum_sq - sum * sum / len).max(0.0);
        rss / self.sigma2 + len * self.log_norm
    }
}

/// Exact penalized optimal partitioning with candidate pruning. Returns the
/// change-point times `τ` (splits after the τ-th observation), sorted.
pub fn pelt(series: &MeasurementSeries, cfg: &PeltConfig) -> Result<Vec<usize>> {
    let x: Vec<f64> = match cfg.cost {
        PeltCost::GaussianRaw => series.values().to_vec(),
        PeltCost::GaussianLogData => {
            if let Some(bad) = series.values().iter().find(|v| **v <= 0.0) {
                return Err(Error::invalid_input(format!(
                    "log-data cost requires positive values, got {bad}"
                )));
            }
            series.values().iter().map(|v| v.ln()).collect()
        }
    };
    let t_len = x.len();
    let beta = cfg.beta.unwrap_or_else(|| 2.0 * (t_len as f64).ln());
    if beta < 0.0 {
        return Err(Error::invalid_input("penalty beta must be nonnegative"));
    }

    let cost = GaussianCost::new(&x);
    if cost.sigma2 <= 0.0 {
        // Constant series: no segmentation can improve the fit.
        return Ok(Vec::new());
    }

    let mut f = vec![f64::INFINITY; t_len + 1];
    f[0] = -beta;
    let mut last_change = vec![0usize; t_len + 1];
    let mut candidates: Vec<usize> = vec![0];

    for s in 1..=t_len {
        let mut best = f64::INFINITY;
        let mut best_t = 0usize;
        for &t in &candidates {
            let value = f[t] + cost.segment(t, s) + beta;
            if value < best {
                best = value;
                best_t = t;
            }
        }
        f[s] = best;
        last_change[s] = best_t;
        candidates.retain(|&t| f[t] + cost.segment(t, s) + cfg.prune_constant <= f[s]);
        candidates.push(s);
    }

    let mut change_points = Vec::new();
    let mut t = last_change[t_len];
    while t > 0 {
        change_points.push(t);
        t = last_change[t];
    }
    change_points.reverse();
    Ok(change_points)
}
