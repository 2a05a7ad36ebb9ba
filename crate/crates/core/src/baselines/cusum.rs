//! Tabular CUSUM control scheme.
//!
//! Accumulates deviations above and below a reference mean:
//! `C⁺_t = max{0, y_t − (μ0+K) + C⁺_{t−1}}`,
//! `C⁻_t = max{0, (μ0−K) − y_t + C⁻_{t−1}}`, with an alarm whenever either
//! statistic exceeds the decision interval `H`.

use crate::error::{Error, Result};
use crate::series::MeasurementSeries;

#[derive(Debug, Clone)]
pub struct CusumConfig {
    /// In-control mean; `None` uses the series mean.
    pub mu0: Option<f64>,
    /// Process standard deviation; `None` uses [`estimate_sigma`].
    pub sigma: Option<f64>,
    /// Slack `K` in raw measurement units.
    pub k: f64,
    /// Decision interval; `None` uses `5·sigma`.
    pub h: Option<f64>,
}

impl Default for CusumConfig {
    fn default() -> Self {
        Self {
            mu0: None,
            sigma: None,
            k: 0.0,
            h: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CusumResult {
    pub mu0: f64,
    pub sigma: f64,
    pub k: f64,
    pub h: f64,
    /// Upper/lower statistics indexed by `t = 1..=T` (entry 0 is the zero
    /// starting state).
    pub c_plus: Vec<f64>,
    pub c_minus: Vec<f64>,
    /// Times where either statistic exceeds `H`.
    pub alarms: Vec<usize>,
    /// Heuristic change-point estimates: for each alarm run, the time the
    /// triggering statistic last sat at zero before the first alarm.
    pub change_points: Vec<usize>,
}

/// `σ̂ = sqrt( Σ (y_t − μ0)² / (T−1) )`.
pub fn estimate_sigma(series: &MeasurementSeries, mu0: f64) -> f64 {
    let t = series.len() as f64;
    let ss: f64 = series.values().iter().map(|y| (y - mu0).powi(2)).sum();
    (ss / (t - 1.0)).sqrt()
}

pub fn cusum(series: &MeasurementSeries, cfg: &CusumConfig) -> Result<CusumResult> {
    let mu0 = cfg.mu0.unwrap_or_else(|| series.mean());
    let sigma = cfg.sigma.unwrap_or_else(|| estimate_sigma(series, mu0));
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be > 0, got {sigma}")));
    }
    if cfg.k < 0.0 {
        return Err(Error::domain("slack K must be >= 0"));
    }
    let h = cfg.h.unwrap_or(5.0 * sigma);
    if !(h > 0.0) {
        return Err(Error::domain("decision interval H must be > 0"));
    }

    let t_len = series.len();
    let mut c_plus = vec![0.0; t_len + 1];
    let mut c_minus = vec![0.0; t_len + 1];
    let mut alarms = Vec::new();
    for t in 1..=t_len {
        let y = series.value_at(t);
        c_plus[t] = (y - (mu0 + cfg.k) + c_plus[t - 1]).max(0.0);
        c_minus[t] = ((mu0 - cfg.k) - y + c_minus[t - 1]).max(0.0);
        if c_plus[t] > h || c_minus[t] > h {
            alarms.push(t);
        }
    }

    let mut change_points = Vec::new();
    let mut prev_alarm: Option<usize> = None;
    for &a in &alarms {
        let new_run = prev_alarm.map_or(true, |p| a > p + 1);
        if new_run {
            // Walk the triggering side back to its most recent zero; the
            // ramp start is the change estimate.
            let side = if c_plus[a] >= c_minus[a] { &c_plus } else { &c_minus };
            let mut u = a;
            while u > 0 && side[u] > 0.0 {
                u -= 1;
            }
            // Re-alarms whose statistic never drained report the same ramp
            // start; keep it once.
            if u > 0 && change_points.last() != Some(&u) {
                change_points.push(u);
            }
        }
        prev_alarm = Some(a);
    }

    Ok(CusumResult {
        mu0,
        sigma,
        k: cfg.k,
        h,
        c_plus,
        c_minus,
        alarms,
        change_points,
    })
}
