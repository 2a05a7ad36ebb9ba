//! Detection artifacts: fitted-mean grids with Poisson confidence bands,
//! per-regime intensity summaries, and the serializable result bundle
//! behind the CLI's JSON and plot-data outputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ga::{FittedChromosome, GaHistory};
use crate::nhpp::{intensity, SegmentedModel};
use crate::series::ExceedanceData;

/// Schema version stamped into every JSON result.
pub const SPEC_VERSION: &str = "1.0";

/// Pointwise 95% bands around a grid of fitted means, from the Poisson
/// count distribution: exact 2.5%/97.5% quantiles for small means, the
/// normal approximation `m ± 1.96·√m` beyond 30.
pub fn confidence_bands(means: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut lower = Vec::with_capacity(means.len());
    let mut upper = Vec::with_capacity(means.len());
    for &m in means {
        let (lo, hi) = poisson_band(m);
        lower.push(lo);
        upper.push(hi);
    }
    (lower, upper)
}

fn poisson_band(mean: f64) -> (f64, f64) {
    debug_assert!(mean >= 0.0);
    if mean == 0.0 {
        return (0.0, 0.0);
    }
    if mean > 30.0 {
        let half_width = 1.96 * mean.sqrt();
        return ((mean - half_width).max(0.0), mean + half_width);
    }
    (
        poisson_quantile(mean, 0.025) as f64,
        poisson_quantile(mean, 0.975) as f64,
    )
}

/// Smallest `k` with `P(X <= k) >= p` for `X ~ Poisson(mean)`.
fn poisson_quantile(mean: f64, p: f64) -> usize {
    let mut k = 0usize;
    let mut pmf = (-mean).exp();
    let mut cdf = pmf;
    while cdf < p {
        k += 1;
        pmf *= mean / k as f64;
        cdf += pmf;
        if k > 10_000 {
            break;
        }
    }
    k
}

/// Per-regime intensity summary on the integer time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRates {
    /// First grid time of the regime.
    pub start: usize,
    /// Last grid time of the regime (inclusive).
    pub end: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

/// Evaluates `λ(t|θ̂)` on each regime's integer grid and reports
/// min/mean/max. Regime `j` covers `(τ_{j−1}, τ_j]`; a grid start below 1
/// is lifted to 1 so singular intensities at the origin are skipped.
pub fn regime_rate_summary(model: &SegmentedModel) -> Result<Vec<RegimeRates>> {
    let mut summaries = Vec::with_capacity(model.config.j() + 1);
    for (j, (lo, hi)) in model.config.segment_bounds().enumerate() {
        let params = &model.segments[j];
        let start = (lo + 1).max(1);
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut count = 0usize;
        for t in start..=hi {
            let lambda = intensity(model.family, params, t as f64)?;
            min = min.min(lambda);
            max = max.max(lambda);
            sum += lambda;
            count += 1;
        }
        summaries.push(RegimeRates {
            start,
            end: hi,
            min,
            mean: sum / count as f64,
            max,
        });
    }
    Ok(summaries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub path: String,
    pub rows: usize,
    pub threshold: f64,
    pub exceedances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub family: String,
    pub generations: usize,
    pub population: usize,
    pub seed: u64,
    pub init_prob: f64,
    pub mutation: String,
    pub crossover_keep_prob: f64,
    pub elitism: bool,
    pub hyper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSolution {
    pub generation: usize,
    pub j: usize,
    pub tau: Vec<usize>,
    pub bmdl: f64,
    pub log_lik: f64,
    pub log_prior: f64,
    pub penalty: f64,
    pub segments: Vec<crate::nhpp::SegmentParams>,
    pub converged: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub generation: usize,
    pub bmdl: f64,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub t: usize,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Everything a detection run produces, in the versioned JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub spec_version: String,
    pub input: InputSummary,
    pub config: RunConfig,
    pub best: BestSolution,
    pub trace: Vec<TracePoint>,
    pub frequency: BTreeMap<usize, usize>,
    pub fit: Vec<FitPoint>,
    pub regimes: Vec<RegimeRates>,
}

impl DetectionResult {
    /// Assembles the result bundle from a finished GA run.
    pub fn from_history(
        history: &GaHistory<FittedChromosome>,
        data: &ExceedanceData,
        family: crate::nhpp::IntensityFamily,
        input: InputSummary,
        config: RunConfig,
    ) -> Result<Self> {
        let best = history.best();
        let model = SegmentedModel::new(
            family,
            best.config.clone(),
            best.detail.fit.params.clone(),
        )?;

        let means: Vec<f64> = (1..=data.horizon())
            .map(|t| model.segmented_mean(t as f64))
            .collect::<Result<_>>()?;
        let (lower, upper) = confidence_bands(&means);
        let fit = means
            .iter()
            .enumerate()
            .map(|(i, &mean)| FitPoint {
                t: i + 1,
                mean,
                lower: lower[i],
                upper: upper[i],
            })
            .collect();

        let trace = history
            .generations
            .iter()
            .enumerate()
            .map(|(i, g)| TracePoint {
                generation: i + 1,
                bmdl: g.score,
                j: g.config.j(),
            })
            .collect();

        Ok(DetectionResult {
            spec_version: SPEC_VERSION.to_string(),
            input,
            config,
            best: BestSolution {
                generation: history.best_generation + 1,
                j: best.config.j(),
                tau: best.config.tau().to_vec(),
                bmdl: best.detail.objective.bmdl,
                log_lik: best.detail.objective.log_lik,
                log_prior: best.detail.objective.log_prior,
                penalty: best.detail.objective.penalty,
                segments: best.detail.fit.params.clone(),
                converged: best.detail.fit.converged.clone(),
            },
            trace,
            frequency: history.cp_frequency.clone(),
            fit,
            regimes: regime_rate_summary(&model)?,
        })
    }

    /// Canonical JSON encoding; re-serializing a parsed result reproduces
    /// the bytes exactly.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("result serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| crate::error::Error::invalid_input(format!("bad result JSON: {e}")))
    }

    /// Tidy plot-data rows `(panel, t, series, value)` behind the four
    /// standard panels: (a) observed/fitted/bands, (b) best score per
    /// generation, (c) change-point frequencies, (d) J per generation.
    pub fn plot_rows(&self, data: &ExceedanceData) -> Vec<(String, usize, String, f64)> {
        let mut rows = Vec::new();
        for point in &self.fit {
            rows.push(("a".into(), point.t, "observed".into(), data.count_at(point.t) as f64));
            rows.push(("a".into(), point.t, "fitted".into(), point.mean));
            rows.push(("a".into(), point.t, "lower".into(), point.lower));
            rows.push(("a".into(), point.t, "upper".into(), point.upper));
        }
        for point in &self.trace {
            rows.push(("b".into(), point.generation, "bmdl".into(), point.bmdl));
            rows.push(("d".into(), point.generation, "j".into(), point.j as f64));
        }
        for (&tau, &count) in &self.frequency {
            rows.push(("c".into(), tau, "frequency".into(), count as f64));
        }
        rows
    }
}

/// Writes plot rows as CSV with the `panel,t,series,value` header.
pub fn write_plot_csv<W: std::io::Write>(
    rows: &[(String, usize, String, f64)],
    writer: W,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["panel", "t", "series", "value"])?;
    for (panel, t, series, value) in rows {
        wtr.write_record([panel.clone(), t.to_string(), series.clone(), format!("{value}")])?;
    }
    wtr.flush()?;
    Ok(())
}
