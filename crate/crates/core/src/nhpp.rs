//! NHPP intensity families and the segmented mean-cumulative function.
//!
//! Four parametric families are supported, each defined by an intensity
//! `λ(t|θ)` and its integral, the mean cumulative function `m(t|θ)`:
//!
//! | family | λ(t|θ)                      | m(t|θ)             |
//! |--------|-----------------------------|--------------------|
//! | W      | (α/β)(t/β)^(α−1)            | (t/β)^α            |
//! | MO     | β/(t+α)                     | β·ln(1 + t/α)      |
//! | GO     | αβ·e^(−βt)                  | α(1 − e^(−βt))     |
//! | GGO    | αβγ·t^(γ−1)·e^(−βt^γ)       | α(1 − e^(−βt^γ))   |
//!
//! A change-point configuration splits `[0, T]` into regimes with their own
//! parameter vectors; `segmented_mean` stitches the per-regime means into a
//! continuous, nondecreasing curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The supported intensity families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntensityFamily {
    Weibull,
    MusaOkumoto,
    GoelOkumoto,
    GeneralizedGoelOkumoto,
}

impl IntensityFamily {
    /// Number of continuous parameters per segment.
    pub fn param_count(self) -> usize {
        match self {
            IntensityFamily::GeneralizedGoelOkumoto => 3,
            _ => 2,
        }
    }

    /// Penalty multiplier for real-valued parameters: 2 for two-parameter
    /// families, 3 for the three-parameter one.
    pub fn penalty_factor(self) -> u32 {
        self.param_count() as u32
    }

    pub fn name(self) -> &'static str {
        match self {
            IntensityFamily::Weibull => "weibull",
            IntensityFamily::MusaOkumoto => "musa-okumoto",
            IntensityFamily::GoelOkumoto => "goel-okumoto",
            IntensityFamily::GeneralizedGoelOkumoto => "ggo",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "weibull" | "w" => Ok(IntensityFamily::Weibull),
            "musa-okumoto" | "mo" => Ok(IntensityFamily::MusaOkumoto),
            "goel-okumoto" | "go" => Ok(IntensityFamily::GoelOkumoto),
            "ggo" => Ok(IntensityFamily::GeneralizedGoelOkumoto),
            other => Err(Error::invalid_input(format!(
                "unknown family `{other}`; expected weibull|musa-okumoto|goel-okumoto|ggo"
            ))),
        }
    }
}

impl std::fmt::Display for IntensityFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-segment parameter vector. `gamma` is present only for the
/// three-parameter family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentParams {
    pub alpha: f64,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl SegmentParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::build(alpha, beta, None)
    }

    pub fn with_gamma(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::build(alpha, beta, Some(gamma))
    }

    fn build(alpha: f64, beta: f64, gamma: Option<f64>) -> Result<Self> {
        for (name, v) in [("alpha", Some(alpha)), ("beta", Some(beta)), ("gamma", gamma)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
                }
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// `gamma`, defaulting to 1 for two-parameter families so the GGO
    /// formulas specialize correctly.
    pub fn gamma_or_one(&self) -> f64 {
        self.gamma.unwrap_or(1.0)
    }

    /// Checks the parameter arity against the family.
    pub fn matches_family(&self, family: IntensityFamily) -> bool {
        match family {
            IntensityFamily::GeneralizedGoelOkumoto => self.gamma.is_some(),
            _ => self.gamma.is_none(),
        }
    }
}

/// A candidate solution: `J` strictly increasing interior change-points
/// `1 < τ_1 < … < τ_J < T` over a horizon `T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChangePointConfig {
    tau: Vec<usize>,
    horizon: usize,
}

impl ChangePointConfig {
    pub fn new(tau: Vec<usize>, horizon: usize) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::invalid_input("horizon must be at least 2"));
        }
        for w in tau.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::invalid_input("change-points must be strictly increasing"));
            }
        }
        if let (Some(&first), Some(&last)) = (tau.first(), tau.last()) {
            if first <= 1 || last >= horizon {
                return Err(Error::invalid_input(format!(
                    "change-points must lie strictly inside (1, {horizon})"
                )));
            }
        }
        Ok(Self { tau, horizon })
    }

    /// The no-change-point configuration.
    pub fn empty(horizon: usize) -> Result<Self> {
        Self::new(Vec::new(), horizon)
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of change-points `J`.
    pub fn j(&self) -> usize {
        self.tau.len()
    }

    /// Segment boundaries `(τ_{j-1}, τ_j]` for `j = 1..=J+1`, with `τ_0 = 0`
    /// and `τ_{J+1} = T`.
    pub fn segment_bounds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let lows = std::iter::once(0).chain(self.tau.iter().copied());
        let highs = self.tau.iter().copied().chain(std::iter::once(self.horizon));
        lows.zip(highs)
    }
}

fn check_params(family: IntensityFamily, params: &SegmentParams) -> Result<()> {
    if !params.matches_family(family) {
        return Err(Error::domain(format!(
            "{} expects {} parameters",
            family,
            family.param_count()
        )));
    }
    Ok(())
}

/// Intensity `λ(t|θ)`. Errors at `t = 0` where the intensity diverges
/// (Weibull with α < 1, GGO with γ < 1) and for negative `t`.
pub fn intensity(family: IntensityFamily, params: &SegmentParams, t: f64) -> Result<f64> {
    check_params(family, params)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid_input(format!("intensity requires t >= 0, got {t}")));
    }
    let SegmentParams { alpha, beta, .. } = *params;
    let value = match family {
        IntensityFamily::Weibull => {
            if t == 0.0 && alpha < 1.0 {
                return Err(Error::singularity("Weibull intensity diverges at t=0 for alpha < 1"));
            }
            (alpha / beta) * (t / beta).powf(alpha - 1.0)
        }
        IntensityFamily::MusaOkumoto => beta / (t + alpha),
        IntensityFamily::GoelOkumoto => alpha * beta * (-beta * t).exp(),
        IntensityFamily::GeneralizedGoelOkumoto => {
            let gamma = params.gamma_or_one();
            if t == 0.0 && gamma < 1.0 {
                return Err(Error::singularity("GGO intensity diverges at t=0 for gamma < 1"));
            }
            alpha * beta * gamma * t.powf(gamma - 1.0) * (-beta * t.powf(gamma)).exp()
        }
    };
    Ok(value)
}

/// `ln λ(t|θ)` for `t > 0`, in the algebraically expanded form. Infallible
/// given valid parameters; used by the likelihood inner loops.
pub(crate) fn log_intensity(family: IntensityFamily, params: &SegmentParams, t: f64) -> f64 {
    let SegmentParams { alpha, beta, .. } = *params;
    match family {
        IntensityFamily::Weibull => alpha.ln() - alpha * beta.ln() + (alpha - 1.0) * t.ln(),
        IntensityFamily::MusaOkumoto => beta.ln() - (alpha + t).ln(),
        IntensityFamily::GoelOkumoto => alpha.ln() + beta.ln() - beta * t,
        IntensityFamily::GeneralizedGoelOkumoto => {
            let gamma = params.gamma_or_one();
            alpha.ln() + beta.ln() + gamma.ln() + (gamma - 1.0) * t.ln() - beta * t.powf(gamma)
        }
    }
}

/// Mean cumulative function `m(t|θ)`, the expected event count up to `t`.
/// Defined (and zero) at `t = 0` for every family.
pub fn mean_cumulative(family: IntensityFamily, params: &SegmentParams, t: f64) -> Result<f64> {
    check_params(family, params)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid_input(format!("mean_cumulative requires t >= 0, got {t}")));
    }
    Ok(mean_cumulative_unchecked(family, params, t))
}

pub(crate) fn mean_cumulative_unchecked(
    family: IntensityFamily,
    params: &SegmentParams,
    t: f64,
) -> f64 {
    let SegmentParams { alpha, beta, .. } = *params;
    match family {
        IntensityFamily::Weibull => (t / beta).powf(alpha),
        IntensityFamily::MusaOkumoto => beta * (1.0 + t / alpha).ln(),
        IntensityFamily::GoelOkumoto => alpha * (1.0 - (-beta * t).exp()),
        IntensityFamily::GeneralizedGoelOkumoto => {
            alpha * (1.0 - (-beta * t.powf(params.gamma_or_one())).exp())
        }
    }
}

/// An intensity family, a change-point configuration and one parameter
/// vector per regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentedModel {
    pub family: IntensityFamily,
    pub config: ChangePointConfig,
    pub segments: Vec<SegmentParams>,
}

impl SegmentedModel {
    pub fn new(
        family: IntensityFamily,
        config: ChangePointConfig,
        segments: Vec<SegmentParams>,
    ) -> Result<Self> {
        if segments.len() != config.j() + 1 {
            return Err(Error::invalid_input(format!(
                "expected {} segment parameter vectors, got {}",
                config.j() + 1,
                segments.len()
            )));
        }
        for params in &segments {
            check_params(family, params)?;
        }
        Ok(Self {
            family,
            config,
            segments,
        })
    }

    /// Piecewise mean cumulative function: within regime `j+1` the value is
    /// the accumulated within-regime increments up to `τ_j` plus
    /// `m(t|θ_{j+1}) − m(τ_j|θ_{j+1})`. Continuous at every change-point.
    pub fn segmented_mean(&self, t: f64) -> Result<f64> {
        let horizon = self.config.horizon() as f64;
        if !(t.is_finite() && (0.0..=horizon).contains(&t)) {
            return Err(Error::invalid_input(format!(
                "segmented_mean requires t in [0, {horizon}], got {t}"
            )));
        }
        let mut acc = 0.0;
        for (j, (lo, hi)) in self.config.segment_bounds().enumerate() {
            let params = &self.segments[j];
            let lo_f = lo as f64;
            if t <= hi as f64 {
                return Ok(acc + mean_cumulative_unchecked(self.family, params, t)
                    - mean_cumulative_unchecked(self.family, params, lo_f));
            }
            acc += mean_cumulative_unchecked(self.family, params, hi as f64)
                - mean_cumulative_unchecked(self.family, params, lo_f);
        }
        unreachable!("t <= horizon is guaranteed by the range check");
    }
}
