//! Synthetic piecewise log-normal series with injected change-points.
//!
//! Values are drawn as `exp(Normal(μ_regime, σ_regime))` from a seeded
//! ChaCha8 stream (normal deviates via the rand_distr ziggurat sampler), so
//! a setting plus a seed reproduces a series bit-for-bit.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::MeasurementSeries;

/// One log-normal regime: log-scale `mu`, log-shape `sigma`, and how many
/// consecutive observations it generates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub mu: f64,
    pub sigma: f64,
    pub length: usize,
}

impl RegimeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) || !self.mu.is_finite() {
            return Err(Error::domain("regime needs finite mu and sigma > 0"));
        }
        if self.length == 0 {
            return Err(Error::invalid_input("regime length must be >= 1"));
        }
        Ok(())
    }
}

/// A named simulation scenario: regimes in order plus a default seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSetting {
    pub name: String,
    pub regimes: Vec<RegimeSpec>,
    pub seed: u64,
}

impl SimulationSetting {
    pub fn validate(&self) -> Result<()> {
        if self.regimes.is_empty() {
            return Err(Error::invalid_input("setting needs at least one regime"));
        }
        for regime in &self.regimes {
            regime.validate()?;
        }
        Ok(())
    }

    /// Total series length `T`.
    pub fn horizon(&self) -> usize {
        self.regimes.iter().map(|r| r.length).sum()
    }

    /// True change-points: the cumulative regime lengths, excluding `T`.
    pub fn change_points(&self) -> Vec<usize> {
        let mut acc = 0;
        let mut points = Vec::new();
        for regime in &self.regimes[..self.regimes.len() - 1] {
            acc += regime.length;
            points.push(acc);
        }
        points
    }

    /// Generates a series with the setting's own seed.
    pub fn generate(&self) -> Result<MeasurementSeries> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        gen_lognormal_series(self, &mut rng)
    }

    /// Generates a series with an explicit seed, overriding the default.
    pub fn generate_with_seed(&self, seed: u64) -> Result<MeasurementSeries> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        gen_lognormal_series(self, &mut rng)
    }
}

/// Draws the full series: observation `t` uses the regime containing `t`,
/// and `ln y_t ~ Normal(μ_regime, σ_regime)`.
pub fn gen_lognormal_series(
    setting: &SimulationSetting,
    rng: &mut impl Rng,
) -> Result<MeasurementSeries> {
    setting.validate()?;
    let mut values = Vec::with_capacity(setting.horizon());
    for regime in &setting.regimes {
        let normal = Normal::new(regime.mu, regime.sigma)
            .map_err(|e| Error::domain(format!("bad regime parameters: {e}")))?;
        for _ in 0..regime.length {
            values.push(normal.sample(rng).exp());
        }
    }
    MeasurementSeries::new(values)
}

/// Internal seed for the uniformly drawn regime means of the large-J
/// presets. Fixed so the presets are identical regardless of the series
/// seed chosen at generation time; this draw alternates low and high
/// regimes, so every boundary moves the exceedance rate.
const PRESET_MU_SEED: u64 = 111_856;

/// The six bundled scenarios: three small-J settings with T = 1096 and
/// regime log-means stepping up from 3.5 by 0.5, and three large-J settings
/// (10/20/50 change-points) with log-means drawn once from U[0.5, 6].
pub fn preset_settings() -> Vec<SimulationSetting> {
    let sigma = 0.32;
    let stepped = |name: &str, tau: &[usize], seed: u64| {
        let regimes = regime_lengths(tau, 1096)
            .into_iter()
            .enumerate()
            .map(|(i, length)| RegimeSpec {
                mu: 3.5 + 0.5 * i as f64,
                sigma,
                length,
            })
            .collect();
        SimulationSetting {
            name: name.to_string(),
            regimes,
            seed,
        }
    };

    let j10: Vec<usize> = vec![101, 201, 301, 401, 501, 597, 697, 797, 897, 997];
    let j20: Vec<usize> = vec![
        53, 105, 157, 209, 261, 313, 365, 417, 469, 525, 576, 629, 681, 731, 785, 837, 889, 941,
        993, 1045,
    ];
    let j50: Vec<usize> = (0..50).map(|i| 22 + 21 * i).collect();

    let mut mu_rng = ChaCha8Rng::seed_from_u64(PRESET_MU_SEED);
    let mut random_mu = |name: &str, tau: &[usize], seed: u64| {
        let regimes = regime_lengths(tau, 1096)
            .into_iter()
            .map(|length| RegimeSpec {
                mu: mu_rng.gen_range(0.5..6.0),
                sigma,
                length,
            })
            .collect();
        SimulationSetting {
            name: name.to_string(),
            regimes,
            seed,
        }
    };

    vec![
        stepped("1cp", &[825], 1),
        stepped("2cp", &[365, 730], 2),
        stepped("3cp", &[548, 823, 973], 3),
        random_mu("J10", &j10, 10),
        random_mu("J20", &j20, 20),
        random_mu("J50", &j50, 50),
    ]
}

/// Looks up one preset by name.
pub fn preset(name: &str) -> Result<SimulationSetting> {
    preset_settings()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| {
            Error::invalid_input(format!(
                "unknown setting `{name}`; available: 1cp, 2cp, 3cp, J10, J20, J50"
            ))
        })
}

fn regime_lengths(tau: &[usize], horizon: usize) -> Vec<usize> {
    let mut lengths = Vec::with_capacity(tau.len() + 1);
    let mut prev = 0;
    for &t in tau {
        lengths.push(t - prev);
        prev = t;
    }
    lengths.push(horizon - prev);
    lengths
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let setting = preset("1cp").unwrap();
        let a = setting.generate_with_seed(7).unwrap();
        let b = setting.generate_with_seed(7).unwrap();
        assert_eq!(a, b);
        let c = setting.generate_with_seed(8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn boundaries_match_declared_change_points() {
        for setting in preset_settings() {
            assert_eq!(setting.horizon(), 1096);
            let tau = setting.change_points();
            let lengths: Vec<usize> = setting.regimes.iter().map(|r| r.length).collect();
            let mut acc = 0;
            for (i, &t) in tau.iter().enumerate() {
                acc += lengths[i];
                assert_eq!(t, acc);
            }
            assert_eq!(acc + lengths.last().unwrap(), 1096);
        }
    }

    #[test]
    fn presets_match_published_locations() {
        assert_eq!(preset("1cp").unwrap().change_points(), vec![825]);
        assert_eq!(preset("2cp").unwrap().change_points(), vec![365, 730]);
        assert_eq!(preset("3cp").unwrap().change_points(), vec![548, 823, 973]);
        let j50 = preset("J50").unwrap().change_points();
        assert_eq!(j50.len(), 50);
        assert_eq!(&j50[..3], &[22, 43, 64]);
        assert_eq!(*j50.last().unwrap(), 1051);
        assert_eq!(preset("J10").unwrap().change_points().len(), 10);
        assert_eq!(preset("J20").unwrap().change_points().len(), 20);
        assert!(preset("nope").is_err());
    }

    #[test]
    fn preset_regime_means_step_by_half() {
        let s = preset("3cp").unwrap();
        let mus: Vec<f64> = s.regimes.iter().map(|r| r.mu).collect();
        assert_eq!(mus, vec![3.5, 4.0, 4.5, 5.0]);
        assert!(s.regimes.iter().all(|r| (r.sigma - 0.32).abs() < 1e-12));
    }

    #[test]
    fn large_j_means_are_fixed_and_in_range() {
        let a = preset("J10").unwrap();
        let b = preset("J10").unwrap();
        assert_eq!(a, b);
        for r in &a.regimes {
            assert!((0.5..6.0).contains(&r.mu));
        }
    }

    #[test]
    fn tiny_sigma_collapses_to_exp_mu() {
        let setting = SimulationSetting {
            name: "degenerate".into(),
            regimes: vec![RegimeSpec {
                mu: 2.0,
                sigma: 1e-12,
                length: 50,
            }],
            seed: 3,
        };
        let series = setting.generate().unwrap();
        for v in series.values() {
            assert!((v - 2f64.exp()).abs() / 2f64.exp() < 1e-9);
        }
    }

    #[test]
    fn log_moments_converge_at_monte_carlo_rate() {
        let setting = SimulationSetting {
            name: "clt".into(),
            regimes: vec![RegimeSpec {
                mu: 3.5,
                sigma: 0.32,
                length: 10_000,
            }],
            seed: 99,
        };
        let series = setting.generate().unwrap();
        let logs: Vec<f64> = series.values().iter().map(|v| v.ln()).collect();
        let mean = logs.iter().sum::<f64>() / logs.len() as f64;
        assert!((mean - 3.5).abs() < 3.0 * 0.32 / 100.0, "mean {mean}");
        let var = logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / logs.len() as f64;
        assert!((var.sqrt() - 0.32).abs() < 0.01, "sd {}", var.sqrt());
    }

    #[test]
    fn higher_regime_exceeds_threshold_more_often() {
        for seed in 0..20 {
            let setting = SimulationSetting {
                name: "two".into(),
                regimes: vec![
                    RegimeSpec {
                        mu: 3.5,
                        sigma: 0.32,
                        length: 400,
                    },
                    RegimeSpec {
                        mu: 4.0,
                        sigma: 0.32,
                        length: 400,
                    },
                ],
                seed,
            };
            let series = setting.generate().unwrap();
            let data = series.extract_exceedances(series.mean()).unwrap();
            let first = data.count_at(400);
            let second = data.n() - first;
            assert!(second > first, "seed {seed}: {second} <= {first}");
        }
    }

    #[test]
    fn frozen_seed_vector() {
        // Guards the RNG pipeline against silent changes; regenerate by
        // printing the first three values if the sampler is deliberately
        // swapped.
        let setting = preset("1cp").unwrap();
        let series = setting.generate_with_seed(7).unwrap();
        let got: Vec<f64> = series.values()[..3].to_vec();
        let expected = [FROZEN_0, FROZEN_1, FROZEN_2];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-9, "{got:?}");
        }
    }

    // Filled in from the first run of the generator; see frozen_seed_vector.
    const FROZEN_0: f64 = 25.838896719014418;
    const FROZEN_1: f64 = 21.270157832178004;
    const FROZEN_2: f64 = 44.02282132778242;
}
