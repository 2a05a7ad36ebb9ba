//! PELT against exhaustive oracles: full enumeration of every segmentation
//! for tiny series and pruning-free dynamic programming for larger ones.

use cpdetect_core::baselines::{pelt, PeltConfig, PeltCost};
use cpdetect_core::MeasurementSeries;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Twice the negative Gaussian log-likelihood with segment means and a
/// global first-difference variance, transcribed independently of the
/// library.
struct Cost {
    x: Vec<f64>,
    sigma2: f64,
}

impl Cost {
    fn new(x: &[f64]) -> Self {
        let diff_sq: f64 = x.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
        Self {
            x: x.to_vec(),
            sigma2: diff_sq / (2.0 * (x.len() as f64 - 1.0)),
        }
    }

    fn segment(&self, a: usize, b: usize) -> f64 {
        let slice = &self.x[a..b];
        let len = slice.len() as f64;
        let mean = slice.iter().sum::<f64>() / len;
        let rss: f64 = slice.iter().map(|v| (v - mean).powi(2)).sum();
        rss / self.sigma2 + len * (2.0 * std::f64::consts::PI * self.sigma2).ln()
    }
}

/// Cheapest segmentation by brute force over all 2^(T−1) split patterns.
fn enumerate_best(x: &[f64], beta: f64) -> Vec<usize> {
    let cost = Cost::new(x);
    let n = x.len();
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 0u32..(1 << (n - 1)) {
        let mut cps = Vec::new();
        for bit in 0..(n - 1) {
            if mask & (1 << bit) != 0 {
                cps.push(bit + 1);
            }
        }
        let mut total = beta * cps.len() as f64;
        let mut prev = 0usize;
        for &cp in &cps {
            total += cost.segment(prev, cp);
            prev = cp;
        }
        total += cost.segment(prev, n);
        if total < best.0 {
            best = (total, cps);
        }
    }
    best.1
}

/// Optimal partitioning without the pruning step.
fn unpruned_dp(x: &[f64], beta: f64) -> Vec<usize> {
    let cost = Cost::new(x);
    let n = x.len();
    let mut f = vec![f64::INFINITY; n + 1];
    f[0] = -beta;
    let mut last = vec![0usize; n + 1];
    for s in 1..=n {
        for t in 0..s {
            let v = f[t] + cost.segment(t, s) + beta;
            if v < f[s] {
                f[s] = v;
                last[s] = t;
            }
        }
    }
    let mut cps = Vec::new();
    let mut t = last[n];
    while t > 0 {
        cps.push(t);
        t = last[t];
    }
    cps.reverse();
    cps
}

fn random_shifted_series(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut level = 0.0;
    (0..len)
        .map(|i| {
            if i > 0 && rng.gen_bool(0.04) {
                level += rng.gen_range(-4.0..4.0);
            }
            level + rng.gen_range(-0.5..0.5)
        })
        .collect()
}

#[test]
fn matches_full_enumeration_on_tiny_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..25 {
        let len = rng.gen_range(4..=12usize);
        let values = random_shifted_series(&mut rng, len);
        let beta = 2.0 * (len as f64).ln();
        let cfg = PeltConfig {
            cost: PeltCost::GaussianRaw,
            ..PeltConfig::default()
        };
        let got = pelt(&MeasurementSeries::new(values.clone()).unwrap(), &cfg).unwrap();
        let want = enumerate_best(&values, beta);
        assert_eq!(got, want, "trial {trial}: {values:?}");
    }
}

#[test]
fn matches_unpruned_dp_up_to_t16_exhaustively_seeded() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for len in 4..=16usize {
        for _ in 0..5 {
            let values = random_shifted_series(&mut rng, len);
            let cfg = PeltConfig {
                cost: PeltCost::GaussianRaw,
                ..PeltConfig::default()
            };
            let got = pelt(&MeasurementSeries::new(values.clone()).unwrap(), &cfg).unwrap();
            let want = unpruned_dp(&values, 2.0 * (len as f64).ln());
            assert_eq!(got, want, "len {len}");
        }
    }
}

#[test]
fn pruning_never_changes_the_optimum_up_to_t200() {
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    for trial in 0..15 {
        let len = rng.gen_range(20..=200usize);
        let values = random_shifted_series(&mut rng, len);
        let cfg = PeltConfig {
            cost: PeltCost::GaussianRaw,
            ..PeltConfig::default()
        };
        let got = pelt(&MeasurementSeries::new(values.clone()).unwrap(), &cfg).unwrap();
        let want = unpruned_dp(&values, 2.0 * (len as f64).ln());
        assert_eq!(got, want, "trial {trial} len {len}");
    }
}
