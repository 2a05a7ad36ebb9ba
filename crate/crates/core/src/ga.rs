//! Genetic search over change-point configurations.
//!
//! Chromosomes are `(J, τ_1..τ_J)` configurations. Each generation is scored
//! by a caller-supplied fitness (lower is better), parents are drawn by rank
//! selection, children are built by union crossover followed by ±1 mutation,
//! and the per-generation best is recorded. Fitness evaluations within a
//! generation run in parallel; everything that touches the random stream is
//! sequential, so a fixed seed reproduces the history exactly regardless of
//! the worker count.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nhpp::{ChangePointConfig, IntensityFamily};
use crate::objective::{fit_segments, FitOptions, Hyperparams, ObjectiveValue, SegmentFit};
use crate::series::ExceedanceData;

/// How child change-points are perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MutationScheme {
    /// Every point shifts by −1/0/+1 with the given probabilities.
    Shift { down: f64, stay: f64, up: f64 },
    /// Every point mutates with probability `prob`, then shifts ±1 uniformly.
    Rate { prob: f64 },
}

impl Default for MutationScheme {
    /// The published shift weights (0.4, 0.3, 0.4), normalized.
    fn default() -> Self {
        MutationScheme::shift(0.4, 0.3, 0.4).expect("default weights are valid")
    }
}

impl MutationScheme {
    /// Builds a shift scheme from nonnegative weights, normalizing them to
    /// probabilities. The conventional (0.4, 0.3, 0.4) triple sums to 1.1
    /// and is accepted here as weights.
    pub fn shift(down: f64, stay: f64, up: f64) -> Result<Self> {
        let total = down + stay + up;
        if !(total.is_finite() && total > 0.0) || down < 0.0 || stay < 0.0 || up < 0.0 {
            return Err(Error::invalid_input(
                "shift weights must be nonnegative with a positive sum",
            ));
        }
        Ok(MutationScheme::Shift {
            down: down / total,
            stay: stay / total,
            up: up / total,
        })
    }

    /// The single-rate reading: each point mutates with probability `prob`
    /// and then moves ±1 with even odds.
    pub fn rate(prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&prob) {
            return Err(Error::invalid_input("mutation rate must lie in [0, 1]"));
        }
        Ok(MutationScheme::Rate { prob })
    }
}

/// Genetic algorithm controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    /// Individuals per generation (`k`).
    pub population_size: usize,
    /// Number of generations (`r`).
    pub generations: usize,
    /// Probability that an interior time enters an initial chromosome.
    pub init_prob: f64,
    pub mutation: MutationScheme,
    /// Probability of keeping each point of the deduplicated parent union.
    pub crossover_keep_prob: f64,
    pub seed: u64,
    /// Redraw budget before a duplicate chromosome is accepted anyway.
    pub max_duplicate_retries: usize,
    /// Copy the generation best unchanged into the next generation.
    pub elitism: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 50,
            init_prob: 0.06,
            mutation: MutationScheme::default(),
            crossover_keep_prob: 0.5,
            seed: 0,
            max_duplicate_retries: 20,
            elitism: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 || self.generations == 0 {
            return Err(Error::invalid_input("population size and generations must be >= 1"));
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.init_prob) || !unit(self.crossover_keep_prob) {
            return Err(Error::invalid_input("probabilities must lie in [0, 1]"));
        }
        match self.mutation {
            MutationScheme::Shift { down, stay, up } => {
                if !(unit(down) && unit(stay) && unit(up)) {
                    return Err(Error::invalid_input("mutation probabilities must lie in [0, 1]"));
                }
                if ((down + stay + up) - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid_input(format!(
                        "mutation probabilities must sum to 1, got {}",
                        down + stay + up
                    )));
                }
            }
            MutationScheme::Rate { prob } => {
                if !unit(prob) {
                    return Err(Error::invalid_input("mutation rate must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

/// Best chromosome of one generation together with its fitness payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationBest<P> {
    pub config: ChangePointConfig,
    pub score: f64,
    pub detail: P,
}

/// Full run record: per-generation bests, the index of the overall optimum,
/// and how often each change-point appeared across per-generation bests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaHistory<P> {
    pub generations: Vec<GenerationBest<P>>,
    pub best_generation: usize,
    pub cp_frequency: BTreeMap<usize, usize>,
}

impl<P> GaHistory<P> {
    /// The overall best chromosome across all generations.
    pub fn best(&self) -> &GenerationBest<P> {
        &self.generations[self.best_generation]
    }

    /// Per-generation best scores, in generation order.
    pub fn score_trace(&self) -> Vec<f64> {
        self.generations.iter().map(|g| g.score).collect()
    }
}

/// Fitness payload of the NHPP objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedChromosome {
    pub objective: ObjectiveValue,
    pub fit: SegmentFit,
}

/// Draws the initial population: each interior time in `{2, .., T−1}` joins
/// a chromosome independently with probability `init_prob`. Duplicate
/// chromosomes are redrawn a bounded number of times.
pub fn init_population(
    horizon: usize,
    cfg: &GaConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<ChangePointConfig> {
    let draw = |rng: &mut ChaCha8Rng| {
        let tau: Vec<usize> = (2..horizon)
            .filter(|_| rng.gen_bool(cfg.init_prob))
            .collect();
        ChangePointConfig::new(tau, horizon).expect("ascending interior times are always valid")
    };
    let mut population: Vec<ChangePointConfig> = Vec::with_capacity(cfg.population_size);
    for _ in 0..cfg.population_size {
        let mut candidate = draw(rng);
        let mut retries = 0;
        while population.contains(&candidate) && retries < cfg.max_duplicate_retries {
            candidate = draw(rng);
            retries += 1;
        }
        population.push(candidate);
    }
    population
}

/// Rank-based parent selection. Chromosomes are ordered worst-first (ties
/// keep their population order), the `i`-th in that order gets rank `i+1`,
/// and each parent is drawn with probability rank/Σranks; the father is
/// drawn from the remainder with renormalized ranks.
pub fn rank_select(scores: &[f64], rng: &mut ChaCha8Rng) -> (usize, usize) {
    let k = scores.len();
    assert!(k >= 2, "rank selection needs at least two chromosomes");

    // Worst-first stable order; the best chromosome ends up with rank k.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut rank = vec![0usize; k];
    for (position, &idx) in order.iter().enumerate() {
        rank[idx] = position + 1;
    }

    let total: usize = k * (k + 1) / 2;
    let mother = sample_by_weight(&rank, total, None, rng);
    let father = sample_by_weight(&rank, total - rank[mother], Some(mother), rng);
    (mother, father)
}

fn sample_by_weight(
    rank: &[usize],
    total: usize,
    skip: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> usize {
    debug_assert!(total > 0);
    let mut ticket = rng.gen_range(0..total);
    for (i, &w) in rank.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        if ticket < w {
            return i;
        }
        ticket -= w;
    }
    unreachable!("weights sum to total");
}

/// Union crossover: pool both parents' change-points, drop duplicates, then
/// keep each point independently with `crossover_keep_prob`.
pub fn crossover(
    mother: &ChangePointConfig,
    father: &ChangePointConfig,
    cfg: &GaConfig,
    rng: &mut ChaCha8Rng,
) -> ChangePointConfig {
    debug_assert_eq!(mother.horizon(), father.horizon());
    let mut pool: Vec<usize> = mother
        .tau()
        .iter()
        .chain(father.tau().iter())
        .copied()
        .collect();
    pool.sort_unstable();
    pool.dedup();
    let child: Vec<usize> = pool
        .into_iter()
        .filter(|_| rng.gen_bool(cfg.crossover_keep_prob))
        .collect();
    ChangePointConfig::new(child, mother.horizon())
        .expect("a sorted deduplicated subset of valid points is valid")
}

/// Applies per-point shifts, clamps to the admissible interior range and
/// deduplicates. Factored out so the collision and boundary rules are
/// directly testable.
fn apply_shifts(tau: &[usize], shifts: &[i8], horizon: usize) -> Vec<usize> {
    let mut moved: Vec<usize> = tau
        .iter()
        .zip(shifts)
        .map(|(&t, &s)| {
            let shifted = t as i64 + i64::from(s);
            shifted.clamp(2, horizon as i64 - 1) as usize
        })
        .collect();
    moved.sort_unstable();
    moved.dedup();
    moved
}

/// Mutates each change-point of `child` according to the configured scheme.
pub fn mutate(
    child: &ChangePointConfig,
    cfg: &GaConfig,
    rng: &mut ChaCha8Rng,
) -> ChangePointConfig {
    let shifts: Vec<i8> = child
        .tau()
        .iter()
        .map(|_| match cfg.mutation {
            MutationScheme::Shift { down, stay, .. } => {
                let u: f64 = rng.gen();
                if u < down {
                    -1
                } else if u < down + stay {
                    0
                } else {
                    1
                }
            }
            MutationScheme::Rate { prob } => {
                if rng.gen_bool(prob) {
                    if rng.gen_bool(0.5) {
                        1
                    } else {
                        -1
                    }
                } else {
                    0
                }
            }
        })
        .collect();
    let tau = apply_shifts(child.tau(), &shifts, child.horizon());
    ChangePointConfig::new(tau, child.horizon())
        .expect("clamped sorted deduplicated points are valid")
}

/// Generic generation loop over an arbitrary fitness. `fitness` must be a
/// pure function of the configuration: results are cached per chromosome and
/// evaluated in parallel.
pub fn run_ga_engine<P, F>(horizon: usize, cfg: &GaConfig, fitness: F) -> Result<GaHistory<P>>
where
    P: Clone + Send + Sync,
    F: Fn(&ChangePointConfig) -> (f64, P) + Sync,
{
    cfg.validate()?;
    if horizon < 3 {
        return Err(Error::invalid_input("genetic search needs a horizon of at least 3"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut population = init_population(horizon, cfg, &mut rng);
    let mut cache: HashMap<Vec<usize>, (f64, P)> = HashMap::new();

    let mut history: Vec<GenerationBest<P>> = Vec::with_capacity(cfg.generations);
    let mut cp_frequency: BTreeMap<usize, usize> = BTreeMap::new();

    for _generation in 0..cfg.generations {
        // Evaluate only chromosomes missing from the cache; parallelism
        // never touches the random stream.
        let misses: Vec<ChangePointConfig> = {
            let mut seen: Vec<&ChangePointConfig> = Vec::new();
            population
                .iter()
                .filter(|c| !cache.contains_key(c.tau()))
                .filter(|c| {
                    if seen.contains(c) {
                        false
                    } else {
                        seen.push(c);
                        true
                    }
                })
                .cloned()
                .collect()
        };
        let fresh: Vec<(f64, P)> = misses.par_iter().map(|c| fitness(c)).collect();
        for (config, value) in misses.into_iter().zip(fresh) {
            cache.insert(config.tau().to_vec(), value);
        }

        let scores: Vec<f64> = population
            .iter()
            .map(|c| cache[c.tau()].0)
            .collect();

        let best_idx = (0..population.len())
            .min_by(|&a, &b| scores[a].total_cmp(&scores[b]))
            .expect("population is nonempty");
        let best_config = population[best_idx].clone();
        let (best_score, best_detail) = cache[best_config.tau()].clone();
        for &tau in best_config.tau() {
            *cp_frequency.entry(tau).or_insert(0) += 1;
        }
        history.push(GenerationBest {
            config: best_config.clone(),
            score: best_score,
            detail: best_detail,
        });

        if history.len() == cfg.generations {
            break;
        }

        // Breed the next generation on the sequential stream.
        let mut next: Vec<ChangePointConfig> = Vec::with_capacity(cfg.population_size);
        if cfg.elitism {
            next.push(best_config);
        }
        while next.len() < cfg.population_size {
            let mut child = breed(&population, &scores, cfg, &mut rng);
            let mut retries = 0;
            while next.contains(&child) && retries < cfg.max_duplicate_retries {
                child = breed(&population, &scores, cfg, &mut rng);
                retries += 1;
            }
            if next.contains(&child) {
                log::debug!(
                    "accepting duplicate chromosome after {} retries",
                    cfg.max_duplicate_retries
                );
            }
            next.push(child);
        }
        population = next;
    }

    let best_generation = (0..history.len())
        .min_by(|&a, &b| history[a].score.total_cmp(&history[b].score))
        .expect("at least one generation ran");

    Ok(GaHistory {
        generations: history,
        best_generation,
        cp_frequency,
    })
}

fn breed(
    population: &[ChangePointConfig],
    scores: &[f64],
    cfg: &GaConfig,
    rng: &mut ChaCha8Rng,
) -> ChangePointConfig {
    if population.len() < 2 {
        return mutate(&population[0], cfg, rng);
    }
    let (mother, father) = rank_select(scores, rng);
    let child = crossover(&population[mother], &population[father], cfg, rng);
    mutate(&child, cfg, rng)
}

/// Runs the genetic search with the Bayesian-MDL fitness: every chromosome
/// is scored by fitting its per-segment parameters.
pub fn run_ga(
    data: &ExceedanceData,
    family: IntensityFamily,
    hyper: &Hyperparams,
    cfg: &GaConfig,
) -> Result<GaHistory<FittedChromosome>> {
    run_ga_with_options(data, family, hyper, cfg, &FitOptions::default())
}

/// As [`run_ga`] with explicit inner-optimizer controls.
pub fn run_ga_with_options(
    data: &ExceedanceData,
    family: IntensityFamily,
    hyper: &Hyperparams,
    cfg: &GaConfig,
    fit_opts: &FitOptions,
) -> Result<GaHistory<FittedChromosome>> {
    hyper.validate()?;
    if data.n() == 0 {
        log::warn!("no threshold exceedances in the input; the fit is prior-dominated");
    }
    run_ga_engine(data.horizon(), cfg, |config| {
        let (fit, objective) = fit_segments(family, config, data, hyper, fit_opts)
            .expect("validated inputs cannot fail the segment fit");
        (objective.bmdl, FittedChromosome { objective, fit })
    })
}
