//! `cpdetect`: simulate exceedance series, detect change-points with the
//! Bayesian-MDL genetic search, and compare against baseline detectors.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use cpdetect_core::baselines::{cusum, estimate_sigma, pelt, run_freq_mdl_ga, CusumConfig, PeltConfig};
use cpdetect_core::report::{write_plot_csv, InputSummary, RunConfig};
use cpdetect_core::series::{read_series_csv_path, write_series_csv};
use cpdetect_core::{
    preset, run_ga, DetectionResult, GaConfig, Hyperparams, IntensityFamily, MeasurementSeries,
    MutationScheme, SPEC_VERSION,
};

#[derive(Parser)]
#[command(
    name = "cpdetect",
    version,
    about = "Multiple change-point detection for threshold-exceedance series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a bundled simulation setting as CSV.
    Simulate(SimulateArgs),
    /// Run the Bayesian-MDL genetic search on a CSV series.
    Detect(DetectArgs),
    /// Run several detectors side by side.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Setting name: 1cp, 2cp, 3cp, J10, J20 or J50.
    #[arg(long)]
    setting: String,
    /// Generation seed; defaults to the setting's bundled seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct GaArgs {
    /// Threshold: a number, `mean`, or `norm37`.
    #[arg(long, default_value = "mean")]
    threshold: String,
    /// Intensity family: weibull, musa-okumoto, goel-okumoto or ggo.
    #[arg(long, default_value = "weibull")]
    family: String,
    #[arg(long, default_value_t = 50)]
    generations: usize,
    #[arg(long, default_value_t = 50)]
    pop: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.06)]
    init_prob: f64,
    /// Mutation: `w,x,y` shift weights for -1/0/+1, or a single rate `p`
    /// under which each point mutates and then moves +-1 evenly.
    #[arg(long, default_value = "0.4,0.3,0.4")]
    mutation: String,
    /// Probability of keeping each pooled parent point during crossover.
    #[arg(long, default_value_t = 0.5)]
    keep_prob: f64,
    /// Gamma prior hyperparameters `a,b,c,d` or `a,b,c,d,e,f`.
    #[arg(long)]
    hyper: Option<String>,
    /// `on` or `off`.
    #[arg(long, default_value = "on")]
    elitism: String,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Optional tidy CSV with the four panel series.
    #[arg(long)]
    plot_data: Option<PathBuf>,
    #[command(flatten)]
    ga: GaArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma list from: ga, pelt, cusum, freqmdl.
    #[arg(long, default_value = "ga,pelt,cusum,freqmdl")]
    methods: String,
    #[command(flatten)]
    ga: GaArgs,
}

fn main() {
    env_logger::init();
    if let Err(err) = run() {
        // Machine-readable failure on stderr.
        eprintln!("{}", serde_json::json!({ "error": format!("{err:#}") }));
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    configure_workers()?;
    match Cli::parse().command {
        Command::Simulate(args) => simulate(args),
        Command::Detect(args) => detect(args),
        Command::Compare(args) => compare(args),
    }
}

/// `CPDETECT_WORKERS` caps the fitness worker pool; results are identical
/// for any value.
fn configure_workers() -> Result<()> {
    if let Ok(raw) = std::env::var("CPDETECT_WORKERS") {
        let n: usize = raw
            .parse()
            .with_context(|| format!("CPDETECT_WORKERS must be a positive integer, got `{raw}`"))?;
        if n == 0 {
            bail!("CPDETECT_WORKERS must be >= 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("worker pool already initialized")?;
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let setting = preset(&args.setting)?;
    let series = match args.seed {
        Some(seed) => setting.generate_with_seed(seed),
        None => setting.generate(),
    }?;
    let mut buf = Vec::new();
    write_series_csv(&series, &mut buf)?;
    write_atomic(&args.out, &buf)?;
    println!(
        "wrote {} rows ({} regimes, true change-points {:?})",
        series.len(),
        setting.regimes.len(),
        setting.change_points()
    );
    Ok(())
}

fn resolve_threshold(spec: &str, series: &MeasurementSeries) -> Result<f64> {
    match spec {
        "mean" => Ok(series.mean()),
        "norm37" => Ok(37.0),
        other => other
            .parse()
            .with_context(|| format!("threshold must be a number, `mean` or `norm37`, got `{other}`")),
    }
}

fn parse_mutation(spec: &str) -> Result<MutationScheme> {
    let parts: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("mutation must be `w,x,y` or a single rate, got `{spec}`"))?;
    match parts.as_slice() {
        [rate] => Ok(MutationScheme::rate(*rate)?),
        [down, stay, up] => Ok(MutationScheme::shift(*down, *stay, *up)?),
        _ => bail!("mutation takes one or three comma-separated values, got {}", parts.len()),
    }
}

fn parse_hyper(spec: Option<&str>) -> Result<Hyperparams> {
    let mut hyper = Hyperparams::default();
    if let Some(spec) = spec {
        let parts: Vec<f64> = spec
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("hyper must be 4 or 6 comma-separated numbers, got `{spec}`"))?;
        match parts.as_slice() {
            [a, b, c, d] => {
                hyper = Hyperparams {
                    phi11: *a,
                    phi12: *b,
                    phi21: *c,
                    phi22: *d,
                    ..hyper
                };
            }
            [a, b, c, d, e, f] => {
                hyper = Hyperparams {
                    phi11: *a,
                    phi12: *b,
                    phi21: *c,
                    phi22: *d,
                    phi31: *e,
                    phi32: *f,
                };
            }
            _ => bail!("hyper takes 4 or 6 values, got {}", parts.len()),
        }
    }
    hyper.validate()?;
    Ok(hyper)
}

fn parse_elitism(spec: &str) -> Result<bool> {
    match spec {
        "on" => Ok(true),
        "off" => Ok(false),
        other => bail!("elitism must be `on` or `off`, got `{other}`"),
    }
}

struct GaSetup {
    family: IntensityFamily,
    threshold: f64,
    hyper: Hyperparams,
    config: GaConfig,
    mutation_label: String,
}

fn build_ga_setup(args: &GaArgs, series: &MeasurementSeries) -> Result<GaSetup> {
    let family = IntensityFamily::parse(&args.family)?;
    let threshold = resolve_threshold(&args.threshold, series)?;
    let hyper = parse_hyper(args.hyper.as_deref())?;
    let mutation = parse_mutation(&args.mutation)?;
    let config = GaConfig {
        population_size: args.pop,
        generations: args.generations,
        init_prob: args.init_prob,
        mutation,
        crossover_keep_prob: args.keep_prob,
        seed: args.seed,
        elitism: parse_elitism(&args.elitism)?,
        ..GaConfig::default()
    };
    config.validate()?;
    Ok(GaSetup {
        family,
        threshold,
        hyper,
        config,
        mutation_label: args.mutation.clone(),
    })
}

fn detect(args: DetectArgs) -> Result<()> {
    let series = read_series_csv_path(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let setup = build_ga_setup(&args.ga, &series)?;
    let data = series.extract_exceedances(setup.threshold)?;

    let history = run_ga(&data, setup.family, &setup.hyper, &setup.config)?;
    let result = DetectionResult::from_history(
        &history,
        &data,
        setup.family,
        InputSummary {
            path: args.input.display().to_string(),
            rows: series.len(),
            threshold: setup.threshold,
            exceedances: data.n(),
        },
        RunConfig {
            family: setup.family.name().to_string(),
            generations: setup.config.generations,
            population: setup.config.population_size,
            seed: setup.config.seed,
            init_prob: setup.config.init_prob,
            mutation: setup.mutation_label.clone(),
            crossover_keep_prob: setup.config.crossover_keep_prob,
            elitism: setup.config.elitism,
            hyper: vec![
                setup.hyper.phi11,
                setup.hyper.phi12,
                setup.hyper.phi21,
                setup.hyper.phi22,
                setup.hyper.phi31,
                setup.hyper.phi32,
            ],
        },
    )?;

    write_atomic(&args.out, result.to_json().as_bytes())?;
    if let Some(plot_path) = &args.plot_data {
        let mut buf = Vec::new();
        write_plot_csv(&result.plot_rows(&data), &mut buf)?;
        write_atomic(plot_path, &buf)?;
    }
    println!(
        "best J={} tau={:?} bmdl={:.4} (generation {})",
        result.best.j, result.best.tau, result.best.bmdl, result.best.generation
    );
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct CompareOutput {
    spec_version: String,
    input: InputSummary,
    methods: CompareMethods,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CompareMethods {
    #[serde(skip_serializing_if = "Option::is_none")]
    ga: Option<GaSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pelt: Option<PeltSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cusum: Option<CusumSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    freqmdl: Option<FreqMdlSummary>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GaSummary {
    tau: Vec<usize>,
    j: usize,
    bmdl: f64,
    generation: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct PeltSummary {
    tau: Vec<usize>,
    j: usize,
    beta: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CusumSummary {
    alarm_count: usize,
    change_points: Vec<usize>,
    k: f64,
    h: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct FreqMdlSummary {
    tau: Vec<usize>,
    j: usize,
    mdl: f64,
}

fn compare(args: CompareArgs) -> Result<()> {
    let series = read_series_csv_path(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let setup = build_ga_setup(&args.ga, &series)?;
    let data = series.extract_exceedances(setup.threshold)?;

    let mut methods = CompareMethods::default();
    for method in args.methods.split(',').map(str::trim) {
        match method {
            "ga" => {
                let history = run_ga(&data, setup.family, &setup.hyper, &setup.config)?;
                let best = history.best();
                methods.ga = Some(GaSummary {
                    tau: best.config.tau().to_vec(),
                    j: best.config.j(),
                    bmdl: best.score,
                    generation: history.best_generation + 1,
                });
            }
            "pelt" => {
                let cfg = PeltConfig::default();
                let tau = pelt(&series, &cfg)?;
                methods.pelt = Some(PeltSummary {
                    j: tau.len(),
                    tau,
                    beta: 2.0 * (series.len() as f64).ln(),
                });
            }
            "cusum" => {
                let mu0 = series.mean();
                let sigma = estimate_sigma(&series, mu0);
                let result = cusum(
                    &series,
                    &CusumConfig {
                        k: sigma / 2.0,
                        ..CusumConfig::default()
                    },
                )?;
                methods.cusum = Some(CusumSummary {
                    alarm_count: result.alarms.len(),
                    change_points: result.change_points,
                    k: result.k,
                    h: result.h,
                });
            }
            "freqmdl" => {
                let history = run_freq_mdl_ga(&series, &setup.config)?;
                let best = history.best();
                methods.freqmdl = Some(FreqMdlSummary {
                    tau: best.config.tau().to_vec(),
                    j: best.config.j(),
                    mdl: best.score,
                });
            }
            other => bail!("unknown method `{other}`; expected ga, pelt, cusum or freqmdl"),
        }
    }

    let output = CompareOutput {
        spec_version: SPEC_VERSION.to_string(),
        input: InputSummary {
            path: args.input.display().to_string(),
            rows: series.len(),
            threshold: setup.threshold,
            exceedances: data.n(),
        },
        methods,
    };
    let mut text = serde_json::to_string_pretty(&output)?;
    text.push('\n');
    write_atomic(&args.out, text.as_bytes())?;
    println!("compared [{}] on {} rows", args.methods, series.len());
    Ok(())
}

/// Writes via a temp file in the target directory plus an atomic rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .context("creating temporary file")?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
