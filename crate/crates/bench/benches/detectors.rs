use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use cpdetect_bench::{setting1_data, setting1_series};
use cpdetect_core::baselines::{cusum, pelt, CusumConfig, PeltConfig};
use cpdetect_core::objective::{bayesian_mdl, fit_segments, FitOptions, Hyperparams};
use cpdetect_core::{
    run_ga, ChangePointConfig, GaConfig, IntensityFamily, SegmentParams,
};

fn bench_objective(c: &mut Criterion) {
    let series = setting1_series();
    let data = setting1_data(&series);
    let config = ChangePointConfig::new(vec![825], series.len()).unwrap();
    let hyper = Hyperparams::default();

    c.bench_function("bayesian_mdl_t1096_j1", |b| {
        let segments = vec![
            SegmentParams::new(1.0, 3.8).unwrap(),
            SegmentParams::new(1.0, 1.2).unwrap(),
        ];
        b.iter(|| {
            bayesian_mdl(
                IntensityFamily::Weibull,
                black_box(&segments),
                black_box(&config),
                black_box(&data),
                &hyper,
            )
            .unwrap()
        })
    });

    c.bench_function("fit_segments_t1096_j1", |b| {
        b.iter(|| {
            fit_segments(
                IntensityFamily::Weibull,
                black_box(&config),
                black_box(&data),
                &hyper,
                &FitOptions::default(),
            )
            .unwrap()
        })
    });
}

fn bench_pelt(c: &mut Criterion) {
    let series = setting1_series();
    c.bench_function("pelt_t1096_log_cost", |b| {
        b.iter(|| pelt(black_box(&series), &PeltConfig::default()).unwrap())
    });
}

fn bench_cusum(c: &mut Criterion) {
    let series = setting1_series();
    c.bench_function("cusum_t1096", |b| {
        b.iter(|| {
            cusum(
                black_box(&series),
                &CusumConfig {
                    k: 10.0,
                    ..CusumConfig::default()
                },
            )
            .unwrap()
        })
    });
}

fn bench_ga(c: &mut Criterion) {
    let series = setting1_series();
    let data = setting1_data(&series);
    let hyper = Hyperparams::default();
    let mut group = c.benchmark_group("ga");
    group.sample_size(10);
    group.bench_function("ga_t1096_10x16", |b| {
        b.iter_batched(
            || GaConfig {
                population_size: 16,
                generations: 10,
                seed: 7,
                ..GaConfig::default()
            },
            |cfg| run_ga(black_box(&data), IntensityFamily::Weibull, &hyper, &cfg).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, bench_objective, bench_pelt, bench_cusum, bench_ga);
criterion_main!(benches);
