//! Sequential vs parallel replication throughput for both experiment
//! engines, plus the single-fit hot paths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use propsim_core::datagen::{simulate_long, ScenarioLabel, ScenarioSpec, CALIBRATED_SCHEDULE};
use propsim_core::harness::{run_cross_experiment, run_long_experiment, CrossConfig, LongConfig};
use propsim_core::lfit::{fit_clda_prop, fit_clda_slope, MixedModelSpec, PropOptions};
use propsim_core::parallel::Workers;
use propsim_core::rng::RngStream;

fn cross_cfg(reps: usize, workers: Workers) -> CrossConfig {
    CrossConfig {
        beta_c_grid: vec![-0.5, -100.0],
        delta_grid: vec![-0.3, 0.0, 0.3],
        n_per_group: 50,
        residual_var: 1.0,
        reps,
        master_seed: 99,
        workers,
    }
}

fn long_cfg(reps: usize, workers: Workers) -> LongConfig {
    LongConfig {
        scenarios: vec![ScenarioLabel::A, ScenarioLabel::D],
        schedule: CALIBRATED_SCHEDULE.to_vec(),
        n_per_group: 200,
        residual_var: 1.5,
        intercept_var: 2.0,
        reps,
        master_seed: 99,
        workers,
    }
}

fn bench_cross(c: &mut Criterion) {
    let mut group = c.benchmark_group("cross_experiment");
    group.sample_size(10);
    for (name, workers) in [
        ("sequential", Workers::Fixed(1)),
        ("parallel", Workers::Auto),
    ] {
        group.bench_with_input(BenchmarkId::new(name, 400), &workers, |b, &w| {
            b.iter(|| black_box(run_cross_experiment(&cross_cfg(400, w)).unwrap()));
        });
    }
    group.finish();
}

fn bench_long(c: &mut Criterion) {
    let mut group = c.benchmark_group("long_experiment");
    group.sample_size(10);
    for (name, workers) in [
        ("sequential", Workers::Fixed(1)),
        ("parallel", Workers::Auto),
    ] {
        group.bench_with_input(BenchmarkId::new(name, 20), &workers, |b, &w| {
            b.iter(|| black_box(run_long_experiment(&long_cfg(20, w)).unwrap()));
        });
    }
    group.finish();
}

fn bench_single_fits(c: &mut Criterion) {
    let spec = ScenarioSpec::with_defaults(ScenarioLabel::A, &CALIBRATED_SCHEDULE).unwrap();
    let mut stream = RngStream::new(7, 0);
    let data = simulate_long(&spec, &mut stream);
    let slope_spec = MixedModelSpec::slope(&CALIBRATED_SCHEDULE);
    let prop_spec = MixedModelSpec::proportional(&CALIBRATED_SCHEDULE);
    c.bench_function("fit_clda_slope_n200", |b| {
        b.iter(|| black_box(fit_clda_slope(&data, &slope_spec).unwrap()))
    });
    c.bench_function("fit_clda_prop_n200", |b| {
        b.iter(|| black_box(fit_clda_prop(&data, &prop_spec, &PropOptions::default()).unwrap()))
    });
}

criterion_group!(benches, bench_cross, bench_long, bench_single_fits);
criterion_main!(benches);
