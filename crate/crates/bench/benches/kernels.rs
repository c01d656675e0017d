use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fcount::distributions::{pmf_fppk, pmf_polya_aeppli_order_k};
use fcount::governing::{residual_nonhomogeneous, solve_fractional_master, NonhomogeneousSpec};
use fcount::specfun::{inv_subordinator_density, mittag_leffler};
use fcount::{ensemble, GeneratorSpec, ProcessSpec, RateFunction, SimOptions};

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("specfun");
    for &z in &[-0.5, -5.0, -50.0] {
        g.bench_with_input(BenchmarkId::new("mittag_leffler_0.7", z), &z, |b, &z| {
            b.iter(|| mittag_leffler(0.7, 1.0, black_box(z)).unwrap())
        });
    }
    g.bench_function("inv_subordinator_density", |b| {
        b.iter(|| inv_subordinator_density(0.7, 1.0, black_box(0.8)).unwrap())
    });
    g.finish();
}

fn marginals(c: &mut Criterion) {
    let mut g = c.benchmark_group("pmf");
    g.bench_function("fppk_k2_m20", |b| {
        b.iter(|| pmf_fppk(2, 1.0, 0.7, black_box(1.5), 20).unwrap())
    });
    g.bench_function("polya_aeppli_k4_m100", |b| {
        b.iter(|| pmf_polya_aeppli_order_k(4, 0.4, black_box(3.0), 100).unwrap())
    });
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("ensemble");
    g.sample_size(10);
    let grid: Vec<f64> = (1..=10).map(|i| i as f64).collect();
    let specs = [
        ("fppk", ProcessSpec::fppk(3, 1.0, 0.95).unwrap()),
        (
            "nfpak",
            ProcessSpec::nfpak(2, 0.4, RateFunction::weibull(1.0, 2.0).unwrap(), 0.7).unwrap(),
        ),
    ];
    for (name, spec) in &specs {
        g.bench_function(format!("{name}_10k_paths_single_time"), |b| {
            b.iter(|| ensemble(42, spec, 10_000, &[10.0], &SimOptions::default()).unwrap())
        });
        g.bench_function(format!("{name}_1k_paths_10_times"), |b| {
            b.iter(|| ensemble(42, spec, 1_000, &grid, &SimOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn governing(c: &mut Criterion) {
    let mut g = c.benchmark_group("governing");
    g.sample_size(10);
    let grid: Vec<f64> = (0..=2000).map(|i| i as f64 / 1000.0).collect();
    let fpak = GeneratorSpec::fpak(2, 0.3, 1.0, 0.7, 10).unwrap();
    g.bench_function("solve_fpak_2000_steps", |b| {
        b.iter(|| solve_fractional_master(&fpak, &grid).unwrap())
    });
    let spec = NonhomogeneousSpec::fnppk(2, RateFunction::weibull(1.0, 2.0).unwrap(), 0.7).unwrap();
    let coarse: Vec<f64> = (0..=250).map(|i| i as f64 / 125.0).collect();
    g.bench_function("residual_fnppk_250_steps", |b| {
        b.iter(|| residual_nonhomogeneous(&spec, 0.0, &coarse, 5, (0.1, 2.0), 1e-8).unwrap())
    });
    g.finish();
}

criterion_group!(benches, special_functions, marginals, simulation, governing);
criterion_main!(benches);
