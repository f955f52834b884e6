//! Parallel against sequential execution of the heavy kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use homsob::direct_norms::{bmo_norm, BallSamplingPlan};
use homsob::exec;
use homsob::field::{Field, GridSpec};
use homsob::multiplier::frac_laplacian;
use homsob::oracles::corpus::{default_projection_radius, TestFunction};
use homsob::oracles::{make_test_function, riesz_potential_direct, s_infty_project};

fn projected_hg(grid: &GridSpec, sigma: f64) -> Field {
    let f = make_test_function(&TestFunction::HermiteGaussian { order: 4, sigma }, grid).unwrap();
    s_infty_project(&f, default_projection_radius(grid)).unwrap()
}

fn modes<R>(c: &mut Criterion, group: &str, input: &str, run: impl Fn() -> R) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("parallel", input), |b| b.iter(|| black_box(run())));
    g.bench_function(BenchmarkId::new("sequential", input), |b| {
        b.iter(|| exec::sequential(|| black_box(run())))
    });
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let grid = GridSpec::new(3, 10.0, 64).unwrap();
    let f = projected_hg(&grid, 1.0);
    modes(c, "frac_laplacian", "d3_n64", || frac_laplacian(&f, 1.3).unwrap());
}

fn direct_sum(c: &mut Criterion) {
    let grid = GridSpec::desk(1).unwrap();
    let f = projected_hg(&grid, 0.5);
    modes(c, "riesz_potential_direct", "d1_n512", || {
        riesz_potential_direct(&f, 0.5).unwrap()
    });
}

fn ball_sweep(c: &mut Criterion) {
    let grid = GridSpec::desk(2).unwrap();
    let f = projected_hg(&grid, 0.8);
    let plan = BallSamplingPlan::default_for(&grid).unwrap();
    modes(c, "bmo_norm", "d2_desk", || bmo_norm(&f, &plan).unwrap());
}

criterion_group!(benches, spectral, direct_sum, ball_sweep);
criterion_main!(benches);
