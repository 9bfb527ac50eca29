use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tgc_bench::{pair, staircase};
use tgc_core::{exp_integral, reinhardt_volume, sweep, Budget, GeodesicSpec, Method, TGrid};

fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("exp_integral_quadrature");
    group.sample_size(10);
    for dim in 2..=4 {
        let q = staircase(dim);
        let budget = Budget::default();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &q, |b, q| {
            b.iter(|| exp_integral(black_box(q), Method::Quadrature, &budget).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo_100k");
    group.sample_size(10);
    for dim in 2..=4 {
        let q = staircase(dim);
        let budget = Budget::default().with_samples(100_000);
        group.bench_with_input(BenchmarkId::new("exp_integral", dim), &q, |b, q| {
            b.iter(|| exp_integral(black_box(q), Method::MonteCarlo, &budget).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("volume", dim), &q, |b, q| {
            b.iter(|| reinhardt_volume(black_box(q), Method::MonteCarlo, &budget).unwrap())
        });
    }
    group.finish();
}

fn geodesic(c: &mut Criterion) {
    let mut group = c.benchmark_group("geodesic_value");
    for dim in 1..=4 {
        let (q0, q1) = pair(dim);
        let spec = GeodesicSpec::new(q0, q1, 0.3).unwrap();
        let s = vec![-1.2; dim];
        group.bench_with_input(BenchmarkId::from_parameter(dim), &s, |b, s| {
            b.iter(|| spec.geodesic_value(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn capacity_sweep(c: &mut Criterion) {
    let (q0, q1) = pair(3);
    let grid = TGrid::default();
    let budget = Budget::default();
    c.bench_function("sweep_21_points_dim3", |b| {
        b.iter(|| sweep(black_box(&q0), &q1, &grid, Method::Auto, &budget).unwrap())
    });
}

criterion_group!(benches, quadrature, monte_carlo, geodesic, capacity_sweep);
criterion_main!(benches);
