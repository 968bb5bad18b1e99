use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rhombs::diagnostics::{special_corner_scan, ScanConfig};
use rhombs::par;
use rhombs::solver::SolverConfig;
use rhombs::sweep::{direction_sweep, random_frame};
use rhombs::ConvexBody;

fn sweep(c: &mut Criterion) {
    let body = ConvexBody::superellipsoid(4.0, &[1.0, 1.5, 2.0, 1.2]).unwrap();
    let config = SolverConfig::default();
    let mut group = c.benchmark_group("direction_sweep");
    group.sample_size(10);
    let threads = par::current_threads();
    for (label, t) in [("sequential", 1), ("pool", threads)] {
        group.bench_with_input(BenchmarkId::new(label, t), &t, |b, &t| {
            b.iter(|| par::with_threads(t, || direction_sweep(black_box(&body), 64, 0, &config).unwrap()))
        });
    }
    group.finish();
}

fn corner_scan(c: &mut Criterion) {
    let body = ConvexBody::superellipsoid(3.0, &[1.0, 1.3, 0.8]).unwrap();
    let frame = random_frame(3, 11).unwrap();
    let scan = ScanConfig { resolution: 16, ..ScanConfig::default() };
    let mut group = c.benchmark_group("special_corner_scan");
    group.sample_size(10);
    let threads = par::current_threads();
    for (label, t) in [("sequential", 1), ("pool", threads)] {
        group.bench_with_input(BenchmarkId::new(label, t), &t, |b, &t| {
            b.iter(|| par::with_threads(t, || special_corner_scan(black_box(&body), &frame, &scan).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, corner_scan);
criterion_main!(benches);
