use criterion::{criterion_group, criterion_main, Criterion};
use loewner_core::types::geometric_grid;
use loewner_core::*;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::hint::black_box;

fn flow(c: &mut Criterion) {
    let cfg = NumericConfig::default();
    let sqrt = DrivingFunction::sqrt(3.0, 1.0).unwrap();
    let arc = DrivingFunction::arc();
    c.bench_function("singular_pair/sqrt", |b| b.iter(|| singular_pair(&sqrt, black_box(1.0), &cfg).unwrap()));
    c.bench_function("singular_pair/arc", |b| b.iter(|| singular_pair(&arc, black_box(1e-3), &cfg).unwrap()));
    c.bench_function("trace_tip/sqrt", |b| b.iter(|| trace_tip(&sqrt, black_box(1.0), &cfg).unwrap()));
    c.bench_function("evolve_point/sqrt", |b| {
        b.iter(|| evolve_point(black_box(Complex64::new(0.5, 0.5)), &sqrt, 1.0, &cfg).unwrap())
    });
    let mut grid = geometric_grid(1.0, 1e-6, 256).unwrap();
    grid.reverse();
    c.bench_function("compute_trace/sqrt-256", |b| b.iter(|| compute_trace(&sqrt, black_box(&grid), &cfg).unwrap()));
}

fn welding(c: &mut Criterion) {
    let cfg = NumericConfig::default();
    let line = generate_curve(&CurveSpec::Line { theta: PI / 3.0, length: 1.0 }, 1024).unwrap();
    let arc = generate_curve(&CurveSpec::Arc { phi_max: 0.5 }, 1024).unwrap();
    let mut group = c.benchmark_group("weld-1024");
    group.sample_size(20);
    group.bench_function("line/geodesic", |b| b.iter(|| compute_driving(black_box(&line), &cfg).unwrap()));
    group.bench_function("arc/geodesic", |b| b.iter(|| compute_driving(black_box(&arc), &cfg).unwrap()));
    group.bench_function("line/tilted", |b| {
        b.iter(|| compute_driving_with(black_box(&line), &cfg, ElementaryMap::TiltedSlit).unwrap())
    });
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let cfg = NumericConfig::default();
    c.bench_function("arc_params", |b| b.iter(|| arc_params(black_box(1e-6), &cfg).unwrap()));
    let grid = geometric_grid(1e-2, 1e-6, 9).unwrap();
    c.bench_function("sweep_theorem1/sqrt", |b| {
        b.iter(|| sweep_theorem1(RatioSource::Sqrt(3.0), black_box(&grid), &cfg).unwrap())
    });
}

criterion_group!(benches, flow, welding, oracles);
criterion_main!(benches);
