use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use degpv::laxpair::zero_curvature_residual;
use degpv::monodromy::monodromy_invariants;
use degpv::painleve::{integrate_flow, qp_to_chart};
use degpv::{Complex64, ContourConfig, PState, TPath, Theta};

fn start() -> PState {
    PState {
        q: Complex64::new(0.55, 0.25),
        p: Complex64::new(0.05, -0.1),
        t: Complex64::new(1.0, 0.0),
        theta: Theta::real(0.35, 0.6),
    }
}

fn zero_curvature(c: &mut Criterion) {
    let s = start();
    let p = qp_to_chart(&s).unwrap();
    c.bench_function("zero_curvature_residual", |b| {
        b.iter(|| zero_curvature_residual(black_box(&p), black_box(&s.theta)).unwrap())
    });
}

fn integrate(c: &mut Criterion) {
    let s = start();
    let path = TPath::linear(s.t, Complex64::new(2.0, 0.0), 100).unwrap();
    let mut group = c.benchmark_group("integrate_flow");
    for tol in [1e-8, 1e-10, 1e-12] {
        group.bench_function(format!("tol {tol:e}"), |b| b.iter(|| integrate_flow(black_box(&s), &path, tol).unwrap()));
    }
    group.finish();
}

fn monodromy(c: &mut Criterion) {
    let s = start();
    let p = qp_to_chart(&s).unwrap();
    let cfg = ContourConfig::default();
    c.bench_function("monodromy_invariants", |b| {
        b.iter(|| monodromy_invariants(black_box(&p), &s.theta, &cfg, 1e-10).unwrap())
    });
}

criterion_group!(benches, zero_curvature, integrate, monodromy);
criterion_main!(benches);
