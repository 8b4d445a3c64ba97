use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use istanbul_core::{
    gic_approx, gic_quadrature, price_mc_with, Execution, IstanbulContract, MarketParams, PayoffKind, SimConfig,
};

fn inputs() -> (MarketParams, IstanbulContract) {
    (MarketParams::new(60.0, 0.05, 0.3, 1.0).unwrap(), IstanbulContract::new(64.0, 63.0).unwrap())
}

fn monte_carlo(c: &mut Criterion) {
    let (market, contract) = inputs();
    let cfg = SimConfig { steps: 500, paths: 4000, seed: 1, use_cv: true };
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| price_mc_with(Execution::Sequential, black_box(&cfg), &market, &contract, PayoffKind::Gic).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| price_mc_with(Execution::Parallel, black_box(&cfg), &market, &contract, PayoffKind::Gic).unwrap())
    });
    group.finish();
}

fn analytic(c: &mut Criterion) {
    let (market, contract) = inputs();
    c.bench_function("approx", |b| b.iter(|| gic_approx(black_box(&market), &contract).unwrap()));
    let mut group = c.benchmark_group("quadrature");
    group.sample_size(10);
    group.bench_function("rel_tol_1e-8", |b| b.iter(|| gic_quadrature(black_box(&market), &contract, 1e-8).unwrap()));
    group.finish();
}

criterion_group!(benches, monte_carlo, analytic);
criterion_main!(benches);
