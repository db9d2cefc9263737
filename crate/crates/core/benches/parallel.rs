//! Sequential vs parallel execution of the hot paths.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use trigraph::degree_sequences;
use trigraph::experiments::{self, ExperimentConfig, ModelKind};
use trigraph::graph;
use trigraph::samplers;
use trigraph::theory::importance::{importance_estimate, McTarget};
use trigraph::theory::{self, TriangleKernel};
use trigraph::Exec;

const MODES: [Exec; 2] = [Exec::Sequential, Exec::Parallel];

fn triangles(c: &mut Criterion) {
    let ds = degree_sequences::generate_quantile(50_000, 2.5, 1.0).unwrap();
    let g = samplers::erased_configuration_model(&ds, 1).unwrap();
    let mut group = c.benchmark_group("count_triangles");
    for exec in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| graph::count_triangles(black_box(&g), e))
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let config = ExperimentConfig {
        n_grid: vec![2_000],
        models: vec![ModelKind::Uniform, ModelKind::Ecm],
        replicates: 4,
        rel_tol: 1e-4,
        ..ExperimentConfig::default()
    };
    let mut group = c.benchmark_group("replicate_sweep");
    group.sample_size(10);
    for exec in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| experiments::run_triangle_sweep(black_box(&config), e).unwrap())
        });
    }
    group.finish();
}

fn integrals(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrals");
    group.sample_size(10);
    for exec in MODES {
        let label = format!("{exec:?}");
        group.bench_with_input(BenchmarkId::new("cubature", &label), &exec, |b, &e| {
            b.iter(|| theory::integral_triangle(black_box(2.5), TriangleKernel::Uniform, 1e-5, e).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("monte_carlo", &label), &exec, |b, &e| {
            b.iter(|| importance_estimate(McTarget::TriangleEcm { tau: 2.5 }, 1 << 18, 7, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, triangles, sweep, integrals);
criterion_main!(benches);
