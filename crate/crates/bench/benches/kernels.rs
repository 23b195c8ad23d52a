use criterion::{black_box, criterion_group, criterion_main, Criterion};

use tensorange::eigen::{SolverConfig, SolverMethod, Which};
use tensorange::numrange::{BoundKind, RangeConfig};
use tensorange::shape::SubsystemSet;
use tensorange::tensor::{choi_from_blocks, generalized_choi_map, partial_transpose};
use tensorange::{extreme_eigenpair, sample_mu, w_diag_angle, w_diag_ternary, TensorShape};

use tensorange_bench::{random_symmetric_dense, random_symmetric_sparse};

fn bench_eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigen");
    for &dim in &[81usize, 256] {
        let m = random_symmetric_dense(dim, 7);
        let cfg = SolverConfig::default();
        group.bench_function(format!("dense_max_{dim}"), |b| {
            b.iter(|| extreme_eigenpair(black_box(&m), Which::Max, &cfg).unwrap())
        });
    }
    let sparse = random_symmetric_sparse(4096, 20_000, 9);
    let cfg = SolverConfig {
        method: SolverMethod::Iterative,
        ..Default::default()
    };
    group.bench_function("lanczos_max_4096", |b| {
        b.iter(|| extreme_eigenpair(black_box(&sparse), Which::Max, &cfg).unwrap())
    });
    group.finish();
}

fn bench_endpoints(c: &mut Criterion) {
    let mut group = c.benchmark_group("endpoints");
    group.sample_size(20);
    let cfg = RangeConfig::default();
    let shape = TensorShape::bipartite(3, 3).unwrap();
    let choi = choi_from_blocks(&generalized_choi_map(0.0));
    group.bench_function("ternary_min_choi_9", |b| {
        b.iter(|| w_diag_ternary(black_box(&choi), &shape, BoundKind::Min, &cfg).unwrap())
    });
    group.bench_function("angle_min_choi_9", |b| {
        b.iter(|| w_diag_angle(black_box(&choi), &shape, BoundKind::Min, &cfg).unwrap())
    });
    let shape16 = TensorShape::bipartite(4, 4).unwrap();
    let dense = random_symmetric_dense(16, 11);
    group.bench_function("ternary_max_dense_16", |b| {
        b.iter(|| w_diag_ternary(black_box(&dense), &shape16, BoundKind::Max, &cfg).unwrap())
    });
    group.finish();
}

fn bench_tensor_ops(c: &mut Criterion) {
    let mut group = c.benchmark_group("tensor");
    let shape = TensorShape::bipartite(200, 200).unwrap();
    let sparse = random_symmetric_sparse(40_000, 50_000, 13);
    let second = SubsystemSet::from_factors(&[2], 2).unwrap();
    group.bench_function("partial_transpose_sparse_1e5", |b| {
        b.iter(|| partial_transpose(black_box(&sparse), &shape, &second).unwrap())
    });
    group.sample_size(10);
    group.bench_function("sample_mu_1000_sparse", |b| {
        b.iter(|| sample_mu(black_box(&sparse), &shape, 1000, 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_eigen, bench_endpoints, bench_tensor_ops);
criterion_main!(benches);
