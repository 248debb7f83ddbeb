use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use sbfix_bench::{affine_contraction, grid, point_set, two_point_map};
use sbfix_core::{certify, hausdorff, make_pair_sample, picard_solve, ConditionKind, NormKind, SolveConfig, Vector};

fn bench_hausdorff(c: &mut Criterion) {
    let mut group = c.benchmark_group("hausdorff");
    for n in [10, 100, 500] {
        let a = point_set(1, n, 3);
        let b = point_set(2, n, 3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| hausdorff(black_box(&a), black_box(&b), NormKind::L2).unwrap())
        });
    }
    group.finish();
}

fn bench_certify(c: &mut Criterion) {
    let map = two_point_map();
    let cond = ConditionKind::suzuki_berinde(1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("certify_grid");
    group.sample_size(20);
    for steps in [11, 21] {
        let sample = make_pair_sample(&grid(steps), &map).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(steps), &steps, |bench, _| {
            bench.iter(|| certify(&map, &cond, black_box(&sample), NormKind::L2).unwrap())
        });
    }
    group.finish();
}

fn bench_picard(c: &mut Criterion) {
    let mut group = c.benchmark_group("picard_solve");
    for dim in [3, 10, 50] {
        let map = affine_contraction(3, dim);
        let cfg = SolveConfig::new(Vector::new(vec![50.0; dim]).unwrap())
            .tol(1e-10)
            .max_iter(10_000);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |bench, _| {
            bench.iter(|| picard_solve(&map, 1.0, black_box(&cfg), NormKind::L2).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_hausdorff, bench_certify, bench_picard);
criterion_main!(benches);
