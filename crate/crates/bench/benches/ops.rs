//! Benchmarks for the hot paths: closed-form powers vs iteration,
//! right-inverse construction, coefficient tables, scans, and the
//! dense oracle.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use latshift::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::hint::black_box;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A dense-ish test vector on the m-row strip.
fn strip_vector(m: u32, cols: i64) -> SparseVector<BigRational> {
    let model = GraphModel::Strip { m };
    let mut f = SparseVector::zero(model);
    for i in 1..=i64::from(m) {
        for j in 1..=cols {
            f.add_assign_at(Vertex::grid(i, j), rat(i + j, 1 + (i * j) % 7))
                .unwrap();
        }
    }
    f
}

fn bench_powers(c: &mut Criterion) {
    let mut group = c.benchmark_group("power");
    let f = strip_vector(3, 12);
    let model = GraphModel::Strip { m: 3 };
    for n in [4u32, 16, 64] {
        group.bench_with_input(BenchmarkId::new("closed", n), &n, |b, &n| {
            b.iter(|| power_closed(model, black_box(&f), n).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("iterated", n), &n, |b, &n| {
            b.iter(|| power_apply(model, black_box(&f), n).unwrap())
        });
    }
    group.finish();
}

fn bench_alpha_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("alpha-table");
    for (m, n) in [(3u32, 50u32), (5, 50), (5, 200)] {
        group.bench_function(BenchmarkId::new("build", format!("m{m}-n{n}")), |b| {
            b.iter(|| AlphaTable::build(black_box(m), black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn bench_right_inverse(c: &mut Criterion) {
    let mut group = c.benchmark_group("right-inverse");
    let f = strip_vector(3, 8);
    for n in [8u32, 32] {
        group.bench_with_input(BenchmarkId::new("strip", n), &n, |b, &n| {
            b.iter(|| right_inverse_strip(black_box(&f), n).unwrap())
        });
    }

    let mut q = SparseVector::zero(GraphModel::Quadrant);
    for i in 0..=6i64 {
        for j in 0..=(6 - i) {
            q.add_assign_at(Vertex::grid(i, j), rat(1 + i, 1 + j))
                .unwrap();
        }
    }
    for n in [8u32, 32] {
        group.bench_with_input(BenchmarkId::new("quadrant", n), &n, |b, &n| {
            b.iter(|| right_inverse_quadrant(black_box(&q), n, None).unwrap())
        });
    }
    group.finish();
}

fn bench_scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan");
    let family = WeightFamily::GeometricJ {
        base: Param::Exact(rat(1, 2)),
    };
    let config = WitnessConfig::default();
    group.bench_function("strip-witness-200", |b| {
        b.iter(|| strip_criterion(black_box(&family), 2, 200, &config).unwrap())
    });
    let summable = WeightFamily::GeometricSum {
        base: Param::Exact(rat(2, 1)),
    };
    group.bench_function("quadrant-obstruction-60", |b| {
        b.iter(|| quadrant_obstruction_test(black_box(&summable), 60).unwrap())
    });
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    let model = GraphModel::Quadrant;
    let extent = Extent::Diamond { depth: 40 };
    group.bench_function("matrix-build-d40", |b| {
        b.iter(|| truncated_matrix(model, black_box(extent)).unwrap())
    });
    let mat = truncated_matrix(model, extent).unwrap();
    let mut f = SparseVector::zero(model);
    for i in 0..=10i64 {
        for j in 0..=(10 - i) {
            f.add_assign_at(Vertex::grid(i, j), rat(1 + i - j, 3))
                .unwrap();
        }
    }
    group.bench_function("matrix-power-10", |b| {
        b.iter(|| matrix_power_apply(&mat, black_box(&f), 10).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_powers,
    bench_alpha_tables,
    bench_right_inverse,
    bench_scans,
    bench_oracle
);
criterion_main!(benches);
