use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tenstruct::{
    alpha_estimate, classify, p_classify, z_eigenpairs, EigenConfig, GenClass, Operator, SearchConfig, Tolerance,
};
use tenstruct_bench::{fixture, point};

fn contraction(c: &mut Criterion) {
    let mut group = c.benchmark_group("contract_once");
    for (m, n) in [(3, 10), (4, 10), (4, 30), (6, 8)] {
        let a = fixture(GenClass::General, m, n);
        let x = point(n);
        group.bench_with_input(BenchmarkId::from_parameter(format!("m{m}_n{n}")), &a, |b, a| {
            b.iter(|| a.contract_once(black_box(&x)).unwrap())
        });
    }
    group.finish();
}

fn structure(c: &mut Criterion) {
    let a = fixture(GenClass::B, 4, 20);
    c.bench_function("classify/m4_n20", |b| b.iter(|| classify(black_box(&a), Tolerance::EXACT).unwrap()));
}

fn alpha(c: &mut Criterion) {
    let mut group = c.benchmark_group("alpha_grid");
    group.sample_size(10);
    for (m, n, h) in [(2, 3, 0.02), (4, 3, 0.05), (3, 4, 0.1)] {
        let a = fixture(GenClass::General, m, n);
        let cfg = SearchConfig::grid(h);
        group.bench_function(format!("m{m}_n{n}_h{h}"), |b| {
            b.iter(|| alpha_estimate(black_box(&a), Operator::T, &cfg).unwrap())
        });
    }
    group.finish();
}

fn p_check(c: &mut Criterion) {
    let mut group = c.benchmark_group("p_classify");
    group.sample_size(10);
    let a = fixture(GenClass::ZDiagDominated, 4, 3);
    group.bench_function("grid/m4_n3", |b| b.iter(|| p_classify(black_box(&a), &SearchConfig::grid(0.05)).unwrap()));
    let cfg = SearchConfig::multistart(32, 200, 0);
    group.bench_function("multistart/m4_n5", |b| {
        let a = fixture(GenClass::ZDiagDominated, 4, 5);
        b.iter(|| p_classify(black_box(&a), &cfg).unwrap())
    });
    group.finish();
}

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("z_eigenpairs");
    group.sample_size(10);
    let cfg = EigenConfig::default();
    for (m, n) in [(4, 2), (4, 4), (3, 5)] {
        let a = fixture(GenClass::Symmetric, m, n);
        group.bench_function(format!("m{m}_n{n}"), |b| b.iter(|| z_eigenpairs(black_box(&a), &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, contraction, structure, alpha, p_check, eigen);
criterion_main!(benches);
