use chabauty_core::chabauty::quotient_graph;
use chabauty_core::{Engine, GroupSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn stabilizer(c: &mut Criterion) {
    let sym = GroupSpec::preset("t3-sym").unwrap();
    let mut group = c.benchmark_group("stabilizer_profile");
    for r in 1..=3 {
        group.bench_with_input(BenchmarkId::new("t3-sym", r), &r, |b, &r| {
            b.iter(|| Engine::new().stabilizer_profile(&sym, 0, r).unwrap().len())
        });
    }
    group.finish();
}

fn moving(c: &mut Criterion) {
    let sym = GroupSpec::preset("t3-sym").unwrap();
    c.bench_function("moving_profile/t3-sym/r2-d2", |b| {
        b.iter(|| Engine::new().moving_profile(&sym, 0, 2, 2).unwrap().len())
    });
}

fn closure(c: &mut Criterion) {
    let sym = GroupSpec::preset("t3-sym").unwrap();
    let mut group = c.benchmark_group("kclosure_profile");
    for k in 1..=2 {
        group.bench_with_input(BenchmarkId::new("t3-sym-r3", k), &k, |b, &k| {
            b.iter(|| Engine::new().kclosure_profile(&sym, k, 0, 3).unwrap().len())
        });
    }
    group.finish();
}

fn plus_k(c: &mut Criterion) {
    let sym = GroupSpec::preset("t3-sym").unwrap();
    c.bench_function("plus_k_profile/t3-sym/k1-r2", |b| {
        b.iter(|| Engine::new().plus_k_profile(&sym, 1, 0, 2).unwrap().len())
    });
}

fn quotient(c: &mut Criterion) {
    let mut group = c.benchmark_group("quotient_graph");
    for name in ["t3-sym", "t3-intransitive", "valency1"] {
        let spec = GroupSpec::preset(name).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| quotient_graph(&Engine::new(), &spec, 4).unwrap().vertex_count())
        });
    }
    group.finish();
}

criterion_group!(benches, stabilizer, moving, closure, plus_k, quotient);
criterion_main!(benches);
