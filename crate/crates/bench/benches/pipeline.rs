use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use netroles::equivalence::automorphic_orbits;
use netroles::roles::rank_search;
use netroles::{learn_features, LearnConfig, SelectConfig};
use netroles_bench::{planted, sparse_graph};

fn learn(c: &mut Criterion) {
    let mut group = c.benchmark_group("learn_features");
    let config = LearnConfig {
        lambda: 0.9,
        ..LearnConfig::default()
    };
    for n in [100, 1000, 5000] {
        let g = sparse_graph(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| learn_features(g, &config).unwrap())
        });
    }
    group.finish();
}

fn select(c: &mut Criterion) {
    let g = planted(0);
    let x = learn_features(&g, &LearnConfig::default())
        .unwrap()
        .features;
    c.bench_function("rank_search/planted", |b| {
        b.iter(|| rank_search(x.values(), &SelectConfig::default()).unwrap())
    });
}

fn orbits(c: &mut Criterion) {
    let g = sparse_graph(10, 3);
    c.bench_function("automorphic_orbits/n10", |b| {
        b.iter(|| automorphic_orbits(&g).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = learn, select, orbits
}
criterion_main!(benches);
