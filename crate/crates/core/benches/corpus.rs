use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use winpar::oracle::{run_corpus, CorpusConfig, CrossCheckOptions, Execution};

fn corpus(c: &mut Criterion) {
    let mut group = c.benchmark_group("corpus");
    group.sample_size(10);
    for (label, check) in [
        ("lattice", CrossCheckOptions::default()),
        (
            "full",
            CrossCheckOptions {
                thresholds: true,
                constructions: true,
                strategies: true,
                ..CrossCheckOptions::default()
            },
        ),
    ] {
        let config = CorpusConfig { seeds: 0..64, check, ..CorpusConfig::default() };
        for execution in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(label, format!("{execution:?}")), &config, |b, config| {
                b.iter(|| run_corpus(config, execution))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, corpus);
criterion_main!(benches);
