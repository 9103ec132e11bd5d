use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hasse_core::census::{thue_census_with, CensusOptions};
use hasse_core::localsolve::VerdictCache;
use hasse_core::Parallelism;

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("thue_census_k3");
    group.sample_size(10);
    let hs = [10, 20, 40];
    for mode in [Parallelism::Serial, Parallelism::Parallel] {
        let opts = CensusOptions {
            parallelism: mode,
            ..Default::default()
        };
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{mode:?}")),
            &opts,
            |b, opts| {
                // fresh cache per run so both modes do the same local work
                b.iter(|| thue_census_with(3, &hs, opts, &VerdictCache::new()).unwrap())
            },
        );
    }
    group.finish();
}

criterion_group!(benches, census);
criterion_main!(benches);
