use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gleeful_bench::prefix;
use gleeful_core::enumeration::{count_exact, enumerate_interval, max_chain_length};
use gleeful_core::Interval;

fn bench_enumeration(c: &mut Criterion) {
    let p2 = prefix(2, 40_000);
    let p3 = prefix(3, 2_000);

    let mut group = c.benchmark_group("enumeration");
    group.sample_size(20);

    group.bench_function("enumerate k=2 width 1e6 at 1e9", |b| {
        let iv = Interval::new(1_000_000_000, 1_001_000_000).unwrap();
        b.iter(|| {
            let n = enumerate_interval(black_box(iv), &p2).unwrap().count();
            black_box(n)
        });
    });

    group.bench_function("enumerate k=3 width 1e6 at 1e9", |b| {
        let iv = Interval::new(1_000_000_000, 1_001_000_000).unwrap();
        b.iter(|| {
            let n = enumerate_interval(black_box(iv), &p3).unwrap().count();
            black_box(n)
        });
    });

    group.bench_function("count_exact k=2 to 1e9", |b| {
        b.iter(|| black_box(count_exact(black_box(1_000_000_000), &p2).unwrap()));
    });

    group.bench_function("max_chain_length k=2 at 1e9", |b| {
        b.iter(|| black_box(max_chain_length(black_box(1_000_000_000), &p2).unwrap()));
    });

    group.finish();
}

criterion_group!(benches, bench_enumeration);
criterion_main!(benches);
