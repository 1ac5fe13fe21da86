use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use multicmh::{medtree, ZRanks};
use multicmh_bench::pure_null;

fn medtree_all_rows(c: &mut Criterion) {
    let mut group = c.benchmark_group("medtree");
    for (n, d) in [(1000, 10), (8000, 10), (8000, 100)] {
        let data = pure_null(n, d);
        let z = ZRanks::from_dataset(&data);
        let all: Vec<u32> = (0..n as u32).collect();
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), n), &all, |b, all| {
            b.iter(|| medtree(&z, all, 10, None))
        });
    }
    group.finish();
}

fn ranks(c: &mut Criterion) {
    let data = pure_null(8000, 100);
    c.bench_function("zranks/8000x100", |b| {
        b.iter(|| ZRanks::from_dataset(&data))
    });
}

criterion_group!(benches, medtree_all_rows, ranks);
criterion_main!(benches);
