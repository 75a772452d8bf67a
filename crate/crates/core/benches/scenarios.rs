use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ionbounds::scenarios::{builtin_figure, Execution};

fn figures(c: &mut Criterion) {
    let mut group = c.benchmark_group("figure");
    group.sample_size(10);
    for id in [2, 6, 9] {
        let figure = builtin_figure(id).expect("built-in figure");
        group.bench_with_input(BenchmarkId::new("sequential", id), &figure, |b, f| {
            b.iter(|| f.run_with(Execution::Sequential).expect("figure runs"))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", id), &figure, |b, f| {
            b.iter(|| f.run_with(Execution::Parallel).expect("figure runs"))
        });
    }
    group.finish();
}

criterion_group!(benches, figures);
criterion_main!(benches);
