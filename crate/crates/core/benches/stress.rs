use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nptspace::stress::{run_suite, Execution, Suite};
use nptspace::BipartiteDims;

fn stress_suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("stress");
    for (m, n) in [(3, 3), (3, 4), (4, 5)] {
        let dims = BipartiteDims::new(m, n).unwrap();
        for suite in [Suite::Npt, Suite::Bound] {
            for execution in [Execution::Sequential, Execution::Parallel] {
                let id = BenchmarkId::new(format!("{suite:?}/{execution:?}"), format!("{m}x{n}"));
                group.bench_function(id, |b| b.iter(|| run_suite(suite, dims, 200, 7, execution).unwrap()));
            }
        }
    }
    group.finish();
}

criterion_group!(
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = stress_suites
);
criterion_main!(benches);
