use criterion::{criterion_group, criterion_main, Criterion};
use gridstab::cayley::GridKind;
use gridstab::census::{sweep_grids_with, sweep_val4, SweepOptions};
use gridstab::exec::Execution;

fn options(execution: Execution) -> SweepOptions {
    SweepOptions { execution, ..SweepOptions::default() }
}

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("qd_census_6x8");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let opts = options(exec);
        group.bench_function(name, |b| b.iter(|| sweep_grids_with(GridKind::Qd, 6, 8, 48, &opts).unwrap()));
    }
    group.finish();

    let mut group = c.benchmark_group("val4_census_32");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let opts = options(exec);
        group.bench_function(name, |b| b.iter(|| sweep_val4(32, &opts).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, census);
criterion_main!(benches);
