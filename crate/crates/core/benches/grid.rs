use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nbgeo::classify::{sample_and_verify, SampleOptions, DEFAULT_T_SET};
use nbgeo::par::Execution;
use nbgeo::surface::catalog_surface;
use std::collections::BTreeMap;

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_and_verify");
    group.sample_size(10);
    for name in ["ellipsoid", "cone"] {
        let chart = catalog_surface(name, &BTreeMap::new()).unwrap();
        for (label, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            for fields in [false, true] {
                let opts = SampleOptions { execution, fields, ..Default::default() };
                let id = format!("{name}/{}", if fields { "fields" } else { "closed" });
                group.bench_with_input(BenchmarkId::new(label, id), &opts, |b, opts| {
                    b.iter(|| sample_and_verify(&chart, (32, 32), &DEFAULT_T_SET, 1e-8, opts).unwrap())
                });
            }
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
