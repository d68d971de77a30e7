use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twosource_core::exec::Execution;
use twosource_core::measurements::direct_imaging_exponent;
use twosource_core::montecarlo::{estimate_error_conditional, Rule, SourceModel};
use twosource_core::psf::PointSpreadFunction;
use twosource_core::quantum::Priors;
use twosource_core::Scheme;

fn modes() -> Vec<(&'static str, Execution)> {
    vec![("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn monte_carlo(c: &mut Criterion) {
    let model = SourceModel::new(PointSpreadFunction::gaussian(), 2.0).unwrap();
    let mut group = c.benchmark_group("monte_carlo_direct_lrt");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                estimate_error_conditional(
                    &model,
                    Priors::equal(),
                    Scheme::DirectImaging,
                    Rule::LikelihoodRatio,
                    10,
                    20_000,
                    7,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn exponent_sweep(c: &mut Criterion) {
    let psf = PointSpreadFunction::gaussian();
    let ds: Vec<f64> = (0..=60).map(|i| i as f64 * 0.1).collect();
    let mut group = c.benchmark_group("direct_exponent_sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                twosource_core::exec::map_indexed(exec, ds.len(), |i| {
                    direct_imaging_exponent(&psf, ds[i]).unwrap().exponent
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, exponent_sweep);
criterion_main!(benches);
