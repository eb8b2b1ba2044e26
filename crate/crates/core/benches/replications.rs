use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use isoshrink::model::{
    init_state, GibbsSampler, ModelConfig, PriorFamily, SamplerConfig, SeriesData,
};
use isoshrink::par::Execution;
use isoshrink::rng_dist::RngStream;
use isoshrink::simlab::{run_replications_with, ReplicationPlan, Scenario};

fn replications(c: &mut Criterion) {
    let mut plan = ReplicationPlan::new(Scenario::II);
    plan.reps = 8;
    plan.sampler = SamplerConfig::new(500, 100, 1, 0).unwrap();
    let mut group = c.benchmark_group("replications");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| run_replications_with(black_box(&plan), exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    for n in [100usize, 1_000, 10_000] {
        let mut rng = RngStream::new(0, n as u64);
        let y: Vec<f64> = (0..n)
            .map(|i| i as f64 / n as f64 + 0.1 * rng.standard_normal())
            .collect();
        let series = SeriesData::regular(y).unwrap();
        let config = ModelConfig::new(PriorFamily::HalfHorseshoe);
        let gibbs = GibbsSampler::new(&series, &config).unwrap();
        let mut state = init_state(&series, &config);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| gibbs.sweep(&mut state, &mut rng).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, replications, sweep);
criterion_main!(benches);
