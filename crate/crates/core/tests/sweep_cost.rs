use std::time::Instant;

use isoshrink::model::{init_state, GibbsSampler, ModelConfig, PriorFamily, SeriesData};
use isoshrink::rng_dist::RngStream;

/// Fastest observed seconds per sweep per observation.
fn per_observation_cost(n: usize, sweeps: usize) -> f64 {
    let mut rng = RngStream::new(1, n as u64);
    let y: Vec<f64> = (0..n)
        .map(|i| (i as f64 / n as f64) + 0.1 * rng.standard_normal())
        .collect();
    let series = SeriesData::regular(y).unwrap();
    let config = ModelConfig::new(PriorFamily::HalfHorseshoe);
    let gibbs = GibbsSampler::new(&series, &config).unwrap();
    let mut state = init_state(&series, &config);
    for _ in 0..3 {
        gibbs.sweep(&mut state, &mut rng).unwrap();
    }
    (0..3)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..sweeps {
                gibbs.sweep(&mut state, &mut rng).unwrap();
            }
            start.elapsed().as_secs_f64() / (sweeps * n) as f64
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn sweep_cost_grows_at_most_like_n_log_n() {
    let small = per_observation_cost(100, 2000);
    let large = per_observation_cost(100_000, 4);
    let log_ratio = (100_000f64).ln() / (100f64).ln();
    // a quadratic sweep would be about 1000 times slower per observation
    assert!(
        large / small < 3.0 * log_ratio,
        "per-observation cost {small:e} s at n = 100, {large:e} s at n = 100000"
    );
}
