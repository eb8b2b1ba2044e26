use serde::{Deserialize, Serialize};

use super::{ModelConfig, SeriesData};

/// Lower bound applied to τ_j, λ and σ² after each draw.
pub const SCALE_FLOOR: f64 = 1e-12;

/// Lower bound for initial increments.
pub const INIT_EPS: f64 = 1e-4;

/// Number of times each scale had to be raised to [`SCALE_FLOOR`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorCounts {
    pub tau: u64,
    pub lambda: u64,
    pub sigma2: u64,
}

impl FloorCounts {
    pub fn total(&self) -> u64 {
        self.tau + self.lambda + self.sigma2
    }
}

/// One state of the Gibbs chain.
///
/// Under the half-Laplace prior the shared rate ν is stored in every
/// `nu[j]`, `j >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub eta: Vec<f64>,
    pub tau: Vec<f64>,
    pub nu: Vec<f64>,
    pub lambda: f64,
    pub xi: f64,
    pub sigma2: f64,
    pub floors: FloorCounts,
}

impl ChainState {
    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn theta(&self) -> Vec<f64> {
        theta_from_eta(&self.eta)
    }

    /// Every scale positive and finite, every increment after the first
    /// strictly positive.
    pub fn is_valid(&self) -> bool {
        let pos = |x: &f64| *x > 0.0 && x.is_finite();
        self.eta.first().is_some_and(|e| e.is_finite())
            && self.eta[1..].iter().all(pos)
            && self.tau.iter().all(pos)
            && self.nu.iter().all(pos)
            && pos(&self.lambda)
            && pos(&self.xi)
            && pos(&self.sigma2)
    }
}

/// θ = Dη: cumulative sums of the increments.
pub fn theta_from_eta(eta: &[f64]) -> Vec<f64> {
    eta.iter()
        .scan(0.0, |acc, &e| {
            *acc += e;
            Some(*acc)
        })
        .collect()
}

/// Starting state: observed increments clamped to [`INIT_EPS`], unit scales,
/// and σ² from the spread of the first differences.
pub fn init_state(series: &SeriesData, config: &ModelConfig) -> ChainState {
    let y = series.values();
    let n = y.len();
    let mut eta = Vec::with_capacity(n);
    eta.push(y[0]);
    eta.extend(y.windows(2).map(|w| (w[1] - w[0]).max(INIT_EPS)));

    let sigma2 = config.fixed_sigma2.unwrap_or_else(|| {
        let diffs: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let var = if diffs.len() < 2 {
            0.0
        } else {
            let m = diffs.iter().sum::<f64>() / diffs.len() as f64;
            diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64
        };
        var.max(INIT_EPS)
    });

    ChainState {
        eta,
        tau: vec![1.0; n],
        nu: vec![1.0; n],
        lambda: config.fixed_lambda.unwrap_or(1.0),
        xi: 1.0,
        sigma2,
        floors: FloorCounts::default(),
    }
}
