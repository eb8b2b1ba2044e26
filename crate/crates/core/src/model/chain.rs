use serde::{Deserialize, Serialize};

use super::state::FloorCounts;
use super::{
    init_state, theta_from_eta, Direction, GibbsSampler, ModelConfig, SamplerConfig, SeriesData,
};
use crate::error::{Error, Result};
use crate::rng_dist::RngStream;

/// Retained θ draws (row-major, one row per draw) with scalar traces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub locations: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2_trace: Vec<f64>,
    pub lambda_trace: Vec<f64>,
    pub model: ModelConfig,
    pub sampler: SamplerConfig,
    pub floors: FloorCounts,
}

impl PosteriorDraws {
    /// Draws built directly from rows, e.g. for summarizing external samples.
    pub fn from_rows(
        locations: Vec<f64>,
        rows: &[Vec<f64>],
        model: ModelConfig,
        sampler: SamplerConfig,
    ) -> Result<Self> {
        let n = locations.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Data(format!(
                "draw row of length {} for {} locations",
                r.len(),
                n
            )));
        }
        Ok(Self {
            locations,
            theta: rows.concat(),
            sigma2_trace: Vec::new(),
            lambda_trace: Vec::new(),
            model,
            sampler,
            floors: FloorCounts::default(),
        })
    }

    pub fn n_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn n_draws(&self) -> usize {
        if self.locations.is_empty() {
            0
        } else {
            self.theta.len() / self.locations.len()
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n_locations();
        &self.theta[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.theta.chunks_exact(self.n_locations().max(1))
    }

    /// All draws of θ at location index `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Whether every draw is monotone in the fitted direction.
    pub fn all_monotone(&self) -> bool {
        match self.model.direction {
            Direction::Increasing => self.rows().all(|r| r.windows(2).all(|w| w[1] >= w[0])),
            Direction::Decreasing => self.rows().all(|r| r.windows(2).all(|w| w[1] <= w[0])),
        }
    }
}

/// Run the chain with the stream `(sc.seed, 0)`.
pub fn run_chain(
    series: &SeriesData,
    mc: &ModelConfig,
    sc: &SamplerConfig,
) -> Result<PosteriorDraws> {
    let mut rng = RngStream::new(sc.seed, 0);
    run_chain_with_rng(series, mc, sc, &mut rng)
}

pub fn run_chain_with_rng(
    series: &SeriesData,
    mc: &ModelConfig,
    sc: &SamplerConfig,
    rng: &mut RngStream,
) -> Result<PosteriorDraws> {
    sc.validate()?;
    let sign = match mc.direction {
        Direction::Increasing => 1.0,
        Direction::Decreasing => -1.0,
    };
    let working = if sign < 0.0 {
        series.negated()
    } else {
        series.clone()
    };
    let gibbs = GibbsSampler::new(&working, mc)?;
    let mut state = init_state(&working, mc);

    let n = series.len();
    let kept = sc.retained();
    let mut theta = Vec::with_capacity(kept * n);
    let mut sigma2_trace = Vec::with_capacity(kept);
    let mut lambda_trace = Vec::with_capacity(kept);

    for iter in 0..sc.n_iter {
        gibbs
            .sweep(&mut state, rng)
            .map_err(|e| e.at_iteration(iter))?;
        if sc.keeps(iter) {
            theta.extend(theta_from_eta(&state.eta).into_iter().map(|t| sign * t));
            sigma2_trace.push(state.sigma2);
            lambda_trace.push(state.lambda);
        }
    }
    if state.floors.total() > 0 {
        log::debug!("scale floors activated: {:?}", state.floors);
    }

    Ok(PosteriorDraws {
        locations: series.locations().to_vec(),
        theta,
        sigma2_trace,
        lambda_trace,
        model: mc.clone(),
        sampler: *sc,
        floors: state.floors,
    })
}
