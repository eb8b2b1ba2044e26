//! The four Gibbs blocks over `y | η ~ N(Dη, σ² I)`.
//!
//! ```text
//! η₁        ~ N(m₁, s₁²)           m = eᵀd / (‖d‖² + 1/v),  s² = σ² / (‖d‖² + 1/v)
//! η_j, j≥2  ~ N+(m_j, s_j²)        v₁ = τ₁,  v_j = λ τ_j w_j
//! ν_j       ~ Ga(1, 1 + τ_j)
//! τ₁        ~ GIG(2ν₁, η₁²/σ², 0)
//! τ_j       ~ GIG(2ν_j, η_j²/(σ² λ w_j), 0)          (half-Laplace: shared ν, p = 1/2)
//! ξ         ~ Ga(1, 1 + λ)
//! λ         ~ GIG(2ξ, Σ_{j≥2} η_j²/(τ_j w_j) / σ², p_λ)
//! σ²        ~ IG(n, ½(‖y - Dη‖² + Σ_{j≥2} η_j²/(λ τ_j w_j) + η₁²/τ₁))
//! ```
//!
//! Here `d_j` is column j of D, so `‖d_j‖² = n - j + 1` and `e_jᵀd_j` is the
//! suffix sum of partial residuals. The η sweep keeps that suffix sum up to
//! date incrementally and costs O(n).

use super::state::SCALE_FLOOR;
use super::{ChainState, ModelConfig, PriorFamily, SeriesData, Sigma2Prior};
use crate::error::{Error, Result};
use crate::rng_dist::{
    sample_gamma, sample_gig, sample_inverse_gamma, sample_truncated_normal_pos, GigParams,
    RngStream,
};

/// Smallest `b` passed to a GIG draw with non-positive `p`.
const MIN_GIG_B: f64 = 1e-300;

fn finite(what: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn floored(v: f64, counter: &mut u64) -> f64 {
    if v < SCALE_FLOOR {
        *counter += 1;
        SCALE_FLOOR
    } else {
        v
    }
}

/// Conditional mean and variance of η at zero-based index `k`.
///
/// `suffix_sum` is `Σ_{i≥k} (y_i - θ_i)` evaluated with the current `η_k`
/// still included in θ, so `e_kᵀd_k = suffix_sum + (n - k) η_k`.
pub fn conditional_moments_eta(
    k: usize,
    suffix_sum: f64,
    state: &ChainState,
    spacings: &[f64],
) -> Result<(f64, f64)> {
    let n = state.eta.len();
    let count = (n - k) as f64;
    let e_dot_d = suffix_sum + count * state.eta[k];
    let prior_var = if k == 0 {
        state.tau[0]
    } else {
        state.lambda * state.tau[k] * spacings[k]
    };
    let precision = count + 1.0 / prior_var;
    let mean = finite("eta conditional mean", e_dot_d / precision)?;
    let var = finite("eta conditional variance", state.sigma2 / precision)?;
    Ok((mean, var))
}

/// The Gibbs sampler bound to one data set and model configuration.
#[derive(Clone, Debug)]
pub struct GibbsSampler {
    values: Vec<f64>,
    spacings: Vec<f64>,
    config: ModelConfig,
}

impl GibbsSampler {
    /// `series` is used as given: direction handling happens in `run_chain`.
    pub fn new(series: &SeriesData, config: &ModelConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            values: series.values().to_vec(),
            spacings: series.spacings(),
            config: config.clone(),
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacings(&self) -> &[f64] {
        &self.spacings
    }

    /// Replace the observations, keeping the locations.
    pub fn set_values(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.values.len());
        self.values.copy_from_slice(values);
    }

    fn n(&self) -> usize {
        self.values.len()
    }

    /// `Σ_{j≥2} η_j² / (τ_j w_j)`
    fn increment_penalty(&self, state: &ChainState) -> f64 {
        (1..self.n())
            .map(|j| state.eta[j] * state.eta[j] / (state.tau[j] * self.spacings[j]))
            .sum()
    }

    pub fn update_eta(&self, state: &mut ChainState, rng: &mut RngStream) -> Result<()> {
        let n = self.n();
        // residuals r_i = y_i - θ_i and their total
        let mut theta = 0.0;
        let mut residuals = Vec::with_capacity(n);
        for i in 0..n {
            theta += state.eta[i];
            residuals.push(self.values[i] - theta);
        }
        let mut suffix: f64 = residuals.iter().sum();
        // accumulated change of θ_i for all i not yet visited
        let mut shift = 0.0;
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            let (mean, var) = conditional_moments_eta(k, suffix, state, &self.spacings)?;
            let sd = var.sqrt();
            let new = if k == 0 {
                mean + sd * rng.standard_normal()
            } else {
                sample_truncated_normal_pos(mean, sd, rng)?
            };
            let delta = new - state.eta[k];
            state.eta[k] = new;
            let r_k = residuals[k] - shift;
            shift += delta;
            suffix = suffix - r_k - (n - k - 1) as f64 * delta;
        }
        Ok(())
    }

    pub fn update_local(&self, state: &mut ChainState, rng: &mut RngStream) -> Result<()> {
        let n = self.n();
        let sigma2 = state.sigma2;
        let lambda = state.lambda;
        let mut tau_floor_hits = state.floors.tau;

        // η₁ follows the same scale-beta hierarchy under every family.
        state.nu[0] = sample_gamma(1.0, 1.0 + state.tau[0], rng)?;
        let b = (state.eta[0] * state.eta[0] / sigma2).max(MIN_GIG_B);
        let t = sample_gig(GigParams::new(2.0 * state.nu[0], b, 0.0)?, rng)?;
        state.tau[0] = floored(finite("tau", t)?, &mut tau_floor_hits);

        match self.config.prior {
            PriorFamily::HalfHorseshoe => {
                for j in 1..n {
                    state.nu[j] = sample_gamma(1.0, 1.0 + state.tau[j], rng)?;
                }
                for j in 1..n {
                    let b = (state.eta[j] * state.eta[j] / (sigma2 * lambda * self.spacings[j]))
                        .max(MIN_GIG_B);
                    let t = sample_gig(GigParams::new(2.0 * state.nu[j], b, 0.0)?, rng)?;
                    state.tau[j] = floored(finite("tau", t)?, &mut tau_floor_hits);
                }
            }
            PriorFamily::HalfLaplace => {
                let (a0, b0) = self.config.hl_nu_hyper;
                let tau_sum: f64 = state.tau[1..].iter().sum();
                let nu = sample_gamma(a0 + (n - 1) as f64, b0 + tau_sum, rng)?;
                for j in 1..n {
                    state.nu[j] = nu;
                }
                for j in 1..n {
                    let b = state.eta[j] * state.eta[j] / (sigma2 * lambda * self.spacings[j]);
                    let t = sample_gig(
                        GigParams {
                            a: 2.0 * nu,
                            b,
                            p: 0.5,
                        },
                        rng,
                    )?;
                    state.tau[j] = floored(finite("tau", t)?, &mut tau_floor_hits);
                }
            }
            PriorFamily::HalfNormal => {}
        }
        state.floors.tau = tau_floor_hits;
        Ok(())
    }

    pub fn update_global(&self, state: &mut ChainState, rng: &mut RngStream) -> Result<()> {
        if let Some(lambda) = self.config.fixed_lambda {
            state.lambda = lambda;
            return Ok(());
        }
        state.xi = sample_gamma(1.0, 1.0 + state.lambda, rng)?;
        let b = (self.increment_penalty(state) / state.sigma2).max(MIN_GIG_B);
        let p = self.config.lambda_exponent.value(self.n());
        let l = sample_gig(GigParams::new(2.0 * state.xi, b, p)?, rng)?;
        state.lambda = floored(finite("lambda", l)?, &mut state.floors.lambda);
        Ok(())
    }

    pub fn update_sigma2(&self, state: &mut ChainState, rng: &mut RngStream) -> Result<()> {
        if let Some(s) = self.config.fixed_sigma2 {
            state.sigma2 = s;
            return Ok(());
        }
        let mut theta = 0.0;
        let mut rss = 0.0;
        for (y, e) in self.values.iter().zip(&state.eta) {
            theta += e;
            rss += (y - theta) * (y - theta);
        }
        let penalty = self.increment_penalty(state) / state.lambda
            + state.eta[0] * state.eta[0] / state.tau[0];
        let (mut shape, mut scale) = (self.n() as f64, 0.5 * (rss + penalty));
        if let Sigma2Prior::InverseGamma { shape: a, scale: b } = self.config.sigma2_prior {
            shape += a;
            scale += b;
        }
        let s = sample_inverse_gamma(shape, finite("sigma2 scale", scale)?, rng)?;
        state.sigma2 = floored(finite("sigma2", s)?, &mut state.floors.sigma2);
        Ok(())
    }

    /// One full sweep in the fixed order η, local scales, global scale, σ².
    pub fn sweep(&self, state: &mut ChainState, rng: &mut RngStream) -> Result<()> {
        self.update_eta(state, rng)?;
        self.update_local(state, rng)?;
        self.update_global(state, rng)?;
        self.update_sigma2(state, rng)?;
        if !state.is_valid() {
            return Err(Error::NonFinite("chain state".into()));
        }
        Ok(())
    }
}

pub fn update_eta_block(
    state: &mut ChainState,
    series: &SeriesData,
    config: &ModelConfig,
    rng: &mut RngStream,
) -> Result<()> {
    GibbsSampler::new(series, config)?.update_eta(state, rng)
}

pub fn update_local_block(
    state: &mut ChainState,
    series: &SeriesData,
    config: &ModelConfig,
    rng: &mut RngStream,
) -> Result<()> {
    GibbsSampler::new(series, config)?.update_local(state, rng)
}

pub fn update_global_block(
    state: &mut ChainState,
    series: &SeriesData,
    config: &ModelConfig,
    rng: &mut RngStream,
) -> Result<()> {
    GibbsSampler::new(series, config)?.update_global(state, rng)
}

pub fn update_sigma2_block(
    state: &mut ChainState,
    series: &SeriesData,
    config: &ModelConfig,
    rng: &mut RngStream,
) -> Result<()> {
    GibbsSampler::new(series, config)?.update_sigma2(state, rng)
}

/// Parameters of the full conditionals at a given state, exposed for tests
/// and diagnostics.
pub mod conditionals {
    use super::*;

    /// GIG parameters of τ at zero-based index `k` under the half-horseshoe.
    pub fn tau_hh(state: &ChainState, spacings: &[f64], k: usize) -> GigParams {
        let b = if k == 0 {
            state.eta[0] * state.eta[0] / state.sigma2
        } else {
            state.eta[k] * state.eta[k] / (state.sigma2 * state.lambda * spacings[k])
        };
        GigParams {
            a: 2.0 * state.nu[k],
            b,
            p: 0.0,
        }
    }

    /// (shape, rate) of ν at index `k` under the half-horseshoe.
    pub fn nu_hh(state: &ChainState, k: usize) -> (f64, f64) {
        (1.0, 1.0 + state.tau[k])
    }

    /// (shape, rate) of ξ.
    pub fn xi(state: &ChainState) -> (f64, f64) {
        (1.0, 1.0 + state.lambda)
    }

    pub fn lambda(state: &ChainState, spacings: &[f64], config: &ModelConfig) -> GigParams {
        let n = state.eta.len();
        let s: f64 = (1..n)
            .map(|j| state.eta[j] * state.eta[j] / (state.tau[j] * spacings[j]))
            .sum();
        GigParams {
            a: 2.0 * state.xi,
            b: s / state.sigma2,
            p: config.lambda_exponent.value(n),
        }
    }

    /// (shape, scale) of the σ² inverse-gamma conditional under the default prior.
    pub fn sigma2(state: &ChainState, series: &SeriesData) -> (f64, f64) {
        let spacings = series.spacings();
        let theta = state.theta();
        let rss: f64 = series
            .values()
            .iter()
            .zip(&theta)
            .map(|(y, t)| (y - t).powi(2))
            .sum();
        let n = state.eta.len();
        let s: f64 = (1..n)
            .map(|j| state.eta[j] * state.eta[j] / (state.tau[j] * spacings[j]))
            .sum();
        (
            n as f64,
            0.5 * (rss + s / state.lambda + state.eta[0] * state.eta[0] / state.tau[0]),
        )
    }
}
