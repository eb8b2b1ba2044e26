//! Exact draws from the joint prior, for forward simulation of functions and
//! for checking the Gibbs sampler against its own model.

use super::state::FloorCounts;
use super::{theta_from_eta, ChainState, ModelConfig, PriorFamily, SeriesData, Sigma2Prior};
use crate::error::{Error, Result};
use crate::rng_dist::{sample_gamma, sample_inverse_gamma, sample_truncated_normal_pos, RngStream};

/// One draw of every parameter from the prior, on the locations of
/// `series` (its values are ignored).
///
/// ```text
/// ν_j ~ Ga(1/2, 1),  τ_j | ν_j ~ Ga(1/2, ν_j)      (τ₁ always; τ_j, j≥2 under half-horseshoe)
/// ν ~ Ga(a₀, b₀),    τ_j | ν ~ Ga(1, ν)            (half-Laplace, j≥2)
/// τ_j = 1                                          (half-normal, j≥2)
/// ξ ~ Ga(1/2, 1),    λ | ξ ~ Ga(1/2, ξ)
/// η₁ ~ N(0, σ² τ₁),  η_j ~ N+(0, σ² λ τ_j w_j)
/// ```
///
/// σ² needs a proper prior or a fixed value.
pub fn sample_joint_prior(
    series: &SeriesData,
    config: &ModelConfig,
    rng: &mut RngStream,
) -> Result<ChainState> {
    config.validate()?;
    let n = series.len();
    let w = series.spacings();

    let sigma2 = match (config.fixed_sigma2, config.sigma2_prior) {
        (Some(s), _) => s,
        (None, Sigma2Prior::InverseGamma { shape, scale }) => {
            sample_inverse_gamma(shape, scale, rng)?
        }
        (None, Sigma2Prior::Jeffreys) => {
            return Err(Error::domain(
                "cannot draw σ² from the improper Jeffreys prior",
            ));
        }
    };
    let (xi, lambda) = match config.fixed_lambda {
        Some(l) => (1.0, l),
        None => {
            let xi = sample_gamma(0.5, 1.0, rng)?;
            (xi, sample_gamma(0.5, xi, rng)?)
        }
    };

    let mut nu = vec![1.0; n];
    let mut tau = vec![1.0; n];
    nu[0] = sample_gamma(0.5, 1.0, rng)?;
    tau[0] = sample_gamma(0.5, nu[0], rng)?;
    match config.prior {
        PriorFamily::HalfHorseshoe => {
            for j in 1..n {
                nu[j] = sample_gamma(0.5, 1.0, rng)?;
                tau[j] = sample_gamma(0.5, nu[j], rng)?;
            }
        }
        PriorFamily::HalfLaplace => {
            let (a0, b0) = config.hl_nu_hyper;
            let shared = sample_gamma(a0, b0, rng)?;
            for j in 1..n {
                nu[j] = shared;
                tau[j] = sample_gamma(1.0, shared, rng)?;
            }
        }
        PriorFamily::HalfNormal => {}
    }

    let mut eta = Vec::with_capacity(n);
    eta.push((sigma2 * tau[0]).sqrt() * rng.standard_normal());
    for j in 1..n {
        eta.push(sample_truncated_normal_pos(
            0.0,
            (sigma2 * lambda * tau[j] * w[j]).sqrt(),
            rng,
        )?);
    }

    Ok(ChainState {
        eta,
        tau,
        nu,
        lambda,
        xi,
        sigma2,
        floors: FloorCounts::default(),
    })
}

/// Observations `y ~ N(Dη, σ² I)` given a state.
pub fn sample_observations(state: &ChainState, rng: &mut RngStream) -> Vec<f64> {
    let sd = state.sigma2.sqrt();
    theta_from_eta(&state.eta)
        .into_iter()
        .map(|t| t + sd * rng.standard_normal())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jeffreys_prior_is_rejected() {
        let s = SeriesData::regular(vec![0.0; 4]).unwrap();
        let err = sample_joint_prior(
            &s,
            &ModelConfig::new(PriorFamily::HalfHorseshoe),
            &mut RngStream::new(0, 0),
        );
        assert!(err.is_err());
    }

    #[test]
    fn prior_draws_are_valid_states() {
        let s = SeriesData::new(vec![0.0, 0.5, 2.0, 2.1], vec![0.0; 4]).unwrap();
        let mut rng = RngStream::new(1, 0);
        for prior in PriorFamily::ALL {
            let mut cfg = ModelConfig::new(prior);
            cfg.sigma2_prior = Sigma2Prior::InverseGamma {
                shape: 3.0,
                scale: 2.0,
            };
            for _ in 0..1000 {
                let st = sample_joint_prior(&s, &cfg, &mut rng).unwrap();
                assert!(st.is_valid(), "{prior}: {st:?}");
                assert_eq!(sample_observations(&st, &mut rng).len(), 4);
            }
        }
    }

    #[test]
    fn half_normal_increment_scale() {
        // η₂ ~ N+(0, σ² λ w) with σ² = 1, λ = 1, w = 1: E η₂ = √(2/π)
        let s = SeriesData::regular(vec![0.0; 2]).unwrap();
        let mut cfg = ModelConfig::new(PriorFamily::HalfNormal);
        cfg.fixed_sigma2 = Some(1.0);
        cfg.fixed_lambda = Some(1.0);
        let mut rng = RngStream::new(2, 0);
        let m = 100_000;
        let draws: Vec<f64> = (0..m)
            .map(|_| sample_joint_prior(&s, &cfg, &mut rng).unwrap().eta[1])
            .collect();
        let mean = draws.iter().sum::<f64>() / m as f64;
        let se = (1.0 - 2.0 / std::f64::consts::PI).sqrt() / (m as f64).sqrt();
        assert!(
            (mean - (2.0 / std::f64::consts::PI).sqrt()).abs() < 4.0 * se,
            "{mean}"
        );
    }
}
