use std::fmt;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prior on the increments `η_j`, `j >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
pub enum PriorFamily {
    /// τ_j | ν_j ~ Ga(1/2, ν_j), ν_j ~ Ga(1/2, 1)
    #[value(name = "hh")]
    #[serde(rename = "hh")]
    HalfHorseshoe,
    /// τ_j ~ Ga(1, ν) with a shared rate ν ~ Ga(a₀, b₀)
    #[value(name = "hl")]
    #[serde(rename = "hl")]
    HalfLaplace,
    /// τ_j = 1
    #[value(name = "hn")]
    #[serde(rename = "hn")]
    HalfNormal,
}

impl PriorFamily {
    pub const ALL: [PriorFamily; 3] = [
        PriorFamily::HalfHorseshoe,
        PriorFamily::HalfLaplace,
        PriorFamily::HalfNormal,
    ];

    pub fn short_name(&self) -> &'static str {
        match self {
            PriorFamily::HalfHorseshoe => "HH",
            PriorFamily::HalfLaplace => "HL",
            PriorFamily::HalfNormal => "HN",
        }
    }
}

impl fmt::Display for PriorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Monotone direction of the fitted function. Decreasing fits negate the
/// data on entry and the draws on exit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum Direction {
    #[default]
    #[value(name = "inc", alias = "increasing")]
    #[serde(rename = "increasing")]
    Increasing,
    #[value(name = "dec", alias = "decreasing")]
    #[serde(rename = "decreasing")]
    Decreasing,
}

/// Third GIG parameter of the λ full conditional.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaExponent {
    /// (3 - n) / 2
    #[default]
    ThreeMinusN,
    /// (2 - n) / 2, the value implied by λ | ξ ~ Ga(1/2, ξ)
    TwoMinusN,
}

impl LambdaExponent {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            LambdaExponent::ThreeMinusN => (3.0 - n as f64) / 2.0,
            LambdaExponent::TwoMinusN => (2.0 - n as f64) / 2.0,
        }
    }
}

/// Prior on the error variance σ².
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sigma2Prior {
    /// π(σ²) ∝ 1/σ²
    #[default]
    Jeffreys,
    /// σ² ~ IG(shape, scale). Needed wherever the joint prior must be proper.
    InverseGamma { shape: f64, scale: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub prior: PriorFamily,
    pub direction: Direction,
    pub fixed_sigma2: Option<f64>,
    /// (a₀, b₀) of the Ga hyperprior on the half-Laplace rate ν.
    pub hl_nu_hyper: (f64, f64),
    pub lambda_exponent: LambdaExponent,
    pub sigma2_prior: Sigma2Prior,
    /// Hold λ at this value instead of sampling it.
    pub fixed_lambda: Option<f64>,
}

impl ModelConfig {
    pub fn new(prior: PriorFamily) -> Self {
        Self {
            prior,
            direction: Direction::Increasing,
            fixed_sigma2: None,
            hl_nu_hyper: (1.0, 1.0),
            lambda_exponent: LambdaExponent::ThreeMinusN,
            sigma2_prior: Sigma2Prior::Jeffreys,
            fixed_lambda: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.fixed_sigma2 {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::domain(format!(
                    "fixed_sigma2 must be positive, got {s}"
                )));
            }
        }
        if let Some(l) = self.fixed_lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::domain(format!(
                    "fixed_lambda must be positive, got {l}"
                )));
            }
        }
        let (a0, b0) = self.hl_nu_hyper;
        if !(a0 > 0.0 && b0 > 0.0 && a0.is_finite() && b0.is_finite()) {
            return Err(Error::domain(format!(
                "half-Laplace hyperparameters must be positive, got ({a0}, {b0})"
            )));
        }
        if let Sigma2Prior::InverseGamma { shape, scale } = self.sigma2_prior {
            if !(shape > 0.0 && scale > 0.0) {
                return Err(Error::domain(
                    "sigma2 inverse-gamma prior needs positive shape and scale",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    /// 2,500 retained draws after 500 burn-in sweeps.
    fn default() -> Self {
        Self {
            n_iter: 3000,
            burn_in: 500,
            thin: 1,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn new(n_iter: usize, burn_in: usize, thin: usize, seed: u64) -> Result<Self> {
        let sc = Self {
            n_iter,
            burn_in,
            thin,
            seed,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::domain("thin must be positive"));
        }
        if self.burn_in >= self.n_iter {
            return Err(Error::domain(format!(
                "burn_in ({}) must be below n_iter ({})",
                self.burn_in, self.n_iter
            )));
        }
        if self.retained() == 0 {
            return Err(Error::domain("sampler configuration retains no draws"));
        }
        Ok(())
    }

    /// ⌊(n_iter - burn_in) / thin⌋
    pub fn retained(&self) -> usize {
        (self.n_iter - self.burn_in) / self.thin
    }

    /// Whether zero-based sweep `iter` produces a retained draw.
    pub fn keeps(&self, iter: usize) -> bool {
        iter >= self.burn_in
            && (iter - self.burn_in + 1).is_multiple_of(self.thin)
            && (iter - self.burn_in + 1) / self.thin <= self.retained()
    }
}
