//! Marginal prior densities of a single increment η_j (λ = σ² = w_j = 1),
//! for plotting the three families side by side.

use std::f64::consts::PI;

use super::PriorFamily;
use crate::rng_dist::integrate_positive;

/// Density of η under `family`, for η > 0.
///
/// Half-horseshoe: ∫ 2 N(η | 0, τ) π(τ) dτ with τ ~ BetaPrime(1/2, 1/2),
/// the marginal of τ | ν ~ Ga(1/2, ν), ν ~ Ga(1/2, 1). Half-Laplace uses a
/// unit rate ν = 1, giving √2 exp(-√2 η).
pub fn marginal_density(family: PriorFamily, eta: f64) -> f64 {
    if eta <= 0.0 {
        return 0.0;
    }
    match family {
        PriorFamily::HalfNormal => 2.0 * (-0.5 * eta * eta).exp() / (2.0 * PI).sqrt(),
        PriorFamily::HalfLaplace => {
            let r = std::f64::consts::SQRT_2;
            r * (-r * eta).exp()
        }
        PriorFamily::HalfHorseshoe => integrate_positive(|tau| {
            let half_normal = 2.0 * (-0.5 * eta * eta / tau).exp() / (2.0 * PI * tau).sqrt();
            let mixing = 1.0 / (PI * tau.sqrt() * (1.0 + tau));
            half_normal * mixing
        }),
    }
}

/// Rows `(η, hh, hl, hn)` on an even grid over `(0, upper]`.
pub fn density_table(upper: f64, points: usize) -> Vec<[f64; 4]> {
    (1..=points)
        .map(|i| {
            let x = upper * i as f64 / points as f64;
            [
                x,
                marginal_density(PriorFamily::HalfHorseshoe, x),
                marginal_density(PriorFamily::HalfLaplace, x),
                marginal_density(PriorFamily::HalfNormal, x),
            ]
        })
        .collect()
}
