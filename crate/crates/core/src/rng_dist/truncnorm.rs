use statrs::function::erf::erfc;

use super::RngStream;
use crate::error::{Error, Result};

/// Below this standardized mean the naive rejection sampler switches to the
/// one-sided exponential proposal.
const NAIVE_THRESHOLD: f64 = -0.5;

/// Draw from N(mean, sd²) restricted to (0, ∞).
///
/// Naive rejection while `mean / sd > -0.5` (acceptance at least Φ(-0.5));
/// otherwise Robert's translated-exponential proposal with the optimal rate,
/// whose acceptance stays bounded away from zero however far the mean sits
/// below the truncation point.
pub fn sample_truncated_normal_pos(mean: f64, sd: f64, rng: &mut RngStream) -> Result<f64> {
    if !(sd > 0.0 && sd.is_finite()) {
        return Err(Error::domain(format!(
            "truncated normal sd must be positive, got {sd}"
        )));
    }
    if !mean.is_finite() {
        return Err(Error::NonFinite("truncated normal mean".into()));
    }
    let ratio = mean / sd;
    if ratio > NAIVE_THRESHOLD {
        loop {
            let x = mean + sd * rng.standard_normal();
            if x > 0.0 {
                return Ok(x);
            }
        }
    }

    // Standardized lower bound a = -mean/sd >= 0.5; z = a + e, e ~ Exp(alpha)/alpha.
    let a = -ratio;
    let root = (a * a + 4.0).sqrt();
    let alpha = 0.5 * (a + root);
    // alpha - a computed without cancellation
    let gap = 2.0 / (root + a);
    loop {
        let e = rng.exponential() / alpha;
        let d = e - gap;
        if rng.uniform().ln() <= -0.5 * d * d {
            // x = mean + sd * z = sd * (z - a) = sd * e
            return Ok(sd * e);
        }
    }
}

/// Log density of N+(mean, sd²) at `x`.
pub fn truncated_normal_pos_log_density(mean: f64, sd: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let z = (x - mean) / sd;
    // P(N(mean, sd²) > 0) = erfc(-mean / (sd √2)) / 2
    let mass = 0.5 * erfc(-mean / (sd * std::f64::consts::SQRT_2));
    -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln() - sd.ln() - mass.ln()
}
