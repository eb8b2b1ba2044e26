//! Seeded random streams and exact samplers for the distributions the Gibbs
//! sampler draws from.
//!
//! Parameterizations follow the model's conventions:
//!
//! ```text
//! Ga(shape, rate)   density ∝ x^(shape-1) exp(-rate x)
//! IG(alpha, beta)   1/X ~ Ga(alpha, beta)
//! GIG(a, b, p)      density ∝ x^(p-1) exp(-(a x + b / x) / 2)
//! N+(mean, sd²)     N(mean, sd²) restricted to (0, ∞)
//! ```
//!
//! Log densities and the quadrature / Bessel helpers exist for testing; no
//! sampler evaluates a Bessel function.

mod battery;
mod bessel;
mod gig;
mod quad;
mod truncnorm;

pub use battery::{run_battery, BatteryReport, CheckResult, ExactSamplers, SamplerSet};
pub use bessel::log_bessel_k;
pub use gig::sample_gig;
pub use quad::{integrate_positive, PositiveCdf};
pub use truncnorm::{sample_truncated_normal_pos, truncated_normal_pos_log_density};

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8, whose 64-bit stream index gives independent substreams
/// for the same seed without any coordination between workers.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Standard exponential draw, strictly positive.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Parameters of GIG(a, b, p).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GigParams {
    pub a: f64,
    pub b: f64,
    pub p: f64,
}

impl GigParams {
    pub fn new(a: f64, b: f64, p: f64) -> Result<Self> {
        let params = Self { a, b, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::domain(format!(
                "GIG a must be positive, got {}",
                self.a
            )));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::domain(format!(
                "GIG b must be positive, got {}",
                self.b
            )));
        }
        if !self.p.is_finite() {
            return Err(Error::domain(format!(
                "GIG p must be finite, got {}",
                self.p
            )));
        }
        Ok(())
    }

    /// Parameters of the reciprocal: if X ~ GIG(a, b, p) then 1/X ~ GIG(b, a, -p).
    pub fn reciprocal(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            p: -self.p,
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Draw from Ga(shape, rate) with mean shape / rate.
pub fn sample_gamma(shape: f64, rate: f64, rng: &mut RngStream) -> Result<f64> {
    check_positive("gamma shape", shape)?;
    check_positive("gamma rate", rate)?;
    let dist = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::domain(e.to_string()))?;
    Ok(dist.sample(rng))
}

/// Draw X with 1/X ~ Ga(alpha, beta).
pub fn sample_inverse_gamma(alpha: f64, beta: f64, rng: &mut RngStream) -> Result<f64> {
    check_positive("inverse-gamma alpha", alpha)?;
    check_positive("inverse-gamma beta", beta)?;
    Ok(1.0 / sample_gamma(alpha, beta, rng)?)
}

pub fn gamma_log_density(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
}

pub fn inverse_gamma_log_density(alpha: f64, beta: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    alpha * beta.ln() - ln_gamma(alpha) - (alpha + 1.0) * x.ln() - beta / x
}

/// Log density of GIG(a, b, p) including the `2 K_p(√(ab))` normalizer.
pub fn gig_log_density(params: GigParams, x: f64) -> Result<f64> {
    params.validate()?;
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(format!("GIG density needs x > 0, got {x}")));
    }
    let GigParams { a, b, p } = params;
    let omega = (a * b).sqrt();
    Ok(
        0.5 * p * (a / b).ln() - std::f64::consts::LN_2 - log_bessel_k(p, omega)
            + (p - 1.0) * x.ln()
            - 0.5 * (a * x + b / x),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let mut c = RngStream::new(7, 4);
        let xa: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..16).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn uniform_is_open_interval() {
        let mut rng = RngStream::new(1, 0);
        for _ in 0..100_000 {
            let u = rng.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn gamma_moments() {
        let mut rng = RngStream::new(11, 0);
        for &(shape, rate, n) in &[
            (1.0, 1.0, 200_000),
            (0.5, 2.0, 200_000),
            (3.0, 2.0, 1_000_000),
        ] {
            let xs: Vec<f64> = (0..n)
                .map(|_| sample_gamma(shape, rate, &mut rng).unwrap())
                .collect();
            let (m, se) = mean_and_se(&xs);
            assert!(
                (m - shape / rate).abs() < 4.0 * se,
                "Ga({shape},{rate}) mean {m}"
            );
        }
        let xs: Vec<f64> = (0..200_000)
            .map(|_| sample_gamma(1.0, 1.0, &mut rng).unwrap())
            .collect();
        let (m, _) = mean_and_se(&xs);
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!((var - 1.0).abs() < 0.03, "exp variance {var}");
    }

    #[test]
    fn inverse_gamma_mean_and_domain() {
        let mut rng = RngStream::new(12, 0);
        let xs: Vec<f64> = (0..400_000)
            .map(|_| sample_inverse_gamma(3.0, 2.0, &mut rng).unwrap())
            .collect();
        let (m, se) = mean_and_se(&xs);
        assert!((m - 1.0).abs() < 4.0 * se, "IG(3,2) mean {m}");
        assert!(matches!(
            sample_inverse_gamma(0.0, 1.0, &mut rng),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            sample_gamma(1.0, -1.0, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gig_log_density_pinned_value() {
        // log(e^-2 / (2 K_0(2))) from a 30-digit Bessel evaluation
        let v = gig_log_density(GigParams::new(2.0, 2.0, 0.0).unwrap(), 1.0).unwrap();
        assert!((v - (-0.520_658_975_584_235_4)).abs() < 1e-10, "{v}");
    }

    #[test]
    fn gig_log_density_matches_inverse_gaussian() {
        // GIG(a, b, -1/2) is inverse Gaussian with mean √(b/a), shape b.
        let (a, b) = (4.0_f64, 1.0_f64);
        let mu = (b / a).sqrt();
        let shape = b;
        for &x in &[0.05_f64, 0.3, 0.5, 1.0, 2.7] {
            let ig = 0.5 * (shape / (2.0 * std::f64::consts::PI * x.powi(3))).ln()
                - shape * (x - mu).powi(2) / (2.0 * mu * mu * x);
            let g = gig_log_density(GigParams::new(a, b, -0.5).unwrap(), x).unwrap();
            assert!((g - ig).abs() < 1e-9, "x={x}: {g} vs {ig}");
        }
    }

    #[test]
    fn gig_reciprocal_identity_pointwise() {
        for &(a, b, p) in &[(2.0, 2.0, 0.0), (0.3, 5.0, 1.7), (4.0, 0.2, -2.5)] {
            let params = GigParams::new(a, b, p).unwrap();
            for &x in &[0.01, 0.4, 1.0, 3.0, 20.0] {
                let lhs = gig_log_density(params, x).unwrap();
                let rhs = gig_log_density(params.reciprocal(), 1.0 / x).unwrap() - 2.0 * x.ln();
                assert!(
                    (lhs - rhs).abs() < 1e-9,
                    "({a},{b},{p}) at {x}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn gig_density_rejects_bad_inputs() {
        assert!(GigParams::new(0.0, 1.0, 0.0).is_err());
        assert!(GigParams::new(1.0, -1.0, 0.0).is_err());
        let p = GigParams::new(1.0, 1.0, 0.0).unwrap();
        assert!(gig_log_density(p, 0.0).is_err());
    }

    #[test]
    fn densities_normalize() {
        type Density = Box<dyn Fn(f64) -> f64>;
        let checks: Vec<(&str, Density)> = vec![
            ("gamma", Box::new(|x| gamma_log_density(0.5, 2.0, x).exp())),
            (
                "ig",
                Box::new(|x| inverse_gamma_log_density(3.0, 2.0, x).exp()),
            ),
            (
                "gig",
                Box::new(|x| {
                    gig_log_density(
                        GigParams {
                            a: 2.0,
                            b: 2.0,
                            p: 0.0,
                        },
                        x,
                    )
                    .unwrap()
                    .exp()
                }),
            ),
            (
                "gig-neg",
                Box::new(|x| {
                    gig_log_density(
                        GigParams {
                            a: 1.0,
                            b: 5.0,
                            p: -3.0,
                        },
                        x,
                    )
                    .unwrap()
                    .exp()
                }),
            ),
        ];
        for (name, f) in checks {
            let total = integrate_positive(f);
            assert!((total - 1.0).abs() < 1e-6, "{name}: {total}");
        }
    }
}
