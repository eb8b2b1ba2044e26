//! Statistical test battery for the samplers: Kolmogorov-Smirnov against a
//! quadrature CDF, moment checks against closed forms, and density
//! normalization.

use serde::Serialize;

use super::{
    gamma_log_density, gig_log_density, integrate_positive, inverse_gamma_log_density,
    sample_gamma, sample_gig, sample_inverse_gamma, sample_truncated_normal_pos,
    truncated_normal_pos_log_density, GigParams, PositiveCdf, RngStream,
};
use crate::error::Result;

/// KS significance level.
pub const KS_LEVEL: f64 = 1e-3;
/// Moment checks pass within this many standard errors.
pub const MOMENT_SIGMAS: f64 = 4.0;
/// Allowed deviation of a quadrature-integrated density from 1.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// The samplers under test. Implemented by [`ExactSamplers`]; tests inject
/// deliberately broken implementations.
pub trait SamplerSet: Sync {
    fn gamma(&self, shape: f64, rate: f64, rng: &mut RngStream) -> Result<f64>;
    fn inverse_gamma(&self, alpha: f64, beta: f64, rng: &mut RngStream) -> Result<f64>;
    fn gig(&self, params: GigParams, rng: &mut RngStream) -> Result<f64>;
    fn truncated_normal_pos(&self, mean: f64, sd: f64, rng: &mut RngStream) -> Result<f64>;
}

pub struct ExactSamplers;

impl SamplerSet for ExactSamplers {
    fn gamma(&self, shape: f64, rate: f64, rng: &mut RngStream) -> Result<f64> {
        sample_gamma(shape, rate, rng)
    }

    fn inverse_gamma(&self, alpha: f64, beta: f64, rng: &mut RngStream) -> Result<f64> {
        sample_inverse_gamma(alpha, beta, rng)
    }

    fn gig(&self, params: GigParams, rng: &mut RngStream) -> Result<f64> {
        sample_gig(params, rng)
    }

    fn truncated_normal_pos(&self, mean: f64, sd: f64, rng: &mut RngStream) -> Result<f64> {
        sample_truncated_normal_pos(mean, sd, rng)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BatteryReport {
    pub checks: Vec<CheckResult>,
}

impl BatteryReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Copy, Debug)]
enum Case {
    Gamma(f64, f64),
    InverseGamma(f64, f64),
    Gig(f64, f64, f64),
    TruncNormal(f64, f64),
}

impl Case {
    fn label(&self) -> String {
        match *self {
            Case::Gamma(s, r) => format!("gamma({s},{r})"),
            Case::InverseGamma(a, b) => format!("inverse_gamma({a},{b})"),
            Case::Gig(a, b, p) => format!("gig({a},{b},{p})"),
            Case::TruncNormal(m, s) => format!("truncnorm_pos({m},{s})"),
        }
    }

    fn log_density(&self, x: f64) -> f64 {
        match *self {
            Case::Gamma(s, r) => gamma_log_density(s, r, x),
            Case::InverseGamma(a, b) => inverse_gamma_log_density(a, b, x),
            Case::Gig(a, b, p) => {
                gig_log_density(GigParams { a, b, p }, x).unwrap_or(f64::NEG_INFINITY)
            }
            Case::TruncNormal(m, s) => truncated_normal_pos_log_density(m, s, x),
        }
    }

    fn draw(&self, samplers: &dyn SamplerSet, rng: &mut RngStream) -> Result<f64> {
        match *self {
            Case::Gamma(s, r) => samplers.gamma(s, r, rng),
            Case::InverseGamma(a, b) => samplers.inverse_gamma(a, b, rng),
            Case::Gig(a, b, p) => samplers.gig(GigParams::new(a, b, p)?, rng),
            Case::TruncNormal(m, s) => samplers.truncated_normal_pos(m, s, rng),
        }
    }
}

const CASES: &[Case] = &[
    Case::Gamma(1.0, 1.0),
    Case::Gamma(0.5, 2.0),
    Case::Gamma(3.0, 2.0),
    Case::InverseGamma(3.0, 2.0),
    Case::Gig(4.0, 1.0, -0.5),
    Case::Gig(2.0, 2.0, 0.0),
    Case::Gig(2.0, 0.5, 2.5),
    Case::Gig(0.1, 0.1, 0.3),
    Case::Gig(1.0, 5.0, -3.0),
    Case::TruncNormal(0.0, 1.0),
    Case::TruncNormal(10.0, 1.0),
    Case::TruncNormal(-5.0, 1.0),
    Case::TruncNormal(-0.4, 2.0),
];

/// Asymptotic Kolmogorov survival function P(K > t).
fn kolmogorov_survival(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * t * t).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// KS p-value with Stephens' finite-sample correction.
pub fn ks_p_value(mut draws: Vec<f64>, cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in draws.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sqrt_n = n.sqrt();
    (d, kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d))
}

fn moment_check(name: &str, draws: &[f64], expected: f64) -> CheckResult {
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let z = (mean - expected).abs() / se;
    CheckResult {
        name: name.to_string(),
        passed: z < MOMENT_SIGMAS,
        statistic: z,
        threshold: MOMENT_SIGMAS,
        detail: format!("mean {mean:.6} vs {expected:.6} (se {se:.2e})"),
    }
}

/// Run the full battery with `draws` variates per case.
pub fn run_battery(samplers: &dyn SamplerSet, draws: usize, seed: u64) -> Result<BatteryReport> {
    let mut report = BatteryReport::default();
    for (idx, case) in CASES.iter().enumerate() {
        let label = case.label();
        let mut rng = RngStream::new(seed, idx as u64);
        let xs = (0..draws)
            .map(|_| case.draw(samplers, &mut rng))
            .collect::<Result<Vec<f64>>>()?;

        let support_ok = xs.iter().all(|&x| x > 0.0 && x.is_finite());
        report.checks.push(CheckResult {
            name: format!("{label}/support"),
            passed: support_ok,
            statistic: xs.iter().cloned().fold(f64::INFINITY, f64::min),
            threshold: 0.0,
            detail: "all draws positive and finite".into(),
        });

        let density = |x: f64| case.log_density(x).exp();
        let mass = integrate_positive(density);
        report.checks.push(CheckResult {
            name: format!("{label}/normalization"),
            passed: (mass - 1.0).abs() <= NORMALIZATION_TOL,
            statistic: (mass - 1.0).abs(),
            threshold: NORMALIZATION_TOL,
            detail: format!("quadrature mass {mass:.12}"),
        });

        let cdf = PositiveCdf::from_density(density);
        let (d, p) = ks_p_value(xs.clone(), |x| cdf.cdf(x));
        report.checks.push(CheckResult {
            name: format!("{label}/ks"),
            passed: p >= KS_LEVEL,
            statistic: p,
            threshold: KS_LEVEL,
            detail: format!("D = {d:.5}, p = {p:.4}"),
        });

        match *case {
            Case::TruncNormal(m, s) if m == 0.0 && s == 1.0 => {
                report.checks.push(moment_check(
                    &format!("{label}/mean"),
                    &xs,
                    (2.0 / std::f64::consts::PI).sqrt(),
                ));
            }
            Case::Gig(a, b, p) if a == 4.0 && b == 1.0 && p == -0.5 => {
                report
                    .checks
                    .push(moment_check(&format!("{label}/mean"), &xs, 0.5));
            }
            Case::Gamma(s, r) => {
                report
                    .checks
                    .push(moment_check(&format!("{label}/mean"), &xs, s / r));
            }
            _ => {}
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_tail_values() {
        // P(K > 1.3581) ≈ 0.05, P(K > 1.9495) ≈ 0.001
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.9495) - 0.001).abs() < 1e-4);
    }
}
