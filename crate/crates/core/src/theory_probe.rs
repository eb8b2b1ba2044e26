//! Monte-Carlo probes of the sampler's theoretical behavior.
//!
//! The tail-robustness probe feeds noiseless data `y = Dz` with one large
//! increment `z_{i*}` to the full model with σ² held fixed, and tracks how
//! close the posterior mean of `η_{i*}` stays to `z_{i*}` as it grows. The
//! oracle computes posterior means of the fixed-scale submodel by rejection
//! sampling from the unconstrained Gaussian, independently of the Gibbs code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    init_state, run_chain_with_rng, theta_from_eta, GibbsSampler, ModelConfig, SamplerConfig,
    SeriesData,
};
use crate::par::{map_indexed, Execution};
use crate::rng_dist::RngStream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    /// Increments `z_1..z_n`; entry `i_star - 1` is replaced by each magnitude.
    pub base_z: Vec<f64>,
    /// One-based index of the probed increment, at least 2.
    pub i_star: usize,
    pub magnitudes: Vec<f64>,
    pub sigma2: f64,
    /// Hold λ = 1, dropping the global scale.
    pub strict: bool,
}

impl Default for ProbeSpec {
    /// Ten increments of 0.1, the fifth one probed over {5, 10, 20, 50, 100},
    /// σ² = 1.
    fn default() -> Self {
        Self {
            base_z: vec![0.1; 10],
            i_star: 5,
            magnitudes: vec![5.0, 10.0, 20.0, 50.0, 100.0],
            sigma2: 1.0,
            strict: false,
        }
    }
}

impl ProbeSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.base_z.len();
        if n < 2 {
            return Err(Error::domain("probe needs at least two increments"));
        }
        if self.i_star < 2 || self.i_star > n {
            return Err(Error::domain(format!(
                "i_star must lie in [2, {n}], got {}",
                self.i_star
            )));
        }
        if self.magnitudes.is_empty()
            || self.magnitudes.iter().any(|m| !(*m > 0.0 && m.is_finite()))
        {
            return Err(Error::domain("magnitudes must be positive and finite"));
        }
        if self.magnitudes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("magnitudes must be strictly increasing"));
        }
        if self.base_z.iter().any(|z| !z.is_finite()) {
            return Err(Error::domain("base increments must be finite"));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::domain(format!(
                "sigma2 must be positive, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }

    /// Noiseless observations `y = Dz` with `z_{i*}` set to `magnitude`.
    pub fn series_for(&self, magnitude: f64) -> Result<SeriesData> {
        let mut z = self.base_z.clone();
        z[self.i_star - 1] = magnitude;
        SeriesData::regular(theta_from_eta(&z))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub z_star: f64,
    pub posterior_mean: f64,
    pub gap: f64,
    pub stderr: f64,
}

/// Standard error of a chain average from `batches` non-overlapping batch
/// means. Any remainder at the start of the chain is dropped.
pub fn batch_means_se(xs: &[f64], batches: usize) -> f64 {
    let b = batches.max(2);
    let size = xs.len() / b;
    if size == 0 {
        return f64::NAN;
    }
    let tail = &xs[xs.len() - size * b..];
    let means: Vec<f64> = tail
        .chunks_exact(size)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b - 1) as f64;
    (var / b as f64).sqrt()
}

/// Number of batches used for chain standard errors.
pub const BATCHES: usize = 50;

/// Relative gap `|E[η_{i*} | z] - z_{i*}| / z_{i*}` for every magnitude.
///
/// `mc.fixed_sigma2` is overridden by `spec.sigma2`. Magnitude `k` runs on
/// stream `(sc.seed, k)`.
pub fn tail_robustness_probe(
    spec: &ProbeSpec,
    mc: &ModelConfig,
    sc: &SamplerConfig,
) -> Result<Vec<ProbeRow>> {
    tail_robustness_probe_with(spec, mc, sc, Execution::Parallel)
}

pub fn tail_robustness_probe_with(
    spec: &ProbeSpec,
    mc: &ModelConfig,
    sc: &SamplerConfig,
    exec: Execution,
) -> Result<Vec<ProbeRow>> {
    spec.validate()?;
    sc.validate()?;
    let mut mc = mc.clone();
    mc.fixed_sigma2 = Some(spec.sigma2);
    if spec.strict {
        mc.fixed_lambda = Some(1.0);
    }
    mc.validate()?;
    let j = spec.i_star - 1;

    map_indexed(spec.magnitudes.len(), exec, |k| {
        let z_star = spec.magnitudes[k];
        let wrap = |e: Error| Error::domain(format!("probe at z* = {z_star}: {e}"));
        let series = spec.series_for(z_star).map_err(wrap)?;
        let mut rng = RngStream::new(sc.seed, k as u64);
        let draws = run_chain_with_rng(&series, &mc, sc, &mut rng).map_err(wrap)?;
        let trace: Vec<f64> = draws.rows().map(|r| r[j] - r[j - 1]).collect();
        let mean = trace.iter().sum::<f64>() / trace.len() as f64;
        Ok(ProbeRow {
            z_star,
            posterior_mean: mean,
            gap: (mean - z_star).abs() / z_star,
            stderr: batch_means_se(&trace, BATCHES) / z_star,
        })
    })
    .into_iter()
    .collect()
}

/// Whether each gap is at most the previous one plus `k_se` combined
/// standard errors.
pub fn gaps_decreasing(rows: &[ProbeRow], k_se: f64) -> bool {
    rows.windows(2).all(|w| {
        let se = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        w[1].gap <= w[0].gap + k_se * se
    })
}

/// Relative gap of the posterior mean `z / (1 + σ²)` for one observation
/// `z ~ N(η, σ²)` under a standard normal prior on η.
pub fn normal_contrast_gap(z: f64, sigma2: f64) -> f64 {
    let estimate = z / (1.0 + sigma2);
    (estimate - z).abs() / z
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub series: SeriesData,
    /// Local scales `τ_1..τ_n`.
    pub tau: Vec<f64>,
    pub lambda: f64,
    pub sigma2: f64,
    /// Accepted draws to collect.
    pub draws: usize,
}

/// Largest problem the rejection oracle accepts.
pub const ORACLE_MAX_N: usize = 3;
/// Acceptance rate below which the oracle gives up.
pub const ORACLE_MIN_RATE: f64 = 1e-6;
const ORACLE_PILOT: u64 = 1_000_000;

impl OracleSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.series.len();
        if n > ORACLE_MAX_N {
            return Err(Error::domain(format!(
                "oracle supports n <= {ORACLE_MAX_N}, got {n}"
            )));
        }
        if self.tau.len() != n {
            return Err(Error::domain(format!(
                "need {n} local scales, got {}",
                self.tau.len()
            )));
        }
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !self.tau.iter().all(|&t| pos(t)) || !pos(self.lambda) || !pos(self.sigma2) {
            return Err(Error::domain("oracle scales must be positive and finite"));
        }
        if self.draws < 2 {
            return Err(Error::domain("oracle needs at least two draws"));
        }
        Ok(())
    }

    /// Prior variances of η in units of σ²: `τ_1`, then `λ τ_j w_j`.
    fn prior_variances(&self) -> Vec<f64> {
        let w = self.series.spacings();
        (0..self.series.len())
            .map(|j| {
                if j == 0 {
                    self.tau[0]
                } else {
                    self.lambda * self.tau[j] * w[j]
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Lower-triangular L with L Lᵀ = a, for a small symmetric positive
/// definite matrix.
fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= 0.0 {
                    return Err(Error::domain("matrix is not positive definite"));
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Solve L Lᵀ x = b.
fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}

/// Mean and a Cholesky factor of the covariance of the unconstrained
/// Gaussian conditional of η.
fn unconstrained_conditional(spec: &OracleSpec) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = spec.series.len();
    let v = spec.prior_variances();
    // A = DᵀD + diag(1/v); (DᵀD)_{ij} = n - max(i, j)
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (n - i.max(j)) as f64 + if i == j { 1.0 / v[i] } else { 0.0 })
                .collect()
        })
        .collect();
    let la = cholesky(&a)?;
    // Dᵀy: suffix sums of y
    let y = spec.series.values();
    let dty: Vec<f64> = (0..n).map(|j| y[j..].iter().sum()).collect();
    let mean = cholesky_solve(&la, &dty);
    // covariance σ² A⁻¹, built column by column
    let mut cov = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = cholesky_solve(&la, &e);
        for i in 0..n {
            cov[i][j] = spec.sigma2 * col[i];
        }
    }
    Ok((mean, cholesky(&cov)?))
}

fn mean_and_se(sum: &[f64], sum_sq: &[f64], count: f64) -> MeanEstimate {
    let mean: Vec<f64> = sum.iter().map(|s| s / count).collect();
    let stderr = sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, m)| ((sq / count - m * m).max(0.0) * count / (count - 1.0) / count).sqrt())
        .collect();
    MeanEstimate { mean, stderr }
}

/// E[θ | y] of the fixed-scale submodel by rejection sampling, with iid
/// standard errors.
///
/// Proposals come from the unconstrained Gaussian conditional of η and are
/// kept when `η_j > 0` for all `j >= 2`.
pub fn oracle_posterior_mean(spec: &OracleSpec, rng: &mut RngStream) -> Result<MeanEstimate> {
    spec.validate()?;
    let n = spec.series.len();
    let (mu, chol) = unconstrained_conditional(spec)?;
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    let mut accepted = 0usize;
    let mut proposals = 0u64;
    let mut z = vec![0.0; n];
    let mut eta = vec![0.0; n];
    while accepted < spec.draws {
        if proposals == ORACLE_PILOT && (accepted as f64) < ORACLE_MIN_RATE * proposals as f64 {
            return Err(Error::Infeasible {
                rate: accepted as f64 / proposals as f64,
                proposals,
            });
        }
        proposals += 1;
        for zi in z.iter_mut() {
            *zi = rng.standard_normal();
        }
        for i in 0..n {
            eta[i] = mu[i] + (0..=i).map(|k| chol[i][k] * z[k]).sum::<f64>();
        }
        if eta[1..].iter().any(|&e| e <= 0.0) {
            continue;
        }
        accepted += 1;
        let mut theta = 0.0;
        for i in 0..n {
            theta += eta[i];
            sum[i] += theta;
            sum_sq[i] += theta * theta;
        }
    }
    Ok(mean_and_se(&sum, &sum_sq, accepted as f64))
}

/// Long-run mean of θ from the η block alone, with every scale held at the
/// oracle's values; standard errors from batch means.
pub fn fixed_scale_gibbs_mean(
    spec: &OracleSpec,
    sweeps: usize,
    burn_in: usize,
    rng: &mut RngStream,
) -> Result<MeanEstimate> {
    spec.validate()?;
    if burn_in >= sweeps {
        return Err(Error::domain("burn_in must be below sweeps"));
    }
    let mut mc = ModelConfig::new(crate::model::PriorFamily::HalfHorseshoe);
    mc.fixed_sigma2 = Some(spec.sigma2);
    mc.fixed_lambda = Some(spec.lambda);
    let gibbs = GibbsSampler::new(&spec.series, &mc)?;
    let mut state = init_state(&spec.series, &mc);
    state.tau = spec.tau.clone();

    let n = spec.series.len();
    let mut traces = vec![Vec::with_capacity(sweeps - burn_in); n];
    for iter in 0..sweeps {
        gibbs
            .update_eta(&mut state, rng)
            .map_err(|e| e.at_iteration(iter))?;
        if iter >= burn_in {
            for (t, th) in traces.iter_mut().zip(state.theta()) {
                t.push(th);
            }
        }
    }
    Ok(MeanEstimate {
        mean: traces
            .iter()
            .map(|t| t.iter().sum::<f64>() / t.len() as f64)
            .collect(),
        stderr: traces.iter().map(|t| batch_means_se(t, BATCHES)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PriorFamily;

    fn oracle_fixture() -> OracleSpec {
        OracleSpec {
            series: SeriesData::regular(vec![0.0, 0.0]).unwrap(),
            tau: vec![1.0, 1.0],
            lambda: 1.0,
            sigma2: 1.0,
            draws: 200_000,
        }
    }

    #[test]
    fn oracle_matches_pinned_two_point_fixture() {
        // η ~ N(0, A⁻¹), A = [[3, 1], [1, 2]], truncated to η₂ > 0:
        // E[η₂] = √(0.6)·√(2/π), E[η₁] = -E[η₂]/3, θ = (η₁, η₁ + η₂)
        let pinned = [-0.2060129077457011, 0.4120258154914022];
        let est = oracle_posterior_mean(&oracle_fixture(), &mut RngStream::new(1, 0)).unwrap();
        for (j, want) in pinned.iter().enumerate() {
            assert!(
                (est.mean[j] - want).abs() < 4.0 * est.stderr[j],
                "{j}: {:?}",
                est
            );
        }
    }

    #[test]
    fn oracle_unconstrained_limit_is_least_squares() {
        let spec = OracleSpec {
            series: SeriesData::regular(vec![0.0, 30.0, 60.0]).unwrap(),
            tau: vec![1e8, 1e8, 1e8],
            lambda: 1.0,
            sigma2: 1.0,
            draws: 20_000,
        };
        let est = oracle_posterior_mean(&spec, &mut RngStream::new(2, 0)).unwrap();
        for (j, y) in [0.0, 30.0, 60.0].iter().enumerate() {
            assert!(
                (est.mean[j] - y).abs() < 4.0 * est.stderr[j] + 1e-6,
                "{j}: {:?}",
                est
            );
        }
    }

    #[test]
    fn oracle_stderr_scales_with_draws() {
        let small = OracleSpec {
            draws: 10_000,
            ..oracle_fixture()
        };
        let large = OracleSpec {
            draws: 160_000,
            ..oracle_fixture()
        };
        let a = oracle_posterior_mean(&small, &mut RngStream::new(3, 0)).unwrap();
        let b = oracle_posterior_mean(&large, &mut RngStream::new(3, 1)).unwrap();
        for j in 0..2 {
            let ratio = a.stderr[j] / b.stderr[j];
            assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
        }
    }

    #[test]
    fn oracle_rejects_bad_specs() {
        let mut rng = RngStream::new(0, 0);
        let big = OracleSpec {
            series: SeriesData::regular(vec![0.0; 4]).unwrap(),
            tau: vec![1.0; 4],
            ..oracle_fixture()
        };
        assert!(oracle_posterior_mean(&big, &mut rng).is_err());
        let wrong_tau = OracleSpec {
            tau: vec![1.0],
            ..oracle_fixture()
        };
        assert!(oracle_posterior_mean(&wrong_tau, &mut rng).is_err());
    }

    #[test]
    fn oracle_reports_infeasibility() {
        // a steep decrease pushes the constrained mass far into the tail
        let spec = OracleSpec {
            series: SeriesData::regular(vec![0.0, -200.0, -400.0]).unwrap(),
            tau: vec![1.0, 100.0, 100.0],
            lambda: 1.0,
            sigma2: 1.0,
            draws: 10,
        };
        let err = oracle_posterior_mean(&spec, &mut RngStream::new(4, 0)).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }), "{err}");
    }

    #[test]
    fn gibbs_agrees_with_oracle_on_fixture() {
        let spec = oracle_fixture();
        let o = oracle_posterior_mean(&spec, &mut RngStream::new(5, 0)).unwrap();
        let g = fixed_scale_gibbs_mean(&spec, 100_000, 1_000, &mut RngStream::new(5, 1)).unwrap();
        for j in 0..2 {
            let se = (o.stderr[j].powi(2) + g.stderr[j].powi(2)).sqrt();
            assert!((o.mean[j] - g.mean[j]).abs() < 3.0 * se, "{j}: {o:?} {g:?}");
        }
    }

    #[test]
    fn batch_means_se_of_iid_draws() {
        let mut rng = RngStream::new(6, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.standard_normal()).collect();
        let se = batch_means_se(&xs, 50);
        let iid = 1.0 / (xs.len() as f64).sqrt();
        // 49 degrees of freedom: relative sd of the estimate ≈ 0.1
        assert!((se / iid - 1.0).abs() < 0.35, "{se} vs {iid}");
        assert!(batch_means_se(&xs[..10], 50).is_nan());
    }

    #[test]
    fn normal_contrast_is_flat() {
        for z in [5.0, 10.0, 100.0, 1e6] {
            assert!((normal_contrast_gap(z, 1.0) - 0.5).abs() < 1e-12);
            assert!((normal_contrast_gap(z, 3.0) - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn probe_spec_validation() {
        let ok = ProbeSpec::default();
        assert!(ok.validate().is_ok());
        assert!(ProbeSpec {
            i_star: 1,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ProbeSpec {
            magnitudes: vec![5.0, 5.0],
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ProbeSpec {
            sigma2: 0.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        let s = ok.series_for(7.0).unwrap();
        assert!((s.values()[4] - s.values()[3] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn probe_gap_shrinks_for_large_jump() {
        let spec = ProbeSpec {
            magnitudes: vec![5.0, 50.0],
            ..ProbeSpec::default()
        };
        let sc = SamplerConfig::new(4000, 1000, 1, 8).unwrap();
        let rows = tail_robustness_probe(&spec, &ModelConfig::new(PriorFamily::HalfHorseshoe), &sc)
            .unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[1].gap < 0.15, "{rows:?}");
        assert!(gaps_decreasing(&rows, 2.0), "{rows:?}");
    }
}
