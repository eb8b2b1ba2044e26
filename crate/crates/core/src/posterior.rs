//! Posterior summaries, per-draw interpolation and evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PosteriorDraws;

/// Pointwise posterior mean with equal-tailed credible bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub locations: Vec<f64>,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
}

impl PosteriorSummary {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Sign-flipped summary (bounds swap roles).
    pub fn negated(&self) -> Self {
        Self {
            locations: self.locations.clone(),
            mean: self.mean.iter().map(|v| -v).collect(),
            lower: self.upper.iter().map(|v| -v).collect(),
            upper: self.lower.iter().map(|v| -v).collect(),
            level: self.level,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub rmse: f64,
    /// Fraction of locations whose interval covers the truth.
    pub cp: f64,
    /// Mean interval length.
    pub al: f64,
}

/// Type-7 empirical quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(draws: &PosteriorDraws, level: f64) -> Result<PosteriorSummary> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "credible level must lie in (0, 1), got {level}"
        )));
    }
    let m = draws.n_draws();
    if m < 2 {
        return Err(Error::Data(format!(
            "need at least 2 retained draws, got {m}"
        )));
    }
    let n = draws.n_locations();
    let tail = 0.5 * (1.0 - level);
    let mut mean = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for j in 0..n {
        let mut col = draws.column(j);
        mean.push(col.iter().sum::<f64>() / m as f64);
        col.sort_by(f64::total_cmp);
        lower.push(quantile_sorted(&col, tail));
        upper.push(quantile_sorted(&col, 1.0 - tail));
    }
    // rounding on (near-)constant columns can push the mean a few ulps outside
    for j in 0..n {
        let tol = 1e-12 * mean[j].abs().max(1.0);
        if mean[j] < lower[j] && lower[j] - mean[j] <= tol {
            mean[j] = lower[j];
        } else if mean[j] > upper[j] && mean[j] - upper[j] <= tol {
            mean[j] = upper[j];
        }
    }
    Ok(PosteriorSummary {
        locations: draws.locations.clone(),
        mean,
        lower,
        upper,
        level,
    })
}

/// Linear interpolation of every draw onto `target` (no extrapolation).
pub fn interpolate_draws(draws: &PosteriorDraws, target: &[f64]) -> Result<PosteriorDraws> {
    interpolate_draws_with(draws, target, Edges::Reject)
}

/// Treatment of target points outside the observed range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Edges {
    #[default]
    Reject,
    /// Hold the first / last observed value constant.
    Hold,
}

pub fn interpolate_draws_with(
    draws: &PosteriorDraws,
    target: &[f64],
    edges: Edges,
) -> Result<PosteriorDraws> {
    let obs = &draws.locations;
    let (first, last) = (obs[0], obs[obs.len() - 1]);
    if let Some(&t) = target.iter().find(|&&t| !t.is_finite()) {
        return Err(Error::domain(format!("target location {t} is not finite")));
    }
    if edges == Edges::Reject {
        if let Some(&t) = target.iter().find(|&&t| !(t >= first && t <= last)) {
            return Err(Error::domain(format!(
                "cannot extrapolate to {t}: observed range is [{first}, {last}]"
            )));
        }
    }
    // for each target point: left bracket index and weight of the right point
    let brackets: Vec<(usize, f64)> = target
        .iter()
        .map(|&t| {
            if t <= first {
                return (0, 0.0);
            }
            if t >= last {
                return (obs.len() - 1, 0.0);
            }
            let right = obs.partition_point(|&x| x < t);
            if right < obs.len() && obs[right] == t {
                (right, 0.0)
            } else {
                let left = right - 1;
                (left, (t - obs[left]) / (obs[right] - obs[left]))
            }
        })
        .collect();

    let mut theta = Vec::with_capacity(draws.n_draws() * target.len());
    for row in draws.rows() {
        theta.extend(brackets.iter().map(|&(left, w)| {
            if w == 0.0 {
                row[left]
            } else {
                row[left] + w * (row[left + 1] - row[left])
            }
        }));
    }
    Ok(PosteriorDraws {
        locations: target.to_vec(),
        theta,
        ..draws.clone()
    })
}

pub fn evaluate(summary: &PosteriorSummary, truth: &[f64]) -> Result<EvalMetrics> {
    let n = summary.len();
    if truth.len() != n {
        return Err(Error::Data(format!(
            "summary has {n} locations, truth has {}",
            truth.len()
        )));
    }
    if n == 0 {
        return Err(Error::Data("empty summary".into()));
    }
    let nf = n as f64;
    let mse = summary
        .mean
        .iter()
        .zip(truth)
        .map(|(m, t)| (m - t).powi(2))
        .sum::<f64>()
        / nf;
    let covered = (0..n)
        .filter(|&i| summary.lower[i] <= truth[i] && truth[i] <= summary.upper[i])
        .count();
    let al = (0..n)
        .map(|i| summary.upper[i] - summary.lower[i])
        .sum::<f64>()
        / nf;
    Ok(EvalMetrics {
        rmse: mse.sqrt(),
        cp: covered as f64 / nf,
        al,
    })
}

/// Largest increase of the posterior mean between neighbours: returns the
/// zero-based index `j >= 1` of the right-hand location and the increment.
/// Ties go to the smallest index.
pub fn max_increment_location(summary: &PosteriorSummary) -> Result<(usize, f64)> {
    if summary.len() < 2 {
        return Err(Error::Data("need at least 2 locations".into()));
    }
    let mut best = (1, summary.mean[1] - summary.mean[0]);
    for j in 2..summary.len() {
        let inc = summary.mean[j] - summary.mean[j - 1];
        if inc > best.1 {
            best = (j, inc);
        }
    }
    Ok(best)
}
