//! Simulation scenarios and the replication driver.
//!
//! Each replication draws a fresh data set from stream `(base_seed, r)`, fits
//! every requested prior on its own stream, and scores the fit against the
//! truth. Replications run in parallel; aggregation happens afterwards in
//! replication order, so tables do not depend on the worker count.

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{run_chain_with_rng, ModelConfig, PriorFamily, SamplerConfig, SeriesData};
use crate::par::{map_indexed, Execution};
use crate::posterior::{evaluate, interpolate_draws_with, summarize, Edges, EvalMetrics};
use crate::rng_dist::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
pub enum Scenario {
    /// constant
    #[value(name = "I", alias = "1")]
    I,
    /// piecewise constant with two jumps
    #[value(name = "II", alias = "2")]
    II,
    /// linear
    #[value(name = "III", alias = "3")]
    III,
    /// piecewise linear with three jumps
    #[value(name = "IV", alias = "4")]
    IV,
    /// exponential
    #[value(name = "V", alias = "5")]
    V,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::I,
        Scenario::II,
        Scenario::III,
        Scenario::IV,
        Scenario::V,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::I => "I",
            Scenario::II => "II",
            Scenario::III => "III",
            Scenario::IV => "IV",
            Scenario::V => "V",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Scenario as ValueEnum>::from_str(s, true)
            .map_err(|_| Error::domain(format!("unknown scenario {s}")))
    }
}

/// True function value of scenario `s` at `x ∈ [0, 100]`. Branch intervals
/// are closed on the right (`25 < x <= 80`, ...).
pub fn scenario_truth(s: Scenario, x: f64) -> Result<f64> {
    if !(0.0..=100.0).contains(&x) {
        return Err(Error::domain(format!(
            "scenario argument must lie in [0, 100], got {x}"
        )));
    }
    Ok(match s {
        Scenario::I => 2.0,
        Scenario::II => {
            if x <= 25.0 {
                0.0
            } else if x <= 80.0 {
                2.5
            } else {
                3.0
            }
        }
        Scenario::III => 0.04 * x,
        Scenario::IV => {
            let base = 0.02 * x;
            if x <= 20.0 {
                base
            } else if x <= 50.0 {
                base + 1.0
            } else if x <= 80.0 {
                base + 1.5
            } else {
                base + 1.75
            }
        }
        Scenario::V => (0.05 * x - 2.0).exp() / 4.4 + 1.0,
    })
}

/// Observations at `x = 1..n` with `N(0, noise_var)` noise, plus the truth.
pub fn generate_dataset(
    s: Scenario,
    n: usize,
    noise_var: f64,
    rng: &mut RngStream,
) -> Result<(SeriesData, Vec<f64>)> {
    if n < 2 {
        return Err(Error::domain("need n >= 2"));
    }
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(Error::domain(format!(
            "noise variance must be non-negative, got {noise_var}"
        )));
    }
    let truth = (1..=n)
        .map(|i| scenario_truth(s, i as f64))
        .collect::<Result<Vec<_>>>()?;
    let sd = noise_var.sqrt();
    let values = truth
        .iter()
        .map(|t| t + sd * rng.standard_normal())
        .collect();
    Ok((SeriesData::regular(values)?, truth))
}

/// Uniformly chosen `m` distinct observations, kept in location order.
pub fn subsample_irregular(
    series: &SeriesData,
    m: usize,
    rng: &mut RngStream,
) -> Result<SeriesData> {
    let n = series.len();
    if m < 2 || m > n {
        return Err(Error::domain(format!(
            "subsample size must lie in [2, {n}], got {m}"
        )));
    }
    // partial Fisher-Yates
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = i + rng.index(n - i);
        idx.swap(i, j);
    }
    let mut chosen = idx[..m].to_vec();
    chosen.sort_unstable();
    SeriesData::new(
        chosen.iter().map(|&i| series.locations()[i]).collect(),
        chosen.iter().map(|&i| series.values()[i]).collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationPlan {
    pub scenario: Scenario,
    pub n: usize,
    pub reps: usize,
    pub noise_var: f64,
    pub priors: Vec<PriorFamily>,
    pub sampler: SamplerConfig,
    /// Fit on this many randomly chosen locations and score on the full grid;
    /// grid points outside the chosen range take the nearest fitted value.
    pub irregular: Option<usize>,
    pub base_seed: u64,
    /// Model settings other than the prior family.
    pub model: ModelConfig,
    pub level: f64,
}

impl ReplicationPlan {
    /// n = 100, noise variance 0.25, all three priors, 3000/500 sweeps,
    /// 200 replications.
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            n: 100,
            reps: 200,
            noise_var: 0.25,
            priors: PriorFamily::ALL.to_vec(),
            sampler: SamplerConfig::default(),
            irregular: None,
            base_seed: 0,
            model: ModelConfig::new(PriorFamily::HalfHorseshoe),
            level: 0.95,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::domain("reps must be at least 1"));
        }
        if self.n < 2 {
            return Err(Error::domain("n must be at least 2"));
        }
        if let Some(m) = self.irregular {
            if m < 2 || m > self.n {
                return Err(Error::domain(format!(
                    "irregular subsample size must lie in [2, n], got {m}"
                )));
            }
        }
        if self.priors.is_empty() {
            return Err(Error::domain("no priors requested"));
        }
        self.sampler.validate()?;
        self.model.validate()
    }
}

/// Metrics of one fit in one replication; `metrics` is `None` when the chain
/// failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub scenario: Scenario,
    pub prior: PriorFamily,
    pub replication: usize,
    pub metrics: Option<EvalMetrics>,
    pub error: Option<String>,
}

/// Across-replication means for one (scenario, prior) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub scenario: Scenario,
    pub prior: PriorFamily,
    pub rmse: f64,
    pub cp: f64,
    pub al: f64,
    pub reps: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationTable {
    pub rows: Vec<TableRow>,
    pub records: Vec<ReplicationRecord>,
}

impl ReplicationTable {
    pub fn row(&self, scenario: Scenario, prior: PriorFamily) -> Option<&TableRow> {
        self.rows
            .iter()
            .find(|r| r.scenario == scenario && r.prior == prior)
    }

    pub fn extend(&mut self, other: ReplicationTable) {
        self.rows.extend(other.rows);
        self.records.extend(other.records);
    }
}

/// Stream id of the chain fitting `prior_index` in replication `rep`; kept
/// in the upper half of the id space, away from the data streams.
fn chain_stream(rep: usize, prior_index: usize) -> u64 {
    (1u64 << 63) | ((rep as u64) << 8) | prior_index as u64
}

fn fit_one(
    plan: &ReplicationPlan,
    prior_index: usize,
    rep: usize,
    fit_data: &SeriesData,
    eval_grid: &[f64],
    truth: &[f64],
) -> Result<EvalMetrics> {
    let mut mc = plan.model.clone();
    mc.prior = plan.priors[prior_index];
    let mut rng = RngStream::new(plan.base_seed, chain_stream(rep, prior_index));
    let draws = run_chain_with_rng(fit_data, &mc, &plan.sampler, &mut rng)?;
    if !draws.all_monotone() {
        return Err(Error::NotMonotone);
    }
    let draws = if plan.irregular.is_some() {
        interpolate_draws_with(&draws, eval_grid, Edges::Hold)?
    } else {
        draws
    };
    evaluate(&summarize(&draws, plan.level)?, truth)
}

fn one_replication(plan: &ReplicationPlan, rep: usize) -> Vec<ReplicationRecord> {
    let record = |prior: PriorFamily, result: Result<EvalMetrics>| match result {
        Ok(m) => ReplicationRecord {
            scenario: plan.scenario,
            prior,
            replication: rep,
            metrics: Some(m),
            error: None,
        },
        Err(e) => ReplicationRecord {
            scenario: plan.scenario,
            prior,
            replication: rep,
            metrics: None,
            error: Some(e.to_string()),
        },
    };

    let mut rng = RngStream::new(plan.base_seed, rep as u64);
    let prepared = generate_dataset(plan.scenario, plan.n, plan.noise_var, &mut rng).and_then(
        |(full, truth)| {
            let fit_data = match plan.irregular {
                Some(m) => subsample_irregular(&full, m, &mut rng)?,
                None => full.clone(),
            };
            Ok((full, truth, fit_data))
        },
    );
    match prepared {
        Ok((full, truth, fit_data)) => (0..plan.priors.len())
            .map(|k| {
                let result = fit_one(plan, k, rep, &fit_data, full.locations(), &truth);
                record(plan.priors[k], result)
            })
            .collect(),
        Err(e) => plan
            .priors
            .iter()
            .map(|&p| record(p, Err(Error::Data(e.to_string()))))
            .collect(),
    }
}

/// Reduce per-replication records (in replication order) to table rows.
pub fn aggregate(
    scenario: Scenario,
    priors: &[PriorFamily],
    records: &[ReplicationRecord],
) -> Vec<TableRow> {
    priors
        .iter()
        .map(|&prior| {
            let cell: Vec<&ReplicationRecord> = records
                .iter()
                .filter(|r| r.prior == prior && r.scenario == scenario)
                .collect();
            let ok: Vec<EvalMetrics> = cell.iter().filter_map(|r| r.metrics).collect();
            let k = ok.len() as f64;
            let mean = |f: fn(&EvalMetrics) -> f64| {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(f).sum::<f64>() / k
                }
            };
            TableRow {
                scenario,
                prior,
                rmse: mean(|m| m.rmse),
                cp: mean(|m| m.cp),
                al: mean(|m| m.al),
                reps: cell.len(),
                failures: cell.len() - ok.len(),
            }
        })
        .collect()
}

pub fn run_replications(plan: &ReplicationPlan) -> Result<ReplicationTable> {
    run_replications_with(plan, Execution::Parallel)
}

pub fn run_replications_with(plan: &ReplicationPlan, exec: Execution) -> Result<ReplicationTable> {
    plan.validate()?;
    let records: Vec<ReplicationRecord> =
        map_indexed(plan.reps, exec, |rep| one_replication(plan, rep))
            .into_iter()
            .flatten()
            .collect();
    for r in records.iter().filter(|r| r.error.is_some()) {
        log::warn!(
            "scenario {} prior {} replication {} failed: {}",
            r.scenario,
            r.prior,
            r.replication,
            r.error.as_deref().unwrap_or("")
        );
    }
    Ok(ReplicationTable {
        rows: aggregate(plan.scenario, &plan.priors, &records),
        records,
    })
}

/// Aligned plain-text rendering of table rows.
pub fn format_table(rows: &[TableRow]) -> String {
    let mut out = format!(
        "{:<9} {:<6} {:>8} {:>7} {:>8} {:>6} {:>9}\n",
        "scenario", "prior", "rmse", "cp(%)", "al", "reps", "failures"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<9} {:<6} {:>8.3} {:>7.1} {:>8.3} {:>6} {:>9}\n",
            r.scenario.name(),
            r.prior.short_name(),
            r.rmse,
            100.0 * r.cp,
            r.al,
            r.reps,
            r.failures
        ));
    }
    out
}
