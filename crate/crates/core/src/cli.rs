//! Command-line front end.
//!
//! Every subcommand has a `cmd_*` function taking its parsed arguments, so
//! the commands can be driven from tests without spawning a process.
//! Failures become exit code 1 with a one-line diagnostic on stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io::{self, FitSidecar, MaxIncrement};
use crate::model::prior_density::density_table;
use crate::model::{
    run_chain, Direction, LambdaExponent, ModelConfig, PriorFamily, SamplerConfig, SeriesData,
};
use crate::par::{self, Execution};
use crate::posterior::{interpolate_draws_with, max_increment_location, summarize, Edges};
use crate::rng_dist::{run_battery, ExactSamplers, SamplerSet};
use crate::simlab::{
    format_table, run_replications_with, ReplicationPlan, ReplicationTable, Scenario,
};
use crate::theory_probe::{
    gaps_decreasing, normal_contrast_gap, tail_robustness_probe_with, ProbeSpec,
};

/// Value of `FitSidecar::input` for the bundled Nile series.
pub const NILE_INPUT: &str = "bundled:nile";

#[derive(Debug, Parser)]
#[command(
    name = "isoshrink",
    version,
    about = "Bayesian isotonic regression with shrinkage priors on increments"
)]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Log verbosity: -v info, -vv debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one series and write pointwise posterior summaries.
    Fit(FitArgs),
    /// Run simulation replications and write the metric table.
    Simulate(SimulateArgs),
    /// Tail-robustness probe of the posterior mean of a large increment.
    Probe(ProbeArgs),
    /// Statistical checks of the random variate generators.
    DistTest(DistTestArgs),
    /// Marginal prior densities of one increment under each family.
    DensityPlot(DensityArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// The observed locations.
    Observed,
    /// Every integer from --grid-start to --grid-end.
    FullInteger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Args)]
pub struct ChainArgs {
    /// Total Gibbs sweeps.
    #[arg(long, default_value_t = 3000)]
    pub iters: usize,
    /// Sweeps discarded before retaining draws.
    #[arg(long, default_value_t = 500)]
    pub burnin: usize,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ChainArgs {
    pub fn sampler(&self) -> Result<SamplerConfig> {
        SamplerConfig::new(self.iters, self.burnin, self.thin, self.seed)
    }
}

#[derive(Clone, Debug, Args)]
pub struct FitArgs {
    /// CSV file with header `x,y`.
    #[arg(long, required_unless_present = "nile", conflicts_with = "nile")]
    pub input: Option<PathBuf>,
    /// Use the bundled Nile flow series (1871–1970).
    #[arg(long)]
    pub nile: bool,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Run metadata; defaults to the output path with `.meta.json` appended.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PriorFamily::HalfHorseshoe)]
    pub prior: PriorFamily,
    #[arg(long, value_enum, default_value_t = Direction::Increasing)]
    pub direction: Direction,
    /// Hold σ² at this value.
    #[arg(long)]
    pub fixed_sigma2: Option<f64>,
    /// Shape parameter of the λ full conditional.
    #[arg(long, value_enum, default_value_t = LambdaExponent::ThreeMinusN)]
    pub lambda_exponent: LambdaExponent,
    /// Credible level of the pointwise intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = Grid::Observed)]
    pub grid: Grid,
    #[arg(long, default_value_t = 1)]
    pub grid_start: i64,
    /// Defaults to the last observed location rounded up.
    #[arg(long)]
    pub grid_end: Option<i64>,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Clone, Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, num_args = 1.., default_values_t = [Scenario::II])]
    pub scenario: Vec<Scenario>,
    #[arg(long, value_enum, num_args = 1.., default_values_t = PriorFamily::ALL)]
    pub prior: Vec<PriorFamily>,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0.25)]
    pub noise_var: f64,
    /// Fit on this many random locations, score on the full grid.
    #[arg(long)]
    pub irregular: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = LambdaExponent::ThreeMinusN)]
    pub lambda_exponent: LambdaExponent,
    /// Table CSV (scenario, prior, rmse, cp, al, reps, failures).
    #[arg(long)]
    pub output: PathBuf,
    /// Per-replication metrics CSV.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Run replications one after another on the calling thread.
    #[arg(long)]
    pub sequential: bool,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Clone, Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [5.0, 10.0, 20.0, 50.0, 100.0])]
    pub magnitudes: Vec<f64>,
    /// Value of every other increment.
    #[arg(long, default_value_t = 0.1)]
    pub base_z: f64,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// One-based index of the probed increment.
    #[arg(long, default_value_t = 5)]
    pub i_star: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Hold the global scale at 1.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value_t = PriorFamily::HalfHorseshoe)]
    pub prior: PriorFamily,
    /// Allowed rise between neighbouring gaps, in combined standard errors.
    #[arg(long, default_value_t = 2.0)]
    pub tolerance_se: f64,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Clone, Debug, Args)]
pub struct DistTestArgs {
    /// Draws per distribution.
    #[arg(long, default_value_t = 200_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Full report as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct DensityArgs {
    #[arg(long, default_value_t = 5.0)]
    pub upper: f64,
    #[arg(long, default_value_t = 500)]
    pub points: usize,
    #[arg(long)]
    pub output: PathBuf,
}

fn load_input(args: &FitArgs) -> Result<(SeriesData, String)> {
    match &args.input {
        Some(path) if !args.nile => Ok((io::read_series_csv(path)?, path.display().to_string())),
        _ => Ok((io::nile(), NILE_INPUT.to_string())),
    }
}

fn target_grid(args: &FitArgs, series: &SeriesData) -> Result<Option<Vec<f64>>> {
    match args.grid {
        Grid::Observed => Ok(None),
        Grid::FullInteger => {
            let last = series.locations()[series.len() - 1];
            let end = args.grid_end.unwrap_or(last.ceil() as i64);
            if end < args.grid_start {
                return Err(Error::domain(format!(
                    "grid end {end} lies before grid start {}",
                    args.grid_start
                )));
            }
            Ok(Some((args.grid_start..=end).map(|i| i as f64).collect()))
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Default sidecar location: `<output>.meta.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn cmd_fit(args: &FitArgs) -> Result<FitSidecar> {
    let (series, input) = load_input(args)?;
    let mut model = ModelConfig::new(args.prior);
    model.direction = args.direction;
    model.fixed_sigma2 = args.fixed_sigma2;
    model.lambda_exponent = args.lambda_exponent;
    let sampler = args.chain.sampler()?;
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(Error::domain(format!(
            "level must lie in (0, 1), got {}",
            args.level
        )));
    }

    let draws = run_chain(&series, &model, &sampler)?;
    let observed = summarize(&draws, args.level)?;
    // the change point is located on the observed locations
    let oriented = match args.direction {
        Direction::Increasing => observed.clone(),
        Direction::Decreasing => observed.negated(),
    };
    let (index, change) = max_increment_location(&oriented)?;
    let max_increment = MaxIncrement {
        location: observed.locations[index],
        index,
        change: observed.mean[index] - observed.mean[index - 1],
    };
    debug_assert_eq!(change.abs(), max_increment.change.abs());

    let summary = match target_grid(args, &series)? {
        None => observed,
        Some(grid) => summarize(
            &interpolate_draws_with(&draws, &grid, Edges::Hold)?,
            args.level,
        )?,
    };
    match args.format {
        Format::Csv => io::write_summary_csv(&args.output, &summary)?,
        Format::Json => io::write_json(&args.output, &summary)?,
    }

    let sidecar = FitSidecar {
        input,
        n_observations: series.len(),
        model,
        sampler,
        level: args.level,
        grid: match args.grid {
            Grid::Observed => "observed".into(),
            Grid::FullInteger => format!(
                "full-integer:{}..={}",
                summary.locations[0],
                summary.locations[summary.len() - 1]
            ),
        },
        retained_draws: draws.n_draws(),
        sigma2_trace_mean: mean(&draws.sigma2_trace),
        lambda_trace_mean: mean(&draws.lambda_trace),
        floors: draws.floors,
        max_increment: Some(max_increment),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let side = args
        .sidecar
        .clone()
        .unwrap_or_else(|| sidecar_path(&args.output));
    io::write_json(&side, &sidecar)?;
    log::info!(
        "largest {} at x = {} ({:+})",
        if args.direction == Direction::Increasing {
            "increase"
        } else {
            "decrease"
        },
        max_increment.location,
        max_increment.change
    );
    Ok(sidecar)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<ReplicationTable> {
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let mut all = ReplicationTable {
        rows: Vec::new(),
        records: Vec::new(),
    };
    for &scenario in &args.scenario {
        let mut plan = ReplicationPlan::new(scenario);
        plan.n = args.n;
        plan.reps = args.reps;
        plan.noise_var = args.noise_var;
        plan.priors = args.prior.clone();
        plan.sampler = args.chain.sampler()?;
        plan.irregular = args.irregular;
        plan.base_seed = args.chain.seed;
        plan.level = args.level;
        plan.model.lambda_exponent = args.lambda_exponent;
        all.extend(run_replications_with(&plan, exec)?);
    }
    io::write_table_csv(&args.output, &all.rows)?;
    if let Some(path) = &args.records {
        io::write_records_csv(path, &all.records)?;
    }
    print!("{}", format_table(&all.rows));
    Ok(all)
}

/// Runs the probe and writes its CSV; `Ok(false)` when the gaps fail to
/// decrease within tolerance.
pub fn cmd_probe(args: &ProbeArgs) -> Result<bool> {
    let spec = ProbeSpec {
        base_z: vec![args.base_z; args.n],
        i_star: args.i_star,
        magnitudes: args.magnitudes.clone(),
        sigma2: args.sigma2,
        strict: args.strict,
    };
    let rows = tail_robustness_probe_with(
        &spec,
        &ModelConfig::new(args.prior),
        &args.chain.sampler()?,
        Execution::Parallel,
    )?;
    let contrast: Vec<f64> = rows
        .iter()
        .map(|r| normal_contrast_gap(r.z_star, args.sigma2))
        .collect();
    io::write_probe_csv(&args.output, &rows, &contrast)?;
    println!(
        "{:>10} {:>12} {:>10} {:>10}",
        "z_star", "gap", "stderr", "normal"
    );
    for (r, c) in rows.iter().zip(&contrast) {
        println!(
            "{:>10} {:>12.6} {:>10.6} {:>10.6}",
            r.z_star, r.gap, r.stderr, c
        );
    }
    let ok = gaps_decreasing(&rows, args.tolerance_se);
    if !ok {
        eprintln!(
            "gap sequence is not decreasing within {} standard errors",
            args.tolerance_se
        );
    }
    Ok(ok)
}

/// Runs the battery against `samplers`; `Ok(false)` when any check fails.
pub fn cmd_dist_test_with(samplers: &dyn SamplerSet, args: &DistTestArgs) -> Result<bool> {
    let report = run_battery(samplers, args.draws, args.seed)?;
    for c in &report.checks {
        println!(
            "{} {:<40} statistic {:.6e} threshold {:.6e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.statistic,
            c.threshold
        );
    }
    if let Some(path) = &args.output {
        io::write_json(path, &report)?;
    }
    Ok(report.all_passed())
}

pub fn cmd_dist_test(args: &DistTestArgs) -> Result<bool> {
    cmd_dist_test_with(&ExactSamplers, args)
}

pub fn cmd_density_plot(args: &DensityArgs) -> Result<()> {
    if !(args.upper > 0.0 && args.upper.is_finite()) || args.points == 0 {
        return Err(Error::domain(
            "need a positive upper bound and at least one point",
        ));
    }
    io::write_density_csv(&args.output, &density_table(args.upper, args.points))
}

fn exit(result: Result<bool>) -> ExitCode {
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .try_init();
    if let Some(t) = cli.threads {
        if t == 0 || !par::set_threads(t) {
            eprintln!("error: cannot set worker threads to {t}");
            return ExitCode::FAILURE;
        }
    }
    exit(match &cli.command {
        Command::Fit(a) => cmd_fit(a).map(|_| true),
        Command::Simulate(a) => cmd_simulate(a).map(|_| true),
        Command::Probe(a) => cmd_probe(a),
        Command::DistTest(a) => cmd_dist_test(a),
        Command::DensityPlot(a) => cmd_density_plot(a).map(|_| true),
    })
}

pub fn main_entry() -> ExitCode {
    run(Cli::parse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "isoshrink",
            "fit",
            "--nile",
            "--output",
            "o.csv",
            "--prior",
            "hh",
            "--direction",
            "dec",
            "--iters",
            "6000",
            "--burnin",
            "1000",
            "--threads",
            "2",
        ])
        .unwrap();
        assert_eq!(cli.threads, Some(2));
        match cli.command {
            Command::Fit(a) => {
                assert!(a.nile);
                assert_eq!(a.direction, Direction::Decreasing);
                assert_eq!(a.chain.iters, 6000);
            }
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from([
            "isoshrink",
            "simulate",
            "--scenario",
            "II",
            "IV",
            "--prior",
            "hh",
            "hn",
            "--output",
            "t.csv",
        ])
        .unwrap();
        match cli.command {
            Command::Simulate(a) => {
                assert_eq!(a.scenario, vec![Scenario::II, Scenario::IV]);
                assert_eq!(
                    a.prior,
                    vec![PriorFamily::HalfHorseshoe, PriorFamily::HalfNormal]
                );
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["isoshrink", "fit", "--output", "o.csv"]).is_err());
    }

    #[test]
    fn sidecar_path_appends_suffix() {
        assert_eq!(
            sidecar_path(Path::new("out/fit.csv")),
            PathBuf::from("out/fit.csv.meta.json")
        );
    }
}
