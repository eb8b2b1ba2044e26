//! CSV / JSON input and output.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! value read back parses to the identical `f64`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FloorCounts, ModelConfig, SamplerConfig, SeriesData};
use crate::posterior::PosteriorSummary;
use crate::simlab::{ReplicationRecord, TableRow};
use crate::theory_probe::ProbeRow;

const NILE_CSV: &str = include_str!("../data/nile.csv");

/// A parsed series plus the number of rows that arrived out of order.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedSeries {
    pub series: SeriesData,
    pub out_of_order: usize,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(source) = e.into_kind() {
            return Error::Io {
                path: path.to_path_buf(),
                source,
            };
        }
        unreachable!()
    }
    Error::Csv(e)
}

/// Parse `x,y` CSV text. Rows are sorted by `x`; duplicate locations are an
/// error naming both lines.
pub fn parse_series_csv<R: Read>(reader: R) -> Result<ParsedSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "expected header `x,y`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows: Vec<(f64, f64, u64)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse {
                line,
                msg: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let field = |i: usize| -> Result<f64> {
            let v: f64 = record[i].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("cannot parse `{}` as a number", &record[i]),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse {
                    line,
                    msg: format!("non-finite value `{}`", &record[i]),
                })
            }
        };
        rows.push((field(0)?, field(1)?, line));
    }
    if rows.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 observations, found {}",
            rows.len()
        )));
    }
    let out_of_order = rows.windows(2).filter(|w| w[1].0 < w[0].0).count();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        let (first, second) = (w[0].2.min(w[1].2), w[0].2.max(w[1].2));
        return Err(Error::Parse {
            line: second,
            msg: format!(
                "duplicate location x = {} (first seen on line {first})",
                w[0].0
            ),
        });
    }
    let series = SeriesData::new(
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
    )?;
    Ok(ParsedSeries {
        series,
        out_of_order,
    })
}

/// Read an `x,y` CSV file, logging a warning when rows had to be sorted.
pub fn read_series_csv(path: impl AsRef<Path>) -> Result<SeriesData> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    let parsed = parse_series_csv(file).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        e => e,
    })?;
    if parsed.out_of_order > 0 {
        log::warn!(
            "{}: {} rows out of order; sorted by x",
            path.display(),
            parsed.out_of_order
        );
    }
    Ok(parsed.series)
}

/// Annual Nile flow at Aswan, 1871–1970 (x = year, y = flow in 10⁸ m³).
pub fn nile() -> SeriesData {
    parse_series_csv(NILE_CSV.as_bytes())
        .expect("bundled Nile data parses")
        .series
}

/// The bundled Nile CSV text exactly as shipped.
pub fn nile_csv_text() -> &'static str {
    NILE_CSV
}

fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    File::create(path).map_err(io_err(path))
}

fn finish<W: Write>(path: &Path, wtr: csv::Writer<W>) -> Result<()> {
    let mut inner = wtr.into_inner().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    inner.flush().map_err(io_err(path))
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut wtr = csv::Writer::from_writer(create(path)?);
    wtr.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        wtr.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    finish(path, wtr)
}

pub fn write_summary_csv(path: impl AsRef<Path>, summary: &PosteriorSummary) -> Result<()> {
    let rows = (0..summary.len()).map(|i| {
        vec![
            summary.locations[i].to_string(),
            summary.mean[i].to_string(),
            summary.lower[i].to_string(),
            summary.upper[i].to_string(),
        ]
    });
    write_rows(path.as_ref(), &["x", "mean", "lower", "upper"], rows)
}

#[derive(Deserialize)]
struct SummaryRow {
    x: f64,
    mean: f64,
    lower: f64,
    upper: f64,
}

/// Read a summary CSV written by [`write_summary_csv`]; the credible level is
/// not stored in the CSV and must be supplied.
pub fn read_summary_csv(path: impl AsRef<Path>, level: f64) -> Result<PosteriorSummary> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_reader(File::open(path).map_err(io_err(path))?);
    let mut s = PosteriorSummary {
        locations: Vec::new(),
        mean: Vec::new(),
        lower: Vec::new(),
        upper: Vec::new(),
        level,
    };
    for row in rdr.deserialize() {
        let row: SummaryRow = row.map_err(|e| csv_err(path, e))?;
        s.locations.push(row.x);
        s.mean.push(row.mean);
        s.lower.push(row.lower);
        s.upper.push(row.upper);
    }
    Ok(s)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n").map_err(io_err(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let f = File::open(path).map_err(io_err(path))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

/// Location of the largest posterior-mean increment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxIncrement {
    /// Location at the upper end of the increment.
    pub location: f64,
    pub index: usize,
    /// Signed change of the posterior mean.
    pub change: f64,
}

/// Everything needed to repeat a fit, plus run diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSidecar {
    /// Input file, or `bundled:nile`.
    pub input: String,
    pub n_observations: usize,
    pub model: ModelConfig,
    pub sampler: SamplerConfig,
    pub level: f64,
    pub grid: String,
    pub retained_draws: usize,
    pub sigma2_trace_mean: f64,
    pub lambda_trace_mean: f64,
    pub floors: FloorCounts,
    pub max_increment: Option<MaxIncrement>,
    pub version: String,
}

pub fn write_table_csv(path: impl AsRef<Path>, rows: &[TableRow]) -> Result<()> {
    let body = rows.iter().map(|r| {
        vec![
            r.scenario.to_string(),
            r.prior.short_name().to_string(),
            r.rmse.to_string(),
            r.cp.to_string(),
            r.al.to_string(),
            r.reps.to_string(),
            r.failures.to_string(),
        ]
    });
    write_rows(
        path.as_ref(),
        &["scenario", "prior", "rmse", "cp", "al", "reps", "failures"],
        body,
    )
}

pub fn write_records_csv(path: impl AsRef<Path>, records: &[ReplicationRecord]) -> Result<()> {
    let body = records.iter().map(|r| {
        let (rmse, cp, al) = r
            .metrics
            .map_or((String::new(), String::new(), String::new()), |m| {
                (m.rmse.to_string(), m.cp.to_string(), m.al.to_string())
            });
        vec![
            r.scenario.to_string(),
            r.prior.short_name().to_string(),
            r.replication.to_string(),
            rmse,
            cp,
            al,
            r.error.clone().unwrap_or_default(),
        ]
    });
    write_rows(
        path.as_ref(),
        &[
            "scenario",
            "prior",
            "replication",
            "rmse",
            "cp",
            "al",
            "error",
        ],
        body,
    )
}

/// Probe rows with the normal-prior contrast gap alongside.
pub fn write_probe_csv(path: impl AsRef<Path>, rows: &[ProbeRow], contrast: &[f64]) -> Result<()> {
    let body = rows.iter().zip(contrast).map(|(r, c)| {
        vec![
            r.z_star.to_string(),
            r.posterior_mean.to_string(),
            r.gap.to_string(),
            r.stderr.to_string(),
            c.to_string(),
        ]
    });
    write_rows(
        path.as_ref(),
        &["z_star", "posterior_mean", "gap", "stderr", "normal_gap"],
        body,
    )
}

pub fn write_density_csv(path: impl AsRef<Path>, table: &[[f64; 4]]) -> Result<()> {
    let body = table
        .iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect());
    write_rows(path.as_ref(), &["eta", "hh", "hl", "hn"], body)
}
