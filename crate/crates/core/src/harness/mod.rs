//! Seeded Monte Carlo experiments.
//!
//! Each experiment turns an [`ExperimentConfig`] into a CSV table (one row per
//! trial or per cell) and a JSON summary with means, confidence intervals and
//! named assertions. Trials are the unit of parallelism: every trial derives
//! its own random stream from the master seed and its cell, and results are
//! collected in trial order, so the CSV does not depend on the worker count.
//!
//! Exit codes: [`EXIT_OK`] when every assertion holds, [`EXIT_ASSERTION`] when
//! one fails, [`EXIT_CONFIG`] for invalid configuration or I/O failure.

mod census;
mod config;
mod growth;
mod lower_bound;
mod prop1_fuzz;
mod shape;
mod upper_trace;
mod valtr;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::sampler::{RegionSpec, SeedSpec};

pub use config::{ExperimentConfig, ExperimentKind, Overrides, MAX_DP_N};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("experiment failed: {0}")]
    Run(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Run(_) => EXIT_ASSERTION,
            _ => EXIT_CONFIG,
        }
    }
}

/// A named check over the whole run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Contents of the JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub master_seed: u64,
    pub records: usize,
    pub stats: serde_json::Value,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

/// In-memory result of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub summary: Summary,
}

impl RunOutput {
    fn new(
        cfg: &ExperimentConfig,
        table: Table,
        stats: serde_json::Value,
        assertions: Vec<Assertion>,
    ) -> Result<Self, HarnessError> {
        let passed = assertions.iter().all(|a| a.passed);
        Ok(RunOutput {
            summary: Summary {
                experiment: cfg.experiment.to_string(),
                master_seed: cfg.master_seed,
                records: table.rows.len(),
                stats,
                assertions,
                passed,
            },
            csv: table.to_csv()?,
        })
    }

    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_ASSERTION
        }
    }

    pub fn failed_assertions(&self) -> impl Iterator<Item = &Assertion> {
        self.summary.assertions.iter().filter(|a| !a.passed)
    }
}

/// Runs the configured experiment without touching the filesystem.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Growth => growth::run(cfg),
        ExperimentKind::Shape => shape::run(cfg),
        ExperimentKind::Valtr => valtr::run(cfg),
        ExperimentKind::LowerBound => lower_bound::run(cfg),
        ExperimentKind::Prop1Fuzz => prop1_fuzz::run(cfg),
        ExperimentKind::UpperTrace => upper_trace::run(cfg),
        ExperimentKind::Census => census::run(cfg),
    }
}

/// Sidecar path next to the CSV: `<csv>.summary.json`.
pub fn summary_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path.as_os_str().to_owned();
    name.push(".summary.json");
    PathBuf::from(name)
}

/// Runs the experiment and writes the CSV and its JSON sidecar.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<(RunOutput, PathBuf), HarnessError> {
    let out = run(cfg)?;
    let path = cfg.csv_path();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&path, &out.csv)?;
    let mut json = serde_json::to_string_pretty(&out.summary)?;
    json.push('\n');
    std::fs::write(summary_path(&path), json)?;
    Ok((out, path))
}

/// Rows of one CSV file.
pub(crate) struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub(crate) fn new(columns: &[&str]) -> Self {
        Table {
            header: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Standard per-trial layout: identifiers, payload, flags, runtime.
    pub(crate) fn per_trial(payload: &[&str]) -> Self {
        let mut cols = vec!["experiment", "region", "n", "trial", "seed"];
        cols.extend_from_slice(payload);
        cols.extend_from_slice(&["flags", "runtime_ms"]);
        Table::new(&cols)
    }

    pub(crate) fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| HarnessError::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| HarnessError::Run(e.to_string()))
    }
}

/// Identifying columns plus payload of one per-trial row.
pub(crate) struct TrialRow {
    pub region: String,
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    pub payload: Vec<String>,
    pub flags: Vec<&'static str>,
    pub runtime_ms: Option<f64>,
}

impl TrialRow {
    pub(crate) fn into_record(self, experiment: ExperimentKind) -> Vec<String> {
        let mut r = vec![
            experiment.to_string(),
            self.region,
            self.n.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
        ];
        r.extend(self.payload);
        r.push(self.flags.join(";"));
        r.push(
            self.runtime_ms
                .map(|t| format!("{t:.3}"))
                .unwrap_or_default(),
        );
        r
    }
}

/// Stable display names; repeated labels get an index suffix.
pub(crate) fn region_names(regions: &[RegionSpec]) -> Vec<String> {
    regions
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let label = r.label();
            if regions.iter().filter(|o| o.label() == label).count() > 1 {
                format!("{label}{i}")
            } else {
                label.to_string()
            }
        })
        .collect()
}

/// Seed of one experiment cell; trial `i` of the cell uses stream `i`.
pub(crate) fn cell_seed(cfg: &ExperimentConfig, region: usize, n: usize) -> SeedSpec {
    SeedSpec::new(cfg.master_seed).derive(&[cfg.experiment.tag(), region as u64, n as u64])
}

/// Maps `f` over `items` on a pool of `workers` threads, preserving order.
pub(crate) fn par_map<T, R, F>(workers: usize, items: &[T], f: F) -> Result<Vec<R>, HarnessError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, HarnessError> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Run(e.to_string()))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Wall time of `f` in milliseconds, when requested.
pub(crate) fn timed<R>(record: bool, f: impl FnOnce() -> R) -> (R, Option<f64>) {
    if record {
        let t = Instant::now();
        let r = f();
        (r, Some(t.elapsed().as_secs_f64() * 1e3))
    } else {
        (f(), None)
    }
}

/// `mch * ln ln n / ln n`.
pub fn normalized_ratio(mch: usize, n: usize) -> f64 {
    let ln = (n as f64).ln();
    mch as f64 * ln.ln() / ln
}

/// Shortest decimal that reads back to the same `f64`.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Mean and standard error of the mean.
pub(crate) fn mean_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Mean, standard error and a normal 95% interval, as JSON.
pub(crate) fn describe(xs: &[f64]) -> serde_json::Value {
    let (mean, se) = mean_se(xs);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    serde_json::json!({
        "count": xs.len(),
        "mean": mean,
        "std_error": se,
        "ci95": [mean - 1.96 * se, mean + 1.96 * se],
        "min": min,
        "max": max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf_and_quotes() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn helpers() {
        assert_eq!(
            summary_path(Path::new("out/g.csv")),
            PathBuf::from("out/g.csv.summary.json")
        );
        let (m, se) = mean_se(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(3.0), "3.0");
        let r = normalized_ratio(10, 1024);
        assert!((r - 10.0 * 1024f64.ln().ln() / 1024f64.ln()).abs() < 1e-15);
        let names = region_names(&[
            RegionSpec::UnitSquare,
            RegionSpec::Disk,
            RegionSpec::UnitSquare,
        ]);
        assert_eq!(names, vec!["square0", "disk", "square2"]);
    }
}
