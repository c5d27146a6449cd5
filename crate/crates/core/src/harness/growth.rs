use serde_json::json;

use super::{
    cell_seed, describe, fmt_f64, normalized_ratio, par_map, region_names, timed, Assertion,
    ExperimentConfig, HarnessError, RunOutput, Table, TrialRow,
};
use crate::holes::largest_hole_dp;
use crate::sampler::sample_uniform;

/// Lower end of the n range where the normalized-ratio window is asserted.
pub(crate) const WINDOW_MIN_N: usize = 128;
pub(crate) const WINDOW: (f64, f64) = (0.5, 160.0);

pub(crate) struct MchTrial {
    pub region: usize,
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    pub mch: usize,
    pub collinear: bool,
    pub runtime_ms: Option<f64>,
}

/// Largest hole of every (region, n, trial) cell, in that order.
pub(crate) fn mch_trials(cfg: &ExperimentConfig) -> Result<Vec<MchTrial>, HarnessError> {
    let mut tasks = Vec::new();
    for region in 0..cfg.regions.len() {
        for &n in &cfg.n_values {
            for trial in 0..cfg.trials {
                tasks.push((region, n, trial));
            }
        }
    }
    par_map(cfg.worker_count, &tasks, |&(region, n, trial)| {
        let seed = cell_seed(cfg, region, n);
        let (res, runtime_ms) = timed(cfg.record_runtime, || {
            let ps = sample_uniform(&cfg.regions[region], n, seed, trial)
                .map_err(|e| HarnessError::Run(e.to_string()))?;
            largest_hole_dp(&ps).map_err(|e| HarnessError::Run(e.to_string()))
        });
        let res = res?;
        Ok(MchTrial {
            region,
            n,
            trial,
            seed: seed.master_seed,
            mch: res.size,
            collinear: res.all_collinear,
            runtime_ms,
        })
    })
}

pub(crate) fn mch_table(cfg: &ExperimentConfig, trials: &[MchTrial]) -> Table {
    let names = region_names(&cfg.regions);
    let mut table = Table::per_trial(&["mch_size", "normalized_ratio"]);
    for t in trials {
        let mut flags = Vec::new();
        if t.collinear {
            flags.push("all_collinear");
        }
        table.push(
            TrialRow {
                region: names[t.region].clone(),
                n: t.n,
                trial: t.trial,
                seed: t.seed,
                payload: vec![t.mch.to_string(), fmt_f64(normalized_ratio(t.mch, t.n))],
                flags,
                runtime_ms: t.runtime_ms,
            }
            .into_record(cfg.experiment),
        );
    }
    table
}

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let trials = mch_trials(cfg)?;
    let table = mch_table(cfg, &trials);
    let names = region_names(&cfg.regions);

    let mut groups = Vec::new();
    let mut assertions = Vec::new();
    let small: Vec<&MchTrial> = trials.iter().filter(|t| t.mch < 3).collect();
    assertions.push(Assertion::new(
        "mch_at_least_3",
        small.is_empty(),
        format!("{} trials with a largest hole below 3", small.len()),
    ));

    for (ri, name) in names.iter().enumerate() {
        let mut window_bad = 0;
        let mut window_total = 0;
        let mut means = Vec::new();
        for &n in &cfg.n_values {
            let cell: Vec<&MchTrial> = trials
                .iter()
                .filter(|t| t.region == ri && t.n == n)
                .collect();
            let mch: Vec<f64> = cell.iter().map(|t| t.mch as f64).collect();
            let ratio: Vec<f64> = cell.iter().map(|t| normalized_ratio(t.mch, n)).collect();
            let ratio_stats = describe(&ratio);
            if n >= WINDOW_MIN_N {
                window_total += ratio.len();
                window_bad += ratio
                    .iter()
                    .filter(|r| !(WINDOW.0..=WINDOW.1).contains(*r))
                    .count();
                means.push((n, ratio_stats["mean"].as_f64().unwrap_or(f64::NAN)));
            }
            groups.push(json!({
                "region": name,
                "n": n,
                "mch": describe(&mch),
                "normalized_ratio": ratio_stats,
            }));
        }
        if window_total > 0 {
            assertions.push(Assertion::new(
                format!("{name}: normalized ratio in [1/2, 160] for n >= {WINDOW_MIN_N}"),
                window_bad == 0,
                format!("{window_bad} of {window_total} trials outside the window"),
            ));
        }
        if means.len() >= 2 {
            let lo = means.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
            let hi = means.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max);
            assertions.push(Assertion::new(
                format!("{name}: mean normalized ratio varies by less than 2x"),
                hi / lo < 2.0,
                format!(
                    "max/min = {:.4} over n in {:?}",
                    hi / lo,
                    means.iter().map(|m| m.0).collect::<Vec<_>>()
                ),
            ));
        }
    }
    RunOutput::new(cfg, table, json!({ "groups": groups }), assertions)
}
