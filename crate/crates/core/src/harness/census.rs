use serde_json::json;

use super::{
    cell_seed, describe, par_map, region_names, timed, Assertion, ExperimentConfig, HarnessError,
    RunOutput, Table, TrialRow,
};
use crate::holes::{count_holes_of_size, count_holes_of_size_by_masks};
use crate::sampler::sample_uniform;

struct CensusTrial {
    region: usize,
    n: usize,
    trial: u64,
    seed: u64,
    counts: Vec<(u64, u64)>,
    runtime_ms: Option<f64>,
}

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let names = region_names(&cfg.regions);
    let mut tasks = Vec::new();
    for region in 0..cfg.regions.len() {
        for &n in &cfg.n_values {
            for trial in 0..cfg.trials {
                tasks.push((region, n, trial));
            }
        }
    }
    let results = par_map(cfg.worker_count, &tasks, |&(region, n, trial)| {
        let seed = cell_seed(cfg, region, n);
        let (counts, runtime_ms) = timed(cfg.record_runtime, || -> Result<_, HarnessError> {
            let ps = sample_uniform(&cfg.regions[region], n, seed, trial)
                .map_err(|e| HarnessError::Run(e.to_string()))?;
            cfg.census_sizes
                .iter()
                .map(|&s| {
                    let a = count_holes_of_size(&ps, s)
                        .map_err(|e| HarnessError::Run(e.to_string()))?;
                    let b = count_holes_of_size_by_masks(&ps, s)
                        .map_err(|e| HarnessError::Run(e.to_string()))?;
                    Ok((a, b))
                })
                .collect::<Result<Vec<_>, HarnessError>>()
        });
        Ok(CensusTrial {
            region,
            n,
            trial,
            seed: seed.master_seed,
            counts: counts?,
            runtime_ms,
        })
    })?;

    let mut payload = Vec::new();
    for s in &cfg.census_sizes {
        payload.push(format!("holes_{s}"));
        payload.push(format!("holes_{s}_by_masks"));
    }
    let payload_refs: Vec<&str> = payload.iter().map(String::as_str).collect();
    let mut table = Table::per_trial(&payload_refs);
    let mut disagreements = 0;
    let mut over_bound = 0;
    for t in &results {
        let mut flags = Vec::new();
        let mut cols = Vec::new();
        for &(a, b) in &t.counts {
            cols.push(a.to_string());
            cols.push(b.to_string());
            if a != b {
                disagreements += 1;
                flags.push("enumerators_disagree");
            }
            if a as f64 > (t.n as f64).powi(9) {
                over_bound += 1;
                flags.push("above_n9");
            }
        }
        flags.dedup();
        table.push(
            TrialRow {
                region: names[t.region].clone(),
                n: t.n,
                trial: t.trial,
                seed: t.seed,
                payload: cols,
                flags,
                runtime_ms: t.runtime_ms,
            }
            .into_record(cfg.experiment),
        );
    }

    let mut cells = Vec::new();
    for (ri, name) in names.iter().enumerate() {
        for &n in &cfg.n_values {
            for (si, &s) in cfg.census_sizes.iter().enumerate() {
                let xs: Vec<f64> = results
                    .iter()
                    .filter(|t| t.region == ri && t.n == n)
                    .map(|t| t.counts[si].0 as f64)
                    .collect();
                cells.push(json!({ "region": name, "n": n, "s": s, "count": describe(&xs) }));
            }
        }
    }
    let assertions = vec![
        Assertion::new(
            "both enumerators agree",
            disagreements == 0,
            format!("{disagreements} disagreeing (trial, size) pairs"),
        ),
        Assertion::new(
            "hole counts at most n^9",
            over_bound == 0,
            format!("{over_bound} counts above n^9"),
        ),
    ];
    RunOutput::new(cfg, table, json!({ "cells": cells }), assertions)
}
