use serde_json::json;

use super::{
    cell_seed, fmt_f64, par_map, timed, Assertion, ExperimentConfig, HarnessError, RunOutput,
    Table, TrialRow,
};
use crate::convex_stats::{lower_bound_failure_prob, p_convex_parallelogram, LowerBoundPlan};
use crate::geometry::{is_convex_position, rational_to_f64};
use crate::holes::{is_hole, largest_hole_dp};
use crate::sampler::{sample_uniform, strip_partition};

pub(crate) const MAX_Z: f64 = 3.0;

struct StripTrial {
    n: usize,
    trial: u64,
    seed: u64,
    plan: LowerBoundPlan,
    convex_groups: usize,
    mch: usize,
    groups_are_holes: bool,
    truncated: bool,
    runtime_ms: Option<f64>,
}

fn plan_for(cfg: &ExperimentConfig, n: usize) -> LowerBoundPlan {
    match cfg.strip_size {
        Some(t) => LowerBoundPlan::with_t(n, t),
        None => LowerBoundPlan::new(n),
    }
}

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let mut tasks = Vec::new();
    let mut skipped = Vec::new();
    for &n in &cfg.n_values {
        let plan = plan_for(cfg, n);
        if plan.t < 3 {
            skipped.push(n);
            continue;
        }
        for trial in 0..cfg.trials {
            tasks.push((n, plan, trial));
        }
    }
    let results = par_map(cfg.worker_count, &tasks, |&(n, plan, trial)| {
        let seed = cell_seed(cfg, 0, n);
        let (res, runtime_ms) = timed(cfg.record_runtime, || -> Result<_, HarnessError> {
            let mut ps = sample_uniform(&cfg.regions[0], n, seed, trial)
                .map_err(|e| HarnessError::Run(e.to_string()))?;
            // Only the first k*t points in sample order take part.
            let used = plan.k * plan.t;
            let truncated = used < n;
            ps.points.truncate(used);
            let strips =
                strip_partition(&ps, plan.t).map_err(|e| HarnessError::Run(e.to_string()))?;
            let convex: Vec<_> = strips
                .iter()
                .filter(|s| is_convex_position(&s.group))
                .collect();
            let groups_are_holes = convex.iter().all(|s| is_hole(&s.group, &ps.points));
            let mch = largest_hole_dp(&ps).map_err(|e| HarnessError::Run(e.to_string()))?;
            Ok((convex.len(), mch.size, groups_are_holes, truncated))
        });
        let (convex_groups, mch, groups_are_holes, truncated) = res?;
        Ok(StripTrial {
            n,
            trial,
            seed: seed.master_seed,
            plan,
            convex_groups,
            mch,
            groups_are_holes,
            truncated,
            runtime_ms,
        })
    })?;

    let mut table = Table::per_trial(&[
        "t",
        "k",
        "convex_groups",
        "any_success",
        "mch_size",
        "p_strip_exact",
        "failure_e_bound",
    ]);
    let mut assertions = Vec::new();
    let mut cells = Vec::new();
    for &n in &cfg.n_values {
        if skipped.contains(&n) {
            let plan = plan_for(cfg, n);
            let mut payload = vec![plan.t.to_string(), plan.k.to_string()];
            payload.resize(7, String::new());
            table.push(
                TrialRow {
                    region: "square".into(),
                    n,
                    trial: 0,
                    seed: cell_seed(cfg, 0, n).master_seed,
                    payload,
                    flags: vec!["t_below_3"],
                    runtime_ms: None,
                }
                .into_record(cfg.experiment),
            );
            continue;
        }
        let rows: Vec<&StripTrial> = results.iter().filter(|r| r.n == n).collect();
        let Some(first) = rows.first() else { continue };
        let plan = first.plan;
        let p = rational_to_f64(
            &p_convex_parallelogram(plan.t)
                .map_err(|e| HarnessError::Run(e.to_string()))?
                .value,
        );
        let bound =
            lower_bound_failure_prob(&plan).map_err(|e| HarnessError::Run(e.to_string()))?;
        for r in &rows {
            let mut flags = Vec::new();
            if r.truncated {
                flags.push("truncated");
            }
            table.push(
                TrialRow {
                    region: "square".into(),
                    n,
                    trial: r.trial,
                    seed: r.seed,
                    payload: vec![
                        plan.t.to_string(),
                        plan.k.to_string(),
                        r.convex_groups.to_string(),
                        (r.convex_groups > 0).to_string(),
                        r.mch.to_string(),
                        fmt_f64(p),
                        fmt_f64(bound.e_bound),
                    ],
                    flags,
                    runtime_ms: r.runtime_ms,
                }
                .into_record(cfg.experiment),
            );
        }

        let groups = (rows.len() * plan.k) as f64;
        let hits: usize = rows.iter().map(|r| r.convex_groups).sum();
        let freq = hits as f64 / groups;
        let se = (p * (1.0 - p) / groups).sqrt();
        let z = (freq - p) / se;
        assertions.push(Assertion::new(
            format!(
                "n={n}: per-strip convex frequency within {MAX_Z} sigma of p(t={})",
                plan.t
            ),
            z.abs() <= MAX_Z,
            format!("observed {freq:.6}, exact {p:.6}, z = {z:.3}"),
        ));

        let trials = rows.len() as f64;
        let any = rows.iter().filter(|r| r.convex_groups > 0).count() as f64 / trials;
        let floor = 1.0 - bound.e_bound;
        let any_se = (floor * (1.0 - floor) / trials).sqrt();
        assertions.push(Assertion::new(
            format!("n={n}: frequency of a convex strip >= 1 - e-bound - 3 sigma"),
            any >= floor - MAX_Z * any_se,
            format!("observed {any:.6}, floor {floor:.3e}"),
        ));

        let uncertified: Vec<u64> = rows
            .iter()
            .filter(|r| r.convex_groups > 0 && (r.mch < plan.t || !r.groups_are_holes))
            .map(|r| r.trial)
            .collect();
        assertions.push(Assertion::new(
            format!("n={n}: every convex strip group is a hole and MCH >= t"),
            uncertified.is_empty(),
            format!("failing trials {uncertified:?}"),
        ));
        cells.push(json!({
            "n": n, "t": plan.t, "k": plan.k,
            "per_strip_frequency": freq, "per_strip_std_error": se, "per_strip_exact": p, "z": z,
            "any_success_frequency": any,
            "failure_bound_exact_form": bound.exact_form, "failure_bound_e": bound.e_bound,
        }));
    }
    RunOutput::new(
        cfg,
        table,
        json!({ "cells": cells, "skipped_n": skipped }),
        assertions,
    )
}
