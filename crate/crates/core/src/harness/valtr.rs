use serde_json::json;

use super::{
    cell_seed, fmt_f64, par_map, region_names, timed, Assertion, ExperimentConfig, HarnessError,
    RunOutput, Table,
};
use crate::convex_stats::{
    check_square_lower_bound, check_triangle_upper_bound, empirical_p_convex,
    p_convex_parallelogram, p_convex_triangle, triangle_bound_threshold, z_score, ExactProbability,
};
use crate::geometry::rational_to_f64;
use crate::sampler::RegionSpec;

/// Largest `r` sampled by Monte Carlo; bigger `r` get exact columns only.
pub(crate) const MAX_MC_R: usize = 12;
pub(crate) const SWEEP_MAX_R: usize = 200;
pub(crate) const SQUARE_SWEEP_MAX_R: usize = 100;
pub(crate) const MAX_Z: f64 = 3.0;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Parallelogram,
    Triangle,
    None,
}

fn family(region: &RegionSpec) -> Family {
    match region {
        RegionSpec::UnitSquare => Family::Parallelogram,
        RegionSpec::Triangle { .. } => Family::Triangle,
        RegionSpec::ConvexPolygon { vertices } if vertices.len() == 3 => Family::Triangle,
        _ => Family::None,
    }
}

fn exact(f: Family, r: usize) -> Option<ExactProbability> {
    match f {
        Family::Parallelogram => p_convex_parallelogram(r).ok(),
        Family::Triangle => p_convex_triangle(r).ok(),
        Family::None => None,
    }
}

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let names = region_names(&cfg.regions);
    let mut tasks = Vec::new();
    for ri in 0..cfg.regions.len() {
        for &r in &cfg.r_values {
            tasks.push((ri, r));
        }
    }
    // Each cell runs its trials sequentially; cells run in parallel.
    let results = par_map(cfg.worker_count, &tasks, |&(ri, r)| {
        let seed = cell_seed(cfg, ri, r);
        if r > MAX_MC_R {
            return Ok((seed.master_seed, None, None));
        }
        let (est, ms) = timed(cfg.record_runtime, || {
            empirical_p_convex(&cfg.regions[ri], r, cfg.trials, seed)
        });
        let est = est.map_err(|e| HarnessError::Run(e.to_string()))?;
        Ok((seed.master_seed, Some(est), ms))
    })?;

    let mut table = Table::new(&[
        "experiment",
        "region",
        "r",
        "trials",
        "seed",
        "exact_value",
        "exact_decimal",
        "log_value",
        "empirical",
        "std_error",
        "z_score",
        "bound",
        "bound_holds",
        "flags",
        "runtime_ms",
    ]);
    let mut assertions = Vec::new();
    let mut rows_json = Vec::new();
    for (&(ri, r), (seed, est, ms)) in tasks.iter().zip(results) {
        let fam = family(&cfg.regions[ri]);
        let ex = exact(fam, r);
        let mut flags = Vec::new();
        let (bound, holds) = match fam {
            Family::Parallelogram => ("r^(-2r) <= p", Some(check_square_lower_bound(r))),
            Family::Triangle => ("p <= r^(-r)", Some(check_triangle_upper_bound(r))),
            Family::None => {
                flags.push("no_closed_form");
                ("", None)
            }
        };
        let z = match (&ex, est) {
            (Some(e), Some((p, se))) => Some(z_score(p, se, rational_to_f64(&e.value))),
            _ => None,
        };
        if est.is_none() {
            flags.push("exact_only");
        }
        if let (Some(z), Some(_)) = (z, &ex) {
            assertions.push(Assertion::new(
                format!("{} r={r}: |z| <= {MAX_Z}", names[ri]),
                z.abs() <= MAX_Z,
                format!("z = {z:.3}"),
            ));
        }
        if fam == Family::Parallelogram {
            assertions.push(Assertion::new(
                format!("{} r={r}: p >= r^(-2r)", names[ri]),
                holds == Some(true),
                "exact comparison",
            ));
        }
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        rows_json.push(json!({
            "region": names[ri], "r": r,
            "exact": ex.as_ref().map(|e| e.value.to_string()),
            "empirical": est.map(|e| e.0), "std_error": est.map(|e| e.1), "z": z,
        }));
        table.push(vec![
            cfg.experiment.to_string(),
            names[ri].clone(),
            r.to_string(),
            if est.is_some() {
                cfg.trials.to_string()
            } else {
                "0".into()
            },
            seed.to_string(),
            ex.as_ref().map(|e| e.value.to_string()).unwrap_or_default(),
            opt(ex.as_ref().map(|e| rational_to_f64(&e.value))),
            opt(ex.as_ref().map(|e| e.log_value)),
            opt(est.map(|e| e.0)),
            opt(est.map(|e| e.1)),
            opt(z),
            bound.to_string(),
            holds.map(|h| h.to_string()).unwrap_or_default(),
            flags.join(";"),
            ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
        ]);
    }

    let square_all = (3..=SQUARE_SWEEP_MAX_R).all(check_square_lower_bound);
    assertions.push(Assertion::new(
        format!("p_square(r) >= r^(-2r) for 3 <= r <= {SQUARE_SWEEP_MAX_R}"),
        square_all,
        "exact sweep",
    ));
    let threshold = triangle_bound_threshold(SWEEP_MAX_R);
    assertions.push(Assertion::new(
        format!("p_triangle(r) <= r^(-r) from the threshold up to {SWEEP_MAX_R}"),
        threshold.is_some(),
        format!("smallest r from which the bound holds: {threshold:?}"),
    ));
    RunOutput::new(
        cfg,
        table,
        json!({
            "rows": rows_json,
            "triangle_bound_threshold": threshold,
            "square_bound_sweep_max_r": SQUARE_SWEEP_MAX_R,
        }),
        assertions,
    )
}
