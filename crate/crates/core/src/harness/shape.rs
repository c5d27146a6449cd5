use serde_json::json;

use super::growth::{mch_table, mch_trials};
use super::{mean_se, region_names, Assertion, ExperimentConfig, HarnessError, RunOutput};

/// Window for pairwise ratios of mean largest-hole sizes.
pub(crate) const RATIO_WINDOW: (f64, f64) = (1.0 / 3.0, 3.0);
pub(crate) const MAX_PAIR_Z: f64 = 4.0;
pub(crate) const MONOTONE_SIGMAS: f64 = 2.0;

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let trials = mch_trials(cfg)?;
    let table = mch_table(cfg, &trials);
    let names = region_names(&cfg.regions);
    let k = names.len();

    // stats[region][n index] = (mean, se)
    let stats: Vec<Vec<(f64, f64)>> = (0..k)
        .map(|ri| {
            cfg.n_values
                .iter()
                .map(|&n| {
                    let xs: Vec<f64> = trials
                        .iter()
                        .filter(|t| t.region == ri && t.n == n)
                        .map(|t| t.mch as f64)
                        .collect();
                    mean_se(&xs)
                })
                .collect()
        })
        .collect();

    let mut assertions = Vec::new();
    let mut pairs = Vec::new();
    for (ni, &n) in cfg.n_values.iter().enumerate() {
        for a in 0..k {
            for b in a + 1..k {
                let (ma, sa) = stats[a][ni];
                let (mb, sb) = stats[b][ni];
                let ratio = ma / mb;
                let ratio_se = ratio * ((sa / ma).powi(2) + (sb / mb).powi(2)).sqrt();
                let sd = (sa * sa + sb * sb).sqrt();
                let z = if sd > 0.0 { (ma - mb) / sd } else { 0.0 };
                pairs.push(json!({
                    "n": n, "a": names[a], "b": names[b],
                    "ratio": ratio, "ratio_std_error": ratio_se, "z": z,
                }));
                assertions.push(Assertion::new(
                    format!("n={n}: {}/{} mean ratio in [1/3, 3]", names[a], names[b]),
                    (RATIO_WINDOW.0..=RATIO_WINDOW.1).contains(&ratio),
                    format!("ratio {ratio:.4} ± {ratio_se:.4}"),
                ));
                assertions.push(Assertion::new(
                    format!(
                        "n={n}: {} vs {} within {MAX_PAIR_Z} sigma",
                        names[a], names[b]
                    ),
                    z.abs() <= MAX_PAIR_Z,
                    format!("z = {z:.3}"),
                ));
            }
        }
    }
    let mut per_region = Vec::new();
    for (ri, name) in names.iter().enumerate() {
        let s = &stats[ri];
        let drops: Vec<usize> = (1..s.len())
            .filter(|&i| {
                let sd = (s[i].1.powi(2) + s[i - 1].1.powi(2)).sqrt();
                s[i].0 < s[i - 1].0 - MONOTONE_SIGMAS * sd
            })
            .map(|i| cfg.n_values[i])
            .collect();
        if s.len() >= 2 {
            assertions.push(Assertion::new(
                format!("{name}: mean non-decreasing in n within {MONOTONE_SIGMAS} sigma"),
                drops.is_empty(),
                format!("drops at n = {drops:?}"),
            ));
        }
        per_region.push(json!({
            "region": name,
            "n_values": cfg.n_values,
            "mean": s.iter().map(|x| x.0).collect::<Vec<_>>(),
            "std_error": s.iter().map(|x| x.1).collect::<Vec<_>>(),
        }));
    }
    RunOutput::new(
        cfg,
        table,
        json!({ "regions": per_region, "pairs": pairs }),
        assertions,
    )
}
