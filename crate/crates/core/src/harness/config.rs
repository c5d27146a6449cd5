use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::holes::{CENSUS_MAX_POINTS, CENSUS_MAX_SIZE};
use crate::sampler::RegionSpec;

/// Upper limit on `n` for experiments that run the largest-hole search.
pub const MAX_DP_N: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Growth,
    Shape,
    Valtr,
    #[serde(alias = "lower-bound")]
    LowerBound,
    #[serde(alias = "prop1-fuzz")]
    Prop1Fuzz,
    #[serde(alias = "upper-trace")]
    UpperTrace,
    Census,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Growth,
        ExperimentKind::Shape,
        ExperimentKind::Valtr,
        ExperimentKind::LowerBound,
        ExperimentKind::Prop1Fuzz,
        ExperimentKind::UpperTrace,
        ExperimentKind::Census,
    ];

    /// Name used on the command line and in output files.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Growth => "growth",
            ExperimentKind::Shape => "shape",
            ExperimentKind::Valtr => "valtr",
            ExperimentKind::LowerBound => "lower-bound",
            ExperimentKind::Prop1Fuzz => "prop1-fuzz",
            ExperimentKind::UpperTrace => "upper-trace",
            ExperimentKind::Census => "census",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        ExperimentKind::ALL
            .iter()
            .position(|k| *k == self)
            .unwrap_or(0) as u64
            + 1
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.replace('_', "-");
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment {s:?}")))
    }
}

/// Experiment configuration, read from JSON. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_regions")]
    pub regions: Vec<RegionSpec>,
    #[serde(default)]
    pub n_values: Vec<usize>,
    pub trials: u64,
    /// Subset sizes for `valtr`.
    #[serde(default)]
    pub r_values: Vec<usize>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default = "default_workers")]
    pub worker_count: usize,
    /// Points per strip for `lower_bound`; derived from `n` when absent.
    #[serde(default)]
    pub strip_size: Option<usize>,
    /// Hole sizes for `census`.
    #[serde(default)]
    pub census_sizes: Vec<usize>,
    /// Lattice parameter for `prop1_fuzz`.
    #[serde(default)]
    pub lattice_n: Option<u64>,
    /// Fills the `runtime_ms` column; output is then no longer reproducible.
    #[serde(default)]
    pub record_runtime: bool,
}

fn default_regions() -> Vec<RegionSpec> {
    vec![RegionSpec::UnitSquare]
}

fn default_workers() -> usize {
    1
}

/// Command-line overrides applied on top of a file or default config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub master_seed: Option<u64>,
    pub trials: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub worker_count: Option<usize>,
    /// `n_values`; for valtr these are the `r_values`, for prop1-fuzz the
    /// single lattice parameter.
    pub n_values: Option<Vec<usize>>,
}

impl ExperimentConfig {
    /// Desk-scale defaults for each experiment.
    pub fn default_for(kind: ExperimentKind) -> Self {
        let mut cfg = ExperimentConfig {
            experiment: kind,
            regions: vec![RegionSpec::UnitSquare],
            n_values: Vec::new(),
            trials: 50,
            r_values: Vec::new(),
            master_seed: 0,
            output_path: None,
            worker_count: 1,
            strip_size: None,
            census_sizes: Vec::new(),
            lattice_n: None,
            record_runtime: false,
        };
        match kind {
            ExperimentKind::Growth => cfg.n_values = vec![128, 256, 512, 1024],
            ExperimentKind::Shape => {
                cfg.regions = vec![
                    RegionSpec::UnitSquare,
                    RegionSpec::Disk,
                    RegionSpec::triangle(),
                ];
                cfg.n_values = vec![512];
                cfg.trials = 200;
            }
            ExperimentKind::Valtr => {
                cfg.regions = vec![RegionSpec::UnitSquare, RegionSpec::triangle()];
                cfg.r_values = (3..=8).collect();
                cfg.trials = 100_000;
            }
            ExperimentKind::LowerBound => {
                cfg.n_values = vec![2000];
                cfg.strip_size = Some(5);
                cfg.trials = 500;
            }
            ExperimentKind::Prop1Fuzz => {
                cfg.trials = 1000;
                cfg.lattice_n = Some(2000);
            }
            ExperimentKind::UpperTrace => {
                cfg.n_values = vec![2048];
                cfg.trials = 200;
            }
            ExperimentKind::Census => {
                cfg.n_values = vec![10, 20, 30];
                cfg.census_sizes = vec![3, 4, 5, 6];
                cfg.trials = 10;
            }
        }
        cfg
    }

    /// Loads `path` (or the defaults for `kind`), applies `overrides` and
    /// validates. A config file for a different experiment is rejected.
    pub fn resolve(
        kind: ExperimentKind,
        path: Option<&Path>,
        overrides: &Overrides,
    ) -> Result<Self, HarnessError> {
        let mut cfg = match path {
            Some(p) => Self::from_path(p)?,
            None => Self::default_for(kind),
        };
        if cfg.experiment != kind {
            return Err(HarnessError::Config(format!(
                "config is for {}, not {kind}",
                cfg.experiment
            )));
        }
        if let Some(seed) = overrides.master_seed {
            cfg.master_seed = seed;
        }
        if let Some(trials) = overrides.trials {
            cfg.trials = trials;
        }
        if let Some(out) = &overrides.output_path {
            cfg.output_path = Some(out.clone());
        }
        if let Some(w) = overrides.worker_count {
            cfg.worker_count = w;
        }
        if let Some(ns) = &overrides.n_values {
            match kind {
                ExperimentKind::Valtr => cfg.r_values = ns.clone(),
                ExperimentKind::Prop1Fuzz => match ns.as_slice() {
                    [n] => cfg.lattice_n = Some(*n as u64),
                    _ => {
                        return Err(HarnessError::Config(
                            "prop1-fuzz takes a single --n value".into(),
                        ))
                    }
                },
                _ => cfg.n_values = ns.clone(),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Output CSV path, defaulting to `<experiment>.csv`.
    pub fn csv_path(&self) -> PathBuf {
        self.output_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.experiment)))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.worker_count == 0 {
            return bad("worker_count must be positive".into());
        }
        if !self.n_values.windows(2).all(|w| w[0] < w[1]) {
            return bad("n_values must be strictly ascending".into());
        }
        for r in &self.regions {
            r.validate()
                .map_err(|e| HarnessError::Config(format!("region {}: {e}", r.label())))?;
        }
        let square_only = |what: &str| -> Result<(), HarnessError> {
            if self.regions.iter().any(|r| *r != RegionSpec::UnitSquare) {
                return bad(format!("{what} runs on the unit square only"));
            }
            Ok(())
        };
        let need_n = || -> Result<(), HarnessError> {
            if self.n_values.is_empty() {
                return bad("n_values must not be empty".into());
            }
            if self.regions.is_empty() {
                return bad("regions must not be empty".into());
            }
            Ok(())
        };
        let max_n = self.n_values.last().copied().unwrap_or(0);
        let min_n = self.n_values.first().copied().unwrap_or(0);
        match self.experiment {
            ExperimentKind::Growth | ExperimentKind::Shape => {
                need_n()?;
                if min_n < 3 || max_n > MAX_DP_N {
                    return bad(format!("n_values must lie in [3, {MAX_DP_N}]"));
                }
                if self.experiment == ExperimentKind::Shape && self.regions.len() < 2 {
                    return bad("shape needs at least two regions".into());
                }
            }
            ExperimentKind::Valtr => {
                if self.r_values.is_empty()
                    || self.r_values.iter().any(|&r| !(3..=200).contains(&r))
                {
                    return bad("r_values must be non-empty and lie in [3, 200]".into());
                }
                if self.regions.is_empty() {
                    return bad("regions must not be empty".into());
                }
            }
            ExperimentKind::LowerBound => {
                need_n()?;
                square_only("lower_bound")?;
                if min_n < 3 || max_n > MAX_DP_N {
                    return bad(format!("n_values must lie in [3, {MAX_DP_N}]"));
                }
                if self.strip_size == Some(0) {
                    return bad("strip_size must be positive".into());
                }
            }
            ExperimentKind::UpperTrace => {
                need_n()?;
                square_only("upper_trace")?;
                if min_n < 3 || max_n > 2048 {
                    return bad("n_values must lie in [3, 2048]".into());
                }
            }
            ExperimentKind::Prop1Fuzz => {
                if self.lattice_n == Some(0) {
                    return bad("lattice_n must be positive".into());
                }
            }
            ExperimentKind::Census => {
                need_n()?;
                if min_n < 3 || max_n > CENSUS_MAX_POINTS {
                    return bad(format!("n_values must lie in [3, {CENSUS_MAX_POINTS}]"));
                }
                if self.census_sizes.is_empty()
                    || self
                        .census_sizes
                        .iter()
                        .any(|&s| !(3..=CENSUS_MAX_SIZE).contains(&s))
                {
                    return bad(format!("census_sizes must lie in [3, {CENSUS_MAX_SIZE}]"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for kind in ExperimentKind::ALL {
            ExperimentConfig::default_for(kind).validate().unwrap();
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
        assert!("lower_bound".parse::<ExperimentKind>().is_ok());
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let parse = |s: &str| ExperimentConfig::from_json(s);
        assert!(parse(r#"{"experiment":"growth","trials":3,"n_values":[16]}"#).is_ok());
        assert!(parse(r#"{"experiment":"growth","trials":3,"n_values":[16],"bogus":1}"#).is_err());
        assert!(parse(r#"{"experiment":"growth","trials":3,"n_values":[32,16]}"#).is_err());
        assert!(parse(r#"{"experiment":"growth","trials":0,"n_values":[16]}"#).is_err());
        assert!(parse(r#"{"experiment":"growth","trials":1,"n_values":[9000]}"#).is_err());
        assert!(parse(r#"{"experiment":"shape","trials":1,"n_values":[16]}"#).is_err());
        assert!(
            parse(r#"{"experiment":"census","trials":1,"n_values":[40],"census_sizes":[3]}"#)
                .is_err()
        );
        assert!(parse(r#"{"experiment":"valtr","trials":1,"r_values":[2]}"#).is_err());
        assert!(parse(
            r#"{"experiment":"lower-bound","trials":1,"n_values":[100],"regions":[{"kind":"disk"}]}"#
        )
        .is_err());
    }
}
