//! Run configuration: JSON schema, validation, and flag overrides.

use serde::{Deserialize, Serialize};

use propsim_core::datagen::{ScenarioLabel, CALIBRATED_SCHEDULE};
use propsim_core::harness::{CrossConfig, LongConfig};
use propsim_core::parallel::Workers;

use crate::CliError;

/// Top-level config file: `experiment` selects the shape, everything else
/// has defaults. Unknown fields are rejected.
///
/// Deserialization dispatches on a probed `experiment` value and then
/// parses the matching struct straight from the source text, so serde_json
/// keeps real line/column positions in its error messages (an internally
/// tagged enum would buffer the content and lose them).
#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(untagged)]
pub enum RunConfig {
    Cross(CrossRunConfig),
    Long(LongRunConfig),
}

/// The literal `"cross"` tag.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CrossTag {
    Cross,
}

/// The literal `"long"` tag.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum LongTag {
    Long,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CrossRunConfig {
    pub experiment: CrossTag,
    #[serde(default = "default_beta_grid")]
    pub beta_c_grid: Vec<f64>,
    #[serde(default = "default_delta_grid")]
    pub delta_grid: Vec<f64>,
    #[serde(default = "default_cross_n")]
    pub n_per_group: usize,
    #[serde(default = "default_cross_var")]
    pub residual_var: f64,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    /// 0 = automatic.
    #[serde(default)]
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LongRunConfig {
    pub experiment: LongTag,
    #[serde(default = "default_scenarios")]
    pub scenarios: Vec<String>,
    #[serde(default = "default_schedule")]
    pub schedule: Vec<f64>,
    #[serde(default = "default_long_n")]
    pub n_per_group: usize,
    #[serde(default = "default_long_var")]
    pub residual_var: f64,
    #[serde(default = "default_long_tau")]
    pub intercept_var: f64,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub workers: usize,
}

fn default_beta_grid() -> Vec<f64> {
    vec![0.0, -0.5, -1.0, -100.0]
}
fn default_delta_grid() -> Vec<f64> {
    (0..9).map(|k| -0.6 + 0.15 * k as f64).collect()
}
fn default_cross_n() -> usize {
    50
}
fn default_cross_var() -> f64 {
    1.0
}
fn default_scenarios() -> Vec<String> {
    vec!["A".into(), "B".into(), "C".into(), "D".into()]
}
fn default_schedule() -> Vec<f64> {
    CALIBRATED_SCHEDULE.to_vec()
}
fn default_long_n() -> usize {
    200
}
fn default_long_var() -> f64 {
    1.5
}
fn default_long_tau() -> f64 {
    2.0
}
fn default_reps() -> usize {
    10_000
}
fn default_seed() -> u64 {
    42
}

/// Flag overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let err = |e: serde_json::Error| CliError::Config(format!("config: {e}"));
        // probe the experiment kind first; this also surfaces syntax errors
        // with their line/column
        let value: serde_json::Value = serde_json::from_str(text).map_err(err)?;
        match value.get("experiment").and_then(|v| v.as_str()) {
            Some("cross") => serde_json::from_str(text).map(RunConfig::Cross).map_err(err),
            Some("long") => serde_json::from_str(text).map(RunConfig::Long).map_err(err),
            Some(other) => Err(CliError::Config(format!(
                "config: field `experiment` must be \"cross\" or \"long\", got \"{other}\""
            ))),
            None => Err(CliError::Config(
                "config: missing field `experiment` (\"cross\" or \"long\")".into(),
            )),
        }
    }

    pub fn apply(&mut self, ov: &Overrides) {
        let (reps, seed, workers) = match self {
            RunConfig::Cross(c) => (&mut c.reps, &mut c.master_seed, &mut c.workers),
            RunConfig::Long(c) => (&mut c.reps, &mut c.master_seed, &mut c.workers),
        };
        if let Some(r) = ov.reps {
            *reps = r;
        }
        if let Some(s) = ov.seed {
            *seed = s;
        }
        if let Some(w) = ov.workers {
            *workers = w;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        match self {
            RunConfig::Cross(c) => {
                if c.beta_c_grid.is_empty() {
                    return bad("field `beta_c_grid` must not be empty".into());
                }
                if c.delta_grid.is_empty() {
                    return bad("field `delta_grid` must not be empty".into());
                }
                if c.n_per_group < 2 {
                    return bad(format!(
                        "field `n_per_group` must be >= 2, got {}",
                        c.n_per_group
                    ));
                }
                if !(c.residual_var >= 0.0) {
                    return bad(format!(
                        "field `residual_var` must be >= 0, got {}",
                        c.residual_var
                    ));
                }
                if c.reps == 0 {
                    return bad("field `reps` must be >= 1".into());
                }
            }
            RunConfig::Long(c) => {
                if c.scenarios.is_empty() {
                    return bad("field `scenarios` must not be empty".into());
                }
                for s in &c.scenarios {
                    if ScenarioLabel::parse(s).is_err() {
                        return bad(format!(
                            "field `scenarios` has unknown label `{s}` (expected A-D)"
                        ));
                    }
                }
                if c.schedule.len() < 2 || c.schedule.first() != Some(&0.0) {
                    return bad("field `schedule` must start at 0 with >= 2 visits".into());
                }
                if c.schedule.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("field `schedule` must be strictly ascending".into());
                }
                if c.n_per_group < 2 {
                    return bad(format!(
                        "field `n_per_group` must be >= 2, got {}",
                        c.n_per_group
                    ));
                }
                if !(c.residual_var > 0.0) {
                    return bad(format!(
                        "field `residual_var` must be > 0, got {}",
                        c.residual_var
                    ));
                }
                if !(c.intercept_var >= 0.0) {
                    return bad(format!(
                        "field `intercept_var` must be >= 0, got {}",
                        c.intercept_var
                    ));
                }
                if c.reps == 0 {
                    return bad("field `reps` must be >= 1".into());
                }
            }
        }
        Ok(())
    }

    pub fn to_cross(&self) -> Option<CrossConfig> {
        match self {
            RunConfig::Cross(c) => Some(CrossConfig {
                beta_c_grid: c.beta_c_grid.clone(),
                delta_grid: c.delta_grid.clone(),
                n_per_group: c.n_per_group,
                residual_var: c.residual_var,
                reps: c.reps,
                master_seed: c.master_seed,
                workers: Workers::from_count(c.workers),
            }),
            RunConfig::Long(_) => None,
        }
    }

    pub fn to_long(&self) -> Option<LongConfig> {
        match self {
            RunConfig::Long(c) => Some(LongConfig {
                scenarios: c
                    .scenarios
                    .iter()
                    .map(|s| ScenarioLabel::parse(s).expect("validated"))
                    .collect(),
                schedule: c.schedule.clone(),
                n_per_group: c.n_per_group,
                residual_var: c.residual_var,
                intercept_var: c.intercept_var,
                reps: c.reps,
                master_seed: c.master_seed,
                workers: Workers::from_count(c.workers),
            }),
            RunConfig::Cross(_) => None,
        }
    }

    /// Canonical JSON echo of the effective configuration.
    pub fn echo_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
