//! Monte Carlo replication engine.
//!
//! Each replicate owns the counter stream `(master_seed, replicate_index)`
//! and every model in a comparison sees the identical dataset, so method
//! differences are paired. Aggregation runs in replicate order after a
//! deterministic indexed collect: summaries are byte-identical for any
//! worker count.

mod zipper;

pub use zipper::{zipper_select, RankedRecord, ZipperSort};

use serde::{Deserialize, Serialize};

use crate::datagen::{
    simulate_cross, simulate_long, ScenarioLabel, ScenarioSpec, EFFECT_PER_WINDOW,
    SLOPE_WINDOW_MONTHS,
};
use crate::error::Result;
use crate::fit::FitResult;
use crate::lfit::{fit_clda_prop, fit_clda_slope, MixedModelSpec, PropOptions};
use crate::parallel::{map_indexed, Workers};
use crate::rng::RngStream;
use crate::xfit::{fit_prop_nls, fit_ttest, NlsOptions};

/// Two-sided rejection level used throughout.
pub const ALPHA: f64 = 0.05;

/// Which estimator produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TTest,
    PropNls,
    Slope,
    PropMixed,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::TTest => "t_test",
            ModelKind::PropNls => "prop_nls",
            ModelKind::Slope => "slope",
            ModelKind::PropMixed => "prop_mixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "t_test" => Some(ModelKind::TTest),
            "prop_nls" => Some(ModelKind::PropNls),
            "slope" => Some(ModelKind::Slope),
            "prop_mixed" => Some(ModelKind::PropMixed),
            _ => None,
        }
    }
}

/// Whether a longitudinal condition simulates the treatment effect or the
/// null (active trend set equal to control).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    Null,
    Alternative,
}

impl Hypothesis {
    pub fn as_str(self) -> &'static str {
        match self {
            Hypothesis::Null => "null",
            Hypothesis::Alternative => "alternative",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "null" => Some(Hypothesis::Null),
            "alternative" => Some(Hypothesis::Alternative),
            _ => None,
        }
    }
}

/// Per-replicate, per-model extract feeding summaries and zipper plots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub model: ModelKind,
    pub estimate: f64,
    pub se: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub converged: bool,
    pub favors_active: bool,
}

impl ReplicateRecord {
    pub fn from_fit(replicate: usize, model: ModelKind, fit: &FitResult) -> Self {
        ReplicateRecord {
            replicate,
            model,
            estimate: fit.effect(),
            se: fit.effect_se(),
            p_value: fit.p_value,
            ci_low: fit.ci_low,
            ci_high: fit.ci_high,
            converged: fit.converged,
            favors_active: fit.favors_active(),
        }
    }

    /// Two-sided rejection at [`ALPHA`]; non-converged fits never reject.
    pub fn rejects(&self) -> bool {
        self.converged && self.p_value < ALPHA
    }
}

/// One record of the cross-sectional experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRecord {
    pub beta_c: f64,
    pub delta: f64,
    pub rec: ReplicateRecord,
}

/// One record of the longitudinal experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongRecord {
    pub scenario: ScenarioLabel,
    pub hypothesis: Hypothesis,
    pub rec: ReplicateRecord,
}

/// Summary of one (beta_c, delta, model) cell of the cross grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSummaryRow {
    pub beta_c: f64,
    pub delta: f64,
    pub model: ModelKind,
    pub n_replicates: usize,
    /// Two-sided p < 0.05 among all replicates, in percent.
    pub rejection_pct: f64,
    /// Share of rejections with a positive effect estimate, in percent.
    pub favor_active_given_rejection_pct: f64,
    pub convergence_pct: f64,
    /// Mean (estimate - truth) over converged replicates; absent where the
    /// true proportional effect is undefined (beta_c = 0).
    pub mean_bias: Option<f64>,
}

/// Summary of one (scenario, model) pair: power from the alternative runs,
/// Type I error and rejection direction from the null runs on the same
/// replicate streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongSummaryRow {
    pub scenario: ScenarioLabel,
    pub model: ModelKind,
    pub n_replicates: usize,
    pub power_pct: f64,
    pub type1_pct: f64,
    pub favor_active_under_null_pct: f64,
    pub convergence_alt_pct: f64,
    pub convergence_null_pct: f64,
    /// Mean (estimate - truth) under the alternative; absent where the true
    /// proportional effect is undefined (scenario D).
    pub mean_bias_alt: Option<f64>,
    /// Mean estimate under the null (truth 0).
    pub mean_bias_null: Option<f64>,
}

/// Both summary shapes under one roof for serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SummaryTable {
    Cross {
        schema_version: u32,
        rows: Vec<CrossSummaryRow>,
    },
    Long {
        schema_version: u32,
        rows: Vec<LongSummaryRow>,
    },
}

/// Current summary schema version.
pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

/// Configuration of the cross-sectional power/Type-I experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossConfig {
    pub beta_c_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub n_per_group: usize,
    pub residual_var: f64,
    pub reps: usize,
    pub master_seed: u64,
    pub workers: Workers,
}

impl Default for CrossConfig {
    fn default() -> Self {
        CrossConfig {
            beta_c_grid: vec![0.0, -0.5, -1.0, -100.0],
            delta_grid: (0..9).map(|k| -0.6 + 0.15 * k as f64).collect(),
            n_per_group: 50,
            residual_var: 1.0,
            reps: 10_000,
            master_seed: 42,
            workers: Workers::Auto,
        }
    }
}

/// Configuration of the longitudinal scenario experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LongConfig {
    pub scenarios: Vec<ScenarioLabel>,
    pub schedule: Vec<f64>,
    pub n_per_group: usize,
    pub residual_var: f64,
    pub intercept_var: f64,
    pub reps: usize,
    pub master_seed: u64,
    pub workers: Workers,
}

impl Default for LongConfig {
    fn default() -> Self {
        LongConfig {
            scenarios: ScenarioLabel::ALL.to_vec(),
            schedule: crate::datagen::CALIBRATED_SCHEDULE.to_vec(),
            n_per_group: 200,
            residual_var: 1.5,
            intercept_var: 2.0,
            reps: 10_000,
            master_seed: 42,
            workers: Workers::Auto,
        }
    }
}

/// Records plus summary of a cross-sectional run.
#[derive(Debug, Clone)]
pub struct CrossOutput {
    pub records: Vec<CrossRecord>,
    pub summary: Vec<CrossSummaryRow>,
}

/// Records plus summary of a longitudinal run.
#[derive(Debug, Clone)]
pub struct LongOutput {
    pub records: Vec<LongRecord>,
    pub summary: Vec<LongSummaryRow>,
}

/// Run the cross-sectional grid: per replicate, every (beta_c, delta) cell
/// is simulated from a fresh copy of that replicate's stream and both the
/// proportional NLS and the t-test fit the identical dataset.
pub fn run_cross_experiment(cfg: &CrossConfig) -> Result<CrossOutput> {
    assert!(cfg.reps >= 1, "reps must be >= 1");
    let cells: Vec<(f64, f64)> = cfg
        .beta_c_grid
        .iter()
        .flat_map(|&b| cfg.delta_grid.iter().map(move |&d| (b, d)))
        .collect();

    // per replicate: one (prop, ttest) record pair per cell
    let per_rep: Vec<Vec<(ReplicateRecord, ReplicateRecord)>> =
        map_indexed(cfg.reps, cfg.workers, |r| {
            let base = RngStream::new(cfg.master_seed, r as u64);
            cells
                .iter()
                .map(|&(beta_c, delta)| {
                    let mut stream = base;
                    let data = simulate_cross(
                        cfg.n_per_group,
                        beta_c,
                        delta,
                        cfg.residual_var,
                        &mut stream,
                    );
                    let prop = fit_prop_nls(&data, &NlsOptions::default())
                        .expect("valid single-visit data");
                    let tt = fit_ttest(&data).expect("valid two-group data");
                    (
                        ReplicateRecord::from_fit(r, ModelKind::PropNls, &prop),
                        ReplicateRecord::from_fit(r, ModelKind::TTest, &tt),
                    )
                })
                .collect()
        });

    // flatten in (cell, model, replicate) order
    let mut records = Vec::with_capacity(cells.len() * cfg.reps * 2);
    for (ci, &(beta_c, delta)) in cells.iter().enumerate() {
        for model_sel in 0..2 {
            for rep in &per_rep {
                let (ref prop, ref tt) = rep[ci];
                let rec = if model_sel == 0 { *prop } else { *tt };
                records.push(CrossRecord { beta_c, delta, rec });
            }
        }
    }

    let mut summary = Vec::new();
    for &(beta_c, delta) in &cells {
        for model in [ModelKind::PropNls, ModelKind::TTest] {
            let recs: Vec<&ReplicateRecord> = records
                .iter()
                .filter(|cr| cr.beta_c == beta_c && cr.delta == delta && cr.rec.model == model)
                .map(|cr| &cr.rec)
                .collect();
            let truth = match model {
                ModelKind::TTest => Some(delta),
                ModelKind::PropNls => {
                    if beta_c != 0.0 {
                        Some(-delta / beta_c)
                    } else {
                        None
                    }
                }
                _ => unreachable!(),
            };
            summary.push(summarize_cross(beta_c, delta, model, &recs, truth));
        }
    }
    Ok(CrossOutput { records, summary })
}

fn summarize_cross(
    beta_c: f64,
    delta: f64,
    model: ModelKind,
    recs: &[&ReplicateRecord],
    truth: Option<f64>,
) -> CrossSummaryRow {
    let n = recs.len();
    let rejections = recs.iter().filter(|r| r.rejects()).count();
    let favor = recs
        .iter()
        .filter(|r| r.rejects() && r.favors_active)
        .count();
    let converged = recs.iter().filter(|r| r.converged).count();
    let mean_bias = truth.and_then(|t| {
        if converged == 0 {
            return None;
        }
        let sum: f64 = recs
            .iter()
            .filter(|r| r.converged)
            .map(|r| r.estimate - t)
            .sum();
        Some(sum / converged as f64)
    });
    CrossSummaryRow {
        beta_c,
        delta,
        model,
        n_replicates: n,
        rejection_pct: 100.0 * rejections as f64 / n as f64,
        favor_active_given_rejection_pct: if rejections > 0 {
            100.0 * favor as f64 / rejections as f64
        } else {
            0.0
        },
        convergence_pct: 100.0 * converged as f64 / n as f64,
        mean_bias,
    }
}

/// Run the longitudinal experiment: per replicate and scenario, both the
/// alternative and the null (active trend = control) datasets are simulated
/// from copies of the replicate stream, and the slope and proportional
/// mixed models fit each identical dataset.
pub fn run_long_experiment(cfg: &LongConfig) -> Result<LongOutput> {
    assert!(cfg.reps >= 1, "reps must be >= 1");
    let mut specs = Vec::new();
    for &label in &cfg.scenarios {
        let mut spec = ScenarioSpec::with_defaults(label, &cfg.schedule)?;
        spec.n_per_group = cfg.n_per_group;
        spec.residual_var = cfg.residual_var;
        spec.intercept_var = cfg.intercept_var;
        spec.validate()?;
        specs.push((label, spec.clone(), spec.nullified()));
    }
    let slope_spec = MixedModelSpec::slope(&cfg.schedule);
    let prop_spec = MixedModelSpec::proportional(&cfg.schedule);
    let prop_opts = PropOptions::default();

    type RepResult = Vec<(ReplicateRecord, ReplicateRecord)>; // (slope, prop) per condition
    let per_rep: Vec<RepResult> = map_indexed(cfg.reps, cfg.workers, |r| {
        let base = RngStream::new(cfg.master_seed, r as u64);
        let mut out = Vec::with_capacity(specs.len() * 2);
        for (_, alt_spec, null_spec) in &specs {
            for spec in [alt_spec, null_spec] {
                let mut stream = base;
                let data = simulate_long(spec, &mut stream);
                let slope = fit_clda_slope(&data, &slope_spec).expect("balanced data");
                let prop = fit_clda_prop(&data, &prop_spec, &prop_opts).expect("balanced data");
                out.push((
                    ReplicateRecord::from_fit(r, ModelKind::Slope, &slope),
                    ReplicateRecord::from_fit(r, ModelKind::PropMixed, &prop),
                ));
            }
        }
        out
    });

    // flatten in (scenario, hypothesis, model, replicate) order
    let mut records = Vec::with_capacity(specs.len() * cfg.reps * 4);
    for (si, (label, _, _)) in specs.iter().enumerate() {
        for (hi, hypothesis) in [Hypothesis::Alternative, Hypothesis::Null]
            .into_iter()
            .enumerate()
        {
            for model_sel in 0..2 {
                for rep in &per_rep {
                    let (ref slope, ref prop) = rep[si * 2 + hi];
                    let rec = if model_sel == 0 { *slope } else { *prop };
                    records.push(LongRecord {
                        scenario: *label,
                        hypothesis,
                        rec,
                    });
                }
            }
        }
    }

    let mut summary = Vec::new();
    for (label, _, _) in &specs {
        for model in [ModelKind::Slope, ModelKind::PropMixed] {
            summary.push(summarize_long(&records, *label, model));
        }
    }
    Ok(LongOutput { records, summary })
}

fn summarize_long(
    records: &[LongRecord],
    scenario: ScenarioLabel,
    model: ModelKind,
) -> LongSummaryRow {
    let select = |hyp: Hypothesis| -> Vec<&ReplicateRecord> {
        records
            .iter()
            .filter(|lr| lr.scenario == scenario && lr.hypothesis == hyp && lr.rec.model == model)
            .map(|lr| &lr.rec)
            .collect()
    };
    let alt = select(Hypothesis::Alternative);
    let null = select(Hypothesis::Null);
    let n = alt.len();
    let power = alt.iter().filter(|r| r.rejects()).count();
    let type1 = null.iter().filter(|r| r.rejects()).count();
    let favor = null
        .iter()
        .filter(|r| r.rejects() && r.favors_active)
        .count();
    let conv_alt = alt.iter().filter(|r| r.converged).count();
    let conv_null = null.iter().filter(|r| r.converged).count();
    let truth_alt = match model {
        ModelKind::Slope => Some(EFFECT_PER_WINDOW / SLOPE_WINDOW_MONTHS),
        ModelKind::PropMixed => scenario.true_theta(),
        _ => None,
    };
    let mean_over = |recs: &[&ReplicateRecord], truth: f64| -> Option<f64> {
        let conv: Vec<f64> = recs
            .iter()
            .filter(|r| r.converged)
            .map(|r| r.estimate - truth)
            .collect();
        if conv.is_empty() {
            None
        } else {
            Some(conv.iter().sum::<f64>() / conv.len() as f64)
        }
    };
    LongSummaryRow {
        scenario,
        model,
        n_replicates: n,
        power_pct: 100.0 * power as f64 / n as f64,
        type1_pct: 100.0 * type1 as f64 / null.len() as f64,
        favor_active_under_null_pct: if type1 > 0 {
            100.0 * favor as f64 / type1 as f64
        } else {
            0.0
        },
        convergence_alt_pct: 100.0 * conv_alt as f64 / n as f64,
        convergence_null_pct: 100.0 * conv_null as f64 / null.len() as f64,
        mean_bias_alt: truth_alt.and_then(|t| mean_over(&alt, t)),
        mean_bias_null: mean_over(&null, 0.0),
    }
}

/// Monte Carlo standard error of a rejection-rate estimate, in percent.
pub fn rejection_rate_mc_se_pct(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt() * 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cross() -> CrossConfig {
        CrossConfig {
            beta_c_grid: vec![-0.5],
            delta_grid: vec![0.0, 0.3],
            n_per_group: 20,
            residual_var: 1.0,
            reps: 40,
            master_seed: 9,
            workers: Workers::Fixed(1),
        }
    }

    #[test]
    fn cross_output_is_worker_invariant() {
        let mut cfg = tiny_cross();
        let a = run_cross_experiment(&cfg).unwrap();
        cfg.workers = Workers::Fixed(3);
        let b = run_cross_experiment(&cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.summary, b.summary);
        cfg.workers = Workers::Auto;
        let c = run_cross_experiment(&cfg).unwrap();
        assert_eq!(a.records, c.records);
    }

    #[test]
    fn cross_models_see_identical_datasets() {
        let cfg = tiny_cross();
        let out = run_cross_experiment(&cfg).unwrap();
        // recompute one replicate by hand and compare both fits
        let r = 7usize;
        let mut stream = RngStream::new(cfg.master_seed, r as u64);
        let data = simulate_cross(cfg.n_per_group, -0.5, 0.0, 1.0, &mut stream);
        let tt = fit_ttest(&data).unwrap();
        let rec = out
            .records
            .iter()
            .find(|cr| cr.delta == 0.0 && cr.rec.model == ModelKind::TTest && cr.rec.replicate == r)
            .unwrap();
        assert_eq!(rec.rec.estimate, tt.effect());
        let prop = fit_prop_nls(&data, &NlsOptions::default()).unwrap();
        let rec_p = out
            .records
            .iter()
            .find(|cr| {
                cr.delta == 0.0 && cr.rec.model == ModelKind::PropNls && cr.rec.replicate == r
            })
            .unwrap();
        assert_eq!(rec_p.rec.estimate, prop.effect());
    }

    #[test]
    fn long_output_is_worker_invariant() {
        let cfg = LongConfig {
            scenarios: vec![ScenarioLabel::A],
            schedule: vec![0.0, 9.0, 18.0],
            n_per_group: 12,
            residual_var: 1.5,
            intercept_var: 2.0,
            reps: 6,
            master_seed: 4,
            workers: Workers::Fixed(1),
        };
        let a = run_long_experiment(&cfg).unwrap();
        let cfg2 = LongConfig {
            workers: Workers::Fixed(4),
            ..cfg
        };
        let b = run_long_experiment(&cfg2).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.summary, b.summary);
        assert_eq!(a.summary.len(), 2);
        assert_eq!(a.records.len(), 2 * 2 * 6); // 1 scenario
    }

    #[test]
    fn mc_se_formula() {
        let se = rejection_rate_mc_se_pct(0.05, 10_000);
        assert!((se - 0.21794494717703369).abs() < 1e-12);
    }
}
