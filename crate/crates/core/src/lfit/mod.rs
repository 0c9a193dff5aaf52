//! Longitudinal estimators: the linear-slope and proportional mixed models,
//! both with participant random intercepts, an unstructured placebo mean,
//! and group means constrained equal at baseline.
//!
//! The slope model puts the active mean at `mu_j + gamma t_j`; the
//! proportional model puts it at `mu_j (1 - theta)` after baseline.
//! Variance components are estimated by restricted maximum likelihood over
//! `(log sigma^2, logit tau^2/(tau^2+sigma^2))`; Wald inference uses the
//! normal reference (with 400 subjects the df choice is immaterial).

mod delta;
pub mod lmm;
mod prop;

pub use delta::{delta_method_prop, DeltaEstimate, EPS_DENOM};
pub use prop::PropOptions;

use crate::datagen::TrialDataset;
use crate::error::{Error, Result};
use crate::fit::{wald_inference, CiKind, FitNote, FitResult, VarianceComponents};
use lmm::{gls_solve, reml_criterion_linear, reml_fit_linear, LinearMeanModel, LongSuffStats};
use prop::PropModel;

/// Treatment-effect parameterization of the mixed model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectKind {
    /// Additive effect linear in time: active mean `mu_j + gamma t_j`.
    Slope,
    /// Fixed proportional effect: active mean `mu_j (1 - theta)` past
    /// baseline.
    Proportional,
}

/// Mean-model specification shared by both longitudinal fitters.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedModelSpec {
    pub effect_kind: EffectKind,
    pub schedule: Vec<f64>,
    /// Groups share the baseline mean parameter. Always true here; kept
    /// explicit because it is part of the model's identity.
    pub constrain_baseline: bool,
}

impl MixedModelSpec {
    pub fn slope(schedule: &[f64]) -> Self {
        MixedModelSpec {
            effect_kind: EffectKind::Slope,
            schedule: schedule.to_vec(),
            constrain_baseline: true,
        }
    }

    pub fn proportional(schedule: &[f64]) -> Self {
        MixedModelSpec {
            effect_kind: EffectKind::Proportional,
            schedule: schedule.to_vec(),
            constrain_baseline: true,
        }
    }

    /// Placebo means (with shared baseline) plus the effect parameter.
    pub fn fixed_effect_count(&self) -> usize {
        self.schedule.len() + 1
    }

    fn validate_against(&self, stats: &LongSuffStats) -> Result<()> {
        if !self.constrain_baseline {
            return Err(Error::InvalidData(
                "only baseline-constrained models are supported".into(),
            ));
        }
        if self.schedule != stats.schedule {
            return Err(Error::InvalidData(
                "spec schedule does not match the dataset's visit times".into(),
            ));
        }
        Ok(())
    }
}

fn slope_design(schedule: &[f64]) -> LinearMeanModel {
    let m = schedule.len();
    let mut control = Vec::with_capacity(m);
    let mut active = Vec::with_capacity(m);
    for (j, &t) in schedule.iter().enumerate() {
        let mut row = vec![0.0; m + 1];
        row[j] = 1.0;
        control.push(row.clone());
        row[m] = t;
        active.push(row);
    }
    LinearMeanModel { control, active }
}

fn param_names(schedule: &[f64], effect: &str) -> Vec<String> {
    let mut names: Vec<String> = (0..schedule.len()).map(|j| format!("mu_{j}")).collect();
    names.push(effect.to_string());
    names
}

fn finish_linear(
    stats: &LongSuffStats,
    model: &LinearMeanModel,
    schedule: &[f64],
    vc: VarianceComponents,
    iterations: usize,
    mut notes: Vec<FitNote>,
) -> Result<FitResult> {
    let fit = gls_solve(model, stats, vc.intercept_var, vc.residual_var)?;
    let cov = fit.info.cholesky()?.inverse();
    let p = model.p();
    let gamma = fit.beta[p - 1];
    let se = cov.get(p - 1, p - 1).max(0.0).sqrt();
    let names = param_names(schedule, "gamma");
    if se == 0.0 {
        notes.push(FitNote::ZeroResidualVariance);
        let mut out = FitResult::failed(names, iterations, notes);
        out.estimates = fit.beta;
        return Ok(out);
    }
    let (z, p_val, lo, hi) = wald_inference(gamma, se, f64::INFINITY, 0.95);
    let std_errors = (0..p).map(|i| cov.get(i, i).max(0.0).sqrt()).collect();
    Ok(FitResult {
        names,
        estimates: fit.beta,
        std_errors,
        effect_index: p - 1,
        test_stat: z,
        df: f64::INFINITY,
        p_value: p_val,
        ci_low: lo,
        ci_high: hi,
        ci_kind: CiKind::Wald,
        converged: true,
        iterations,
        notes,
        covariance: Some(cov),
        variance: Some(vc),
        schedule: Some(schedule.to_vec()),
    })
}

/// Linear-slope mixed model at fixed variance components (no REML step).
pub fn fit_clda_slope_at(
    data: &TrialDataset,
    spec: &MixedModelSpec,
    vc: VarianceComponents,
) -> Result<FitResult> {
    let stats = LongSuffStats::from_dataset(data)?;
    spec.validate_against(&stats)?;
    let model = slope_design(&spec.schedule);
    finish_linear(&stats, &model, &spec.schedule, vc, 1, Vec::new())
}

/// cLDA slope model fit by REML: placebo means `mu_0..mu_K` shared at
/// baseline, active means `mu_j + gamma t_j`, random intercept plus residual
/// covariance, Wald test of `gamma = 0`.
pub fn fit_clda_slope(data: &TrialDataset, spec: &MixedModelSpec) -> Result<FitResult> {
    if spec.effect_kind != EffectKind::Slope {
        return Err(Error::InvalidData("spec is not a slope model".into()));
    }
    let stats = LongSuffStats::from_dataset(data)?;
    spec.validate_against(&stats)?;
    let model = slope_design(&spec.schedule);
    let (sol, _) = reml_fit_linear(&model, &stats)?;
    let mut notes = Vec::new();
    if sol.boundary {
        notes.push(FitNote::VarianceBoundary);
    }
    let vc = VarianceComponents {
        residual_var: sol.sigma2,
        intercept_var: sol.tau2,
    };
    finish_linear(&stats, &model, &spec.schedule, vc, sol.evals, notes)
}

/// Proportional mixed model at fixed variance components.
pub fn fit_clda_prop_at(
    data: &TrialDataset,
    spec: &MixedModelSpec,
    vc: VarianceComponents,
    opts: &PropOptions,
) -> Result<FitResult> {
    let stats = LongSuffStats::from_dataset(data)?;
    spec.validate_against(&stats)?;
    let model = PropModel {
        stats: &stats,
        opts: *opts,
    };
    finish_prop(&model, &spec.schedule, vc, 0, Vec::new())
}

fn finish_prop(
    model: &PropModel<'_>,
    schedule: &[f64],
    vc: VarianceComponents,
    outer_evals: usize,
    mut notes: Vec<FitNote>,
) -> Result<FitResult> {
    let names = param_names(schedule, "theta");
    let prof = match model.profile(vc.intercept_var, vc.residual_var) {
        Ok(p) => p,
        Err(Error::Domain(_)) => {
            notes.push(FitNote::DivergentEstimate);
            return Ok(FitResult::failed(names, outer_evals, notes));
        }
        Err(Error::RankDeficient(_)) => {
            notes.push(FitNote::SingularSystem);
            return Ok(FitResult::failed(names, outer_evals, notes));
        }
        Err(e) => return Err(e),
    };
    let iterations = outer_evals + prof.evals;
    let info = model.information(&prof.mu, prof.theta, vc.intercept_var, vc.residual_var);
    let cov = match info.cholesky() {
        Ok(ch) => ch.inverse(),
        Err(_) => {
            notes.push(FitNote::SingularSystem);
            return Ok(FitResult::failed(names, iterations, notes));
        }
    };
    let p = model.p();
    let theta = prof.theta;
    let se = cov.get(p - 1, p - 1).max(0.0).sqrt();
    if !se.is_finite() || se == 0.0 {
        notes.push(FitNote::SingularSystem);
        return Ok(FitResult::failed(names, iterations, notes));
    }
    let mut estimates = prof.mu.clone();
    estimates.push(theta);
    let std_errors = (0..p).map(|i| cov.get(i, i).max(0.0).sqrt()).collect();
    let (z, p_val, lo, hi) = wald_inference(theta, se, f64::INFINITY, 0.95);
    Ok(FitResult {
        names,
        estimates,
        std_errors,
        effect_index: p - 1,
        test_stat: z,
        df: f64::INFINITY,
        p_value: p_val,
        ci_low: lo,
        ci_high: hi,
        ci_kind: CiKind::Wald,
        converged: true,
        iterations,
        notes,
        covariance: Some(cov),
        variance: Some(vc),
        schedule: Some(schedule.to_vec()),
    })
}

/// cLDA proportional mixed model fit by REML: placebo means unstructured,
/// active means `mu_j (1 - theta)` past the shared baseline, exact marginal
/// restricted likelihood maximized with the mean profiled out, Wald test of
/// `theta = 0` from the inverse information.
///
/// Non-convergence (a divergent profile or near-singular information, which
/// happens when the placebo means sit near zero) is reported through
/// `converged = false` and counted by the harness, never a crash.
pub fn fit_clda_prop(
    data: &TrialDataset,
    spec: &MixedModelSpec,
    opts: &PropOptions,
) -> Result<FitResult> {
    if spec.effect_kind != EffectKind::Proportional {
        return Err(Error::InvalidData(
            "spec is not a proportional model".into(),
        ));
    }
    let stats = LongSuffStats::from_dataset(data)?;
    spec.validate_against(&stats)?;
    let model = PropModel {
        stats: &stats,
        opts: *opts,
    };
    let sol = match lmm::reml_fit_ratio(&model, &stats) {
        Ok(sol) => sol,
        Err(_) => {
            return Ok(FitResult::failed(
                param_names(&spec.schedule, "theta"),
                0,
                vec![FitNote::DivergentEstimate],
            ));
        }
    };
    let mut notes = Vec::new();
    if sol.boundary {
        notes.push(FitNote::VarianceBoundary);
    }
    let vc = VarianceComponents {
        residual_var: sol.sigma2,
        intercept_var: sol.tau2,
    };
    finish_prop(&model, &spec.schedule, vc, sol.evals, notes)
}

/// -2 restricted log-likelihood of either longitudinal model at the given
/// variance components, with fixed effects profiled out by (iterated) GLS.
pub fn reml_criterion(
    data: &TrialDataset,
    spec: &MixedModelSpec,
    tau2: f64,
    sigma2: f64,
) -> Result<f64> {
    let stats = LongSuffStats::from_dataset(data)?;
    spec.validate_against(&stats)?;
    match spec.effect_kind {
        EffectKind::Slope => {
            let model = slope_design(&spec.schedule);
            reml_criterion_linear(&model, &stats, tau2, sigma2)
        }
        EffectKind::Proportional => {
            let model = PropModel {
                stats: &stats,
                opts: PropOptions::default(),
            };
            model.criterion(tau2, sigma2)
        }
    }
}
