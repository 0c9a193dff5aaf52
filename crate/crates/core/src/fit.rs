//! Common result type shared by every fitter.

use serde::{Deserialize, Serialize};

use crate::dist::{t_cdf, t_quantile};
use crate::linalg::SpdMatrix;

/// How a confidence interval was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiKind {
    Wald,
    Profile,
}

/// Why a fit did not converge (or a caveat attached to a converged one).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitNote {
    /// J'J or the information matrix lost positive definiteness.
    SingularSystem,
    /// Iteration budget exhausted before meeting the tolerance.
    MaxIterations,
    /// Step halving could not find a descent step.
    StalledLineSearch,
    /// The profiled deviance has no interior minimum; the estimate diverges.
    DivergentEstimate,
    /// REML pushed the intercept variance to the tau^2 = 0 boundary
    /// (reported, not fatal).
    VarianceBoundary,
    /// Residual variance is exactly zero, so standard errors degenerate.
    ZeroResidualVariance,
}

/// Estimated variance components of a mixed-model fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceComponents {
    pub residual_var: f64,
    pub intercept_var: f64,
}

/// One model fit: all parameter estimates plus inference on the treatment
/// effect parameter (delta, theta, or gamma depending on the model).
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Parameter names in design order, e.g. `beta_c`, `theta`, `mu_2`.
    pub names: Vec<String>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Index into `names` of the treatment effect parameter.
    pub effect_index: usize,
    pub test_stat: f64,
    pub df: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_kind: CiKind,
    pub converged: bool,
    pub iterations: usize,
    pub notes: Vec<FitNote>,
    /// Covariance of the fixed effects (same order as `names`), when the
    /// fitter computes it. The delta-method interval needs the full matrix.
    pub covariance: Option<SpdMatrix>,
    /// REML variance components for longitudinal fits.
    pub variance: Option<VarianceComponents>,
    /// Visit schedule for longitudinal fits.
    pub schedule: Option<Vec<f64>>,
}

impl FitResult {
    /// A non-result carrying only the failure notes.
    pub fn failed(names: Vec<String>, iterations: usize, notes: Vec<FitNote>) -> Self {
        let k = names.len();
        FitResult {
            names,
            estimates: vec![f64::NAN; k],
            std_errors: vec![f64::NAN; k],
            effect_index: k.saturating_sub(1),
            test_stat: f64::NAN,
            df: f64::NAN,
            p_value: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
            ci_kind: CiKind::Wald,
            converged: false,
            iterations,
            notes,
            covariance: None,
            variance: None,
            schedule: None,
        }
    }

    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.estimates[i])
    }

    /// Treatment effect estimate.
    pub fn effect(&self) -> f64 {
        self.estimates[self.effect_index]
    }

    /// Standard error of the treatment effect.
    pub fn effect_se(&self) -> f64 {
        self.std_errors[self.effect_index]
    }

    /// Two-sided rejection at the given level (false when p is undefined).
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.converged && self.p_value < alpha
    }

    /// Positive effect estimates mean benefit under this crate's sign
    /// conventions (active declining less than control).
    pub fn favors_active(&self) -> bool {
        self.effect() > 0.0
    }
}

/// Wald machinery shared by the fitters: two-sided p from the t (or normal,
/// `df = INFINITY`) reference and the matching equal-tailed interval.
pub fn wald_inference(estimate: f64, se: f64, df: f64, level: f64) -> (f64, f64, f64, f64) {
    let t = estimate / se;
    let p = 2.0 * (1.0 - t_cdf(t.abs(), df).expect("valid df"));
    let q = t_quantile(0.5 * (1.0 + level), df).expect("valid df");
    (t, p, estimate - q * se, estimate + q * se)
}
