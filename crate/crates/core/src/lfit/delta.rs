//! Delta-method proportional-effect interval derived from a linear fit.
//!
//! A slope-model fit already carries everything a proportional summary
//! needs: `theta(t) = -gamma t / mu(t)` with the standard error propagated
//! through the gradient `(-t/mu, gamma t / mu^2)` applied to the
//! fixed-effect covariance. The ratio has no finite value where the fitted
//! control mean vanishes, so a denominator inside `EPS_DENOM` is an error
//! rather than a number.

use crate::error::{Error, Result};
use crate::fit::{wald_inference, FitResult};

/// Guard for the exact singularity only; near-zero instability is the
/// phenomenon under study, not an error.
pub const EPS_DENOM: f64 = 1e-8;

/// Proportional-effect summary at one visit time.
#[derive(Debug, Clone, Copy)]
pub struct DeltaEstimate {
    pub theta: f64,
    pub se: f64,
    pub test_stat: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Delta-method proportional effect `theta(t)` from a converged slope fit.
pub fn delta_method_prop(fit: &FitResult, t: f64) -> Result<DeltaEstimate> {
    if !fit.converged {
        return Err(Error::Domain("delta method needs a converged fit".into()));
    }
    let schedule = fit
        .schedule
        .as_ref()
        .ok_or_else(|| Error::Domain("fit carries no visit schedule".into()))?;
    let cov = fit
        .covariance
        .as_ref()
        .ok_or_else(|| Error::Domain("fit carries no covariance".into()))?;
    let gamma_idx = fit
        .names
        .iter()
        .position(|n| n == "gamma")
        .ok_or_else(|| Error::Domain("delta method expects a slope fit".into()))?;
    let visit = schedule
        .iter()
        .position(|&v| (v - t).abs() <= 1e-9)
        .ok_or_else(|| Error::Domain(format!("t = {t} is not a visit time")))?;

    let mu_t = fit.estimates[visit];
    let gamma = fit.estimates[gamma_idx];
    if mu_t.abs() <= EPS_DENOM {
        return Err(Error::UndefinedRatio(mu_t.abs(), t));
    }
    let theta = -gamma * t / mu_t;
    let g_mu = gamma * t / (mu_t * mu_t);
    let g_gamma = -t / mu_t;
    let var = g_mu * g_mu * cov.get(visit, visit)
        + 2.0 * g_mu * g_gamma * cov.get(visit, gamma_idx)
        + g_gamma * g_gamma * cov.get(gamma_idx, gamma_idx);
    let se = var.max(0.0).sqrt();
    if se == 0.0 {
        return Ok(DeltaEstimate {
            theta,
            se,
            test_stat: f64::NAN,
            p_value: f64::NAN,
            ci_low: theta,
            ci_high: theta,
        });
    }
    let (z, p, lo, hi) = wald_inference(theta, se, f64::INFINITY, 0.95);
    Ok(DeltaEstimate {
        theta,
        se,
        test_stat: z,
        p_value: p,
        ci_low: lo,
        ci_high: hi,
    })
}
