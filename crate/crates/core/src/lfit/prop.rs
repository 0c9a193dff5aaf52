//! Proportional mean structure for the mixed model: placebo means are
//! unstructured while active post-baseline means are `mu_j (1 - theta)`,
//! with the baseline mean shared.
//!
//! Because the random intercept enters additively, the marginal likelihood
//! is an exact Gaussian one and, for fixed variance components, the mean
//! parameters profile out: `mu(theta)` is a closed-form GLS solve, leaving a
//! one-dimensional deviance in `theta` that a coarse scan brackets and Brent
//! refines. Profiling is what keeps the fit usable in the
//! weak-identification regimes (placebo trend near zero) where coordinate
//! alternation stalls.

use crate::error::{Error, Result};
use crate::linalg::SpdMatrix;
use crate::optim::brent_min;

use super::lmm::{LongSuffStats, RemlModel};

/// Options for the proportional mixed-model fit.
#[derive(Debug, Clone, Copy)]
pub struct PropOptions {
    /// Extra candidate bracket center for theta. The placebo means need no
    /// start of their own: they are profiled exactly at every theta.
    pub start_theta: Option<f64>,
    /// Evaluation budget for the outer variance search.
    pub max_iter: usize,
    /// Relative tolerance of the inner profile refinement.
    pub tol: f64,
}

impl Default for PropOptions {
    fn default() -> Self {
        PropOptions {
            start_theta: None,
            max_iter: 2000,
            tol: 1e-9,
        }
    }
}

/// Inner profile solution at fixed variance components.
#[derive(Debug, Clone)]
pub(super) struct PropProfile {
    pub theta: f64,
    pub mu: Vec<f64>,
    pub mean_a: Vec<f64>,
    pub evals: usize,
}

pub(super) struct PropModel<'a> {
    pub stats: &'a LongSuffStats,
    pub opts: PropOptions,
}

impl<'a> PropModel<'a> {
    pub fn p(&self) -> usize {
        self.stats.n_visits() + 1
    }

    /// GLS solve for mu at fixed theta (sigma^2 cancels; only alpha enters).
    fn solve_mu(&self, theta: f64, alpha: f64) -> Result<Vec<f64>> {
        let stats = self.stats;
        let m = stats.n_visits();
        let n_c = stats.n_control as f64;
        let n_a = stats.n_active as f64;
        let c = 1.0 - theta;
        // active weight per visit: w_0 = 1 (shared baseline), w_j = c after
        let w = |j: usize| if j == 0 { 1.0 } else { c };
        let mut a = SpdMatrix::zeros(m);
        for i in 0..m {
            for j in i..m {
                let mut v = -alpha * (n_c + n_a * w(i) * w(j));
                if i == j {
                    v += n_c + n_a * w(i) * w(i);
                }
                a.add_sym(i, j, v);
            }
        }
        let s_c = &stats.visit_sums[0];
        let s_a = &stats.visit_sums[1];
        let one_sc: f64 = s_c.iter().sum();
        let one_sa: f64 = s_a.iter().sum();
        let rhs: Vec<f64> = (0..m)
            .map(|j| s_c[j] - alpha * one_sc + w(j) * s_a[j] - alpha * w(j) * one_sa)
            .collect();
        a.cholesky()
            .map_err(|_| Error::RankDeficient("proportional mean system singular".into()))
            .map(|ch| ch.solve(&rhs))
    }

    fn mean_active(&self, mu: &[f64], theta: f64) -> Vec<f64> {
        mu.iter()
            .enumerate()
            .map(|(j, &v)| if j == 0 { v } else { v * (1.0 - theta) })
            .collect()
    }

    /// Profiled GLS deviance contribution at theta (up to the sigma^2 scale).
    fn quad_at(&self, theta: f64, alpha: f64) -> Result<(f64, Vec<f64>)> {
        let mu = self.solve_mu(theta, alpha)?;
        let mean_a = self.mean_active(&mu, theta);
        // same form as LongSuffStats::quad_residual at sigma^2 = 1
        let stats = self.stats;
        let mut q = stats.sum_sq - alpha * stats.subj_tot_sq;
        for (g, mean) in [(0usize, &mu), (1usize, &mean_a)] {
            let n_g = if g == 0 {
                stats.n_control
            } else {
                stats.n_active
            } as f64;
            let s = &stats.visit_sums[g];
            let dot_ms: f64 = mean.iter().zip(s).map(|(m, v)| m * v).sum();
            let one_m: f64 = mean.iter().sum();
            let one_s: f64 = s.iter().sum();
            let mm: f64 = mean.iter().map(|v| v * v).sum();
            q += -2.0 * (dot_ms - alpha * one_m * one_s) + n_g * (mm - alpha * one_m * one_m);
        }
        Ok((q, mu))
    }

    /// Minimize the profiled deviance over theta: coarse arctangent-spaced
    /// scan (widened twice if the minimum sits on the edge), then Brent
    /// refinement of the bracket.
    pub fn profile(&self, tau2: f64, sigma2: f64) -> Result<PropProfile> {
        let alpha = self.stats.alpha(tau2, sigma2);
        let evals = std::cell::Cell::new(0usize);
        let q_of = |th: f64| -> f64 {
            evals.set(evals.get() + 1);
            self.quad_at(th, alpha).map_or(f64::INFINITY, |(q, _)| q)
        };

        const SCAN: usize = 41;
        let mut bracket = None;
        for &u_max in &[1.545_f64, 1.5695, 1.570_785] {
            let mut candidates: Vec<f64> = (0..SCAN)
                .map(|k| (u_max * (2.0 * k as f64 / (SCAN - 1) as f64 - 1.0)).tan())
                .collect();
            if let Some(t0) = self.opts.start_theta {
                candidates.push(t0);
                candidates.sort_by(f64::total_cmp);
            }
            let vals: Vec<f64> = candidates.iter().map(|&t| q_of(t)).collect();
            let mut k_min = 0;
            for (k, v) in vals.iter().enumerate() {
                if *v < vals[k_min] {
                    k_min = k;
                }
            }
            if !vals[k_min].is_finite() {
                return Err(Error::RankDeficient(
                    "proportional profile undefined across the scan".into(),
                ));
            }
            if k_min > 0 && k_min + 1 < candidates.len() {
                bracket = Some((
                    candidates[k_min - 1],
                    candidates[k_min + 1],
                    candidates[k_min],
                    vals[k_min],
                ));
                break;
            }
        }
        let Some((lo, hi, mid, f_mid)) = bracket else {
            return Err(Error::Domain(
                "profiled deviance has no interior minimum".into(),
            ));
        };
        let (theta, _) = brent_min(q_of, lo, hi, mid, f_mid, self.opts.tol.max(1e-12));
        let mu = self.solve_mu(theta, alpha)?;
        let mean_a = self.mean_active(&mu, theta);
        Ok(PropProfile {
            theta,
            mu,
            mean_a,
            evals: evals.get(),
        })
    }

    /// Information for (mu, theta) from the mean Jacobian: `J' V^{-1} J`
    /// summed over subjects.
    pub fn information(&self, mu: &[f64], theta: f64, tau2: f64, sigma2: f64) -> SpdMatrix {
        let stats = self.stats;
        let m = stats.n_visits();
        let alpha = stats.alpha(tau2, sigma2);
        let n_c = stats.n_control as f64;
        let n_a = stats.n_active as f64;
        let c = 1.0 - theta;
        let w = |j: usize| if j == 0 { 1.0 } else { c };
        // d = d mean_A / d theta = (0, -mu_1, ..., -mu_{m-1})
        let d: Vec<f64> = (0..m).map(|j| if j == 0 { 0.0 } else { -mu[j] }).collect();
        let one_d: f64 = d.iter().sum();
        let p = m + 1;
        let mut info = SpdMatrix::zeros(p);
        // mu-mu block
        for i in 0..m {
            for j in i..m {
                let mut v = -alpha * (n_c + n_a * w(i) * w(j));
                if i == j {
                    v += n_c + n_a * w(i) * w(i);
                }
                info.add_sym(i, j, v / sigma2);
            }
        }
        // mu-theta column and theta-theta corner (active group only)
        for i in 0..m {
            let v = n_a * (w(i) * d[i] - alpha * w(i) * one_d);
            info.add_sym(i, m, v / sigma2);
        }
        let dd: f64 = d.iter().map(|v| v * v).sum();
        info.add_sym(m, m, n_a * (dd - alpha * one_d * one_d) / sigma2);
        info
    }

    /// -2 restricted log-likelihood at fixed variances, with the fixed
    /// effects profiled out and the REML adjustment taken from the mean
    /// Jacobian at the profiled solution.
    pub fn criterion(&self, tau2: f64, sigma2: f64) -> Result<f64> {
        if !(sigma2 > 0.0) {
            return Err(Error::Domain("sigma^2 must be > 0".into()));
        }
        if tau2 < 0.0 {
            return Err(Error::Domain("tau^2 must be >= 0".into()));
        }
        let prof = self.profile(tau2, sigma2)?;
        let stats = self.stats;
        let quad = stats.quad_residual(&prof.mu, &prof.mean_a, tau2, sigma2);
        let info = self.information(&prof.mu, prof.theta, tau2, sigma2);
        let log_det_info = info.cholesky()?.log_det();
        let n = stats.n_obs() as f64;
        let p = self.p() as f64;
        Ok((n - p) * super::lmm::LN_2PI + stats.log_det_v(tau2, sigma2) + log_det_info + quad)
    }
}

impl RemlModel for PropModel<'_> {
    fn p(&self) -> usize {
        PropModel::p(self)
    }

    fn unit_pieces(&self, r: f64) -> Result<(f64, f64)> {
        let prof = self.profile(r, 1.0)?;
        let q_unit = self.stats.quad_residual(&prof.mu, &prof.mean_a, r, 1.0);
        let info = self.information(&prof.mu, prof.theta, r, 1.0);
        Ok((q_unit, info.cholesky()?.log_det()))
    }
}
