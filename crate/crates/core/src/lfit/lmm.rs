//! Compound-symmetry linear mixed model machinery.
//!
//! A random intercept per subject induces the within-subject covariance
//! `V = sigma^2 I + tau^2 11'`, whose inverse is `(I - alpha 11') / sigma^2`
//! with `alpha = tau^2 / (sigma^2 + m tau^2)`. On balanced complete data the
//! whole restricted likelihood reduces to a handful of per-group moments, so
//! one criterion evaluation costs O(p^3) with p = visits + 1 regardless of
//! the number of subjects.
//!
//! REML runs as a one-dimensional bounded search: for a fixed variance ratio
//! `r = tau^2 / sigma^2` the optimal `sigma^2` is closed-form, so the
//! criterion is profiled down to `log r` and minimized by a scan plus Brent
//! refinement. The `tau^2 = 0` boundary is the left edge of the scan.

use std::collections::HashMap;

use crate::datagen::{Group, TrialDataset};
use crate::error::{Error, Result};
use crate::linalg::SpdMatrix;
use crate::optim::brent_min;

pub(super) const LN_2PI: f64 = 1.837_877_066_409_345_6;

/// Per-group sufficient statistics of a balanced complete longitudinal
/// dataset: per-visit response sums, subject-total squares, and the total
/// sum of squares.
#[derive(Debug, Clone)]
pub struct LongSuffStats {
    pub schedule: Vec<f64>,
    pub n_control: usize,
    pub n_active: usize,
    /// Per-visit sums, control then active.
    pub visit_sums: [Vec<f64>; 2],
    /// Sum of squared responses over all rows.
    pub sum_sq: f64,
    /// Sum over subjects of squared subject totals.
    pub subj_tot_sq: f64,
}

impl LongSuffStats {
    /// Reduce a dataset, validating that every subject has exactly one row
    /// per visit and that the design is two-group with >= 2 visits.
    pub fn from_dataset(data: &TrialDataset) -> Result<Self> {
        let schedule = data.schedule();
        let m = schedule.len();
        if m < 2 {
            return Err(Error::InvalidData(
                "longitudinal fit needs at least 2 visits".into(),
            ));
        }
        if m > 32 {
            return Err(Error::InvalidData(
                "more than 32 visits not supported".into(),
            ));
        }
        let visit_index = |t: f64| schedule.iter().position(|&v| v == t).unwrap();

        // slot per (group, subject), assigned in first-encounter order so all
        // accumulation is deterministic in data order
        let mut slots: HashMap<(bool, u32), usize> = HashMap::new();
        let mut totals: Vec<f64> = Vec::new();
        let mut seen: Vec<u32> = Vec::new(); // visit bitmask per slot
        let mut groups: Vec<Group> = Vec::new();
        let mut visit_sums = [vec![0.0; m], vec![0.0; m]];
        let mut sum_sq = 0.0;
        for o in &data.rows {
            let key = (o.group == Group::Active, o.subject);
            let slot = *slots.entry(key).or_insert_with(|| {
                totals.push(0.0);
                seen.push(0);
                groups.push(o.group);
                totals.len() - 1
            });
            let j = visit_index(o.visit_time);
            if seen[slot] & (1 << j) != 0 {
                return Err(Error::InvalidData(format!(
                    "subject {} has a duplicate visit at t = {}",
                    o.subject, o.visit_time
                )));
            }
            seen[slot] |= 1 << j;
            totals[slot] += o.response;
            visit_sums[key.0 as usize][j] += o.response;
            sum_sq += o.response * o.response;
        }
        let full = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
        if seen.iter().any(|&s| s != full) {
            return Err(Error::InvalidData(
                "unbalanced data: every subject needs one row per visit".into(),
            ));
        }
        let n_control = groups.iter().filter(|g| **g == Group::Control).count();
        let n_active = groups.len() - n_control;
        if n_control < 2 || n_active < 2 {
            return Err(Error::InvalidData(
                "longitudinal fit needs at least 2 subjects per group".into(),
            ));
        }
        let subj_tot_sq = totals.iter().map(|t| t * t).sum();
        Ok(LongSuffStats {
            schedule,
            n_control,
            n_active,
            visit_sums,
            sum_sq,
            subj_tot_sq,
        })
    }

    pub fn n_visits(&self) -> usize {
        self.schedule.len()
    }

    pub fn n_subjects(&self) -> usize {
        self.n_control + self.n_active
    }

    pub fn n_obs(&self) -> usize {
        self.n_subjects() * self.n_visits()
    }

    /// `alpha` of the compound-symmetry inverse for these visits.
    pub fn alpha(&self, tau2: f64, sigma2: f64) -> f64 {
        tau2 / (sigma2 + self.n_visits() as f64 * tau2)
    }

    /// Sum over subjects of `(y_i - m_g)' V^{-1} (y_i - m_g)` for per-group
    /// mean vectors.
    pub fn quad_residual(&self, mean_c: &[f64], mean_a: &[f64], tau2: f64, sigma2: f64) -> f64 {
        let alpha = self.alpha(tau2, sigma2);
        let mut q = self.sum_sq - alpha * self.subj_tot_sq;
        for (g, mean) in [(0usize, mean_c), (1usize, mean_a)] {
            let n_g = if g == 0 {
                self.n_control
            } else {
                self.n_active
            } as f64;
            let s = &self.visit_sums[g];
            let dot_ms: f64 = mean.iter().zip(s).map(|(m, v)| m * v).sum();
            let one_m: f64 = mean.iter().sum();
            let one_s: f64 = s.iter().sum();
            let mm: f64 = mean.iter().map(|m| m * m).sum();
            q += -2.0 * (dot_ms - alpha * one_m * one_s) + n_g * (mm - alpha * one_m * one_m);
        }
        q / sigma2
    }

    /// `sum_i log |V_i|` over all subjects.
    pub fn log_det_v(&self, tau2: f64, sigma2: f64) -> f64 {
        let m = self.n_visits() as f64;
        self.n_subjects() as f64 * ((m - 1.0) * sigma2.ln() + (sigma2 + m * tau2).ln())
    }
}

/// Fixed-effect design given as per-group visit-by-parameter rows.
#[derive(Debug, Clone)]
pub struct LinearMeanModel {
    /// m x p rows for a control subject.
    pub control: Vec<Vec<f64>>,
    /// m x p rows for an active subject.
    pub active: Vec<Vec<f64>>,
}

impl LinearMeanModel {
    pub fn p(&self) -> usize {
        self.control.first().map_or(0, Vec::len)
    }

    /// GLS normal equations at (tau2, sigma2): returns `X'V^{-1}X` and
    /// `X'V^{-1}y` reduced over both groups.
    fn normal_equations(
        &self,
        stats: &LongSuffStats,
        tau2: f64,
        sigma2: f64,
    ) -> (SpdMatrix, Vec<f64>) {
        let p = self.p();
        let alpha = stats.alpha(tau2, sigma2);
        let mut a = SpdMatrix::zeros(p);
        let mut rhs = vec![0.0; p];
        for (g, design) in [(0usize, &self.control), (1usize, &self.active)] {
            let n_g = if g == 0 {
                stats.n_control
            } else {
                stats.n_active
            } as f64;
            let s = &stats.visit_sums[g];
            let one_s: f64 = s.iter().sum();
            let mut u = vec![0.0; p];
            for row in design {
                for (uk, x) in u.iter_mut().zip(row) {
                    *uk += x;
                }
            }
            for i in 0..p {
                for j in i..p {
                    let mut g_ij = 0.0;
                    for row in design {
                        g_ij += row[i] * row[j];
                    }
                    a.add_sym(i, j, n_g * (g_ij - alpha * u[i] * u[j]) / sigma2);
                }
            }
            for k in 0..p {
                let mut v_k = 0.0;
                for (row, s_j) in design.iter().zip(s) {
                    v_k += row[k] * s_j;
                }
                rhs[k] += (v_k - alpha * u[k] * one_s) / sigma2;
            }
        }
        (a, rhs)
    }

    /// Fitted per-group mean vectors at coefficients `beta`.
    fn means(&self, beta: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let eval = |design: &Vec<Vec<f64>>| {
            design
                .iter()
                .map(|row| row.iter().zip(beta).map(|(x, b)| x * b).sum())
                .collect()
        };
        (eval(&self.control), eval(&self.active))
    }
}

/// GLS solution plus the pieces the REML criterion needs.
#[derive(Debug, Clone)]
pub struct GlsFit {
    pub beta: Vec<f64>,
    /// `X'V^{-1}X` (the information for the fixed effects).
    pub info: SpdMatrix,
    pub mean_c: Vec<f64>,
    pub mean_a: Vec<f64>,
}

/// Solve the GLS problem for a linear mean model at fixed variances.
pub fn gls_solve(
    model: &LinearMeanModel,
    stats: &LongSuffStats,
    tau2: f64,
    sigma2: f64,
) -> Result<GlsFit> {
    let (a, rhs) = model.normal_equations(stats, tau2, sigma2);
    let ch = a
        .cholesky()
        .map_err(|_| Error::RankDeficient("fixed-effect information is singular".into()))?;
    let beta = ch.solve(&rhs);
    let (mean_c, mean_a) = model.means(&beta);
    Ok(GlsFit {
        beta,
        info: a,
        mean_c,
        mean_a,
    })
}

/// -2 x restricted log-likelihood of a linear mean model, profiled over the
/// fixed effects by GLS.
pub fn reml_criterion_linear(
    model: &LinearMeanModel,
    stats: &LongSuffStats,
    tau2: f64,
    sigma2: f64,
) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::Domain("sigma^2 must be > 0".into()));
    }
    if tau2 < 0.0 {
        return Err(Error::Domain("tau^2 must be >= 0".into()));
    }
    let fit = gls_solve(model, stats, tau2, sigma2)?;
    let quad = stats.quad_residual(&fit.mean_c, &fit.mean_a, tau2, sigma2);
    let p = model.p();
    let n = stats.n_obs() as f64;
    Ok((n - p as f64) * LN_2PI
        + stats.log_det_v(tau2, sigma2)
        + fit.info.cholesky()?.log_det()
        + quad)
}

/// A mean model whose REML criterion can be evaluated at unit residual
/// variance for a given variance ratio `r = tau^2 / sigma^2`: the pieces the
/// profiled search needs.
pub(super) trait RemlModel {
    fn p(&self) -> usize;
    /// At `sigma^2 = 1`, `tau^2 = r`: the profiled residual quadratic and
    /// the log-determinant of the mean-Jacobian information.
    fn unit_pieces(&self, r: f64) -> Result<(f64, f64)>;
}

impl RemlModel for (&LinearMeanModel, &LongSuffStats) {
    fn p(&self) -> usize {
        self.0.p()
    }

    fn unit_pieces(&self, r: f64) -> Result<(f64, f64)> {
        let (model, stats) = (self.0, self.1);
        let fit = gls_solve(model, stats, r, 1.0)?;
        let quad = stats.quad_residual(&fit.mean_c, &fit.mean_a, r, 1.0);
        Ok((quad, fit.info.cholesky()?.log_det()))
    }
}

/// Outcome of the variance-component search.
#[derive(Debug, Clone, Copy)]
pub struct VarianceSearch {
    pub tau2: f64,
    pub sigma2: f64,
    pub criterion: f64,
    pub evals: usize,
    /// tau^2 ended on (numerically at) the zero boundary.
    pub boundary: bool,
}

// log variance ratio search window; the left edge is the tau^2 = 0 boundary
const Z_LO: f64 = -34.0;
const Z_HI: f64 = 34.0;
const SCAN_POINTS: usize = 25;

/// Minimize the REML criterion of `model` over the variance components.
///
/// For fixed `r = tau^2 / sigma^2` the optimal residual variance is the
/// profiled quadratic over its degrees of freedom, so the search is a
/// bounded one-dimensional scan plus Brent refinement over `log r`.
pub(super) fn reml_fit_ratio<M: RemlModel>(
    model: &M,
    stats: &LongSuffStats,
) -> Result<VarianceSearch> {
    let n = stats.n_obs() as f64;
    let p = model.p() as f64;
    let n_subj = stats.n_subjects() as f64;
    let m = stats.n_visits() as f64;
    let evals = std::cell::Cell::new(0usize);

    // profiled criterion at log-ratio z; returns (criterion, sigma2_hat)
    let profiled = |z: f64| -> (f64, f64) {
        evals.set(evals.get() + 1);
        let r = z.exp();
        match model.unit_pieces(r) {
            Ok((q_unit, log_det_unit)) => {
                if !(q_unit > 0.0) || !q_unit.is_finite() || !log_det_unit.is_finite() {
                    return (f64::INFINITY, f64::NAN);
                }
                let sigma2 = q_unit / (n - p);
                let crit = (n - p) * LN_2PI
                    + (n - p) * sigma2.ln()
                    + n_subj * (1.0 + m * r).ln()
                    + log_det_unit
                    + (n - p);
                (crit, sigma2)
            }
            Err(_) => (f64::INFINITY, f64::NAN),
        }
    };

    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| Z_LO + (Z_HI - Z_LO) * k as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&z| profiled(z).0).collect();
    let mut k_min = 0;
    for (k, v) in vals.iter().enumerate() {
        if *v < vals[k_min] {
            k_min = k;
        }
    }
    if !vals[k_min].is_finite() {
        return Err(Error::RankDeficient(
            "REML criterion undefined across the variance grid".into(),
        ));
    }

    let (z_hat, crit) = if k_min == 0 {
        // tau^2 = 0 boundary
        (Z_LO, vals[0])
    } else if k_min == SCAN_POINTS - 1 {
        (Z_HI, vals[SCAN_POINTS - 1])
    } else {
        brent_min(
            |z| profiled(z).0,
            grid[k_min - 1],
            grid[k_min + 1],
            grid[k_min],
            vals[k_min],
            1e-10,
        )
    };
    let (crit_final, sigma2) = profiled(z_hat);
    let crit = crit.min(crit_final);
    let r = z_hat.exp();
    let boundary = z_hat <= Z_LO + 1e-9;
    Ok(VarianceSearch {
        tau2: if boundary { 0.0 } else { r * sigma2 },
        sigma2,
        criterion: crit,
        evals: evals.get(),
        boundary,
    })
}

/// REML fit of a linear mean model: variance components by the profiled
/// ratio search, fixed effects by GLS at the optimum.
pub fn reml_fit_linear(
    model: &LinearMeanModel,
    stats: &LongSuffStats,
) -> Result<(VarianceSearch, GlsFit)> {
    let search = reml_fit_ratio(&(model, stats), stats)?;
    let fit = gls_solve(model, stats, search.tau2, search.sigma2)?;
    Ok((search, fit))
}
