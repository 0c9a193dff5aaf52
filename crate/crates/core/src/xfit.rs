//! Cross-sectional estimators: the pooled two-sample t-test and the
//! proportional-effect model `E(Y|x) = beta_c (1 - theta x)` fit by
//! Gauss-Newton least squares, with Wald and profile-likelihood intervals.
//!
//! Both fitters reduce to group sufficient statistics, so a fit costs O(n)
//! once and O(1) per iteration. The proportional model saturates the two
//! group means at convergence (`beta_c = mean_C`, `theta = 1 - mean_A /
//! mean_C`), which the unit tests pin against closed forms.

use crate::datagen::{Group, TrialDataset};
use crate::dist::t_quantile;
use crate::error::{Error, Result};
use crate::fit::{wald_inference, CiKind, FitNote, FitResult};
use crate::linalg::SpdMatrix;
use crate::optim::bisect_root;

/// Group-level sufficient statistics of a single-visit dataset.
#[derive(Debug, Clone, Copy)]
struct CrossStats {
    n_c: f64,
    n_a: f64,
    sum_c: f64,
    sum_a: f64,
    sumsq_c: f64,
    sumsq_a: f64,
}

impl CrossStats {
    fn from_data(data: &TrialDataset) -> Self {
        let mut s = CrossStats {
            n_c: 0.0,
            n_a: 0.0,
            sum_c: 0.0,
            sum_a: 0.0,
            sumsq_c: 0.0,
            sumsq_a: 0.0,
        };
        for o in &data.rows {
            match o.group {
                Group::Control => {
                    s.n_c += 1.0;
                    s.sum_c += o.response;
                    s.sumsq_c += o.response * o.response;
                }
                Group::Active => {
                    s.n_a += 1.0;
                    s.sum_a += o.response;
                    s.sumsq_a += o.response * o.response;
                }
            }
        }
        s
    }

    fn mean_c(&self) -> f64 {
        self.sum_c / self.n_c
    }

    fn mean_a(&self) -> f64 {
        self.sum_a / self.n_a
    }

    fn n(&self) -> f64 {
        self.n_c + self.n_a
    }

    /// SSE of the proportional model at (beta_c, theta).
    fn sse(&self, b: f64, theta: f64) -> f64 {
        let fit_a = b * (1.0 - theta);
        let sse_c = self.sumsq_c - 2.0 * b * self.sum_c + self.n_c * b * b;
        let sse_a = self.sumsq_a - 2.0 * fit_a * self.sum_a + self.n_a * fit_a * fit_a;
        (sse_c + sse_a).max(0.0)
    }
}

/// Pooled two-sample t-test of the additive group difference.
///
/// `delta = mean_A - mean_C`, pooled variance, df = n_C + n_A - 2.
pub fn fit_ttest(data: &TrialDataset) -> Result<FitResult> {
    let s = CrossStats::from_data(data);
    if s.n_c < 2.0 || s.n_a < 2.0 {
        return Err(Error::InvalidData(
            "t-test needs at least 2 observations per group".into(),
        ));
    }
    let (mc, ma) = (s.mean_c(), s.mean_a());
    let delta = ma - mc;
    let df = s.n() - 2.0;
    let ss_within = (s.sumsq_c - s.n_c * mc * mc).max(0.0) + (s.sumsq_a - s.n_a * ma * ma).max(0.0);
    let s2 = ss_within / df;
    let se = (s2 * (1.0 / s.n_c + 1.0 / s.n_a)).sqrt();

    let names = vec!["beta_c".to_string(), "delta".to_string()];
    let mut notes = Vec::new();
    let (t, p, lo, hi) = if se > 0.0 {
        wald_inference(delta, se, df, 0.95)
    } else {
        notes.push(FitNote::ZeroResidualVariance);
        (f64::NAN, f64::NAN, delta, delta)
    };
    Ok(FitResult {
        names,
        estimates: vec![mc, delta],
        std_errors: vec![(s2 / s.n_c).sqrt(), se],
        effect_index: 1,
        test_stat: t,
        df,
        p_value: p,
        ci_low: lo,
        ci_high: hi,
        ci_kind: CiKind::Wald,
        converged: true,
        iterations: 0,
        notes,
        covariance: None,
        variance: None,
        schedule: None,
    })
}

/// Options for the Gauss-Newton proportional fit.
#[derive(Debug, Clone, Copy)]
pub struct NlsOptions {
    /// Starting values (beta_c, theta); defaults to (mean_C, 0).
    pub start: Option<(f64, f64)>,
    pub max_iter: usize,
    /// Relative SSE-change convergence tolerance.
    pub tol: f64,
}

impl Default for NlsOptions {
    fn default() -> Self {
        NlsOptions {
            start: None,
            max_iter: 50,
            tol: 1e-10,
        }
    }
}

const MAX_HALVINGS: u32 = 50;

/// Nonlinear least squares for `E(Y|x) = beta_c (1 - theta x)`.
///
/// Non-convergence (singular J'J as `beta_c` approaches 0, a stalled line
/// search, or an exhausted iteration budget) is reported through
/// `converged = false`, never a panic or `Err`.
pub fn fit_prop_nls(data: &TrialDataset, opts: &NlsOptions) -> Result<FitResult> {
    let schedule = data.schedule();
    if schedule.len() != 1 {
        return Err(Error::InvalidData(
            "proportional NLS expects a single-visit dataset".into(),
        ));
    }
    let s = CrossStats::from_data(data);
    if s.n_c < 1.0 || s.n_a < 1.0 || s.n() < 3.0 {
        return Err(Error::InvalidData(
            "proportional NLS needs both groups and n >= 3".into(),
        ));
    }
    let names = vec!["beta_c".to_string(), "theta".to_string()];

    let (mut b, mut theta) = opts.start.unwrap_or((s.mean_c(), 0.0));
    let mut sse = s.sse(b, theta);
    let mut iterations = 0usize;
    let mut converged = false;
    let mut notes: Vec<FitNote> = Vec::new();

    while iterations < opts.max_iter {
        iterations += 1;
        // J'J and J'r at the current point, from group sums
        let om = 1.0 - theta;
        let r_c = s.sum_c - s.n_c * b;
        let r_a = s.sum_a - s.n_a * b * om;
        let a11 = s.n_c + s.n_a * om * om;
        let a12 = -b * om * s.n_a;
        let a22 = b * b * s.n_a;
        let g = [r_c + om * r_a, -b * r_a];
        let jtj =
            SpdMatrix::from_rows(2, &[a11, a12, a12, a22]).expect("symmetric by construction");
        let step = match jtj.cholesky() {
            Ok(ch) => ch.solve(&g),
            Err(_) => {
                notes.push(FitNote::SingularSystem);
                return Ok(FitResult::failed(names, iterations, notes));
            }
        };
        // step halving until SSE does not increase
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand = (b + scale * step[0], theta + scale * step[1]);
            let cand_sse = s.sse(cand.0, cand.1);
            if cand_sse <= sse && cand_sse.is_finite() {
                accepted = Some((cand, cand_sse));
                break;
            }
            scale *= 0.5;
        }
        let Some(((nb, nth), new_sse)) = accepted else {
            notes.push(FitNote::StalledLineSearch);
            return Ok(FitResult::failed(names, iterations, notes));
        };
        let drop = sse - new_sse;
        b = nb;
        theta = nth;
        sse = new_sse;
        if drop <= opts.tol * sse.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    if !converged {
        notes.push(FitNote::MaxIterations);
        return Ok(FitResult::failed(names, iterations, notes));
    }

    // Wald inference from s^2 (J'J)^-1 at the solution
    let om = 1.0 - theta;
    let a11 = s.n_c + s.n_a * om * om;
    let a12 = -b * om * s.n_a;
    let a22 = b * b * s.n_a;
    let jtj = SpdMatrix::from_rows(2, &[a11, a12, a12, a22]).expect("symmetric");
    let cov_unit = match jtj.cholesky() {
        Ok(ch) => ch.inverse(),
        Err(_) => {
            notes.push(FitNote::SingularSystem);
            return Ok(FitResult::failed(names, iterations, notes));
        }
    };
    let df = s.n() - 2.0;
    let s2 = sse / df;
    let mut cov = SpdMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            cov.set(i, j, s2 * cov_unit.get(i, j));
        }
    }
    let se_b = cov.get(0, 0).max(0.0).sqrt();
    let se_t = cov.get(1, 1).max(0.0).sqrt();
    let (t, p, lo, hi) = if s2 > 0.0 {
        wald_inference(theta, se_t, df, 0.95)
    } else {
        notes.push(FitNote::ZeroResidualVariance);
        (f64::NAN, f64::NAN, theta, theta)
    };
    Ok(FitResult {
        names,
        estimates: vec![b, theta],
        std_errors: vec![se_b, se_t],
        effect_index: 1,
        test_stat: t,
        df,
        p_value: p,
        ci_low: lo,
        ci_high: hi,
        ci_kind: CiKind::Wald,
        converged: true,
        iterations,
        notes,
        covariance: Some(cov),
        variance: None,
        schedule: None,
    })
}

/// One side of a profile-likelihood interval; `Open` flags an unbounded
/// profile (the signed profile-t never reaches the critical value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileBound {
    Finite(f64),
    Open,
}

impl ProfileBound {
    pub fn finite(self) -> Option<f64> {
        match self {
            ProfileBound::Finite(v) => Some(v),
            ProfileBound::Open => None,
        }
    }
}

/// Profile-likelihood interval for one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileInterval {
    pub low: ProfileBound,
    pub high: ProfileBound,
}

/// Profile-likelihood intervals for `beta_c` and `theta` of a converged
/// proportional fit.
///
/// The endpoint for value `v` of a parameter solves
/// `sqrt((SSE(v) - SSE_min) / s^2) = t_quantile((1 + level)/2, n - 2)`
/// where `SSE(v)` minimizes over the other parameter in closed form. The
/// interval can be asymmetric about the estimate, and a side where the
/// profile never reaches the critical value is reported as `Open`.
pub fn profile_ci_nls(
    data: &TrialDataset,
    fit: &FitResult,
    level: f64,
) -> Result<Vec<(String, ProfileInterval)>> {
    if !fit.converged {
        return Err(Error::Domain(
            "profile interval needs a converged fit".into(),
        ));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::Domain(format!(
            "level must be in (0,1), got {level}"
        )));
    }
    let s = CrossStats::from_data(data);
    let b_hat = fit
        .estimate("beta_c")
        .ok_or_else(|| Error::Domain("profile interval expects a proportional fit".into()))?;
    let theta_hat = fit
        .estimate("theta")
        .ok_or_else(|| Error::Domain("profile interval expects a proportional fit".into()))?;
    let df = s.n() - 2.0;
    let sse_min = s.sse(b_hat, theta_hat);
    let s2 = sse_min / df;
    if s2 <= 0.0 {
        return Err(Error::Domain(
            "profile interval undefined with zero residual variance".into(),
        ));
    }
    let q = t_quantile(0.5 * (1.0 + level), df)?;

    // SSE profiled over the other parameter, in closed form.
    let sse_theta = |v: f64| -> f64 {
        let zz = s.n_c + s.n_a * (1.0 - v) * (1.0 - v);
        let zy = s.sum_c + (1.0 - v) * s.sum_a;
        let total = s.sumsq_c + s.sumsq_a;
        if zz > 0.0 {
            (total - zy * zy / zz).max(0.0)
        } else {
            total
        }
    };
    let sse_beta = |v: f64| -> f64 {
        let sse_c = s.sumsq_c - 2.0 * v * s.sum_c + s.n_c * v * v;
        let sse_a = if v != 0.0 {
            s.sumsq_a - s.sum_a * s.sum_a / s.n_a
        } else {
            s.sumsq_a
        };
        (sse_c + sse_a).max(0.0)
    };

    let interval = |center: f64, scale: f64, profile: &dyn Fn(f64) -> f64| -> ProfileInterval {
        let tau = |v: f64| ((profile(v) - sse_min).max(0.0) / s2).sqrt();
        let side = |dir: f64| -> ProfileBound {
            let mut step = scale.max(1e-12);
            let mut inner = center;
            for _ in 0..70 {
                let v = center + dir * step;
                if tau(v) >= q {
                    let root = bisect_root(|w| tau(w) - q, inner.min(v), inner.max(v), 1e-12);
                    return ProfileBound::Finite(root);
                }
                inner = v;
                step *= 2.0;
            }
            ProfileBound::Open
        };
        ProfileInterval {
            low: side(-1.0),
            high: side(1.0),
        }
    };

    let scale_b = fit.std_errors[0].abs().max(1e-8);
    let scale_t = fit.std_errors[1].abs().max(1e-8);
    Ok(vec![
        ("beta_c".to_string(), interval(b_hat, scale_b, &sse_beta)),
        (
            "theta".to_string(),
            interval(theta_hat, scale_t, &sse_theta),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{simulate_cross, Obs};
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;

    fn toy() -> TrialDataset {
        // control {-2, 0}, active {1, 3}
        let mk = |subject, group, response| Obs {
            subject,
            group,
            visit_time: 0.0,
            response,
        };
        TrialDataset {
            rows: vec![
                mk(0, Group::Control, -2.0),
                mk(1, Group::Control, 0.0),
                mk(2, Group::Active, 1.0),
                mk(3, Group::Active, 3.0),
            ],
        }
    }

    #[test]
    fn ttest_toy_closed_form() {
        let fit = fit_ttest(&toy()).unwrap();
        assert_abs_diff_eq!(fit.effect(), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.effect_se(), 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(fit.test_stat, 3.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(fit.df, 2.0);
        // p = 2 (1 - F(3/sqrt(2), df = 2)) with F(t) = 1/2 + t/(2 sqrt(2 + t^2))
        let t = 3.0 / 2f64.sqrt();
        let oracle = 2.0 * (1.0 - (0.5 + t / (2.0 * (2.0 + t * t).sqrt())));
        assert_abs_diff_eq!(fit.p_value, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.p_value, 0.16794970566215632, epsilon = 1e-10);
    }

    #[test]
    fn ttest_identical_groups_has_unit_p() {
        let mk = |subject, group, response| Obs {
            subject,
            group,
            visit_time: 0.0,
            response,
        };
        let d = TrialDataset {
            rows: vec![
                mk(0, Group::Control, 1.0),
                mk(1, Group::Control, 2.0),
                mk(2, Group::Active, 1.0),
                mk(3, Group::Active, 2.0),
            ],
        };
        let fit = fit_ttest(&d).unwrap();
        assert_eq!(fit.effect(), 0.0);
        assert_eq!(fit.p_value, 1.0);
    }

    #[test]
    fn ttest_needs_two_per_group() {
        let mk = |subject, group, response| Obs {
            subject,
            group,
            visit_time: 0.0,
            response,
        };
        let d = TrialDataset {
            rows: vec![mk(0, Group::Control, 1.0), mk(1, Group::Active, 2.0)],
        };
        assert!(fit_ttest(&d).is_err());
    }

    #[test]
    fn nls_toy_closed_form() {
        let fit = fit_prop_nls(&toy(), &NlsOptions::default()).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.estimate("beta_c").unwrap(), -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.estimate("theta").unwrap(), 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.effect_se(), 5f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(fit.test_stat, 3.0 / 5f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(fit.p_value, 0.3117527983883147, epsilon = 1e-8);
    }

    #[test]
    fn nls_equal_means_gives_zero_theta() {
        let mk = |subject, group, response| Obs {
            subject,
            group,
            visit_time: 0.0,
            response,
        };
        let d = TrialDataset {
            rows: vec![
                mk(0, Group::Control, 0.5),
                mk(1, Group::Control, 1.5),
                mk(2, Group::Active, 0.0),
                mk(3, Group::Active, 2.0),
            ],
        };
        let fit = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.estimate("theta").unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn nls_zero_control_mean_flags_singular() {
        let mk = |subject, group, response| Obs {
            subject,
            group,
            visit_time: 0.0,
            response,
        };
        let d = TrialDataset {
            rows: vec![
                mk(0, Group::Control, -1.0),
                mk(1, Group::Control, 1.0),
                mk(2, Group::Active, 1.0),
                mk(3, Group::Active, 3.0),
            ],
        };
        let fit = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
        assert!(!fit.converged);
        assert!(fit.notes.contains(&FitNote::SingularSystem));
    }

    #[test]
    fn nls_rejects_multi_visit_data() {
        let mk = |subject, group, visit_time, response| Obs {
            subject,
            group,
            visit_time,
            response,
        };
        let d = TrialDataset {
            rows: vec![
                mk(0, Group::Control, 0.0, 1.0),
                mk(0, Group::Control, 6.0, 2.0),
                mk(1, Group::Active, 0.0, 1.0),
                mk(1, Group::Active, 6.0, 2.0),
            ],
        };
        assert!(fit_prop_nls(&d, &NlsOptions::default()).is_err());
    }

    #[test]
    fn closed_form_equivalence_on_simulated_data() {
        for rep in 0..200 {
            let mut s = RngStream::new(77, rep);
            let d = simulate_cross(25, -0.8, 0.4, 1.0, &mut s);
            let fit = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
            if !fit.converged {
                continue;
            }
            let yc = d.group_responses(Group::Control);
            let ya = d.group_responses(Group::Active);
            let mc = yc.iter().sum::<f64>() / yc.len() as f64;
            let ma = ya.iter().sum::<f64>() / ya.len() as f64;
            assert!((fit.estimate("beta_c").unwrap() - mc).abs() < 1e-8);
            assert!((fit.estimate("theta").unwrap() - (1.0 - ma / mc)).abs() < 1e-8);
        }
    }

    #[test]
    fn profile_equals_wald_for_linear_model() {
        // Profile the additive (linear) model's delta: quadratic SSE surface,
        // so the profile interval must equal the Wald interval.
        let mut s = RngStream::new(4, 9);
        let d = simulate_cross(30, 2.0, 0.7, 1.0, &mut s);
        let fit = fit_ttest(&d).unwrap();
        let stats = CrossStats::from_data(&d);
        let sse_delta = |v: f64| -> f64 {
            // control mean free, active mean constrained to mc + v
            // minimizing over the shared intercept m: m = mean of (yc, ya - v)
            let n = stats.n();
            let shifted_sum = stats.sum_c + stats.sum_a - stats.n_a * v;
            let m = shifted_sum / n;
            let sse_c = stats.sumsq_c - 2.0 * m * stats.sum_c + stats.n_c * m * m;
            let fa = m + v;
            let sse_a = stats.sumsq_a - 2.0 * fa * stats.sum_a + stats.n_a * fa * fa;
            sse_c + sse_a
        };
        let df = stats.n() - 2.0;
        let sse_min = sse_delta(fit.effect());
        let s2 = sse_min / df;
        let q = t_quantile(0.975, df).unwrap();
        let tau = |v: f64| ((sse_delta(v) - sse_min).max(0.0) / s2).sqrt();
        // solve tau = q on both sides by bisection
        let lo = bisect_root(|v| tau(v) - q, fit.effect() - 10.0, fit.effect(), 1e-12);
        let hi = bisect_root(|v| tau(v) - q, fit.effect(), fit.effect() + 10.0, 1e-12);
        assert_abs_diff_eq!(lo, fit.ci_low, epsilon = 1e-8);
        assert_abs_diff_eq!(hi, fit.ci_high, epsilon = 1e-8);
    }

    #[test]
    fn profile_toy_matches_grid_oracle_and_is_asymmetric() {
        // At 50% the toy profile crosses the critical value on both sides at
        // the closed-form roots theta = 1 - (-6 +/- sqrt(26)); the interval
        // is strongly asymmetric about theta_hat = 3.
        let d = toy();
        let fit = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
        let iv = profile_ci_nls(&d, &fit, 0.5).unwrap();
        let theta_iv = &iv[1].1;
        let (lo, hi) = (
            theta_iv.low.finite().expect("bounded at 50%"),
            theta_iv.high.finite().expect("bounded at 50%"),
        );
        // dense-grid oracle over theta
        let s = CrossStats::from_data(&d);
        let sse_min = s.sse(-1.0, 3.0);
        let s2 = sse_min / 2.0;
        let q = t_quantile(0.75, 2.0).unwrap();
        let sse_theta = |v: f64| {
            let zz = s.n_c + s.n_a * (1.0 - v) * (1.0 - v);
            let zy = s.sum_c + (1.0 - v) * s.sum_a;
            (s.sumsq_c + s.sumsq_a - zy * zy / zz).max(0.0)
        };
        let inside = |v: f64| ((sse_theta(v) - sse_min).max(0.0) / s2).sqrt() < q;
        let step = 1e-4;
        // endpoints bracket the oracle transition
        assert!(inside(lo + step) && !inside(lo - step), "low endpoint {lo}");
        assert!(
            inside(hi - step) && !inside(hi + step),
            "high endpoint {hi}"
        );
        // closed-form roots
        assert_abs_diff_eq!(lo, 1.0 - (-6.0 + 26f64.sqrt()), epsilon = 1e-6);
        assert_abs_diff_eq!(hi, 1.0 - (-6.0 - 26f64.sqrt()), epsilon = 1e-6);
        // asymmetry about the estimate
        let theta_hat = 3.0;
        assert!(((hi - theta_hat) - (theta_hat - lo)).abs() > 0.05);
    }

    #[test]
    fn profile_unbounded_sides_are_flagged_open() {
        // On the toy data the profiled SSE plateaus at 6 while the 95%
        // critical value needs (SSE - 4)/2 to reach t(0.975, 2)^2 = 18.5:
        // the profile never crosses, so both theta sides are open.
        let d = toy();
        let fit = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
        let iv = profile_ci_nls(&d, &fit, 0.95).unwrap();
        let theta_iv = &iv[1].1;
        assert_eq!(theta_iv.low, ProfileBound::Open);
        assert_eq!(theta_iv.high, ProfileBound::Open);
        // beta_c profiles a quadratic, so its 95% interval stays finite
        let beta_iv = &iv[0].1;
        assert!(beta_iv.low.finite().is_some() && beta_iv.high.finite().is_some());
    }

    #[test]
    fn profile_requires_convergence() {
        let d = toy();
        let mut fit = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
        fit.converged = false;
        assert!(profile_ci_nls(&d, &fit, 0.95).is_err());
    }

    #[test]
    fn wald_significant_profile_covering_zero_exists() {
        // Near-zero control mean: Wald p < 0.05 while the profile interval
        // still covers zero for some replicates.
        let mut found = false;
        for rep in 0..400 {
            let mut s = RngStream::new(2024, rep);
            let d = simulate_cross(50, -0.5, 0.0, 1.0, &mut s);
            let fit = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
            if !fit.converged || !(fit.p_value < 0.05) {
                continue;
            }
            let iv = profile_ci_nls(&d, &fit, 0.95).unwrap();
            let theta_iv = iv[1].1;
            let covers_zero = match (theta_iv.low, theta_iv.high) {
                (ProfileBound::Finite(l), ProfileBound::Finite(h)) => l < 0.0 && 0.0 < h,
                (ProfileBound::Open, ProfileBound::Finite(h)) => 0.0 < h,
                (ProfileBound::Finite(l), ProfileBound::Open) => l < 0.0,
                (ProfileBound::Open, ProfileBound::Open) => true,
            };
            if covers_zero {
                found = true;
                break;
            }
        }
        assert!(
            found,
            "expected a Wald-significant replicate whose profile CI covers 0"
        );
    }
}
