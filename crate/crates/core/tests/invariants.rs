//! Cross-cutting estimator invariants: label-swap behavior, location-shift
//! sensitivity, Wald duality, and the bias structure of the ratio estimator.

use proptest::prelude::*;

use propsim_core::datagen::{simulate_cross, Group, Obs, TrialDataset};
use propsim_core::harness::{run_cross_experiment, CrossConfig, ModelKind};
use propsim_core::parallel::Workers;
use propsim_core::rng::RngStream;
use propsim_core::xfit::{fit_prop_nls, fit_ttest, NlsOptions};

fn dataset(control: &[f64], active: &[f64]) -> TrialDataset {
    let mut rows = Vec::new();
    for (i, &y) in control.iter().enumerate() {
        rows.push(Obs {
            subject: i as u32,
            group: Group::Control,
            visit_time: 0.0,
            response: y,
        });
    }
    for (i, &y) in active.iter().enumerate() {
        rows.push(Obs {
            subject: (control.len() + i) as u32,
            group: Group::Active,
            visit_time: 0.0,
            response: y,
        });
    }
    TrialDataset { rows }
}

fn group_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 3..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ttest_is_exactly_antisymmetric_under_label_swap(c in group_vec(), a in group_vec()) {
        let d = dataset(&c, &a);
        let f1 = fit_ttest(&d).unwrap();
        let f2 = fit_ttest(&d.with_swapped_groups()).unwrap();
        prop_assert_eq!(f1.effect(), -f2.effect());
        prop_assert_eq!(f1.effect_se(), f2.effect_se());
    }

    #[test]
    fn nls_label_swap_identity(c in group_vec(), a in group_vec()) {
        let d = dataset(&c, &a);
        let f1 = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
        let f2 = fit_prop_nls(&d.with_swapped_groups(), &NlsOptions::default()).unwrap();
        prop_assume!(f1.converged && f2.converged);
        let t1 = f1.estimate("theta").unwrap();
        let t2 = f2.estimate("theta").unwrap();
        // (1 - theta)(1 - theta') = 1: the estimator is not label-symmetric
        prop_assert!(((1.0 - t1) * (1.0 - t2) - 1.0).abs() < 1e-8,
            "theta = {t1}, swapped = {t2}");
    }

    #[test]
    fn wald_duality_p_below_alpha_iff_ci_excludes_zero(c in group_vec(), a in group_vec()) {
        let d = dataset(&c, &a);
        for fit in [fit_ttest(&d).unwrap(), fit_prop_nls(&d, &NlsOptions::default()).unwrap()] {
            if !fit.converged || !fit.p_value.is_finite() {
                continue;
            }
            let excludes = fit.ci_low > 0.0 || fit.ci_high < 0.0;
            prop_assert_eq!(fit.p_value < 0.05, excludes,
                "p = {} ci = [{}, {}]", fit.p_value, fit.ci_low, fit.ci_high);
        }
    }

    #[test]
    fn location_shift_moves_theta_but_not_delta(
        c in group_vec(),
        a in group_vec(),
        shift in prop::sample::select(vec![-3.0, -1.0, 0.5, 2.0]),
    ) {
        let d = dataset(&c, &a);
        let t1 = fit_ttest(&d).unwrap();
        let t2 = fit_ttest(&d.shifted(shift)).unwrap();
        prop_assert!((t1.effect() - t2.effect()).abs() < 1e-10);
        prop_assert!((t1.effect_se() - t2.effect_se()).abs() < 1e-10);
        if t1.p_value.is_finite() {
            prop_assert!((t1.p_value - t2.p_value).abs() < 1e-10);
        }

        let p1 = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
        let p2 = fit_prop_nls(&d.shifted(shift), &NlsOptions::default()).unwrap();
        prop_assume!(p1.converged && p2.converged);
        prop_assume!(t1.effect().abs() > 1e-3); // needs a real group difference
        prop_assert!(
            (p1.estimate("theta").unwrap() - p2.estimate("theta").unwrap()).abs() > 1e-12,
            "theta should move under a location shift"
        );
    }
}

#[test]
fn far_from_zero_proportional_p_matches_ttest_per_replicate() {
    // at control mean -100 the two tests are numerically the same test
    let mut max_gap: f64 = 0.0;
    for rep in 0..500 {
        let mut s = RngStream::new(314159, rep);
        let d = simulate_cross(50, -100.0, 0.3, 1.0, &mut s);
        let tt = fit_ttest(&d).unwrap();
        let pp = fit_prop_nls(&d, &NlsOptions::default()).unwrap();
        assert!(pp.converged);
        max_gap = max_gap.max((tt.p_value - pp.p_value).abs());
    }
    assert!(max_gap < 1e-3, "max per-replicate p gap {max_gap}");
}

#[test]
fn ttest_bias_vanishes_and_theta_bias_is_negative_at_half_unit_control() {
    // Ratio-estimator structure at (beta_c, delta) = (-0.5, 0), n = 50:
    // the t-test's delta_hat is unbiased, while E[theta_hat] sits below 0
    // (second-order term -sigma_m^2/beta_c^2 ~ -0.08), even though the
    // rejected replicates lean heavily positive.
    let cfg = CrossConfig {
        beta_c_grid: vec![-0.5],
        delta_grid: vec![0.0],
        n_per_group: 50,
        residual_var: 1.0,
        reps: 6000,
        master_seed: 1234,
        workers: Workers::Auto,
    };
    let out = run_cross_experiment(&cfg).unwrap();
    let t_row = out
        .summary
        .iter()
        .find(|r| r.model == ModelKind::TTest)
        .unwrap();
    let p_row = out
        .summary
        .iter()
        .find(|r| r.model == ModelKind::PropNls)
        .unwrap();

    // t-test: |mean bias| within 4 Monte Carlo standard errors of zero
    let se_mean = (1.0f64 / 25.0 / 6000.0).sqrt(); // Var(delta_hat) = 2/50
    let bias_t = t_row.mean_bias.unwrap();
    assert!(
        bias_t.abs() < 4.0 * se_mean,
        "t-test bias {bias_t} vs 4 MC SE {}",
        4.0 * se_mean
    );

    let bias_p = p_row.mean_bias.unwrap();
    assert!(
        bias_p < -0.05,
        "theta bias should be clearly negative, got {bias_p}"
    );
    // and the rejections that do happen favor the active group
    assert!(
        p_row.favor_active_given_rejection_pct > 90.0,
        "favor-active {}%",
        p_row.favor_active_given_rejection_pct
    );
}
