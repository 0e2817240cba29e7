use bttn_core::channel::{derive_gains, ChannelDraw};
use bttn_core::analytic;
use bttn_core::montecarlo::{self, McConfig};
use bttn_core::{SnrForm, SourceMode, SystemParams};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs()
}

/// Defaults, N = 20, seed 42, 10^6 shared-source trials. Frozen from the
/// first run after the invariant suite passed.
#[test]
fn pinned_default_triple() {
    let cfg = McConfig {
        n_trials: 1_000_000,
        seed: 42,
        ..McConfig::default()
    };
    let r = montecarlo::simulate(&SystemParams::default(), &cfg).unwrap();
    assert_eq!(r.metrics.op.value, 0.0);
    assert!(close(r.metrics.ber.value, 9.283_568_743_883_463e-27, 1e-9), "{:e}", r.metrics.ber.value);
    assert!(close(r.metrics.ac.value, 24.089_390_658_924_966, 1e-12));
    assert!(close(r.metrics.ac.std_error, 1.917_596_362_776_379_2e-3, 1e-9));
    assert!(close(r.snr.mean.value, 3.374_991_590_582_321e7, 1e-12));
}

#[test]
fn direct_link_moments_at_ten_million_trials() {
    let p = SystemParams {
        n_elements: 0,
        p_s_dbm: 0.0,
        noise_dbm: 0.0,
        d_tl: 1.0,
        ..SystemParams::default()
    };
    let cfg = McConfig {
        n_trials: 10_000_000,
        seed: 7,
        ..McConfig::default()
    };
    let m = montecarlo::empirical_snr_moments(&p, &cfg).unwrap();
    assert!((m.mean.value - 1.0).abs() < 3.0 * m.mean.std_error, "{m:?}");
    assert!((m.variance.value - 3.0).abs() < 3.0 * m.variance.std_error, "{m:?}");
}

#[test]
fn ideal_phases_make_both_snr_forms_agree() {
    let p = SystemParams::default();
    let base = McConfig {
        n_trials: 20_000,
        seed: 5,
        ..McConfig::default()
    };
    let exact = montecarlo::simulate(&p, &base).unwrap();
    let ideal = montecarlo::simulate(
        &p,
        &McConfig {
            snr_form: SnrForm::Idealized,
            ..base
        },
    )
    .unwrap();
    assert!(close(ideal.snr.mean.value, exact.snr.mean.value, 1e-12));
    assert!(close(ideal.metrics.ac.value, exact.metrics.ac.value, 1e-12));
}

#[test]
fn source_mode_leaves_mean_unchanged_within_noise() {
    // Independence only changes the correlation between the two terms, so
    // the mean SNR is the same in both modes.
    let p = SystemParams::default().with_transmit_snr_db(25.0);
    let base = McConfig {
        n_trials: 200_000,
        seed: 9,
        ..McConfig::default()
    };
    let shared = montecarlo::empirical_snr_moments(&p, &base).unwrap();
    let indep = montecarlo::empirical_snr_moments(
        &p,
        &McConfig {
            source_mode: SourceMode::Independent,
            ..base
        },
    )
    .unwrap();
    let se = (shared.mean.std_error.powi(2) + indep.mean.std_error.powi(2)).sqrt();
    assert!((shared.mean.value - indep.mean.value).abs() < 4.0 * se);
}

#[test]
fn backscatter_coefficient_scales_model_and_simulation_alike() {
    let full = SystemParams::default().with_transmit_snr_db(20.0);
    let half = SystemParams { lambda_t: 0.5, ..full.clone() };
    let cfg = McConfig {
        n_trials: 5000,
        seed: 3,
        ..McConfig::default()
    };
    let a = montecarlo::simulate(&full, &cfg).unwrap();
    let b = montecarlo::simulate(&half, &cfg).unwrap();
    assert!(close(b.snr.mean.value, 0.25 * a.snr.mean.value, 1e-12));
    let fa = analytic::fit_for(&full).unwrap();
    let fb = analytic::fit_for(&half).unwrap();
    assert!(close(fb.k, fa.k, 1e-14));
    assert!(close(fb.theta, 0.25 * fa.theta, 1e-14));
}

#[test]
fn unit_fading_hook_reproduces_direct_gain() {
    let p = SystemParams {
        n_elements: 0,
        ..SystemParams::default()
    };
    let cfg = McConfig {
        n_trials: 1,
        ..McConfig::default()
    };
    let r = montecarlo::simulate_with(&p, &cfg, |p, _, d| *d = ChannelDraw::unit(p.n_elements)).unwrap();
    let gx = derive_gains(&p).unwrap().gbar_x;
    assert!(close(r.snr.mean.value, gx, 1e-14));
    assert_eq!(r.metrics.op.value, if gx <= p.snr_threshold() { 1.0 } else { 0.0 });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimates_stay_in_range_and_repeat(
        seed in any::<u64>(),
        n_trials in 1u64..6000,
        db in -30.0..60.0f64,
        n in 0usize..40,
    ) {
        let p = SystemParams { n_elements: n, ..SystemParams::default() }.with_transmit_snr_db(db);
        let cfg = McConfig { n_trials, seed, ..McConfig::default() };
        let a = montecarlo::simulate(&p, &cfg).unwrap();
        let b = montecarlo::simulate(&p, &cfg).unwrap();
        prop_assert_eq!(a, b);
        let m = a.metrics;
        prop_assert!((0.0..=1.0).contains(&m.op.value));
        prop_assert!((0.0..=0.5).contains(&m.ber.value));
        prop_assert!(m.ac.value >= 0.0);
        prop_assert!(m.op.std_error >= 0.0 && m.ac.std_error.is_finite());
    }

    #[test]
    fn power_gain_scales_every_trial(seed in any::<u64>(), db in -20.0..40.0f64, n in 0usize..30) {
        let p = SystemParams { n_elements: n, ..SystemParams::default() }.with_transmit_snr_db(db);
        let q = p.with_transmit_snr_db(db + 20.0);
        let cfg = McConfig { n_trials: 2000, seed, ..McConfig::default() };
        let a = montecarlo::simulate(&p, &cfg).unwrap();
        let b = montecarlo::simulate(&q, &cfg).unwrap();
        prop_assert!(close(b.snr.mean.value, 100.0 * a.snr.mean.value, 1e-10));
        prop_assert!(b.metrics.op.value <= a.metrics.op.value);
    }
}
