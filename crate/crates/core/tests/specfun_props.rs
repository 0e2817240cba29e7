use bttn_core::specfun::{
    exp_integral_e1, expect_under_gamma, ln_gamma, meijer_g_ac, meijer_g_ber, q_function, QuadSpec,
};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn oracle_spec() -> QuadSpec {
    QuadSpec::new(1e-12, 0.0, 40).unwrap()
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ber_paths_agree(k in log_uniform(0.1, 50.0), theta in log_uniform(0.01, 1e4)) {
        let quad = expect_under_gamma(|g| q_function((2.0 * g).sqrt()), k, theta, &oracle_spec()).unwrap();
        let mg = meijer_g_ber(k, theta).unwrap();
        prop_assert!(rel(mg, quad) < 1e-8, "k={} θ={}: {:e} vs {:e}", k, theta, mg, quad);
    }

    #[test]
    fn ac_paths_agree(k in log_uniform(0.1, 50.0), theta in log_uniform(0.01, 1e4)) {
        let quad = expect_under_gamma(|g| g.ln_1p() / std::f64::consts::LN_2, k, theta, &oracle_spec()).unwrap();
        let mg = meijer_g_ac(k, theta).unwrap();
        prop_assert!(rel(mg, quad) < 1e-8, "k={} θ={}: {:e} vs {:e}", k, theta, mg, quad);
    }

    #[test]
    fn gamma_raw_moments(k in log_uniform(0.1, 50.0), theta in log_uniform(0.01, 1e3)) {
        let spec = QuadSpec::default();
        for m in 1..=3 {
            let got = expect_under_gamma(|g| g.powi(m), k, theta, &spec).unwrap();
            let want = (m as f64 * theta.ln() + ln_gamma(k + m as f64).unwrap() - ln_gamma(k).unwrap()).exp();
            prop_assert!(rel(got, want) < 1e-9, "m={} k={} θ={}", m, k, theta);
        }
    }
}

#[test]
fn k_equal_one_reductions() {
    for theta in [0.01f64, 1.0, 100.0] {
        let ber = 0.5 * (1.0 - (theta / (1.0 + theta)).sqrt());
        assert!(rel(meijer_g_ber(1.0, theta).unwrap(), ber) < 1e-8);
        let ac = std::f64::consts::LOG2_E * (1.0 / theta).exp() * exp_integral_e1(1.0 / theta).unwrap();
        assert!(rel(meijer_g_ac(1.0, theta).unwrap(), ac) < 1e-8);
    }
}

#[test]
fn meijer_forms_are_monotone_in_theta() {
    for k in [0.2f64, 1.0 / 3.0, 1.0, 4.0, 30.0] {
        let mut prev_ber = f64::INFINITY;
        let mut prev_ac = 0.0;
        for i in 0..=40 {
            let theta = 10f64.powf(-2.0 + 6.0 * i as f64 / 40.0);
            let ber = meijer_g_ber(k, theta).unwrap();
            let ac = meijer_g_ac(k, theta).unwrap();
            assert!(ber < prev_ber, "BER not decreasing at k={k} θ={theta}");
            assert!(ac > prev_ac, "AC not increasing at k={k} θ={theta}");
            prev_ber = ber;
            prev_ac = ac;
        }
    }
}
