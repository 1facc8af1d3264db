use proptest::prelude::*;

use starcf::channel::temporal_correlation;
use starcf::closed_form::ClosedForm;
use starcf::numerics::{
    bessel_i_ratio, dbm_to_mw, hermitian_sqrt, is_hermitian, is_psd, mw_to_dbm, rel_frobenius, sinc, CMat, RngStream,
    PSD_TOL,
};
use starcf::ris::{build_ris_correlation, PhaseErrorModel};
use starcf::scenario::{PhaseErrorKind, Scenario, SystemConfig, Velocities};
use starcf::system::SystemModel;

fn small_config() -> impl Strategy<Value = SystemConfig> {
    (
        1usize..4,
        1usize..4,
        0usize..3,
        0usize..3,
        1usize..4,
        1usize..3,
        1usize..5,
        1.0f64..6.0,
        0.0f64..std::f64::consts::PI,
        0.0f64..150.0,
        any::<u64>(),
    )
        .prop_filter("at least one user", |t| t.2 + t.3 > 0)
        .prop_map(|(m, n, kr, kt, cols, rows, tau, alpha, kappa, v, seed)| SystemConfig {
            num_aps: m,
            antennas_per_ap: n,
            users_reflect: kr,
            users_transmit: kt,
            ris_cols: cols,
            ris_rows: rows,
            pilot_length: tau,
            amplification: alpha,
            kappa,
            phase_error: PhaseErrorKind::Uniform,
            velocities_kmh: Velocities::All(v),
            block_length: 40,
            seed,
            ..SystemConfig::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sinc_is_even_and_bounded(a in -50.0f64..50.0) {
        prop_assert_eq!(sinc(a), sinc(-a));
        prop_assert!(sinc(a).abs() <= 1.0);
    }

    #[test]
    fn dbm_round_trip(dbm in -150.0f64..60.0) {
        prop_assert!((mw_to_dbm(dbm_to_mw(dbm)) - dbm).abs() < 1e-9);
    }

    #[test]
    fn von_mises_phi_is_a_probability_moment(kappa in 0.0f64..700.0) {
        let phi = bessel_i_ratio(kappa);
        prop_assert!((0.0..1.0).contains(&phi));
        prop_assert!(bessel_i_ratio(kappa + 0.5) >= phi);
    }

    #[test]
    fn uniform_phi_decreases_with_bound(a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let p = |k| PhaseErrorModel::new(PhaseErrorKind::Uniform, k).unwrap().phi();
        prop_assert!(p(lo) >= p(hi));
    }

    #[test]
    fn temporal_correlation_is_bounded(fd in 0.0f64..400.0, lag in 0usize..1000) {
        let rho = temporal_correlation(fd, 1e-5, lag as f64);
        prop_assert!(rho.abs() <= 1.0 + 1e-12);
        prop_assert_eq!(temporal_correlation(fd, 1e-5, 0.0), 1.0);
    }

    #[test]
    fn sqrt_of_gram_matrix(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = RngStream::new(seed, 0);
        let a = rng.complex_gaussian_mat(n, n, 1.0);
        let m: CMat = &a * a.adjoint();
        let s = hermitian_sqrt(&m).unwrap();
        prop_assert!(is_hermitian(&s, 1e-9));
        prop_assert!(rel_frobenius(&(&s * &s), &m) < 1e-8);
    }

    #[test]
    fn ris_correlation_is_psd(cols in 1usize..6, rows in 1usize..6, dh in 0.05f64..1.0, dv in 0.05f64..1.0) {
        let wl = 3e8 / 1.9e9;
        let r = build_ris_correlation(cols, rows, dh * wl, dv * wl, wl);
        prop_assert!(is_hermitian(&r, 1e-12));
        prop_assert!(is_psd(&r, PSD_TOL));
        for i in 0..cols * rows {
            prop_assert!((r[(i, i)].re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn config_json_round_trip(cfg in small_config()) {
        let back = SystemConfig::from_json_str(&cfg.to_json()).unwrap();
        prop_assert_eq!(back.hash_hex(), cfg.hash_hex());
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_systems_respect_every_invariant(cfg in small_config()) {
        let model = SystemModel::new(Scenario::from_seed(&cfg).unwrap()).unwrap();
        let (m_count, k_count) = (model.num_aps(), model.num_users());
        for m in 0..m_count {
            for k in 0..k_count {
                let d = model.stats.delta(m, k);
                prop_assert!(is_hermitian(d, 1e-9) && is_psd(d, PSD_TOL));
                prop_assert!(is_psd(model.est.q(m, k), PSD_TOL));
                prop_assert!(is_psd(&(d - model.est.q(m, k)), 1e-7));
            }
            let p = model.power_control.expected_transmit_power(&model.est, model.powers.downlink, m, k_count);
            prop_assert!((p / model.powers.downlink - 1.0).abs() < 1e-12);
        }
        let cf = ClosedForm::new(&model);
        for k in 0..k_count {
            for n in [model.estimation_instant(), 25, 40] {
                let b = cf.sinr(k, n).unwrap();
                prop_assert!(b.ui_total - b.ds + b.dn + b.ns > 0.0);
                prop_assert!(b.sinr >= 0.0);
            }
            prop_assert!(cf.se_per_user(k).unwrap() >= 0.0);
        }
    }

    #[test]
    fn more_receiver_noise_lowers_sinr(cfg in small_config(), extra_db in 1.0f64..20.0) {
        let quiet = SystemModel::new(Scenario::from_seed(&cfg).unwrap()).unwrap();
        let loud_cfg = SystemConfig { noise_power_dbm: cfg.noise_power_dbm + extra_db, ..cfg.clone() };
        let loud = SystemModel::new(Scenario::from_seed(&loud_cfg).unwrap()).unwrap();
        let (a, b) = (ClosedForm::new(&quiet), ClosedForm::new(&loud));
        let n = quiet.estimation_instant();
        for k in 0..quiet.num_users() {
            prop_assert!(b.sinr(k, n).unwrap().sinr < a.sinr(k, n).unwrap().sinr);
        }
    }
}
