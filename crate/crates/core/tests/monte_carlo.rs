mod support;

use nalgebra::DMatrix;
use starcf::closed_form::ClosedForm;
use starcf::monte_carlo::{self, estimate_sinr, estimate_terms};
use starcf::ris::RisModel;
use starcf::scenario::{Architecture, Scenario, SystemConfig, Velocities};
use starcf::system::SystemModel;

/// Two APs with two antennas, no RIS, one stationary user, noiseless links.
fn degenerate() -> SystemModel {
    let cfg = SystemConfig {
        num_aps: 2,
        antennas_per_ap: 2,
        users_reflect: 1,
        users_transmit: 0,
        pilot_length: 1,
        architecture: Architecture::None,
        velocities_kmh: Velocities::All(0.0),
        noise_power_dbm: -300.0,
        ris_noise_power_dbm: -300.0,
        block_length: 10,
        ..SystemConfig::default()
    };
    let ris = RisModel::from_config(&cfg).unwrap();
    let scen = Scenario::from_parts(
        cfg,
        vec![[0.0, 0.0], [10.0, 0.0]],
        vec![[5.0, 5.0]],
        [500.0, 100.0],
        DMatrix::from_row_slice(2, 1, &[1e-9, 4e-10]),
        vec![1.0, 1.0],
        vec![1.0],
    )
    .unwrap();
    SystemModel::with_ris(scen, ris).unwrap()
}

#[test]
fn degenerate_case_matches_closed_form() {
    let model = degenerate();
    let cf = ClosedForm::new(&model).sinr(0, 2).unwrap();
    let run = monte_carlo::run(&model, 5, 100_000).unwrap();
    let (mc, _) = run.sinr(0, 2).unwrap();
    assert!((mc / cf.sinr - 1.0).abs() < 0.01, "{mc} vs {}", cf.sinr);
}

#[test]
fn desired_signal_within_three_standard_errors() {
    let model = support::cascade_fixture(2.0, 60.0);
    let cf = ClosedForm::new(&model);
    let run = monte_carlo::run(&model, 11, 20_000).unwrap();
    for k in 0..model.num_users() {
        for n in [3, 60, 150] {
            let e = run.estimate(k, n);
            let want = cf.desired_signal(k, n);
            assert!((e.ds - want).abs() < 3.0 * e.ds_se, "k={k} n={n}: {} vs {want} +- {}", e.ds, e.ds_se);
        }
    }
}

#[test]
fn cascade_scenario_sinr_agrees() {
    let model = support::cascade_fixture(2.0, 60.0);
    let cf = ClosedForm::new(&model);
    let run = monte_carlo::run(&model, 2, 50_000).unwrap();
    for k in 0..model.num_users() {
        for n in [3, 100] {
            let want = cf.sinr(k, n).unwrap();
            let e = run.estimate(k, n);
            // interference differs by the neglected trace covariance, about 1%
            assert!((e.ui_total / want.ui_total - 1.0).abs() < 0.03, "k={k} n={n}");
            assert!((e.dn / want.dn - 1.0).abs() < 0.03, "k={k} n={n}");
            assert!((e.sinr / want.sinr - 1.0).abs() < 0.05, "k={k} n={n}: {} vs {}", e.sinr, want.sinr);
        }
    }
}

#[test]
fn same_seed_same_estimate() {
    let model = support::cascade_fixture(1.0, 10.0);
    let a = estimate_terms(&model, 1, 5, 500, 9).unwrap();
    let b = estimate_terms(&model, 1, 5, 500, 9).unwrap();
    assert_eq!(a, b);
    let c = estimate_terms(&model, 1, 5, 500, 10).unwrap();
    assert_ne!(a.ds, c.ds);
}

#[test]
fn standard_error_shrinks_with_trials() {
    // a single jackknife error is itself noisy, so average it over seeds
    let model = support::cascade_fixture(2.0, 60.0);
    let mean_se = |trials: usize| -> f64 {
        (0..40).map(|seed| estimate_terms(&model, 0, 10, trials, seed).unwrap().ds_se).sum::<f64>() / 40.0
    };
    let ratio = mean_se(1_000) / mean_se(2_000);
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn halves_merge_to_full_run() {
    let model = support::cascade_fixture(2.0, 60.0);
    let full = monte_carlo::run(&model, 4, 400).unwrap();
    let first = monte_carlo::run_trials(&model, 4, 0, 200).unwrap();
    let second = monte_carlo::run_trials(&model, 4, 200, 200).unwrap();
    let merged = first.merged(second);
    assert_eq!(merged.trials(), full.trials());
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
    for k in 0..model.num_users() {
        let (a, b) = (merged.estimate(k, 20), full.estimate(k, 20));
        assert!(close(a.ds, b.ds) && close(a.ui_total, b.ui_total) && close(a.dn, b.dn) && close(a.ns, b.ns));
    }
}

#[test]
fn decorrelated_instant_has_no_desired_signal() {
    let model = support::cascade_fixture(2.0, 120.0);
    let n = starcf::experiments::plan_block_length(&[120.0], 1.9e9, 1e-5).unwrap()[0]
        .first_zero
        .unwrap();
    // pick the instant where |rho| is smallest around the first zero
    let n = (n - 1..=n + 1)
        .min_by(|&a, &b| {
            let ra = model.stats.data_corr(0, a).abs();
            let rb = model.stats.data_corr(0, b).abs();
            ra.partial_cmp(&rb).unwrap()
        })
        .unwrap();
    assert!(model.stats.data_corr(0, n).abs() < 0.02);
    let (sinr, se) = estimate_sinr(&model, 0, n, 5_000, 6).unwrap();
    let cf = ClosedForm::new(&model).sinr(0, n).unwrap().sinr;
    assert!(cf < 1e-3);
    assert!(sinr < cf + 3.0 * se + 1e-3, "{sinr} +- {se}");
}

#[test]
fn instant_before_estimation_is_rejected() {
    let model = support::cascade_fixture(1.0, 10.0);
    assert!(estimate_terms(&model, 0, 1, 10, 1).is_err());
    assert!(monte_carlo::run(&model, 1, 0).is_err());
}
