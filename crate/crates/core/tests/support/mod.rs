//! Shared fixtures and sampling oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use starcf::channel::{combine, ChannelSampler, ChannelStats};
use starcf::estimation::{project_pilots, EstimationStats, PilotNoise, Powers};
use starcf::numerics::{trace_product, CMat, CVec, RngStream};
use starcf::ris::{Mode, PhaseErrorModel, RisModel, RisSurface};
use starcf::scenario::{PhaseErrorKind, Scenario, SystemConfig, Velocities};
use starcf::system::SystemModel;

/// One AP with two antennas and `users` reflection users on pilots of
/// length `pilot_length`. RIS path and RIS noise are of the same order as the
/// direct path and the pilot power, so every term of the estimator matters.
pub fn pilot_fixture(users: usize, pilot_length: usize) -> SystemModel {
    let cfg = SystemConfig {
        num_aps: 1,
        antennas_per_ap: 2,
        users_reflect: users,
        users_transmit: 0,
        ris_cols: 2,
        ris_rows: 2,
        pilot_length,
        pilot_power_dbm: 0.0,
        noise_power_dbm: -5.0,
        ris_noise_power_dbm: -3.0,
        phase_error: PhaseErrorKind::Uniform,
        kappa: 1.0,
        velocities_kmh: Velocities::All(120.0),
        ..SystemConfig::default()
    };
    let ris = RisModel::from_config(&cfg).unwrap();
    let trt = ris.tr_t(Mode::Reflect);
    let trg = ris.noise_trace();
    let scen = Scenario::from_parts(
        cfg,
        vec![[0.0, 0.0]],
        vec![[500.0, 50.0]; users],
        [500.0, 100.0],
        DMatrix::from_fn(1, users, |_, k| 1.0 + 0.5 * k as f64),
        vec![1.0 / trg],
        vec![0.8 / trt; users],
    )
    .unwrap();
    SystemModel::with_ris(scen, ris).unwrap()
}

/// Channels at the estimation instant and the pilot observation of every user.
pub fn pilot_round(model: &SystemModel, sampler: &ChannelSampler, rng: &mut RngStream) -> (Vec<CVec>, Vec<CVec>) {
    let scen = &model.scenario;
    let (k_count, n_ant, m_count) = (scen.num_users(), scen.antennas(), scen.num_aps());
    let fixed = sampler.draw_static(rng);
    let at_lambda = sampler.aggregate_all(&fixed, &sampler.draw_state(rng));
    let innov = sampler.aggregate_all(&fixed, &sampler.draw_state(rng));
    let pilot: Vec<CVec> = (0..m_count * k_count)
        .map(|i| combine(&at_lambda[i], &innov[i], model.est.pilot_corr[i % k_count]))
        .collect();
    let noise = PilotNoise::draw(sampler, n_ant, m_count, &model.powers, rng);
    let ys = (0..m_count * k_count)
        .map(|i| {
            let (m, k) = (i / k_count, i % k_count);
            let cop: Vec<&CVec> = scen.pilots.copilots(k).iter().map(|&j| &pilot[m * k_count + j]).collect();
            project_pilots(m, &cop, &fixed, &noise, &model.powers)
        })
        .collect();
    (at_lambda, ys)
}

/// RIS model whose cascaded path is comparable to the direct path: two APs,
/// two antennas, three users on two pilots, a 2x2 surface and noise powers
/// of the order of the signal.
pub fn cascade_fixture(amplification: f64, velocity_kmh: f64) -> SystemModel {
    let cfg = SystemConfig {
        num_aps: 2,
        antennas_per_ap: 2,
        users_reflect: 2,
        users_transmit: 1,
        ris_cols: 2,
        ris_rows: 2,
        pilot_length: 2,
        kappa: std::f64::consts::FRAC_PI_2,
        amplification,
        noise_power_dbm: 0.0,
        ris_noise_power_dbm: 0.0,
        pilot_power_dbm: 10.0,
        downlink_power_dbm: 10.0,
        velocities_kmh: Velocities::All(velocity_kmh),
        ..SystemConfig::default()
    };
    let ris = RisModel::from_config(&cfg).unwrap();
    let trt = ris.tr_t(Mode::Reflect);
    let trg = ris.noise_trace();
    let scen = Scenario::from_parts(
        cfg,
        vec![[0.0, 0.0], [1.0, 1.0]],
        vec![[0.0, 0.0]; 3],
        [500.0, 100.0],
        DMatrix::from_row_slice(2, 3, &[1.0, 0.5, 0.3, 0.4, 1.2, 0.8]),
        vec![1.0 / trg, 2.0 / trg],
        vec![1.0 / trt, 0.7 / trt, 1.5 / trt],
    )
    .unwrap();
    SystemModel::with_ris(scen, ris).unwrap()
}

/// A single surface with zero nominal phases.
pub fn flat_surface(cols: usize, rows: usize, amplification: f64, reflect_share: f64) -> RisSurface {
    let wl = 3e8 / 1.9e9;
    let n = cols * rows;
    RisSurface::new(cols, rows, wl / 4.0, wl / 4.0, wl, amplification, reflect_share, [vec![0.0; n], vec![0.0; n]])
        .unwrap()
}

/// Sample mean of `tr(T T)` with `T = A^2 R^{1/2} (Theta R Theta^H) R^{1/2}`
/// over independent phase-error draws.
pub fn sampled_t_square(s: &RisSurface, model: PhaseErrorModel, trials: usize, seed: u64) -> f64 {
    let mut rng = RngStream::new(seed, 0);
    let nominal = s.nominal_diag(Mode::Reflect);
    let a2 = s.area * s.area;
    let l = s.elements();
    let mut acc = 0.0;
    for _ in 0..trials {
        let theta = nominal.component_mul(&model.sample_diag(l, &mut rng));
        let inner = CMat::from_fn(l, l, |i, j| theta[i] * s.corr[(i, j)] * theta[j].conj());
        let t = (&s.corr_sqrt * inner * &s.corr_sqrt).scale(a2);
        acc += trace_product(&t, &t).re;
    }
    acc / trials as f64
}

/// Empirical covariance `E{x x^H}` of zero-mean samples.
pub fn empirical_cov(samples: &[CVec]) -> CMat {
    let n = samples[0].len();
    let mut acc = CMat::zeros(n, n);
    for s in samples {
        acc += s * s.adjoint();
    }
    acc.unscale(samples.len() as f64)
}

pub fn stats_of(model: &SystemModel) -> (&ChannelStats, &EstimationStats, &Powers) {
    (&model.stats, &model.est, &model.powers)
}

/// Seed-averaged average per-user SE (closed form) at one configuration.
pub fn mean_average_se(cfg: &SystemConfig, seeds: impl Iterator<Item = u64>) -> Vec<f64> {
    seeds
        .map(|seed| {
            let c = SystemConfig { seed, ..cfg.clone() };
            let model = SystemModel::new(Scenario::from_seed(&c).unwrap()).unwrap();
            let se = starcf::closed_form::ClosedForm::new(&model).se_all().unwrap();
            se.iter().sum::<f64>() / se.len() as f64
        })
        .collect()
}
