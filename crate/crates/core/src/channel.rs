//! Aggregate channel statistics and sampled realizations under aging.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::{bessel_j0, CMat, CVec, RngStream};
use crate::ris::{Mode, RisModel};
use crate::scenario::{DataLagOrigin, Scenario, SPEED_OF_LIGHT};

/// Doppler shift `v f_c / c` (Hz) for a speed in km/h.
pub fn doppler_shift(v_kmh: f64, carrier_hz: f64) -> f64 {
    v_kmh / 3.6 * carrier_hz / SPEED_OF_LIGHT
}

/// `J0(2 pi f_D T_s n)`.
pub fn temporal_correlation(doppler_hz: f64, instant_s: f64, lag: f64) -> f64 {
    bessel_j0(2.0 * PI * doppler_hz * instant_s * lag)
}

/// Complement `sqrt(1 - rho^2)`.
pub fn innovation_weight(rho: f64) -> f64 {
    (1.0 - rho * rho).max(0.0).sqrt()
}

/// `Delta = beta_mk R_r + beta_m beta_k R_r tr(T)`.
pub fn aggregate_covariance(scenario: &Scenario, ris: &RisModel, m: usize, k: usize) -> CMat {
    let scale = scenario.beta_direct[(m, k)]
        + scenario.beta_ap_ris[m] * scenario.beta_user_ris[k] * ris.tr_t(scenario.modes[k]);
    scenario.ap_corr[m].scale(scale)
}

/// Second-order channel statistics of one scenario.
#[derive(Clone, Debug)]
pub struct ChannelStats {
    num_users: usize,
    /// `Delta_mk` at index `m * K + k`.
    pub delta: Vec<CMat>,
    pub doppler_hz: Vec<f64>,
    pub instant_s: f64,
    pub lag_origin: DataLagOrigin,
    pub estimation_instant: usize,
}

impl ChannelStats {
    pub fn new(scenario: &Scenario, ris: &RisModel) -> Self {
        let (m_count, k_count) = (scenario.num_aps(), scenario.num_users());
        let cfg = &scenario.config;
        let mut delta = Vec::with_capacity(m_count * k_count);
        for m in 0..m_count {
            for k in 0..k_count {
                delta.push(aggregate_covariance(scenario, ris, m, k));
            }
        }
        Self {
            num_users: k_count,
            delta,
            doppler_hz: (0..k_count)
                .map(|k| doppler_shift(cfg.velocity_kmh(k), cfg.carrier_hz))
                .collect(),
            instant_s: cfg.instant_s,
            lag_origin: cfg.data_lag_origin,
            estimation_instant: cfg.estimation_instant(),
        }
    }

    pub fn delta(&self, m: usize, k: usize) -> &CMat {
        &self.delta[m * self.num_users + k]
    }

    /// `rho_k[lag]`.
    pub fn temporal_corr(&self, k: usize, lag: usize) -> f64 {
        temporal_correlation(self.doppler_hz[k], self.instant_s, lag as f64)
    }

    /// Aging lag between the estimate and data instant `n`.
    pub fn data_lag(&self, n: usize) -> usize {
        match self.lag_origin {
            DataLagOrigin::BlockStart => n,
            DataLagOrigin::EstimationInstant => n.saturating_sub(self.estimation_instant),
        }
    }

    /// Correlation between the estimated state and the channel at data instant `n`.
    pub fn data_corr(&self, k: usize, n: usize) -> f64 {
        self.temporal_corr(k, self.data_lag(n))
    }

    /// `rho_k[lambda - t_k]`.
    pub fn pilot_corr(&self, k: usize, pilot_instant: usize) -> f64 {
        self.temporal_corr(k, self.estimation_instant - pilot_instant)
    }
}

/// Components that stay fixed over a block: AP-RIS channels and the
/// effective RIS coefficients including phase errors.
#[derive(Clone, Debug)]
pub struct StaticDraw {
    /// `g_m` per surface, per AP (N x L_s).
    pub ap_ris: Vec<Vec<CMat>>,
    /// Diagonal of `Theta` per surface, per mode.
    pub theta: Vec<[CVec; 2]>,
}

/// Fast-fading components of one channel state (or one innovation).
#[derive(Clone, Debug)]
pub struct LinkState {
    /// Direct AP-user part at index `m * K + k`.
    pub direct: Vec<CVec>,
    /// User-RIS vector of each user on its serving surface.
    pub user_ris: Vec<Option<CVec>>,
}

/// Precomputed square roots for channel draws.
#[derive(Clone, Debug)]
pub struct ChannelSampler {
    num_aps: usize,
    num_users: usize,
    antennas: usize,
    beta_direct_sqrt: Vec<f64>,
    beta_ap_ris_sqrt: Vec<f64>,
    beta_user_ris_sqrt: Vec<f64>,
    ap_corr_sqrt: Vec<CMat>,
    /// `sqrt(A) R^{1/2}` per surface.
    ris_corr_sqrt: Vec<CMat>,
    ris: RisModel,
    modes: Vec<Mode>,
}

/// Aggregate channels `g_mk[n]` at a set of instants.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    pub instants: Vec<usize>,
    /// Per instant, index `m * K + k`.
    pub channels: Vec<Vec<CVec>>,
    pub fixed: StaticDraw,
}

impl ChannelRealization {
    pub fn at(&self, instant_pos: usize, num_users: usize, m: usize, k: usize) -> &CVec {
        &self.channels[instant_pos][m * num_users + k]
    }
}

impl ChannelSampler {
    pub fn new(scenario: &Scenario, ris: &RisModel) -> Self {
        let (m, k) = (scenario.num_aps(), scenario.num_users());
        Self {
            num_aps: m,
            num_users: k,
            antennas: scenario.antennas(),
            beta_direct_sqrt: (0..m * k)
                .map(|i| scenario.beta_direct[(i / k, i % k)].sqrt())
                .collect(),
            beta_ap_ris_sqrt: scenario.beta_ap_ris.iter().map(|b| b.sqrt()).collect(),
            beta_user_ris_sqrt: scenario.beta_user_ris.iter().map(|b| b.sqrt()).collect(),
            ap_corr_sqrt: scenario.ap_corr_sqrt.clone(),
            ris_corr_sqrt: ris
                .surfaces
                .iter()
                .map(|s| s.corr_sqrt.scale(s.area.sqrt()))
                .collect(),
            ris: ris.clone(),
            modes: scenario.modes.clone(),
        }
    }

    pub fn ris(&self) -> &RisModel {
        &self.ris
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    /// Draws `g_m = sqrt(beta_m) R_r^{1/2} V (A R)^{1/2}` and the phase errors.
    pub fn draw_static(&self, rng: &mut RngStream) -> StaticDraw {
        let n = self.antennas;
        let ap_ris = self
            .ris_corr_sqrt
            .iter()
            .map(|rt| {
                (0..self.num_aps)
                    .map(|m| {
                        let v = rng.complex_gaussian_mat(n, rt.nrows(), 1.0);
                        (&self.ap_corr_sqrt[m] * v * rt).scale(self.beta_ap_ris_sqrt[m])
                    })
                    .collect()
            })
            .collect();
        let theta = self
            .ris
            .surfaces
            .iter()
            .map(|s| {
                Mode::ALL.map(|w| {
                    let err = self.ris.phase_error.sample_diag(s.elements(), rng);
                    s.nominal_diag(w).component_mul(&err)
                })
            })
            .collect();
        StaticDraw { ap_ris, theta }
    }

    /// Draws the fast components: direct links and user-RIS vectors.
    pub fn draw_state(&self, rng: &mut RngStream) -> LinkState {
        let n = self.antennas;
        let mut direct = Vec::with_capacity(self.num_aps * self.num_users);
        for m in 0..self.num_aps {
            for k in 0..self.num_users {
                let z = rng.complex_gaussian_vec(n, 1.0);
                direct.push((&self.ap_corr_sqrt[m] * z).scale(self.beta_direct_sqrt[m * self.num_users + k]));
            }
        }
        let user_ris = (0..self.num_users)
            .map(|k| {
                self.ris.serving[self.modes[k].index()].map(|s| {
                    let rt = &self.ris_corr_sqrt[s];
                    let z = rng.complex_gaussian_vec(rt.nrows(), 1.0);
                    (rt * z).scale(self.beta_user_ris_sqrt[k])
                })
            })
            .collect();
        LinkState { direct, user_ris }
    }

    /// RIS-side column `Theta g_k` of user `k`, with its serving surface.
    pub fn cascade_input(&self, fixed: &StaticDraw, state: &LinkState, k: usize) -> Option<(usize, CVec)> {
        let w = self.modes[k];
        let s = self.ris.serving[w.index()]?;
        let g = state.user_ris[k].as_ref()?;
        Some((s, fixed.theta[s][w.index()].component_mul(g)))
    }

    /// All aggregate channels `d_mk + g_m Theta g_k` of one state.
    pub fn aggregate_all(&self, fixed: &StaticDraw, state: &LinkState) -> Vec<CVec> {
        let inputs: Vec<_> = (0..self.num_users)
            .map(|k| self.cascade_input(fixed, state, k))
            .collect();
        let mut out = state.direct.clone();
        for m in 0..self.num_aps {
            for (k, input) in inputs.iter().enumerate() {
                if let Some((s, x)) = input {
                    out[m * self.num_users + k] += &fixed.ap_ris[*s][m] * x;
                }
            }
        }
        out
    }

    /// Samples `g_mk[n] = rho[n] g_mk[0] + rho_bar[n] e_mk[n]` at each
    /// requested instant, with an independent innovation per instant.
    pub fn sample_channels(
        &self,
        stats: &ChannelStats,
        instants: &[usize],
        rng: &mut RngStream,
    ) -> Result<ChannelRealization> {
        let fixed = self.draw_static(rng);
        let initial = self.aggregate_all(&fixed, &self.draw_state(rng));
        let mut channels = Vec::with_capacity(instants.len());
        for &n in instants {
            if n == 0 {
                channels.push(initial.clone());
                continue;
            }
            let innov = self.aggregate_all(&fixed, &self.draw_state(rng));
            let aged = (0..initial.len())
                .map(|i| {
                    let k = i % self.num_users;
                    let rho = stats.temporal_corr(k, n);
                    combine(&initial[i], &innov[i], rho)
                })
                .collect();
            channels.push(aged);
        }
        Ok(ChannelRealization {
            instants: instants.to_vec(),
            channels,
            fixed,
        })
    }
}

/// `rho a + sqrt(1 - rho^2) b`.
pub fn combine(a: &CVec, b: &CVec, rho: f64) -> CVec {
    a.scale(rho) + b.scale(innovation_weight(rho))
}

/// Conjugate-free bilinear form `a^T b`.
pub fn dot_t(a: &CVec, b: &CVec) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}
