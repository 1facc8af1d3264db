//! Pilot projection and MMSE channel estimation.

use crate::channel::{ChannelSampler, ChannelStats, StaticDraw};
use crate::error::{Error, Result};
use crate::numerics::{dbm_to_mw, hermitian_inverse, hermitian_part, CMat, CVec, RngStream};
use crate::ris::Mode;
use crate::scenario::Scenario;

/// Linear powers (mW) shared by estimation and the SINR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Powers {
    pub pilot: f64,
    pub downlink: f64,
    pub noise: f64,
    pub ris_noise: f64,
}

impl Powers {
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let c = &scenario.config;
        Self {
            pilot: dbm_to_mw(c.pilot_power_dbm),
            downlink: dbm_to_mw(c.downlink_power_dbm),
            noise: dbm_to_mw(c.noise_power_dbm),
            ris_noise: dbm_to_mw(c.ris_noise_power_dbm),
        }
    }
}

/// `Psi = p_p sum_{P_k} Delta + beta_m sigma_v^2 R_r sum tr(Gamma) + sigma^2 I`.
pub fn compute_psi(
    m: usize,
    k: usize,
    scenario: &Scenario,
    noise_trace: f64,
    stats: &ChannelStats,
    powers: &Powers,
) -> CMat {
    let n = scenario.antennas();
    let mut psi = CMat::identity(n, n).scale(powers.noise);
    for j in scenario.pilots.copilots(k) {
        psi += stats.delta(m, j).scale(powers.pilot);
    }
    psi += scenario.ap_corr[m].scale(scenario.beta_ap_ris[m] * powers.ris_noise * noise_trace);
    hermitian_part(&psi)
}

/// Estimation matrices of every AP-user pair.
#[derive(Clone, Debug)]
pub struct EstimationStats {
    num_users: usize,
    pub psi: Vec<CMat>,
    /// `Z = sqrt(p_p) rho[lambda - t_k] Delta Psi^{-1}`.
    pub z: Vec<CMat>,
    /// `Q = Z Psi Z^H`.
    pub q: Vec<CMat>,
    pub tr_q: Vec<f64>,
    /// `rho_k[lambda - t_k]`.
    pub pilot_corr: Vec<f64>,
    pub estimation_instant: usize,
}

impl EstimationStats {
    pub fn new(
        scenario: &Scenario,
        noise_trace: f64,
        stats: &ChannelStats,
        powers: &Powers,
    ) -> Result<Self> {
        let (m_count, k_count) = (scenario.num_aps(), scenario.num_users());
        let pilot_corr: Vec<f64> = (0..k_count)
            .map(|k| stats.pilot_corr(k, scenario.pilots.instant[k]))
            .collect();
        let mut psi = Vec::with_capacity(m_count * k_count);
        let mut z = Vec::with_capacity(m_count * k_count);
        let mut q = Vec::with_capacity(m_count * k_count);
        let sp = powers.pilot.sqrt();
        for m in 0..m_count {
            for k in 0..k_count {
                let p = compute_psi(m, k, scenario, noise_trace, stats, powers);
                let inv = hermitian_inverse(&p)?;
                let zk = (stats.delta(m, k) * &inv).scale(sp * pilot_corr[k]);
                let qk = hermitian_part(&(&zk * &p * zk.adjoint()));
                psi.push(p);
                z.push(zk);
                q.push(qk);
            }
        }
        let tr_q = q.iter().map(|x| x.trace().re).collect();
        Ok(Self {
            num_users: k_count,
            psi,
            z,
            q,
            tr_q,
            pilot_corr,
            estimation_instant: scenario.config.estimation_instant(),
        })
    }

    fn idx(&self, m: usize, k: usize) -> usize {
        m * self.num_users + k
    }

    pub fn psi(&self, m: usize, k: usize) -> &CMat {
        &self.psi[self.idx(m, k)]
    }

    pub fn z(&self, m: usize, k: usize) -> &CMat {
        &self.z[self.idx(m, k)]
    }

    pub fn q(&self, m: usize, k: usize) -> &CMat {
        &self.q[self.idx(m, k)]
    }

    pub fn tr_q(&self, m: usize, k: usize) -> f64 {
        self.tr_q[self.idx(m, k)]
    }
}

/// Pilot-phase noise for one pilot sequence: RIS dynamic noise projected on
/// the pilot, per surface and mode, and AWGN per AP.
#[derive(Clone, Debug)]
pub struct PilotNoise {
    pub ris: Vec<[CVec; 2]>,
    pub awgn: Vec<CVec>,
}

impl PilotNoise {
    pub fn draw(sampler: &ChannelSampler, antennas: usize, num_aps: usize, powers: &Powers, rng: &mut RngStream) -> Self {
        let ris = sampler
            .ris()
            .surfaces
            .iter()
            .map(|s| Mode::ALL.map(|_| rng.complex_gaussian_vec(s.elements(), powers.ris_noise)))
            .collect();
        let awgn = (0..num_aps)
            .map(|_| rng.complex_gaussian_vec(antennas, powers.noise))
            .collect();
        Self { ris, awgn }
    }

    /// Zero noise, for noiseless checks.
    pub fn silent(sampler: &ChannelSampler, antennas: usize, num_aps: usize) -> Self {
        Self {
            ris: sampler
                .ris()
                .surfaces
                .iter()
                .map(|s| Mode::ALL.map(|_| CVec::zeros(s.elements())))
                .collect(),
            awgn: vec![CVec::zeros(antennas); num_aps],
        }
    }
}

/// `y = sum_{P} sqrt(p_p) g_mk'[t_k'] + sum g_m Theta V phi + W phi` at AP `m`.
///
/// `pilot_channels[k']` is `g_mk'[t_k']` for every user sharing the pilot.
pub fn project_pilots(
    m: usize,
    copilot_channels: &[&CVec],
    fixed: &StaticDraw,
    noise: &PilotNoise,
    powers: &Powers,
) -> CVec {
    let sp = powers.pilot.sqrt();
    let mut y = noise.awgn[m].clone();
    for g in copilot_channels {
        y += g.scale(sp);
    }
    for (s, per_mode) in noise.ris.iter().enumerate() {
        for (w, v) in per_mode.iter().enumerate() {
            y += &fixed.ap_ris[s][m] * fixed.theta[s][w].component_mul(v);
        }
    }
    y
}

/// `ghat = Z y`.
pub fn mmse_estimate(y: &CVec, m: usize, k: usize, est: &EstimationStats) -> CVec {
    est.z(m, k) * y
}

/// Checks `Q <= Delta` for one pair; used by the property suite.
pub fn estimation_gap(stats: &ChannelStats, est: &EstimationStats, m: usize, k: usize) -> Result<CMat> {
    let gap = stats.delta(m, k) - est.q(m, k);
    if gap.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite estimation gap".into()));
    }
    Ok(gap)
}
