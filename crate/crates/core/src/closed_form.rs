//! Closed-form downlink SINR and spectral efficiency under conjugate
//! beamforming with fractional power control.

use crate::error::{Error, Result};
use crate::estimation::EstimationStats;
use crate::numerics::trace_product;
use crate::system::SystemModel;

/// Fractional power control `eta_m = 1 / sum_k tr(Q_mk)`, identical for all
/// users of one AP.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerControl {
    pub per_ap: Vec<f64>,
}

impl PowerControl {
    pub fn fractional(est: &EstimationStats, num_aps: usize, num_users: usize) -> Result<Self> {
        let per_ap = (0..num_aps)
            .map(|m| {
                let total: f64 = (0..num_users).map(|k| est.tr_q(m, k)).sum();
                if total > 0.0 && total.is_finite() {
                    Ok(1.0 / total)
                } else {
                    Err(Error::config(
                        "num_aps",
                        format!("AP {m} has no usable channel estimate (sum tr(Q) = {total:e})"),
                    ))
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { per_ap })
    }

    pub fn eta(&self, m: usize, _k: usize) -> f64 {
        self.per_ap[m]
    }

    /// `p_d sum_k eta_mk tr(Q_mk)`.
    pub fn expected_transmit_power(&self, est: &EstimationStats, downlink: f64, m: usize, num_users: usize) -> f64 {
        downlink * (0..num_users).map(|k| self.eta(m, k) * est.tr_q(m, k)).sum::<f64>()
    }
}

/// Terms of one SINR evaluation (linear mW).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinrBreakdown {
    pub ds: f64,
    /// `sum_k' E{|UI_kk'|^2}`, including `k' = k`.
    pub ui_total: f64,
    pub dn: f64,
    pub ns: f64,
    pub sinr: f64,
}

impl SinrBreakdown {
    pub fn from_terms(ds: f64, ui_total: f64, dn: f64, ns: f64) -> Result<Self> {
        let den = ui_total - ds + dn + ns;
        if !(den > 0.0) || !den.is_finite() {
            return Err(Error::Numerical(format!(
                "SINR denominator is not positive ({den:e}: ui {ui_total:e}, ds {ds:e})"
            )));
        }
        Ok(Self {
            ds,
            ui_total,
            dn,
            ns,
            sinr: (ds / den).max(0.0),
        })
    }

    pub fn se(&self) -> f64 {
        (1.0 + self.sinr).log2()
    }
}

/// Per-user constants of the closed form; only the aging factor depends on
/// the data instant.
#[derive(Clone, Debug, PartialEq)]
struct UserTerms {
    /// Copilot part of the interference, scaled by `p_d rho_n^2`.
    coherent: f64,
    /// Remaining interference, scaled by `p_d`.
    incoherent: f64,
    /// `(sum_m sqrt(eta) tr(Q))^2`.
    gain: f64,
    dn: f64,
}

/// Closed-form evaluator for one system.
#[derive(Clone, Debug)]
pub struct ClosedForm<'a> {
    model: &'a SystemModel,
    users: Vec<UserTerms>,
}

impl<'a> ClosedForm<'a> {
    pub fn new(model: &'a SystemModel) -> Self {
        let users = (0..model.num_users()).map(|k| user_terms(model, k)).collect();
        Self { model, users }
    }

    pub fn model(&self) -> &SystemModel {
        self.model
    }

    fn aging(&self, k: usize, n: usize) -> f64 {
        self.model.stats.data_corr(k, n).powi(2)
    }

    /// `sum_k' E{|UI_kk'[n]|^2}`.
    pub fn ui_sum(&self, k: usize, n: usize) -> f64 {
        let u = &self.users[k];
        self.model.powers.downlink * (self.aging(k, n) * u.coherent + u.incoherent)
    }

    /// `E{|DS_k[n]|^2}`.
    pub fn desired_signal(&self, k: usize, n: usize) -> f64 {
        self.model.powers.downlink * self.aging(k, n) * self.users[k].gain
    }

    /// `E{|DN_k|^2} = beta_k sigma_v^2 tr(Gamma)`.
    pub fn dynamic_noise(&self, k: usize) -> f64 {
        self.users[k].dn
    }

    pub fn sinr(&self, k: usize, n: usize) -> Result<SinrBreakdown> {
        let p = &self.model.powers;
        let u = &self.users[k];
        let ds = self.desired_signal(k, n);
        let ui = self.ui_sum(k, n);
        let b = SinrBreakdown::from_terms(ds, ui, u.dn, p.noise)?;
        Ok(b)
    }

    /// Data instants `lambda..=tau_c` of the block.
    pub fn data_instants(&self) -> std::ops::RangeInclusive<usize> {
        self.model.estimation_instant()..=self.model.block_length()
    }

    /// `SE_k = (1/tau_c) sum_{n=lambda}^{tau_c} log2(1 + SINR_k[n])`.
    pub fn se_per_user(&self, k: usize) -> Result<f64> {
        let mut acc = 0.0;
        for n in self.data_instants() {
            acc += self.sinr(k, n)?.se();
        }
        Ok(acc / self.model.block_length() as f64)
    }

    pub fn se_all(&self) -> Result<Vec<f64>> {
        (0..self.model.num_users()).map(|k| self.se_per_user(k)).collect()
    }

    /// `sum_k log2(1 + SINR_k[n])` at one instant.
    pub fn sum_se_at(&self, n: usize) -> Result<f64> {
        let mut acc = 0.0;
        for k in 0..self.model.num_users() {
            acc += self.sinr(k, n)?.se();
        }
        Ok(acc)
    }
}

fn user_terms(model: &SystemModel, k: usize) -> UserTerms {
    let scen = &model.scenario;
    let (stats, est, pc, p, ris) = (&model.stats, &model.est, &model.power_control, &model.powers, &model.ris);
    let m_count = scen.num_aps();
    let k_count = scen.num_users();
    let wk = scen.modes[k];
    let bk = scen.beta_user_ris[k];
    let rho_p2 = est.pilot_corr[k].powi(2);
    let t_self = ris.t_product(wk, wk);

    let mut coherent = 0.0;
    for kp in scen.pilots.copilots(k) {
        let mut own_cascade = 0.0;
        let mut mean = num_complex::Complex64::new(0.0, 0.0);
        for m in 0..m_count {
            let eta = pc.eta(m, kp);
            let z = est.z(m, kp);
            let r = &scen.ap_corr[m];
            let bb = scen.beta_ap_ris[m] * bk;
            own_cascade += eta * bb * bb * t_self * trace_product(&(r * z.adjoint()), &(r * z)).re;
            mean += eta.sqrt() * trace_product(stats.delta(m, k), &z.adjoint());
        }
        coherent += p.pilot * rho_p2 * (own_cascade + mean.norm_sqr());
    }

    let mut incoherent = 0.0;
    for kp in 0..k_count {
        let copilots = scen.pilots.copilots(kp);
        let mut mean_ris = num_complex::Complex64::new(0.0, 0.0);
        for m in 0..m_count {
            let eta = pc.eta(m, kp);
            let z = est.z(m, kp);
            let zh = z.adjoint();
            let r = &scen.ap_corr[m];
            let dz = stats.delta(m, k) * &zh;
            let mut pilot = 0.0;
            for &j in &copilots {
                pilot += trace_product(&dz, &(stats.delta(m, j) * z)).re;
            }
            let ris_noise = scen.beta_ap_ris[m] * p.ris_noise * ris.noise_trace()
                * trace_product(&dz, &(r * z)).re;
            let awgn = p.noise * trace_product(&(stats.delta(m, k) * z), &zh).re;
            incoherent += eta * (p.pilot * pilot + ris_noise + awgn);
            mean_ris += eta.sqrt() * scen.beta_ap_ris[m] * trace_product(r, &zh);
        }
        let cascade: f64 = copilots
            .iter()
            .map(|&j| scen.beta_user_ris[j] * ris.t_product(wk, scen.modes[j]))
            .sum();
        incoherent += bk * mean_ris.norm_sqr() * (p.pilot * cascade + p.ris_noise * ris.t_gamma(wk));
    }

    let gain: f64 = (0..m_count)
        .map(|m| pc.eta(m, k).sqrt() * est.tr_q(m, k))
        .sum::<f64>()
        .powi(2);
    UserTerms {
        coherent,
        incoherent,
        gain,
        dn: bk * p.ris_noise * ris.tr_gamma(wk),
    }
}
