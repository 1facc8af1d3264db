//! Monte Carlo estimator of every term of the received downlink signal.
//!
//! Each trial draws the static AP-RIS channels and phase errors, the channel
//! state at the estimation instant, one pilot-instant innovation and one
//! data innovation per user, pilot noise, dynamic noise and receiver noise.
//! It then forms conjugate beamforming from the MMSE estimates and records
//!
//! * `A_kk' = sum_m sqrt(eta) g_mk[lambda]^T conj(ghat_mk')`
//! * `B_kk' = sum_m sqrt(eta) e_mk^T conj(ghat_mk')`
//!
//! so that the effective gain at any data instant is `rho A + rho_bar B`.
//! Only first and second moments of `A` and `B` are kept, which gives every
//! term at every instant from one pass. Expectations over the data symbols
//! are taken analytically (`E|q|^2 = 1`).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{combine, dot_t, innovation_weight, ChannelSampler};
use crate::closed_form::SinrBreakdown;
use crate::error::{Error, Result};
use crate::estimation::{mmse_estimate, project_pilots, PilotNoise};
use crate::numerics::{CVec, RngStream};
use crate::system::SystemModel;

/// Stream ids of trial `t` are `TRIAL_STREAM_BASE + t`.
pub const TRIAL_STREAM_BASE: u64 = 1 << 32;
/// Trials per parallel work unit; fixed so results do not depend on threads.
const CHUNK: usize = 25;
/// Maximum jackknife groups.
const MAX_GROUPS: usize = 20;

/// Running sums of one set of trials.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    k: usize,
    pub count: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    aa: Vec<f64>,
    bb: Vec<f64>,
    ab: Vec<Complex64>,
    /// `sum |A_kk - E A_kk|^2` about the closed-form mean.
    bu: Vec<f64>,
    dn: Vec<f64>,
    ns: Vec<f64>,
}

impl Moments {
    pub fn new(k: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self {
            k,
            count: 0,
            a: vec![z; k * k],
            b: vec![z; k * k],
            aa: vec![0.0; k * k],
            bb: vec![0.0; k * k],
            ab: vec![z; k * k],
            bu: vec![0.0; k],
            dn: vec![0.0; k],
            ns: vec![0.0; k],
        }
    }

    pub fn merge(&mut self, o: &Moments) {
        self.count += o.count;
        for i in 0..self.a.len() {
            self.a[i] += o.a[i];
            self.b[i] += o.b[i];
            self.aa[i] += o.aa[i];
            self.bb[i] += o.bb[i];
            self.ab[i] += o.ab[i];
        }
        for i in 0..self.k {
            self.bu[i] += o.bu[i];
            self.dn[i] += o.dn[i];
            self.ns[i] += o.ns[i];
        }
    }

    /// `self - o`, used for leave-one-group-out estimates.
    fn without(&self, o: &Moments) -> Moments {
        let mut r = self.clone();
        r.count -= o.count;
        for i in 0..r.a.len() {
            r.a[i] -= o.a[i];
            r.b[i] -= o.b[i];
            r.aa[i] -= o.aa[i];
            r.bb[i] -= o.bb[i];
            r.ab[i] -= o.ab[i];
        }
        for i in 0..r.k {
            r.bu[i] -= o.bu[i];
            r.dn[i] -= o.dn[i];
            r.ns[i] -= o.ns[i];
        }
        r
    }
}

/// Term estimates for user `k` at instant `n` (linear mW).
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub ds: f64,
    pub bu: f64,
    pub ca: f64,
    /// `E|UI_kk'|^2` for every `k'`; the `k' = k` entry is the full `E|DS + BU + CA|^2`.
    pub ui: Vec<f64>,
    pub ui_total: f64,
    pub dn: f64,
    pub ns: f64,
    pub sinr: f64,
    pub ds_se: f64,
    pub ui_total_se: f64,
    pub sinr_se: f64,
}

/// Point estimates from one set of moments.
struct Terms {
    ds: f64,
    bu: f64,
    ca: f64,
    ui: Vec<f64>,
    dn: f64,
    ns: f64,
}

impl Terms {
    fn ui_total(&self) -> f64 {
        self.ui.iter().sum()
    }

    fn sinr(&self) -> f64 {
        let den = self.ui_total() - self.ds + self.dn + self.ns;
        if den > 0.0 { (self.ds / den).max(0.0) } else { f64::NAN }
    }
}

/// Result of one Monte Carlo run: grouped moments for jackknife errors.
#[derive(Clone, Debug)]
pub struct McRun<'a> {
    model: &'a SystemModel,
    pub total: Moments,
    pub groups: Vec<Moments>,
}

/// Runs `trials` trials of `model` starting at trial index `first_trial`.
pub fn run_trials(model: &SystemModel, seed: u64, first_trial: usize, trials: usize) -> Result<McRun<'_>> {
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let sampler = ChannelSampler::new(&model.scenario, &model.ris);
    let cf_mean = closed_form_means(model);
    let chunks: Vec<(usize, usize)> = (0..trials)
        .step_by(CHUNK)
        .map(|s| (first_trial + s, CHUNK.min(trials - s)))
        .collect();
    let parts: Vec<Moments> = chunks
        .par_iter()
        .map(|&(start, len)| {
            let mut acc = Moments::new(model.num_users());
            for t in start..start + len {
                let mut rng = RngStream::new(seed, TRIAL_STREAM_BASE + t as u64);
                one_trial(model, &sampler, &cf_mean, &mut rng, &mut acc);
            }
            acc
        })
        .collect();
    let g = MAX_GROUPS.min(parts.len()).max(1);
    let mut groups = vec![Moments::new(model.num_users()); g];
    for (i, p) in parts.iter().enumerate() {
        groups[i * g / parts.len()].merge(p);
    }
    let mut total = Moments::new(model.num_users());
    for gr in &groups {
        total.merge(gr);
    }
    Ok(McRun { model, total, groups })
}

/// Runs trials `0..trials`.
pub fn run(model: &SystemModel, seed: u64, trials: usize) -> Result<McRun<'_>> {
    run_trials(model, seed, 0, trials)
}

/// `E{g_mk^T conj(ghat_mk)}` summed with power control: `sum_m sqrt(eta) tr(Q)`.
fn closed_form_means(model: &SystemModel) -> Vec<f64> {
    (0..model.num_users())
        .map(|k| {
            (0..model.num_aps())
                .map(|m| model.power_control.eta(m, k).sqrt() * model.est.tr_q(m, k))
                .sum()
        })
        .collect()
}

fn one_trial(
    model: &SystemModel,
    sampler: &ChannelSampler,
    cf_mean: &[f64],
    rng: &mut RngStream,
    acc: &mut Moments,
) {
    let scen = &model.scenario;
    let (m_count, k_count, n_ant) = (scen.num_aps(), scen.num_users(), scen.antennas());
    let fixed = sampler.draw_static(rng);
    let state = sampler.draw_state(rng);
    let g_lambda = sampler.aggregate_all(&fixed, &state);
    let e_pilot = sampler.aggregate_all(&fixed, &sampler.draw_state(rng));
    let e_data = sampler.aggregate_all(&fixed, &sampler.draw_state(rng));

    let g_pilot: Vec<CVec> = (0..m_count * k_count)
        .map(|i| combine(&g_lambda[i], &e_pilot[i], model.est.pilot_corr[i % k_count]))
        .collect();

    let tau_p = scen.pilots.pilot_length;
    let mut estimates = vec![CVec::zeros(n_ant); m_count * k_count];
    for t in 1..=tau_p {
        let noise = PilotNoise::draw(sampler, n_ant, m_count, &model.powers, rng);
        let members: Vec<usize> = (0..k_count).filter(|&k| scen.pilots.instant[k] == t).collect();
        if members.is_empty() {
            continue;
        }
        for m in 0..m_count {
            let cop: Vec<&CVec> = members.iter().map(|&j| &g_pilot[m * k_count + j]).collect();
            let y = project_pilots(m, &cop, &fixed, &noise, &model.powers);
            for &k in &members {
                estimates[m * k_count + k] = mmse_estimate(&y, m, k, &model.est).map(|z| z.conj());
            }
        }
    }

    for k in 0..k_count {
        for kp in 0..k_count {
            let mut a = Complex64::new(0.0, 0.0);
            let mut b = Complex64::new(0.0, 0.0);
            for m in 0..m_count {
                let f = &estimates[m * k_count + kp];
                let w = model.power_control.eta(m, kp).sqrt();
                a += dot_t(&g_lambda[m * k_count + k], f) * w;
                b += dot_t(&e_data[m * k_count + k], f) * w;
            }
            let i = k * k_count + kp;
            acc.a[i] += a;
            acc.b[i] += b;
            acc.aa[i] += a.norm_sqr();
            acc.bb[i] += b.norm_sqr();
            acc.ab[i] += a * b.conj();
            if k == kp {
                acc.bu[k] += (a - cf_mean[k]).norm_sqr();
            }
        }
    }

    // downlink dynamic noise: one draw per surface, seen through each user's coefficients
    let ris_noise: Vec<CVec> = sampler
        .ris()
        .surfaces
        .iter()
        .map(|s| rng.complex_gaussian_vec(s.elements(), model.powers.ris_noise))
        .collect();
    for k in 0..k_count {
        if let Some((s, x)) = sampler.cascade_input(&fixed, &state, k) {
            acc.dn[k] += dot_t(&x, &ris_noise[s]).norm_sqr();
        }
        acc.ns[k] += rng.complex_gaussian(model.powers.noise).norm_sqr();
    }
    acc.count += 1;
}

impl<'a> McRun<'a> {
    pub fn trials(&self) -> usize {
        self.total.count
    }

    /// Pools two runs of the same model over disjoint trials.
    pub fn merged(mut self, other: McRun<'_>) -> Self {
        self.total.merge(&other.total);
        self.groups.extend(other.groups);
        self
    }

    fn terms(&self, mo: &Moments, k: usize, n: usize) -> Terms {
        let kc = mo.k;
        let c = mo.count as f64;
        let pd = self.model.powers.downlink;
        let rho = self.model.stats.data_corr(k, n);
        let rb = innovation_weight(rho);
        let ui = (0..kc)
            .map(|kp| {
                let i = k * kc + kp;
                let second = rho * rho * mo.aa[i] + rb * rb * mo.bb[i] + 2.0 * rho * rb * mo.ab[i].re;
                pd * second / c
            })
            .collect();
        let i = k * kc + k;
        let mean = (mo.a[i].scale(rho) + mo.b[i].scale(rb)) / c;
        Terms {
            ds: pd * mean.norm_sqr(),
            bu: pd * rho * rho * mo.bu[k] / c,
            ca: pd * rb * rb * mo.bb[i] / c,
            ui,
            dn: mo.dn[k] / c,
            ns: mo.ns[k] / c,
        }
    }

    /// Jackknife standard error of `f` over the trial groups.
    fn jackknife(&self, f: impl Fn(&Moments) -> f64) -> f64 {
        let g = self.groups.len();
        if g < 2 {
            return f64::NAN;
        }
        let vals: Vec<f64> = self.groups.iter().map(|gr| f(&self.total.without(gr))).collect();
        let mean = vals.iter().sum::<f64>() / g as f64;
        let ss: f64 = vals.iter().map(|v| (v - mean).powi(2)).sum();
        ((g as f64 - 1.0) / g as f64 * ss).sqrt()
    }

    pub fn estimate(&self, k: usize, n: usize) -> McEstimate {
        let t = self.terms(&self.total, k, n);
        McEstimate {
            k,
            n,
            trials: self.trials(),
            ds: t.ds,
            bu: t.bu,
            ca: t.ca,
            ui_total: t.ui_total(),
            dn: t.dn,
            ns: t.ns,
            sinr: t.sinr(),
            ds_se: self.jackknife(|m| self.terms(m, k, n).ds),
            ui_total_se: self.jackknife(|m| self.terms(m, k, n).ui_total()),
            sinr_se: self.jackknife(|m| self.terms(m, k, n).sinr()),
            ui: t.ui,
        }
    }

    /// SINR at `(k, n)` with its jackknife standard error.
    pub fn sinr(&self, k: usize, n: usize) -> Result<(f64, f64)> {
        let t = self.terms(&self.total, k, n);
        let b = SinrBreakdown::from_terms(t.ds, t.ui_total(), t.dn, t.ns)?;
        Ok((b.sinr, self.jackknife(|m| self.terms(m, k, n).sinr())))
    }

    fn se_from(&self, mo: &Moments, k: usize) -> f64 {
        let lambda = self.model.estimation_instant();
        let tau_c = self.model.block_length();
        let mut acc = 0.0;
        for n in lambda..=tau_c {
            acc += (1.0 + self.terms(mo, k, n).sinr()).log2();
        }
        acc / tau_c as f64
    }

    /// Per-user SE over the block, with its jackknife standard error.
    pub fn se_per_user(&self, k: usize) -> (f64, f64) {
        (self.se_from(&self.total, k), self.jackknife(|m| self.se_from(m, k)))
    }

    /// Average per-user SE and its standard error.
    pub fn average_se(&self) -> (f64, f64) {
        let kc = self.model.num_users() as f64;
        let avg = |m: &Moments| (0..self.model.num_users()).map(|k| self.se_from(m, k)).sum::<f64>() / kc;
        (avg(&self.total), self.jackknife(avg))
    }
}

/// One-shot term estimate for `(k, n)`.
pub fn estimate_terms(model: &SystemModel, k: usize, n: usize, trials: usize, seed: u64) -> Result<McEstimate> {
    if n < model.estimation_instant() {
        return Err(Error::Domain(format!(
            "instant {n} precedes the estimation instant {}",
            model.estimation_instant()
        )));
    }
    Ok(run(model, seed, trials)?.estimate(k, n))
}

/// One-shot SINR estimate with standard error.
pub fn estimate_sinr(model: &SystemModel, k: usize, n: usize, trials: usize, seed: u64) -> Result<(f64, f64)> {
    run(model, seed, trials)?.sinr(k, n)
}
