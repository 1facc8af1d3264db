//! System geometry, large-scale fading, AP correlation and pilot assignment.

mod config;
mod pathloss;

pub use config::{
    Architecture, DataLagOrigin, NominalPhases, PathLossConfig, PhaseErrorKind, SystemConfig,
    Velocities, SPEED_OF_LIGHT,
};
pub use pathloss::ThreeSlope;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_sqrt, CMat, RngStream};
use crate::ris::Mode;

/// RNG stream ids reserved for scenario construction.
pub(crate) const STREAM_PLACEMENT: u64 = 0;
pub(crate) const STREAM_NOMINAL_PHASES: u64 = 1;

/// Fixed STAR-RIS location (m).
pub const RIS_POSITION: [f64; 2] = [500.0, 100.0];

/// Pilot indices and copilot groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PilotAssignment {
    /// 1-based pilot instant `t_k` of each user.
    pub instant: Vec<usize>,
    pub pilot_length: usize,
}

impl PilotAssignment {
    /// Round-robin assignment `t_k = 1 + ((k - 1) mod tau_p)`.
    pub fn round_robin(num_users: usize, pilot_length: usize) -> Self {
        assert!(pilot_length >= 1);
        Self {
            instant: (0..num_users).map(|k| 1 + k % pilot_length).collect(),
            pilot_length,
        }
    }

    /// Users sharing the pilot of `k`, including `k`.
    pub fn copilots(&self, k: usize) -> Vec<usize> {
        let t = self.instant[k];
        (0..self.instant.len())
            .filter(|&j| self.instant[j] == t)
            .collect()
    }

    pub fn shares_pilot(&self, a: usize, b: usize) -> bool {
        self.instant[a] == self.instant[b]
    }
}

/// One realized system: positions, fading, correlation and pilots.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: SystemConfig,
    pub ap_positions: Vec<[f64; 2]>,
    pub user_positions: Vec<[f64; 2]>,
    pub ris_position: [f64; 2],
    pub modes: Vec<Mode>,
    /// `beta_mk`, AP `m` to user `k` (M x K).
    pub beta_direct: DMatrix<f64>,
    /// `beta_m`, AP `m` to the RIS.
    pub beta_ap_ris: Vec<f64>,
    /// `beta_k`, user `k` to the RIS.
    pub beta_user_ris: Vec<f64>,
    /// Per-AP spatial correlation `R_{m,r}`.
    pub ap_corr: Vec<CMat>,
    pub ap_corr_sqrt: Vec<CMat>,
    pub pilots: PilotAssignment,
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Exponential correlation `[R]_{ij} = r^{|i-j|}`.
pub fn ap_correlation(antennas: usize, r: f64) -> Result<CMat> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::config("ap_corr_coeff", "must lie in [0, 1)"));
    }
    Ok(CMat::from_fn(antennas, antennas, |i, j| {
        num_complex::Complex64::new(r.powi((i as i32 - j as i32).abs()), 0.0)
    }))
}

/// User modes by region: reflection users first, then transmission users.
pub fn user_modes(cfg: &SystemConfig) -> Vec<Mode> {
    let mut modes = vec![Mode::Reflect; cfg.users_reflect];
    modes.extend(std::iter::repeat_n(Mode::Transmit, cfg.users_transmit));
    modes
}

/// Draws AP and user coordinates.
///
/// APs are uniform on `[-100, 100]^2`. Reflection users are uniform on
/// `[400, 600] x [0, 100)` and transmission users on `[450, 550] x (100, 150]`.
pub fn place_positions(cfg: &SystemConfig, rng: &mut RngStream) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let aps = (0..cfg.num_aps)
        .map(|_| [rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0)])
        .collect();
    let mut users = Vec::with_capacity(cfg.num_users());
    for _ in 0..cfg.users_reflect {
        users.push([rng.uniform(400.0, 600.0), rng.uniform(0.0, 100.0)]);
    }
    for _ in 0..cfg.users_transmit {
        users.push([rng.uniform(450.0, 550.0), rng.uniform_open_closed(100.0, 150.0)]);
    }
    (aps, users)
}

/// Large-scale fading of every link: `(beta_mk, beta_m, beta_k)`.
pub fn large_scale_fading(
    cfg: &SystemConfig,
    aps: &[[f64; 2]],
    users: &[[f64; 2]],
    ris: [f64; 2],
    rng: &mut RngStream,
) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let pl = ThreeSlope::new(&cfg.path_loss, cfg.carrier_hz);
    let shadow_ris = cfg.path_loss.shadow_ris_links;
    let mut direct = DMatrix::zeros(aps.len(), users.len());
    for (m, &a) in aps.iter().enumerate() {
        for (k, &u) in users.iter().enumerate() {
            direct[(m, k)] = pl.beta(distance(a, u), true, rng);
        }
    }
    let ap_ris = aps
        .iter()
        .map(|&a| pl.beta(distance(a, ris), shadow_ris, rng))
        .collect();
    let user_ris = users
        .iter()
        .map(|&u| pl.beta(distance(u, ris), shadow_ris, rng))
        .collect();
    (direct, ap_ris, user_ris)
}

impl Scenario {
    /// Places one random realization of the system described by `cfg`.
    pub fn place(cfg: &SystemConfig, rng: &mut RngStream) -> Result<Self> {
        cfg.validate()?;
        let (aps, users) = place_positions(cfg, rng);
        let (bd, bm, bk) = large_scale_fading(cfg, &aps, &users, RIS_POSITION, rng);
        Self::from_parts(cfg.clone(), aps, users, RIS_POSITION, bd, bm, bk)
    }

    /// Places the realization selected by `cfg.seed`.
    pub fn from_seed(cfg: &SystemConfig) -> Result<Self> {
        Self::place(cfg, &mut RngStream::new(cfg.seed, STREAM_PLACEMENT))
    }

    /// Assembles a scenario from explicit large-scale fading values.
    pub fn from_parts(
        config: SystemConfig,
        ap_positions: Vec<[f64; 2]>,
        user_positions: Vec<[f64; 2]>,
        ris_position: [f64; 2],
        beta_direct: DMatrix<f64>,
        beta_ap_ris: Vec<f64>,
        beta_user_ris: Vec<f64>,
    ) -> Result<Self> {
        config.validate()?;
        let (m, k) = (config.num_aps, config.num_users());
        if beta_direct.shape() != (m, k) || beta_ap_ris.len() != m || beta_user_ris.len() != k {
            return Err(Error::Domain(format!(
                "large-scale fading shapes do not match M={m}, K={k}"
            )));
        }
        let all_positive = beta_direct
            .iter()
            .chain(&beta_ap_ris)
            .chain(&beta_user_ris)
            .all(|b| b.is_finite() && *b > 0.0);
        if !all_positive {
            return Err(Error::Domain("large-scale fading must be positive".into()));
        }
        let r = ap_correlation(config.antennas_per_ap, config.ap_corr_coeff)?;
        let r_sqrt = hermitian_sqrt(&r)?;
        Ok(Self {
            modes: user_modes(&config),
            pilots: PilotAssignment::round_robin(k, config.pilot_length),
            ap_corr: vec![r; m],
            ap_corr_sqrt: vec![r_sqrt; m],
            config,
            ap_positions,
            user_positions,
            ris_position,
            beta_direct,
            beta_ap_ris,
            beta_user_ris,
        })
    }

    pub fn num_aps(&self) -> usize {
        self.config.num_aps
    }

    pub fn num_users(&self) -> usize {
        self.modes.len()
    }

    pub fn antennas(&self) -> usize {
        self.config.antennas_per_ap
    }
}
