use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Speed of light used for wavelengths and Doppler shifts (m/s).
pub const SPEED_OF_LIGHT: f64 = 3e8;

/// Phase-error law of the RIS phase-shifting network.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseErrorKind {
    None,
    Uniform,
    VonMises,
}

/// RIS arrangement under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// One STAR surface serving both sides.
    Star,
    /// Two adjacent single-mode surfaces with `L/2` elements each.
    Conventional,
    /// No RIS at all (plain cell-free).
    None,
}

/// Nominal phase design `theta_l` of each mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NominalPhases {
    Zero,
    /// Per-element uniform on `[0, 2 pi)`, drawn from the config seed.
    Random,
}

/// Instant from which the data-phase aging lag is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataLagOrigin {
    /// Lag `n`: the estimate acts as the initial state of the block.
    BlockStart,
    /// Lag `n - lambda`, counted from the estimation instant.
    EstimationInstant,
}

/// Either one speed for all users or one per user (km/h).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Velocities {
    All(f64),
    PerUser(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossConfig {
    /// Inner breakpoint (m).
    pub d0_m: f64,
    /// Outer breakpoint (m).
    pub d1_m: f64,
    pub ap_height_m: f64,
    pub user_height_m: f64,
    /// Log-normal shadowing standard deviation beyond `d1` (dB); 0 disables it.
    pub shadowing_std_db: f64,
    /// Apply shadowing to the AP-RIS and user-RIS links as well.
    pub shadow_ris_links: bool,
}

impl Default for PathLossConfig {
    fn default() -> Self {
        Self {
            d0_m: 10.0,
            d1_m: 50.0,
            ap_height_m: 15.0,
            user_height_m: 1.65,
            shadowing_std_db: 8.0,
            shadow_ris_links: false,
        }
    }
}

/// Every scalar parameter of one simulated system.
///
/// All fields are optional in JSON and fall back to the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub num_aps: usize,
    pub antennas_per_ap: usize,
    /// Total users; must equal `users_reflect + users_transmit` when given.
    pub num_users: Option<usize>,
    pub users_reflect: usize,
    pub users_transmit: usize,
    /// Total RIS elements; must equal `ris_cols * ris_rows` when given.
    pub ris_elements: Option<usize>,
    pub ris_cols: usize,
    pub ris_rows: usize,
    /// Element spacing in wavelengths (horizontal, vertical).
    pub spacing_h_wavelengths: f64,
    pub spacing_v_wavelengths: f64,
    pub pilot_power_dbm: f64,
    pub downlink_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub ris_noise_power_dbm: f64,
    pub carrier_hz: f64,
    pub instant_s: f64,
    pub block_length: usize,
    pub pilot_length: usize,
    pub velocities_kmh: Velocities,
    pub amplification: f64,
    pub phase_error: PhaseErrorKind,
    pub kappa: f64,
    /// Reflection power share `(u^r)^2` of every element.
    pub reflect_share: f64,
    pub ap_corr_coeff: f64,
    pub architecture: Architecture,
    pub nominal_phases: NominalPhases,
    pub data_lag_origin: DataLagOrigin,
    pub path_loss: PathLossConfig,
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            num_aps: 10,
            antennas_per_ap: 4,
            num_users: None,
            users_reflect: 5,
            users_transmit: 5,
            ris_elements: None,
            ris_cols: 8,
            ris_rows: 8,
            spacing_h_wavelengths: 0.25,
            spacing_v_wavelengths: 0.25,
            pilot_power_dbm: 20.0,
            downlink_power_dbm: 23.0,
            noise_power_dbm: -91.0,
            ris_noise_power_dbm: -100.0,
            carrier_hz: 1.9e9,
            instant_s: 1e-5,
            block_length: 182,
            pilot_length: 5,
            velocities_kmh: Velocities::All(10.0),
            amplification: 1.0,
            phase_error: PhaseErrorKind::Uniform,
            kappa: PI / 8.0,
            reflect_share: 0.5,
            ap_corr_coeff: 0.7,
            architecture: Architecture::Star,
            nominal_phases: NominalPhases::Zero,
            data_lag_origin: DataLagOrigin::BlockStart,
            path_loss: PathLossConfig::default(),
            seed: 1,
        }
    }
}

impl SystemConfig {
    /// Parses a JSON document and validates it.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: SystemConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding.
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn num_users(&self) -> usize {
        self.users_reflect + self.users_transmit
    }

    pub fn num_elements(&self) -> usize {
        self.ris_cols * self.ris_rows
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Estimation instant `lambda = tau_p + 1`.
    pub fn estimation_instant(&self) -> usize {
        self.pilot_length + 1
    }

    pub fn velocity_kmh(&self, k: usize) -> f64 {
        match &self.velocities_kmh {
            Velocities::All(v) => *v,
            Velocities::PerUser(v) => v[k],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_users();
        if self.num_aps == 0 {
            return Err(Error::config("num_aps", "must be at least 1"));
        }
        if self.antennas_per_ap == 0 {
            return Err(Error::config("antennas_per_ap", "must be at least 1"));
        }
        if k == 0 {
            return Err(Error::config("users_reflect", "need at least one user in total"));
        }
        if let Some(n) = self.num_users {
            if n != k {
                return Err(Error::config(
                    "num_users",
                    format!("{n} != users_reflect + users_transmit = {k}"),
                ));
            }
        }
        if self.architecture != Architecture::None && (self.ris_cols == 0 || self.ris_rows == 0) {
            return Err(Error::config("ris_cols", "RIS grid dimensions must be positive"));
        }
        if let Some(l) = self.ris_elements {
            if l != self.num_elements() {
                return Err(Error::config(
                    "ris_elements",
                    format!("{l} != ris_cols * ris_rows = {}", self.num_elements()),
                ));
            }
        }
        if self.architecture == Architecture::Conventional && !self.ris_rows.is_multiple_of(2) {
            return Err(Error::config(
                "ris_rows",
                "conventional RIS splits the rows in half; need an even count",
            ));
        }
        for (field, v) in [
            ("spacing_h_wavelengths", self.spacing_h_wavelengths),
            ("spacing_v_wavelengths", self.spacing_v_wavelengths),
            ("carrier_hz", self.carrier_hz),
            ("instant_s", self.instant_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(field, "must be finite and positive"));
            }
        }
        for (field, v) in [
            ("pilot_power_dbm", self.pilot_power_dbm),
            ("downlink_power_dbm", self.downlink_power_dbm),
            ("noise_power_dbm", self.noise_power_dbm),
            ("ris_noise_power_dbm", self.ris_noise_power_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::config(field, "must be finite"));
            }
        }
        if self.pilot_length == 0 {
            return Err(Error::config("pilot_length", "must be at least 1"));
        }
        if self.estimation_instant() > self.block_length {
            return Err(Error::config(
                "block_length",
                format!(
                    "must be >= pilot_length + 1 = {}",
                    self.estimation_instant()
                ),
            ));
        }
        match &self.velocities_kmh {
            Velocities::All(v) if !(v.is_finite() && *v >= 0.0) => {
                return Err(Error::config("velocities_kmh", "must be finite and >= 0"));
            }
            Velocities::PerUser(vs) => {
                if vs.len() != k {
                    return Err(Error::config(
                        "velocities_kmh",
                        format!("expected {k} entries, got {}", vs.len()),
                    ));
                }
                if vs.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::config("velocities_kmh", "must be finite and >= 0"));
                }
            }
            _ => {}
        }
        if !(self.amplification.is_finite() && self.amplification >= 1.0) {
            return Err(Error::config("amplification", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.reflect_share) {
            return Err(Error::config("reflect_share", "must lie in [0, 1]"));
        }
        if !(0.0..1.0).contains(&self.ap_corr_coeff) {
            return Err(Error::config("ap_corr_coeff", "must lie in [0, 1)"));
        }
        match self.phase_error {
            PhaseErrorKind::None => {}
            PhaseErrorKind::Uniform => {
                if !(0.0..=PI).contains(&self.kappa) {
                    return Err(Error::config("kappa", "uniform phase error needs 0 <= kappa <= pi"));
                }
            }
            PhaseErrorKind::VonMises => {
                if !(self.kappa.is_finite() && self.kappa >= 0.0) {
                    return Err(Error::config("kappa", "von Mises concentration must be >= 0"));
                }
            }
        }
        let pl = &self.path_loss;
        if !(pl.d0_m > 0.0 && pl.d1_m > pl.d0_m) {
            return Err(Error::config("path_loss.d1_m", "need 0 < d0_m < d1_m"));
        }
        if !(pl.ap_height_m > 0.0 && pl.user_height_m > 0.0) {
            return Err(Error::config("path_loss.ap_height_m", "heights must be positive"));
        }
        if !(pl.shadowing_std_db.is_finite() && pl.shadowing_std_db >= 0.0) {
            return Err(Error::config("path_loss.shadowing_std_db", "must be >= 0"));
        }
        Ok(())
    }
}
