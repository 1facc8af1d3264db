//! Three-slope path loss with log-normal shadowing on the far slope.
//!
//! Distances enter in kilometres; the fixed term is the COST-231 Hata form
//! with the carrier in MHz.

use super::config::PathLossConfig;
use crate::numerics::{db_to_linear, RngStream};

#[derive(Clone, Debug)]
pub struct ThreeSlope {
    fixed_db: f64,
    d0_km: f64,
    d1_km: f64,
    shadowing_std_db: f64,
}

impl ThreeSlope {
    pub fn new(cfg: &PathLossConfig, carrier_hz: f64) -> Self {
        let f_mhz = carrier_hz / 1e6;
        let lf = f_mhz.log10();
        let fixed_db = 46.3 + 33.9 * lf
            - 13.82 * cfg.ap_height_m.log10()
            - (1.1 * lf - 0.7) * cfg.user_height_m
            + (1.56 * lf - 0.8);
        Self {
            fixed_db,
            d0_km: cfg.d0_m / 1e3,
            d1_km: cfg.d1_m / 1e3,
            shadowing_std_db: cfg.shadowing_std_db,
        }
    }

    /// The constant `L` of the model (dB).
    pub fn fixed_loss_db(&self) -> f64 {
        self.fixed_db
    }

    /// Path gain in dB (negative) at planar distance `d_m` metres.
    pub fn gain_db(&self, d_m: f64) -> f64 {
        let d = (d_m / 1e3).max(self.d0_km);
        if d > self.d1_km {
            -self.fixed_db - 35.0 * d.log10()
        } else {
            -self.fixed_db - 15.0 * self.d1_km.log10() - 20.0 * d.log10()
        }
    }

    /// Whether shadowing applies at this distance.
    pub fn is_far(&self, d_m: f64) -> bool {
        d_m / 1e3 > self.d1_km
    }

    /// Large-scale fading coefficient (linear). Shadowing is drawn from
    /// `rng` only when `shadow` is set and the link is on the far slope.
    pub fn beta(&self, d_m: f64, shadow: bool, rng: &mut RngStream) -> f64 {
        let mut db = self.gain_db(d_m);
        if shadow && self.shadowing_std_db > 0.0 && self.is_far(d_m) {
            db += self.shadowing_std_db * rng.standard_normal();
        }
        db_to_linear(db)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> ThreeSlope {
        ThreeSlope::new(&PathLossConfig::default(), 1.9e9)
    }

    #[test]
    fn continuous_at_breakpoints() {
        let pl = model();
        let cfg = PathLossConfig::default();
        for d in [cfg.d0_m, cfg.d1_m] {
            let d = d / 1e3;
            // both neighbouring branches evaluated at the breakpoint
            let far = -pl.fixed_db - 35.0 * d.log10();
            let mid = -pl.fixed_db - 15.0 * pl.d1_km.log10() - 20.0 * d.log10();
            let near = -pl.fixed_db - 15.0 * pl.d1_km.log10() - 20.0 * pl.d0_km.log10();
            if (d - pl.d1_km).abs() < 1e-15 {
                assert!(((far - mid) / mid).abs() < 1e-9);
            } else {
                assert!(((near - mid) / mid).abs() < 1e-9);
            }
        }
        let b = |d: f64| db_to_linear(pl.gain_db(d));
        for d in [10.0, 50.0] {
            let lo = b(d * (1.0 - 1e-12));
            let hi = b(d * (1.0 + 1e-12));
            assert!(((lo - hi) / lo).abs() < 1e-9, "jump at {d}");
        }
    }

    #[test]
    fn decreasing_with_distance() {
        let pl = model();
        let mut last = pl.gain_db(10.0);
        for i in 1..2000 {
            let d = 10.0 + i as f64 * 0.5;
            let g = pl.gain_db(d);
            assert!(g < last, "not decreasing at {d}");
            last = g;
        }
        // flat inside d0, including coincident points
        assert_eq!(pl.gain_db(0.0), pl.gain_db(10.0));
        assert_eq!(pl.gain_db(3.0), pl.gain_db(10.0));
    }

    #[test]
    fn cost_hata_constant() {
        // 46.3 + 33.9 log10(1900) - 13.82 log10(15) - (1.1 log10(1900) - 0.7) 1.65
        //   + (1.56 log10(1900) - 0.8)
        assert!((model().fixed_loss_db() - 140.7151).abs() < 1e-3);
    }

    #[test]
    fn shadowing_off_is_seed_independent() {
        let mut cfg = PathLossConfig::default();
        cfg.shadowing_std_db = 0.0;
        let pl = ThreeSlope::new(&cfg, 1.9e9);
        let a = pl.beta(400.0, true, &mut RngStream::new(1, 0));
        let b = pl.beta(400.0, true, &mut RngStream::new(2, 0));
        assert_eq!(a, b);
    }
}
