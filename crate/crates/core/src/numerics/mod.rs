//! Special functions, Hermitian matrix utilities and seeded sampling.

mod linalg;
mod rng;
mod special;

pub use linalg::*;
pub use rng::{sample_kronecker_gaussian, KroneckerSampler, RngStream};
pub use special::{bessel_i_ratio, bessel_j0, sinc};

/// dBm to linear milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Linear milliwatts to dBm.
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
