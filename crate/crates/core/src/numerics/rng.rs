//! Seeded, splittable random streams and Gaussian sampling helpers.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{hermitian_sqrt, CMat, CVec};
use crate::error::Result;

/// A deterministic random stream identified by `(seed, stream_id)`.
///
/// Streams with the same pair replay the same draws; different stream ids
/// select disjoint ChaCha keystreams.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    /// Uniform draw on `(lo, hi]`.
    pub fn uniform_open_closed(&mut self, lo: f64, hi: f64) -> f64 {
        hi - (hi - lo) * self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One `CN(0, variance)` draw.
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let s = (0.5 * variance).sqrt();
        Complex64::new(s * self.standard_normal(), s * self.standard_normal())
    }

    /// Vector of i.i.d. `CN(0, variance)` entries.
    pub fn complex_gaussian_vec(&mut self, len: usize, variance: f64) -> CVec {
        CVec::from_fn(len, |_, _| self.complex_gaussian(variance))
    }

    /// Matrix of i.i.d. `CN(0, variance)` entries, filled column by column.
    pub fn complex_gaussian_mat(&mut self, rows: usize, cols: usize, variance: f64) -> CMat {
        let mut m = CMat::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = self.complex_gaussian(variance);
            }
        }
        m
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Draws `Rr^{1/2} V Rt^{1/2}` with `V` i.i.d. `CN(0, 1)`.
///
/// The column-stacked draw has covariance `Rt^T (x) Rr`.
pub fn sample_kronecker_gaussian(rr: &CMat, rt: &CMat, rng: &mut RngStream) -> Result<CMat> {
    Ok(KroneckerSampler::new(rr, rt)?.sample(rng))
}

/// Cached square roots for repeated Kronecker draws.
#[derive(Clone, Debug)]
pub struct KroneckerSampler {
    rr_sqrt: CMat,
    rt_sqrt: CMat,
}

impl KroneckerSampler {
    pub fn new(rr: &CMat, rt: &CMat) -> Result<Self> {
        Ok(Self {
            rr_sqrt: hermitian_sqrt(rr)?,
            rt_sqrt: hermitian_sqrt(rt)?,
        })
    }

    pub fn from_sqrt(rr_sqrt: CMat, rt_sqrt: CMat) -> Self {
        Self { rr_sqrt, rt_sqrt }
    }

    pub fn sample(&self, rng: &mut RngStream) -> CMat {
        let v = rng.complex_gaussian_mat(self.rr_sqrt.nrows(), self.rt_sqrt.nrows(), 1.0);
        &self.rr_sqrt * v * &self.rt_sqrt
    }
}
