//! RIS element geometry, operating coefficients, phase errors and the
//! second-order matrices derived from them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    bessel_i_ratio, diag_part, hermitian_part, hermitian_sqrt, sinc, trace_product, CMat, CVec,
    RngStream,
};
use crate::scenario::{Architecture, NominalPhases, PhaseErrorKind, SystemConfig, STREAM_NOMINAL_PHASES};

/// Operating mode seen by a user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Reflect,
    Transmit,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Reflect, Mode::Transmit];

    pub fn index(self) -> usize {
        match self {
            Mode::Reflect => 0,
            Mode::Transmit => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::Reflect => "r",
            Mode::Transmit => "t",
        }
    }
}

/// Distribution of the per-element phase error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseErrorModel {
    pub kind: PhaseErrorKind,
    pub kappa: f64,
}

impl PhaseErrorModel {
    pub fn new(kind: PhaseErrorKind, kappa: f64) -> Result<Self> {
        let ok = match kind {
            PhaseErrorKind::None => true,
            PhaseErrorKind::Uniform => (0.0..=PI).contains(&kappa),
            PhaseErrorKind::VonMises => kappa.is_finite() && kappa >= 0.0,
        };
        if !ok {
            return Err(Error::config("kappa", format!("{kappa} is out of range for {kind:?}")));
        }
        Ok(Self { kind, kappa })
    }

    pub fn none() -> Self {
        Self {
            kind: PhaseErrorKind::None,
            kappa: 0.0,
        }
    }

    /// Mean resultant length `E{e^{i err}}`.
    pub fn phi(&self) -> f64 {
        match self.kind {
            PhaseErrorKind::None => 1.0,
            PhaseErrorKind::Uniform => {
                if self.kappa < 1e-8 {
                    1.0 - self.kappa * self.kappa / 6.0
                } else {
                    self.kappa.sin() / self.kappa
                }
            }
            PhaseErrorKind::VonMises => bessel_i_ratio(self.kappa),
        }
    }

    /// One zero-mean phase-error draw (rad).
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self.kind {
            PhaseErrorKind::None => 0.0,
            PhaseErrorKind::Uniform => rng.uniform(-self.kappa, self.kappa),
            PhaseErrorKind::VonMises => sample_von_mises(self.kappa, rng),
        }
    }

    /// Diagonal of the phase-error matrix: `L` unit-modulus entries.
    pub fn sample_diag(&self, len: usize, rng: &mut RngStream) -> CVec {
        CVec::from_fn(len, |_, _| Complex64::from_polar(1.0, self.sample(rng)))
    }
}

/// Best-Fisher rejection sampler for the zero-mean von Mises law.
pub fn sample_von_mises(kappa: f64, rng: &mut RngStream) -> f64 {
    if kappa < 1e-9 {
        return rng.uniform(-PI, PI);
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let z = (PI * rng.uniform(0.0, 1.0)).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2 = rng.uniform_open_closed(0.0, 1.0);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let angle = f.clamp(-1.0, 1.0).acos();
            return if rng.uniform(0.0, 1.0) < 0.5 { -angle } else { angle };
        }
    }
}

/// `[R]_{xy} = sinc(2 |u_x - u_y| / wavelength)` on a `cols x rows` grid.
///
/// Element `x` (0-based) sits at column `x mod cols`, row `x div cols`.
pub fn build_ris_correlation(
    cols: usize,
    rows: usize,
    spacing_h: f64,
    spacing_v: f64,
    wavelength: f64,
) -> CMat {
    let n = cols * rows;
    let pos: Vec<(f64, f64)> = (0..n)
        .map(|x| ((x % cols) as f64 * spacing_h, (x / cols) as f64 * spacing_v))
        .collect();
    CMat::from_fn(n, n, |i, j| {
        let d = ((pos[i].0 - pos[j].0).powi(2) + (pos[i].1 - pos[j].1).powi(2)).sqrt();
        Complex64::new(sinc(2.0 * d / wavelength), 0.0)
    })
}

/// One physical surface with its per-mode coefficients.
#[derive(Clone, Debug)]
pub struct RisSurface {
    pub cols: usize,
    pub rows: usize,
    /// Element area `d_h * d_v` (m^2).
    pub area: f64,
    pub corr: CMat,
    pub corr_sqrt: CMat,
    /// Per-element amplification power `alpha`.
    pub amplification: f64,
    /// Amplitude `u` of each mode, shared by all elements.
    pub amplitude: [f64; 2],
    /// Nominal phase of each element per mode (rad).
    pub phases: [Vec<f64>; 2],
}

impl RisSurface {
    pub fn new(
        cols: usize,
        rows: usize,
        spacing_h: f64,
        spacing_v: f64,
        wavelength: f64,
        amplification: f64,
        reflect_share: f64,
        phases: [Vec<f64>; 2],
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflect_share) {
            return Err(Error::config("reflect_share", "must lie in [0, 1]"));
        }
        if !(amplification >= 1.0) {
            return Err(Error::config("amplification", "must be >= 1"));
        }
        let n = cols * rows;
        if phases.iter().any(|p| p.len() != n) {
            return Err(Error::Domain(format!("expected {n} nominal phases per mode")));
        }
        let amplitude = [reflect_share.sqrt(), (1.0 - reflect_share).sqrt()];
        let split = amplitude[0].powi(2) + amplitude[1].powi(2);
        assert!((split - 1.0).abs() < 1e-12, "energy split violated: {split}");
        let corr = build_ris_correlation(cols, rows, spacing_h, spacing_v, wavelength);
        let corr_sqrt = hermitian_sqrt(&corr)?;
        Ok(Self {
            cols,
            rows,
            area: spacing_h * spacing_v,
            corr,
            corr_sqrt,
            amplification,
            amplitude,
            phases,
        })
    }

    pub fn elements(&self) -> usize {
        self.cols * self.rows
    }

    /// Diagonal of the nominal coefficient matrix `sqrt(alpha) u e^{i theta}`.
    pub fn nominal_diag(&self, mode: Mode) -> CVec {
        let g = self.amplification.sqrt() * self.amplitude[mode.index()];
        let ph = &self.phases[mode.index()];
        CVec::from_fn(self.elements(), |i, _| Complex64::from_polar(g, ph[i]))
    }

    pub fn is_active(&self, mode: Mode) -> bool {
        self.amplitude[mode.index()] > 0.0
    }
}

/// `D M D^H` for a diagonal `D` given by its entries.
fn diag_congruence(d: &CVec, m: &CMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| d[i] * m[(i, j)] * d[j].conj())
}

/// `E{Theta R Theta^H} = D (phi^2 R + (1 - phi^2) R o I) D^H`.
pub fn build_r_bar(surface: &RisSurface, mode: Mode, phi: f64) -> CMat {
    let r = &surface.corr;
    let inner = r.scale(phi * phi) + diag_part(r).scale(1.0 - phi * phi);
    hermitian_part(&diag_congruence(&surface.nominal_diag(mode), &inner))
}

/// Returns `(T, Gamma)` with `T = A^2 R^{1/2} Rbar R^{1/2}` and
/// `Gamma = A R^{1/2} Theta Theta^H R^{1/2}` at the nominal coefficients.
pub fn build_t_and_gamma(surface: &RisSurface, mode: Mode, r_bar: &CMat) -> (CMat, CMat) {
    let a = surface.area;
    let s = &surface.corr_sqrt;
    let t = hermitian_part(&(s * r_bar * s).scale(a * a));
    let d = surface.nominal_diag(mode);
    let dd = CMat::from_diagonal(&d.map(|z| Complex64::new(z.norm_sqr(), 0.0)));
    let gamma = hermitian_part(&(s * dd * s).scale(a));
    (t, gamma)
}

/// Expected `tr(T T)` for two users of the same mode sharing one error draw.
pub fn t_product_same_mode(surface: &RisSurface, mode: Mode, r_bar: &CMat) -> f64 {
    let a4 = surface.area.powi(4);
    let r = &surface.corr;
    let s = &surface.corr_sqrt;
    let x = r_bar * r * r_bar;
    let d = surface.nominal_diag(mode).map(|z| z.conj());
    let y = diag_congruence(&d, &(r * r_bar * r));
    let inner = &x - diag_part(&x) + diag_part(&y);
    (s * inner * s).scale(a4).trace().re
}

/// Derived matrices of one surface in one mode.
#[derive(Clone, Debug)]
pub struct ModeMatrices {
    pub r_bar: CMat,
    pub t: CMat,
    pub gamma: CMat,
    pub tr_t: f64,
    pub tr_gamma: f64,
}

impl ModeMatrices {
    pub fn new(surface: &RisSurface, mode: Mode, phi: f64) -> Self {
        let r_bar = build_r_bar(surface, mode, phi);
        let (t, gamma) = build_t_and_gamma(surface, mode, &r_bar);
        Self {
            tr_t: t.trace().re.max(0.0),
            tr_gamma: gamma.trace().re.max(0.0),
            r_bar,
            t,
            gamma,
        }
    }
}

/// All surfaces of the deployment and the statistics the SINR needs.
#[derive(Clone, Debug)]
pub struct RisModel {
    pub architecture: Architecture,
    pub phase_error: PhaseErrorModel,
    pub surfaces: Vec<RisSurface>,
    /// Surface serving each mode, if any.
    pub serving: [Option<usize>; 2],
    /// Per surface, per mode.
    pub mats: Vec<[ModeMatrices; 2]>,
    t_products: [[f64; 2]; 2],
    t_gamma: [f64; 2],
    noise_trace: f64,
}

impl RisModel {
    /// Builds the deployment described by `cfg`.
    pub fn from_config(cfg: &SystemConfig) -> Result<Self> {
        let phase_error = PhaseErrorModel::new(cfg.phase_error, cfg.kappa)?;
        let wl = cfg.wavelength();
        let (dh, dv) = (cfg.spacing_h_wavelengths * wl, cfg.spacing_v_wavelengths * wl);
        let mut rng = RngStream::new(cfg.seed, STREAM_NOMINAL_PHASES);
        let mut phases = |n: usize| -> [Vec<f64>; 2] {
            match cfg.nominal_phases {
                NominalPhases::Zero => [vec![0.0; n], vec![0.0; n]],
                NominalPhases::Random => {
                    let r = (0..n).map(|_| rng.uniform(0.0, 2.0 * PI)).collect();
                    let t = (0..n).map(|_| rng.uniform(0.0, 2.0 * PI)).collect();
                    [r, t]
                }
            }
        };
        let (c, r, a) = (cfg.ris_cols, cfg.ris_rows, cfg.amplification);
        let (surfaces, serving) = match cfg.architecture {
            Architecture::None => (vec![], [None, None]),
            Architecture::Star => {
                let s = RisSurface::new(c, r, dh, dv, wl, a, cfg.reflect_share, phases(c * r))?;
                (vec![s], [Some(0), Some(0)])
            }
            Architecture::Conventional => {
                let half = r / 2;
                let refl = RisSurface::new(c, half, dh, dv, wl, a, 1.0, phases(c * half))?;
                let tran = RisSurface::new(c, half, dh, dv, wl, a, 0.0, phases(c * half))?;
                (vec![refl, tran], [Some(0), Some(1)])
            }
        };
        Self::new(cfg.architecture, phase_error, surfaces, serving)
    }

    pub fn new(
        architecture: Architecture,
        phase_error: PhaseErrorModel,
        surfaces: Vec<RisSurface>,
        serving: [Option<usize>; 2],
    ) -> Result<Self> {
        if serving.iter().flatten().any(|&s| s >= surfaces.len()) {
            return Err(Error::Domain("serving surface index out of range".into()));
        }
        let phi = phase_error.phi();
        let mats: Vec<[ModeMatrices; 2]> = surfaces
            .iter()
            .map(|s| Mode::ALL.map(|w| ModeMatrices::new(s, w, phi)))
            .collect();
        let noise_trace = mats.iter().flatten().map(|m| m.tr_gamma).sum();

        let mut t_products = [[0.0; 2]; 2];
        let mut t_gamma = [0.0; 2];
        for a in Mode::ALL {
            let Some(sa) = serving[a.index()] else { continue };
            let ma = &mats[sa][a.index()];
            let gamma_sum = &mats[sa][0].gamma + &mats[sa][1].gamma;
            t_gamma[a.index()] = trace_product(&ma.t, &gamma_sum).re;
            for b in Mode::ALL {
                let Some(sb) = serving[b.index()] else { continue };
                if sa != sb {
                    continue;
                }
                t_products[a.index()][b.index()] = if a == b {
                    t_product_same_mode(&surfaces[sa], a, &ma.r_bar)
                } else {
                    trace_product(&ma.t, &mats[sb][b.index()].t).re
                };
            }
        }
        Ok(Self {
            architecture,
            phase_error,
            surfaces,
            serving,
            mats,
            t_products,
            t_gamma,
            noise_trace,
        })
    }

    fn serving_mats(&self, mode: Mode) -> Option<&ModeMatrices> {
        self.serving[mode.index()].map(|s| &self.mats[s][mode.index()])
    }

    /// `tr(T)` of the surface and mode serving `mode` users; 0 without RIS.
    pub fn tr_t(&self, mode: Mode) -> f64 {
        self.serving_mats(mode).map_or(0.0, |m| m.tr_t)
    }

    /// `tr(Gamma)` seen by a user of `mode` (downlink dynamic noise).
    pub fn tr_gamma(&self, mode: Mode) -> f64 {
        self.serving_mats(mode).map_or(0.0, |m| m.tr_gamma)
    }

    /// `E{tr(T_a T_b)}`, zero for users on different surfaces.
    pub fn t_product(&self, a: Mode, b: Mode) -> f64 {
        self.t_products[a.index()][b.index()]
    }

    /// `tr(T_a (Gamma_r + Gamma_t))` over the surface serving `a`.
    pub fn t_gamma(&self, a: Mode) -> f64 {
        self.t_gamma[a.index()]
    }

    /// Sum of `tr(Gamma)` over every surface and mode, as seen by the APs.
    pub fn noise_trace(&self) -> f64 {
        self.noise_trace
    }

    pub fn phi(&self) -> f64 {
        self.phase_error.phi()
    }
}
