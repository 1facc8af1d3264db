//! Scalar special functions: sinc, J0 and the ratio I1/I0.
//!
//! Small arguments are evaluated from the power series, where every term is
//! positive (I0, I1) or the cancellation is bounded (J0 up to `J0_SERIES_MAX`).
//! Large arguments use the Hankel asymptotic expansions truncated at their
//! smallest term.

use std::f64::consts::PI;

const J0_SERIES_MAX: f64 = 12.0;
const I_SERIES_MAX: f64 = 20.0;

/// Normalized sinc, `sin(pi a) / (pi a)`, with `sinc(0) = 1`.
pub fn sinc(a: f64) -> f64 {
    let x = PI * a;
    if x.abs() < 1e-8 {
        // sin(x)/x = 1 - x^2/6 + O(x^4)
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Zeroth-order Bessel function of the first kind.
///
/// Absolute error is below 1e-10 on `[0, 1e3]`.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= J0_SERIES_MAX {
        j0_series(x)
    } else {
        j0_asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    // sum_k (-1)^k (x^2/4)^k / (k!)^2
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-3) {
            break;
        }
    }
    sum
}

fn j0_asymptotic(x: f64) -> f64 {
    // J0(x) = sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)]
    // with the Hankel series for nu = 0, truncated at the smallest term.
    let (p, q) = hankel_pq(0.0, x);
    let chi = x - 0.25 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Hankel P and Q series for order `nu`.
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! (8x)^k)
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..400 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() >= last {
            break;
        }
        last = a.abs();
        // k odd feeds Q with signs +,-,+,...; k even feeds P with -,+,-,...
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// I0(x) e^{-x} and I1(x) e^{-x} for x >= 0.
fn scaled_i0_i1(x: f64) -> (f64, f64) {
    if x <= I_SERIES_MAX {
        let q = 0.25 * x * x;
        let mut t0 = 1.0;
        let mut t1 = 0.5 * x;
        let mut s0 = t0;
        let mut s1 = t1;
        for k in 1..300 {
            let kf = k as f64;
            t0 *= q / (kf * kf);
            t1 *= q / (kf * (kf + 1.0));
            s0 += t0;
            s1 += t1;
            if t0 < 1e-18 * s0 && t1 < 1e-18 * s1.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        let e = (-x).exp();
        (s0 * e, s1 * e)
    } else {
        (
            modified_asymptotic(0.0, x),
            modified_asymptotic(1.0, x),
        )
    }
}

/// e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k.
fn modified_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut sum = 1.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..400 {
        let odd = (2 * k - 1) as f64;
        a *= -(mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() >= last {
            break;
        }
        last = a.abs();
        sum += a;
        if a.abs() < 1e-17 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// `I1(kappa) / I0(kappa)`, the mean resultant length of a von Mises law.
///
/// Returns a value in `[0, 1)`; `kappa` is clamped at 0 from below.
pub fn bessel_i_ratio(kappa: f64) -> f64 {
    let k = kappa.max(0.0);
    if k == 0.0 {
        return 0.0;
    }
    if k.is_infinite() {
        return 1.0;
    }
    let (i0, i1) = scaled_i0_i1(k);
    (i1 / i0).min(1.0 - f64::EPSILON)
}
