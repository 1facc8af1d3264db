//! Complex Hermitian matrix helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Relative tolerance used for Hermitian and PSD checks.
pub const PSD_TOL: f64 = 1e-9;

/// Embeds a real matrix into the complex field.
pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Largest absolute entry, used as the scale for relative tolerances.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_hermitian(m: &CMat, rel_tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > rel_tol * scale {
                return false;
            }
        }
    }
    true
}

/// Symmetrizes `m` as `(m + m^H) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Returns `true` when `m` is Hermitian and its smallest eigenvalue is no
/// lower than `-rel_tol * max|eigenvalue|`.
pub fn is_psd(m: &CMat, rel_tol: f64) -> bool {
    if !is_hermitian(m, rel_tol) {
        return false;
    }
    let ev = hermitian_eigenvalues(m);
    let scale = ev.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    ev.first().is_none_or(|&lo| lo >= -rel_tol * scale)
}

/// Principal square root of a Hermitian positive semi-definite matrix.
///
/// Eigenvalues in `[-tol, 0)` with `tol = 1e-9 * max|eigenvalue|` are
/// clamped to zero; anything more negative is a domain error.
pub fn hermitian_sqrt(m: &CMat) -> Result<CMat> {
    if !m.is_square() {
        return Err(Error::Domain(format!(
            "hermitian_sqrt needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !is_hermitian(m, PSD_TOL) {
        return Err(Error::Domain("hermitian_sqrt input is not Hermitian".into()));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let mut roots = DVector::<Complex64>::zeros(eig.eigenvalues.len());
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l < -PSD_TOL * scale {
            return Err(Error::Domain(format!(
                "hermitian_sqrt input has negative eigenvalue {l:e}"
            )));
        }
        roots[i] = Complex64::new(l.max(0.0).sqrt(), 0.0);
    }
    let u = &eig.eigenvectors;
    let s = u * CMat::from_diagonal(&roots) * u.adjoint();
    Ok(hermitian_part(&s))
}

/// Inverse of a Hermitian positive definite matrix via Cholesky.
///
/// Fails when the condition number exceeds `1e12`. A failed factorization is
/// retried once with a diagonal jitter of `1e-12 * tr(m) / n`.
pub fn hermitian_inverse(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    if !m.is_square() || n == 0 {
        return Err(Error::Domain("hermitian_inverse needs a non-empty square matrix".into()));
    }
    let h = hermitian_part(m);
    let ev = hermitian_eigenvalues(&h);
    let (lo, hi) = (ev[0], ev[n - 1]);
    if !(hi > 0.0) || !(lo > 0.0) || hi / lo > 1e12 {
        return Err(Error::Numerical(format!(
            "matrix is singular or ill-conditioned (eigenvalues in [{lo:e}, {hi:e}])"
        )));
    }
    let chol = match h.clone().cholesky() {
        Some(c) => c,
        None => {
            let jitter = 1e-12 * h.trace().re / n as f64;
            let shifted = &h + CMat::identity(n, n).scale(jitter);
            shifted
                .cholesky()
                .ok_or_else(|| Error::Numerical("Cholesky factorization failed".into()))?
        }
    };
    Ok(hermitian_part(&chol.inverse()))
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vec_columns(m: &CMat) -> CVec {
    CVec::from_iterator(m.len(), m.iter().copied())
}

/// Frobenius-norm relative difference `||a - b|| / ||b||`.
pub fn rel_frobenius(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Hadamard product with the identity: keeps only the diagonal.
pub fn diag_part(m: &CMat) -> CMat {
    CMat::from_diagonal(&m.diagonal())
}
