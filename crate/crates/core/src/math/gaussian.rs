use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};

use super::special::erf_diff;
use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Density of the standard normal distribution.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn check_symmetric(cov: &DMatrix<f64>) -> Result<()> {
    if !cov.is_square() {
        return Err(Error::NotSpd);
    }
    let scale = cov.amax().max(f64::MIN_POSITIVE);
    for i in 0..cov.nrows() {
        for j in 0..i {
            if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::NotSpd);
            }
        }
    }
    Ok(())
}

/// Multivariate normal density N(t; mean, cov), factorizing `cov` by Cholesky.
pub fn gaussian_pdf(t: &DVector<f64>, mean: &DVector<f64>, cov: &DMatrix<f64>) -> Result<f64> {
    let d = t.len();
    if mean.len() != d || cov.nrows() != d {
        return Err(Error::DimensionMismatch(format!(
            "point has dimension {d}, mean {}, covariance {}x{}",
            mean.len(),
            cov.nrows(),
            cov.ncols()
        )));
    }
    check_symmetric(cov)?;
    let chol = cov.clone().cholesky().ok_or(Error::NotSpd)?;
    let diff = t - mean;
    let z = chol.l().solve_lower_triangular(&diff).ok_or(Error::NotSpd)?;
    let log_det: f64 = chol.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
    let quad = z.norm_squared();
    Ok((-0.5 * (quad + log_det + d as f64 * (2.0 * PI).ln())).exp())
}

/// Bivariate normal density, the fixed-size fast path of [`gaussian_pdf`].
pub fn gaussian_pdf_2d(t: &Vector2<f64>, mean: &Vector2<f64>, cov: &Matrix2<f64>) -> Result<f64> {
    let det = cov[(0, 0)] * cov[(1, 1)] - cov[(0, 1)] * cov[(1, 0)];
    let scale = cov.amax().max(f64::MIN_POSITIVE);
    if (cov[(0, 1)] - cov[(1, 0)]).abs() > 1e-12 * scale || !(cov[(0, 0)] > 0.0) || !(det > 0.0) {
        return Err(Error::NotSpd);
    }
    let d = t - mean;
    // cov^{-1} = adj(cov) / det
    let quad = (cov[(1, 1)] * d[0] * d[0] - 2.0 * cov[(0, 1)] * d[0] * d[1] + cov[(0, 0)] * d[1] * d[1]) / det;
    Ok((-0.5 * quad).exp() / (2.0 * PI * det.sqrt()))
}

/// Symmetric (spectral) square root of a 2x2 SPD matrix.
pub fn spd_sqrt_2d(m: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (m[(0, 1)] - m[(1, 0)]).abs() > 1e-12 * scale {
        return Err(Error::NotSpd);
    }
    let eig = SymmetricEigen::new(*m);
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NotSpd);
    }
    let roots = Matrix2::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = eig.eigenvectors * roots * eig.eigenvectors.transpose();
    Ok(0.5 * (root + root.transpose()))
}

/// Moments `m_k = int_u^v s^k phi(s) ds`, k = 0..3, of the standard normal
/// density restricted to `[u, v]`.
pub fn truncated_std_moments(u: f64, v: f64) -> [f64; 4] {
    let (pu, pv) = (std_normal_pdf(u), std_normal_pdf(v));
    // s * phi(s) -> 0 in the tails; guard infinite limits
    let upu = if u.is_finite() { u * pu } else { 0.0 };
    let vpv = if v.is_finite() { v * pv } else { 0.0 };
    let u2pu = if u.is_finite() { u * u * pu } else { 0.0 };
    let v2pv = if v.is_finite() { v * v * pv } else { 0.0 };
    let m0 = 0.5 * erf_diff(u / SQRT_2, v / SQRT_2);
    let m1 = pu - pv;
    let m2 = m0 + upu - vpv;
    let m3 = (2.0 * pu + u2pu) - (2.0 * pv + v2pv);
    [m0, m1, m2, m3]
}
