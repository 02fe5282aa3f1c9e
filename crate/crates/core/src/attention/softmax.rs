//! Continuous softmax attention with Gaussian RBFs: every expectation is a
//! product-of-Gaussians integral.

use nalgebra::{DMatrix, DVector};

use super::basis::RbfBasis;
use super::moments::Moments;
use crate::error::{Error, Result};
use crate::math::gaussian_pdf;

pub(crate) fn check_dims(m: &Moments, basis: &RbfBasis) -> Result<()> {
    if m.dimension() != basis.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "density has dimension {}, basis {}",
            m.dimension(),
            basis.dimension()
        )));
    }
    Ok(())
}

/// `r_j = N(mu; mu_j, Sigma + Sigma_j)`.
pub fn forward_softmax(m: &Moments, basis: &RbfBasis) -> Result<DVector<f64>> {
    check_dims(m, basis)?;
    let mut r = DVector::zeros(basis.len());
    for j in 0..basis.len() {
        r[j] = gaussian_pdf(&m.mu, basis.center(j), &(&m.cov + basis.width(j)))?;
    }
    Ok(r)
}

/// Rows `[d r / d theta_lin; d r / d theta_quad (row-major)]`, one column per basis function.
pub fn jacobian_softmax(m: &Moments, basis: &RbfBasis) -> Result<DMatrix<f64>> {
    check_dims(m, basis)?;
    let d = m.dimension();
    let mut jac = DMatrix::zeros(d + d * d, basis.len());
    for j in 0..basis.len() {
        let (mu_j, cov_j) = (basis.center(j), basis.width(j));
        let total = &m.cov + cov_j;
        let s = gaussian_pdf(&m.mu, mu_j, &total)?;
        let chol = total.cholesky().ok_or(Error::NotSpd)?;
        // (Sigma^-1 + Sigma_j^-1)^-1 = Sigma_j (Sigma + Sigma_j)^-1 Sigma
        let tilde_cov = cov_j * chol.solve(&m.cov);
        let tilde_cov = 0.5 * (&tilde_cov + tilde_cov.transpose());
        let tilde_mu = cov_j * chol.solve(&m.mu) + &m.cov * chol.solve(mu_j);
        let lin = s * (&tilde_mu - &m.mu);
        let quad = s * (tilde_cov + &tilde_mu * tilde_mu.transpose() - &m.cov - &m.mu * m.mu.transpose());
        for a in 0..d {
            jac[(a, j)] = lin[a];
            for b in 0..d {
                jac[(d + a * d + b, j)] = quad[(a, b)];
            }
        }
    }
    Ok(jac)
}
