//! Continuous sparsemax attention (alpha = 2) with Gaussian RBFs: the density
//! is a truncated parabola (1D) or paraboloid (2D), whose escort for the
//! Jacobian is uniform on the support.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use super::basis::RbfBasis;
use super::moments::Moments;
use super::softmax::check_dims;
use crate::densities::paraboloid_lambda;
use crate::error::{Error, Result};
use crate::math::{spd_sqrt_2d, truncated_std_moments};

pub const DEFAULT_ANGULAR_NODES: usize = 512;
pub const MIN_ANGULAR_NODES: usize = 64;
/// Largest change allowed when the angular rule is doubled.
pub const ANGULAR_REFINEMENT_TOLERANCE: f64 = 1e-7;

fn require_dim(m: &Moments, basis: &RbfBasis, d: usize) -> Result<()> {
    check_dims(m, basis)?;
    if m.dimension() != d {
        return Err(Error::DimensionMismatch(format!("expected dimension {d}, got {}", m.dimension())));
    }
    Ok(())
}

struct Terms1D {
    half_width: f64,
    d: f64,
    sigma_j: f64,
    m: [f64; 4],
}

fn terms_1d(m: &Moments, basis: &RbfBasis, j: usize) -> Terms1D {
    let (mu, s2) = (m.mu[0], m.cov[(0, 0)]);
    let (mu_j, sigma_j) = (basis.center(j)[0], basis.width(j)[(0, 0)].sqrt());
    let a = (1.5 * s2).cbrt();
    let u = (mu - a - mu_j) / sigma_j;
    let v = (mu + a - mu_j) / sigma_j;
    Terms1D { half_width: a, d: mu_j - mu, sigma_j, m: truncated_std_moments(u, v) }
}

pub fn forward_sparsemax_1d(m: &Moments, basis: &RbfBasis) -> Result<DVector<f64>> {
    require_dim(m, basis, 1)?;
    let s2 = m.cov[(0, 0)];
    Ok(DVector::from_fn(basis.len(), |j, _| {
        let Terms1D { half_width: a, d, sigma_j, m } = terms_1d(m, basis, j);
        let val = ((a * a - d * d) * m[0] - 2.0 * sigma_j * d * m[1] - sigma_j * sigma_j * m[2]) / (2.0 * s2);
        val.max(0.0)
    }))
}

/// Rows `[cov(t, psi_j); cov(t^2, psi_j)]` of the uniform-escort covariance
/// scaled by the support length.
pub fn jacobian_sparsemax_1d(m: &Moments, basis: &RbfBasis) -> Result<DMatrix<f64>> {
    require_dim(m, basis, 1)?;
    let mu = m.mu[0];
    let mut jac = DMatrix::zeros(2, basis.len());
    for j in 0..basis.len() {
        let Terms1D { half_width: a, d, sigma_j, m } = terms_1d(m, basis, j);
        let mu_j = mu + d;
        jac[(0, j)] = sigma_j * m[1] + d * m[0];
        jac[(1, j)] =
            (mu_j * mu_j - mu * mu - a * a / 3.0) * m[0] + 2.0 * mu_j * sigma_j * m[1] + sigma_j * sigma_j * m[2];
    }
    Ok(jac)
}

/// Angular integrands accumulated over the unit disc, after mapping the
/// support ellipse onto it.
#[derive(Default, Clone, Copy)]
struct PolarSums {
    r1: f64,
    r3: f64,
    r2a: Vector2<f64>,
    r3aa: Matrix2<f64>,
}

impl PolarSums {
    fn add(&mut self, o: &PolarSums) {
        self.r1 += o.r1;
        self.r3 += o.r3;
        self.r2a += o.r2a;
        self.r3aa += o.r3aa;
    }

    fn scaled(&self, w: f64) -> PolarSums {
        PolarSums { r1: self.r1 * w, r3: self.r3 * w, r2a: self.r2a * w, r3aa: self.r3aa * w }
    }
}

struct Ellipse2D {
    lambda: f64,
    root: Matrix2<f64>,
    root_inv: Matrix2<f64>,
    k: f64,
}

fn ellipse(m: &Moments) -> Result<Ellipse2D> {
    let cov = m.cov_2d();
    let lambda = paraboloid_lambda(2, cov.determinant())?;
    let root = spd_sqrt_2d(&cov)?;
    let root_inv = root.try_inverse().ok_or(Error::NotSpd)?;
    Ok(Ellipse2D { lambda, root, root_inv, k: (-2.0 * lambda).sqrt() })
}

/// Trapezoidal sums at `n` and `2n` angular nodes for basis function `j`.
fn polar_sums(m: &Moments, e: &Ellipse2D, basis: &RbfBasis, j: usize, n: usize) -> Result<(PolarSums, PolarSums)> {
    let mu_t = e.root_inv * (basis.center_2d(j) - m.mu_2d()) / e.k;
    let cov_t = e.root_inv * basis.width_2d(j) * e.root_inv / (e.k * e.k);
    let det_t = cov_t.determinant();
    let prec = cov_t.try_inverse().ok_or(Error::NotSpd)?;
    let prec = 0.5 * (prec + prec.transpose());
    let pm = prec * mu_t;
    let c0 = mu_t.dot(&pm);
    let lead = 1.0 / ((2.0 * PI).sqrt() * det_t.sqrt());
    let mut even = PolarSums::default();
    let mut odd = PolarSums::default();
    for i in 0..2 * n {
        let phi = PI * i as f64 / n as f64;
        let a = Vector2::new(phi.cos(), phi.sin());
        let q = a.dot(&(prec * a));
        let sigma2 = 1.0 / q;
        let sigma = sigma2.sqrt();
        let b = a.dot(&pm);
        let r0 = sigma2 * b;
        let s = lead * sigma * (-0.5 * (c0 - b * b * sigma2).max(0.0)).exp();
        let mm = truncated_std_moments(-r0 / sigma, (1.0 - r0) / sigma);
        let (s1, s2, s3) = (sigma, sigma2, sigma2 * sigma);
        let radial1 = r0 * mm[0] + s1 * mm[1];
        let radial2 = r0 * r0 * mm[0] + 2.0 * r0 * s1 * mm[1] + s2 * mm[2];
        let radial3 = r0 * r0 * r0 * mm[0] + 3.0 * r0 * r0 * s1 * mm[1] + 3.0 * r0 * s2 * mm[2] + s3 * mm[3];
        let term = PolarSums {
            r1: s * radial1,
            r3: s * radial3,
            r2a: a * (s * radial2),
            r3aa: a * a.transpose() * (s * radial3),
        };
        if i % 2 == 0 {
            even.add(&term);
        } else {
            odd.add(&term);
        }
    }
    let mut all = even;
    all.add(&odd);
    Ok((even.scaled(TAU / n as f64), all.scaled(TAU / (2 * n) as f64)))
}

fn check_nodes(n: usize) -> Result<()> {
    if n < MIN_ANGULAR_NODES {
        return Err(Error::Domain(format!("angular_nodes must be >= {MIN_ANGULAR_NODES}, got {n}")));
    }
    Ok(())
}

fn refinement_check(coarse: f64, fine: f64, what: &str) -> Result<()> {
    let delta = (coarse - fine).abs();
    if delta > ANGULAR_REFINEMENT_TOLERANCE * fine.abs().max(1.0) {
        return Err(Error::ToleranceNotReached(format!(
            "{what}: doubling the angular nodes moved the result by {delta:e}"
        )));
    }
    Ok(())
}

fn forward_from(e: &Ellipse2D, p: &PolarSums) -> f64 {
    (-e.lambda * (p.r1 - p.r3)).max(0.0)
}

/// Forward pass via the polar reduction with an `angular_nodes`-point trapezoidal rule.
pub fn forward_sparsemax_2d(m: &Moments, basis: &RbfBasis, angular_nodes: usize) -> Result<DVector<f64>> {
    require_dim(m, basis, 2)?;
    check_nodes(angular_nodes)?;
    let e = ellipse(m)?;
    let mut r = DVector::zeros(basis.len());
    for j in 0..basis.len() {
        let (coarse, fine) = polar_sums(m, &e, basis, j, angular_nodes)?;
        r[j] = forward_from(&e, &coarse);
        refinement_check(r[j], forward_from(&e, &fine), "forward_sparsemax_2d")?;
    }
    Ok(r)
}

fn jacobian_column(m: &Moments, e: &Ellipse2D, p: &PolarSums) -> [f64; 6] {
    let mu = m.mu_2d();
    let w = e.root * p.r2a * e.k;
    let second = e.root * p.r3aa * e.root * (e.k * e.k);
    let quad = mu * w.transpose() + w * mu.transpose() + second + m.cov_2d() * (0.5 * e.lambda * p.r1);
    [w[0], w[1], quad[(0, 0)], quad[(0, 1)], quad[(1, 0)], quad[(1, 1)]]
}

/// Jacobian rows `[lin0, lin1, q00, q01, q10, q11]`, one column per basis function.
pub fn jacobian_sparsemax_2d(m: &Moments, basis: &RbfBasis, angular_nodes: usize) -> Result<DMatrix<f64>> {
    require_dim(m, basis, 2)?;
    check_nodes(angular_nodes)?;
    let e = ellipse(m)?;
    let mut jac = DMatrix::zeros(6, basis.len());
    for j in 0..basis.len() {
        let (coarse, fine) = polar_sums(m, &e, basis, j, angular_nodes)?;
        let c = jacobian_column(m, &e, &coarse);
        let f = jacobian_column(m, &e, &fine);
        for (row, (cv, fv)) in c.iter().zip(&f).enumerate() {
            refinement_check(*cv, *fv, "jacobian_sparsemax_2d")?;
            jac[(row, j)] = *cv;
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_basis_is_nearly_constant() {
        let m = Moments::new_1d(0.2, 0.5).unwrap();
        let b = RbfBasis::new_1d(&[0.2], &[1e6]).unwrap();
        let r = forward_sparsemax_1d(&m, &b).unwrap()[0];
        let peak = 1.0 / (2.0 * PI * 1e6f64).sqrt();
        assert!((r - peak).abs() < 1e-6 * peak);
    }

    #[test]
    fn far_basis_vanishes() {
        let m = Moments::new_1d(0.0, 1.0).unwrap();
        let b = RbfBasis::new_1d(&[100.0], &[0.01]).unwrap();
        assert!(forward_sparsemax_1d(&m, &b).unwrap()[0] < 1e-12);
        let m2 = Moments::new_2d(Vector2::zeros(), Matrix2::identity()).unwrap();
        let b2 = RbfBasis::new_2d(&[Vector2::new(50.0, 50.0)], &[Matrix2::identity()]).unwrap();
        assert!(forward_sparsemax_2d(&m2, &b2, 512).unwrap()[0] < 1e-12);
    }

    #[test]
    fn symmetric_linear_rows_vanish() {
        let m = Moments::new_1d(0.3, 0.8).unwrap();
        let b = RbfBasis::new_1d(&[0.3], &[0.4]).unwrap();
        assert!(jacobian_sparsemax_1d(&m, &b).unwrap()[(0, 0)].abs() < 1e-16);
        let m2 = Moments::new_2d(Vector2::new(0.1, 0.2), Matrix2::identity()).unwrap();
        let b2 = RbfBasis::new_2d(&[Vector2::new(0.1, 0.2)], &[Matrix2::identity()]).unwrap();
        let j = jacobian_sparsemax_2d(&m2, &b2, 512).unwrap();
        assert!(j[(0, 0)].abs() < 1e-14 && j[(1, 0)].abs() < 1e-14);
    }

    #[test]
    fn rotating_the_basis_width() {
        let m = Moments::new_2d(Vector2::zeros(), Matrix2::identity()).unwrap();
        let w = Matrix2::new(0.3, 0.1, 0.1, 0.1);
        let rot = Matrix2::new(0.0, -1.0, 1.0, 0.0);
        let b = RbfBasis::new_2d(&[Vector2::zeros()], &[w]).unwrap();
        let b_rot = RbfBasis::new_2d(&[Vector2::zeros()], &[rot * w * rot.transpose()]).unwrap();
        let r = forward_sparsemax_2d(&m, &b, 512).unwrap()[0];
        let r_rot = forward_sparsemax_2d(&m, &b_rot, 512).unwrap()[0];
        assert!((r - r_rot).abs() < 1e-10);
    }

    #[test]
    fn node_count_is_validated() {
        let m = Moments::new_2d(Vector2::zeros(), Matrix2::identity()).unwrap();
        let b = RbfBasis::new_2d(&[Vector2::zeros()], &[Matrix2::identity()]).unwrap();
        assert!(forward_sparsemax_2d(&m, &b, 32).is_err());
        let r64 = forward_sparsemax_2d(&m, &b, 64).unwrap()[0];
        let r512 = forward_sparsemax_2d(&m, &b, 512).unwrap()[0];
        assert!((r64 - r512).abs() <= 1e-7);
    }
}
