use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};
use serde::Serialize;

use crate::densities::{CanonicalScore1D, CanonicalScore2D, SparseDensity, MIN_EIGENVALUE};
use crate::discrete::SimplexVector;
use crate::error::{Error, Result};

/// Location and covariance of a continuous attention density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moments {
    pub mu: DVector<f64>,
    pub cov: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CanonicalScore {
    D1(CanonicalScore1D),
    D2(CanonicalScore2D),
}

impl Moments {
    pub fn new(mu: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mu.len();
        if d == 0 || cov.nrows() != d || cov.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "mean has dimension {d}, covariance is {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mu.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("moments must be finite".into()));
        }
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::NotSpd);
        }
        let cov = 0.5 * (&cov + cov.transpose());
        let min_eig = SymmetricEigen::new(cov.clone()).eigenvalues.min();
        if min_eig < MIN_EIGENVALUE {
            return Err(Error::DegenerateCovariance(min_eig));
        }
        Ok(Self { mu, cov })
    }

    pub fn new_1d(mu: f64, sigma2: f64) -> Result<Self> {
        Self::new(DVector::from_element(1, mu), DMatrix::from_element(1, 1, sigma2))
    }

    pub fn new_2d(mu: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        Self::new(
            DVector::from_column_slice(mu.as_slice()),
            DMatrix::from_column_slice(2, 2, cov.as_slice()),
        )
    }

    /// Canonical parameters flattened as `[theta_lin, theta_quad row-major]`.
    /// The quadratic block is symmetrized, since `t^T Q t` only sees `(Q + Q^T) / 2`.
    pub fn from_theta_flat(theta: &[f64], dimension: usize) -> Result<Self> {
        let d = dimension;
        if theta.len() != d + d * d {
            return Err(Error::DimensionMismatch(format!(
                "expected {} canonical parameters, got {}",
                d + d * d,
                theta.len()
            )));
        }
        let lin = DVector::from_column_slice(&theta[..d]);
        let q = DMatrix::from_row_slice(d, d, &theta[d..]);
        let q = 0.5 * (&q + q.transpose());
        let precision = -2.0 * q;
        let chol = precision.cholesky().ok_or(Error::NotSpd)?;
        let cov = chol.inverse();
        let cov = 0.5 * (&cov + cov.transpose());
        let mu = &cov * lin;
        Self::new(mu, cov)
    }

    pub fn theta_flat(&self) -> Result<Vec<f64>> {
        let precision = self.cov.clone().cholesky().ok_or(Error::NotSpd)?.inverse();
        let lin = &precision * &self.mu;
        let q = -0.5 * precision;
        let mut out: Vec<f64> = lin.iter().copied().collect();
        for i in 0..self.dimension() {
            for j in 0..self.dimension() {
                out.push(q[(i, j)]);
            }
        }
        Ok(out)
    }

    pub fn dimension(&self) -> usize {
        self.mu.len()
    }

    pub fn mu_2d(&self) -> Vector2<f64> {
        Vector2::new(self.mu[0], self.mu[1])
    }

    pub fn cov_2d(&self) -> Matrix2<f64> {
        Matrix2::new(self.cov[(0, 0)], self.cov[(0, 1)], self.cov[(1, 0)], self.cov[(1, 1)])
    }

    /// The density with these moments for `alpha = 1` (Gaussian) or `alpha = 2`
    /// (truncated parabola / paraboloid).
    pub fn density(&self, alpha: f64) -> Result<SparseDensity> {
        let sparse = match alpha {
            1.0 => false,
            2.0 => true,
            a => return Err(Error::UnsupportedAlpha(a)),
        };
        match (self.dimension(), sparse) {
            (1, false) => SparseDensity::gaussian_1d(self.mu[0], self.cov[(0, 0)]),
            (1, true) => SparseDensity::truncated_parabola(self.mu[0], self.cov[(0, 0)]),
            (2, false) => SparseDensity::gaussian_2d(self.mu_2d(), self.cov_2d()),
            (2, true) => SparseDensity::truncated_paraboloid(self.mu_2d(), self.cov_2d()),
            (d, _) => Err(Error::DimensionMismatch(format!("densities exist for dimension 1 or 2, got {d}"))),
        }
    }
}

pub fn theta_from_moments(m: &Moments) -> Result<CanonicalScore> {
    match m.dimension() {
        1 => Ok(CanonicalScore::D1(CanonicalScore1D::from_moments(m.mu[0], m.cov[(0, 0)])?)),
        2 => Ok(CanonicalScore::D2(CanonicalScore2D::from_moments(m.mu_2d(), m.cov_2d())?)),
        d => Err(Error::DimensionMismatch(format!("canonical scores exist for dimension 1 or 2, got {d}"))),
    }
}

pub fn moments_from_theta(s: &CanonicalScore) -> Result<Moments> {
    match s {
        CanonicalScore::D1(s) => Moments::new_1d(s.mu(), s.sigma2()),
        CanonicalScore::D2(s) => Moments::new_2d(s.mu(), s.cov()),
    }
}

/// Mean and covariance of the discrete distribution `p` over `locations`.
pub fn moment_match_from_discrete(p: &SimplexVector, locations: &[DVector<f64>]) -> Result<Moments> {
    if p.probs.len() != locations.len() || locations.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} locations",
            p.probs.len(),
            locations.len()
        )));
    }
    let d = locations[0].len();
    let mut mu = DVector::zeros(d);
    let mut second = DMatrix::zeros(d, d);
    for (&pi, t) in p.probs.iter().zip(locations) {
        if t.len() != d {
            return Err(Error::DimensionMismatch("locations of differing dimension".into()));
        }
        mu += pi * t;
        second += pi * t * t.transpose();
    }
    let cov = second - &mu * mu.transpose();
    Moments::new(mu, cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{softmax, ScoreVector};

    fn pts(v: &[&[f64]]) -> Vec<DVector<f64>> {
        v.iter().map(|x| DVector::from_column_slice(x)).collect()
    }

    #[test]
    fn parameter_maps() {
        let m = Moments::new_1d(0.0, 1.0).unwrap();
        match theta_from_moments(&m).unwrap() {
            CanonicalScore::D1(s) => assert_eq!((s.theta1, s.theta2), (0.0, -0.5)),
            _ => unreachable!(),
        }
        let m2 = Moments::new_2d(Vector2::zeros(), Matrix2::identity()).unwrap();
        assert_eq!(m2.theta_flat().unwrap(), vec![0.0, 0.0, -0.5, 0.0, 0.0, -0.5]);
        let m3 = Moments::new_2d(Vector2::new(0.3, -0.1), Matrix2::new(0.5, 0.1, 0.1, 0.2)).unwrap();
        let back = Moments::from_theta_flat(&m3.theta_flat().unwrap(), 2).unwrap();
        assert!((back.mu - &m3.mu).amax() < 1e-12 && (back.cov - &m3.cov).amax() < 1e-12);
        let s = theta_from_moments(&m3).unwrap();
        let again = moments_from_theta(&s).unwrap();
        assert!((again.cov - &m3.cov).amax() < 1e-12);
    }

    #[test]
    fn moment_matching() {
        let half = softmax(&ScoreVector::new(vec![0.0, 0.0]).unwrap());
        let m = moment_match_from_discrete(&half, &pts(&[&[0.0], &[1.0]])).unwrap();
        assert!((m.mu[0] - 0.5).abs() < 1e-15 && (m.cov[(0, 0)] - 0.25).abs() < 1e-15);
        let quarter = softmax(&ScoreVector::new(vec![0.0; 4]).unwrap());
        let corners = pts(&[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]]);
        let m2 = moment_match_from_discrete(&quarter, &corners).unwrap();
        assert!((m2.cov - DMatrix::identity(2, 2) * 0.25).amax() < 1e-15);
        let point = SimplexVector { probs: vec![1.0, 0.0], support_mask: vec![true, false] };
        assert!(matches!(
            moment_match_from_discrete(&point, &pts(&[&[0.0], &[1.0]])),
            Err(Error::DegenerateCovariance(_))
        ));
    }
}
