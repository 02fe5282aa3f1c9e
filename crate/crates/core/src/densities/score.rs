//! Canonical parameters of quadratic scores `f(t) = theta^T phi(t)` with
//! `phi(t) = [t, vec(t t^T)]`.

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variances at or below this are treated as degenerate.
pub const MIN_VARIANCE: f64 = 1e-12;
/// Covariances whose smallest eigenvalue is below this are degenerate.
pub const MIN_EIGENVALUE: f64 = 1e-10;

/// `theta = (mu / sigma^2, -1 / (2 sigma^2))` for a univariate quadratic score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalScore1D {
    pub theta1: f64,
    pub theta2: f64,
}

impl CanonicalScore1D {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !theta1.is_finite() || !(theta2 < 0.0) || !theta2.is_finite() {
            return Err(Error::Domain(format!("canonical score needs finite theta1 and theta2 < 0, got ({theta1}, {theta2})")));
        }
        let score = Self { theta1, theta2 };
        if score.sigma2() <= MIN_VARIANCE || !score.sigma2().is_finite() {
            return Err(Error::Domain(format!("degenerate variance {}", score.sigma2())));
        }
        Ok(score)
    }

    pub fn from_moments(mu: f64, sigma2: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma2 > MIN_VARIANCE) || !sigma2.is_finite() {
            return Err(Error::Domain(format!("need finite mu and sigma2 > {MIN_VARIANCE:e}, got ({mu}, {sigma2})")));
        }
        Ok(Self {
            theta1: mu / sigma2,
            theta2: -0.5 / sigma2,
        })
    }

    pub fn sigma2(&self) -> f64 {
        -0.5 / self.theta2
    }

    pub fn mu(&self) -> f64 {
        self.theta1 * self.sigma2()
    }

    pub fn to_array(&self) -> [f64; 2] {
        [self.theta1, self.theta2]
    }

    /// The score itself, `theta1 t + theta2 t^2`.
    pub fn eval(&self, t: f64) -> f64 {
        self.theta1 * t + self.theta2 * t * t
    }
}

/// `theta_lin = Sigma^{-1} mu`, `theta_quad = -Sigma^{-1} / 2` for a bivariate quadratic score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalScore2D {
    pub theta_lin: Vector2<f64>,
    pub theta_quad: Matrix2<f64>,
}

/// Checks symmetry and returns the smallest eigenvalue.
pub(crate) fn min_eigenvalue_sym(m: &Matrix2<f64>) -> Result<f64> {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if !m.iter().all(|x| x.is_finite()) || (m[(0, 1)] - m[(1, 0)]).abs() > 1e-12 * scale {
        return Err(Error::NotSpd);
    }
    let eig = SymmetricEigen::new(*m);
    Ok(eig.eigenvalues.min())
}

/// Validates an SPD covariance against the degeneracy threshold and symmetrizes it.
pub(crate) fn checked_covariance(cov: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let min_eig = min_eigenvalue_sym(cov)?;
    if !(min_eig > 0.0) {
        return Err(Error::NotSpd);
    }
    if min_eig < MIN_EIGENVALUE {
        return Err(Error::DegenerateCovariance(min_eig));
    }
    Ok(0.5 * (cov + cov.transpose()))
}

impl CanonicalScore2D {
    pub fn new(theta_lin: Vector2<f64>, theta_quad: Matrix2<f64>) -> Result<Self> {
        if !theta_lin.iter().all(|x| x.is_finite()) {
            return Err(Error::Domain("theta_lin must be finite".into()));
        }
        let neg = -theta_quad;
        let min_eig = min_eigenvalue_sym(&neg)?;
        if !(min_eig > 0.0) {
            return Err(Error::NotSpd);
        }
        let score = Self {
            theta_lin,
            theta_quad: 0.5 * (theta_quad + theta_quad.transpose()),
        };
        checked_covariance(&score.cov())?;
        Ok(score)
    }

    pub fn from_moments(mu: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        let cov = checked_covariance(&cov)?;
        if !mu.iter().all(|x| x.is_finite()) {
            return Err(Error::Domain("mean must be finite".into()));
        }
        let prec = cov.try_inverse().ok_or(Error::NotSpd)?;
        let prec = 0.5 * (prec + prec.transpose());
        Ok(Self {
            theta_lin: prec * mu,
            theta_quad: -0.5 * prec,
        })
    }

    pub fn precision(&self) -> Matrix2<f64> {
        -2.0 * self.theta_quad
    }

    pub fn cov(&self) -> Matrix2<f64> {
        let c = self.precision().try_inverse().unwrap_or_else(|| Matrix2::from_element(f64::NAN));
        0.5 * (c + c.transpose())
    }

    pub fn mu(&self) -> Vector2<f64> {
        self.cov() * self.theta_lin
    }

    /// Flattened layout `[lin0, lin1, q00, q01, q10, q11]`.
    pub fn to_array(&self) -> [f64; 6] {
        let q = &self.theta_quad;
        [self.theta_lin[0], self.theta_lin[1], q[(0, 0)], q[(0, 1)], q[(1, 0)], q[(1, 1)]]
    }

    pub fn from_array(v: &[f64; 6]) -> Result<Self> {
        Self::new(Vector2::new(v[0], v[1]), Matrix2::new(v[2], v[3], v[4], v[5]))
    }

    pub fn eval(&self, t: &Vector2<f64>) -> f64 {
        self.theta_lin.dot(t) + (t.transpose() * self.theta_quad * t)[(0, 0)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_gaussian_parameters() {
        let s = CanonicalScore1D::from_moments(0.0, 1.0).unwrap();
        assert_eq!(s.to_array(), [0.0, -0.5]);
        let s2 = CanonicalScore2D::from_moments(Vector2::zeros(), Matrix2::identity()).unwrap();
        assert_eq!(s2.theta_lin, Vector2::zeros());
        assert_eq!(s2.theta_quad, -0.5 * Matrix2::identity());
    }

    #[test]
    fn round_trip_1d() {
        for (mu, s2) in [(0.3, 0.7), (-4.0, 2.5), (1e3, 1e-3), (0.0, 123.0)] {
            let s = CanonicalScore1D::from_moments(mu, s2).unwrap();
            assert!((s.mu() - mu).abs() <= 1e-14 * mu.abs().max(1.0));
            assert!((s.sigma2() - s2).abs() <= 1e-14 * s2);
        }
    }

    #[test]
    fn rejects_degenerate() {
        assert!(CanonicalScore1D::from_moments(0.0, 0.0).is_err());
        assert!(CanonicalScore1D::from_moments(0.0, 1e-13).is_err());
        assert!(CanonicalScore1D::new(1.0, 0.5).is_err());
        let flat = Matrix2::new(1.0, 0.0, 0.0, 1e-11);
        assert!(matches!(
            CanonicalScore2D::from_moments(Vector2::zeros(), flat),
            Err(Error::DegenerateCovariance(_))
        ));
        assert_eq!(
            CanonicalScore2D::new(Vector2::zeros(), Matrix2::new(-1.0, 0.3, 0.0, -1.0)),
            Err(Error::NotSpd)
        );
    }

    #[test]
    fn evaluates_score() {
        let s = CanonicalScore1D::from_moments(1.0, 2.0).unwrap();
        // theta^T phi(t) = -(t - mu)^2 / (2 sigma^2) + mu^2 / (2 sigma^2)
        let t = 0.4;
        assert!((s.eval(t) - (-(t - 1.0f64).powi(2) / 4.0 + 0.25)).abs() < 1e-15);
    }
}
