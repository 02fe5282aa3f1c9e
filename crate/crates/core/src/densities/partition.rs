//! `A_alpha` of a one-dimensional quadratic score and its gradient, the
//! expectation of `(t, t^2)` under the `(2 - alpha)`-escort.

use std::f64::consts::PI;

use super::score::CanonicalScore1D;
use crate::error::{Error, Result};

fn check_alpha(alpha: f64) -> Result<u8> {
    if alpha == 1.0 {
        Ok(1)
    } else if alpha == 2.0 {
        Ok(2)
    } else {
        Err(Error::UnsupportedAlpha(alpha))
    }
}

/// `A_1` is the Gaussian log-partition; `A_2 = lambda + 1` for the score
/// `theta1 t + theta2 t^2`, whose lambda absorbs the constant `mu^2 / (2 sigma^2)`.
pub fn a_alpha(score: &CanonicalScore1D, alpha: f64) -> Result<f64> {
    let (t1, t2) = (score.theta1, score.theta2);
    match check_alpha(alpha)? {
        1 => Ok(-t1 * t1 / (4.0 * t2) + 0.5 * (PI / -t2).ln()),
        _ => {
            let sigma = score.sigma2().sqrt();
            let offset = -t1 * t1 / (4.0 * t2);
            Ok(1.0 + offset - 0.5 * (1.5 / sigma).powf(2.0 / 3.0))
        }
    }
}

pub fn grad_a_alpha(score: &CanonicalScore1D, alpha: f64) -> Result<[f64; 2]> {
    let mu = score.mu();
    let s2 = score.sigma2();
    match check_alpha(alpha)? {
        1 => Ok([mu, s2 + mu * mu]),
        _ => {
            // uniform on [mu - a, mu + a]
            let a = (1.5 * s2).cbrt();
            Ok([mu, mu * mu + a * a / 3.0])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let s = CanonicalScore1D::from_moments(0.0, 1.0).unwrap();
        let a2 = a_alpha(&s, 2.0).unwrap();
        assert!((a2 - (1.0 - 0.5 * 1.5f64.powf(2.0 / 3.0))).abs() < 1e-15);
        assert!((a2 - 0.3448).abs() < 1e-4);
        assert_eq!(grad_a_alpha(&s, 1.0).unwrap(), [0.0, 1.0]);
        let g2 = grad_a_alpha(&s, 2.0).unwrap();
        assert!((g2[1] - 1.5f64.powf(2.0 / 3.0) / 3.0).abs() < 1e-15);
        assert!((g2[1] - 0.4368).abs() < 1e-4);
        assert!((a_alpha(&s, 1.0).unwrap() - 0.5 * (2.0 * PI).ln()).abs() < 1e-15);
    }

    #[test]
    fn central_differences() {
        for (mu, s2) in [(0.0, 1.0), (0.7, 0.3), (-1.2, 2.5)] {
            let s = CanonicalScore1D::from_moments(mu, s2).unwrap();
            for alpha in [1.0, 2.0] {
                let g = grad_a_alpha(&s, alpha).unwrap();
                let h = 1e-5;
                let d1 = (a_alpha(&CanonicalScore1D::new(s.theta1 + h, s.theta2).unwrap(), alpha).unwrap()
                    - a_alpha(&CanonicalScore1D::new(s.theta1 - h, s.theta2).unwrap(), alpha).unwrap())
                    / (2.0 * h);
                let d2 = (a_alpha(&CanonicalScore1D::new(s.theta1, s.theta2 + h).unwrap(), alpha).unwrap()
                    - a_alpha(&CanonicalScore1D::new(s.theta1, s.theta2 - h).unwrap(), alpha).unwrap())
                    / (2.0 * h);
                assert!((d1 - g[0]).abs() <= 1e-6 * (1.0 + g[0].abs()));
                assert!((d2 - g[1]).abs() <= 1e-6 * (1.0 + g[1].abs()));
            }
        }
    }

    #[test]
    fn unsupported() {
        let s = CanonicalScore1D::from_moments(0.0, 1.0).unwrap();
        assert_eq!(a_alpha(&s, 1.5), Err(Error::UnsupportedAlpha(1.5)));
    }
}
