//! The density families produced by the Tsallis-regularized prediction map:
//! Gaussians for alpha = 1 and their compactly supported counterparts for
//! alpha = 2.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use super::location_scale::LocationScaleG;
use super::score::{checked_covariance, MIN_VARIANCE};
use crate::error::{Error, Result};
use crate::math::{gamma_fn, integrate_adaptive, integrate_fixed_2d_chords, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Gaussian1D,
    Gaussian2D,
    TruncatedParabola,
    TruncatedParaboloid2D,
    Triangular,
    LocationScale,
}

/// The elliptical region `{t : (t - center)^T cov^{-1} (t - center) / 2 <= level}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseSupport {
    pub center: Vector2<f64>,
    pub cov: Matrix2<f64>,
    pub level: f64,
}

impl EllipseSupport {
    /// `K = 2 level cov`, so that the region is `w^T K^{-1} w <= 1`.
    pub fn shape(&self) -> Matrix2<f64> {
        2.0 * self.level * self.cov
    }

    pub fn area(&self) -> f64 {
        PI * self.shape().determinant().sqrt()
    }

    pub fn half_widths(&self) -> (f64, f64) {
        let k = self.shape();
        (k[(0, 0)].sqrt(), k[(1, 1)].sqrt())
    }

    /// `[x0, x1, y0, y1]` of the axis-aligned bounding box.
    pub fn bounding_box(&self) -> [f64; 4] {
        let (hx, hy) = self.half_widths();
        [self.center[0] - hx, self.center[0] + hx, self.center[1] - hy, self.center[1] + hy]
    }

    /// The vertical chord `[y0, y1]` at abscissa `x`, if the line meets the region.
    pub fn chord(&self, x: f64) -> Option<(f64, f64)> {
        let p = self.shape().try_inverse()?;
        let w0 = x - self.center[0];
        let disc = p[(0, 1)] * p[(0, 1)] * w0 * w0 - p[(1, 1)] * (p[(0, 0)] * w0 * w0 - 1.0);
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        let y0 = (-p[(0, 1)] * w0 - root) / p[(1, 1)];
        let y1 = (-p[(0, 1)] * w0 + root) / p[(1, 1)];
        Some((self.center[1] + y0, self.center[1] + y1))
    }

    pub fn contains(&self, t: &Vector2<f64>) -> bool {
        let p = self.shape().try_inverse().unwrap_or_else(Matrix2::zeros);
        let w = t - self.center;
        (w.transpose() * p * w)[(0, 0)] <= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Support {
    Interval { lo: f64, hi: f64 },
    Ellipse(EllipseSupport),
    Whole,
}

impl Support {
    /// Lebesgue measure of the support (`None` when unbounded).
    pub fn measure(&self) -> Option<f64> {
        match self {
            Support::Interval { lo, hi } => Some(hi - lo),
            Support::Ellipse(e) => Some(e.area()),
            Support::Whole => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum DensityParams {
    Gaussian1D { mu: f64, sigma2: f64 },
    Gaussian2D { mu: Vector2<f64>, cov: Matrix2<f64> },
    TruncatedParabola { mu: f64, sigma2: f64 },
    TruncatedParaboloid2D { mu: Vector2<f64>, cov: Matrix2<f64> },
    Triangular { mu: f64, b: f64 },
    LocationScale { mu: f64, sigma: f64, g: LocationScaleG },
}

/// A density `exp_{2 - alpha}(f(t) - A)` with its normalizer and support.
///
/// `lambda` is the constant with `p = [f - lambda]_+` for the sparse families;
/// for Gaussians it holds the log-partition `A_1` of the centred score.
#[derive(Debug, Clone)]
pub struct SparseDensity {
    params: DensityParams,
    lambda: f64,
    support: Support,
    precision: Matrix2<f64>,
}

/// Normalizer of the N-dimensional truncated paraboloid with covariance determinant `det`.
pub fn paraboloid_lambda(n: usize, det: f64) -> Result<f64> {
    if n == 0 || !(det > 0.0) {
        return Err(Error::Domain(format!("paraboloid_lambda needs n >= 1 and det > 0, got ({n}, {det})")));
    }
    let nf = n as f64;
    let ratio = gamma_fn(nf / 2.0 + 2.0)? / ((2.0 * PI).powf(nf) * det).sqrt();
    Ok(-ratio.powf(2.0 / (2.0 + nf)))
}

fn check_scalar(name: &str, value: f64, min: f64) -> Result<()> {
    if !value.is_finite() || !(value > min) {
        return Err(Error::Domain(format!("{name} must be finite and > {min:e}, got {value}")));
    }
    Ok(())
}

impl SparseDensity {
    pub fn gaussian_1d(mu: f64, sigma2: f64) -> Result<Self> {
        check_scalar("mu", mu.abs() + 1.0, 0.0)?;
        check_scalar("sigma2", sigma2, MIN_VARIANCE)?;
        Ok(Self {
            params: DensityParams::Gaussian1D { mu, sigma2 },
            lambda: 0.5 * (2.0 * PI * sigma2).ln(),
            support: Support::Whole,
            precision: Matrix2::zeros(),
        })
    }

    pub fn gaussian_2d(mu: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        let cov = checked_covariance(&cov)?;
        let precision = cov.try_inverse().ok_or(Error::NotSpd)?;
        Ok(Self {
            params: DensityParams::Gaussian2D { mu, cov },
            lambda: 0.5 * (4.0 * PI * PI * cov.determinant()).ln(),
            support: Support::Whole,
            precision,
        })
    }

    /// `[-(t - mu)^2 / (2 sigma^2) - lambda]_+` with `lambda = -(3 / (2 sigma))^{2/3} / 2`.
    pub fn truncated_parabola(mu: f64, sigma2: f64) -> Result<Self> {
        check_scalar("mu", mu.abs() + 1.0, 0.0)?;
        check_scalar("sigma2", sigma2, MIN_VARIANCE)?;
        let sigma = sigma2.sqrt();
        let lambda = -0.5 * (1.5 / sigma).powf(2.0 / 3.0);
        let a = (1.5 * sigma2).cbrt();
        Ok(Self {
            params: DensityParams::TruncatedParabola { mu, sigma2 },
            lambda,
            support: Support::Interval { lo: mu - a, hi: mu + a },
            precision: Matrix2::zeros(),
        })
    }

    /// `[-lambda - (t - mu)^T cov^{-1} (t - mu) / 2]_+` on R^2.
    pub fn truncated_paraboloid(mu: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        let cov = checked_covariance(&cov)?;
        let precision = cov.try_inverse().ok_or(Error::NotSpd)?;
        let lambda = paraboloid_lambda(2, cov.determinant())?;
        Ok(Self {
            params: DensityParams::TruncatedParaboloid2D { mu, cov },
            lambda,
            support: Support::Ellipse(EllipseSupport { center: mu, cov, level: -lambda }),
            precision,
        })
    }

    /// `[-lambda - |t - mu| / b]_+` with `lambda = -1 / sqrt(b)`.
    pub fn triangular(mu: f64, b: f64) -> Result<Self> {
        check_scalar("mu", mu.abs() + 1.0, 0.0)?;
        check_scalar("b", b, MIN_VARIANCE)?;
        let a = b.sqrt();
        Ok(Self {
            params: DensityParams::Triangular { mu, b },
            lambda: -1.0 / a,
            support: Support::Interval { lo: mu - a, hi: mu + a },
            precision: Matrix2::zeros(),
        })
    }

    /// `[-lambda - g'(|t - mu| / sigma) / sigma]_+` with `lambda = -g'(a) / sigma`.
    pub fn location_scale(g: LocationScaleG, mu: f64, sigma: f64) -> Result<Self> {
        check_scalar("mu", mu.abs() + 1.0, 0.0)?;
        check_scalar("sigma", sigma, MIN_VARIANCE.sqrt())?;
        let a = g.a_star();
        let lambda = -g.g_prime(a) / sigma;
        Ok(Self {
            params: DensityParams::LocationScale { mu, sigma, g },
            lambda,
            support: Support::Interval {
                lo: mu - a * sigma,
                hi: mu + a * sigma,
            },
            precision: Matrix2::zeros(),
        })
    }

    pub fn params(&self) -> &DensityParams {
        &self.params
    }

    pub fn family(&self) -> Family {
        match self.params {
            DensityParams::Gaussian1D { .. } => Family::Gaussian1D,
            DensityParams::Gaussian2D { .. } => Family::Gaussian2D,
            DensityParams::TruncatedParabola { .. } => Family::TruncatedParabola,
            DensityParams::TruncatedParaboloid2D { .. } => Family::TruncatedParaboloid2D,
            DensityParams::Triangular { .. } => Family::Triangular,
            DensityParams::LocationScale { .. } => Family::LocationScale,
        }
    }

    /// 1 for Gaussians, 2 for the compactly supported families.
    pub fn alpha(&self) -> f64 {
        match self.family() {
            Family::Gaussian1D | Family::Gaussian2D => 1.0,
            _ => 2.0,
        }
    }

    pub fn dimension(&self) -> usize {
        match self.family() {
            Family::Gaussian2D | Family::TruncatedParaboloid2D => 2,
            _ => 1,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    /// Centre of symmetry of the density.
    pub fn location(&self) -> Vec<f64> {
        match &self.params {
            DensityParams::Gaussian1D { mu, .. }
            | DensityParams::TruncatedParabola { mu, .. }
            | DensityParams::Triangular { mu, .. }
            | DensityParams::LocationScale { mu, .. } => vec![*mu],
            DensityParams::Gaussian2D { mu, .. } | DensityParams::TruncatedParaboloid2D { mu, .. } => vec![mu[0], mu[1]],
        }
    }

    /// The (unnormalized) score `f(t)` in location-scale form.
    pub fn score_1d(&self, t: f64) -> f64 {
        match &self.params {
            DensityParams::Gaussian1D { mu, sigma2 } | DensityParams::TruncatedParabola { mu, sigma2 } => {
                -(t - mu) * (t - mu) / (2.0 * sigma2)
            }
            DensityParams::Triangular { mu, b } => -(t - mu).abs() / b,
            DensityParams::LocationScale { mu, sigma, g } => -g.g_prime((t - mu).abs() / sigma) / sigma,
            _ => panic!("score_1d called on a two-dimensional density"),
        }
    }

    pub fn score_2d(&self, t: &Vector2<f64>) -> f64 {
        match &self.params {
            DensityParams::Gaussian2D { mu, .. } | DensityParams::TruncatedParaboloid2D { mu, .. } => {
                let w = t - mu;
                -0.5 * (w.transpose() * self.precision * w)[(0, 0)]
            }
            _ => panic!("score_2d called on a one-dimensional density"),
        }
    }

    /// Density at `t`.
    ///
    /// # Panics
    /// If the density is two-dimensional.
    pub fn pdf_1d(&self, t: f64) -> f64 {
        let f = self.score_1d(t);
        match self.family() {
            Family::Gaussian1D => (f - self.lambda).exp(),
            _ => {
                if let Support::Interval { lo, hi } = self.support {
                    if t <= lo || t >= hi {
                        return 0.0;
                    }
                }
                (f - self.lambda).max(0.0)
            }
        }
    }

    /// Density at `t`.
    ///
    /// # Panics
    /// If the density is one-dimensional.
    pub fn pdf_2d(&self, t: &Vector2<f64>) -> f64 {
        let f = self.score_2d(t);
        match self.family() {
            Family::Gaussian2D => (f - self.lambda).exp(),
            _ => (f - self.lambda).max(0.0),
        }
    }

    /// Density at a point given as a slice of coordinates.
    pub fn pdf(&self, t: &[f64]) -> Result<f64> {
        match (self.dimension(), t) {
            (1, [x]) => Ok(self.pdf_1d(*x)),
            (2, [x, y]) => Ok(self.pdf_2d(&Vector2::new(*x, *y))),
            (d, _) => Err(Error::DimensionMismatch(format!("density has dimension {d}, point has {}", t.len()))),
        }
    }

    /// Standard deviations along the coordinate axes (Gaussians) or support half-widths.
    fn spread_1d(&self) -> f64 {
        match &self.params {
            DensityParams::Gaussian1D { sigma2, .. } => sigma2.sqrt(),
            _ => match self.support {
                Support::Interval { lo, hi } => 0.5 * (hi - lo),
                _ => unreachable!(),
            },
        }
    }

    /// Points where the density is not smooth, plus the interval to integrate over.
    /// Gaussians are integrated over mean +/- 10 standard deviations.
    pub fn integration_breakpoints_1d(&self) -> Vec<f64> {
        let mu = self.location()[0];
        match (&self.params, self.support) {
            (DensityParams::Gaussian1D { .. }, _) => {
                let s = self.spread_1d();
                vec![mu - 10.0 * s, mu, mu + 10.0 * s]
            }
            (DensityParams::TruncatedParabola { .. }, Support::Interval { lo, hi }) => vec![lo, hi],
            (_, Support::Interval { lo, hi }) => vec![lo, mu, hi],
            _ => panic!("integration_breakpoints_1d called on a two-dimensional density"),
        }
    }

    /// Integral of `h(t)` over the support (1D, adaptive, split at kinks).
    pub(crate) fn integrate_1d<H: Fn(f64) -> f64>(&self, h: H, spec: &QuadratureSpec) -> Result<f64> {
        let pts = self.integration_breakpoints_1d();
        pts.windows(2).map(|w| integrate_adaptive(&h, w[0], w[1], spec)).sum()
    }

    /// Integral of `h(t)` over the support (2D, fixed rule over the ellipse chords
    /// or over mean +/- 10 standard deviations for Gaussians).
    pub(crate) fn integrate_2d<H: Fn(&Vector2<f64>) -> f64>(&self, h: H, nodes: usize) -> f64 {
        match (&self.params, self.support) {
            (DensityParams::TruncatedParaboloid2D { .. }, Support::Ellipse(e)) => {
                let [x0, x1, ..] = e.bounding_box();
                integrate_fixed_2d_chords(
                    |x, y| h(&Vector2::new(x, y)),
                    x0,
                    x1,
                    |x| e.chord(x).unwrap_or((0.0, 0.0)),
                    nodes,
                )
            }
            (DensityParams::Gaussian2D { mu, cov }, _) => {
                let (sx, sy) = (cov[(0, 0)].sqrt(), cov[(1, 1)].sqrt());
                crate::math::integrate_fixed_2d(
                    |x, y| h(&Vector2::new(x, y)),
                    crate::math::Rect::new(mu[0] - 10.0 * sx, mu[0] + 10.0 * sx, mu[1] - 10.0 * sy, mu[1] + 10.0 * sy),
                    nodes,
                )
            }
            _ => panic!("integrate_2d called on a one-dimensional density"),
        }
    }

    /// `||p||_beta^beta = int p^beta`, analytic for every family except the
    /// general location-scale case with beta not in {0, 1}.
    pub fn escort_norm(&self, beta: f64) -> Result<f64> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("escort exponent must be >= 0, got {beta}")));
        }
        if beta == 1.0 {
            return Ok(1.0);
        }
        let h = -self.lambda;
        match &self.params {
            DensityParams::Gaussian1D { sigma2, .. } => {
                if beta == 0.0 {
                    return Err(Error::InfiniteSupport);
                }
                Ok((2.0 * PI * sigma2).powf(0.5 * (1.0 - beta)) * beta.powf(-0.5))
            }
            DensityParams::Gaussian2D { cov, .. } => {
                if beta == 0.0 {
                    return Err(Error::InfiniteSupport);
                }
                Ok((4.0 * PI * PI * cov.determinant()).powf(0.5 * (1.0 - beta)) / beta)
            }
            DensityParams::TruncatedParabola { sigma2, .. } => {
                // a h^beta int_{-1}^{1} (1 - y^2)^beta dy
                let a = (1.5 * sigma2).cbrt();
                Ok(a * h.powf(beta) * PI.sqrt() * gamma_fn(beta + 1.0)? / gamma_fn(beta + 1.5)?)
            }
            DensityParams::Triangular { b, .. } => Ok(2.0 * b.sqrt() * h.powf(beta) / (beta + 1.0)),
            DensityParams::TruncatedParaboloid2D { cov, .. } => {
                Ok(2.0 * h * cov.determinant().sqrt() * h.powf(beta) * PI / (beta + 1.0))
            }
            DensityParams::LocationScale { sigma, g, .. } => {
                if beta == 0.0 {
                    return Ok(2.0 * g.a_star() * sigma);
                }
                self.integrate_1d(|t| self.pdf_1d(t).powf(beta), &QuadratureSpec::with_tolerance(1e-12))
            }
        }
    }
}
