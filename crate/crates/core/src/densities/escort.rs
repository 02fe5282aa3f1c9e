use nalgebra::Vector2;

use super::families::SparseDensity;
use crate::error::{Error, Result};

/// The beta-escort of a continuous density: `t -> p(t)^beta / ||p||_beta^beta`.
#[derive(Debug, Clone)]
pub struct Escort<'a> {
    density: &'a SparseDensity,
    beta: f64,
    norm: f64,
}

impl<'a> Escort<'a> {
    /// `||p||_beta^beta`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn power(&self, v: f64) -> f64 {
        if v <= 0.0 {
            0.0
        } else if self.beta == 0.0 {
            1.0
        } else {
            v.powf(self.beta)
        }
    }

    pub fn eval_1d(&self, t: f64) -> f64 {
        self.power(self.density.pdf_1d(t)) / self.norm
    }

    pub fn eval_2d(&self, t: &Vector2<f64>) -> f64 {
        self.power(self.density.pdf_2d(t)) / self.norm
    }
}

pub fn escort(p: &SparseDensity, beta: f64) -> Result<Escort<'_>> {
    let norm = p.escort_norm(beta)?;
    Ok(Escort { density: p, beta, norm })
}

/// Escort of a discrete distribution; zero entries stay zero for every beta.
pub fn escort_discrete(p: &[f64], beta: f64) -> Result<Vec<f64>> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("escort exponent must be >= 0, got {beta}")));
    }
    if p.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::Domain("escort of a vector with negative or NaN entries".into()));
    }
    let powered: Vec<f64> = p
        .iter()
        .map(|&v| if v == 0.0 { 0.0 } else { v.powf(beta) })
        .collect();
    let total: f64 = powered.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain("escort of the zero vector".into()));
    }
    Ok(powered.into_iter().map(|v| v / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::QuadratureSpec;
    use nalgebra::Matrix2;

    #[test]
    fn beta_one_is_identity() {
        let p = SparseDensity::truncated_parabola(0.1, 0.4).unwrap();
        let e = escort(&p, 1.0).unwrap();
        for t in [-0.5, 0.0, 0.3, 2.0] {
            assert!((e.eval_1d(t) - p.pdf_1d(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn beta_zero_is_uniform_on_support() {
        let p = SparseDensity::truncated_parabola(0.0, 1.0).unwrap();
        let e = escort(&p, 0.0).unwrap();
        let a = 1.5f64.cbrt();
        assert!((e.norm() - 2.0 * a).abs() < 1e-14);
        assert!((e.eval_1d(0.7) - 1.0 / (2.0 * a)).abs() < 1e-14);
        assert_eq!(e.eval_1d(a + 1e-9), 0.0);
        let g = SparseDensity::gaussian_1d(0.0, 1.0).unwrap();
        assert_eq!(escort(&g, 0.0).unwrap_err(), Error::InfiniteSupport);
    }

    #[test]
    fn discrete_escort() {
        let e = escort_discrete(&[0.8, 0.2], 2.0).unwrap();
        assert!((e[0] - 0.64 / 0.68).abs() < 1e-15);
        assert!((e[1] - 0.04 / 0.68).abs() < 1e-15);
        let z = escort_discrete(&[0.5, 0.0, 0.5], 0.0).unwrap();
        assert_eq!(z, vec![0.5, 0.0, 0.5]);
        assert!(escort_discrete(&[0.5, 0.5], -1.0).is_err());
    }

    #[test]
    fn escorts_integrate_to_one() {
        let spec = QuadratureSpec::with_tolerance(1e-12);
        let ps = [
            SparseDensity::truncated_parabola(0.3, 0.2).unwrap(),
            SparseDensity::triangular(-0.3, 0.5).unwrap(),
            SparseDensity::gaussian_1d(0.0, 2.0).unwrap(),
        ];
        for p in &ps {
            for beta in [0.0, 0.5, 1.0, 2.0] {
                let Ok(e) = escort(p, beta) else { continue };
                let mass = p.integrate_1d(|t| e.eval_1d(t), &spec).unwrap();
                assert!((mass - 1.0).abs() < 1e-8, "{:?} beta {beta}: {mass}", p.family());
            }
        }
        let p2 = SparseDensity::truncated_paraboloid(Vector2::new(0.2, 0.1), Matrix2::new(0.4, -0.1, -0.1, 0.2)).unwrap();
        for beta in [0.0, 0.5, 1.0, 2.0] {
            let e = escort(&p2, beta).unwrap();
            let mass = p2.integrate_2d(|t| e.eval_2d(t), 256);
            assert!((mass - 1.0).abs() < 1e-8, "beta {beta}: {mass}");
        }
    }
}
