use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};

/// Gaussian radial basis functions `psi_j(t) = N(t; center_j, width_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbfBasis {
    dimension: usize,
    centers: Vec<DVector<f64>>,
    widths: Vec<DMatrix<f64>>,
    #[serde(skip)]
    precisions: Vec<DMatrix<f64>>,
    #[serde(skip)]
    log_norms: Vec<f64>,
}

impl RbfBasis {
    pub fn new(centers: Vec<DVector<f64>>, widths: Vec<DMatrix<f64>>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::Domain("basis needs at least one function".into()));
        }
        if centers.len() != widths.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} centers but {} widths",
                centers.len(),
                widths.len()
            )));
        }
        let dimension = centers[0].len();
        if dimension == 0 {
            return Err(Error::Domain("basis dimension must be positive".into()));
        }
        let mut precisions = Vec::with_capacity(widths.len());
        let mut log_norms = Vec::with_capacity(widths.len());
        for (c, w) in centers.iter().zip(&widths) {
            if c.len() != dimension || w.nrows() != dimension || w.ncols() != dimension {
                return Err(Error::DimensionMismatch("basis centers and widths disagree in dimension".into()));
            }
            if c.iter().chain(w.iter()).any(|v| !v.is_finite()) {
                return Err(Error::Domain("basis parameters must be finite".into()));
            }
            if (w - w.transpose()).amax() > 1e-12 * w.amax() {
                return Err(Error::NotSpd);
            }
            let chol = w.clone().cholesky().ok_or(Error::NotSpd)?;
            let log_det: f64 = chol.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
            precisions.push(chol.inverse());
            log_norms.push(0.5 * (log_det + dimension as f64 * (2.0 * PI).ln()));
        }
        Ok(Self { dimension, centers, widths, precisions, log_norms })
    }

    /// One-dimensional basis from centers and variances.
    pub fn new_1d(centers: &[f64], variances: &[f64]) -> Result<Self> {
        Self::new(
            centers.iter().map(|&c| DVector::from_element(1, c)).collect(),
            variances.iter().map(|&v| DMatrix::from_element(1, 1, v)).collect(),
        )
    }

    pub fn new_2d(centers: &[Vector2<f64>], widths: &[Matrix2<f64>]) -> Result<Self> {
        Self::new(
            centers.iter().map(|c| DVector::from_column_slice(c.as_slice())).collect(),
            widths.iter().map(|w| DMatrix::from_column_slice(2, 2, w.as_slice())).collect(),
        )
    }

    /// `n` centers linearly spaced in `[0, 1]`, all with standard deviation `sigma`.
    pub fn linspace_1d(n: usize, sigma: f64) -> Result<Self> {
        if n == 0 || !(sigma > 0.0) {
            return Err(Error::Domain(format!("linspace basis needs n >= 1 and sigma > 0, got ({n}, {sigma})")));
        }
        let centers: Vec<f64> = if n == 1 {
            vec![0.5]
        } else {
            (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
        };
        Self::new_1d(&centers, &vec![sigma * sigma; n])
    }

    /// `n` centers on a `sqrt(n) x sqrt(n)` grid in `[0, 1]^2`, widths `variance * I`.
    pub fn grid_2d(n: usize, variance: f64) -> Result<Self> {
        let side = (n as f64).sqrt().round() as usize;
        if n == 0 || side * side != n || !(variance > 0.0) {
            return Err(Error::Domain(format!(
                "grid basis needs a perfect square n and variance > 0, got ({n}, {variance})"
            )));
        }
        let coord = |i: usize| if side == 1 { 0.5 } else { i as f64 / (side - 1) as f64 };
        let mut centers = Vec::with_capacity(n);
        for i in 0..side {
            for j in 0..side {
                centers.push(Vector2::new(coord(i), coord(j)));
            }
        }
        Self::new_2d(&centers, &vec![Matrix2::identity() * variance; n])
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn center(&self, j: usize) -> &DVector<f64> {
        &self.centers[j]
    }

    pub fn width(&self, j: usize) -> &DMatrix<f64> {
        &self.widths[j]
    }

    pub fn center_2d(&self, j: usize) -> Vector2<f64> {
        Vector2::new(self.centers[j][0], self.centers[j][1])
    }

    pub fn width_2d(&self, j: usize) -> Matrix2<f64> {
        let w = &self.widths[j];
        Matrix2::new(w[(0, 0)], w[(0, 1)], w[(1, 0)], w[(1, 1)])
    }

    /// `psi_j(t)`.
    pub fn eval(&self, j: usize, t: &[f64]) -> f64 {
        let d = DVector::from_fn(self.dimension, |i, _| t[i] - self.centers[j][i]);
        let quad = (d.transpose() * &self.precisions[j] * &d)[(0, 0)];
        (-0.5 * quad - self.log_norms[j]).exp()
    }

    /// `psi(t)` as an N-vector.
    pub fn eval_all(&self, t: &[f64]) -> DVector<f64> {
        DVector::from_fn(self.len(), |j, _| self.eval(j, t))
    }
}
