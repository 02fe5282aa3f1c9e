//! Continuous value functions `V_B(t) = B psi(t)` fitted to discrete
//! observations by multivariate ridge regression.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::attention::RbfBasis;
use crate::error::{Error, Result};

pub const DEFAULT_RIDGE: f64 = 1e-6;
/// Smallest pivot ratio accepted from the Cholesky factor before the system
/// is declared singular.
const PIVOT_RATIO: f64 = 1e-14;

/// Encoder states `H` (D x L) with the location of each column.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationMatrix {
    h: DMatrix<f64>,
    locations: Vec<DVector<f64>>,
}

/// `t_l = l / L` for `l = 1..L`.
pub fn locations_1d(l: usize) -> Vec<DVector<f64>> {
    (1..=l).map(|i| DVector::from_element(1, i as f64 / l as f64)).collect()
}

/// `(l1 / s, l2 / s)` for `l1, l2 = 1..s` with `s = sqrt(L)`, row-major in `l1`.
pub fn locations_2d(l: usize) -> Result<Vec<DVector<f64>>> {
    let s = (l as f64).sqrt().round() as usize;
    if s * s != l || l == 0 {
        return Err(Error::Domain(format!("2D locations need a perfect-square count, got {l}")));
    }
    let mut out = Vec::with_capacity(l);
    for i in 1..=s {
        for j in 1..=s {
            out.push(DVector::from_vec(vec![i as f64 / s as f64, j as f64 / s as f64]));
        }
    }
    Ok(out)
}

impl ObservationMatrix {
    pub fn new(h: DMatrix<f64>, locations: Vec<DVector<f64>>) -> Result<Self> {
        if h.ncols() != locations.len() || locations.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "H has {} columns but {} locations were given",
                h.ncols(),
                locations.len()
            )));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("H has non-finite entries".into()));
        }
        for (i, a) in locations.iter().enumerate() {
            if locations[..i].iter().any(|b| b == a) {
                return Err(Error::Domain(format!("location {i} is repeated")));
            }
        }
        Ok(Self { h, locations })
    }

    /// Columns of `h` placed at `l / L`.
    pub fn sequence(h: DMatrix<f64>) -> Result<Self> {
        let l = h.ncols();
        Self::new(h, locations_1d(l))
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn locations(&self) -> &[DVector<f64>] {
        &self.locations
    }
}

/// `F[j][l] = psi_j(t_l)`.
pub fn design_matrix(basis: &RbfBasis, locations: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    if locations.is_empty() {
        return Err(Error::Domain("design matrix needs at least one location".into()));
    }
    if let Some(t) = locations.iter().find(|t| t.len() != basis.dimension()) {
        return Err(Error::DimensionMismatch(format!(
            "location of dimension {} for a basis of dimension {}",
            t.len(),
            basis.dimension()
        )));
    }
    Ok(DMatrix::from_fn(basis.len(), locations.len(), |j, l| basis.eval(j, locations[l].as_slice())))
}

/// `G = F^T (F F^T + ridge I)^{-1}`, solved through a Cholesky factor.
pub fn precompute_g(f: &DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(Error::Domain(format!("ridge must be >= 0, got {ridge}")));
    }
    let n = f.nrows();
    let gram = f * f.transpose() + DMatrix::identity(n, n) * ridge;
    let chol = gram.cholesky().ok_or(Error::SingularSystem)?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    if !(lo > 0.0) || (lo / hi).powi(2) < PIVOT_RATIO {
        return Err(Error::SingularSystem);
    }
    Ok(chol.solve(f).transpose())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    pub b: DMatrix<f64>,
    pub basis: RbfBasis,
}

impl ValueFunction {
    pub fn new(b: DMatrix<f64>, basis: RbfBasis) -> Result<Self> {
        if b.ncols() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "B has {} columns for {} basis functions",
                b.ncols(),
                basis.len()
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("B has non-finite entries".into()));
        }
        Ok(Self { b, basis })
    }

    /// `B psi(t)`.
    pub fn evaluate(&self, t: &[f64]) -> Result<DVector<f64>> {
        if t.len() != self.basis.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "point of dimension {} for a basis of dimension {}",
                t.len(),
                self.basis.dimension()
            )));
        }
        Ok(&self.b * self.basis.eval_all(t))
    }

    pub fn value_dim(&self) -> usize {
        self.b.nrows()
    }
}

/// A basis and location set with its `G` computed once and shared by every fit.
#[derive(Debug, Clone)]
pub struct RidgeFitter {
    basis: RbfBasis,
    locations: Vec<DVector<f64>>,
    ridge: f64,
    f: DMatrix<f64>,
    g: Arc<DMatrix<f64>>,
}

impl RidgeFitter {
    pub fn new(basis: RbfBasis, locations: Vec<DVector<f64>>, ridge: f64) -> Result<Self> {
        let f = design_matrix(&basis, &locations)?;
        let g = Arc::new(precompute_g(&f, ridge)?);
        Ok(Self { basis, locations, ridge, f, g })
    }

    pub fn g(&self) -> &Arc<DMatrix<f64>> {
        &self.g
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn locations(&self) -> &[DVector<f64>] {
        &self.locations
    }

    /// `B = H G`.
    pub fn fit(&self, h: &DMatrix<f64>) -> Result<ValueFunction> {
        if h.ncols() != self.locations.len() {
            return Err(Error::DimensionMismatch(format!(
                "H has {} columns for {} locations",
                h.ncols(),
                self.locations.len()
            )));
        }
        ValueFunction::new(h * self.g.as_ref(), self.basis.clone())
    }

    /// `||B F - H||_F`.
    pub fn residual(&self, value: &ValueFunction, h: &DMatrix<f64>) -> f64 {
        (&value.b * &self.f - h).norm()
    }

    /// `B (F F^T + ridge I) - H F^T`, zero at the ridge optimum.
    pub fn normal_equation_residual(&self, value: &ValueFunction, h: &DMatrix<f64>) -> f64 {
        let n = self.f.nrows();
        let gram = &self.f * self.f.transpose() + DMatrix::identity(n, n) * self.ridge;
        (&value.b * gram - h * self.f.transpose()).norm()
    }

    /// `||B F - H||_F^2 + ridge ||B||_F^2`.
    pub fn objective(&self, b: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
        (b * &self.f - h).norm_squared() + self.ridge * b.norm_squared()
    }
}

pub fn fit(obs: &ObservationMatrix, basis: &RbfBasis, ridge: f64) -> Result<ValueFunction> {
    RidgeFitter::new(basis.clone(), obs.locations.clone(), ridge)?.fit(&obs.h)
}
