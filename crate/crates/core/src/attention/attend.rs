use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::basis::RbfBasis;
use super::moments::Moments;
use super::softmax::{forward_softmax, jacobian_softmax};
use super::sparsemax::{forward_sparsemax_1d, forward_sparsemax_2d, jacobian_sparsemax_1d, jacobian_sparsemax_2d};
use crate::error::{Error, Result};
use crate::value_fn::ValueFunction;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttentionResult {
    /// `E_p[psi(t)]`.
    pub r: DVector<f64>,
    /// `B r`, when a value function was supplied.
    pub context: Option<DVector<f64>>,
    /// `d r / d theta`, one row per canonical parameter and one column per basis function.
    pub jacobian: DMatrix<f64>,
}

impl AttentionResult {
    /// `dL/dtheta = J B^T dL/dc`.
    pub fn backward(&self, value: &ValueFunction, upstream: &DVector<f64>) -> Result<DVector<f64>> {
        if upstream.len() != value.value_dim() {
            return Err(Error::DimensionMismatch(format!(
                "upstream gradient has length {}, values have dimension {}",
                upstream.len(),
                value.value_dim()
            )));
        }
        if value.b.ncols() != self.r.len() {
            return Err(Error::DimensionMismatch("value function and attention basis differ in size".into()));
        }
        Ok(&self.jacobian * (value.b.transpose() * upstream))
    }
}

/// Forward pass for `alpha = 1` (any dimension) or `alpha = 2` (dimension 1 or 2).
pub fn forward(m: &Moments, basis: &RbfBasis, alpha: f64, angular_nodes: usize) -> Result<DVector<f64>> {
    match (alpha, m.dimension()) {
        (1.0, _) => forward_softmax(m, basis),
        (2.0, 1) => forward_sparsemax_1d(m, basis),
        (2.0, 2) => forward_sparsemax_2d(m, basis, angular_nodes),
        (2.0, d) => Err(Error::DimensionMismatch(format!("sparsemax attention supports dimension 1 or 2, got {d}"))),
        (a, _) => Err(Error::UnsupportedAlpha(a)),
    }
}

pub fn jacobian(m: &Moments, basis: &RbfBasis, alpha: f64, angular_nodes: usize) -> Result<DMatrix<f64>> {
    match (alpha, m.dimension()) {
        (1.0, _) => jacobian_softmax(m, basis),
        (2.0, 1) => jacobian_sparsemax_1d(m, basis),
        (2.0, 2) => jacobian_sparsemax_2d(m, basis, angular_nodes),
        (2.0, d) => Err(Error::DimensionMismatch(format!("sparsemax attention supports dimension 1 or 2, got {d}"))),
        (a, _) => Err(Error::UnsupportedAlpha(a)),
    }
}

pub fn attend(
    m: &Moments,
    basis: &RbfBasis,
    value: Option<&ValueFunction>,
    alpha: f64,
    angular_nodes: usize,
) -> Result<AttentionResult> {
    let r = forward(m, basis, alpha, angular_nodes)?;
    let jacobian = jacobian(m, basis, alpha, angular_nodes)?;
    let context = match value {
        Some(v) => {
            if v.b.ncols() != basis.len() {
                return Err(Error::DimensionMismatch(format!(
                    "B has {} columns for {} basis functions",
                    v.b.ncols(),
                    basis.len()
                )));
            }
            Some(&v.b * &r)
        }
        None => None,
    };
    Ok(AttentionResult { r, context, jacobian })
}
