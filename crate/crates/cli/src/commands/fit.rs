use contattn::value_fn::{locations_1d, locations_2d, RidgeFitter};
use serde::Serialize;

use super::build_basis;
use crate::args::FitArgs;
use crate::error::CliResult;
use crate::io::{emit_json, read_matrix, JsonMatrix};

#[derive(Debug, Serialize)]
struct FitOutput {
    basis_size: usize,
    ridge: f64,
    b: JsonMatrix,
    /// `||B F - H||_F`.
    residual: f64,
    normal_equation_residual: f64,
}

pub fn run(a: &FitArgs) -> CliResult<()> {
    let h = read_matrix(&a.h)?;
    let dim = a.dimension as usize;
    let basis = build_basis(&a.basis, dim)?;
    let locations = if dim == 1 { locations_1d(h.ncols()) } else { locations_2d(h.ncols())? };
    let fitter = RidgeFitter::new(basis, locations, a.ridge)?;
    let v = fitter.fit(&h)?;
    let out = FitOutput {
        basis_size: v.basis.len(),
        ridge: a.ridge,
        residual: fitter.residual(&v, &h),
        normal_equation_residual: fitter.normal_equation_residual(&v, &h),
        b: (&v.b).into(),
    };
    emit_json(&out, a.out.as_deref())
}
