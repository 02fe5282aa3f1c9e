use contattn::attention::RbfBasis;
use nalgebra::{Matrix2, Vector2};

use crate::args::{BasisArgs, Layout, List};
use crate::error::{CliError, CliResult};

pub mod attend;
pub mod check;
pub mod demo;
pub mod density;
pub mod fit;

fn coords(n: usize, layout: Layout) -> Vec<f64> {
    match layout {
        Layout::Endpoints if n == 1 => vec![0.5],
        Layout::Endpoints => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
        Layout::HalfOpen => (0..n).map(|k| k as f64 / n as f64).collect(),
    }
}

pub fn build_basis(args: &BasisArgs, dimension: usize) -> CliResult<RbfBasis> {
    if dimension == 1 {
        let n = args.basis_size.unwrap_or(32);
        if n == 0 {
            return Err(CliError::Input("--basis-size must be positive".into()));
        }
        return Ok(RbfBasis::new_1d(&coords(n, args.layout), &vec![args.rbf_sigma * args.rbf_sigma; n])?);
    }
    let n = args.basis_size.unwrap_or(100);
    let side = (n as f64).sqrt().round() as usize;
    if n == 0 || side * side != n {
        return Err(CliError::Input(format!("2D --basis-size must be a positive perfect square, got {n}")));
    }
    let axis = coords(side, args.layout);
    let centers: Vec<Vector2<f64>> = axis.iter().flat_map(|&x| axis.iter().map(move |&y| Vector2::new(x, y))).collect();
    Ok(RbfBasis::new_2d(&centers, &vec![Matrix2::identity() * args.basis_variance; n])?)
}

/// `s11,s12,s22` into a symmetric matrix.
pub fn parse_cov(list: &List) -> CliResult<Matrix2<f64>> {
    match list.0.as_slice() {
        &[a, b, c] => Ok(Matrix2::new(a, b, b, c)),
        other => Err(CliError::Input(format!("--cov takes three values s11,s12,s22, got {}", other.len()))),
    }
}

pub fn parse_point_2d(list: &List, flag: &str) -> CliResult<Vector2<f64>> {
    match list.0.as_slice() {
        &[x, y] => Ok(Vector2::new(x, y)),
        other => Err(CliError::Input(format!("{flag} takes two values in 2D, got {}", other.len()))),
    }
}
