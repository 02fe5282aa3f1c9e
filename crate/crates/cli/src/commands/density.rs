use std::path::Path;

use contattn::densities::{LocationScaleG, SparseDensity, Support};
use contattn::math::QuadratureSpec;
use contattn::oracle::expectation_quadrature;
use nalgebra::Vector2;
use serde_json::{json, Value};

use super::{parse_cov, parse_point_2d};
use crate::args::{DensityArgs, FamilyArg};
use crate::error::{CliError, CliResult};
use crate::io::{emit_json, write_csv};

pub const POINTS_1D: usize = 1001;
pub const SIDE_2D: usize = 201;
/// Each side of the support is padded by this fraction of its width.
const PAD: f64 = 0.2;
/// Gaussians are gridded over mean +/- this many standard deviations before padding.
const GAUSSIAN_SPAN: f64 = 4.0;
const MASS_TOLERANCE: f64 = 1e-8;

fn need(v: Option<f64>, flag: &str, family: &str) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Input(format!("--{flag} is required for the {family} family")))
}

fn build(a: &DensityArgs) -> CliResult<SparseDensity> {
    let one_d = || match a.mu.0.as_slice() {
        &[m] => Ok(m),
        other => Err(CliError::Input(format!("--mu takes one value in 1D, got {}", other.len()))),
    };
    let cov = || parse_cov(a.cov.as_ref().ok_or_else(|| CliError::Input("--cov is required in 2D".into()))?);
    Ok(match a.family {
        FamilyArg::Gaussian => SparseDensity::gaussian_1d(one_d()?, need(a.sigma2, "sigma2", "gaussian")?)?,
        FamilyArg::Parabola => SparseDensity::truncated_parabola(one_d()?, need(a.sigma2, "sigma2", "parabola")?)?,
        FamilyArg::Triangular => SparseDensity::triangular(one_d()?, need(a.b, "b", "triangular")?)?,
        FamilyArg::LocationScale => SparseDensity::location_scale(
            LocationScaleG::power(a.power)?,
            one_d()?,
            need(a.sigma, "sigma", "location-scale")?,
        )?,
        FamilyArg::Gaussian2d => SparseDensity::gaussian_2d(parse_point_2d(&a.mu, "--mu")?, cov()?)?,
        FamilyArg::Paraboloid => SparseDensity::truncated_paraboloid(parse_point_2d(&a.mu, "--mu")?, cov()?)?,
    })
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    let w = hi - lo;
    (lo - PAD * w, hi + PAD * w)
}

/// `n` points from `lo` to `hi`, written so the midpoint is hit exactly.
fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let m = (n - 1) as f64;
    (0..n).map(|i| c + h * ((2 * i) as f64 - m) / m).collect()
}

/// Grid extents per axis: the support (or a Gaussian window) padded on both sides.
fn extents(p: &SparseDensity) -> Vec<(f64, f64)> {
    let loc = p.location();
    match p.support() {
        Support::Interval { lo, hi } => vec![pad(*lo, *hi)],
        Support::Ellipse(e) => {
            let [x0, x1, y0, y1] = e.bounding_box();
            vec![pad(x0, x1), pad(y0, y1)]
        }
        Support::Whole => {
            let sd: Vec<f64> = match p.params() {
                contattn::densities::DensityParams::Gaussian1D { sigma2, .. } => vec![sigma2.sqrt()],
                contattn::densities::DensityParams::Gaussian2D { cov, .. } => vec![cov[(0, 0)].sqrt(), cov[(1, 1)].sqrt()],
                _ => unreachable!("only Gaussians have full support"),
            };
            loc.iter().zip(sd).map(|(m, s)| pad(m - GAUSSIAN_SPAN * s, m + GAUSSIAN_SPAN * s)).collect()
        }
    }
}

fn support_json(s: &Support) -> Value {
    match s {
        Support::Interval { lo, hi } => json!({ "kind": "interval", "lo": lo, "hi": hi }),
        Support::Ellipse(e) => json!({
            "kind": "ellipse",
            "center": [e.center[0], e.center[1]],
            "shape": [[e.shape()[(0, 0)], e.shape()[(0, 1)]], [e.shape()[(1, 0)], e.shape()[(1, 1)]]],
            "half_widths": [e.half_widths().0, e.half_widths().1],
            "area": e.area(),
        }),
        Support::Whole => json!({ "kind": "whole" }),
    }
}

pub fn run(a: &DensityArgs) -> CliResult<()> {
    let p = build(a)?;
    let ext = extents(&p);
    let grid_json = if p.dimension() == 1 {
        let (lo, hi) = ext[0];
        let ts = grid(lo, hi, POINTS_1D);
        write_csv(&a.out, &["t", "p"], ts.iter().map(|&t| vec![t, p.pdf_1d(t)]))?;
        json!({ "points": POINTS_1D, "lo": lo, "hi": hi })
    } else {
        let (xs, ys) = (grid(ext[0].0, ext[0].1, SIDE_2D), grid(ext[1].0, ext[1].1, SIDE_2D));
        let rows = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y)));
        write_csv(&a.out, &["x", "y", "p"], rows.map(|(x, y)| vec![x, y, p.pdf_2d(&Vector2::new(x, y))]))?;
        json!({ "side": SIDE_2D, "x": [ext[0].0, ext[0].1], "y": [ext[1].0, ext[1].1] })
    };
    let mass = expectation_quadrature(&p, |_| 1.0, &QuadratureSpec::with_tolerance(1e-12))?;
    let sidecar = json!({
        "family": p.family(),
        "alpha": p.alpha(),
        "dimension": p.dimension(),
        "location": p.location(),
        "lambda": p.lambda(),
        "support": support_json(p.support()),
        "grid": grid_json,
        "mass": mass,
        "mass_error": (mass - 1.0).abs(),
    });
    let path = a.sidecar.clone().unwrap_or_else(|| a.out.with_extension("json"));
    if path == a.out {
        return Err(CliError::Input("sidecar path would overwrite the grid CSV".into()));
    }
    emit_json(&sidecar, Some(Path::new(&path)))?;
    if mass.is_nan() || (mass - 1.0).abs() > MASS_TOLERANCE {
        return Err(CliError::Verification(format!("quadrature mass {mass} differs from 1 by more than {MASS_TOLERANCE:e}")));
    }
    Ok(())
}
