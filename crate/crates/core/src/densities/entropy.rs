use super::families::SparseDensity;
use crate::error::{Error, Result};
use crate::math::QuadratureSpec;

const QUAD_NODES_2D: usize = 256;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be > 0, got {alpha}")));
    }
    Ok(())
}

/// Integrand of the negentropy at a single density value.
fn local_term(v: f64, alpha: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else if alpha == 1.0 {
        v * v.ln()
    } else {
        v.powf(alpha)
    }
}

fn finish(integral: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        integral
    } else {
        (integral - 1.0) / (alpha * (alpha - 1.0))
    }
}

/// Tsallis negentropy of a probability vector (Shannon negentropy at alpha = 1).
pub fn tsallis_negentropy_discrete(p: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(finish(p.iter().map(|&v| local_term(v, alpha)).sum(), alpha))
}

/// Tsallis negentropy of a density, by quadrature over its support.
pub fn tsallis_negentropy(p: &SparseDensity, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let integral = match p.dimension() {
        1 => p.integrate_1d(|t| local_term(p.pdf_1d(t), alpha), &QuadratureSpec::with_tolerance(1e-12))?,
        _ => p.integrate_2d(|t| local_term(p.pdf_2d(t), alpha), QUAD_NODES_2D),
    };
    Ok(finish(integral, alpha))
}
