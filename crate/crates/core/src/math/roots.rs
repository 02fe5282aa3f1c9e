use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootSpec {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RootSpec {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Bisection on a sign-changing bracket.
///
/// Stops once `|f(x)| <= tolerance`, the bracket is narrower than the
/// tolerance, or its ends are adjacent floating-point numbers.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, spec: &RootSpec) -> Result<f64> {
    if !(spec.tolerance > 0.0) {
        return Err(Error::Domain("root tolerance must be positive".into()));
    }
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { f_lo, f_hi });
    }
    for _ in 0..spec.max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // adjacent floats: the bracket is as narrow as it can get
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid.abs() <= spec.tolerance || (hi - lo) <= spec.tolerance {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::ToleranceNotReached(format!(
        "bisection stopped after {} iterations with bracket [{lo}, {hi}]",
        spec.max_iterations
    )))
}
