//! Numeric normalizers: find `lambda` such that
//! `p(t) = [(alpha - 1)(f(t) - lambda)]_+^{1/(alpha - 1)}` integrates to one.

use std::cell::RefCell;

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::math::{bisect, integrate_adaptive, QuadratureSpec, RootSpec};

const GRID_POINTS: usize = 2001;
const GOLDEN_ITERS: usize = 90;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("numeric lambda needs alpha > 1, got {alpha}")));
    }
    Ok(())
}

fn unnormalized(v: f64, alpha: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let base = (alpha - 1.0) * v;
    if alpha == 2.0 {
        base
    } else {
        base.powf(1.0 / (alpha - 1.0))
    }
}

fn lambda_bracket(fmax: f64) -> (f64, f64) {
    (fmax - 10.0 * (1.0 + fmax.abs()), fmax)
}

/// Maximum of a unimodal function on `[lo, hi]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if hi - lo < 1e-15 * (1.0 + lo.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let candidates = [(lo, f(lo)), (hi, f(hi)), (x1, f1), (x2, f2)];
    candidates.into_iter().fold((lo, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc })
}

/// Result of the one-dimensional oracle.
pub struct NumericDensity1D<F> {
    pub lambda: f64,
    pub alpha: f64,
    f: F,
}

impl<F: Fn(f64) -> f64> NumericDensity1D<F> {
    pub fn pdf(&self, t: f64) -> f64 {
        unnormalized((self.f)(t) - self.lambda, self.alpha)
    }
}

struct Grid1D {
    t: Vec<f64>,
    values: Vec<f64>,
}

fn mass_1d<F: Fn(f64) -> f64>(f: &F, grid: &Grid1D, lambda: f64, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
    let root_spec = RootSpec { tolerance: 1e-15, max_iterations: 200 };
    let g = |t: f64| f(t) - lambda;
    let h = |t: f64| unnormalized(g(t), alpha);
    // positive runs of g on the grid, each extended to the bracketed crossings
    let n = grid.t.len();
    let mut total = 0.0;
    let mut i = 0;
    while i < n {
        if grid.values[i] - lambda <= 0.0 {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && grid.values[i + 1] - lambda > 0.0 {
            i += 1;
        }
        let lo = if start == 0 {
            grid.t[0]
        } else {
            bisect(&g, grid.t[start - 1], grid.t[start], &root_spec)?
        };
        let hi = if i == n - 1 {
            grid.t[n - 1]
        } else {
            bisect(&g, grid.t[i], grid.t[i + 1], &root_spec)?
        };
        // split at interior grid points so kinks of f are isolated by subdivision
        let mid = 0.5 * (lo + hi);
        total += integrate_adaptive(h, lo, mid, spec)? + integrate_adaptive(h, mid, hi, spec)?;
        i += 1;
    }
    Ok(total)
}

/// Finds `lambda` for a score `f` on the interval `domain`.
///
/// `f` must be continuous and its superlevel sets near `max f` must lie inside
/// `domain`; the lambda bracket is `[max f - 10 (1 + |max f|), max f]`.
pub fn lambda_numeric_oracle<F: Fn(f64) -> f64>(f: F, alpha: f64, domain: (f64, f64)) -> Result<NumericDensity1D<F>> {
    check_alpha(alpha)?;
    let (a, b) = domain;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("invalid domain [{a}, {b}]")));
    }
    let t: Vec<f64> = (0..GRID_POINTS).map(|i| a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64).collect();
    let values: Vec<f64> = t.iter().map(|&x| f(x)).collect();
    let (imax, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let lo = t[imax.saturating_sub(1)];
    let hi = t[(imax + 1).min(GRID_POINTS - 1)];
    let (_, fmax) = golden_max(&f, lo, hi);
    let fmax = fmax.max(values[imax]);
    let grid = Grid1D { t, values };
    let spec = QuadratureSpec::with_tolerance(1e-13);
    let (l_lo, l_hi) = lambda_bracket(fmax);
    let mut failure = None;
    let lambda = bisect(
        |l| match mass_1d(&f, &grid, l, alpha, &spec) {
            Ok(m) => m - 1.0,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        l_lo,
        l_hi,
        &RootSpec { tolerance: 1e-13, max_iterations: 200 },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(NumericDensity1D { lambda, alpha, f })
}

/// Result of the two-dimensional oracle.
pub struct NumericDensity2D<F> {
    pub lambda: f64,
    pub alpha: f64,
    f: F,
}

impl<F: Fn(&Vector2<f64>) -> f64> NumericDensity2D<F> {
    pub fn pdf(&self, t: &Vector2<f64>) -> f64 {
        unnormalized((self.f)(t) - self.lambda, self.alpha)
    }
}

/// Crossing of a function that is above zero at `inside` and not above zero at `outside`.
fn crossing<G: Fn(f64) -> f64>(g: G, inside: f64, outside: f64) -> Result<f64> {
    if g(outside) > 0.0 {
        return Ok(outside);
    }
    bisect(g, inside, outside, &RootSpec { tolerance: 1e-15, max_iterations: 200 })
}

struct Slice {
    y_arg: f64,
    value: f64,
}

fn slice_max<F: Fn(&Vector2<f64>) -> f64>(f: &F, x: f64, y0: f64, y1: f64) -> Slice {
    let (y_arg, value) = golden_max(|y| f(&Vector2::new(x, y)), y0, y1);
    Slice { y_arg, value }
}

fn mass_2d<F: Fn(&Vector2<f64>) -> f64>(
    f: &F,
    rect: [f64; 4],
    peak: &Vector2<f64>,
    lambda: f64,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let [x0, x1, y0, y1] = rect;
    let ridge = |x: f64| slice_max(f, x, y0, y1).value - lambda;
    if ridge(peak[0]) <= 0.0 {
        return Ok(0.0);
    }
    let xl = crossing(ridge, peak[0], x0)?;
    let xr = crossing(ridge, peak[0], x1)?;
    let c = 0.5 * (xl + xr);
    let h = 0.5 * (xr - xl);
    if !(h > 0.0) {
        return Ok(0.0);
    }
    let failure = RefCell::new(None);
    let inner = |x: f64| -> Result<f64> {
        let s = slice_max(f, x, y0, y1);
        if s.value <= lambda {
            return Ok(0.0);
        }
        let g = |y: f64| f(&Vector2::new(x, y)) - lambda;
        let lo = crossing(g, s.y_arg, y0)?;
        let hi = crossing(g, s.y_arg, y1)?;
        let p = |y: f64| unnormalized(g(y), alpha);
        Ok(integrate_adaptive(p, lo, s.y_arg, spec)? + integrate_adaptive(p, s.y_arg, hi, spec)?)
    };
    let outer = |phi: f64| {
        let x = c + h * phi.sin();
        match inner(x) {
            Ok(v) => v * h * phi.cos(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let half = std::f64::consts::FRAC_PI_2;
    let phi_peak = ((peak[0] - c) / h).clamp(-1.0, 1.0).asin();
    let total = integrate_adaptive(outer, -half, phi_peak, spec)? + integrate_adaptive(outer, phi_peak, half, spec)?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Two-dimensional oracle for concave scores on the rectangle `[x0, x1, y0, y1]`.
///
/// Superlevel sets are convex, so each vertical slice is one interval whose
/// ends are found by bisection from the slice maximum.
pub fn lambda_numeric_oracle_2d<F: Fn(&Vector2<f64>) -> f64>(
    f: F,
    alpha: f64,
    rect: [f64; 4],
) -> Result<NumericDensity2D<F>> {
    check_alpha(alpha)?;
    let [x0, x1, y0, y1] = rect;
    if !(x0 < x1 && y0 < y1) || rect.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("invalid rectangle {rect:?}")));
    }
    let (px, fmax) = golden_max(|x| slice_max(&f, x, y0, y1).value, x0, x1);
    let peak = Vector2::new(px, slice_max(&f, px, y0, y1).y_arg);
    let spec = QuadratureSpec::with_tolerance(1e-12);
    let (l_lo, l_hi) = lambda_bracket(fmax);
    let mut failure = None;
    let lambda = bisect(
        |l| match mass_2d(&f, rect, &peak, l, alpha, &spec) {
            Ok(m) => m - 1.0,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        l_lo,
        l_hi,
        &RootSpec { tolerance: 1e-12, max_iterations: 200 },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(NumericDensity2D { lambda, alpha, f })
}
