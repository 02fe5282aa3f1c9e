//! Slow reference implementations: quadrature expectations and covariances,
//! finite-difference Jacobians and exhaustive simplex projection. They share
//! nothing with the closed forms beyond the core numeric primitives.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector, Vector2};

use crate::densities::{DensityParams, SparseDensity, Support};
use crate::discrete::{ScoreVector, SimplexVector};
use crate::error::{Error, Result};
use crate::math::{integrate_adaptive, QuadratureSpec};

/// Every integration interval is cut into this many panels before adaptive
/// refinement, so narrow integrand features cannot slip between the first
/// Gauss-Kronrod nodes.
const PANELS: usize = 32;
const PANELS_2D: usize = 12;
const GAUSSIAN_WINDOW: f64 = 10.0;
pub const MAX_BRUTEFORCE_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDiffSpec {
    pub step: f64,
}

impl Default for FiniteDiffSpec {
    fn default() -> Self {
        Self { step: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedCovarianceSpec {
    pub beta: f64,
}

impl GeneralizedCovarianceSpec {
    pub fn new(beta: f64) -> Result<Self> {
        if beta != 0.0 && beta != 1.0 {
            return Err(Error::Domain(format!("beta must be 0 or 1, got {beta}")));
        }
        Ok(Self { beta })
    }
}

fn panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    let w = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + w * i as f64;
            let hi = if i + 1 == n { b } else { lo + w };
            integrate_adaptive(&f, lo, hi, spec)
        })
        .sum()
}

/// Integral of `h` against the weight `w(p(t))` over the support of `p`
/// (Gaussians: mean +/- 10 standard deviations per axis).
fn integrate_weighted<W, H>(p: &SparseDensity, w: W, h: H, spec: &QuadratureSpec) -> Result<f64>
where
    W: Fn(f64) -> f64,
    H: Fn(&[f64]) -> f64,
{
    match (p.params(), p.support()) {
        (DensityParams::Gaussian1D { mu, sigma2 }, _) => {
            let s = sigma2.sqrt() * GAUSSIAN_WINDOW;
            panels(|t| w(p.pdf_1d(t)) * h(&[t]), mu - s, mu + s, PANELS, spec)
        }
        (_, Support::Interval { .. }) => {
            let mut pts = match p.params() {
                DensityParams::TruncatedParabola { .. } => vec![],
                _ => p.location(),
            };
            let Support::Interval { lo, hi } = *p.support() else { unreachable!() };
            pts.insert(0, lo);
            pts.push(hi);
            let mut total = 0.0;
            for seg in pts.windows(2) {
                total += panels(|t| w(p.pdf_1d(t)) * h(&[t]), seg[0], seg[1], PANELS / 2, spec)?;
            }
            Ok(total)
        }
        (DensityParams::Gaussian2D { mu, cov }, _) => {
            let (sx, sy) = (cov[(0, 0)].sqrt() * GAUSSIAN_WINDOW, cov[(1, 1)].sqrt() * GAUSSIAN_WINDOW);
            let inner = |x: f64| {
                panels(
                    |y| w(p.pdf_2d(&Vector2::new(x, y))) * h(&[x, y]),
                    mu[1] - sy,
                    mu[1] + sy,
                    PANELS_2D,
                    spec,
                )
            };
            nested(inner, mu[0] - sx, mu[0] + sx, spec)
        }
        (_, Support::Ellipse(e)) => {
            // sine maps in both variables absorb the square-root ends of the chords
            let [x0, x1, ..] = e.bounding_box();
            let (cx, hx) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
            let inner = |phi: f64| {
                let x = cx + hx * phi.sin();
                let Some((y0, y1)) = e.chord(x) else { return Ok(0.0) };
                let (cy, hy) = (0.5 * (y0 + y1), 0.5 * (y1 - y0));
                let v = panels(
                    |psi| {
                        let y = cy + hy * psi.sin();
                        w(p.pdf_2d(&Vector2::new(x, y))) * h(&[x, y]) * hy * psi.cos()
                    },
                    -FRAC_PI_2,
                    FRAC_PI_2,
                    PANELS_2D,
                    spec,
                )?;
                Ok(v * hx * phi.cos())
            };
            nested(inner, -FRAC_PI_2, FRAC_PI_2, spec)
        }
        _ => Err(Error::Domain("unsupported density for quadrature".into())),
    }
}

fn nested<I: Fn(f64) -> Result<f64>>(inner: I, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    let failure = std::cell::RefCell::new(None);
    let outer = |x: f64| match inner(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let total = panels(outer, a, b, PANELS_2D, spec)?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// `E_p[g(t)]` by quadrature over the support of `p`.
pub fn expectation_quadrature<G: Fn(&[f64]) -> f64>(p: &SparseDensity, g: G, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    integrate_weighted(p, |v| v, g, spec)
}

fn escort_weight(beta: f64) -> impl Fn(f64) -> f64 {
    move |v: f64| {
        if v <= 0.0 {
            0.0
        } else if beta == 0.0 {
            1.0
        } else {
            v
        }
    }
}

/// `||p||_beta^beta (E[phi psi^T] - E[phi] E[psi]^T)` under the beta-escort,
/// every term by quadrature.
pub fn generalized_cov_quadrature<P, Q>(
    p: &SparseDensity,
    phi: P,
    psi: Q,
    cov_spec: GeneralizedCovarianceSpec,
    spec: &QuadratureSpec,
) -> Result<DMatrix<f64>>
where
    P: Fn(&[f64]) -> DVector<f64>,
    Q: Fn(&[f64]) -> DVector<f64>,
{
    let beta = GeneralizedCovarianceSpec::new(cov_spec.beta)?.beta;
    spec.validate()?;
    if beta == 0.0 && p.support().measure().is_none() {
        return Err(Error::InfiniteSupport);
    }
    let probe: Vec<f64> = p.location();
    let (n_phi, n_psi) = (phi(&probe).len(), psi(&probe).len());
    let w = escort_weight(beta);
    let mass = integrate_weighted(p, &w, |_| 1.0, spec)?;
    let mut e_phi = DVector::zeros(n_phi);
    for a in 0..n_phi {
        e_phi[a] = integrate_weighted(p, &w, |t| phi(t)[a], spec)?;
    }
    let mut e_psi = DVector::zeros(n_psi);
    for b in 0..n_psi {
        e_psi[b] = integrate_weighted(p, &w, |t| psi(t)[b], spec)?;
    }
    let mut out = DMatrix::zeros(n_phi, n_psi);
    for a in 0..n_phi {
        for b in 0..n_psi {
            let joint = integrate_weighted(p, &w, |t| phi(t)[a] * psi(t)[b], spec)?;
            out[(a, b)] = joint - e_phi[a] * e_psi[b] / mass;
        }
    }
    Ok(out)
}

/// Sufficient statistics `[t, vec(t t^T) row-major]`.
pub fn sufficient_statistics(t: &[f64]) -> DVector<f64> {
    let d = t.len();
    let mut v = Vec::with_capacity(d + d * d);
    v.extend_from_slice(t);
    for a in t {
        for b in t {
            v.push(a * b);
        }
    }
    DVector::from_vec(v)
}

/// Central-difference Jacobian, one row per output and one column per input.
pub fn finite_diff_jacobian<F>(mut f: F, x: &DVector<f64>, spec: FiniteDiffSpec) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    if !(spec.step > 0.0) {
        return Err(Error::Domain(format!("finite-difference step must be > 0, got {}", spec.step)));
    }
    let mut columns = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut plus = x.clone();
        plus[i] += spec.step;
        let mut minus = x.clone();
        minus[i] -= spec.step;
        // the representable step, so that rounding of x +/- h does not bias the quotient
        let width = plus[i] - minus[i];
        columns.push((f(&plus)? - f(&minus)?) / width);
    }
    let rows = columns.first().map_or(0, |c| c.len());
    Ok(DMatrix::from_fn(rows, x.len(), |r, c| columns[c][r]))
}

/// Euclidean projection onto the simplex by enumerating every support set.
pub fn simplex_projection_bruteforce(f: &ScoreVector) -> Result<SimplexVector> {
    let n = f.len();
    if n > MAX_BRUTEFORCE_LEN {
        return Err(Error::TooLarge(n));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as f64;
        let inside = |i: usize| mask & (1 << i) != 0;
        let sum: f64 = (0..n).filter(|&i| inside(i)).map(|i| f[i]).sum();
        let tau = (sum - 1.0) / size;
        let feasible = (0..n).all(|i| if inside(i) { f[i] - tau >= 0.0 } else { f[i] <= tau });
        if !feasible {
            continue;
        }
        let p: Vec<f64> = (0..n).map(|i| if inside(i) { f[i] - tau } else { 0.0 }).collect();
        let dist: f64 = p.iter().zip(f.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, p));
        }
    }
    let (_, probs) = best.ok_or_else(|| Error::Domain("no feasible support set".into()))?;
    let support_mask = probs.iter().map(|&v| v > 0.0).collect();
    Ok(SimplexVector { probs, support_mask })
}
