//! Deterministic quadrature: adaptive Gauss-Kronrod on intervals and
//! fixed-order Gauss-Legendre rules in one and two dimensions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for the quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub absolute_tolerance: f64,
    /// Maximum bisection depth of any single interval.
    pub max_subdivisions: u32,
    pub fixed_node_count: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            absolute_tolerance: 1e-10,
            max_subdivisions: 40,
            fixed_node_count: 64,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(absolute_tolerance: f64) -> Self {
        Self {
            absolute_tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.absolute_tolerance > 0.0) {
            return Err(Error::Domain("absolute_tolerance must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        if self.fixed_node_count < 2 {
            return Err(Error::Domain("fixed_node_count must be at least 2".into()));
        }
        Ok(())
    }
}

// 15-point Kronrod abscissae and weights, with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_SEGMENTS: usize = 100_000;

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Gauss-Kronrod 7/15 panel: (integral, error estimate, integral of |f|).
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut result_k = fc * WGK[7];
    let mut result_g = fc * WG[3];
    let mut result_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        result_k += WGK[j] * (f1 + f2);
        result_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * result_k;
    let mut result_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        result_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let result = result_k * half;
    let result_abs = result_abs * scale;
    let result_asc = result_asc * scale;
    let mut error = ((result_k - result_g) * half).abs();
    if result_asc != 0.0 && error != 0.0 {
        error = result_asc * (1.0f64).min((200.0 * error / result_asc).powf(1.5));
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * result_abs);
    }
    (result, error, result_abs)
}

/// Globally adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below the absolute tolerance (or below the rounding floor of
/// the integral, whichever is larger). Callers should pass kinks of
/// piecewise-smooth integrands as interval endpoints.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!("integration bounds must satisfy a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let (value, error, abs_value) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error, abs_value, depth: 0 });
    let mut total = value;
    let mut total_error = error;
    let mut total_abs = abs_value;

    loop {
        // per-panel estimates carry a 50 eps |f| rounding floor
        let target = spec.absolute_tolerance.max(64.0 * f64::EPSILON * total_abs);
        if total_error <= target {
            return Ok(total);
        }
        if heap.len() > MAX_SEGMENTS {
            return Err(Error::ToleranceNotReached(format!(
                "adaptive quadrature on [{a}, {b}]: error estimate {total_error:e} with {MAX_SEGMENTS} panels"
            )));
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::ToleranceNotReached(format!(
                "adaptive quadrature on [{a}, {b}]: error estimate {total_error:e} after exhausting {} levels",
                spec.max_subdivisions
            )));
        };
        if worst.depth >= spec.max_subdivisions {
            // cannot be refined further; its error stays in the total
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1, s1) = kronrod15(&f, worst.a, mid);
        let (v2, e2, s2) = kronrod15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        total_abs += s1 + s2 - worst.abs_value;
        let depth = worst.depth + 1;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, abs_value: s1, depth });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, abs_value: s2, depth });
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed-order Gauss-Legendre rule on `[a, b]`.
pub fn integrate_fixed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> f64 {
    let (x, w) = gauss_legendre(nodes);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>() * h
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }
}

/// Tensor-product Gauss-Legendre rule over a rectangle.
pub fn integrate_fixed_2d<F: Fn(f64, f64) -> f64>(f: F, domain: Rect, nodes_per_axis: usize) -> f64 {
    let (x, w) = gauss_legendre(nodes_per_axis);
    let (cx, hx) = (0.5 * (domain.x0 + domain.x1), 0.5 * (domain.x1 - domain.x0));
    let (cy, hy) = (0.5 * (domain.y0 + domain.y1), 0.5 * (domain.y1 - domain.y0));
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let px = cx + hx * xi;
        let mut row = 0.0;
        for (yj, wj) in x.iter().zip(&w) {
            row += wj * f(px, cy + hy * yj);
        }
        total += wi * row;
    }
    total * hx * hy
}

/// Iterated Gauss-Legendre rule over `{(x, y) : x_lo <= x <= x_hi, lo(x) <= y <= hi(x)}`.
///
/// Both variables are mapped through `x = c + h sin(phi)`, which absorbs
/// the square-root behaviour of chord lengths at the ends of convex regions
/// such as ellipses and of fractional powers vanishing on the boundary.
pub fn integrate_fixed_2d_chords<F, B>(f: F, x_lo: f64, x_hi: f64, y_bounds: B, nodes_per_axis: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
    B: Fn(f64) -> (f64, f64),
{
    let (z, w) = gauss_legendre(nodes_per_axis);
    let c = 0.5 * (x_lo + x_hi);
    let h = 0.5 * (x_hi - x_lo);
    let mut total = 0.0;
    for (zi, wi) in z.iter().zip(&w) {
        let phi = FRAC_PI_2 * zi;
        let x = c + h * phi.sin();
        let jac = h * phi.cos() * FRAC_PI_2;
        let (y0, y1) = y_bounds(x);
        if y1 <= y0 {
            continue;
        }
        let cy = 0.5 * (y0 + y1);
        let hy = 0.5 * (y1 - y0);
        let mut inner = 0.0;
        for (zj, wj) in z.iter().zip(&w) {
            let psi = FRAC_PI_2 * zj;
            inner += wj * psi.cos() * f(x, cy + hy * psi.sin());
        }
        total += wi * jac * inner * hy * FRAC_PI_2;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn elementary_integrals() {
        assert!((integrate_adaptive(|_| 1.0, 0.0, 1.0, &spec()).unwrap() - 1.0).abs() < 1e-14);
        assert!((integrate_adaptive(|t| t * t, 0.0, 1.0, &spec()).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(integrate_adaptive(|t| t, 2.0, 2.0, &spec()).unwrap(), 0.0);
    }

    #[test]
    fn standard_normal_mass() {
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        let mass = integrate_adaptive(pdf, -8.0, 8.0, &spec()).unwrap();
        // erf(8 / sqrt 2) differs from 1 by ~1.2e-15
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn polynomials_up_to_degree_six() {
        let coeffs = [0.3, -1.2, 0.7, 2.0, -0.4, 0.05, 1.1];
        let poly = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        let anti = |t: f64| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * t.powi(k as i32 + 1) / (k as f64 + 1.0))
                .sum::<f64>()
        };
        for (a, b) in [(-1.0, 1.0), (0.0, 3.0), (-2.5, 0.5)] {
            let got = integrate_adaptive(poly, a, b, &spec()).unwrap();
            assert!((got - (anti(b) - anti(a))).abs() < 1e-12);
        }
    }

    #[test]
    fn kinked_integrand_with_split() {
        let f = |t: f64| (1.0 - t.abs()).max(0.0);
        let left = integrate_adaptive(f, -1.0, 0.0, &spec()).unwrap();
        let right = integrate_adaptive(f, 0.0, 1.0, &spec()).unwrap();
        assert!((left + right - 1.0).abs() < 1e-14);
        // Without an explicit split the adaptive refinement still converges.
        let whole = integrate_adaptive(f, -1.3, 1.7, &spec()).unwrap();
        assert!((whole - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reports_failure_when_depth_exhausted() {
        let tight = QuadratureSpec {
            absolute_tolerance: 1e-14,
            max_subdivisions: 2,
            fixed_node_count: 64,
        };
        let res = integrate_adaptive(|t: f64| t.abs().sqrt(), -1.0, 1.0, &tight);
        assert!(matches!(res, Err(Error::ToleranceNotReached(_))));
    }

    #[test]
    fn rejects_reversed_bounds_and_bad_spec() {
        assert!(integrate_adaptive(|t| t, 1.0, 0.0, &spec()).is_err());
        let bad = QuadratureSpec { absolute_tolerance: 0.0, ..spec() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [2, 5, 8, 33, 256] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // integral of t^(2n-2) over [-1, 1]
            let p = (2 * n - 2) as i32;
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(p)).sum();
            assert!((got - 2.0 / (p as f64 + 1.0)).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn fixed_2d_rules() {
        let unit = Rect::new(0.0, 1.0, 0.0, 1.0);
        assert!((integrate_fixed_2d(|_, _| 1.0, unit, 8) - 1.0).abs() < 1e-14);
        assert!((integrate_fixed_2d(|x, y| x * y, unit, 8) - 0.25).abs() < 1e-14);
        let gauss = |x: f64, y: f64| (-0.5 * (x * x + y * y)).exp() / (2.0 * PI);
        let mass = integrate_fixed_2d(gauss, Rect::new(-8.0, 8.0, -8.0, 8.0), 128);
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn chord_rule_on_disc() {
        let bounds = |x: f64| {
            let h = (1.0 - x * x).max(0.0).sqrt();
            (-h, h)
        };
        let area = integrate_fixed_2d_chords(|_, _| 1.0, -1.0, 1.0, bounds, 64);
        assert!((area - PI).abs() < 1e-13);
        // paraboloid 1 - r^2 over the unit disc has volume pi / 2
        let vol = integrate_fixed_2d_chords(|x, y| 1.0 - x * x - y * y, -1.0, 1.0, bounds, 64);
        assert!((vol - PI / 2.0).abs() < 1e-13);
    }
}
