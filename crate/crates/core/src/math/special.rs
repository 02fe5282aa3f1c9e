use std::f64::consts::PI;

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Below this magnitude erf uses the positive-term series, above it the
/// continued fraction for erfc.
const SERIES_LIMIT: f64 = 3.0;

/// erf(x) = 2/sqrt(pi) exp(-x^2) sum_n (2x^2)^n x / (1*3*...*(2n+1)).
/// Every term is positive, so there is no cancellation.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// erfc(x) for x >= SERIES_LIMIT by the Laplace continued fraction,
/// evaluated with the modified Lentz algorithm.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64 * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// The error function, accurate to about 1e-15 absolute on the real line.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < SERIES_LIMIT {
        erf_series(ax)
    } else if ax > 27.0 {
        1.0
    } else {
        1.0 - erfc_continued_fraction(ax)
    };
    value.copysign(x)
}

/// The complementary error function 1 - erf(x).
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= SERIES_LIMIT {
        if x > 27.0 {
            0.0
        } else {
            erfc_continued_fraction(x)
        }
    } else if x <= -SERIES_LIMIT {
        2.0 - erfc(-x)
    } else {
        1.0 - erf(x)
    }
}

/// erf(v) - erf(u), taken through erfc when both arguments sit in the same
/// far tail so the difference does not vanish to rounding.
pub fn erf_diff(u: f64, v: f64) -> f64 {
    if u >= SERIES_LIMIT && v >= SERIES_LIMIT {
        erfc(u) - erfc(v)
    } else if u <= -SERIES_LIMIT && v <= -SERIES_LIMIT {
        erfc(-v) - erfc(-u)
    } else {
        erf(v) - erf(u)
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive arguments (Lanczos approximation, g = 7).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return Ok(PI / ((PI * x).sin() * gamma_fn(1.0 - x)?));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{integrate_adaptive, QuadratureSpec};

    /// Independent route: (2/sqrt(pi)) * integral of exp(-t^2) from 0 to x.
    fn erf_by_quadrature(x: f64) -> f64 {
        let spec = QuadratureSpec {
            absolute_tolerance: 1e-15,
            ..QuadratureSpec::default()
        };
        let v = integrate_adaptive(|t| (-t * t).exp(), 0.0, x.abs(), &spec).unwrap();
        (FRAC_2_SQRT_PI * v).copysign(x)
    }

    #[test]
    fn erf_known_values() {
        assert_eq!(erf(0.0), 0.0);
        let at_one = erf_by_quadrature(1.0);
        assert!((at_one - 0.842_700_792_949_714_9).abs() < 1e-14);
        assert!((erf(1.0) - at_one).abs() < 1e-14);
        for x in [0.3, 1.7] {
            assert_eq!(erf(-x), -erf(x));
        }
    }

    #[test]
    fn erf_matches_quadrature_on_grid() {
        let mut x = -6.0;
        while x <= 6.0 {
            let expected = erf_by_quadrature(x);
            assert!((erf(x) - expected).abs() < 1e-13, "x = {x}: {} vs {expected}", erf(x));
            x += 0.0625;
        }
    }

    #[test]
    fn erf_continuous_across_branch_switch() {
        let below = erf(SERIES_LIMIT - 1e-12);
        let above = erf(SERIES_LIMIT + 1e-12);
        assert!((below - above).abs() < 1e-15);
        assert!((erfc(SERIES_LIMIT - 1e-12) - erfc(SERIES_LIMIT + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn erf_saturates_and_is_monotone() {
        assert!((erf(6.5) - 1.0).abs() < 1e-15);
        assert!((erf(-40.0) + 1.0).abs() < 1e-15);
        let mut prev = erf(-5.0);
        let mut x = -5.0;
        while x < 5.0 {
            x += 0.01;
            let cur = erf(x);
            assert!(cur >= prev);
            if x.abs() < 4.0 {
                assert!(cur > prev);
            }
            prev = cur;
        }
    }

    #[test]
    fn erfc_tail_is_accurate() {
        // erfc(5) = 1.5374597944280348e-12 (reference value)
        assert!(((erfc(5.0) - 1.537_459_794_428_034_8e-12) / 1.537_459_794_428_034_8e-12).abs() < 1e-12);
        assert!((erf_diff(5.0, 6.0) - (erfc(5.0) - erfc(6.0))).abs() < 1e-27);
        assert!((erf_diff(-6.0, -5.0) - (erfc(5.0) - erfc(6.0))).abs() < 1e-27);
        assert!((erf_diff(-1.0, 1.0) - 2.0 * erf(1.0)).abs() < 1e-15);
    }

    #[test]
    fn gamma_values() {
        let sqrt_pi = PI.sqrt();
        assert!((gamma_fn(3.0).unwrap() - 2.0).abs() < 1e-13);
        assert!((gamma_fn(0.5).unwrap() - sqrt_pi).abs() < 1e-13);
        assert!((gamma_fn(2.5).unwrap() - 0.75 * sqrt_pi).abs() < 1e-13);
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((gamma_fn(4.0).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_recurrence_on_required_grid() {
        for x in [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0] {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs, "x = {x}");
        }
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(matches!(gamma_fn(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma_fn(-1.5), Err(Error::Domain(_))));
    }
}
