use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::math::{bisect, RootSpec};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Largest half-width tried when bracketing `a g'(a) - g(a) + g(0) = 1/2`.
const BRACKET_CAP: f64 = (1u64 << 30) as f64;

/// Convex generator `g` of a location-scale score `-g'(|t - mu| / sigma) / sigma`.
///
/// The normalizing half-width `a_star` (in units of sigma) is solved once at
/// construction.
#[derive(Clone)]
pub struct LocationScaleG {
    g: ScalarFn,
    g_prime: ScalarFn,
    a_star: f64,
    pub strong_convexity_hint: Option<f64>,
}

impl fmt::Debug for LocationScaleG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocationScaleG")
            .field("a_star", &self.a_star)
            .field("strong_convexity_hint", &self.strong_convexity_hint)
            .finish_non_exhaustive()
    }
}

impl LocationScaleG {
    pub fn new<G, D>(g: G, g_prime: D) -> Result<Self>
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        // convexity witness: g' must be nondecreasing on a sampled grid
        let mut prev = g_prime(0.0);
        for i in 1..=400 {
            let cur = g_prime(i as f64 * 0.025);
            if !(cur >= prev - 1e-12 * prev.abs().max(1.0)) {
                return Err(Error::Domain("g' is not nondecreasing; g is not convex".into()));
            }
            prev = cur;
        }

        let g0 = g(0.0);
        let excess = |a: f64| a * g_prime(a) - g(a) + g0 - 0.5;
        let mut hi = 1.0;
        while excess(hi) < 0.0 {
            hi *= 2.0;
            if hi > BRACKET_CAP {
                return Err(Error::NoBracket {
                    f_lo: excess(0.0),
                    f_hi: excess(BRACKET_CAP),
                });
            }
        }
        let spec = RootSpec {
            tolerance: 1e-14,
            max_iterations: 400,
        };
        let a_star = bisect(excess, 0.0, hi, &spec)?;
        Ok(Self {
            g: Arc::new(g),
            g_prime: Arc::new(g_prime),
            a_star,
            strong_convexity_hint: None,
        })
    }

    /// `g(s) = s^p / (p (p - 1))`: p = 2 gives the triangular family, p = 3
    /// the truncated parabola.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::Domain(format!("power generator needs p > 1, got {p}")));
        }
        let norm = p * (p - 1.0);
        let mut g = Self::new(move |s: f64| s.powf(p) / norm, move |s: f64| s.powf(p - 1.0) / (p - 1.0))?;
        if p == 2.0 {
            g.strong_convexity_hint = Some(1.0);
        }
        Ok(g)
    }

    pub fn g(&self, s: f64) -> f64 {
        (self.g)(s)
    }

    pub fn g_prime(&self, s: f64) -> f64 {
        (self.g_prime)(s)
    }

    pub fn a_star(&self) -> f64 {
        self.a_star
    }

    /// Residual of the defining equation at the cached root.
    pub fn root_residual(&self) -> f64 {
        let a = self.a_star;
        a * self.g_prime(a) - self.g(a) + self.g(0.0) - 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_generator_root() {
        let g = LocationScaleG::power(2.0).unwrap();
        assert!((g.a_star() - 1.0).abs() < 1e-12);
        assert!(g.root_residual().abs() < 1e-10);
    }

    #[test]
    fn cubic_generator_root() {
        let g = LocationScaleG::power(3.0).unwrap();
        assert!((g.a_star() - 1.5f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn custom_generator() {
        // g(s) = cosh(s): F(a) = a sinh(a) - cosh(a) + 1
        let g = LocationScaleG::new(f64::cosh, f64::sinh).unwrap();
        assert!(g.root_residual().abs() < 1e-10);
    }

    #[test]
    fn non_convex_rejected() {
        assert!(LocationScaleG::new(|s: f64| -s * s, |s: f64| -2.0 * s).is_err());
    }

    #[test]
    fn too_flat_has_no_bracket() {
        // g(s) = s: F(a) = 0 for all a
        let res = LocationScaleG::new(|s: f64| s, |_| 1.0);
        assert!(matches!(res, Err(Error::NoBracket { .. })));
    }
}
