//! Synthetic combined attention: discrete attention over a sequence plus
//! continuous attention over the moment-matched density, with an end-to-end
//! gradient check.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::attention::{forward, jacobian, moment_match_from_discrete, Moments, RbfBasis, DEFAULT_ANGULAR_NODES};
use crate::discrete::{jacobian_discrete, softmax, sparsemax, sparsemax_threshold, DiscreteKind, ScoreVector, SimplexVector};
use crate::error::{Error, Result};
use crate::value_fn::{locations_1d, RidgeFitter, ValueFunction, DEFAULT_RIDGE};

pub const DEFAULT_SEED: u64 = 42;
/// Scores are a noisy bump `-(t - c)^2 / BUMP_WIDTH`, so sparsemax keeps several positions.
const BUMP_WIDTH: f64 = 0.02;
const NOISE: f64 = 0.1;
const MAX_DRAWS: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct DemoConfig {
    pub seed: u64,
    pub alpha: f64,
    pub value_dim: usize,
    pub length: usize,
    pub basis_size: usize,
    pub rbf_sigma: f64,
    pub ridge: f64,
    pub fd_step: f64,
    pub tolerance: f64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            alpha: 1.0,
            value_dim: 8,
            length: 40,
            basis_size: 32,
            rbf_sigma: 0.1,
            ridge: DEFAULT_RIDGE,
            fd_step: 1e-6,
            tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub seed: u64,
    pub alpha: f64,
    pub locations: Vec<f64>,
    pub scores: Vec<f64>,
    pub discrete: Vec<f64>,
    pub mu: f64,
    pub sigma2: f64,
    pub continuous_density: Vec<f64>,
    pub context_discrete: Vec<f64>,
    pub context_continuous: Vec<f64>,
    pub context: Vec<f64>,
    pub grad_analytic: Vec<f64>,
    pub grad_finite_diff: Vec<f64>,
    pub max_grad_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

struct Pipeline {
    h: DMatrix<f64>,
    locations: Vec<DVector<f64>>,
    basis: RbfBasis,
    value: ValueFunction,
    alpha: f64,
}

struct Forward {
    p: SimplexVector,
    moments: Moments,
    c_disc: DVector<f64>,
    c_cont: DVector<f64>,
}

impl Pipeline {
    fn discrete(&self, f: &ScoreVector) -> SimplexVector {
        if self.alpha == 1.0 {
            softmax(f)
        } else {
            sparsemax(f)
        }
    }

    fn kind(&self) -> DiscreteKind {
        if self.alpha == 1.0 {
            DiscreteKind::Softmax
        } else {
            DiscreteKind::Sparsemax
        }
    }

    fn run(&self, f: &ScoreVector) -> Result<Forward> {
        let p = self.discrete(f);
        let moments = moment_match_from_discrete(&p, &self.locations)?;
        let c_disc = &self.h * DVector::from_column_slice(&p.probs);
        let r = forward(&moments, &self.basis, self.alpha, DEFAULT_ANGULAR_NODES)?;
        let c_cont = &self.value.b * r;
        Ok(Forward { p, moments, c_disc, c_cont })
    }

    fn loss(&self, f: &ScoreVector) -> Result<f64> {
        let out = self.run(f)?;
        Ok(out.c_disc.sum() + out.c_cont.sum())
    }

    /// Gradient of `sum(c)` with respect to the discrete scores.
    fn gradient(&self, f: &ScoreVector) -> Result<DVector<f64>> {
        let out = self.run(f)?;
        let (mu, s2) = (out.moments.mu[0], out.moments.cov[(0, 0)]);
        let ones = DVector::from_element(self.h.nrows(), 1.0);
        let jac = jacobian(&out.moments, &self.basis, self.alpha, DEFAULT_ANGULAR_NODES)?;
        let g_theta = jac * (self.value.b.transpose() * &ones);
        // theta = (mu / s2, -1 / (2 s2))
        let g_mu = g_theta[0] / s2;
        let g_s2 = -g_theta[0] * mu / (s2 * s2) + g_theta[1] / (2.0 * s2 * s2);
        let g_p = DVector::from_fn(self.locations.len(), |i, _| {
            let t = self.locations[i][0];
            let col: f64 = self.h.column(i).sum();
            col + g_mu * t + g_s2 * (t * t - 2.0 * mu * t)
        });
        Ok(jacobian_discrete(f, self.kind()).transpose() * g_p)
    }
}

/// Smallest distance of a score to the sparsemax threshold.
fn threshold_margin(f: &ScoreVector) -> f64 {
    let tau = sparsemax_threshold(f);
    f.iter().map(|v| (v - tau).abs()).fold(f64::INFINITY, f64::min)
}

fn draw_scores(rng: &mut ChaCha8Rng, locations: &[DVector<f64>], alpha: f64, step: f64) -> Result<ScoreVector> {
    for _ in 0..MAX_DRAWS {
        let c: f64 = rng.random_range(0.3..0.7);
        let values: Vec<f64> = locations
            .iter()
            .map(|t| {
                let e: f64 = rng.sample(StandardNormal);
                -(t[0] - c).powi(2) / BUMP_WIDTH + NOISE * e
            })
            .collect();
        let f = ScoreVector::new(values)?;
        // keep sparsemax supports of size >= 2 and away from the kinks of the map
        if alpha == 2.0 && (sparsemax(&f).support_size() < 2 || threshold_margin(&f) < 10.0 * step) {
            continue;
        }
        return Ok(f);
    }
    Err(Error::ToleranceNotReached("could not draw a support-stable score vector".into()))
}

pub fn run_demo(cfg: &DemoConfig) -> Result<DemoReport> {
    if cfg.alpha != 1.0 && cfg.alpha != 2.0 {
        return Err(Error::UnsupportedAlpha(cfg.alpha));
    }
    if cfg.value_dim == 0 || cfg.length < 2 || cfg.basis_size == 0 {
        return Err(Error::Domain("demo sizes must be positive, with at least two positions".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let h = DMatrix::from_fn(cfg.value_dim, cfg.length, |_, _| rng.sample::<f64, _>(StandardNormal));
    let locations = locations_1d(cfg.length);
    let basis = RbfBasis::linspace_1d(cfg.basis_size, cfg.rbf_sigma)?;
    let fitter = RidgeFitter::new(basis.clone(), locations.clone(), cfg.ridge)?;
    let value = fitter.fit(&h)?;
    let f = draw_scores(&mut rng, &locations, cfg.alpha, cfg.fd_step)?;
    let pipe = Pipeline { h, locations, basis, value, alpha: cfg.alpha };

    let out = pipe.run(&f)?;
    let analytic = pipe.gradient(&f)?;
    let mut numeric = DVector::zeros(f.len());
    for i in 0..f.len() {
        let mut plus = f.to_vec();
        let mut minus = f.to_vec();
        plus[i] += cfg.fd_step;
        minus[i] -= cfg.fd_step;
        let width = plus[i] - minus[i];
        numeric[i] = (pipe.loss(&ScoreVector::new(plus)?)? - pipe.loss(&ScoreVector::new(minus)?)?) / width;
    }
    let max_grad_error = (&analytic - &numeric).amax();

    let density = out.moments.density(cfg.alpha)?;
    let locs: Vec<f64> = pipe.locations.iter().map(|t| t[0]).collect();
    Ok(DemoReport {
        seed: cfg.seed,
        alpha: cfg.alpha,
        continuous_density: locs.iter().map(|&t| density.pdf_1d(t)).collect(),
        locations: locs,
        scores: f.to_vec(),
        discrete: out.p.probs.clone(),
        mu: out.moments.mu[0],
        sigma2: out.moments.cov[(0, 0)],
        context: (&out.c_disc + &out.c_cont).iter().copied().collect(),
        context_discrete: out.c_disc.iter().copied().collect(),
        context_continuous: out.c_cont.iter().copied().collect(),
        grad_analytic: analytic.iter().copied().collect(),
        grad_finite_diff: numeric.iter().copied().collect(),
        max_grad_error,
        tolerance: cfg.tolerance,
        passed: max_grad_error <= cfg.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_seed_passes_for_both_alphas() {
        for alpha in [1.0, 2.0] {
            let cfg = DemoConfig { alpha, ..DemoConfig::default() };
            let r = run_demo(&cfg).unwrap();
            assert!(r.passed, "alpha {alpha}: {}", r.max_grad_error);
            assert!((r.discrete.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            if alpha == 1.0 {
                assert!(r.continuous_density.iter().all(|&v| v > 0.0));
            } else if r.sigma2.sqrt() < 0.2 {
                assert!(r.continuous_density.contains(&0.0));
            }
        }
    }

    #[test]
    fn deterministic() {
        let cfg = DemoConfig { alpha: 2.0, ..DemoConfig::default() };
        let a = serde_json::to_string(&run_demo(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_demo(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
