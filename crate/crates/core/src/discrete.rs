//! Softmax, sparsemax and alpha-entmax over a finite set of scores.

use std::ops::Deref;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("score vector must be non-empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("score vector has a non-finite entry {v}")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Deref for ScoreVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexVector {
    pub probs: Vec<f64>,
    pub support_mask: Vec<bool>,
}

impl SimplexVector {
    fn from_probs(probs: Vec<f64>) -> Self {
        let support_mask = probs.iter().map(|&p| p > 0.0).collect();
        Self { probs, support_mask }
    }

    pub fn support_size(&self) -> usize {
        self.support_mask.iter().filter(|&&s| s).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiscreteKind {
    Softmax,
    Sparsemax,
}

pub fn softmax(f: &ScoreVector) -> SimplexVector {
    let m = f.max();
    let e: Vec<f64> = f.iter().map(|&v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    SimplexVector::from_probs(e.into_iter().map(|v| v / z).collect())
}

/// The sparsemax threshold: `sum_i [f_i - tau]_+ = 1`.
pub fn sparsemax_threshold(f: &ScoreVector) -> f64 {
    let mut sorted = f.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = sorted[0] - 1.0;
    for (k, &z) in sorted.iter().enumerate() {
        cumsum += z;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if z > candidate {
            tau = candidate;
        } else {
            break;
        }
    }
    tau
}

pub fn sparsemax(f: &ScoreVector) -> SimplexVector {
    let tau = sparsemax_threshold(f);
    SimplexVector::from_probs(f.iter().map(|&v| (v - tau).max(0.0)).collect())
}

fn entmax_probs(f: &[f64], lambda: f64, alpha: f64) -> Vec<f64> {
    let exponent = 1.0 / (alpha - 1.0);
    f.iter()
        .map(|&v| {
            let base = (alpha - 1.0) * (v - lambda);
            if base <= 0.0 {
                0.0
            } else {
                base.powf(exponent)
            }
        })
        .collect()
}

/// Alpha-entmax by bisection on the threshold.
pub fn alpha_entmax(f: &ScoreVector, alpha: f64) -> Result<SimplexVector> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha_entmax needs alpha > 1, got {alpha}")));
    }
    let m = f.max();
    // at lo the top entry alone has unit mass, at hi every entry is zero
    let mut lo = m - 1.0 / (alpha - 1.0);
    let mut hi = m;
    let mass = |l: f64| entmax_probs(f, l, alpha).iter().sum::<f64>() - 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let probs = entmax_probs(f, lo, alpha);
    let total: f64 = probs.iter().sum();
    if !((total - 1.0).abs() < 1e-6) {
        return Err(Error::ToleranceNotReached(format!("entmax mass {total} after bisection")));
    }
    Ok(SimplexVector::from_probs(probs.into_iter().map(|p| p / total).collect()))
}

/// `Diag(s) - s s^T / (1^T s)`, with `s = p` for softmax (whose sum is one)
/// and `s` the support indicator for sparsemax.
pub fn jacobian_discrete(f: &ScoreVector, kind: DiscreteKind) -> DMatrix<f64> {
    let s: Vec<f64> = match kind {
        DiscreteKind::Softmax => softmax(f).probs,
        DiscreteKind::Sparsemax => sparsemax(f).support_mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
    };
    let total: f64 = s.iter().sum();
    let n = s.len();
    DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { s[i] } else { 0.0 };
        diag - s[i] * s[j] / total
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[f64]) -> ScoreVector {
        ScoreVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn softmax_examples() {
        let p = softmax(&sv(&[0.0, 0.0, 0.0]));
        assert!(p.probs.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        let q = softmax(&sv(&[2f64.ln(), 0.0]));
        assert!((q.probs[0] - 2.0 / 3.0).abs() < 1e-15);
        let base = [0.3, -1.2, 2.0];
        for c in [-5.0, 7.0] {
            let shifted: Vec<f64> = base.iter().map(|v| v + c).collect();
            let (a, b) = (softmax(&sv(&base)), softmax(&sv(&shifted)));
            for (x, y) in a.probs.iter().zip(&b.probs) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sparsemax_examples() {
        assert_eq!(sparsemax(&sv(&[0.5, 0.5, -1.0])).probs, vec![0.5, 0.5, 0.0]);
        let p = sparsemax(&sv(&[2.0, 0.0]));
        assert_eq!(p.probs, vec![1.0, 0.0]);
        assert_eq!(p.support_mask, vec![true, false]);
        let u = sparsemax(&sv(&[0.0; 4]));
        assert!(u.probs.iter().all(|v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn sparsemax_tie_at_threshold_is_excluded() {
        // threshold is 0 and the last entry sits exactly on it
        let p = sparsemax(&sv(&[1.0, 0.0]));
        assert_eq!(p.probs, vec![1.0, 0.0]);
        assert_eq!(p.support_mask, vec![true, false]);
    }

    #[test]
    fn entmax_edges() {
        assert_eq!(alpha_entmax(&sv(&[3.7]), 1.5).unwrap().probs, vec![1.0]);
        let p = alpha_entmax(&sv(&[0.1, 0.5, -0.2]), 2.0).unwrap();
        let q = sparsemax(&sv(&[0.1, 0.5, -0.2]));
        for (a, b) in p.probs.iter().zip(&q.probs) {
            assert!((a - b).abs() < 1e-10);
        }
        let s = alpha_entmax(&sv(&[0.1, 0.5, -0.2]), 1.0001).unwrap();
        let t = softmax(&sv(&[0.1, 0.5, -0.2]));
        for (a, b) in s.probs.iter().zip(&t.probs) {
            assert!((a - b).abs() < 1e-3);
        }
        assert!(alpha_entmax(&sv(&[0.0]), 1.0).is_err());
        assert!(ScoreVector::new(vec![]).is_err());
        assert!(ScoreVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let j = jacobian_discrete(&sv(&[0.0, 0.0]), DiscreteKind::Softmax);
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]));
        let k = jacobian_discrete(&sv(&[0.0, 0.0]), DiscreteKind::Sparsemax);
        assert_eq!(k, DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]));
        let z = jacobian_discrete(&sv(&[3.0, 0.0]), DiscreteKind::Sparsemax);
        assert_eq!(z, DMatrix::zeros(2, 2));
    }
}
