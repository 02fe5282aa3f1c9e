use crate::error::{Error, Result};

/// |beta - 1| below this selects the ordinary exp/log branch.
const UNIT_BETA_EPS: f64 = 1e-12;

/// The beta-exponential `[1 + (1 - beta) u]_+^{1/(1 - beta)}`, or `e^u` at beta = 1.
pub fn beta_exp(u: f64, beta: f64) -> f64 {
    if (beta - 1.0).abs() < UNIT_BETA_EPS {
        return u.exp();
    }
    let base = 1.0 + (1.0 - beta) * u;
    if base <= 0.0 {
        // For beta > 1 the exponent is negative and the function diverges
        // as the base approaches zero from above.
        return if beta > 1.0 { f64::INFINITY } else { 0.0 };
    }
    base.powf(1.0 / (1.0 - beta))
}

/// The beta-logarithm `(u^{1-beta} - 1) / (1 - beta)`, or `ln u` at beta = 1.
pub fn beta_log(u: f64, beta: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("beta_log requires u > 0, got {u}")));
    }
    if (beta - 1.0).abs() < UNIT_BETA_EPS {
        return Ok(u.ln());
    }
    Ok((u.powf(1.0 - beta) - 1.0) / (1.0 - beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_branch_is_exp() {
        for u in [-1.0, 0.0, 2.0] {
            assert_eq!(beta_exp(u, 1.0), u.exp());
        }
    }

    #[test]
    fn truncates_at_zero() {
        assert_eq!(beta_exp(-3.0, 0.0), 0.0);
        assert_eq!(beta_exp(-1.0, 0.0), 0.0);
        assert_eq!(beta_exp(0.5, 0.0), 1.5);
    }

    #[test]
    fn log_inverts_exp() {
        assert!((beta_log(beta_exp(0.7, 0.5), 0.5).unwrap() - 0.7).abs() < 1e-15);
        assert!((beta_log(std::f64::consts::E, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_domain() {
        assert!(beta_log(0.0, 0.5).is_err());
        assert!(beta_log(-1.0, 1.0).is_err());
    }

    #[test]
    fn monotone_and_inverse_on_grid() {
        for beta in [-1.0, 0.0, 0.5, 1.0, 1.5, 2.0] {
            let mut prev = f64::NEG_INFINITY;
            let mut u = -3.0;
            while u <= 3.0 {
                let e = beta_exp(u, beta);
                assert!(e >= prev, "beta = {beta}, u = {u}");
                prev = e;
                if e > 0.0 && e.is_finite() {
                    let back = beta_log(e, beta).unwrap();
                    assert!((back - u).abs() <= 1e-12, "beta = {beta}, u = {u}: {back}");
                }
                u += 0.05;
            }
        }
    }
}
