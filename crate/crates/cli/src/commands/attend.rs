use contattn::attention::{attend, forward, Moments, RbfBasis};
use contattn::math::QuadratureSpec;
use contattn::oracle::{
    expectation_quadrature, finite_diff_jacobian, generalized_cov_quadrature, sufficient_statistics, FiniteDiffSpec,
    GeneralizedCovarianceSpec,
};
use contattn::value_fn::ValueFunction;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{build_basis, parse_cov, parse_point_2d};
use crate::args::AttendArgs;
use crate::error::{CliError, CliResult};
use crate::io::{emit_json, read_matrix, JsonMatrix};

#[derive(Debug, Serialize)]
struct Comparison {
    name: &'static str,
    max_abs_delta: f64,
    /// Absolute tolerance, scaled by `max(1, largest magnitude compared)`.
    tolerance: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct CheckReport {
    passed: bool,
    comparisons: Vec<Comparison>,
}

#[derive(Debug, Serialize)]
struct AttendOutput {
    alpha: f64,
    dimension: usize,
    mu: Vec<f64>,
    cov: JsonMatrix,
    theta: Vec<f64>,
    basis_size: usize,
    angular_nodes: usize,
    r: Vec<f64>,
    context: Option<Vec<f64>>,
    /// Rows follow `theta`, one column per basis function.
    jacobian: JsonMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<CheckReport>,
}

fn moments(a: &AttendArgs) -> CliResult<Moments> {
    if let Some(theta) = &a.theta {
        let dim = match theta.0.len() {
            2 => 1,
            6 => 2,
            n => return Err(CliError::Input(format!("--theta takes 2 (1D) or 6 (2D) values, got {n}"))),
        };
        return Ok(Moments::from_theta_flat(&theta.0, dim)?);
    }
    let mu = a.mu.as_ref().ok_or_else(|| CliError::Input("give --mu with --sigma2 or --cov, or --theta".into()))?;
    match mu.0.len() {
        1 => {
            let s2 = a.sigma2.ok_or_else(|| CliError::Input("--sigma2 is required in 1D".into()))?;
            Ok(Moments::new_1d(mu.0[0], s2)?)
        }
        2 => {
            let cov = parse_cov(a.cov.as_ref().ok_or_else(|| CliError::Input("--cov is required in 2D".into()))?)?;
            Ok(Moments::new_2d(parse_point_2d(mu, "--mu")?, cov)?)
        }
        n => Err(CliError::Input(format!("--mu takes 1 or 2 values, got {n}"))),
    }
}

fn compare(name: &'static str, got: &DMatrix<f64>, want: &DMatrix<f64>, tol: f64) -> Comparison {
    let scale = want.amax().max(got.amax()).max(1.0);
    let max_abs_delta = (got - want).amax();
    Comparison { name, max_abs_delta, tolerance: tol * scale, passed: max_abs_delta <= tol * scale }
}

fn column(v: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

/// Oracle comparisons: forward pass and Jacobian against quadrature, Jacobian
/// against central finite differences in the canonical parameters.
fn verify(m: &Moments, basis: &RbfBasis, alpha: f64, nodes: usize, r: &DVector<f64>, jac: &DMatrix<f64>) -> CliResult<CheckReport> {
    let dim = basis.dimension();
    let spec = QuadratureSpec::with_tolerance(1e-12);
    let p = m.density(alpha)?;
    let sparse_2d = alpha == 2.0 && dim == 2;
    let forward_tol = match (alpha == 1.0, dim) {
        (_, 1) => 1e-10,
        (true, _) => 1e-8,
        _ => 1e-6,
    };
    let jac_tol = if sparse_2d { 1e-4 } else { 1e-6 };
    let step = if sparse_2d { 1e-5 } else { 1e-6 };

    let r_oracle = (0..basis.len())
        .map(|j| expectation_quadrature(&p, |t| basis.eval(j, t), &spec))
        .collect::<Result<Vec<_>, _>>()?;
    let mut comparisons = vec![compare("forward vs quadrature", &column(r), &column(&DVector::from_vec(r_oracle)), forward_tol)];

    let beta = GeneralizedCovarianceSpec::new(2.0 - alpha)?;
    // one column at a time so each integrand evaluates a single basis function
    let mut cov_oracle = DMatrix::zeros(jac.nrows(), basis.len());
    for j in 0..basis.len() {
        let psi = |t: &[f64]| DVector::from_element(1, basis.eval(j, t));
        let col = generalized_cov_quadrature(&p, sufficient_statistics, psi, beta, &spec)?;
        cov_oracle.set_column(j, &col.column(0));
    }
    comparisons.push(compare("jacobian vs generalized covariance", jac, &cov_oracle, jac_tol));

    let theta = DVector::from_vec(m.theta_flat()?);
    let fwd = |th: &DVector<f64>| forward(&Moments::from_theta_flat(th.as_slice(), dim)?, basis, alpha, nodes);
    // in 2D the two off-diagonal entries move together, which measures J01 + J10
    let dirs: Vec<DVector<f64>> = if dim == 1 {
        vec![DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0])]
    } else {
        [[1., 0., 0., 0., 0., 0.], [0., 1., 0., 0., 0., 0.], [0., 0., 1., 0., 0., 0.], [0., 0., 0., 1., 1., 0.], [
            0., 0., 0., 0., 0., 1.,
        ]]
        .iter()
        .map(|d| DVector::from_column_slice(d))
        .collect()
    };
    let fd_dirs = if dim == 1 {
        finite_diff_jacobian(fwd, &theta, FiniteDiffSpec { step })?
    } else {
        let mut out = DMatrix::zeros(basis.len(), dirs.len());
        for (k, d) in dirs.iter().enumerate() {
            let col = (fwd(&(&theta + d * step))? - fwd(&(&theta - d * step))?) / (2.0 * step);
            out.set_column(k, &col);
        }
        out
    };
    let dmat = DMatrix::from_columns(&dirs);
    let closed_dirs = jac.transpose() * dmat;
    comparisons.push(compare("jacobian vs finite differences", &closed_dirs, &fd_dirs, jac_tol));

    if sparse_2d {
        let fine = forward(m, basis, alpha, 2 * nodes)?;
        comparisons.push(compare("angular refinement", &column(r), &column(&fine), 1e-7));
    }
    Ok(CheckReport { passed: comparisons.iter().all(|c| c.passed), comparisons })
}

pub fn run(a: &AttendArgs) -> CliResult<()> {
    let m = moments(a)?;
    let dim = m.mu.len();
    let basis = build_basis(&a.basis, dim)?;
    let value = match &a.values {
        Some(path) => Some(ValueFunction::new(read_matrix(path)?, basis.clone())?),
        None => None,
    };
    let res = attend(&m, &basis, value.as_ref(), a.alpha, a.angular_nodes)?;
    let check = if a.check { Some(verify(&m, &basis, a.alpha, a.angular_nodes, &res.r, &res.jacobian)?) } else { None };
    let failed: Vec<String> = check
        .iter()
        .flat_map(|c| &c.comparisons)
        .filter(|c| !c.passed)
        .map(|c| format!("{} (delta {:.3e} > {:.1e})", c.name, c.max_abs_delta, c.tolerance))
        .collect();
    let out = AttendOutput {
        alpha: a.alpha,
        dimension: dim,
        mu: m.mu.iter().copied().collect(),
        cov: (&m.cov).into(),
        theta: m.theta_flat()?,
        basis_size: basis.len(),
        angular_nodes: a.angular_nodes,
        r: res.r.iter().copied().collect(),
        context: res.context.map(|c| c.iter().copied().collect()),
        jacobian: (&res.jacobian).into(),
        check,
    };
    emit_json(&out, a.out.as_deref())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}
