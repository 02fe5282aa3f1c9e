use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use contattn::acceptance::DEFAULT_SEED;

use crate::io::parse_list;

#[derive(Debug, Parser)]
#[command(name = "contattn", version, about = "Continuous softmax and sparsemax attention: densities, forward/backward passes, checks")]
pub struct Cli {
    /// Seed for synthetic data (demo) and randomized checks.
    #[arg(long, global = true, env = "CONTATTN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a density on a uniform grid (CSV) with a JSON sidecar.
    Density(DensityArgs),
    /// Continuous attention forward pass and Jacobian for given moments or canonical parameters.
    Attend(AttendArgs),
    /// Ridge-fit the value function coefficients B to an observation matrix H.
    Fit(FitArgs),
    /// Run the acceptance suite.
    Check(CheckArgs),
    /// Synthetic combined discrete + continuous attention with a gradient check.
    Demo(DemoArgs),
}

/// Comma-separated floats, e.g. `0.5,0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct List(pub Vec<f64>);

impl FromStr for List {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_list(s).map(List)
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.trim() {
        "1" | "1.0" => Ok(1.0),
        "2" | "2.0" => Ok(2.0),
        _ => Err(format!("alpha must be 1 (softmax) or 2 (sparsemax), got {s}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Parabola,
    Triangular,
    LocationScale,
    Gaussian2d,
    Paraboloid,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Location; two comma-separated values for the 2D families.
    #[arg(long, default_value = "0")]
    pub mu: List,
    /// Variance (gaussian, parabola).
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Half-width of the triangular density.
    #[arg(long)]
    pub b: Option<f64>,
    /// Scale of the location-scale density.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Exponent p of the location-scale generator g(s) = s^p / (p (p - 1)).
    #[arg(long, default_value_t = 3.0)]
    pub power: f64,
    /// 2D covariance as `s11,s12,s22`.
    #[arg(long)]
    pub cov: Option<List>,
    /// Grid CSV path; the sidecar goes next to it with a .json extension unless --sidecar is given.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    /// Centers at k / (N - 1), including both ends of [0, 1].
    Endpoints,
    /// Centers at k / N; doubling N keeps every previous center.
    HalfOpen,
}

#[derive(Debug, Clone, Args)]
pub struct BasisArgs {
    /// Number of basis functions (a perfect square in 2D). Defaults: 32 in 1D, 100 in 2D.
    #[arg(long)]
    pub basis_size: Option<usize>,
    /// Standard deviation of the 1D basis functions.
    #[arg(long, default_value_t = 0.1)]
    pub rbf_sigma: f64,
    /// Isotropic variance of the 2D basis functions.
    #[arg(long, default_value_t = 0.001)]
    pub basis_variance: f64,
    #[arg(long, value_enum, default_value_t = Layout::Endpoints)]
    pub layout: Layout,
}

#[derive(Debug, Args)]
pub struct AttendArgs {
    #[arg(long, value_parser = parse_alpha, default_value = "1")]
    pub alpha: f64,
    /// Mean (one value in 1D, two in 2D).
    #[arg(long, conflicts_with = "theta")]
    pub mu: Option<List>,
    /// 1D variance.
    #[arg(long, conflicts_with_all = ["theta", "cov"])]
    pub sigma2: Option<f64>,
    /// 2D covariance as `s11,s12,s22`.
    #[arg(long, conflicts_with = "theta")]
    pub cov: Option<List>,
    /// Flat canonical parameters: `t1,t2` in 1D, `l1,l2,q11,q12,q21,q22` in 2D.
    #[arg(long)]
    pub theta: Option<List>,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Value coefficients B (JSON matrix, value_dim x N); adds the context vector B r.
    #[arg(long)]
    pub values: Option<PathBuf>,
    /// Compare against the quadrature and finite-difference oracles.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = contattn::attention::DEFAULT_ANGULAR_NODES)]
    pub angular_nodes: usize,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Observation matrix H (JSON matrix, value_dim x L).
    #[arg(long)]
    pub h: PathBuf,
    /// 1: locations l / L; 2: a sqrt(L) x sqrt(L) grid in (0, 1]^2.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dimension: u8,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long, default_value_t = contattn::value_fn::DEFAULT_RIDGE)]
    pub ridge: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Run only checks whose name contains this string.
    #[arg(long)]
    pub filter: Option<String>,
    /// Print a JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, value_parser = parse_alpha, default_value = "1")]
    pub alpha: f64,
    #[arg(long, default_value_t = 8)]
    pub value_dim: usize,
    #[arg(long, default_value_t = 40)]
    pub length: usize,
    #[arg(long, default_value_t = 32)]
    pub basis_size: usize,
    #[arg(long, default_value_t = 0.1)]
    pub rbf_sigma: f64,
    #[arg(long, default_value_t = contattn::value_fn::DEFAULT_RIDGE)]
    pub ridge: f64,
    /// Report JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Attention-map CSV: location, discrete probability, continuous density.
    #[arg(long)]
    pub map_out: Option<PathBuf>,
}
