use contattn::demo::{run_demo, DemoConfig};

use crate::args::DemoArgs;
use crate::error::{CliError, CliResult};
use crate::io::{emit_json, write_csv};

pub fn run(a: &DemoArgs, seed: u64) -> CliResult<()> {
    let cfg = DemoConfig {
        seed,
        alpha: a.alpha,
        value_dim: a.value_dim,
        length: a.length,
        basis_size: a.basis_size,
        rbf_sigma: a.rbf_sigma,
        ridge: a.ridge,
        ..DemoConfig::default()
    };
    let report = run_demo(&cfg)?;
    if let Some(path) = &a.map_out {
        let rows = (0..report.locations.len())
            .map(|l| vec![report.locations[l], report.discrete[l], report.continuous_density[l]]);
        write_csv(path, &["t", "discrete", "continuous"], rows)?;
    }
    emit_json(&report, a.out.as_deref())?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "end-to-end gradient error {:.3e} exceeds {:.1e}",
            report.max_grad_error, report.tolerance
        )))
    }
}
