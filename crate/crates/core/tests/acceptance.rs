//! Acceptance gate: prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails. An optional positional argument filters checks by name.

use std::process::ExitCode;

use contattn::acceptance::{run_checks, DEFAULT_SEED};

fn main() -> ExitCode {
    // libtest flags such as --nocapture may be forwarded by cargo; skip them
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let outcomes = run_checks(filter.as_deref(), DEFAULT_SEED);
    println!("acceptance: {} criteria (seed {DEFAULT_SEED})", outcomes.len());
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
