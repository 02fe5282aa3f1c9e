use std::thread;

use contattn::acceptance::{checks, run_one, CheckOutcome};
use serde_json::json;

use crate::args::CheckArgs;
use crate::error::{CliError, CliResult};
use crate::io::emit_json;

pub fn run(a: &CheckArgs, seed: u64) -> CliResult<()> {
    let selected: Vec<_> = checks()
        .into_iter()
        .filter(|c| a.filter.as_deref().is_none_or(|f| c.name.contains(f)))
        .collect();
    if selected.is_empty() {
        return Err(CliError::Input(format!("no check matches filter {:?}", a.filter.as_deref().unwrap_or(""))));
    }
    // checks are independent; results come back in id order regardless of finish order
    let mut outcomes: Vec<CheckOutcome> = thread::scope(|s| {
        let handles: Vec<_> = selected.iter().map(|c| s.spawn(move || run_one(c, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    outcomes.sort_by_key(|o| o.id);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if a.json {
        emit_json(&json!({ "seed": seed, "passed": failed == 0, "checks": outcomes }), None)?;
    } else {
        println!("acceptance: {} criteria (seed {seed})", outcomes.len());
        for o in &outcomes {
            println!("{}", o.line());
        }
        println!("{} passed, {} failed", outcomes.len() - failed, failed);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(failed))
    }
}
