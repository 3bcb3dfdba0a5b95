use std::process::ExitCode;

use delpezzo_core::acceptance::{run_all, AcceptanceConfig};

fn main() -> ExitCode {
    let outcomes = run_all(&AcceptanceConfig::default());
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
