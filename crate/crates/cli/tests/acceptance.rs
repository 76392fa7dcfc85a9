//! All acceptance criteria, one pass/fail line each. Runs without the test
//! harness so the lines appear in order as the criteria finish.

use std::process::ExitCode;

use coexact_cli::acceptance::run_all;

fn main() -> ExitCode {
    let results = run_all(|c| println!("{}", c.line()));
    let failed = results.iter().filter(|c| !c.passed).count();
    println!("{}/{} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
