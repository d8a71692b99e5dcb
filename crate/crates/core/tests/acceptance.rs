//! Acceptance gate: every criterion at its nominal trial count, seed 0,
//! block dimensions 1 to 8. One line per criterion; the process fails if any
//! criterion does.

use std::process::ExitCode;
use std::time::Instant;

use awkit::suites::{run_criterion, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let start = Instant::now();
    let mut failed = 0;
    println!("\nrunning {} acceptance criteria", CRITERIA.len());
    for (id, _) in CRITERIA {
        let t = Instant::now();
        let outcome = run_criterion(id, &cfg).expect("known criterion");
        println!("{outcome}  ({:.2}s)", t.elapsed().as_secs_f64());
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "\nacceptance: {} passed, {failed} failed in {:.2}s\n",
        CRITERIA.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
