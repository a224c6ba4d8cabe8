//! Runs all acceptance criteria and prints one pass/fail line per criterion.
//! Plain `main` (no libtest harness) so the lines are never captured.

use std::process::ExitCode;
use std::time::Instant;

use wsmorse::acceptance::{run_criterion, run_suite, suite_ids, CRITERIA};

const SEED: u64 = 20240611;

fn suites_are_deterministic() -> Result<(), String> {
    let a = run_suite("jacobi", SEED).map_err(|e| e.to_string())?;
    let b = run_suite("jacobi", SEED).map_err(|e| e.to_string())?;
    if a != b {
        return Err("two runs of the jacobi suite differ".into());
    }
    if suite_ids("nope").is_ok() {
        return Err("unknown suite accepted".into());
    }
    if suite_ids("core").map(|v| v.len()) != Ok(CRITERIA) {
        return Err("core suite does not cover every criterion".into());
    }
    Ok(())
}

fn main() -> ExitCode {
    // `cargo test -- <filter>` passes arguments; a filter that excludes us skips the run.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|f| "acceptance".contains(f.as_str())) {
        return ExitCode::SUCCESS;
    }
    let mut failed = Vec::new();
    println!("acceptance (seed {SEED})");
    for id in 1..=CRITERIA {
        let start = Instant::now();
        let result = run_criterion(id, SEED);
        println!("{}  [{:.2}s]", result.summary_line(), start.elapsed().as_secs_f64());
        for c in &result.checks {
            println!(
                "      {} {}: {:.6e} (target {:.3e}, tol {:.1e}, {})",
                if c.passed { "ok  " } else { "FAIL" },
                c.label,
                c.measured,
                c.target,
                c.tolerance,
                c.kind
            );
        }
        if !result.passed {
            failed.push(id);
        }
    }
    match suites_are_deterministic() {
        Ok(()) => println!("[PASS] suite determinism"),
        Err(e) => {
            println!("[FAIL] suite determinism: {e}");
            failed.push(0);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {CRITERIA} criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {failed:?}");
        ExitCode::FAILURE
    }
}
