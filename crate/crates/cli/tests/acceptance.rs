//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--list`; nothing to list
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    // optional criterion ids select a subset, e.g. `-- 5 6`
    let mut ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if ids.is_empty() {
        ids = (1..=8).collect();
    }
    let mut failed = 0;
    for &id in &ids {
        let Some(r) = fpe_sim::acceptance::run_criterion(id) else {
            eprintln!("no criterion {id}");
            return ExitCode::FAILURE;
        };
        println!("{r}");
        failed += usize::from(!r.passed);
    }
    println!("acceptance: {} of {} criteria passed", ids.len() - failed, ids.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
