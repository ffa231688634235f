//! Acceptance criteria: one PASS/FAIL line per criterion; exits non-zero if any fails.
//!
//! `BASS_ACCEPTANCE_ONLY=3,5` restricts the run (prerequisites are added).

use std::process::ExitCode;

use bass_bench::verify::{Verifier, CRITERIA};

fn main() -> ExitCode {
    let ids: Vec<u8> = match std::env::var("BASS_ACCEPTANCE_ONLY") {
        Ok(list) => list.split(',').filter_map(|s| s.trim().parse().ok()).collect(),
        Err(_) => CRITERIA.iter().map(|c| c.0).collect(),
    };
    let threads = std::env::var("BASS_THREADS").ok().and_then(|t| t.parse().ok());
    println!("running {} acceptance criteria", Verifier::with_prerequisites(&ids).len());
    let outcomes = Verifier::new(threads).run(&ids, &mut std::io::stdout());
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        outcomes.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" ({failed:?})") }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
