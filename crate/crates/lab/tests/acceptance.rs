//! Acceptance suite: one line per criterion. Criteria listed in
//! `KNOWN_FAILURES` fail for reasons recorded in the decisions notes; any
//! other failure, or a known failure that starts passing, fails the target.

use std::process::ExitCode;

use hypercross_lab::verify::run_suite;
use hypercross_lab::ExperimentConfig;

/// 8: the equal-exponent counting law grows like E^2 ln E, not E^1.5 ln E.
/// 10: at j = 64 the homotopy is still about 8% above the Dirichlet levels.
const KNOWN_FAILURES: [u32; 2] = [8, 10];

fn main() -> ExitCode {
    let dir = std::env::temp_dir().join(format!("hypercross-acceptance-{}", std::process::id()));
    let cfg = ExperimentConfig::default()
        .apply([("subcommand", "verify"), ("out", dir.to_str().unwrap_or("."))])
        .expect("default config");
    let outcomes = run_suite(&cfg, |o| println!("{}", o.line()));
    let _ = std::fs::remove_dir_all(&dir);
    let unexpected: Vec<u32> =
        outcomes.iter().filter(|o| o.passed == KNOWN_FAILURES.contains(&o.id)).map(|o| o.id).collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} passed; expected failures {KNOWN_FAILURES:?}", outcomes.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
