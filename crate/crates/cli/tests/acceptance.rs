//! The full acceptance list at default tolerances, one line per criterion.
//! Runs without the libtest harness so the lines are never captured.

use std::process::ExitCode;

use sepint_cli::criteria::{run_list, ACCEPTANCE};
use sepint_cli::Tolerances;

fn main() -> ExitCode {
    let tol = Tolerances::defaults();
    let (results, timings) = run_list(&ACCEPTANCE, 0, &tol);
    println!("\nrunning {} acceptance criteria", ACCEPTANCE.len());
    for r in &results {
        let ms = timings.get(&format!("{:02}", r.id)).copied().unwrap_or(f64::NAN);
        println!("{}  [{ms:.0} ms]", r.line());
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
    for r in &failed {
        println!("criterion {} metrics: {}", r.id, serde_json::to_string(&r.metrics).unwrap_or_default());
    }
    if results.len() == ACCEPTANCE.len() && failed.is_empty() {
        println!("acceptance: {} passed; 0 failed\n", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} passed; {} failed\n", results.len() - failed.len(), failed.len());
        ExitCode::FAILURE
    }
}
