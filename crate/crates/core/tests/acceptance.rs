//! Dedicated acceptance gate: runs every verification check and prints one
//! PASS/FAIL line per check. The test fails if any check fails.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the table.

use tetrafractal_core::verify::{all_passed, run_all};

#[test]
fn acceptance_criteria() {
    let results = run_all(2026);
    assert_eq!(results.len(), 10);
    println!();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {:2}. {} - {}", r.id, r.name, r.details);
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("#{} {}", r.id, r.name))
        .collect();
    assert!(
        all_passed(&results),
        "acceptance checks failed: {}",
        failed.join(", ")
    );
}
