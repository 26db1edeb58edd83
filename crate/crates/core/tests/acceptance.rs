//! The acceptance gate: every criterion must pass on the full grid.
//! Prints one line per criterion so failures are attributable at a glance.

use nwe_disc::verify::{run_acceptance, Level};

#[test]
fn acceptance_criteria() {
    let results = run_acceptance(Level::Full);
    assert_eq!(results.len(), 9);
    let mut all_passed = true;
    for r in &results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        println!("[{mark}] criterion {}: {} — {}", r.id, r.name, r.detail);
        all_passed &= r.passed;
    }
    assert!(all_passed, "acceptance criteria failed; see lines above");
}
