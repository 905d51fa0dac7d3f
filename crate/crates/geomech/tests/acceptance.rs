//! Acceptance suite: every structural criterion the library promises, run
//! at its stated tolerance with one printed line per check.
//!
//! Determinism of the CLI outputs is covered by the CLI crate's own
//! acceptance tests.

use geomech::verify::{run_suite, Suite};

fn run(suite: Suite) -> bool {
    let checks = run_suite(suite, 42);
    let mut all_passed = true;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {} — {}", check.name, check.detail);
        all_passed &= check.passed;
    }
    all_passed
}

#[test]
fn se3_operator_suite() {
    assert!(run(Suite::Lie), "lie suite failed");
}

#[test]
fn exterior_calculus_suite() {
    assert!(run(Suite::Forms), "forms suite failed");
}

#[test]
fn jet_bundle_suite() {
    assert!(run(Suite::Jet), "jet suite failed");
}

#[test]
fn variational_suite() {
    assert!(run(Suite::Variational), "variational suite failed");
}

#[test]
fn beam_suite() {
    assert!(run(Suite::Beam), "beam suite failed");
}
