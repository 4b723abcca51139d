//! Acceptance suite: one test per verification criterion, each printing a
//! single pass/fail line (visible with `--nocapture`). The criteria
//! themselves live in the library so that `weylquant verify` runs the same
//! checks.

use weylquant::verify::{run_criterion, CriterionResult};

fn check(id: u32) -> CriterionResult {
    let result = run_criterion(id);
    println!(
        "ACCEPTANCE {} {} ({}) [{} ms]",
        result.id,
        if result.passed { "PASS" } else { "FAIL" },
        result.name,
        result.millis
    );
    for d in &result.details {
        println!("    {d}");
    }
    result
}

#[test]
fn criterion_1_singular_orbit_worked_example() {
    let r = check(1);
    assert!(r.passed, "{:?}", r.details);
}

#[test]
fn criterion_2_figure_multiplicities() {
    let r = check(2);
    assert!(r.passed, "{:?}", r.details);
}

#[test]
fn criterion_3_equal_rank_multiplet_identity() {
    let r = check(3);
    assert!(r.passed, "{:?}", r.details);
}

#[test]
fn criterion_4_weyl_kostant_degeneration() {
    let r = check(4);
    assert!(r.passed, "{:?}", r.details);
}

#[test]
fn criterion_5_theorem_vs_character() {
    let r = check(5);
    assert!(r.passed, "{:?}", r.details);
}

#[test]
fn criterion_6_oracle_equivalences() {
    let r = check(6);
    assert!(r.passed, "{:?}", r.details);
}

#[test]
fn criterion_7_regular_points_formula_comparison() {
    let r = check(7);
    assert!(r.passed, "{:?}", r.details);
}

#[test]
fn criterion_8_negative_control() {
    let r = check(8);
    assert!(r.passed, "{:?}", r.details);
}
