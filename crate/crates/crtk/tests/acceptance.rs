//! The acceptance gate: every corpus criterion must pass at its stated
//! tolerance. One test per criterion; each prints its pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines,
//! or `crtk corpus` for the same checks through the CLI.

use crtk::acceptance::{run, DEFAULT_SEED};

fn run_criterion(tag: &str) {
    let results = run(Some(tag), DEFAULT_SEED);
    assert_eq!(results.len(), 1, "exactly one criterion tagged `{tag}`");
    let r = &results[0];
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn criterion_1_ppo_fixture_check() {
    run_criterion("ppo");
}

#[test]
fn criterion_2_interpretation_fixture_checks() {
    run_criterion("interp");
}

#[test]
fn criterion_3_sat_differential() {
    run_criterion("sat3");
}

#[test]
fn criterion_4_qbf_differential() {
    run_criterion("qbf");
}

#[test]
fn criterion_5_cache_polynomiality() {
    run_criterion("cache");
}

#[test]
fn criterion_6_canonical_interpretation_soundness() {
    run_criterion("conspres");
}

#[test]
fn criterion_7_normal_form_membership() {
    run_criterion("nf");
}

#[test]
fn criterion_8_orthogonality_confluence() {
    run_criterion("confluence");
}

#[test]
fn criterion_9_monotone_decrease() {
    run_criterion("monotone");
}
