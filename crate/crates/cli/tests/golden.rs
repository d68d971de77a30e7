mod common;

use common::{check_golden, compare_csv};

#[test]
fn exponents_match_reference() {
    check_golden("exponents").unwrap();
}

#[test]
fn conditional_matches_reference() {
    check_golden("conditional").unwrap();
}

#[test]
fn photons_match_reference() {
    check_golden("photons").unwrap();
}

#[test]
fn unconditional_matches_reference() {
    check_golden("unconditional").unwrap();
}

#[test]
fn comparison_detects_drift() {
    assert!(compare_csv("a,b\n1,0.25\n", "a,b\n1,0.25\n", 1e-9).is_ok());
    assert!(compare_csv("a,b\n1,0.2500000005\n", "a,b\n1,0.25\n", 1e-9).is_ok());
    assert!(compare_csv("a,b\n1,0.2500001\n", "a,b\n1,0.25\n", 1e-9).is_err());
    assert!(compare_csv("a,b\n1,x\n", "a,b\n1,y\n", 1e-9).is_err());
    assert!(compare_csv("a,b\n", "a,b\n1,2\n", 1e-9).is_err());
}
