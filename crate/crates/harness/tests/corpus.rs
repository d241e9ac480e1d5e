use std::path::PathBuf;

use ifc_core::Lattice;
use ifc_harness::corpus::{expected_rule, load_dir};
use ifc_harness::ni::{declared_secret, precondition_source, NiConfig, NiError};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn expect_header_is_read() {
    assert_eq!(expected_rule("; a leak\n; expect: FG-app\n(fg (lattice 2pt) true)"), Some("FG-app".into()));
    assert_eq!(expected_rule("(fg (lattice 2pt) true)"), None);
}

#[test]
fn leak_fixtures_are_rejected_by_the_named_rule() {
    let files = load_dir(&corpus().join("leaks")).unwrap();
    assert!(files.len() >= 20);
    let two = Lattice::two_point();
    for f in files {
        let expect = f.expect.clone().unwrap_or_else(|| panic!("{} has no expect header", f.path.display()));
        let (_, secret) = declared_secret(&f.source).unwrap();
        let cfg = NiConfig::new(secret, two.bot());
        match precondition_source(&f.source, two.bot(), &cfg) {
            Err(NiError::Precondition(e)) => assert_eq!(e.rule, expect, "{}: {e}", f.path.display()),
            other => panic!("{}: expected rejection by {expect}, got {other:?}", f.path.display()),
        }
    }
}
