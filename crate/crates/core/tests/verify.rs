use sphconv::verify::{run, to_csv, CSV_HEADER};
use sphconv::QuadratureSpec;

#[test]
fn spherical_suite_passes_and_is_reproducible() {
    let q = QuadratureSpec::default();
    let a = run("spherical", &q).unwrap();
    assert!(a.iter().all(|r| r.pass), "{}", to_csv(&a));
    let b = run("spherical", &q).unwrap();
    assert_eq!(to_csv(&a), to_csv(&b));
    assert!(to_csv(&a).starts_with(CSV_HEADER));
}

#[test]
fn unknown_suite_is_rejected() {
    assert!(run("nope", &QuadratureSpec::default()).is_err());
}
