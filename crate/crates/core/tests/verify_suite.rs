use leibniz_ce::family::sign_table;
use leibniz_ce::verify::{registry, verify_all, verify_all_with, VerifyOptions, MANIFEST};

#[test]
fn small_run_passes_and_prints() {
    let report = verify_all(1, 5).unwrap();
    println!("{}", report.to_table());
    for c in report.failures() {
        println!("{}", serde_json::to_string(c).unwrap());
    }
    assert!(report.all_passed());
}

#[test]
fn coverage_independent_of_trials() {
    let one = verify_all(7, 1).unwrap();
    let ids: Vec<&str> = one.checks.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids.len(), MANIFEST.len());
    assert_eq!(ids, registry().iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(verify_all(7, 3).unwrap().checks.len(), one.checks.len());
}

#[test]
fn same_seed_same_bytes() {
    let a = serde_json::to_string(&verify_all(3, 2).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_all(3, 2).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn corrupted_sign_table_is_caught() {
    let n = 6;
    let bad = sign_table(n).unwrap().flipped(2);
    let opts = VerifyOptions { sign_override: Some((n, bad)) };
    let report = verify_all_with(1, 2, &opts).unwrap();
    let c = report.check("constraints/n=6").unwrap();
    assert!(!c.pass);
    assert!(c.notes.contains("identity fails at (e"), "{}", c.notes);
    let w = c.witness.as_ref().unwrap();
    assert!(w.triple.is_some() && w.params.is_some());
    // other dimensions are untouched
    assert!(report.check("constraints/n=5").unwrap().pass);
    assert!(report.check("constraints/n=7").unwrap().pass);
}
