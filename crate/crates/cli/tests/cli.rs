//! End-to-end tests of the installed binary surface.

use std::process::Command;

fn tbcurv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tbcurv"))
}

#[test]
fn metric_subcommand_prints_expected_matrix() {
    let out = tbcurv()
        .args([
            "metric",
            "--manifold",
            "sphere_stereo(1)",
            "--f",
            "1",
            "--variant",
            "sasaki",
            "--point",
            "0,0",
            "--fiber",
            "1,0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["matrix"][0][0], 4.0);
    assert_eq!(v["matrix"][3][3], 4.0);
    assert_eq!(v["matrix"][0][2], 0.0);
}

#[test]
fn curvature_subcommand_reports_small_errors_for_proof_reading() {
    let out = tbcurv()
        .args([
            "curvature",
            "--manifold",
            "sphere_stereo(1)",
            "--f",
            "exp(x1)",
            "--variant",
            "sasaki",
            "--pattern",
            "hvh",
            "--mode",
            "both",
            "--samples",
            "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for rec in v["samples"].as_array().unwrap() {
        assert!(rec["max_abs_err"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn geodesic_csv_has_expected_columns() {
    let out = tbcurv()
        .args([
            "geodesic",
            "--manifold",
            "euclidean(2)",
            "--f",
            "1",
            "--start",
            "0,0,0.5,0.5,1,0,0,0",
            "--t",
            "0.05",
            "--h",
            "0.01",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,x1,x2,u1,u2,xdot1,xdot2,udot1,udot2,energy"
    );
    assert_eq!(lines.count(), 6);
}

#[test]
fn verify_suite_all_passes_and_is_deterministic() {
    let run = || {
        let out = tbcurv()
            .args(["verify", "--suite", "all", "--seed", "7"])
            .output()
            .unwrap();
        assert!(out.status.success(), "verify must exit 0");
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        serde_json::to_string(&v).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "reports must be byte-identical modulo timestamp");
}

#[test]
fn verify_custom_fixture_marks_inapplicable_items() {
    let out = tbcurv()
        .args([
            "verify",
            "--manifold",
            "euclidean(2)",
            "--f",
            "1",
            "--seed",
            "3",
            "--samples",
            "5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["suite"], "custom");
    let items = v["items"].as_array().unwrap();
    let by_id = |id: &str| {
        items
            .iter()
            .find(|i| i["id"] == id)
            .unwrap_or_else(|| panic!("missing item {id}"))
    };
    // flat base with constant f: unflatness demonstration cannot apply
    assert_eq!(by_id("sasaki.cor3.6.unflatness")["status"], "NOT_APPLICABLE");
    // flatness applies and confirms
    assert_eq!(by_id("sasaki.thm3.5.flatness")["status"], "CONFIRMED");
    // the flat-base Cheeger-Gromoll scalar closing term is exact
    assert_eq!(by_id("cg.prop5.12.base_Sp")["status"], "CONFIRMED");
}

#[test]
fn bad_input_is_a_clean_error() {
    let out = tbcurv()
        .args([
            "metric",
            "--manifold",
            "nope(1)",
            "--variant",
            "sasaki",
            "--point",
            "0,0",
            "--fiber",
            "0,0",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown manifold"), "stderr: {err}");
}
