use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xyzcorr")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn f2_in_z() {
    let out = run(&["fn", "--n", "2", "--variable", "Z"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["num"], serde_json::json!(["27", "1"]));
    assert_eq!(v["den"], serde_json::json!(["25", "1"]));
}

#[test]
fn xxz_point_triple() {
    let v = json(&run(&["corr", "--n", "1", "--zeta", "0"]));
    assert_eq!((v["cx"].as_str(), v["cz"].as_str()), (Some("2/3"), Some("-1/3")));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["ed-verify", "--L", "4"]).status.code(), Some(2));
    assert_eq!(run(&["theta-suite", "--tau", "0"]).status.code(), Some(2));
    assert_eq!(run(&["fn", "--n", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["tau", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn failed_verification_exits_one() {
    let out = run(&["theta-suite", "--tau", "1", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], serde_json::json!(false));
}

#[test]
fn plot_data_is_deterministic_csv() {
    let a = run(&["plot-data", "--n", "1,2,3,4,5", "--zeta-range", "-6:6:600"]);
    let b = run(&["plot-data", "--n", "1,2,3,4,5", "--zeta-range", "-6:6:600"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("zeta,f_1,f_2,f_3,f_4,f_5,f_inf"));
    assert_eq!(lines.count(), 601);
    assert!(text.contains("\n0,1,1.08,"));
}

#[test]
fn pvi_residuals_serialize_as_zero() {
    let v = json(&run(&["pvi-verify", "--n-max", "3"]));
    for row in v["chain"].as_array().unwrap() {
        assert_eq!(row["fpqp_residual"], "0/1");
        assert_eq!(row["hamilton_residuals"], serde_json::json!(["0/1", "0/1"]));
    }
}

#[test]
fn quick_verification_passes() {
    let out = run(&["verify-all", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ed_skips_singular_inversion() {
    let v = json(&run(&["ed-verify", "--L", "3", "--zeta-grid", "-1,1/2"]));
    assert_eq!(v["samples"].as_array().unwrap().len(), 1);
    assert_eq!(v["skipped"].as_array().unwrap().len(), 1);
}
