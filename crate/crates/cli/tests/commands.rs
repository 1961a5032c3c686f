use std::path::PathBuf;
use std::process::{Command, Output};

use phigamma::filtered::FilteredModule;
use phigamma_cli::formats::ModuleFile;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phigamma")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_example_two() {
    let o = run(&["analyze", &data("example2.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("admissible: false; witness: span(e); slopes: [-1, 1]"), "{}", stdout(&o));
}

#[test]
fn analyze_example_one() {
    let o = run(&["analyze", &data("example1.json")]);
    let s = stdout(&o);
    assert!(s.contains("t_N = 1, t_H = 1"), "{s}");
    assert!(s.contains("admissible: true; slopes: [0, 0]"), "{s}");
}

#[test]
fn ord_of_t() {
    let o = run(&["ord", &data("t.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "ord = 1 (window-limited)");
}

#[test]
fn singular_phi_fails_with_one() {
    let o = run(&["analyze", &data("singular.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("phi"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec!["analyze", "--x-window", "5", &data("example1.json")],
        vec!["analyze", "--levels", "0:2", &data("example1.json")],
        vec!["analyze", "/nonexistent/module.json"],
        vec!["verify", "--p", "3", &data("example1.json")],
        vec!["iota", "--level", "7", &data("q.json")],
        vec!["selftest", "--criterion", "11"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn json_is_deterministic() {
    let a = run(&["--json", "analyze", &data("example2.json")]);
    let b = run(&["--json", "analyze", &data("example2.json")]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["admissible"], false);
    assert_eq!(v["witness"]["span"], "span(e)");
    assert_eq!(v["slopes"], serde_json::json!(["-1", "1"]));
}

#[test]
fn construct_certifies() {
    let o = run(&["construct", "--levels", "1:2", &data("example1.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("PASS certificate: det phi = p^0 * unit, t_N - t_H = 0"), "{s}");
    assert!(!s.contains("FAIL"), "{s}");
}

#[test]
fn recover_round_trips_through_json() {
    let o = run(&["--json", "recover", "--levels", "1:2", &data("example3.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["matches_input"], true);
    let file: ModuleFile = serde_json::from_value(v["module"].clone()).unwrap();
    let got = file.to_module().unwrap();
    assert_eq!(got, FilteredModule::example(3, 2).unwrap());
    // emitting again gives the same document
    assert_eq!(serde_json::to_value(ModuleFile::from_module(&got)).unwrap(), v["module"]);
}

#[test]
fn membership_verdicts() {
    let o = run(&["membership", &data("member_e.json")]);
    assert!(stdout(&o).starts_with("member: true"), "{}", stdout(&o));
    let o = run(&["membership", &data("member_te.json")]);
    let s = stdout(&o);
    assert!(s.starts_with("member: false"), "{s}");
    assert!(s.contains("FAIL ord(x_1)"), "{s}");
    // the zero-order form needs Hodge weights <= 0, which example 1 lacks
    let o = run(&["membership", "--zero-order", &data("member_e.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Hodge weights"), "{}", stderr(&o));
}

#[test]
fn iota_of_q() {
    let o = run(&["--json", "iota", "--level", "2", &data("q.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // q(zeta_4 - 1) = zeta_4 + 1 = 2 + pi
    assert_eq!(v["log_coeffs"][0]["terms"][0]["t"], 0);
    assert_eq!(v["log_coeffs"][0]["terms"][0]["coeff"], serde_json::json!(["2", "1"]));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--p", "2", "--levels", "1:3"]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{s}");
    assert_eq!(s.lines().filter(|l| l.starts_with("PASS criterion")).count(), 10, "{s}");
    assert!(s.contains("10/10 criteria passed"));
}
