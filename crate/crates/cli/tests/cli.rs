use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn lambda0(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambda0")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn passing_scenarios_exit_zero() {
    let out = lambda0(&["verify", "--scenario", path_str(&scenario("name-tree.json"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: String = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("\"outcome\": \"pass\""));
}

#[test]
fn failed_expectations_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("name-tree.json")).unwrap();
    let wrong = text.replace("0.5358983848622454", "0.9");
    let file = dir.path().join("wrong.json");
    fs::write(&file, wrong).unwrap();
    let out = lambda0(&["verify", "--scenario", path_str(&file)]);
    assert_eq!(code(&out), 1);
}

#[test]
fn violated_hypotheses_exit_two() {
    let out = lambda0(&["verify", "--scenario", path_str(&scenario("name-chain-guard.json"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8(out.stdout).unwrap().contains("hypothesis_violated"));
}

#[test]
fn mixed_outcomes_take_the_worst() {
    let out = lambda0(&[
        "verify",
        "--scenario",
        path_str(&scenario("name-tree.json")),
        "--scenario",
        path_str(&scenario("name-chain-guard.json")),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&lambda0(&["verify"])), 3);
    assert_eq!(code(&lambda0(&["nonsense"])), 3);
    assert_eq!(code(&lambda0(&["verify", "--scenario", "/nonexistent.json"])), 3);
    let kind_mismatch = lambda0(&["hyperbolic", "--scenario", path_str(&scenario("name-tree.json"))]);
    assert_eq!(code(&kind_mismatch), 3);
    assert_eq!(code(&lambda0(&["gallery", "--name", "nope"])), 3);
    assert_eq!(code(&lambda0(&["spectra", "--scenario", path_str(&scenario("probe-graph.json")), "--format", "xml"])), 3);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    let text = fs::read_to_string(scenario("name-tree.json")).unwrap();
    fs::write(&file, text.replace("\"epsilon\"", "\"epsilom\"")).unwrap();
    assert_eq!(code(&lambda0(&["verify", "--scenario", path_str(&file)])), 3);
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&lambda0(&["--help"])), 0);
    assert_eq!(code(&lambda0(&["spectra", "--help"])), 0);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let out = lambda0(&[
            "spectra",
            "--scenario",
            path_str(&scenario("probe-graph.json")),
            "--out",
            path_str(d.path()),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(dirs[0].path().join("probe-graph.json")).unwrap();
    let b = fs::read(dirs[1].path().join("probe-graph.json")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn csv_reports_have_a_header_and_claims() {
    let dir = tempfile::tempdir().unwrap();
    let out = lambda0(&[
        "hyperbolic",
        "--scenario",
        path_str(&scenario("hyperbolic-constants.json")),
        "--out",
        path_str(dir.path()),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("hyperbolic-constants.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("name,x,y"));
    assert!(text.lines().any(|l| l.starts_with("claim:")));
}

#[test]
fn seed_override_reaches_the_report() {
    let out = lambda0(&["cover", "--scenario", path_str(&scenario("probe-cover.json")), "--seed", "41"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"seed\": 41"));
}

#[test]
fn gallery_runs_by_name() {
    let out = lambda0(&["gallery", "--name", "salpha"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"kind\": \"gallery\""));
}
