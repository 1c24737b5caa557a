use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_colombeau"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("run colombeau")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const PUNCTURED: &str = "\
(point zero (const 0))
(set punctured (punctured @zero))
(check internal_member zero punctured (expect in))
(check strong_member_sharp zero punctured (expect out))
";

#[test]
fn eval_at_one_eps() {
    let o = run(&["eval", "(epspow 2)", "--eps", "0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "(eval (epspow 2) (0.5 0.25))");
}

#[test]
fn eval_over_a_custom_grid() {
    let o = run(&["eval", "(mask (intervals (0 0.1)) (const 1))", "--grid", "1..30"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("(0.5 0)"));
    assert!(out.contains("(0.0625 1)"));
}

#[test]
fn bad_grid_is_a_usage_error() {
    assert_eq!(run(&["eval", "(const 1)", "--grid", "4..5"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "(const 1)", "--grid", "x"]).status.code(), Some(2));
}

#[test]
fn valuation_and_classify() {
    let o = run(&["valuation", "(prod (const 3) (epspow -2))"]);
    assert!(stdout(&o).contains("(value -2)"));
    assert!(stdout(&o).contains("(method exact)"));
    let o = run(&["classify", "(recip (expinv))"]);
    assert!(stdout(&o).contains("negligible"), "{}", stdout(&o));
}

#[test]
fn member_modes() {
    let o = run(&["member", "(const 0)", "(punctured (const 0))", "--mode", "internal"]);
    assert!(stdout(&o).contains("(verdict in)"));
    let o = run(&["member", "(const 0)", "(punctured (const 0))"]);
    assert!(stdout(&o).contains("(verdict out)"));
}

#[test]
fn gsf_check_exit_codes() {
    let ok = run(&["gsf-check", "--family", "(sin x1)", "--domain", "(whole 1)", "--point", "(const 0)"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&[
        "gsf-check", "--family", "(exp x1)", "--domain", "(whole 1)", "--point", "(epspow -1)",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("non-moderate"));
}

#[test]
fn scenario_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "punctured.scn", PUNCTURED);
    let report = dir.path().join("report.txt");
    let o = bin()
        .args(["scenario", &path, "--seed", "7", "--report"])
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(text, stdout(&o));
    assert!(text.contains("(seed 7)"));
    assert!(text.contains("(mismatched 0)"));
}

#[test]
fn scenario_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let src = "(set a (ball (const 0) (const 1)))\n(set b (ball (const 0) (const 0.9)))\n(check subset a b (expect false))\n";
    let path = write(dir.path(), "s.scn", src);
    let a = run(&["scenario", &path, "--jobs", "2"]);
    let b = run(&["scenario", &path, "--jobs", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn empty_scenario_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "empty.scn", "; nothing\n");
    let o = run(&["scenario", &path]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(checks 0)"));
}

#[test]
fn mismatched_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.scn", &PUNCTURED.replace("(expect out)", "(expect in)"));
    assert_eq!(run(&["scenario", &path]).status.code(), Some(1));
}

#[test]
fn dangling_name_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "dangling.scn", "(point x (const 0))\n(check internal_member x nowhere)\n");
    let o = run(&["scenario", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn suites() {
    let o = run(&["suite", "ultrametric"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(passed true)"));
    assert_eq!(run(&["suite", "nosuch"]).status.code(), Some(2));
    let list = stdout(&run(&["suite", "--list"]));
    assert_eq!(list.lines().count(), 15);
}

#[test]
fn emit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let src = "\
(index s (intervals (0 0.1)))
(gsf sq (family (powi x1 2)) (domain (whole 1)) (catalog (const 0)))
(point zero (const 0))
";
    let path = write(dir.path(), "e.scn", src);
    let out = dir.path().join("s.csv");
    let o = bin().args(["emit", &path, "s", "--out"]).arg(&out).output().unwrap();
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("eps,value,ln_abs\n"));
    let o = run(&["emit", &path, "sq", "--kind", "ratio", "--with", "zero"]);
    let rows: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(rows[0], "k,ratio,ln_ratio");
    assert!(rows[1].starts_with("1,0.36787944117144"));
    assert_eq!(run(&["emit", &path, "missing"]).status.code(), Some(2));
}
