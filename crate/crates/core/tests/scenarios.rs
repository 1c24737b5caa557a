use std::path::PathBuf;

use colombeau::scenario::{run_scenario, RunOptions, ScenarioDoc, Status};

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn shipped_scenarios_match_their_expectations() {
    let mut seen = 0;
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("scn") {
            continue;
        }
        seen += 1;
        let doc = ScenarioDoc::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let r = run_scenario(&doc, RunOptions::default()).unwrap();
        assert_eq!(r.exit_code(), 0, "{}:\n{}", path.display(), r.render());
        assert!(r.results.iter().all(|c| c.status == Status::Match));
        let back = ScenarioDoc::from_report(&r.render()).unwrap();
        assert_eq!(back, doc, "{}", path.display());
    }
    assert!(seen >= 3);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let src = std::fs::read_to_string(scenario_dir().join("membership.scn")).unwrap();
    let doc = ScenarioDoc::parse(&src).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = one.install(|| run_scenario(&doc, RunOptions::default()).unwrap().render());
    let b = run_scenario(&doc, RunOptions::default()).unwrap().render();
    assert_eq!(a, b);
}
