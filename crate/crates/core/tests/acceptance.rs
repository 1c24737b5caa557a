//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use colombeau::net::EpsGrid;
use colombeau::setnets::SampleConfig;
use colombeau::suites::run_suite;

const CRITERIA: [(u32, &str, &str); 15] = [
    (1, "valuation exactness", "valuation"),
    (2, "ultrametric inequalities", "ultrametric"),
    (3, "idempotent algebra", "idempotents"),
    (4, "distance characterization of strong membership", "distance"),
    (5, "erosion / dilation decomposition", "sigma"),
    (6, "intersection identity", "intersection"),
    (7, "subset and same-set criteria", "subset"),
    (8, "containment", "containment"),
    (9, "moderateness certificates", "certificates"),
    (10, "representative independence", "representatives"),
    (11, "composition closure", "composition"),
    (12, "cut-off globalization", "cutoff"),
    (13, "first-order remainder ratios", "afj"),
    (14, "Lipschitz probe", "lipschitz"),
    (15, "gallery verdicts", "gallery"),
];

fn main() -> ExitCode {
    let grid = EpsGrid::default();
    let cfg = SampleConfig::default();
    let start = Instant::now();
    let mut failed = 0;
    for (id, title, suite) in CRITERIA {
        let t = Instant::now();
        let line = match run_suite(suite, &grid, cfg) {
            Ok(r) => {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                failed += !r.passed() as usize;
                let mut s = format!("{status} {id:>2} {title}: {}", r.summary());
                for f in r.failures.iter().take(5) {
                    s.push_str(&format!("\n        {f}"));
                }
                s
            }
            Err(e) => {
                failed += 1;
                format!("FAIL {id:>2} {title}: error: {e}")
            }
        };
        println!("{line} [{:.2}s]", t.elapsed().as_secs_f64());
    }
    println!(
        "acceptance: {}/15 passed in {:.1}s",
        15 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
