//! `colombeau`: evaluate nets, classify, test membership, certify functions,
//! run scenarios and suites, and emit CSV samples.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use colombeau::asymptotics::{classify, classify_regression, regression_valuation, valuation};
use colombeau::gsf::GsfDef;
use colombeau::net::{EpsGrid, GenNumber, NetExpr};
use colombeau::scenario::{emit_samples, run_scenario, GridSpec, RunOptions, SampleKind, ScenarioDoc};
use colombeau::setnets::{
    internal_member, sigma_check, strong_member_fermat, strong_member_sharp, SampleConfig, SetExpr,
    SIGMA_M_MAX,
};
use colombeau::sexpr::{parse_one, Sexp};
use colombeau::smooth::SmoothExpr;
use colombeau::suites::{run_suite, SUITES};
use colombeau::Error;

#[derive(Parser)]
#[command(name = "colombeau", version, about = "Generalized numbers, strongly internal sets and generalized smooth functions")]
struct Cli {
    /// Dyadic grid eps = 2^-k for k in k_min..k_max.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Seed of every pseudo-random sample.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Certification order of generalized smooth functions.
    #[arg(long, global = true, default_value_t = colombeau::gsf::DEFAULT_KMAX)]
    kmax: u32,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a net at one eps, or over the grid.
    Eval {
        net: String,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Valuation of a net.
    Valuation {
        net: String,
        /// Skip the exact layer.
        #[arg(long)]
        regression: bool,
    },
    /// Moderate / negligible classification of a net.
    Classify {
        net: String,
        #[arg(long)]
        regression: bool,
    },
    /// Membership of a point in a set family.
    Member {
        point: String,
        set: String,
        #[arg(long, value_enum, default_value_t = Mode::Sharp)]
        mode: Mode,
    },
    /// Moderateness certificate of a smooth family on a domain.
    GsfCheck {
        /// One smooth expression per component.
        #[arg(long = "family", required = true)]
        family: Vec<String>,
        #[arg(long)]
        domain: String,
        /// Catalog points.
        #[arg(long = "point", required = true)]
        points: Vec<String>,
    },
    /// Run a scenario file.
    Scenario { path: PathBuf },
    /// Run a built-in property suite.
    Suite {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Write CSV samples of a scenario object.
    Emit {
        scenario: PathBuf,
        name: String,
        #[arg(long, value_enum, default_value_t = Kind::Net)]
        kind: Kind,
        /// Set for distance samples, point for ratio samples.
        #[arg(long)]
        with: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Internal,
    Sharp,
    Fermat,
    Sigma,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Net,
    Distance,
    Ratio,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    GridSpec::parse(s).map_err(|e| e.to_string())
}

/// Failure of a command: a usage problem (exit 2) or a runtime one (exit 1).
enum Fail {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Unresolved { .. } | Error::UnknownSuite(_) => {
                Fail::Usage(e.to_string())
            }
            _ => Fail::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

/// Output text and whether every check passed.
type Outcome = Result<(String, bool), Fail>;

fn point(s: &str) -> Result<GenNumber, Error> {
    GenNumber::from_sexp(&parse_one(s)?)
}

fn net(s: &str) -> Result<NetExpr, Error> {
    NetExpr::from_sexp(&parse_one(s)?)
}

fn line(s: Sexp) -> String {
    let mut t = s.pretty();
    t.push('\n');
    t
}

fn run(cli: &Cli) -> Outcome {
    let spec = cli.grid.unwrap_or_default();
    let grid: EpsGrid = spec.grid()?;
    let cfg = SampleConfig {
        seed: cli.seed,
        ..SampleConfig::default()
    };
    let opts = RunOptions {
        grid: cli.grid,
        seed: cli.seed,
        kmax: cli.kmax,
    };
    Ok(match &cli.command {
        Command::Eval { net: src, eps } => {
            let n = net(src)?;
            let rows: Vec<f64> = match eps {
                Some(e) => vec![*e],
                None => grid.samples().to_vec(),
            };
            let mut items = vec![n.to_sexp()];
            for e in rows {
                if !(e > 0.0 && e <= 1.0) {
                    return Err(Fail::Usage(format!("eps={e} is outside (0, 1]")));
                }
                items.push(Sexp::list(vec![Sexp::num(e), Sexp::num(n.eval(e)?)]));
            }
            (line(Sexp::tagged("eval", items)), true)
        }
        Command::Valuation { net: src, regression } => {
            let n = net(src)?;
            let v = if *regression {
                regression_valuation(&n, &grid)?
            } else {
                valuation(&n, &grid)?
            };
            (line(v.to_sexp()), true)
        }
        Command::Classify { net: src, regression } => {
            let n = net(src)?;
            let c = if *regression {
                classify_regression(&n, &grid)?
            } else {
                classify(&n, &grid)?
            };
            (line(c.to_sexp()), true)
        }
        Command::Member { point: p, set, mode } => {
            let x = point(p)?;
            let a = SetExpr::from_sexp(&parse_one(set)?)?;
            let out = match mode {
                Mode::Internal => internal_member(&x, &a, &grid)?.to_sexp(),
                Mode::Sharp => strong_member_sharp(&x, &a, &grid)?.to_sexp(),
                Mode::Fermat => strong_member_fermat(&x, &a, &grid)?.to_sexp(),
                Mode::Sigma => {
                    let r = sigma_check(&x, &a, &grid, SIGMA_M_MAX)?;
                    Sexp::tagged(
                        "sigma",
                        vec![
                            Sexp::tagged("strong", vec![Sexp::atom(r.strong.name())]),
                            Sexp::tagged("internal", vec![Sexp::atom(r.internal.name())]),
                            Sexp::tagged("agrees", vec![Sexp::atom(r.agrees().to_string())]),
                        ],
                    )
                }
            };
            (line(out), true)
        }
        Command::GsfCheck { family, domain, points } => {
            let fam = family
                .iter()
                .map(|f| SmoothExpr::from_sexp(&parse_one(f)?))
                .collect::<Result<Vec<_>, Error>>()?;
            let dom = SetExpr::from_sexp(&parse_one(domain)?)?;
            let cat = points.iter().map(|p| point(p)).collect::<Result<Vec<_>, Error>>()?;
            let f = GsfDef::new(fam, dom, cat, &grid, cli.kmax)?;
            (line(f.certificate.to_sexp()), f.is_valid())
        }
        Command::Scenario { path } => {
            let src = std::fs::read_to_string(path)?;
            let doc = ScenarioDoc::parse(&src)?;
            let r = run_scenario(&doc, opts)?;
            (r.render(), r.passed())
        }
        Command::Suite { name, list } => {
            if *list {
                let text: String = SUITES.iter().map(|(n, d)| format!("{n:<16}{d}\n")).collect();
                return Ok((text, true));
            }
            let name = name
                .as_deref()
                .ok_or_else(|| Fail::Usage("give a suite name or --list".into()))?;
            let r = run_suite(name, &grid, cfg)?;
            let mut items = vec![
                Sexp::tagged("seed", vec![Sexp::atom(cli.seed.to_string())]),
                spec.to_sexp(),
            ];
            items.push(r.to_sexp());
            (line(Sexp::tagged("report", items)), r.passed())
        }
        Command::Emit {
            scenario,
            name,
            kind,
            with,
            out,
        } => {
            let doc = ScenarioDoc::parse(&std::fs::read_to_string(scenario)?)?;
            let kind = match kind {
                Kind::Net => SampleKind::Net,
                Kind::Distance => SampleKind::Distance,
                Kind::Ratio => SampleKind::Ratio,
            };
            let csv = emit_samples(&doc, name, kind, with.as_deref(), opts)?;
            match out {
                Some(p) => {
                    std::fs::write(p, &csv)?;
                    (String::new(), true)
                }
                None => (csv, true),
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
    {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok((text, ok)) => {
            print!("{text}");
            if let Some(p) = &cli.report {
                if let Err(e) = std::fs::write(p, &text) {
                    eprintln!("error: cannot write {}: {e}", p.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
