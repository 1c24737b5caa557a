//! Scenario documents: named definitions followed by checks, run in order
//! into a report.
//!
//! A scenario is a sequence of s-expressions:
//!
//! ```text
//! (grid 4 48)                                  ; optional
//! (point zero (const 0))
//! (set punctured (punctured (const 0)))
//! (check internal_member zero punctured (expect in))
//! (check strong_member_sharp zero punctured (expect out))
//! ```
//!
//! Definition kinds are `net`, `point`, `index`, `set`, `smooth`, `radii`
//! and `gsf`. Inside a definition body `@name` splices in an earlier
//! definition. Check arguments are definition names or number literals;
//! radii arguments may also be written inline (`sharp`, `powerband:2`).

use std::collections::HashMap;

use rayon::prelude::*;

use crate::asymptotics::{
    classify, eq_in_ring, is_infinitesimal, is_invertible, leq, lt, sharp_norm, standard_part,
    valuation, Verdict,
};
use crate::error::{Error, Result};
use crate::gsf::probes::{
    afj_probe, lipschitz_probe, null_check, representative_independence, uniform_moderateness,
    Perturbation,
};
use crate::gsf::{gsf_eval, GsfDef, DEFAULT_KMAX};
use crate::net::{idempotent, EpsGrid, GenNumber, IndexSet, NetExpr};
use crate::setnets::{
    containment_shadow, internal_member, openness_probe, perturbation_falsifier, same_strong_set,
    sharply_bounded, sigma_check, strong_member_fermat, strong_member_sharp, subset_criterion,
    MembershipVerdict, SampleConfig, SetExpr, SupReport, SIGMA_M_MAX,
};
use crate::sexpr::{format_f64, parse_all, Sexp};
use crate::smooth::SmoothExpr;
use crate::topology::{ball_member, radii_contains, tau_identified, RadiiSet};

/// Default numeric tolerance of `(expect <number>)`.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Perturbation order used by the `representative` check.
pub const PERTURBATION_ORDER: f64 = 20.0;
pub const LIPSCHITZ_PAIRS: usize = 100;

/// A dyadic grid `eps = 2^-k`, `k_min..=k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { k_min: 4, k_max: 48 }
    }
}

impl GridSpec {
    /// Parses `k_min..k_max`.
    pub fn parse(s: &str) -> Result<GridSpec> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| Error::parse(format!("expected k_min..k_max, got {s:?}")))?;
        let k = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::parse(format!("bad grid exponent {t:?}")))
        };
        let spec = GridSpec { k_min: k(a)?, k_max: k(b)? };
        spec.grid()?;
        Ok(spec)
    }

    pub fn grid(&self) -> Result<EpsGrid> {
        EpsGrid::dyadic(self.k_min, self.k_max)
    }

    pub fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "grid",
            vec![Sexp::atom(self.k_min.to_string()), Sexp::atom(self.k_max.to_string())],
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsfSpec {
    pub family: Vec<SmoothExpr>,
    pub domain: SetExpr,
    pub catalog: Vec<GenNumber>,
    pub kmax: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Object {
    /// Nets and points share a representation; nets are scalar points.
    Point(GenNumber),
    Index(IndexSet),
    Set(SetExpr),
    Smooth(SmoothExpr),
    Radii(RadiiSet),
    Gsf(GsfSpec),
}

impl Object {
    fn kind(&self) -> &'static str {
        match self {
            Object::Point(_) => "point",
            Object::Index(_) => "index",
            Object::Set(_) => "set",
            Object::Smooth(_) => "smooth",
            Object::Radii(_) => "radii",
            Object::Gsf(_) => "gsf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ArgKind {
    Net,
    Point,
    Index,
    Set,
    Smooth,
    Radii,
    Gsf,
    Num,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Arg {
    Name(String),
    Num(f64),
    Radii(RadiiSet),
}

impl Arg {
    fn to_sexp(&self) -> Sexp {
        match self {
            Arg::Name(n) => Sexp::atom(n.clone()),
            Arg::Num(x) => Sexp::num(*x),
            Arg::Radii(r) => Sexp::atom(r.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expect {
    pub label: String,
    pub tol: Option<f64>,
}

impl Expect {
    fn matches(&self, obs: &Outcome) -> bool {
        if let (Some(want), Some(got)) = (crate::sexpr::parse_f64(&self.label), obs.value) {
            let tol = self.tol.unwrap_or(DEFAULT_TOL);
            return want == got || (want - got).abs() <= tol;
        }
        self.label == obs.label
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub op: String,
    pub args: Vec<Arg>,
    pub expect: Option<Expect>,
    pub line: usize,
}

/// Check operations with their argument kinds.
const OPS: &[(&str, &[ArgKind])] = {
    use ArgKind::*;
    &[
        ("eval", &[Net, Num]),
        ("valuation", &[Net]),
        ("classify", &[Net]),
        ("standard_part", &[Point]),
        ("sharp_norm", &[Point]),
        ("eq", &[Point, Point]),
        ("leq", &[Point, Point]),
        ("lt", &[Point, Point]),
        ("invertible", &[Point]),
        ("infinitesimal", &[Point]),
        ("accumulates", &[Index]),
        ("internal_member", &[Point, Set]),
        ("strong_member_sharp", &[Point, Set]),
        ("strong_member_fermat", &[Point, Set]),
        ("falsifier", &[Point, Set]),
        ("openness", &[Point, Set]),
        ("sigma", &[Point, Set]),
        ("sharply_bounded", &[Set]),
        ("subset", &[Set, Set]),
        ("same_set", &[Set, Set]),
        ("containment", &[Set, Set]),
        ("radii_contains", &[Radii, Point]),
        ("ball_member", &[Point, Point, Point]),
        ("tau", &[Point, Point, Radii]),
        ("null", &[Smooth, Set]),
        ("gsf_valid", &[Gsf]),
        ("gsf_eq", &[Gsf, Point, Point]),
        ("gsf_valuation", &[Gsf, Point]),
        ("representative", &[Gsf, Point]),
        ("uniform_moderate", &[Gsf, Set]),
        ("lipschitz", &[Gsf, Set]),
        ("afj", &[Gsf, Point]),
    ]
};

pub fn op_names() -> impl Iterator<Item = &'static str> {
    OPS.iter().map(|o| o.0)
}

/// A parsed and fully resolved scenario.
#[derive(Debug, Clone)]
pub struct ScenarioDoc {
    pub grid: Option<GridSpec>,
    /// Definitions in source order.
    pub defs: Vec<(String, Object)>,
    pub checks: Vec<Check>,
    /// The source forms, echoed into reports.
    pub forms: Vec<Sexp>,
}

impl PartialEq for ScenarioDoc {
    fn eq(&self, other: &Self) -> bool {
        self.forms == other.forms
    }
}

fn unresolved(name: &str, at: &Sexp) -> Error {
    Error::Unresolved {
        name: name.to_string(),
        line: at.pos().line,
    }
}

/// Replaces every `@name` atom by the expanded body of `name`.
fn expand(s: &Sexp, bodies: &HashMap<String, Sexp>) -> Result<Sexp> {
    match s {
        Sexp::Atom(a, _) => match a.strip_prefix('@') {
            Some(name) => bodies.get(name).cloned().ok_or_else(|| unresolved(name, s)),
            None => Ok(s.clone()),
        },
        Sexp::List(items, p) => Ok(Sexp::List(
            items.iter().map(|i| expand(i, bodies)).collect::<Result<_>>()?,
            *p,
        )),
    }
}

fn parse_radii(s: &Sexp) -> Result<RadiiSet> {
    if let Some(a) = s.as_atom() {
        return RadiiSet::parse(a).map_err(|e| s.err(e.to_string()));
    }
    if s.head() == Some("generated") {
        let gens = s.expect_list()?[1..]
            .iter()
            .map(|g| Ok(GenNumber::scalar(NetExpr::from_sexp(g)?)))
            .collect::<Result<Vec<_>>>()?;
        if gens.is_empty() {
            return Err(s.err("`generated` needs at least one generator"));
        }
        return Ok(RadiiSet::Generated(gens));
    }
    Err(s.err("expected a set of radii"))
}

fn parse_gsf(rest: &[Sexp], at: &Sexp) -> Result<GsfSpec> {
    let mut family = None;
    let mut domain = None;
    let mut catalog = Vec::new();
    let mut kmax = None;
    for part in rest {
        let items = part.expect_list()?;
        match part.head() {
            Some("family") => {
                family = Some(
                    items[1..]
                        .iter()
                        .map(SmoothExpr::from_sexp)
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            Some("domain") => domain = Some(SetExpr::from_sexp(&part.args("domain", 1)?[0])?),
            Some("catalog") => {
                catalog = items[1..]
                    .iter()
                    .map(GenNumber::from_sexp)
                    .collect::<Result<Vec<_>>>()?
            }
            Some("kmax") => {
                let k = part.args("kmax", 1)?[0].expect_usize()?;
                kmax = Some(u32::try_from(k).map_err(|_| part.err("kmax out of range"))?);
            }
            _ => return Err(part.err("expected (family ...), (domain ...), (catalog ...) or (kmax k)")),
        }
    }
    let family = family
        .filter(|f| !f.is_empty())
        .ok_or_else(|| at.err("gsf needs a non-empty (family ...)"))?;
    let domain = domain.ok_or_else(|| at.err("gsf needs a (domain ...)"))?;
    Ok(GsfSpec {
        family,
        domain,
        catalog,
        kmax,
    })
}

fn parse_expect(s: &Sexp) -> Result<Expect> {
    let items = s.expect_list()?;
    if items.len() < 2 || items.len() > 3 {
        return Err(s.err("expected (expect label) or (expect number tolerance)"));
    }
    Ok(Expect {
        label: items[1].expect_atom()?.to_string(),
        tol: items.get(2).map(Sexp::expect_f64).transpose()?,
    })
}

impl ScenarioDoc {
    pub fn parse(src: &str) -> Result<ScenarioDoc> {
        Self::from_forms(parse_all(src)?)
    }

    pub fn from_forms(forms: Vec<Sexp>) -> Result<ScenarioDoc> {
        let mut grid = None;
        let mut bodies: HashMap<String, Sexp> = HashMap::new();
        let mut defs: Vec<(String, Object)> = Vec::new();
        let mut kinds: HashMap<String, ArgKind> = HashMap::new();
        let mut checks = Vec::new();
        for form in &forms {
            let head = form
                .head()
                .ok_or_else(|| form.err("expected a `(keyword ...)` form"))?;
            let items = form.expect_list()?;
            match head {
                "grid" => {
                    let a = form.args("grid", 2)?;
                    let k = |s: &Sexp| -> Result<u32> {
                        u32::try_from(s.expect_usize()?).map_err(|_| s.err("grid exponent out of range"))
                    };
                    let spec = GridSpec { k_min: k(&a[0])?, k_max: k(&a[1])? };
                    spec.grid().map_err(|e| form.err(e.to_string()))?;
                    grid = Some(spec);
                }
                "check" => checks.push(Self::parse_check(form, &kinds)?),
                "net" | "point" | "index" | "set" | "smooth" | "radii" | "gsf" => {
                    if items.len() < 3 {
                        return Err(form.err(format!("`{head}` needs a name and a body")));
                    }
                    let name = items[1].expect_atom()?.to_string();
                    if bodies.contains_key(&name) {
                        return Err(items[1].err(format!("`{name}` is defined twice")));
                    }
                    if head != "gsf" && items.len() != 3 {
                        return Err(form.err(format!("`{head}` takes a name and one body")));
                    }
                    let body = expand(&items[2], &bodies)?;
                    let rest: Vec<Sexp> =
                        items[2..].iter().map(|i| expand(i, &bodies)).collect::<Result<_>>()?;
                    let (obj, kind) = match head {
                        "net" => {
                            let n = NetExpr::from_sexp(&body)?;
                            (Object::Point(GenNumber::scalar(n)), ArgKind::Net)
                        }
                        "point" => (Object::Point(GenNumber::from_sexp(&body)?), ArgKind::Point),
                        "index" => (Object::Index(IndexSet::from_sexp(&body)?), ArgKind::Index),
                        "set" => (Object::Set(SetExpr::from_sexp(&body)?), ArgKind::Set),
                        "smooth" => (Object::Smooth(SmoothExpr::from_sexp(&body)?), ArgKind::Smooth),
                        "radii" => (Object::Radii(parse_radii(&body)?), ArgKind::Radii),
                        _ => (Object::Gsf(parse_gsf(&rest, form)?), ArgKind::Gsf),
                    };
                    let spliced = if head == "gsf" {
                        Sexp::list(rest)
                    } else {
                        body
                    };
                    bodies.insert(name.clone(), spliced);
                    kinds.insert(name.clone(), kind);
                    defs.push((name, obj));
                }
                other => return Err(form.err(format!("unknown form `{other}`"))),
            }
        }
        Ok(ScenarioDoc {
            grid,
            defs,
            checks,
            forms,
        })
    }

    fn parse_check(form: &Sexp, kinds: &HashMap<String, ArgKind>) -> Result<Check> {
        let items = form.expect_list()?;
        let op_atom = items
            .get(1)
            .ok_or_else(|| form.err("`check` needs an operation"))?;
        let op = op_atom.expect_atom()?;
        let sig = OPS
            .iter()
            .find(|o| o.0 == op)
            .ok_or_else(|| op_atom.err(format!("unknown check `{op}`")))?
            .1;
        let mut rest = &items[2..];
        let mut expect = None;
        if let Some(last) = rest.last() {
            if last.head() == Some("expect") {
                expect = Some(parse_expect(last)?);
                rest = &rest[..rest.len() - 1];
            }
        }
        if rest.len() != sig.len() {
            return Err(form.err(format!(
                "`{op}` takes {} argument(s), found {}",
                sig.len(),
                rest.len()
            )));
        }
        let mut args = Vec::with_capacity(sig.len());
        for (a, &want) in rest.iter().zip(sig) {
            let text = a.expect_atom()?;
            if want == ArgKind::Num {
                args.push(Arg::Num(a.expect_f64()?));
                continue;
            }
            match kinds.get(text) {
                Some(&have) => {
                    let ok = have == want
                        || (want == ArgKind::Point && have == ArgKind::Net)
                        || (want == ArgKind::Net && matches!(have, ArgKind::Point | ArgKind::Index));
                    if !ok {
                        return Err(a.err(format!("`{text}` is a {have:?} but `{op}` needs a {want:?}")));
                    }
                    args.push(Arg::Name(text.to_string()));
                }
                None if want == ArgKind::Radii => args.push(Arg::Radii(parse_radii(a)?)),
                None => return Err(unresolved(text, a)),
            }
        }
        Ok(Check {
            op: op.to_string(),
            args,
            expect,
            line: form.pos().line,
        })
    }

    fn object(&self, name: &str) -> Option<&Object> {
        self.defs.iter().find(|d| d.0 == name).map(|d| &d.1)
    }

    /// Pulls the echoed scenario back out of a report.
    pub fn from_report(text: &str) -> Result<ScenarioDoc> {
        let report = crate::sexpr::parse_one(text)?;
        let items = report.args_any("report")?;
        let echo = items
            .iter()
            .find(|i| i.head() == Some("scenario"))
            .ok_or_else(|| report.err("report has no (scenario ...) section"))?;
        Self::from_forms(echo.expect_list()?[1..].to_vec())
    }
}

trait ArgsAny {
    fn args_any(&self, head: &str) -> Result<&[Sexp]>;
}

impl ArgsAny for Sexp {
    fn args_any(&self, head: &str) -> Result<&[Sexp]> {
        if self.head() != Some(head) {
            return Err(self.err(format!("expected `({head} ...)`")));
        }
        Ok(&self.expect_list()?[1..])
    }
}

/// Result of one check: a label compared against the expectation, an
/// optional number for numeric expectations, and supporting detail.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub value: Option<f64>,
    pub details: Vec<Sexp>,
}

impl Outcome {
    fn label(label: impl Into<String>) -> Outcome {
        Outcome {
            label: label.into(),
            value: None,
            details: Vec::new(),
        }
    }

    fn verdict(v: Verdict) -> Outcome {
        Outcome::label(v.name())
    }

    fn number(x: f64) -> Outcome {
        Outcome {
            label: format_f64(x),
            value: Some(x),
            details: Vec::new(),
        }
    }

    fn with(mut self, d: Sexp) -> Outcome {
        self.details.push(d);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Match,
    Mismatch,
    /// No expectation given.
    Unchecked,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Match => "match",
            Status::Mismatch => "mismatch",
            Status::Unchecked => "unchecked",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check: Check,
    pub outcome: Outcome,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub seed: u64,
    pub grid: GridSpec,
    pub doc: ScenarioDoc,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn mismatches(&self) -> usize {
        self.results.iter().filter(|r| r.status == Status::Mismatch).count()
    }

    pub fn passed(&self) -> bool {
        self.mismatches() == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![
            Sexp::tagged("seed", vec![Sexp::atom(self.seed.to_string())]),
            self.grid.to_sexp(),
            Sexp::tagged("scenario", self.doc.forms.clone()),
        ];
        for (i, r) in self.results.iter().enumerate() {
            let mut c = vec![
                Sexp::tagged("index", vec![Sexp::atom((i + 1).to_string())]),
                Sexp::tagged("line", vec![Sexp::atom(r.check.line.to_string())]),
                Sexp::tagged("op", vec![Sexp::atom(r.check.op.clone())]),
                Sexp::tagged("args", r.check.args.iter().map(Arg::to_sexp).collect()),
                Sexp::tagged("observed", vec![Sexp::atom(r.outcome.label.clone())]),
            ];
            if let Some(e) = &r.check.expect {
                c.push(Sexp::tagged("expected", vec![Sexp::atom(e.label.clone())]));
            }
            c.push(Sexp::tagged("status", vec![Sexp::atom(r.status.name())]));
            if !r.outcome.details.is_empty() {
                c.push(Sexp::tagged("details", r.outcome.details.clone()));
            }
            items.push(Sexp::tagged("check", c));
        }
        let count = |s: Status| self.results.iter().filter(|r| r.status == s).count();
        items.push(Sexp::tagged(
            "summary",
            vec![
                Sexp::tagged("checks", vec![Sexp::atom(self.results.len().to_string())]),
                Sexp::tagged("matched", vec![Sexp::atom(count(Status::Match).to_string())]),
                Sexp::tagged("mismatched", vec![Sexp::atom(count(Status::Mismatch).to_string())]),
                Sexp::tagged("unchecked", vec![Sexp::atom(count(Status::Unchecked).to_string())]),
                Sexp::tagged("exit", vec![Sexp::atom(self.exit_code().to_string())]),
            ],
        ));
        Sexp::tagged("report", items)
    }

    pub fn render(&self) -> String {
        let mut s = self.to_sexp().pretty();
        s.push('\n');
        s
    }
}

/// Evaluation context: resolved objects plus certified functions.
struct Ctx<'a> {
    doc: &'a ScenarioDoc,
    grid: &'a EpsGrid,
    cfg: SampleConfig,
    gsfs: HashMap<&'a str, std::result::Result<GsfDef, Error>>,
}

impl<'a> Ctx<'a> {
    fn name<'b>(&self, a: &'b Arg) -> &'b str {
        match a {
            Arg::Name(n) => n,
            _ => "",
        }
    }

    fn point(&self, a: &Arg) -> Result<GenNumber> {
        match self.doc.object(self.name(a)) {
            Some(Object::Point(p)) => Ok(p.clone()),
            Some(Object::Index(s)) => Ok(GenNumber::scalar(idempotent(s))),
            other => Err(Error::Precondition(format!(
                "expected a point, found {}",
                other.map_or("nothing", Object::kind)
            ))),
        }
    }

    fn net(&self, a: &Arg) -> Result<NetExpr> {
        Ok(self.point(a)?.as_scalar()?.clone())
    }

    fn set(&self, a: &Arg) -> Result<&SetExpr> {
        match self.doc.object(self.name(a)) {
            Some(Object::Set(s)) => Ok(s),
            _ => Err(Error::Precondition("expected a set".into())),
        }
    }

    fn index(&self, a: &Arg) -> Result<&IndexSet> {
        match self.doc.object(self.name(a)) {
            Some(Object::Index(s)) => Ok(s),
            _ => Err(Error::Precondition("expected an index set".into())),
        }
    }

    fn smooth(&self, a: &Arg) -> Result<&SmoothExpr> {
        match self.doc.object(self.name(a)) {
            Some(Object::Smooth(s)) => Ok(s),
            _ => Err(Error::Precondition("expected a smooth family".into())),
        }
    }

    fn radii(&self, a: &Arg) -> Result<RadiiSet> {
        match a {
            Arg::Radii(r) => Ok(r.clone()),
            _ => match self.doc.object(self.name(a)) {
                Some(Object::Radii(r)) => Ok(r.clone()),
                _ => Err(Error::Precondition("expected a set of radii".into())),
            },
        }
    }

    fn gsf(&self, a: &Arg) -> Result<&GsfDef> {
        match self.gsfs.get(self.name(a)) {
            Some(Ok(f)) => Ok(f),
            Some(Err(e)) => Err(e.clone()),
            None => Err(Error::Precondition("expected a gsf".into())),
        }
    }
}

fn membership(m: MembershipVerdict) -> Outcome {
    let mut o = Outcome::label(m.label()).with(m.to_sexp());
    if !m.evidence.is_empty() {
        o = o.with(evidence(&m.evidence));
    }
    o
}

fn evidence(rows: &[(f64, f64)]) -> Sexp {
    Sexp::tagged(
        "evidence",
        rows.iter()
            .map(|&(e, v)| Sexp::list(vec![Sexp::num(e), Sexp::num(v)]))
            .collect(),
    )
}

fn sup_outcome(r: SupReport) -> Outcome {
    Outcome::verdict(r.verdict)
        .with(r.classification.to_sexp())
        .with(evidence(&r.sups))
}

fn run_op(ctx: &Ctx, c: &Check) -> Result<Outcome> {
    let g = ctx.grid;
    let a = &c.args;
    Ok(match c.op.as_str() {
        "eval" => {
            let eps = match a[1] {
                Arg::Num(e) => e,
                _ => unreachable!("checked at load"),
            };
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Error::Precondition(format!("eps={eps} is outside (0, 1]")));
            }
            Outcome::number(ctx.net(&a[0])?.eval(eps)?)
        }
        "valuation" => {
            let v = valuation(&ctx.net(&a[0])?, g)?;
            Outcome::number(v.value).with(v.to_sexp())
        }
        "classify" => {
            let cl = classify(&ctx.net(&a[0])?, g)?;
            Outcome::label(cl.verdict.name()).with(cl.to_sexp())
        }
        "standard_part" => match standard_part(&ctx.point(&a[0])?, g)? {
            Some(v) if v.len() == 1 => Outcome::number(v[0]),
            Some(v) => Outcome::label(
                Sexp::list(v.iter().map(|x| Sexp::num(*x)).collect()).to_string(),
            ),
            None => Outcome::label("none"),
        },
        "sharp_norm" => Outcome::number(sharp_norm(&ctx.point(&a[0])?, g)?),
        "eq" => Outcome::verdict(eq_in_ring(&ctx.point(&a[0])?, &ctx.point(&a[1])?, g)?),
        "leq" => Outcome::verdict(leq(&ctx.point(&a[0])?, &ctx.point(&a[1])?, g)?),
        "lt" => Outcome::verdict(lt(&ctx.point(&a[0])?, &ctx.point(&a[1])?, g)?),
        "invertible" | "infinitesimal" => {
            let x = ctx.point(&a[0])?;
            let d = if c.op == "invertible" {
                is_invertible(&x, g)?
            } else {
                is_infinitesimal(&x, g)?
            };
            let mut o = Outcome::verdict(d.verdict).with(Sexp::tagged("note", vec![Sexp::atom(format!("{:?}", d.note))]));
            if let Some(w) = d.witness {
                o = o.with(Sexp::tagged("witness", vec![Sexp::num(w)]));
            }
            o
        }
        "accumulates" => Outcome::verdict(Verdict::from_bool(ctx.index(&a[0])?.accumulates_at_zero())),
        "internal_member" => membership(internal_member(&ctx.point(&a[0])?, ctx.set(&a[1])?, g)?),
        "strong_member_sharp" => membership(strong_member_sharp(&ctx.point(&a[0])?, ctx.set(&a[1])?, g)?),
        "strong_member_fermat" => membership(strong_member_fermat(&ctx.point(&a[0])?, ctx.set(&a[1])?, g)?),
        "falsifier" => in_out(perturbation_falsifier(&ctx.point(&a[0])?, ctx.set(&a[1])?, g)?),
        "openness" => Outcome::verdict(openness_probe(&ctx.point(&a[0])?, ctx.set(&a[1])?, g)?),
        "sigma" => {
            let r = sigma_check(&ctx.point(&a[0])?, ctx.set(&a[1])?, g, SIGMA_M_MAX)?;
            let label = if r.inconclusive {
                "inconclusive"
            } else if r.agrees() {
                "agree"
            } else {
                "disagree"
            };
            let mut d = vec![
                Sexp::tagged("strong", vec![Sexp::atom(r.strong.name())]),
                Sexp::tagged("internal", vec![Sexp::atom(r.internal.name())]),
                Sexp::tagged("in-all-dilations", vec![Sexp::atom(r.in_all_dilations.name())]),
            ];
            if let Some(m) = r.eroded_witness {
                d.push(Sexp::tagged("eroded-witness", vec![Sexp::atom(m.to_string())]));
            }
            Outcome::label(label).with(Sexp::tagged("sigma", d))
        }
        "sharply_bounded" => {
            let r = sharply_bounded(ctx.set(&a[0])?, g)?;
            let mut o = Outcome::verdict(r.verdict);
            if let Some(n) = r.n {
                o = o.with(Sexp::tagged("n", vec![Sexp::atom(n.to_string())]));
            }
            o.with(evidence(&r.evidence))
        }
        "subset" => sup_outcome(subset_criterion(ctx.set(&a[0])?, ctx.set(&a[1])?, g, ctx.cfg)?),
        "same_set" => sup_outcome(same_strong_set(ctx.set(&a[0])?, ctx.set(&a[1])?, g, ctx.cfg)?),
        "containment" => {
            let b = ctx.set(&a[0])?;
            let r = containment_shadow(b, ctx.set(&a[1])?, g, &b.catalog_points(), ctx.cfg)?;
            let mut o = Outcome::label(format!("{}/{}", r.hypothesis.name(), r.conclusion.name()));
            if let Some(w) = &r.witness {
                o = o.with(Sexp::tagged("witness", vec![w.to_sexp()]));
            }
            if let Some(e) = r.confirmed_from {
                o = o.with(Sexp::tagged("confirmed-from", vec![Sexp::num(e)]));
            }
            o
        }
        "radii_contains" => Outcome::verdict(radii_contains(&ctx.radii(&a[0])?, &ctx.point(&a[1])?, g)?),
        "ball_member" => Outcome::verdict(ball_member(
            &ctx.point(&a[0])?,
            &ctx.point(&a[1])?,
            &ctx.point(&a[2])?,
            g,
        )?),
        "tau" => Outcome::verdict(tau_identified(
            &ctx.point(&a[0])?,
            &ctx.point(&a[1])?,
            &ctx.radii(&a[2])?,
            g,
        )?),
        "null" => sup_outcome(null_check(
            std::slice::from_ref(ctx.smooth(&a[0])?),
            ctx.set(&a[1])?,
            g,
            ctx.cfg,
        )?),
        "gsf_valid" => {
            let f = ctx.gsf(&a[0])?;
            let label = if f.is_valid() { "valid" } else { "invalid" };
            Outcome::label(label).with(f.certificate.to_sexp())
        }
        "gsf_eq" => {
            let y = gsf_eval(ctx.gsf(&a[0])?, &ctx.point(&a[1])?, g)?;
            Outcome::verdict(eq_in_ring(&y, &ctx.point(&a[2])?, g)?)
                .with(Sexp::tagged("value", vec![y.to_sexp()]))
        }
        "gsf_valuation" => {
            let y = gsf_eval(ctx.gsf(&a[0])?, &ctx.point(&a[1])?, g)?;
            let v = valuation(&y.norm_net(), g)?;
            Outcome::number(v.value).with(v.to_sexp())
        }
        "representative" => {
            let r = representative_independence(
                ctx.gsf(&a[0])?,
                &ctx.point(&a[1])?,
                &Perturbation::Order(PERTURBATION_ORDER),
                g,
            )?;
            let mut o = Outcome::verdict(r.verdict);
            for d in &r.differences {
                o = o.with(d.to_sexp());
            }
            o
        }
        "uniform_moderate" => {
            let f = ctx.gsf(&a[0])?;
            let r = uniform_moderateness(&f.family, ctx.set(&a[1])?, g, ctx.cfg)?;
            let v = r.classification.verdict;
            let label = if v.is_moderate() {
                Verdict::True
            } else if v == crate::asymptotics::ClassVerdict::Undetermined {
                Verdict::Undetermined
            } else {
                Verdict::False
            };
            Outcome::verdict(label)
                .with(r.classification.to_sexp())
                .with(evidence(&r.sups))
        }
        "lipschitz" => {
            let r = lipschitz_probe(ctx.gsf(&a[0])?, ctx.set(&a[1])?, g, ctx.cfg, LIPSCHITZ_PAIRS)?;
            Outcome::verdict(r.verdict).with(r.to_sexp())
        }
        "afj" => {
            let ks: Vec<u32> = (1..=6).collect();
            let r = afj_probe(ctx.gsf(&a[0])?, &ctx.point(&a[1])?, &ks, g)?;
            let label = if r.decreasing { "decreasing" } else { "not-decreasing" };
            let rows = r
                .rows
                .iter()
                .map(|&(k, x)| Sexp::list(vec![Sexp::atom(k.to_string()), Sexp::num(x)]))
                .collect();
            Outcome::label(label).with(Sexp::tagged("ratios", rows))
        }
        other => return Err(Error::Unsupported(format!("check `{other}`"))),
    })
}

fn in_out(v: Verdict) -> Outcome {
    Outcome::label(match v {
        Verdict::True => "in",
        Verdict::False => "out",
        Verdict::Undetermined => "undetermined",
    })
}

/// Options shared by scenario runs.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Overrides the scenario's own grid.
    pub grid: Option<GridSpec>,
    pub seed: u64,
    /// Certification order for functions that do not set their own.
    pub kmax: u32,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            grid: None,
            seed: crate::setnets::sampling::DEFAULT_SEED,
            kmax: DEFAULT_KMAX,
        }
    }
}

/// Certifies the scenario's functions, then runs every check. Runtime
/// failures are recorded in the check's outcome as `error`.
pub fn run_scenario(doc: &ScenarioDoc, opts: RunOptions) -> Result<Report> {
    let spec = opts.grid.or(doc.grid).unwrap_or_default();
    let grid = spec.grid()?;
    let cfg = SampleConfig {
        seed: opts.seed,
        ..SampleConfig::default()
    };
    let specs: Vec<(&str, &GsfSpec)> = doc
        .defs
        .iter()
        .filter_map(|(n, o)| match o {
            Object::Gsf(s) => Some((n.as_str(), s)),
            _ => None,
        })
        .collect();
    let gsfs = specs
        .par_iter()
        .map(|(n, s)| {
            let f = GsfDef::new(
                s.family.clone(),
                s.domain.clone(),
                s.catalog.clone(),
                &grid,
                s.kmax.unwrap_or(opts.kmax),
            );
            (*n, f)
        })
        .collect();
    let ctx = Ctx {
        doc,
        grid: &grid,
        cfg,
        gsfs,
    };
    let results = doc
        .checks
        .par_iter()
        .map(|c| {
            let outcome = run_op(&ctx, c).unwrap_or_else(|e| {
                Outcome::label("error").with(Sexp::tagged("message", vec![Sexp::atom(format!("{:?}", e.to_string()))]))
            });
            let status = match &c.expect {
                None => Status::Unchecked,
                Some(e) if e.matches(&outcome) => Status::Match,
                Some(_) => Status::Mismatch,
            };
            CheckResult {
                check: c.clone(),
                outcome,
                status,
            }
        })
        .collect();
    Ok(Report {
        seed: opts.seed,
        grid: spec,
        doc: doc.clone(),
        results,
    })
}

/// What `emit_samples` tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// `eps, value, ln|value|` of a net, point component or index set.
    Net,
    /// `eps, sdf, ln|sdf|` of a point against a set (second name).
    Distance,
    /// `k, ratio, ln ratio` of the first-order remainder of a gsf at a
    /// point (second name).
    Ratio,
}

impl SampleKind {
    pub fn parse(s: &str) -> Result<SampleKind> {
        match s {
            "net" => Ok(SampleKind::Net),
            "distance" => Ok(SampleKind::Distance),
            "ratio" => Ok(SampleKind::Ratio),
            _ => Err(Error::parse(format!("unknown sample kind {s:?}: net | distance | ratio"))),
        }
    }
}

fn csv_num(x: f64) -> String {
    format_f64(x)
}

/// CSV samples of a named object over the grid.
pub fn emit_samples(
    doc: &ScenarioDoc,
    name: &str,
    kind: SampleKind,
    with: Option<&str>,
    opts: RunOptions,
) -> Result<String> {
    let spec = opts.grid.or(doc.grid).unwrap_or_default();
    let grid = spec.grid()?;
    let obj = doc.object(name).ok_or_else(|| Error::Unresolved {
        name: name.to_string(),
        line: 0,
    })?;
    let second = || -> Result<&Object> {
        let n = with.ok_or_else(|| Error::Precondition(format!("{kind:?} samples need a second object")))?;
        doc.object(n).ok_or_else(|| Error::Unresolved {
            name: n.to_string(),
            line: 0,
        })
    };
    let mut out = String::new();
    match kind {
        SampleKind::Net => {
            let net = match obj {
                Object::Point(p) => p.as_scalar()?.clone(),
                Object::Index(s) => idempotent(s),
                o => return Err(Error::Precondition(format!("cannot sample a {} as a net", o.kind()))),
            };
            let mut sets = Vec::new();
            net.collect_index_sets(&mut sets);
            out.push_str("eps,value,ln_abs\n");
            for &e in grid.augmented(&sets).samples() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    csv_num(e),
                    csv_num(net.eval(e)?),
                    csv_num(net.log_abs_eval(e)?)
                ));
            }
        }
        SampleKind::Distance => {
            let x = match obj {
                Object::Point(p) => p,
                o => return Err(Error::Precondition(format!("expected a point, found a {}", o.kind()))),
            };
            let a = match second()? {
                Object::Set(s) => s,
                o => return Err(Error::Precondition(format!("expected a set, found a {}", o.kind()))),
            };
            let mut sets = Vec::new();
            a.collect_index_sets(&mut sets);
            x.collect_index_sets(&mut sets);
            out.push_str("eps,sdf,ln_abs\n");
            for &e in grid.augmented(&sets).samples() {
                let d = a.sdf(e, &x.eval(e)?)?;
                out.push_str(&format!("{},{},{}\n", csv_num(e), csv_num(d), csv_num(d.abs().ln())));
            }
        }
        SampleKind::Ratio => {
            let s = match obj {
                Object::Gsf(s) => s,
                o => return Err(Error::Precondition(format!("expected a gsf, found a {}", o.kind()))),
            };
            let x = match second()? {
                Object::Point(p) => p,
                o => return Err(Error::Precondition(format!("expected a point, found a {}", o.kind()))),
            };
            let f = GsfDef::new(
                s.family.clone(),
                s.domain.clone(),
                s.catalog.clone(),
                &grid,
                s.kmax.unwrap_or(opts.kmax),
            )?;
            let ks: Vec<u32> = (1..=6).collect();
            out.push_str("k,ratio,ln_ratio\n");
            for (k, r) in afj_probe(&f, x, &ks, &grid)?.rows {
                out.push_str(&format!("{k},{},{}\n", csv_num(r), csv_num(r.ln())));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(src: &str) -> Report {
        run_scenario(&ScenarioDoc::parse(src).unwrap(), RunOptions::default()).unwrap()
    }

    #[test]
    fn empty_scenario_passes() {
        let r = run("");
        assert!(r.results.is_empty());
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn punctured_line_membership() {
        let r = run(
            "(point zero (const 0))
             (set punctured (punctured @zero))
             (check internal_member zero punctured (expect in))
             (check strong_member_sharp zero punctured (expect out))",
        );
        assert_eq!(r.mismatches(), 0, "{}", r.render());
        assert_eq!(r.results[1].outcome.label, "out");
    }

    #[test]
    fn dangling_names_fail_at_load() {
        let e = ScenarioDoc::parse("(point x (const 0))\n(check internal_member x nowhere)").unwrap_err();
        assert_eq!(
            e,
            Error::Unresolved {
                name: "nowhere".into(),
                line: 2
            }
        );
        let e = ScenarioDoc::parse("\n\n(net a (sum @b (const 1)))").unwrap_err();
        assert!(matches!(e, Error::Unresolved { line: 3, .. }));
    }

    #[test]
    fn kinds_are_checked_at_load() {
        let e = ScenarioDoc::parse("(set a (whole 1))\n(check valuation a)").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        assert!(ScenarioDoc::parse("(check nosuch)").is_err());
    }

    #[test]
    fn numeric_expectations_and_runtime_errors() {
        let r = run(
            "(net a (epspow 2))
             (net r (recip (const 0)))
             (check eval a 0.5 (expect 0.25))
             (check valuation a (expect 2))
             (check eval r 0.5 (expect error))
             (check eval a 0.5 (expect 0.3))",
        );
        let st: Vec<Status> = r.results.iter().map(|c| c.status).collect();
        assert_eq!(st, [Status::Match, Status::Match, Status::Match, Status::Mismatch]);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn report_echo_round_trips() {
        let src = "(grid 4 40)
             (point x (vec (const 0) (epspow 1)))
             (set b (ball (vec (const 0) (const 0)) (const 1)))
             (radii band powerband:2)
             (smooth f (sin x1))
             (gsf g (family @f) (domain (whole 1)) (catalog (const 0)) (kmax 2))
             (check strong_member_sharp x b (expect in))
             (check tau x x sharp (expect true))
             (check gsf_valid g (expect valid))";
        let doc = ScenarioDoc::parse(src).unwrap();
        let r = run_scenario(&doc, RunOptions::default()).unwrap();
        assert_eq!(r.mismatches(), 0, "{}", r.render());
        let back = ScenarioDoc::from_report(&r.render()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.grid, Some(GridSpec { k_min: 4, k_max: 40 }));
        let again = run_scenario(&back, RunOptions::default()).unwrap();
        let labels = |r: &Report| r.results.iter().map(|c| (c.outcome.clone(), c.status)).collect::<Vec<_>>();
        assert_eq!(labels(&r), labels(&again));
    }

    #[test]
    fn seed_is_recorded() {
        let doc = ScenarioDoc::parse("").unwrap();
        let r = run_scenario(&doc, RunOptions { seed: 7, ..Default::default() }).unwrap();
        assert!(r.render().contains("(seed 7)"));
    }

    #[test]
    fn emit_examples() {
        let doc = ScenarioDoc::parse(
            "(smooth delta (prod (coef (epspow -1)) (exp (prod -1 (powi (prod (coef (epspow -1)) x1) 2)))))
             (net d0 (apply @delta (const 0)))
             (index s (intervals (0 0.1)))
             (point x (epspow 1))
             (set a (constant (box (const 0) (const 1))))
             (gsf sq (family (powi x1 2)) (domain (whole 1)) (catalog (const 0)))
             (point zero (const 0))",
        )
        .unwrap();
        let o = RunOptions::default();
        let csv = emit_samples(&doc, "d0", SampleKind::Net, None, o).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "eps,value,ln_abs");
        assert_eq!(rows.len(), 46);
        for r in &rows[1..] {
            let v: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
            assert!((v[1] * v[0] - 1.0).abs() < 1e-12);
        }
        let csv = emit_samples(&doc, "s", SampleKind::Net, None, o).unwrap();
        assert!(csv.lines().skip(1).all(|r| r.split(',').nth(1).is_some_and(|v| v == "0" || v == "1")));
        let csv = emit_samples(&doc, "x", SampleKind::Distance, Some("a"), o).unwrap();
        assert!(csv.lines().nth(1).unwrap().starts_with("0.0625,0.0625,"));
        let csv = emit_samples(&doc, "sq", SampleKind::Ratio, Some("zero"), o).unwrap();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.lines().nth(1).unwrap().starts_with("1,"));
        assert!(matches!(
            emit_samples(&doc, "missing", SampleKind::Net, None, o),
            Err(Error::Unresolved { .. })
        ));
    }
}
