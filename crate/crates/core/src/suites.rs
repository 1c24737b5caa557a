//! Built-in property suites with their default catalogs and tolerances.
//!
//! Each suite runs a fixed catalog through one layer of the library and
//! reports how many cases were checked and which ones failed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::asymptotics::{
    eq_in_ring, regression_valuation, sharp_norm, valuation, ClassVerdict,
    Method, Verdict,
};
use crate::error::{Error, Result};
use crate::gsf::families::*;
use crate::gsf::gallery::{gallery, inverse_log_point};
use crate::gsf::probes::{afj_probe, cutoff_globalize, lipschitz_probe, representative_independence, Perturbation};
use crate::gsf::{apply_at, compose, gsf_eval, CertFailure, GsfDef, DEFAULT_KMAX};
use crate::net::{idempotent, EpsGrid, GenNumber, IndexSet, NetExpr};
use crate::setnets::{
    containment_shadow, intersection_identity_check, internal_member, perturbation_falsifier,
    same_strong_set, sigma_check, strong_member_sharp, subset_criterion, SampleConfig, SetExpr,
    SupReport, SIGMA_M_MAX,
};
use crate::sexpr::Sexp;
use crate::smooth::SmoothExpr;

/// Largest allowed deviation of a forced regression valuation.
pub const REGRESSION_TOL: f64 = 0.05;
/// Largest allowed deviation of a sampled sup from its analytic value.
pub const SUP_TOL: f64 = 1e-3;
/// Largest allowed deviation of an AFJ ratio from `e^-k`.
pub const AFJ_TOL: f64 = 1e-9;
/// Largest allowed deviation of the delta-net Lipschitz order from `-2`.
pub const LIPSCHITZ_TOL: f64 = 0.1;
pub const LIPSCHITZ_PAIRS: usize = 100;
pub const COMPOSE_KMAX: u32 = 3;

/// Registered suites with a one-line description.
pub const SUITES: &[(&str, &str)] = &[
    ("valuation", "exact and regression valuations of random monomials"),
    ("ultrametric", "sharp norm ultrametric inequality and valuation of products"),
    ("idempotents", "e_S^2 = e_S and e_S + e_(S^c) = 1 on random index sets"),
    ("distance", "distance criterion against the perturbation falsifier"),
    ("sigma", "erosion and dilation decompositions of strongly internal sets"),
    ("intersection", "strong membership in an intersection"),
    ("subset", "sampled-sup subset and same-set criteria"),
    ("containment", "containment of sharply bounded families"),
    ("certificates", "moderateness certificates of the delta net and exp"),
    ("representatives", "independence of the representative of the argument"),
    ("composition", "composition of certified functions and associativity"),
    ("cutoff", "globalized families agree with the original inside"),
    ("afj", "first-order remainder ratios"),
    ("lipschitz", "sampled Lipschitz constants"),
    ("gallery", "named examples"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
    /// Headline number of the suite, e.g. a worst-case error.
    pub metric: Option<(String, f64)>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            checked: 0,
            failures: Vec::new(),
            metric: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.checked > 0 && self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {}/{}",
            self.name,
            self.checked - self.failures.len(),
            self.checked
        );
        if let Some((k, v)) = &self.metric {
            s.push_str(&format!(" {k}={v:.3e}"));
        }
        s
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![
            Sexp::atom(self.name),
            Sexp::tagged("passed", vec![Sexp::atom(self.passed().to_string())]),
            Sexp::tagged("checked", vec![Sexp::atom(self.checked.to_string())]),
        ];
        if let Some((k, v)) = &self.metric {
            items.push(Sexp::tagged("metric", vec![Sexp::atom(k.clone()), Sexp::num(*v)]));
        }
        if !self.failures.is_empty() {
            items.push(Sexp::tagged(
                "failures",
                self.failures.iter().map(|f| Sexp::atom(format!("{f:?}"))).collect(),
            ));
        }
        Sexp::tagged("suite", items)
    }
}

pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|s| s.0)
}

/// Runs the named suite on `grid`, sampling with `cfg`.
pub fn run_suite(name: &str, grid: &EpsGrid, cfg: SampleConfig) -> Result<SuiteReport> {
    match name {
        "valuation" => valuation_suite(grid, cfg.seed),
        "ultrametric" => ultrametric_suite(grid, cfg.seed),
        "idempotents" => idempotent_suite(grid, cfg.seed),
        "distance" => distance_suite(grid),
        "sigma" => sigma_suite(grid),
        "intersection" => intersection_suite(grid),
        "subset" => subset_suite(grid, cfg),
        "containment" => containment_suite(grid, cfg),
        "certificates" => certificate_suite(grid),
        "representatives" => representative_suite(grid),
        "composition" => composition_suite(grid),
        "cutoff" => cutoff_suite(grid),
        "afj" => afj_suite(grid),
        "lipschitz" => lipschitz_suite(grid, cfg),
        "gallery" => gallery_suite(grid),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

fn valuation_suite(grid: &EpsGrid, seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("valuation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a: f64 = rng.gen_range(-10.0..=10.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let c = sign * rng.gen_range(0.1..10.0);
        let net = NetExpr::monomial(c, a);
        let exact = valuation(&net, grid)?;
        r.check(exact.method == Method::Exact && exact.value == a, || {
            format!("exact valuation of {c} eps^{a}: {}", exact.value)
        });
        let reg = regression_valuation(&net, grid)?;
        let err = (reg.value - a).abs();
        worst = worst.max(err);
        r.check(err <= REGRESSION_TOL, || {
            format!("regression valuation of {c} eps^{a}: {}", reg.value)
        });
    }
    r.metric = Some(("max-regression-error".into(), worst));
    Ok(r)
}

/// A random short sum of monomials with quarter-integer exponents.
fn random_canonical(rng: &mut ChaCha8Rng) -> NetExpr {
    let n = rng.gen_range(1..=3);
    let terms = (0..n)
        .map(|_| {
            let a = rng.gen_range(-12..=12) as f64 / 4.0;
            let c = rng.gen_range(1..=5) as f64 * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            NetExpr::monomial(c, a)
        })
        .collect();
    NetExpr::Sum(terms)
}

fn ultrametric_suite(grid: &EpsGrid, seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("ultrametric");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..500 {
        let u = GenNumber::scalar(random_canonical(&mut rng));
        // Every fourth pair cancels the leading part of `u`.
        let w = if i % 4 == 0 {
            GenNumber::scalar(u.component(0).clone().neg().add(random_canonical(&mut rng)))
        } else {
            GenNumber::scalar(random_canonical(&mut rng))
        };
        let (nu, nw) = (sharp_norm(&u, grid)?, sharp_norm(&w, grid)?);
        let ns = sharp_norm(&(&u + &w), grid)?;
        r.check(ns <= nu.max(nw), || format!("|{u} + {w}|_e = {ns} > max({nu}, {nw})"));

        let mono = |rng: &mut ChaCha8Rng| {
            NetExpr::monomial(rng.gen_range(1..=9) as f64, rng.gen_range(-20..=20) as f64 / 4.0)
        };
        let (a, b) = (mono(&mut rng), mono(&mut rng));
        let (va, vb) = (valuation(&a, grid)?.value, valuation(&b, grid)?.value);
        let vab = valuation(&NetExpr::Prod(vec![a.clone(), b.clone()]), grid)?.value;
        r.check(vab >= va + vb, || format!("v({a} {b}) = {vab} < {va} + {vb}"));
    }
    Ok(r)
}

fn random_index_set(rng: &mut ChaCha8Rng) -> Result<IndexSet> {
    if rng.gen_bool(0.3) {
        return IndexSet::geometric(rng.gen_range(0.05..=1.0), rng.gen_range(0.1..0.9));
    }
    let n = rng.gen_range(1..=4);
    let mut cuts: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(0.0..1.0)).collect();
    cuts.sort_by(f64::total_cmp);
    let ivs = cuts.chunks(2).filter(|c| c[0] < c[1]).map(|c| (c[0], c[1])).collect();
    let s = IndexSet::intervals(ivs)?;
    Ok(if rng.gen_bool(0.3) { s.complement() } else { s })
}

fn idempotent_suite(grid: &EpsGrid, seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("idempotents");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let s = random_index_set(&mut rng)?;
        let e = idempotent(&s);
        let ec = idempotent(&s.complement());
        let sq = NetExpr::Prod(vec![e.clone(), e.clone()]);
        let one = NetExpr::Sum(vec![e.clone(), ec]);
        let mut ok = true;
        for &eps in grid.augmented(std::slice::from_ref(&s)).samples() {
            ok &= sq.eval(eps)?.to_bits() == e.eval(eps)?.to_bits();
            ok &= one.eval(eps)?.to_bits() == 1f64.to_bits();
        }
        r.check(ok, || format!("idempotent identities fail for {s}"));
    }
    Ok(r)
}

fn eps() -> NetExpr {
    NetExpr::eps()
}

fn constant(a: SetExpr) -> SetExpr {
    SetExpr::constant(a).expect("standard set")
}

fn tiny() -> GenNumber {
    GenNumber::scalar(NetExpr::ExpInvEps.recip())
}

/// Twelve `(point, set, strongly inside?)` cases for the distance criterion.
pub fn distance_catalog() -> Vec<(GenNumber, SetExpr, bool)> {
    let open01 = constant(SetExpr::interval(NetExpr::zero(), NetExpr::one()));
    let origin2 = GenNumber::reals(&[0.0, 0.0]);
    vec![
        (GenNumber::real(0.0), SetExpr::Punctured(vec![GenNumber::real(0.0)]), false),
        (GenNumber::eps_pow(1.0), open01.clone(), true),
        (tiny(), open01.clone(), false),
        (GenNumber::real(0.5), open01, true),
        (GenNumber::eps_pow(1.0), SetExpr::interval(eps(), NetExpr::one()), false),
        (GenNumber::monomial(2.0, 1.0), SetExpr::interval(eps(), NetExpr::one()), true),
        (GenNumber::real(0.0), SetExpr::ball(GenNumber::zeros(1), eps()), true),
        (GenNumber::eps_pow(1.0), SetExpr::ball(GenNumber::zeros(1), eps()), false),
        (origin2.clone(), SetExpr::ball(origin2.clone(), NetExpr::one()), true),
        (
            GenNumber::vector(vec![eps(), NetExpr::zero()]),
            SetExpr::Punctured(vec![origin2]),
            true,
        ),
        (GenNumber::real(2.0), SetExpr::ball(GenNumber::zeros(1), NetExpr::one()), false),
        (
            GenNumber::eps_pow(2.0),
            SetExpr::HalfSpace {
                normal: GenNumber::real(1.0),
                offset: eps(),
            },
            true,
        ),
    ]
}

fn distance_suite(grid: &EpsGrid) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("distance");
    let rows: Vec<Result<(Verdict, Verdict, bool)>> = distance_catalog()
        .par_iter()
        .map(|(x, a, want)| {
            Ok((
                strong_member_sharp(x, a, grid)?.verdict,
                perturbation_falsifier(x, a, grid)?,
                *want,
            ))
        })
        .collect();
    for (i, row) in rows.into_iter().enumerate() {
        let (direct, falsifier, want) = row?;
        r.check(direct == falsifier && direct == Verdict::from_bool(want), || {
            format!("case {i}: distance {direct:?}, falsifier {falsifier:?}, expected {want}")
        });
    }
    // The punctured line holds 0 internally but not strongly.
    let (x, a, _) = &distance_catalog()[0];
    let internal = internal_member(x, a, grid)?;
    r.check(internal.is_in(), || {
        format!("0 in [R \\ {{0}}]: {}", internal.label())
    });
    Ok(r)
}

/// Ten one-dimensional families with exact signed distances.
pub fn sigma_families() -> Vec<SetExpr> {
    vec![
        constant(SetExpr::interval(NetExpr::zero(), NetExpr::one())),
        SetExpr::interval(eps(), NetExpr::one().sub(eps())),
        SetExpr::Punctured(vec![GenNumber::real(0.0)]),
        SetExpr::ball(GenNumber::zeros(1), NetExpr::one()),
        SetExpr::ball(GenNumber::zeros(1), eps()),
        SetExpr::closed_interval(eps().neg(), eps()),
        SetExpr::HalfSpace {
            normal: GenNumber::real(1.0),
            offset: eps(),
        },
        constant(SetExpr::closed_interval(NetExpr::Const(-1.0), NetExpr::one())),
        SetExpr::ball(GenNumber::real(0.5), NetExpr::EpsPow(2.0)),
        SetExpr::ball(GenNumber::zeros(1), eps()).complement(),
    ]
}

/// Ten one-dimensional points exercising interiors, boundaries and
/// infinitesimal offsets of [`sigma_families`].
pub fn sigma_points() -> Vec<GenNumber> {
    vec![
        GenNumber::real(0.0),
        GenNumber::eps_pow(1.0),
        GenNumber::monomial(-1.0, 1.0),
        GenNumber::monomial(2.0, 1.0),
        GenNumber::eps_pow(2.0),
        GenNumber::real(0.5),
        GenNumber::real(1.0),
        GenNumber::real(-1.0),
        GenNumber::scalar(NetExpr::Const(0.5).add(NetExpr::EpsPow(3.0))),
        tiny(),
    ]
}

fn sigma_suite(grid: &EpsGrid) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("sigma");
    let cases: Vec<(usize, usize)> = (0..10).flat_map(|i| (0..10).map(move |j| (i, j))).collect();
    let (fams, pts) = (sigma_families(), sigma_points());
    let reports: Vec<Result<_>> = cases
        .par_iter()
        .map(|&(i, j)| sigma_check(&pts[j], &fams[i], grid, SIGMA_M_MAX))
        .collect();
    let mut inconclusive = 0;
    for (&(i, j), rep) in cases.iter().zip(reports) {
        let rep = rep?;
        inconclusive += rep.inconclusive as usize;
        r.check(rep.agrees(), || {
            format!("{} in {}: {rep:?}", pts[j], fams[i])
        });
    }
    r.metric = Some(("inconclusive".into(), inconclusive as f64));
    Ok(r)
}

/// Ten pairs of families for the intersection identity.
pub fn intersection_pairs() -> Vec<(SetExpr, SetExpr)> {
    let f = sigma_families();
    let far = SetExpr::ball(GenNumber::real(3.0), NetExpr::one());
    vec![
        (f[0].clone(), f[3].clone()),
        (f[1].clone(), f[4].clone()),
        (f[2].clone(), f[3].clone()),
        (f[3].clone(), f[6].clone()),
        (f[0].clone(), f[1].clone()),
        (f[4].clone(), f[5].clone()),
        (f[7].clone(), f[9].clone()),
        (f[3].clone(), f[8].clone()),
        (f[0].clone(), f[0].clone()),
        (f[3].clone(), far),
    ]
}

fn intersection_suite(grid: &EpsGrid) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("intersection");
    let pts = sigma_points();
    for (a, b) in intersection_pairs() {
        for row in intersection_identity_check(&a, &b, &pts, grid)? {
            r.check(row.agrees(), || {
                format!(
                    "{} in {a} and {b}: joint {:?}, separate {:?}",
                    row.point, row.joint, row.separate
                )
            });
        }
    }
    Ok(r)
}

fn unit_ball() -> SetExpr {
    SetExpr::ball(GenNumber::zeros(1), NetExpr::one())
}

fn small_ball() -> SetExpr {
    SetExpr::ball(GenNumber::zeros(1), NetExpr::Const(0.9))
}

fn sup_error(rep: &SupReport, oracle: f64) -> f64 {
    rep.sups.iter().map(|s| (s.1 - oracle).abs()).fold(0.0, f64::max)
}

fn subset_suite(grid: &EpsGrid, cfg: SampleConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("subset");
    let shrunk = SetExpr::ball(GenNumber::zeros(1), NetExpr::one().sub(eps()));
    let (lo, hi) = (eps(), NetExpr::one().sub(eps()));
    let s = IndexSet::interval(0.3, 0.6)?;
    let wobble = SetExpr::ball(
        GenNumber::zeros(1),
        NetExpr::one().add(NetExpr::mask(s, NetExpr::Const(0.1))),
    );
    // (first, second, same-set?, expected verdict, analytic sup)
    let cases = [
        (shrunk, unit_ball(), false, true, 0.0),
        (unit_ball(), small_ball(), false, false, 0.1),
        (unit_ball(), unit_ball(), false, true, 0.0),
        (SetExpr::interval(lo.clone(), hi.clone()), SetExpr::closed_interval(lo, hi), true, true, 0.0),
        (unit_ball(), wobble, true, true, 0.0),
        (unit_ball(), small_ball(), true, false, 0.1),
    ];
    let mut worst = 0.0f64;
    for (a, b, same, want, oracle) in cases {
        let rep = if same {
            same_strong_set(&a, &b, grid, cfg)?
        } else {
            subset_criterion(&a, &b, grid, cfg)?
        };
        let err = sup_error(&rep, oracle);
        worst = worst.max(err);
        let op = if same { "same" } else { "subset" };
        r.check(rep.verdict == Verdict::from_bool(want) && err <= SUP_TOL, || {
            format!("{op}({a}, {b}): {:?}, sup error {err:e}", rep.verdict)
        });
    }
    r.metric = Some(("max-sup-error".into(), worst));
    Ok(r)
}

fn containment_suite(grid: &EpsGrid, cfg: SampleConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("containment");
    let cases = [
        (
            SetExpr::closed_interval(NetExpr::Const(-1.0).add(eps()), NetExpr::one().sub(eps())),
            unit_interval(),
            Verdict::True,
            Verdict::True,
        ),
        (
            unit_ball(),
            SetExpr::ball(GenNumber::zeros(1), NetExpr::one().add(eps())),
            Verdict::True,
            Verdict::True,
        ),
        (
            constant(SetExpr::closed_interval(NetExpr::zero(), NetExpr::one())),
            constant(SetExpr::interval(NetExpr::zero(), NetExpr::one())),
            Verdict::False,
            Verdict::Undetermined,
        ),
    ];
    for (b, omega, hyp, concl) in cases {
        let rep = containment_shadow(&b, &omega, grid, &b.catalog_points(), cfg)?;
        r.check(rep.hypothesis == hyp && rep.conclusion == concl, || {
            format!(
                "{b} in {omega}: hypothesis {:?}, conclusion {:?}",
                rep.hypothesis, rep.conclusion
            )
        });
    }
    Ok(r)
}

fn certificate_suite(grid: &EpsGrid) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("certificates");
    let d = GsfDef::new(vec![delta()], unit_interval(), compact_catalog(), grid, DEFAULT_KMAX)?;
    r.check(d.is_valid() && d.certificate.entries.len() == 10 * 5, || {
        format!("delta certificate: {}", d.certificate.to_sexp())
    });
    let e = GsfDef::new(
        vec![SmoothExpr::exp(x())],
        line(),
        vec![GenNumber::real(1.0), GenNumber::eps_pow(-1.0)],
        grid,
        DEFAULT_KMAX,
    )?;
    let rejected = matches!(
        &e.certificate.failure,
        Some(CertFailure::Entry { alpha, verdict: ClassVerdict::NonModerate, .. }) if alpha == &[0]
    );
    r.check(rejected, || format!("exp certificate: {}", e.certificate.to_sexp()));
    Ok(r)
}

fn positive_line() -> SetExpr {
    SetExpr::HalfSpace {
        normal: GenNumber::real(-1.0),
        offset: NetExpr::zero(),
    }
}

/// Certified functions with their catalogs: the default GSF catalog.
pub fn gsf_catalog(grid: &EpsGrid) -> Result<Vec<(&'static str, GsfDef)>> {
    let k = 2;
    let pts = |xs: &[f64]| xs.iter().map(|&v| GenNumber::real(v)).collect::<Vec<_>>();
    let mut line_pts = pts(&[0.0, 1.0, -2.0]);
    line_pts.extend([GenNumber::eps_pow(1.0), GenNumber::eps_pow(-1.0)]);
    let product = SmoothExpr::prod(vec![SmoothExpr::var(0), SmoothExpr::var(1)]);
    let plane_pts = vec![
        GenNumber::reals(&[0.0, 0.0]),
        GenNumber::vector(vec![eps(), NetExpr::one()]),
        GenNumber::vector(vec![NetExpr::EpsPow(-1.0), NetExpr::Const(-2.0)]),
    ];
    let defs = vec![
        ("delta", GsfDef::new(vec![delta()], unit_interval(), compact_catalog(), grid, k)?),
        ("square", GsfDef::new(vec![square()], line(), line_pts.clone(), grid, k)?),
        ("blow-up", GsfDef::new(vec![blow_up()], line(), line_pts.clone(), grid, k)?),
        ("sin", GsfDef::new(vec![SmoothExpr::sin(x())], line(), line_pts, grid, k)?),
        (
            "exp-inverse",
            GsfDef::new(vec![exp_inv()], positive_line(), vec![inverse_log_point(), GenNumber::real(1.0)], grid, k)?,
        ),
        ("product", GsfDef::new(vec![product], SetExpr::Whole(2), plane_pts, grid, k)?),
    ];
    for (name, f) in &defs {
        if !f.is_valid() {
            return Err(Error::Precondition(format!(
                "catalog function {name} is not certified: {}",
                f.certificate.to_sexp()
            )));
        }
    }
    Ok(defs)
}

fn representative_suite(grid: &EpsGrid) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("representatives");
    let mut worst = f64::INFINITY;
    for (name, f) in gsf_catalog(grid)? {
        for x in &f.catalog {
            let rep = representative_independence(&f, x, &Perturbation::Order(20.0), grid)?;
            for d in &rep.differences {
                worst = worst.min(d.estimate.value);
            }
            r.check(rep.verdict.is_true(), || format!("{name} at {x}: {:?}", rep.differences));
        }
    }
    r.metric = Some(("min-difference-order".into(), worst));
    Ok(r)
}

fn on_line(u: SmoothExpr, grid: &EpsGrid, catalog: Vec<GenNumber>) -> Result<GsfDef> {
    GsfDef::new(vec![u], line(), catalog, grid, DEFAULT_KMAX)
}

fn composition_suite(grid: &EpsGrid) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("composition");
    let cat = compact_catalog();
    let sin = on_line(SmoothExpr::sin(x()), grid, cat.clone())?;
    let sq = on_line(square(), grid, cat.clone())?;
    let up = on_line(blow_up(), grid, cat.clone())?;
    let exp = on_line(SmoothExpr::exp(x()), grid, cat.clone())?;
    let tanh = on_line(SmoothExpr::tanh(x()), grid, cat.clone())?;
    let shrink = GsfDef::new(
        vec![SmoothExpr::prod(vec![SmoothExpr::coef(eps()), x()])],
        unit_interval(),
        cat.clone(),
        grid,
        DEFAULT_KMAX,
    )?;
    let d = GsfDef::new(vec![delta()], unit_interval(), cat.clone(), grid, DEFAULT_KMAX)?;
    let log = GsfDef::new(
        vec![SmoothExpr::log(x())],
        positive_line(),
        vec![GenNumber::real(1.0)],
        grid,
        DEFAULT_KMAX,
    )?;
    let pairs: [(&str, &GsfDef, &GsfDef); 6] = [
        ("sin(x^2)", &sq, &sin),
        ("sin(x/eps)", &up, &sin),
        ("exp(sin x)", &sin, &exp),
        ("delta(eps x)", &shrink, &d),
        ("(tanh x)^2", &tanh, &sq),
        ("log(exp x)", &exp, &log),
    ];
    for (name, f, g) in pairs {
        let h = compose(f, g, grid, COMPOSE_KMAX)?;
        r.check(h.is_valid(), || format!("{name}: {}", h.certificate.to_sexp()));
        for x in &cat {
            let direct = gsf_eval(&h, x, grid)?;
            let stepwise = gsf_eval(g, &gsf_eval(f, x, grid)?, grid)?;
            r.check(eq_in_ring(&direct, &stepwise, grid)?.is_true(), || {
                format!("{name} at {x}: {direct} vs {stepwise}")
            });
        }
    }
    for (name, f, g, h) in [("sq-sin-exp", &sq, &sin, &exp), ("up-sin-tanh", &up, &sin, &tanh)] {
        let left = compose(&compose(f, g, grid, COMPOSE_KMAX)?, h, grid, COMPOSE_KMAX)?;
        let right = compose(f, &compose(g, h, grid, COMPOSE_KMAX)?, grid, COMPOSE_KMAX)?;
        for x in &cat {
            let (a, b) = (gsf_eval(&left, x, grid)?, gsf_eval(&right, x, grid)?);
            r.check(eq_in_ring(&a, &b, grid)?.is_true(), || format!("{name} at {x}: {a} vs {b}"));
        }
    }
    Ok(r)
}

fn cutoff_suite(grid: &EpsGrid) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("cutoff");
    let glob = cutoff_globalize(&[delta()], &unit_interval())?;
    for k in 0..=2usize {
        let (a, b) = (delta().diff_multi(&[k]), glob[0].diff_multi(&[k]));
        for x in compact_catalog() {
            let (u, v) = (GenNumber::scalar(apply_at(&a, &x)), GenNumber::scalar(apply_at(&b, &x)));
            r.check(eq_in_ring(&u, &v, grid)?.is_true(), || format!("order {k} at {x}: {u} vs {v}"));
        }
    }
    Ok(r)
}

fn afj_suite(grid: &EpsGrid) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("afj");
    let ks: Vec<u32> = (1..=6).collect();
    let zero = vec![GenNumber::real(0.0)];
    let sq = GsfDef::new(vec![square()], line(), zero.clone(), grid, 2)?;
    let rep = afj_probe(&sq, &GenNumber::real(0.0), &ks, grid)?;
    let mut worst = 0.0f64;
    for &(k, ratio) in &rep.rows {
        let err = (ratio - (-(k as f64)).exp()).abs();
        worst = worst.max(err);
        r.check(err <= AFJ_TOL, || format!("x^2 at 0, k={k}: ratio {ratio}"));
    }
    let affine = [
        SmoothExpr::constant(2.0).add(SmoothExpr::prod(vec![SmoothExpr::constant(3.0), x()])),
        SmoothExpr::prod(vec![SmoothExpr::coef(NetExpr::EpsPow(-1.0)), x()]),
        SmoothExpr::coef(eps()).sub(x()),
    ];
    for u in affine {
        let f = GsfDef::new(vec![u.clone()], line(), zero.clone(), grid, 2)?;
        for p in [GenNumber::real(0.0), GenNumber::real(1.0), GenNumber::eps_pow(1.0)] {
            let rep = afj_probe(&f, &p, &ks, grid)?;
            r.check(rep.rows.iter().all(|row| row.1 == 0.0), || format!("{u} at {p}: {:?}", rep.rows));
        }
    }
    r.metric = Some(("max-ratio-error".into(), worst));
    Ok(r)
}

fn lipschitz_suite(grid: &EpsGrid, cfg: SampleConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("lipschitz");
    let zero = vec![GenNumber::real(0.0)];
    let d = GsfDef::new(vec![delta()], unit_interval(), compact_catalog(), grid, 1)?;
    let sq = GsfDef::new(vec![square()], line(), zero.clone(), grid, 1)?;
    let up = GsfDef::new(vec![blow_up()], line(), zero.clone(), grid, 1)?;
    let product = GsfDef::new(
        vec![SmoothExpr::prod(vec![SmoothExpr::var(0), SmoothExpr::var(1)])],
        SetExpr::Whole(2),
        vec![GenNumber::zeros(2)],
        grid,
        1,
    )?;
    let unit_box = SetExpr::boxed(GenNumber::reals(&[-1.0, -1.0]), GenNumber::reals(&[1.0, 1.0]))?;
    let near = SetExpr::ball(GenNumber::zeros(1), NetExpr::monomial(3.0, 1.0));
    // (name, function, region, expected order of L)
    let cases: [(&str, &GsfDef, SetExpr, Option<f64>); 4] = [
        ("delta", &d, near, Some(-2.0)),
        ("square", &sq, unit_ball(), Some(0.0)),
        ("blow-up", &up, unit_ball(), Some(-1.0)),
        ("product", &product, unit_box, None),
    ];
    for (name, f, region, order) in cases {
        let rep = lipschitz_probe(f, &region, grid, cfg, LIPSCHITZ_PAIRS)?;
        r.check(rep.verdict.is_true() && rep.pairs_ok == LIPSCHITZ_PAIRS, || {
            format!("{name} on {region}: {}", rep.to_sexp())
        });
        if let Some(o) = order {
            r.check((rep.order - o).abs() <= LIPSCHITZ_TOL, || {
                format!("{name} on {region}: order {} expected {o}", rep.order)
            });
            if name == "delta" {
                r.metric = Some(("delta-order".into(), rep.order));
            }
        }
    }
    Ok(r)
}

fn gallery_suite(grid: &EpsGrid) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("gallery");
    for e in gallery(grid)? {
        r.check(e.passed, || format!("{}: expected {}, observed {}", e.name, e.expected, e.observed));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        let g = EpsGrid::default();
        assert!(matches!(
            run_suite("nosuch", &g, SampleConfig::default()),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn cheap_suites_pass() {
        let g = EpsGrid::default();
        for name in ["ultrametric", "idempotents", "distance", "afj"] {
            let r = run_suite(name, &g, SampleConfig::default()).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
        }
    }

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<&str> = suite_names().collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), SUITES.len());
    }
}
