//! Nets of subsets of `R^n`: internal and strongly internal membership,
//! erosion / dilation, sampled-sup criteria for inclusion and equality of
//! strongly internal sets, containment and convex hulls.

pub mod family;
pub mod hull;
pub mod sampling;

use rayon::prelude::*;

use crate::asymptotics::{
    classify_samples, Canonical, ClassVerdict, Classification, Method, Verdict,
    N_MAX, NEGLIGIBLE_ORDER, RESIDUAL_TOL,
};
use crate::error::{Error, Result};
use crate::logmag::LogMag;
use crate::net::{EpsGrid, GenNumber, NetExpr};
use crate::sexpr::Sexp;

pub use family::SetExpr;
pub use sampling::SampleConfig;

/// Default largest `m` in the erosion / dilation scans.
pub const SIGMA_M_MAX: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    /// Sharp exponent: `d(x, A^c) > eps^q` on the tail.
    Q(i64),
    /// Fermat radius.
    R(f64),
    /// Internal order: `d(x, A)` is `O(eps^m)`.
    M(f64),
    /// An eps where the distance vanishes.
    Eps(f64),
}

impl Witness {
    pub fn to_sexp(&self) -> Sexp {
        match self {
            Witness::Q(q) => Sexp::tagged("q", vec![Sexp::atom(q.to_string())]),
            Witness::R(r) => Sexp::tagged("r", vec![Sexp::num(*r)]),
            Witness::M(m) => Sexp::tagged("m", vec![Sexp::num(*m)]),
            Witness::Eps(e) => Sexp::tagged("zero-at", vec![Sexp::num(*e)]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipVerdict {
    /// `True` = in, `False` = out.
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub method: Method,
    /// Set when the family has inexact (union / intersection) sdf nodes.
    pub conservative: bool,
    /// `(eps, distance)` on the tail.
    pub evidence: Vec<(f64, f64)>,
}

impl MembershipVerdict {
    pub fn is_in(&self) -> bool {
        self.verdict.is_true()
    }

    pub fn is_out(&self) -> bool {
        self.verdict.is_false()
    }

    pub fn label(&self) -> &'static str {
        match self.verdict {
            Verdict::True => "in",
            Verdict::False => "out",
            Verdict::Undetermined => "undetermined",
        }
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![
            Sexp::tagged("verdict", vec![Sexp::atom(self.label())]),
            Sexp::tagged("method", vec![Sexp::atom(self.method.name())]),
        ];
        if let Some(w) = self.witness {
            items.push(Sexp::tagged("witness", vec![w.to_sexp()]));
        }
        if self.conservative {
            items.push(Sexp::tagged("conservative", vec![]));
        }
        Sexp::tagged("membership", items)
    }
}

/// Which distance a membership test looks at.
#[derive(Clone, Copy, PartialEq)]
enum Side {
    /// `d(x, A^c) = max(sdf, 0)`.
    ToComplement,
    /// `d(x, A) = max(-sdf, 0)`.
    ToSet,
}

struct Profile {
    canon: Option<Canonical>,
    /// `(eps, value)` in the log domain over the tail.
    tail: Vec<(f64, LogMag)>,
}

impl Profile {
    fn evidence(&self) -> Vec<(f64, f64)> {
        self.tail.iter().map(|(e, v)| (*e, v.to_f64())).collect()
    }

    fn logs(&self) -> Vec<(f64, f64)> {
        self.tail.iter().map(|(e, v)| (e.ln(), v.ln_abs)).collect()
    }
}

fn profile(a: &SetExpr, x: &GenNumber, grid: &EpsGrid, side: Side) -> Result<Profile> {
    let sdf = a.sdf_net(x)?;
    let net = sdf.map(|s| match side {
        Side::ToComplement => s.max(NetExpr::zero()),
        Side::ToSet => s.neg().max(NetExpr::zero()),
    });
    let mut sets = Vec::new();
    a.collect_index_sets(&mut sets);
    x.collect_index_sets(&mut sets);
    let g = grid.augmented(&sets);
    let mut tail = Vec::with_capacity(g.tail_len());
    for &e in g.tail() {
        let v = match &net {
            Some(n) => n.eval_log(e)?,
            None => {
                let s = a.sdf(e, &x.eval(e)?)?;
                LogMag::from_f64(match side {
                    Side::ToComplement => s.max(0.0),
                    Side::ToSet => (-s).max(0.0),
                })
            }
        };
        tail.push((e, v));
    }
    Ok(Profile {
        canon: net.as_ref().and_then(Canonical::of),
        tail,
    })
}

fn check_dim(a: &SetExpr, x: &GenNumber) -> Result<()> {
    if a.dim() != x.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            got: x.dim(),
        });
    }
    Ok(())
}

/// `x in [A_eps]`: `d(x_eps, A_eps)` is negligible.
pub fn internal_member(x: &GenNumber, a: &SetExpr, grid: &EpsGrid) -> Result<MembershipVerdict> {
    check_dim(a, x)?;
    let p = profile(a, x, grid, Side::ToSet)?;
    let conservative = !a.is_exact();
    if let Some(c) = &p.canon {
        let zero = c.is_exact_zero();
        return Ok(MembershipVerdict {
            verdict: Verdict::from_bool(zero),
            witness: Some(Witness::M(c.valuation())),
            method: Method::Exact,
            conservative,
            evidence: p.evidence(),
        });
    }
    let cl = classify_samples(&p.logs())?;
    let verdict = match cl.verdict {
        v if v.is_negligible() => Verdict::True,
        ClassVerdict::Undetermined => Verdict::Undetermined,
        _ => Verdict::False,
    };
    Ok(MembershipVerdict {
        verdict,
        witness: Some(Witness::M(cl.estimate.value)),
        method: Method::Regression,
        conservative,
        evidence: p.evidence(),
    })
}

/// `x in <A_eps>` via the distance characterization: `d(x_eps, A_eps^c)`
/// is invertible. The witness `q` satisfies `d > eps^q` at every tail sample.
pub fn strong_member_sharp(
    x: &GenNumber,
    a: &SetExpr,
    grid: &EpsGrid,
) -> Result<MembershipVerdict> {
    check_dim(a, x)?;
    let p = profile(a, x, grid, Side::ToComplement)?;
    let conservative = !a.is_exact();
    let mk = |verdict, witness, method| MembershipVerdict {
        verdict,
        witness,
        method,
        conservative,
        evidence: p.evidence(),
    };
    let holds = |q: i64| {
        p.tail
            .iter()
            .all(|(e, v)| v.sign > 0.0 && v.ln_abs > q as f64 * e.ln())
    };
    if let Some(c) = &p.canon {
        let lo = c.lower_order();
        if lo.is_infinite() {
            let zero = p.tail.iter().find(|(_, v)| v.is_zero()).map(|(e, _)| Witness::Eps(*e));
            return Ok(mk(Verdict::False, zero, Method::Exact));
        }
        let q = lo.floor() as i64 + 1;
        return Ok(if holds(q) {
            mk(Verdict::True, Some(Witness::Q(q)), Method::Exact)
        } else {
            // The asymptotic bound has not kicked in on this grid.
            mk(Verdict::Undetermined, Some(Witness::Q(q)), Method::Exact)
        });
    }
    if let Some((e, _)) = p.tail.iter().find(|(_, v)| v.is_zero()) {
        return Ok(mk(Verdict::False, Some(Witness::Eps(*e)), Method::Regression));
    }
    let logs = p.logs();
    let orders: Vec<f64> = logs.iter().map(|(le, lv)| lv / le).collect();
    let max_order = orders.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cl = classify_samples(&logs)?;
    if cl.estimate.residual <= RESIDUAL_TOL && max_order < NEGLIGIBLE_ORDER {
        let q = max_order.floor() as i64 + 1;
        if holds(q) {
            return Ok(mk(Verdict::True, Some(Witness::Q(q)), Method::Regression));
        }
    }
    let third = &orders[orders.len() - orders.len().div_ceil(3)..];
    if third.iter().all(|&o| o >= NEGLIGIBLE_ORDER) {
        return Ok(mk(Verdict::False, None, Method::Regression));
    }
    Ok(mk(Verdict::Undetermined, None, Method::Regression))
}

/// Fermat strong membership: tail distances to the complement stay above a
/// standard radius. The witness is `r = 0.8 * inf` of the tail distances.
pub fn strong_member_fermat(
    x: &GenNumber,
    a: &SetExpr,
    grid: &EpsGrid,
) -> Result<MembershipVerdict> {
    check_dim(a, x)?;
    let p = profile(a, x, grid, Side::ToComplement)?;
    let conservative = !a.is_exact();
    let vals: Vec<f64> = p.tail.iter().map(|(_, v)| v.to_f64()).collect();
    let inf = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let r = Witness::R((0.8 * inf).min(family::HUGE));
    let mk = |verdict, witness, method| MembershipVerdict {
        verdict,
        witness,
        method,
        conservative,
        evidence: p.evidence(),
    };
    if let Some(c) = &p.canon {
        let bounded_below = c
            .atoms
            .iter()
            .all(|(_, s)| s.lead().is_some_and(|(e, k)| e <= 1e-12 && k > 0.0));
        return Ok(if bounded_below && inf > 0.0 {
            mk(Verdict::True, Some(r), Method::Exact)
        } else {
            mk(Verdict::False, None, Method::Exact)
        });
    }
    let k = vals.len().div_ceil(3);
    let min = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
    let (i1, i3) = (min(&vals[..k]), min(&vals[vals.len() - k..]));
    let smallest = *crate::asymptotics::LADDER.last().unwrap();
    if i3 >= smallest && i3 >= 0.5 * i1 {
        return Ok(mk(Verdict::True, Some(r), Method::Regression));
    }
    if i3 < smallest {
        return Ok(mk(Verdict::False, None, Method::Regression));
    }
    Ok(mk(Verdict::Undetermined, None, Method::Regression))
}

/// `A_{m,eps} = {x : d(x, A_eps^c) >= eps^m}`.
pub fn eroded_family(a: &SetExpr, m: u32) -> SetExpr {
    a.clone().erode(m)
}

/// `A_{m,eps} = {x : d(x, A_eps) < eps^m}`.
pub fn dilated_family(a: &SetExpr, m: u32) -> SetExpr {
    a.clone().dilate(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaReport {
    pub strong: Verdict,
    pub internal: Verdict,
    /// Smallest `m` with `x in [eroded(A, m)]`.
    pub eroded_witness: Option<u32>,
    pub in_all_dilations: Verdict,
    /// Item (i): strong membership iff some erosion holds `x` internally.
    pub agrees_eroded: bool,
    /// Item (ii): internal membership iff every dilation holds `x` strongly.
    pub agrees_dilated: bool,
    pub inconclusive: bool,
}

impl SigmaReport {
    pub fn agrees(&self) -> bool {
        self.agrees_eroded && self.agrees_dilated && !self.inconclusive
    }
}

/// Checks both decompositions of the strongly internal set against the
/// direct oracles for `m = 1..=m_max`.
pub fn sigma_check(x: &GenNumber, a: &SetExpr, grid: &EpsGrid, m_max: u32) -> Result<SigmaReport> {
    let strong = strong_member_sharp(x, a, grid)?.verdict;
    let internal = internal_member(x, a, grid)?.verdict;
    let mut inconclusive =
        strong == Verdict::Undetermined || internal == Verdict::Undetermined;
    let mut eroded_witness = None;
    let mut any_eroded = Verdict::False;
    for m in 1..=m_max {
        let v = internal_member(x, &eroded_family(a, m), grid)?.verdict;
        inconclusive |= v == Verdict::Undetermined;
        if v.is_true() && eroded_witness.is_none() {
            eroded_witness = Some(m);
        }
        any_eroded = any_eroded.or(v);
    }
    let mut all_dilated = Verdict::True;
    for m in 1..=m_max {
        let v = strong_member_sharp(x, &dilated_family(a, m), grid)?.verdict;
        inconclusive |= v == Verdict::Undetermined;
        all_dilated = all_dilated.and(v);
    }
    Ok(SigmaReport {
        strong,
        internal,
        eroded_witness,
        in_all_dilations: all_dilated,
        agrees_eroded: strong == any_eroded,
        agrees_dilated: internal == all_dilated,
        inconclusive,
    })
}

/// Directions used to push a point out of a set: the outward sdf normal
/// first, then the axes and (in 2D) the diagonals.
fn push_directions(a: &SetExpr, eps: f64, p: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = p.len();
    let mut dirs = Vec::new();
    if let Some(g) = a.sdf_gradient(eps, p)? {
        dirs.push(g.iter().map(|v| -v).collect());
    }
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut u = vec![0.0; d];
            u[i] = s;
            dirs.push(u);
        }
    }
    if d == 2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            dirs.push(vec![sx * h, sy * h]);
        }
    }
    Ok(dirs)
}

/// The representative-perturbation test, used as a falsifier of the
/// distance criterion.
///
/// For a point judged in with witness `q`, every representative
/// `x +- eps^{q+1}/2 e_i` must stay strongly inside. Otherwise a
/// representative `x + delta` with `|delta| <= 2 d(x, A^c) <= 2 eps^20` on
/// the tail is built, and it must leave `A_eps` on at least three tail
/// samples. Returns the membership this test supports.
pub fn perturbation_falsifier(x: &GenNumber, a: &SetExpr, grid: &EpsGrid) -> Result<Verdict> {
    let base = strong_member_sharp(x, a, grid)?;
    if let (Verdict::True, Some(Witness::Q(q))) = (base.verdict, base.witness) {
        return Ok(Verdict::from_bool(perturbed_points(x, q).iter().all(|y| {
            strong_member_sharp(y, a, grid).is_ok_and(|m| m.is_in())
        })));
    }
    let mut sets = Vec::new();
    a.collect_index_sets(&mut sets);
    x.collect_index_sets(&mut sets);
    let g = grid.augmented(&sets);
    let mut left = 0usize;
    for &e in g.tail() {
        let p = x.eval(e)?;
        let s = a.sdf(e, &p)?;
        if s <= 0.0 {
            left += 1;
            continue;
        }
        if s > e.powi(20) {
            continue;
        }
        for u in push_directions(a, e, &p)? {
            let y: Vec<f64> = p.iter().zip(&u).map(|(v, ui)| v + 2.0 * s * ui).collect();
            if a.sdf(e, &y)? <= 0.0 {
                left += 1;
                break;
            }
        }
    }
    Ok(Verdict::from_bool(left < 3))
}

/// `x +- eps^{q+1}/2` along each axis.
fn perturbed_points(x: &GenNumber, q: i64) -> Vec<GenNumber> {
    let mut out = Vec::new();
    for i in 0..x.dim() {
        for s in [0.5, -0.5] {
            let mut comps = x.components().to_vec();
            comps[i] = comps[i].clone().add(NetExpr::monomial(s, (q + 1) as f64));
            out.push(GenNumber::vector(comps));
        }
    }
    out
}

/// Sharp openness: with witness `q`, every `y` with `|y - x| <= eps^{q+1}/2`
/// along the probe directions is strongly inside too. Undetermined when `x`
/// is not strongly inside.
pub fn openness_probe(x: &GenNumber, a: &SetExpr, grid: &EpsGrid) -> Result<Verdict> {
    let base = strong_member_sharp(x, a, grid)?;
    let Some(Witness::Q(q)) = base.witness.filter(|_| base.is_in()) else {
        return Ok(Verdict::Undetermined);
    };
    let mut ys = perturbed_points(x, q);
    if x.dim() == 2 {
        let h = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
        for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            ys.push(GenNumber::vector(vec![
                x.component(0).clone().add(NetExpr::monomial(sx * h, (q + 1) as f64)),
                x.component(1).clone().add(NetExpr::monomial(sy * h, (q + 1) as f64)),
            ]));
        }
    }
    let mut out = Verdict::True;
    for y in &ys {
        out = out.and(Verdict::from_bool(strong_member_sharp(y, a, grid)?.is_in()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub verdict: Verdict,
    /// Smallest integer `N` with `sup |a| < eps^-N` on the tail.
    pub n: Option<i64>,
    /// `(eps, ln sup |a|)`.
    pub evidence: Vec<(f64, f64)>,
}

/// `(A_eps)` sharply bounded: `sup_{a in A_eps} |a| <= eps^-N` on the tail.
pub fn sharply_bounded(a: &SetExpr, grid: &EpsGrid) -> Result<BoundReport> {
    let mut sets = Vec::new();
    a.collect_index_sets(&mut sets);
    let g = grid.augmented(&sets);
    let mut evidence = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for &e in g.tail() {
        let Some(l) = a.log_sup_norm(e)? else {
            return Ok(BoundReport {
                verdict: Verdict::False,
                n: None,
                evidence,
            });
        };
        evidence.push((e, l));
        worst = worst.max(l / -e.ln());
    }
    if worst > N_MAX {
        return Ok(BoundReport {
            verdict: Verdict::False,
            n: None,
            evidence,
        });
    }
    let n = if worst == f64::NEG_INFINITY {
        0
    } else {
        ((worst + 1e-6).floor() as i64 + 1).max(0)
    };
    Ok(BoundReport {
        verdict: Verdict::True,
        n: Some(n),
        evidence,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupReport {
    pub verdict: Verdict,
    /// `(eps, sampled sup)` on the tail.
    pub sups: Vec<(f64, f64)>,
    pub classification: Classification,
}

fn require_bounded(a: &SetExpr, grid: &EpsGrid, which: &str) -> Result<()> {
    if !sharply_bounded(a, grid)?.verdict.is_true() {
        return Err(Error::Precondition(format!(
            "{which} family {a} is not sharply bounded"
        )));
    }
    Ok(())
}

/// Per tail eps: `sup { d(x, A_eps^c) : x in B_eps^c }`, sampled in the
/// bounding box of `A` and on both boundaries.
fn sampled_sup(a: &SetExpr, b: &SetExpr, grid: &EpsGrid, cfg: SampleConfig) -> Result<Vec<(f64, f64)>> {
    let mut sets = Vec::new();
    a.collect_index_sets(&mut sets);
    b.collect_index_sets(&mut sets);
    let g = grid.augmented(&sets);
    let rows: Vec<Result<(f64, f64, usize)>> = g
        .tail()
        .par_iter()
        .map(|&e| {
            let pts = sampling::sample_points(a, &[a, b], e, cfg)?;
            let mut sup = 0.0f64;
            let mut count = 0usize;
            for p in &pts {
                if b.sdf(e, p)? <= 0.0 {
                    count += 1;
                    sup = sup.max(a.sdf(e, p)?.max(0.0));
                }
            }
            Ok((e, sup, count))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    if rows.iter().all(|r| r.2 == 0) {
        return Err(Error::Sampling(format!(
            "no samples of the complement of {b} near {a}"
        )));
    }
    Ok(rows.into_iter().map(|(e, s, _)| (e, s)).collect())
}

pub(crate) fn classify_sups(sups: &[(f64, f64)]) -> Result<Classification> {
    let logs: Vec<(f64, f64)> = sups
        .iter()
        .map(|&(e, s)| (e.ln(), if s == 0.0 { f64::NEG_INFINITY } else { s.ln() }))
        .collect();
    classify_samples(&logs)
}

pub(crate) fn negligible_verdict(c: &Classification) -> Verdict {
    match c.verdict {
        v if v.is_negligible() => Verdict::True,
        ClassVerdict::Undetermined => Verdict::Undetermined,
        _ => Verdict::False,
    }
}

/// `<A> subset <B>` when `sup_{x in B^c} d(x, A^c)` is negligible.
pub fn subset_criterion(
    a: &SetExpr,
    b: &SetExpr,
    grid: &EpsGrid,
    cfg: SampleConfig,
) -> Result<SupReport> {
    require_bounded(a, grid, "first")?;
    let sups = sampled_sup(a, b, grid, cfg)?;
    let classification = classify_sups(&sups)?;
    Ok(SupReport {
        verdict: negligible_verdict(&classification),
        sups,
        classification,
    })
}

/// `<A> = <B>` when the Hausdorff distance of the complements is
/// negligible; both one-sided sups are sampled.
pub fn same_strong_set(
    a: &SetExpr,
    b: &SetExpr,
    grid: &EpsGrid,
    cfg: SampleConfig,
) -> Result<SupReport> {
    require_bounded(a, grid, "first")?;
    require_bounded(b, grid, "second")?;
    let ab = sampled_sup(a, b, grid, cfg)?;
    let ba = sampled_sup(b, a, grid, cfg)?;
    let sups: Vec<(f64, f64)> = ab
        .iter()
        .zip(&ba)
        .map(|(x, y)| (x.0, x.1.max(y.1)))
        .collect();
    let classification = classify_sups(&sups)?;
    Ok(SupReport {
        verdict: negligible_verdict(&classification),
        sups,
        classification,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    /// `[B] subset <Omega>` on the catalog.
    pub hypothesis: Verdict,
    /// Catalog point refuting (or failing to decide) the hypothesis.
    pub witness: Option<GenNumber>,
    /// `B_eps subset Omega_eps` on every tail sample.
    pub conclusion: Verdict,
    /// Largest grid eps from which containment holds at every smaller one.
    pub confirmed_from: Option<f64>,
    /// `(eps, contained)` over the whole grid.
    pub per_eps: Vec<(f64, bool)>,
}

/// Tests `[B] subset <Omega>` on `catalog`, and if it holds, samples
/// `B_eps` to confirm `B_eps subset Omega_eps` for small eps.
pub fn containment_shadow(
    b: &SetExpr,
    omega: &SetExpr,
    grid: &EpsGrid,
    catalog: &[GenNumber],
    cfg: SampleConfig,
) -> Result<ContainmentReport> {
    require_bounded(b, grid, "inner")?;
    let mut hypothesis = Verdict::True;
    let mut witness = None;
    for x in catalog {
        let inside = internal_member(x, b, grid)?.verdict;
        if inside.is_false() {
            continue;
        }
        let strong = strong_member_sharp(x, omega, grid)?.verdict;
        let v = if inside.is_true() { strong } else { strong.or(Verdict::Undetermined) };
        if !v.is_true() && witness.is_none() {
            witness = Some(x.clone());
        }
        hypothesis = hypothesis.and(v);
    }
    if !hypothesis.is_true() {
        return Ok(ContainmentReport {
            hypothesis,
            witness,
            conclusion: Verdict::Undetermined,
            confirmed_from: None,
            per_eps: Vec::new(),
        });
    }
    let mut sets = Vec::new();
    b.collect_index_sets(&mut sets);
    omega.collect_index_sets(&mut sets);
    let g = grid.augmented(&sets);
    let per_eps: Vec<Result<(f64, bool)>> = g
        .samples()
        .par_iter()
        .map(|&e| {
            let pts = sampling::sample_points(b, &[b], e, cfg)?;
            let mut ok = true;
            for p in &pts {
                if b.sdf(e, p)? >= 0.0 && omega.sdf(e, p)? <= 0.0 {
                    ok = false;
                    break;
                }
            }
            Ok((e, ok))
        })
        .collect();
    let per_eps = per_eps.into_iter().collect::<Result<Vec<_>>>()?;
    let mut confirmed_from = None;
    for &(e, ok) in per_eps.iter().rev() {
        if !ok {
            break;
        }
        confirmed_from = Some(e);
    }
    let tail_start = g.tail()[0];
    let conclusion = Verdict::from_bool(confirmed_from.is_some_and(|e| e >= tail_start));
    Ok(ContainmentReport {
        hypothesis,
        witness,
        conclusion,
        confirmed_from,
        per_eps,
    })
}

/// The per-eps convex hull of finitely many point nets.
pub fn convexify(points: &[GenNumber]) -> Result<SetExpr> {
    let h = SetExpr::Hull(points.to_vec());
    h.validate()?;
    Ok(h)
}

/// Carathéodory decomposition of `p` in the hull of `points` at `eps`:
/// vertex indices (into `points`) and convex weights.
pub fn decompose(points: &[GenNumber], eps: f64, p: &[f64]) -> Result<Option<(Vec<usize>, Vec<f64>)>> {
    let pts = points.iter().map(|q| q.eval(eps)).collect::<Result<Vec<_>>>()?;
    if pts[0].len() > 2 {
        return Err(Error::Unsupported(format!("convex hulls in dimension {}", pts[0].len())));
    }
    Ok(hull::caratheodory(&pts, p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionRow {
    pub point: GenNumber,
    pub joint: Verdict,
    pub separate: Verdict,
}

impl IntersectionRow {
    pub fn agrees(&self) -> bool {
        self.joint == self.separate && self.joint != Verdict::Undetermined
    }
}

/// Compares `x in <A cap B>` with `x in <A> and x in <B>` per catalog point.
pub fn intersection_identity_check(
    a: &SetExpr,
    b: &SetExpr,
    catalog: &[GenNumber],
    grid: &EpsGrid,
) -> Result<Vec<IntersectionRow>> {
    let both = SetExpr::intersection(vec![a.clone(), b.clone()]);
    catalog
        .par_iter()
        .map(|x| {
            let joint = strong_member_sharp(x, &both, grid)?.verdict;
            let separate = strong_member_sharp(x, a, grid)?
                .verdict
                .and(strong_member_sharp(x, b, grid)?.verdict);
            Ok(IntersectionRow {
                point: x.clone(),
                joint,
                separate,
            })
        })
        .collect()
}

/// Grid restricted to a scope, re-exported for callers that sample sets.
pub fn set_grid(a: &SetExpr, grid: &EpsGrid) -> EpsGrid {
    let mut sets = Vec::new();
    a.collect_index_sets(&mut sets);
    grid.augmented(&sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::IndexSet;

    fn g() -> EpsGrid {
        EpsGrid::default()
    }

    fn unit_interval() -> SetExpr {
        SetExpr::constant(SetExpr::interval(NetExpr::zero(), NetExpr::one())).unwrap()
    }

    fn punctured_line() -> SetExpr {
        SetExpr::Punctured(vec![GenNumber::real(0.0)])
    }

    #[test]
    fn internal_examples() {
        assert!(internal_member(&GenNumber::real(0.0), &punctured_line(), &g()).unwrap().is_in());
        assert!(internal_member(&GenNumber::eps_pow(1.0), &unit_interval(), &g()).unwrap().is_in());
        let ball = SetExpr::ball(GenNumber::zeros(1), NetExpr::one());
        assert!(internal_member(&GenNumber::real(2.0), &ball, &g()).unwrap().is_out());
    }

    #[test]
    fn sharp_examples() {
        assert!(strong_member_sharp(&GenNumber::real(0.0), &punctured_line(), &g()).unwrap().is_out());
        let m = strong_member_sharp(&GenNumber::eps_pow(1.0), &unit_interval(), &g()).unwrap();
        assert!(m.is_in());
        assert_eq!(m.witness, Some(Witness::Q(2)));
        let a = NetExpr::eps();
        let fam = SetExpr::interval(a.clone(), NetExpr::one());
        assert!(strong_member_sharp(&GenNumber::scalar(a), &fam, &g()).unwrap().is_out());
    }

    #[test]
    fn fermat_examples() {
        let m = strong_member_fermat(&GenNumber::real(0.5), &unit_interval(), &g()).unwrap();
        assert!(m.is_in());
        assert_eq!(m.witness, Some(Witness::R(0.4)));
        assert!(strong_member_fermat(&GenNumber::eps_pow(1.0), &unit_interval(), &g()).unwrap().is_out());
        let omega = SetExpr::constant(SetExpr::interval(NetExpr::Const(-1.0), NetExpr::one())).unwrap();
        let compact = GenNumber::scalar(NetExpr::Const(0.3).add(NetExpr::EpsPow(2.0)));
        assert!(strong_member_fermat(&compact, &omega, &g()).unwrap().is_in());
    }

    #[test]
    fn sigma_examples() {
        let r = sigma_check(&GenNumber::real(0.0), &punctured_line(), &g(), SIGMA_M_MAX).unwrap();
        assert!(r.agrees());
        assert_eq!(r.in_all_dilations, Verdict::True);
        assert_eq!(r.eroded_witness, None);
        let r = sigma_check(&GenNumber::eps_pow(1.0), &unit_interval(), &g(), SIGMA_M_MAX).unwrap();
        assert!(r.agrees());
        assert!(r.eroded_witness.is_some_and(|m| m <= 2));
        let ball = SetExpr::ball(GenNumber::zeros(1), NetExpr::one());
        let r = sigma_check(&GenNumber::real(2.0), &ball, &g(), SIGMA_M_MAX).unwrap();
        assert!(r.agrees());
        assert_eq!((r.strong, r.internal), (Verdict::False, Verdict::False));
    }

    #[test]
    fn falsifier_agrees_on_basic_cases() {
        let e_small = GenNumber::scalar(NetExpr::ExpInvEps.recip());
        for (x, a, want) in [
            (GenNumber::real(0.0), punctured_line(), Verdict::False),
            (GenNumber::eps_pow(1.0), unit_interval(), Verdict::True),
            (e_small, unit_interval(), Verdict::False),
        ] {
            assert_eq!(strong_member_sharp(&x, &a, &g()).unwrap().verdict, want);
            assert_eq!(perturbation_falsifier(&x, &a, &g()).unwrap(), want);
        }
    }

    #[test]
    fn openness() {
        assert_eq!(
            openness_probe(&GenNumber::eps_pow(1.0), &unit_interval(), &g()).unwrap(),
            Verdict::True
        );
        assert_eq!(
            openness_probe(&GenNumber::real(0.0), &punctured_line(), &g()).unwrap(),
            Verdict::Undetermined
        );
    }

    #[test]
    fn boundedness() {
        let b = SetExpr::ball(GenNumber::zeros(1), NetExpr::EpsPow(-3.0));
        let r = sharply_bounded(&b, &g()).unwrap();
        assert_eq!((r.verdict, r.n), (Verdict::True, Some(4)));
        let b = SetExpr::ball(GenNumber::zeros(1), NetExpr::ExpInvEps);
        assert!(sharply_bounded(&b, &g()).unwrap().verdict.is_false());
        let pts = SetExpr::FinitePoints(vec![GenNumber::real(1.0), GenNumber::real(-2.0)]);
        assert!(sharply_bounded(&pts, &g()).unwrap().verdict.is_true());
    }

    #[test]
    fn subset_examples() {
        let cfg = SampleConfig::default();
        let unit = SetExpr::ball(GenNumber::zeros(1), NetExpr::one());
        let shrunk = SetExpr::ball(GenNumber::zeros(1), NetExpr::one().sub(NetExpr::eps()));
        let small = SetExpr::ball(GenNumber::zeros(1), NetExpr::Const(0.9));
        assert!(subset_criterion(&shrunk, &unit, &g(), cfg).unwrap().verdict.is_true());
        let r = subset_criterion(&unit, &small, &g(), cfg).unwrap();
        assert!(r.verdict.is_false());
        assert!(r.sups.iter().all(|s| (s.1 - 0.1).abs() < 1e-3));
        assert!(subset_criterion(&unit, &unit, &g(), cfg).unwrap().verdict.is_true());
    }

    #[test]
    fn same_set_examples() {
        let cfg = SampleConfig::default();
        let (a, b) = (NetExpr::eps(), NetExpr::one().sub(NetExpr::eps()));
        let open = SetExpr::interval(a.clone(), b.clone());
        let closed = SetExpr::closed_interval(a, b);
        assert!(same_strong_set(&open, &closed, &g(), cfg).unwrap().verdict.is_true());
        let s = IndexSet::interval(0.3, 0.6).unwrap();
        let wobble = SetExpr::ball(
            GenNumber::zeros(1),
            NetExpr::one().add(NetExpr::mask(s, NetExpr::Const(0.1))),
        );
        let unit = SetExpr::ball(GenNumber::zeros(1), NetExpr::one());
        assert!(same_strong_set(&unit, &wobble, &g(), cfg).unwrap().verdict.is_true());
        let small = SetExpr::ball(GenNumber::zeros(1), NetExpr::Const(0.9));
        assert!(same_strong_set(&unit, &small, &g(), cfg).unwrap().verdict.is_false());
    }

    #[test]
    fn containment_examples() {
        let cfg = SampleConfig::default();
        let b = SetExpr::closed_interval(
            NetExpr::Const(-1.0).add(NetExpr::eps()),
            NetExpr::one().sub(NetExpr::eps()),
        );
        let omega = SetExpr::constant(SetExpr::interval(NetExpr::Const(-1.0), NetExpr::one())).unwrap();
        let r = containment_shadow(&b, &omega, &g(), &b.catalog_points(), cfg).unwrap();
        assert_eq!((r.hypothesis, r.conclusion), (Verdict::True, Verdict::True));
        assert_eq!(r.confirmed_from, Some(g().largest()));

        let fixed = SetExpr::constant(SetExpr::closed_interval(NetExpr::zero(), NetExpr::one())).unwrap();
        let open = SetExpr::constant(SetExpr::interval(NetExpr::zero(), NetExpr::one())).unwrap();
        let r = containment_shadow(&fixed, &open, &g(), &fixed.catalog_points(), cfg).unwrap();
        assert_eq!(r.hypothesis, Verdict::False);
        assert_eq!(r.witness, Some(GenNumber::real(0.0)));
    }

    #[test]
    fn hull_examples() {
        let pts = vec![GenNumber::real(0.0), GenNumber::eps_pow(1.0)];
        let h = convexify(&pts).unwrap();
        let eps = 0.125;
        assert_eq!(h.sdf(eps, &[0.0625]).unwrap(), 0.0625);
        assert!(h.sdf(eps, &[0.2]).unwrap() < 0.0);
        let (idx, lam) = decompose(&pts, eps, &[0.0625]).unwrap().unwrap();
        let rec: f64 = idx.iter().zip(&lam).map(|(&i, l)| l * pts[i].eval(eps).unwrap()[0]).sum();
        assert!((rec - 0.0625).abs() < 1e-12);
        let three = vec![GenNumber::reals(&[0.0, 0.0, 0.0])];
        assert!(matches!(convexify(&three), Err(Error::Unsupported(_))));
    }

    #[test]
    fn intersections() {
        let a = SetExpr::ball(GenNumber::reals(&[0.0, 0.0]), NetExpr::one());
        let b = SetExpr::ball(GenNumber::reals(&[1.0, 0.0]), NetExpr::one());
        let cat = vec![
            GenNumber::reals(&[0.5, 0.0]),
            GenNumber::reals(&[-0.5, 0.0]),
            GenNumber::reals(&[3.0, 0.0]),
        ];
        let rows = intersection_identity_check(&a, &b, &cat, &g()).unwrap();
        assert!(rows.iter().all(IntersectionRow::agrees));
        assert_eq!(rows[0].joint, Verdict::True);
    }
}
