//! Probes on generalized smooth functions: representative independence,
//! null and uniform-moderateness sups, cut-off globalization, Lipschitz
//! constants and the AFJ remainder ratios.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::asymptotics::{
    classify, leq, sharp_norm, valuation, ClassVerdict, Classification, Verdict,
    NEGLIGIBLE_ORDER,
};
use crate::error::{Error, Result};
use crate::gsf::{apply_at, gsf_eval, GsfDef};
use crate::net::{EpsGrid, GenNumber, IndexSet, NetExpr};
use crate::setnets::sampling::{halton, sample_points};
use crate::setnets::{
    classify_sups, negligible_verdict, sharply_bounded, strong_member_sharp, SampleConfig,
    SetExpr, SupReport, Witness,
};
use crate::sexpr::Sexp;
use crate::smooth::SmoothExpr;

/// Smallest estimated order of `f(x') - f(x)` accepted as "no change".
pub const REPRESENTATIVE_ORDER: f64 = 10.0;

/// A change of representative `x -> x + delta`.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// `delta = c e_S` with `S` not accumulating at 0.
    Mask(IndexSet, f64),
    /// `delta = eps^q`.
    Order(f64),
}

impl Perturbation {
    fn net(&self) -> Result<NetExpr> {
        match self {
            Perturbation::Mask(s, c) => {
                if s.accumulates_at_zero() {
                    return Err(Error::Precondition(format!(
                        "mask on {} is not negligible: the index set accumulates at 0",
                        s.to_sexp()
                    )));
                }
                Ok(NetExpr::mask(s.clone(), NetExpr::Const(*c)))
            }
            Perturbation::Order(q) => {
                if *q < NEGLIGIBLE_ORDER {
                    return Err(Error::Precondition(format!(
                        "a perturbation of order {q} changes the point, not its representative"
                    )));
                }
                Ok(NetExpr::EpsPow(*q))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeReport {
    pub verdict: Verdict,
    /// Classification of `f(x') - f(x)` per component.
    pub differences: Vec<Classification>,
}

/// Checks that `f(x + delta) = f(x)` for a negligible `delta`.
pub fn representative_independence(
    f: &GsfDef,
    x: &GenNumber,
    pert: &Perturbation,
    grid: &EpsGrid,
) -> Result<RepresentativeReport> {
    let delta = pert.net()?;
    let fx = gsf_eval(f, x, grid)?;
    let moved = x.map(|c| c.clone().add(delta.clone()));
    let fy = gsf_eval(f, &moved, grid)?;
    let mut verdict = Verdict::True;
    let mut differences = Vec::new();
    for (a, b) in fy.components().iter().zip(fx.components()) {
        let c = classify(&a.clone().sub(b.clone()), grid)?;
        verdict = verdict.and(if c.verdict.is_negligible() || c.estimate.value >= REPRESENTATIVE_ORDER {
            Verdict::True
        } else if c.verdict == ClassVerdict::Undetermined {
            Verdict::Undetermined
        } else {
            Verdict::False
        });
        differences.push(c);
    }
    Ok(RepresentativeReport {
        verdict,
        differences,
    })
}

/// Per tail eps, `sup |u_eps|` over sampled points of `A_eps`.
fn sampled_abs_sup(
    family: &[SmoothExpr],
    a: &SetExpr,
    grid: &EpsGrid,
    cfg: SampleConfig,
) -> Result<Vec<(f64, f64)>> {
    if !sharply_bounded(a, grid)?.verdict.is_true() {
        return Err(Error::Precondition(format!("{a} is not sharply bounded")));
    }
    let g = crate::setnets::set_grid(a, grid);
    let rows: Vec<Result<(f64, f64)>> = g
        .tail()
        .par_iter()
        .map(|&e| {
            let mut sup = 0.0f64;
            let mut seen = false;
            for p in sample_points(a, &[a], e, cfg)? {
                if a.sdf(e, &p)? < 0.0 {
                    continue;
                }
                seen = true;
                for u in family {
                    sup = sup.max(u.eval(e, &p)?.abs());
                }
            }
            if !seen {
                return Err(Error::Sampling(format!("no sample points inside {a} at eps={e:e}")));
            }
            Ok((e, sup))
        })
        .collect();
    rows.into_iter().collect()
}

/// `u` is null on the internal set `[A_eps]`: `sup_{A_eps} |u_eps|` is
/// negligible.
pub fn null_check(
    family: &[SmoothExpr],
    a: &SetExpr,
    grid: &EpsGrid,
    cfg: SampleConfig,
) -> Result<SupReport> {
    let sups = sampled_abs_sup(family, a, grid, cfg)?;
    let classification = classify_sups(&sups)?;
    Ok(SupReport {
        verdict: negligible_verdict(&classification),
        sups,
        classification,
    })
}

/// `u` is moderate on `[A_eps]` uniformly: `sup_{A_eps} |u_eps|` is
/// moderate.
pub fn uniform_moderateness(
    family: &[SmoothExpr],
    a: &SetExpr,
    grid: &EpsGrid,
    cfg: SampleConfig,
) -> Result<SupReport> {
    let sups = sampled_abs_sup(family, a, grid, cfg)?;
    let classification = classify_sups(&sups)?;
    let verdict = match classification.verdict {
        v if v.is_moderate() => Verdict::True,
        ClassVerdict::Undetermined => Verdict::Undetermined,
        _ => Verdict::False,
    };
    Ok(SupReport {
        verdict,
        sups,
        classification,
    })
}

fn coef(n: NetExpr) -> SmoothExpr {
    SmoothExpr::coef(n)
}

/// A smooth function positive exactly inside the primitive, agreeing with
/// the signed distance to first order at the boundary. `None` for the
/// whole space.
fn smooth_sdf(a: &SetExpr) -> Result<Option<SmoothExpr>> {
    let x = SmoothExpr::var;
    Ok(Some(match a {
        SetExpr::Whole(_) => return Ok(None),
        SetExpr::Constant(inner) => return smooth_sdf(inner),
        SetExpr::Complement(inner) => match smooth_sdf(inner)? {
            Some(s) => s.neg(),
            None => {
                return Err(Error::Precondition("the complement of the whole space is empty".into()))
            }
        },
        SetExpr::Ball { center, radius } => {
            // (r^2 - |x - c|^2) / (2r)
            let gaps = center
                .components()
                .iter()
                .enumerate()
                .map(|(i, c)| SmoothExpr::powi(x(i).sub(coef(c.clone())), 2))
                .collect();
            SmoothExpr::prod(vec![
                SmoothExpr::powi(coef(radius.clone()), 2).sub(SmoothExpr::sum(gaps)),
                coef(NetExpr::Prod(vec![NetExpr::Const(0.5), radius.clone().recip()])),
            ])
        }
        SetExpr::Box { lo, hi, .. } if lo.dim() == 1 => {
            // (x - lo)(hi - x) / (hi - lo)
            let (l, h) = (lo.component(0).clone(), hi.component(0).clone());
            SmoothExpr::prod(vec![
                x(0).sub(coef(l.clone())),
                coef(h.clone()).sub(x(0)),
                coef(h.sub(l).recip()),
            ])
        }
        SetExpr::HalfSpace { normal, offset } => {
            let dot = SmoothExpr::sum(
                normal
                    .components()
                    .iter()
                    .enumerate()
                    .map(|(i, n)| SmoothExpr::prod(vec![coef(n.clone()), x(i)]))
                    .collect(),
            );
            SmoothExpr::prod(vec![
                coef(offset.clone()).sub(dot),
                coef(normal.norm_net().recip()),
            ])
        }
        other => {
            return Err(Error::Unsupported(format!(
                "smooth cut-off for {other}"
            )))
        }
    }))
}

/// `chi_eps u_eps` with `chi_eps = psi((s - a)/(b - a))`, `psi` the smooth
/// step, `s` a smooth signed distance of `Omega_eps`, `a = 2 e^{-2/eps}`
/// and `b = e^{-1/eps}/2`: `chi = 1` on `{d(x, Omega^c) > e^{-1/eps}}` and
/// `chi = 0` off `{d(x, Omega^c) > e^{-2/eps}}`.
pub fn cutoff_globalize(family: &[SmoothExpr], omega: &SetExpr) -> Result<Vec<SmoothExpr>> {
    if !omega.is_exact() {
        return Err(Error::Precondition(format!(
            "cut-off needs an exact signed distance; {omega} has union or intersection nodes"
        )));
    }
    let Some(s) = smooth_sdf(omega)? else {
        return Ok(family.to_vec());
    };
    let small = NetExpr::ExpInvEps.recip();
    let a = NetExpr::Prod(vec![NetExpr::Const(2.0), small.clone(), small.clone()]);
    // 1/(b - a) = 2 e^{1/eps} / (1 - 4 e^{-1/eps}), kept free of underflow.
    let k = NetExpr::Prod(vec![
        NetExpr::Const(2.0),
        NetExpr::ExpInvEps,
        NetExpr::one()
            .sub(NetExpr::Prod(vec![NetExpr::Const(4.0), small]))
            .recip(),
    ]);
    let t = SmoothExpr::prod(vec![s.sub(coef(a)), coef(k)]);
    let chi = SmoothExpr::step(t);
    Ok(family
        .iter()
        .map(|u| SmoothExpr::prod(vec![chi.clone(), u.clone()]))
        .collect())
}

/// Points `x(t)` of a ball or box parametrized by `t` in the unit ball or
/// unit cube.
struct Region {
    dim: usize,
    /// `center + t * radius` or `lo + t (hi - lo)`.
    origin: GenNumber,
    scale: Vec<NetExpr>,
    is_ball: bool,
}

impl Region {
    fn of(a: &SetExpr) -> Result<Region> {
        match a {
            SetExpr::Constant(inner) => Region::of(inner),
            SetExpr::Ball { center, radius } => Ok(Region {
                dim: center.dim(),
                origin: center.clone(),
                scale: vec![radius.clone(); center.dim()],
                is_ball: true,
            }),
            SetExpr::Box { lo, hi, .. } => Ok(Region {
                dim: lo.dim(),
                origin: lo.clone(),
                scale: lo
                    .components()
                    .iter()
                    .zip(hi.components())
                    .map(|(l, h)| h.clone().sub(l.clone()))
                    .collect(),
                is_ball: false,
            }),
            other => Err(Error::Unsupported(format!("Lipschitz region {other}"))),
        }
    }

    /// Parameter from a point `u` of the unit cube.
    fn param(&self, u: &[f64]) -> Vec<f64> {
        if !self.is_ball {
            return u.to_vec();
        }
        match self.dim {
            1 => vec![2.0 * u[0] - 1.0],
            _ => {
                let (r, th) = (u[0].sqrt(), TAU * u[1]);
                vec![r * th.cos(), r * th.sin()]
            }
        }
    }

    fn point(&self, t: &[f64]) -> GenNumber {
        GenNumber::vector(
            self.origin
                .components()
                .iter()
                .zip(&self.scale)
                .zip(t)
                .map(|((o, s), &ti)| {
                    if ti == 0.0 {
                        o.clone()
                    } else {
                        o.clone().add(NetExpr::Prod(vec![NetExpr::Const(ti), s.clone()]))
                    }
                })
                .collect(),
        )
    }

    /// Extreme parameters: the ends of each axis.
    fn extremes(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for v in if self.is_ball { [-1.0, 1.0] } else { [0.0, 1.0] } {
                let mut t = vec![if self.is_ball { 0.0 } else { 0.5 }; self.dim];
                t[i] = v;
                out.push(t);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    /// `L_eps`: the sampled sup of the Jacobian norm.
    pub l: GenNumber,
    pub classification: Classification,
    /// Fitted valuation of `L`.
    pub order: f64,
    pub pairs: usize,
    pub pairs_ok: usize,
    /// Moderate `L` and every pair satisfies the inequality.
    pub verdict: Verdict,
}

impl LipschitzReport {
    pub fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "lipschitz",
            vec![
                Sexp::tagged("verdict", vec![Sexp::atom(self.verdict.name())]),
                Sexp::tagged("order", vec![Sexp::num(self.order)]),
                Sexp::tagged("class", vec![Sexp::atom(self.classification.verdict.name())]),
                Sexp::tagged(
                    "pairs",
                    vec![Sexp::atom(self.pairs_ok.to_string()), Sexp::atom(self.pairs.to_string())],
                ),
            ],
        )
    }
}

fn balanced_max(mut xs: Vec<NetExpr>) -> NetExpr {
    while xs.len() > 1 {
        let mut next = Vec::with_capacity(xs.len().div_ceil(2));
        let mut it = xs.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.max(b),
                None => a,
            });
        }
        xs = next;
    }
    xs.pop().unwrap_or(NetExpr::zero())
}

/// Sampled Lipschitz constant over a ball or box region, and the check
/// `|f(x) - f(y)| <= L |x - y|` on `pairs` random pairs of region points.
/// `L` is the max of the Jacobian norm over `cfg.budget` points of the
/// region plus the axis extremes, all as generalized points.
pub fn lipschitz_probe(
    f: &GsfDef,
    region: &SetExpr,
    grid: &EpsGrid,
    cfg: SampleConfig,
    pairs: usize,
) -> Result<LipschitzReport> {
    let reg = Region::of(region)?;
    if reg.dim != f.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            got: reg.dim,
        });
    }
    let mut squares = Vec::new();
    for u in &f.family {
        for i in 0..reg.dim {
            squares.push(SmoothExpr::powi(u.diff(i), 2));
        }
    }
    let jac = SmoothExpr::sqrt(SmoothExpr::sum(squares));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shift: Vec<f64> = (0..reg.dim).map(|_| rng.gen::<f64>()).collect();
    let mut params = reg.extremes();
    params.extend(halton(cfg.budget, reg.dim, &shift).iter().map(|u| reg.param(u)));
    let leaves: Vec<NetExpr> = params.iter().map(|t| apply_at(&jac, &reg.point(t))).collect();
    let l = GenNumber::scalar(balanced_max(leaves));
    let classification = classify(l.component(0), grid)?;
    let order = valuation(l.component(0), grid)?.value;

    let pair_params: Vec<(Vec<f64>, Vec<f64>)> = (0..pairs)
        .map(|_| {
            let mut draw = || {
                let u: Vec<f64> = (0..reg.dim).map(|_| rng.gen::<f64>()).collect();
                reg.param(&u)
            };
            (draw(), draw())
        })
        .collect();
    let checks: Vec<Result<Verdict>> = pair_params
        .par_iter()
        .map(|(s, t)| {
            let (x, y) = (reg.point(s), reg.point(t));
            let lhs = (&gsf_eval_in(f, &x, grid)? - &gsf_eval_in(f, &y, grid)?).norm();
            let rhs = GenNumber::scalar(NetExpr::Prod(vec![
                l.component(0).clone(),
                (&x - &y).norm_net(),
            ]));
            leq(&lhs, &rhs, grid)
        })
        .collect();
    let mut pairs_ok = 0;
    let mut all = Verdict::True;
    for c in checks {
        let v = c?;
        pairs_ok += v.is_true() as usize;
        all = all.and(v);
    }
    let moderate = match classification.verdict {
        v if v.is_moderate() => Verdict::True,
        ClassVerdict::Undetermined => Verdict::Undetermined,
        _ => Verdict::False,
    };
    Ok(LipschitzReport {
        l,
        classification,
        order,
        pairs,
        pairs_ok,
        verdict: moderate.and(all),
    })
}

/// Region points may sit on the boundary of the domain, where the strong
/// membership check of `gsf_eval` does not apply; the family is evaluated
/// directly there.
fn gsf_eval_in(f: &GsfDef, x: &GenNumber, _grid: &EpsGrid) -> Result<GenNumber> {
    Ok(crate::gsf::eval_unchecked(f, x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AfjReport {
    /// `(k, |f(y) - f(x) - f'(x)(y - x)|_e / |y - x|_e)` with `y = x + eps^k e_1`.
    pub rows: Vec<(u32, f64)>,
    /// Strictly decreasing toward 0, or identically 0.
    pub decreasing: bool,
}

/// Remainder ratios of the first-order expansion along `e_1`.
pub fn afj_probe(f: &GsfDef, x: &GenNumber, ks: &[u32], grid: &EpsGrid) -> Result<AfjReport> {
    let kmin = *ks
        .iter()
        .min()
        .ok_or_else(|| Error::Precondition("empty k range".into()))?;
    let m = strong_member_sharp(x, &f.domain, grid)?;
    match (m.verdict, m.witness) {
        (Verdict::True, Some(Witness::Q(q))) if q <= kmin as i64 => {}
        _ => {
            return Err(Error::Precondition(format!(
                "{x} is not strongly inside the domain with margin eps^{kmin}: {}",
                m.to_sexp()
            )))
        }
    }
    let fx = gsf_eval(f, x, grid)?;
    let grads: Vec<NetExpr> = f.family.iter().map(|u| apply_at(&u.diff(0), x)).collect();
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let step = NetExpr::EpsPow(k as f64);
        let mut comps = x.components().to_vec();
        comps[0] = comps[0].clone().add(step.clone());
        let y = GenNumber::vector(comps);
        let fy = gsf_eval(f, &y, grid)?;
        let rem = GenNumber::vector(
            fy.components()
                .iter()
                .zip(fx.components())
                .zip(&grads)
                .map(|((a, b), g)| {
                    a.clone()
                        .sub(b.clone())
                        .sub(NetExpr::Prod(vec![g.clone(), step.clone()]))
                })
                .collect(),
        );
        let ratio = sharp_norm(&rem, grid)? / (-(k as f64)).exp();
        rows.push((k, ratio));
    }
    let decreasing = rows.iter().all(|r| r.1 == 0.0) || rows.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(AfjReport { rows, decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsf::families::*;
    use crate::gsf::{gsf_derivative, same_values};

    fn g() -> EpsGrid {
        EpsGrid::default()
    }

    #[test]
    fn representative_examples() {
        let sq = GsfDef::new(vec![square()], line(), vec![GenNumber::real(1.0)], &g(), 2).unwrap();
        let s = IndexSet::interval(0.3, 0.6).unwrap();
        let r = representative_independence(&sq, &GenNumber::real(0.5), &Perturbation::Mask(s, 1.0), &g()).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        let d = GsfDef::new(vec![delta()], unit_interval(), compact_catalog(), &g(), 2).unwrap();
        let r = representative_independence(&d, &GenNumber::real(0.0), &Perturbation::Order(20.0), &g()).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        assert!(r.differences[0].estimate.value >= 18.0, "{:?}", r.differences);
        assert!(matches!(
            representative_independence(&d, &GenNumber::real(0.0), &Perturbation::Order(1.0), &g()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn null_examples() {
        let cfg = SampleConfig::default();
        let ball = SetExpr::ball(GenNumber::zeros(1), NetExpr::one());
        let s = IndexSet::interval(0.3, 0.6).unwrap();
        let masked = SmoothExpr::prod(vec![SmoothExpr::coef(NetExpr::mask(s, NetExpr::one())), x()]);
        assert!(null_check(&[masked], &ball, &g(), cfg).unwrap().verdict.is_true());
        assert!(null_check(&[SmoothExpr::zero()], &ball, &g(), cfg).unwrap().verdict.is_true());
        let small = SmoothExpr::prod(vec![SmoothExpr::coef(NetExpr::eps()), x()]);
        let r = null_check(std::slice::from_ref(&small), &ball, &g(), cfg).unwrap();
        assert!(r.verdict.is_false());
        assert!(r.sups.iter().all(|(e, s)| (s - e).abs() <= 1e-12 * e));
        assert!(uniform_moderateness(&[delta()], &unit_interval(), &g(), cfg).unwrap().verdict.is_true());
    }

    #[test]
    fn cutoff_examples() {
        let omega = unit_interval();
        let glob = cutoff_globalize(&[delta()], &omega).unwrap();
        for &e in g().samples() {
            let inside = glob[0].eval(e, &[0.25]).unwrap();
            assert_eq!(inside, delta().eval(e, &[0.25]).unwrap());
            assert_eq!(glob[0].eval(e, &[3.0]).unwrap(), 0.0);
        }
        let orig = GsfDef::new(vec![delta()], omega.clone(), compact_catalog(), &g(), 2).unwrap();
        let new = GsfDef::new(glob, omega, compact_catalog(), &g(), 2).unwrap();
        let x = GenNumber::eps_pow(1.0);
        let a = gsf_eval(&gsf_derivative(&orig, &[2], &g()).unwrap(), &x, &g()).unwrap();
        let b = gsf_eval(&gsf_derivative(&new, &[2], &g()).unwrap(), &x, &g()).unwrap();
        assert_eq!(same_values(&a, &b, &g()).unwrap(), Verdict::True);
        let lens = SetExpr::intersection(vec![unit_interval(), SetExpr::ball(GenNumber::real(0.5), NetExpr::one())]);
        assert!(matches!(cutoff_globalize(&[square()], &lens), Err(Error::Precondition(_))));
    }

    #[test]
    fn lipschitz_examples() {
        let cfg = SampleConfig { budget: 256, ..Default::default() };
        let ball = SetExpr::ball(GenNumber::zeros(1), NetExpr::one());
        let sq = GsfDef::new(vec![square()], line(), vec![GenNumber::real(0.0)], &g(), 1).unwrap();
        let r = lipschitz_probe(&sq, &ball, &g(), cfg, 20).unwrap();
        assert_eq!(r.verdict, Verdict::True, "{r:?}");
        assert!(r.order.abs() < 1e-9);
        let near = SetExpr::ball(GenNumber::zeros(1), NetExpr::monomial(3.0, 1.0));
        let d = GsfDef::new(vec![delta()], unit_interval(), compact_catalog(), &g(), 1).unwrap();
        let r = lipschitz_probe(&d, &near, &g(), cfg, 20).unwrap();
        assert_eq!(r.verdict, Verdict::True);
        assert!((r.order + 2.0).abs() < 0.1, "{}", r.order);
        let c = GsfDef::new(vec![SmoothExpr::constant(4.0)], line(), vec![GenNumber::real(0.0)], &g(), 1).unwrap();
        let r = lipschitz_probe(&c, &ball, &g(), cfg, 5).unwrap();
        assert_eq!(r.order, f64::INFINITY);
    }

    #[test]
    fn afj_examples() {
        let sq = GsfDef::new(vec![square()], line(), vec![GenNumber::real(0.0)], &g(), 2).unwrap();
        let ks: Vec<u32> = (1..=6).collect();
        let r = afj_probe(&sq, &GenNumber::real(0.0), &ks, &g()).unwrap();
        for (k, ratio) in &r.rows {
            assert!((ratio - (-(*k as f64)).exp()).abs() < 1e-9);
        }
        assert!(r.decreasing);
        let aff = GsfDef::new(
            vec![SmoothExpr::constant(2.0).add(SmoothExpr::prod(vec![SmoothExpr::constant(3.0), x()]))],
            line(),
            vec![GenNumber::real(0.0)],
            &g(),
            2,
        )
        .unwrap();
        let r = afj_probe(&aff, &GenNumber::real(1.0), &ks, &g()).unwrap();
        assert!(r.rows.iter().all(|r| r.1 == 0.0));
        let sin = GsfDef::new(vec![SmoothExpr::sin(x())], line(), vec![GenNumber::real(0.0)], &g(), 2).unwrap();
        let r = afj_probe(&sin, &GenNumber::real(0.0), &ks, &g()).unwrap();
        for (k, ratio) in &r.rows {
            assert!((ratio / (-2.0 * *k as f64).exp() - 1.0).abs() < 1e-6, "{k} {ratio}");
        }
    }
}
