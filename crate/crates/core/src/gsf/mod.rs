//! Generalized smooth functions: nets of smooth maps checked for
//! moderateness of all derivatives up to a finite order at catalog points,
//! plus evaluation, derivatives, composition and the probes built on them.

pub mod gallery;
pub mod probes;

use rayon::prelude::*;

use crate::asymptotics::{classify, ClassVerdict, Classification, Verdict};
use crate::error::{Error, Result};
use crate::net::{EpsGrid, GenNumber, NetExpr};
use crate::setnets::{strong_member_sharp, MembershipVerdict, SetExpr};
use crate::sexpr::Sexp;
use crate::smooth::SmoothExpr;

pub use probes::{
    afj_probe, cutoff_globalize, lipschitz_probe, null_check, representative_independence,
    uniform_moderateness, LipschitzReport, Perturbation,
};

/// Default checked derivative order.
pub const DEFAULT_KMAX: u32 = 4;

/// All multi-indices of length `d` with `|alpha| <= kmax`, by total order
/// then lexicographically.
pub fn multi_indices(d: usize, kmax: u32) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; d]];
    let mut layer = vec![vec![0; d]];
    for _ in 0..kmax {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for a in &layer {
            for i in 0..d {
                let mut b = a.clone();
                b[i] += 1;
                if !next.contains(&b) {
                    next.push(b);
                }
            }
        }
        next.sort_by(|a, b| b.cmp(a));
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn order(alpha: &[usize]) -> u32 {
    alpha.iter().sum::<usize>() as u32
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertEntry {
    pub point: usize,
    pub alpha: Vec<usize>,
    pub component: usize,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertFailure {
    /// A catalog point is not strongly inside the domain.
    Domain {
        point: usize,
        membership: MembershipVerdict,
    },
    /// A derivative is not moderate (or could not be decided).
    Entry {
        point: usize,
        alpha: Vec<usize>,
        component: usize,
        verdict: ClassVerdict,
    },
    /// Evaluation failed, e.g. log of a non-positive value.
    Eval {
        point: usize,
        alpha: Vec<usize>,
        message: String,
    },
}

impl CertFailure {
    pub fn to_sexp(&self) -> Sexp {
        let alpha_sexp = |a: &[usize]| Sexp::list(a.iter().map(|k| Sexp::atom(k.to_string())).collect());
        match self {
            CertFailure::Domain { point, membership } => Sexp::tagged(
                "domain",
                vec![Sexp::atom(point.to_string()), membership.to_sexp()],
            ),
            CertFailure::Entry {
                point,
                alpha,
                component,
                verdict,
            } => Sexp::tagged(
                "entry",
                vec![
                    Sexp::atom(point.to_string()),
                    alpha_sexp(alpha),
                    Sexp::atom(component.to_string()),
                    Sexp::atom(verdict.name()),
                ],
            ),
            CertFailure::Eval {
                point,
                alpha,
                message,
            } => Sexp::tagged(
                "eval",
                vec![Sexp::atom(point.to_string()), alpha_sexp(alpha), Sexp::atom(format!("{message:?}"))],
            ),
        }
    }
}

/// Finite-order evidence that a family defines a GSF on a catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kmax: u32,
    pub entries: Vec<CertEntry>,
    pub failure: Option<CertFailure>,
    /// Smallest integer `N` with every entry `O(eps^-N)`.
    pub n: Option<i64>,
}

impl Certificate {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![
            Sexp::tagged("valid", vec![Sexp::atom(self.is_valid().to_string())]),
            Sexp::tagged("kmax", vec![Sexp::atom(self.kmax.to_string())]),
            Sexp::tagged("entries", vec![Sexp::atom(self.entries.len().to_string())]),
        ];
        if let Some(n) = self.n {
            items.push(Sexp::tagged("n", vec![Sexp::atom(n.to_string())]));
        }
        if let Some(f) = &self.failure {
            items.push(Sexp::tagged("failure", vec![f.to_sexp()]));
        }
        Sexp::tagged("certificate", items)
    }
}

/// `u_eps(x_eps)` for a family applied to a point.
pub fn apply_at(f: &SmoothExpr, x: &GenNumber) -> NetExpr {
    NetExpr::apply(f.clone(), x.components().to_vec())
}

/// Classifies `d^alpha u_eps(x_eps)` for every catalog point, component and
/// `|alpha| <= kmax`, after checking that each point is strongly inside the
/// domain. The first failure in (point, alpha, component) order is the
/// witness.
pub fn gsf_check(
    family: &[SmoothExpr],
    domain: &SetExpr,
    catalog: &[GenNumber],
    grid: &EpsGrid,
    kmax: u32,
) -> Result<Certificate> {
    let d = domain.dim();
    for f in family {
        if f.arity() > d {
            return Err(Error::Dimension {
                expected: d,
                got: f.arity(),
            });
        }
    }
    let mut failure = None;
    for (i, x) in catalog.iter().enumerate() {
        let m = strong_member_sharp(x, domain, grid)?;
        if !m.is_in() {
            failure = Some(CertFailure::Domain {
                point: i,
                membership: m,
            });
            break;
        }
    }
    if failure.is_some() {
        return Ok(Certificate {
            kmax,
            entries: Vec::new(),
            failure,
            n: None,
        });
    }
    let alphas = multi_indices(d, kmax);
    let derivs: Vec<Vec<SmoothExpr>> = alphas
        .iter()
        .map(|a| family.iter().map(|f| f.diff_multi(a)).collect())
        .collect();
    let jobs: Vec<(usize, usize, usize)> = (0..catalog.len())
        .flat_map(|p| (0..alphas.len()).flat_map(move |a| (0..family.len()).map(move |c| (p, a, c))))
        .collect();
    let results: Vec<(usize, usize, usize, Result<Classification>)> = jobs
        .par_iter()
        .map(|&(p, a, c)| (p, a, c, classify(&apply_at(&derivs[a][c], &catalog[p]), grid)))
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    for (p, a, c, r) in results {
        match r {
            Ok(cl) => {
                if failure.is_none() && !cl.verdict.is_moderate() {
                    failure = Some(CertFailure::Entry {
                        point: p,
                        alpha: alphas[a].clone(),
                        component: c,
                        verdict: cl.verdict,
                    });
                }
                entries.push(CertEntry {
                    point: p,
                    alpha: alphas[a].clone(),
                    component: c,
                    classification: cl,
                });
            }
            Err(e) => {
                if failure.is_none() {
                    failure = Some(CertFailure::Eval {
                        point: p,
                        alpha: alphas[a].clone(),
                        message: e.to_string(),
                    });
                }
            }
        }
    }
    let n = if failure.is_none() {
        let worst = entries
            .iter()
            .map(|e| e.classification.upper_order())
            .filter(|u| u.is_finite())
            .fold(0.0f64, f64::max);
        Some((worst - 1e-9).ceil().max(0.0) as i64)
    } else {
        None
    };
    Ok(Certificate {
        kmax,
        entries,
        failure,
        n,
    })
}

/// A family together with its domain, catalog and certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct GsfDef {
    pub family: Vec<SmoothExpr>,
    pub domain: SetExpr,
    pub catalog: Vec<GenNumber>,
    pub certificate: Certificate,
}

impl GsfDef {
    /// Runs [`gsf_check`]; the result carries the certificate whether or
    /// not it is valid.
    pub fn new(
        family: Vec<SmoothExpr>,
        domain: SetExpr,
        catalog: Vec<GenNumber>,
        grid: &EpsGrid,
        kmax: u32,
    ) -> Result<GsfDef> {
        let certificate = gsf_check(&family, &domain, &catalog, grid, kmax)?;
        Ok(GsfDef {
            family,
            domain,
            catalog,
            certificate,
        })
    }

    pub fn is_valid(&self) -> bool {
        self.certificate.is_valid()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn codim(&self) -> usize {
        self.family.len()
    }

    pub fn kmax(&self) -> u32 {
        self.certificate.kmax
    }

    fn require_valid(&self) -> Result<()> {
        match &self.certificate.failure {
            None => Ok(()),
            Some(f) => Err(Error::Precondition(format!(
                "function has no valid certificate: {}",
                f.to_sexp()
            ))),
        }
    }
}

/// `[u_eps(x_eps)]`, after checking that `x` is strongly inside the domain.
pub fn gsf_eval(f: &GsfDef, x: &GenNumber, grid: &EpsGrid) -> Result<GenNumber> {
    f.require_valid()?;
    let m = strong_member_sharp(x, &f.domain, grid)?;
    if !m.is_in() {
        return Err(Error::Precondition(format!(
            "point {x} is not in the domain: {}",
            m.to_sexp()
        )));
    }
    Ok(eval_unchecked(f, x))
}

pub(crate) fn eval_unchecked(f: &GsfDef, x: &GenNumber) -> GenNumber {
    GenNumber::vector(f.family.iter().map(|u| apply_at(u, x)).collect())
}

/// `d^alpha f`, re-certified to order `kmax - |alpha|`.
pub fn gsf_derivative(f: &GsfDef, alpha: &[usize], grid: &EpsGrid) -> Result<GsfDef> {
    f.require_valid()?;
    if alpha.len() != f.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            got: alpha.len(),
        });
    }
    let k = order(alpha);
    if k > f.kmax() {
        return Err(Error::Precondition(format!(
            "derivative of order {k} exceeds the checked order {}",
            f.kmax()
        )));
    }
    let family = f.family.iter().map(|u| u.diff_multi(alpha)).collect();
    GsfDef::new(family, f.domain.clone(), f.catalog.clone(), grid, f.kmax() - k)
}

/// `g . f`: substitutes `f`'s family into `g` after checking, on `f`'s
/// catalog, that every image point lies strongly inside `g`'s domain.
pub fn compose(f: &GsfDef, g: &GsfDef, grid: &EpsGrid, kmax: u32) -> Result<GsfDef> {
    f.require_valid()?;
    g.require_valid()?;
    if f.codim() != g.dim() {
        return Err(Error::Dimension {
            expected: g.dim(),
            got: f.codim(),
        });
    }
    for x in &f.catalog {
        let y = gsf_eval(f, x, grid)?;
        let m = strong_member_sharp(&y, &g.domain, grid)?;
        if !m.is_in() {
            return Err(Error::Precondition(format!(
                "image of {x} is not in the outer domain: {}",
                m.to_sexp()
            )));
        }
    }
    let family = g.family.iter().map(|u| u.substitute(&f.family)).collect();
    GsfDef::new(family, f.domain.clone(), f.catalog.clone(), grid, kmax)
}

/// Componentwise ring equality of two evaluations.
pub fn same_values(a: &GenNumber, b: &GenNumber, grid: &EpsGrid) -> Result<Verdict> {
    crate::asymptotics::eq_in_ring(a, b, grid)
}

/// Standard smooth families shared by the probes, the gallery and tests.
pub mod families {
    use super::*;
    use crate::net::NetExpr;

    pub fn x() -> SmoothExpr {
        SmoothExpr::var(0)
    }

    pub fn square() -> SmoothExpr {
        SmoothExpr::powi(x(), 2)
    }

    /// `eps^-1 exp(-(x/eps)^2)`.
    pub fn delta() -> SmoothExpr {
        let inv = SmoothExpr::coef(NetExpr::EpsPow(-1.0));
        SmoothExpr::prod(vec![
            inv.clone(),
            SmoothExpr::exp(SmoothExpr::powi(SmoothExpr::prod(vec![x(), inv]), 2).neg()),
        ])
    }

    /// `x / eps`.
    pub fn blow_up() -> SmoothExpr {
        SmoothExpr::prod(vec![SmoothExpr::coef(NetExpr::EpsPow(-1.0)), x()])
    }

    /// `exp(1/x)`.
    pub fn exp_inv() -> SmoothExpr {
        SmoothExpr::exp(SmoothExpr::powi(x(), -1))
    }

    /// The open interval `(-1, 1)`, constant in eps.
    pub fn unit_interval() -> SetExpr {
        SetExpr::constant(SetExpr::interval(NetExpr::Const(-1.0), NetExpr::one()))
            .expect("constant interval")
    }

    pub fn line() -> SetExpr {
        SetExpr::Whole(1)
    }

    /// Ten compactly supported points of `(-1, 1)`.
    pub fn compact_catalog() -> Vec<GenNumber> {
        let e = NetExpr::eps;
        vec![
            GenNumber::real(0.0),
            GenNumber::eps_pow(1.0),
            GenNumber::monomial(-1.0, 1.0),
            GenNumber::real(0.3),
            GenNumber::real(-0.5),
            GenNumber::real(0.9),
            GenNumber::scalar(NetExpr::Const(0.5).add(NetExpr::EpsPow(2.0))),
            GenNumber::scalar(NetExpr::Const(-0.7).sub(e())),
            GenNumber::monomial(0.5, 0.5),
            GenNumber::scalar(NetExpr::Const(0.2).add(NetExpr::monomial(3.0, 3.0))),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;
    use crate::asymptotics::valuation;

    fn g() -> EpsGrid {
        EpsGrid::default()
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(1, 4).len(), 5);
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(2, 2)[1..3], [vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn exp_on_compact_points_is_valid() {
        let cat = vec![GenNumber::real(0.5), GenNumber::scalar(NetExpr::Const(0.2).add(NetExpr::eps()))];
        let interval = SetExpr::constant(SetExpr::interval(NetExpr::zero(), NetExpr::one())).unwrap();
        let f = GsfDef::new(vec![SmoothExpr::exp(x())], interval, cat, &g(), 4).unwrap();
        assert!(f.is_valid());
        assert_eq!(f.certificate.n, Some(0));
    }

    #[test]
    fn exp_at_unbounded_point_fails() {
        let cat = vec![GenNumber::eps_pow(-1.0)];
        let f = GsfDef::new(vec![SmoothExpr::exp(x())], line(), cat, &g(), 4).unwrap();
        match f.certificate.failure {
            Some(CertFailure::Entry { alpha, verdict, .. }) => {
                assert_eq!(alpha, vec![0]);
                assert_eq!(verdict, ClassVerdict::NonModerate);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn domain_violation_is_reported() {
        let cat = vec![GenNumber::real(2.0)];
        let f = GsfDef::new(vec![x()], unit_interval(), cat, &g(), 2).unwrap();
        assert!(matches!(f.certificate.failure, Some(CertFailure::Domain { point: 0, .. })));
        assert!(gsf_eval(&f, &GenNumber::real(0.0), &g()).is_err());
    }

    #[test]
    fn eval_examples() {
        let id = GsfDef::new(vec![x()], line(), vec![GenNumber::real(1.0)], &g(), 2).unwrap();
        let p = GenNumber::eps_pow(1.0);
        assert_eq!(same_values(&gsf_eval(&id, &p, &g()).unwrap(), &p, &g()).unwrap(), Verdict::True);
        let sq = GsfDef::new(vec![square()], line(), vec![p.clone()], &g(), 2).unwrap();
        let v = gsf_eval(&sq, &p, &g()).unwrap();
        assert_eq!(same_values(&v, &GenNumber::eps_pow(2.0), &g()).unwrap(), Verdict::True);
        let d = GsfDef::new(vec![delta()], unit_interval(), compact_catalog(), &g(), 4).unwrap();
        assert!(d.is_valid(), "{:?}", d.certificate.failure);
        let v = gsf_eval(&d, &GenNumber::real(0.0), &g()).unwrap();
        assert_eq!(valuation(v.component(0), &g()).unwrap().value, -1.0);
    }

    #[test]
    fn derivative_examples() {
        let sq = GsfDef::new(vec![square()], line(), vec![GenNumber::real(3.0)], &g(), 3).unwrap();
        let d = gsf_derivative(&sq, &[1], &g()).unwrap();
        assert_eq!(d.kmax(), 2);
        let v = gsf_eval(&d, &GenNumber::real(3.0), &g()).unwrap();
        assert_eq!(same_values(&v, &GenNumber::real(6.0), &g()).unwrap(), Verdict::True);
        let dl = GsfDef::new(vec![delta()], unit_interval(), compact_catalog(), &g(), 4).unwrap();
        let dd = gsf_derivative(&dl, &[1], &g()).unwrap();
        let v = gsf_eval(&dd, &GenNumber::eps_pow(1.0), &g()).unwrap();
        let est = valuation(v.component(0), &g()).unwrap();
        assert!((est.value + 2.0).abs() < 1e-9, "{est:?}");
        assert!(gsf_derivative(&sq, &[4], &g()).is_err());
    }

    #[test]
    fn composition_examples() {
        let cat = compact_catalog();
        let id = GsfDef::new(vec![x()], unit_interval(), cat.clone(), &g(), 3).unwrap();
        let sq = GsfDef::new(vec![square()], line(), cat.clone(), &g(), 3).unwrap();
        let c = compose(&id, &sq, &g(), 3).unwrap();
        assert!(c.is_valid());
        let blow = GsfDef::new(vec![blow_up()], unit_interval(), cat.clone(), &g(), 3).unwrap();
        let sin = GsfDef::new(vec![SmoothExpr::sin(x())], line(), vec![GenNumber::real(0.0)], &g(), 3).unwrap();
        let c = compose(&blow, &sin, &g(), 3).unwrap();
        assert!(c.is_valid(), "{:?}", c.certificate.failure);
        let third = c
            .certificate
            .entries
            .iter()
            .find(|e| e.point == 3 && e.alpha == vec![3])
            .unwrap();
        assert!((third.classification.estimate.value + 3.0).abs() < 0.1);
        let x0 = &cat[3];
        let twice = gsf_eval(&sin, &gsf_eval(&blow, x0, &g()).unwrap(), &g()).unwrap();
        assert_eq!(same_values(&gsf_eval(&c, x0, &g()).unwrap(), &twice, &g()).unwrap(), Verdict::True);
    }

    #[test]
    fn composition_checks_outer_domain() {
        let cat = vec![GenNumber::real(0.5)];
        let shift = GsfDef::new(
            vec![x().add(SmoothExpr::constant(2.0))],
            line(),
            cat,
            &g(),
            2,
        )
        .unwrap();
        let inner = GsfDef::new(vec![x()], unit_interval(), vec![GenNumber::real(0.0)], &g(), 2).unwrap();
        assert!(matches!(compose(&shift, &inner, &g(), 2), Err(Error::Precondition(_))));
    }
}
