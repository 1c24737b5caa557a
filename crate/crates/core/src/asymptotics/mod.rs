//! Valuation, sharp norm and the moderate / negligible / invertible /
//! infinitesimal decisions.
//!
//! Every decision first tries the canonical normal form, which is exact.
//! Nets outside it fall back to a least-squares fit of `ln |u_eps|` against
//! `ln eps` over the tail window of the grid.

pub mod canonical;

use std::fmt;

use crate::error::{Error, Result};
use crate::net::{EpsGrid, GenNumber, NetExpr};
use crate::sexpr::Sexp;

pub use canonical::{Atom, Canonical, Series};

/// Maximum RMS fit residual, in slope units.
pub const RESIDUAL_TOL: f64 = 0.1;
/// Fitted orders at or above this are read as negligible.
pub const NEGLIGIBLE_ORDER: f64 = 15.0;
/// Growth beyond `eps^-N_MAX` with a super-polynomial trend is non-moderate.
pub const N_MAX: f64 = 20.0;
/// Radii used by the infinitesimality and Fermat ladders.
pub const LADDER: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Regression,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Regression => "regression",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationEstimate {
    /// `+inf` for the zero net.
    pub value: f64,
    pub method: Method,
    /// RMS residual of the fit divided by the `ln eps` span; 0 when exact.
    pub residual: f64,
    /// `(smallest, largest)` eps of the samples used.
    pub window: (f64, f64),
}

impl ValuationEstimate {
    fn exact(value: f64) -> Self {
        ValuationEstimate {
            value,
            method: Method::Exact,
            residual: 0.0,
            window: (0.0, 0.0),
        }
    }

    pub fn is_stable(&self) -> bool {
        self.residual <= RESIDUAL_TOL
    }

    pub fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "valuation",
            vec![
                Sexp::tagged("value", vec![Sexp::num(self.value)]),
                Sexp::tagged("method", vec![Sexp::atom(self.method.name())]),
                Sexp::tagged("residual", vec![Sexp::num(self.residual)]),
                Sexp::tagged(
                    "window",
                    vec![Sexp::num(self.window.0), Sexp::num(self.window.1)],
                ),
            ],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassVerdict {
    ExactNegligible,
    NumericallyNegligible,
    Moderate,
    NonModerate,
    Undetermined,
}

impl ClassVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            ClassVerdict::ExactNegligible => "exact-negligible",
            ClassVerdict::NumericallyNegligible => "numerically-negligible",
            ClassVerdict::Moderate => "moderate",
            ClassVerdict::NonModerate => "non-moderate",
            ClassVerdict::Undetermined => "undetermined",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            ClassVerdict::ExactNegligible,
            ClassVerdict::NumericallyNegligible,
            ClassVerdict::Moderate,
            ClassVerdict::NonModerate,
            ClassVerdict::Undetermined,
        ]
        .into_iter()
        .find(|v| v.name() == s)
    }

    pub fn is_negligible(&self) -> bool {
        matches!(
            self,
            ClassVerdict::ExactNegligible | ClassVerdict::NumericallyNegligible
        )
    }

    /// Negligible nets are moderate too.
    pub fn is_moderate(&self) -> bool {
        self.is_negligible() || *self == ClassVerdict::Moderate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: ClassVerdict,
    pub estimate: ValuationEstimate,
    /// Coefficient of the `ln |u|` against `1/eps` fit, when it was consulted.
    pub growth: Option<f64>,
}

impl Classification {
    /// Smallest `N` with `|u| = O(eps^-N)` as estimated (`-v`).
    pub fn upper_order(&self) -> f64 {
        -self.estimate.value
    }

    /// Largest `m` with `|u| = O(eps^m)` as estimated (`v`).
    pub fn lower_order(&self) -> f64 {
        self.estimate.value
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![
            Sexp::tagged("verdict", vec![Sexp::atom(self.verdict.name())]),
            self.estimate.to_sexp(),
            Sexp::tagged(
                "orders",
                vec![Sexp::num(self.upper_order()), Sexp::num(self.lower_order())],
            ),
        ];
        if let Some(g) = self.growth {
            items.push(Sexp::tagged("growth", vec![Sexp::num(g)]));
        }
        Sexp::tagged("classification", items)
    }
}

/// Three-valued answer of a decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Undetermined,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn is_true(&self) -> bool {
        *self == Verdict::True
    }

    pub fn is_false(&self) -> bool {
        *self == Verdict::False
    }

    pub fn and(self, o: Verdict) -> Verdict {
        match (self, o) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, Verdict::True) => Verdict::True,
            _ => Verdict::Undetermined,
        }
    }

    pub fn or(self, o: Verdict) -> Verdict {
        self.not().and(o.not()).not()
    }

    pub fn not(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::Undetermined => Verdict::Undetermined,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Undetermined => "undetermined",
        }
    }

    pub fn from_name(s: &str) -> Option<Verdict> {
        match s {
            "true" => Some(Verdict::True),
            "false" => Some(Verdict::False),
            "undetermined" => Some(Verdict::Undetermined),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A verdict with its numeric witness and a short explanation.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub verdict: Verdict,
    pub witness: Option<f64>,
    pub note: String,
}

impl Decision {
    fn new(verdict: Verdict, witness: Option<f64>, note: impl Into<String>) -> Self {
        Decision {
            verdict,
            witness,
            note: note.into(),
        }
    }
}

/// The grid extended by witnesses for every index set inside `nets`.
pub fn scoped_grid<'a>(grid: &EpsGrid, nets: impl IntoIterator<Item = &'a NetExpr>) -> EpsGrid {
    let mut sets = Vec::new();
    for n in nets {
        n.collect_index_sets(&mut sets);
    }
    grid.augmented(&sets)
}

/// `(ln eps, ln |u_eps|)` over the tail window.
fn tail_logs(net: &NetExpr, grid: &EpsGrid) -> Result<Vec<(f64, f64)>> {
    let g = scoped_grid(grid, [net]);
    g.tail()
        .iter()
        .map(|&e| Ok((e.ln(), net.log_abs_eval(e)?)))
        .collect()
}

struct Fit {
    slope: f64,
    residual: f64,
}

/// OLS of `y` on `x`; residual is RMS divided by the `x` span.
fn fit(pts: &[(f64, f64)]) -> Fit {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rms = (pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let span = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max)
        - pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    Fit {
        slope,
        residual: if span > 0.0 { rms / span } else { 0.0 },
    }
}

fn window(pts: &[(f64, f64)]) -> (f64, f64) {
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    (lo.exp(), hi.exp())
}

/// `v(u)`: exact on the canonical subalgebra, fitted otherwise.
pub fn valuation(net: &NetExpr, grid: &EpsGrid) -> Result<ValuationEstimate> {
    if let Some(c) = Canonical::of(net) {
        return Ok(ValuationEstimate::exact(c.valuation()));
    }
    regression_valuation(net, grid)
}

/// The regression estimate even when an exact answer exists.
pub fn regression_valuation(net: &NetExpr, grid: &EpsGrid) -> Result<ValuationEstimate> {
    let all = tail_logs(net, grid)?;
    let pts: Vec<(f64, f64)> = all.iter().copied().filter(|p| p.1.is_finite()).collect();
    if pts.len() < 2 {
        return Ok(ValuationEstimate {
            value: if pts.is_empty() { f64::INFINITY } else { 0.0 },
            method: Method::Regression,
            residual: if pts.is_empty() { 0.0 } else { f64::INFINITY },
            window: window(&all),
        });
    }
    let f = fit(&pts);
    Ok(ValuationEstimate {
        value: f.slope,
        method: Method::Regression,
        residual: f.residual,
        window: window(&pts),
    })
}

pub fn classify(net: &NetExpr, grid: &EpsGrid) -> Result<Classification> {
    if let Some(c) = Canonical::of(net) {
        let v = c.valuation();
        let verdict = if c.is_exact_zero() {
            ClassVerdict::ExactNegligible
        } else {
            // Finite valuation: moderate, whatever the size of v.
            ClassVerdict::Moderate
        };
        return Ok(Classification {
            verdict,
            estimate: ValuationEstimate::exact(v),
            growth: None,
        });
    }
    classify_regression(net, grid)
}

/// Classification from samples alone.
pub fn classify_regression(net: &NetExpr, grid: &EpsGrid) -> Result<Classification> {
    let all = tail_logs(net, grid)?;
    classify_samples(&all)
}

/// Classifies a tail of `(ln eps, ln |u|)` samples.
pub fn classify_samples(all: &[(f64, f64)]) -> Result<Classification> {
    if all.iter().any(|p| p.1.is_nan()) {
        return Err(Error::Sampling("NaN in sampled magnitudes".into()));
    }
    let pts: Vec<(f64, f64)> = all.iter().copied().filter(|p| p.1 > f64::NEG_INFINITY).collect();
    let win = window(all);
    if pts.is_empty() {
        return Ok(Classification {
            verdict: ClassVerdict::NumericallyNegligible,
            estimate: ValuationEstimate {
                value: f64::INFINITY,
                method: Method::Regression,
                residual: 0.0,
                window: win,
            },
            growth: None,
        });
    }
    let f = if pts.len() >= 2 {
        fit(&pts)
    } else {
        Fit {
            slope: pts[0].1 / pts[0].0,
            residual: f64::INFINITY,
        }
    };
    let estimate = ValuationEstimate {
        value: f.slope,
        method: Method::Regression,
        residual: f.residual,
        window: window(&pts),
    };
    let mk = |verdict, growth| {
        Ok(Classification {
            verdict,
            estimate: estimate.clone(),
            growth,
        })
    };
    // Pointwise order ln|u| / ln eps; infinite magnitudes give -inf.
    let min_order = pts
        .iter()
        .map(|p| if p.1 == f64::INFINITY { f64::NEG_INFINITY } else { p.1 / p.0 })
        .fold(f64::INFINITY, f64::min);
    if f.residual > RESIDUAL_TOL {
        if min_order >= NEGLIGIBLE_ORDER {
            return mk(ClassVerdict::NumericallyNegligible, None);
        }
        let third = &pts[pts.len() - pts.len().div_ceil(3)..];
        let exceeds = third.iter().all(|p| p.1 > -N_MAX * p.0);
        let inv: Vec<(f64, f64)> = pts.iter().map(|p| ((-p.0).exp(), p.1)).collect();
        let g = fit(&inv).slope;
        if exceeds && g > 0.0 {
            return mk(ClassVerdict::NonModerate, Some(g));
        }
        return mk(ClassVerdict::Undetermined, Some(g));
    }
    if f.slope >= NEGLIGIBLE_ORDER || min_order >= NEGLIGIBLE_ORDER {
        return mk(ClassVerdict::NumericallyNegligible, None);
    }
    mk(ClassVerdict::Moderate, None)
}

/// `x = y` in the ring, componentwise.
pub fn eq_in_ring(x: &GenNumber, y: &GenNumber, grid: &EpsGrid) -> Result<Verdict> {
    x.check_dim(y)?;
    let mut out = Verdict::True;
    for (a, b) in x.components().iter().zip(y.components()) {
        let c = classify(&a.clone().sub(b.clone()), grid)?;
        out = out.and(match c.verdict {
            v if v.is_negligible() => Verdict::True,
            ClassVerdict::Undetermined => Verdict::Undetermined,
            _ => Verdict::False,
        });
    }
    Ok(out)
}

/// `x <= y`: the positive part `max(x - y, 0)` is negligible.
pub fn leq(x: &GenNumber, y: &GenNumber, grid: &EpsGrid) -> Result<Verdict> {
    let (a, b) = (x.as_scalar()?, y.as_scalar()?);
    let pos = a.clone().sub(b.clone()).max(NetExpr::zero());
    let c = classify(&pos, grid)?;
    Ok(match c.verdict {
        v if v.is_negligible() => Verdict::True,
        ClassVerdict::Undetermined => Verdict::Undetermined,
        _ => Verdict::False,
    })
}

/// `x < y`: `x <= y` and `x != y`.
pub fn lt(x: &GenNumber, y: &GenNumber, grid: &EpsGrid) -> Result<Verdict> {
    Ok(leq(x, y, grid)?.and(eq_in_ring(x, y, grid)?.not()))
}

/// Invertibility; the witness is an order `q` with `|x| >= eps^q`
/// eventually (exact) or the fitted lower order, or the eps of a zero sample.
pub fn is_invertible(x: &GenNumber, grid: &EpsGrid) -> Result<Decision> {
    let net = x.as_scalar()?;
    if let Some(Some(c)) = x.canonical().first() {
        let q = c.lower_order();
        return Ok(if q.is_finite() {
            Decision::new(Verdict::True, Some(q), "every atom has finite order")
        } else {
            Decision::new(
                Verdict::False,
                None,
                "vanishes identically on an index subset accumulating at 0",
            )
        });
    }
    let g = scoped_grid(grid, [net]);
    let mut pts = Vec::new();
    for &e in g.tail() {
        let l = net.log_abs_eval(e)?;
        if l == f64::NEG_INFINITY {
            return Ok(Decision::new(
                Verdict::False,
                Some(e),
                format!("zero sample at eps={e:e}"),
            ));
        }
        pts.push((e.ln(), l));
    }
    // Largest pointwise order: the exponent |x| must stay above.
    let max_order = pts.iter().map(|p| p.1 / p.0).fold(f64::NEG_INFINITY, f64::max);
    let f = fit(&pts);
    if f.residual <= RESIDUAL_TOL && max_order < NEGLIGIBLE_ORDER {
        return Ok(Decision::new(Verdict::True, Some(max_order), "stable lower order"));
    }
    let third = &pts[pts.len() - pts.len().div_ceil(3)..];
    if third.iter().all(|p| p.1 / p.0 >= NEGLIGIBLE_ORDER) {
        return Ok(Decision::new(
            Verdict::False,
            Some(max_order),
            "super-polynomial decay on the tail",
        ));
    }
    Ok(Decision::new(Verdict::Undetermined, None, "unstable lower order"))
}

/// `x ~ 0` in the Fermat sense: `|x| <= r` for every standard `r > 0`.
pub fn is_infinitesimal(x: &GenNumber, grid: &EpsGrid) -> Result<Decision> {
    let norm = x.norm_net();
    if let Some(c) = Canonical::of(&norm) {
        let v = c.valuation();
        return Ok(Decision::new(
            Verdict::from_bool(v > 0.0),
            Some(v),
            "exact valuation",
        ));
    }
    let g = scoped_grid(grid, [&norm]);
    let vals = g
        .tail()
        .iter()
        .map(|&e| Ok(norm.eval_log(e)?.to_f64().abs()))
        .collect::<Result<Vec<f64>>>()?;
    let k = vals.len().div_ceil(3);
    let sup = |s: &[f64]| s.iter().copied().fold(0.0, f64::max);
    let (s1, s3) = (sup(&vals[..k]), sup(&vals[vals.len() - k..]));
    let smallest = *LADDER.last().unwrap();
    if s3 < smallest && s3 <= s1 {
        return Ok(Decision::new(Verdict::True, Some(s3), "tail sup below every ladder radius"));
    }
    if s3 >= LADDER[0] {
        return Ok(Decision::new(Verdict::False, Some(s3), "tail sup stays above the first ladder radius"));
    }
    Ok(Decision::new(Verdict::Undetermined, Some(s3), "tail sup between ladder radii"))
}

/// Limit as `eps -> 0` of a near-standard point, componentwise.
pub fn standard_part(x: &GenNumber, grid: &EpsGrid) -> Result<Option<Vec<f64>>> {
    let mut out = Vec::with_capacity(x.dim());
    for (i, comp) in x.components().iter().enumerate() {
        if let Some(Some(c)) = x.canonical().get(i) {
            match c.limit() {
                Some(l) => {
                    out.push(l);
                    continue;
                }
                None => return Ok(None),
            }
        }
        let g = scoped_grid(grid, [comp]);
        let tail = g.tail();
        let last = &tail[tail.len() - tail.len().div_ceil(3)..];
        let vals = last.iter().map(|&e| comp.eval(e)).collect::<Result<Vec<_>>>()?;
        if vals.iter().any(|v| !v.is_finite()) {
            return Ok(None);
        }
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let l = *vals.last().unwrap();
        if hi - lo > 1e-6 * l.abs().max(1.0) {
            return Ok(None);
        }
        out.push(l);
    }
    Ok(Some(out))
}

/// `d_F(x, y) = |st x - st y|`.
pub fn fermat_pseudometric(x: &GenNumber, y: &GenNumber, grid: &EpsGrid) -> Result<f64> {
    x.check_dim(y)?;
    let sx = standard_part(x, grid)?
        .ok_or_else(|| Error::Precondition("first argument is not near-standard".into()))?;
    let sy = standard_part(y, grid)?
        .ok_or_else(|| Error::Precondition("second argument is not near-standard".into()))?;
    Ok(sx
        .iter()
        .zip(&sy)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// `|x|_e = exp(-v(|x|))`.
pub fn sharp_norm(x: &GenNumber, grid: &EpsGrid) -> Result<f64> {
    let v = valuation(&x.norm_net(), grid)?.value;
    Ok(if v == f64::INFINITY { 0.0 } else { (-v).exp() })
}

pub fn sharp_distance(x: &GenNumber, y: &GenNumber, grid: &EpsGrid) -> Result<f64> {
    x.check_dim(y)?;
    sharp_norm(&(x - y), grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{interleave, IndexSet};
    use crate::sexpr::parse_one;

    fn net(s: &str) -> NetExpr {
        NetExpr::from_sexp(&parse_one(s).unwrap()).unwrap()
    }

    fn g() -> EpsGrid {
        EpsGrid::default()
    }

    #[test]
    fn valuation_examples() {
        let v = valuation(&NetExpr::EpsPow(2.5), &g()).unwrap();
        assert_eq!((v.value, v.method), (2.5, Method::Exact));
        assert_eq!(valuation(&net("(sum (epspow 1) (epspow 3))"), &g()).unwrap().value, 1.0);
        assert_eq!(valuation(&NetExpr::Const(5.0), &g()).unwrap().value, 0.0);
        let r = regression_valuation(&net("(sum (epspow 1) (epspow 3))"), &g()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6 && r.is_stable());
    }

    #[test]
    fn classify_examples() {
        let c = classify(&net("(mask (intervals (0.3 0.6)) (expinv))"), &g()).unwrap();
        assert_eq!(c.verdict, ClassVerdict::ExactNegligible);
        assert_eq!(classify(&NetExpr::eps(), &g()).unwrap().verdict, ClassVerdict::Moderate);
        let c = classify(&NetExpr::ExpInvEps, &g()).unwrap();
        assert_eq!(c.verdict, ClassVerdict::NonModerate);
        assert!(c.growth.unwrap() > 0.0);
        // Exact layer never calls a monomial negligible.
        assert_eq!(classify(&NetExpr::EpsPow(30.0), &g()).unwrap().verdict, ClassVerdict::Moderate);
        let c = classify(&NetExpr::ExpInvEps.recip(), &g()).unwrap();
        assert_eq!(c.verdict, ClassVerdict::NumericallyNegligible);
        let c = classify_regression(&NetExpr::EpsPow(-25.0), &g()).unwrap();
        assert_eq!(c.verdict, ClassVerdict::Moderate);
    }

    #[test]
    fn sharp_norm_examples() {
        assert_eq!(sharp_norm(&GenNumber::real(0.0), &g()).unwrap(), 0.0);
        assert!((sharp_norm(&GenNumber::eps_pow(1.0), &g()).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(sharp_norm(&GenNumber::real(-4.0), &g()).unwrap(), 1.0);
        let d = sharp_distance(&GenNumber::real(0.0), &GenNumber::eps_pow(2.0), &g()).unwrap();
        assert!((d - (-2f64).exp()).abs() < 1e-15);
        let v = GenNumber::vector(vec![NetExpr::EpsPow(1.0), NetExpr::EpsPow(3.0)]);
        assert!((sharp_norm(&v, &g()).unwrap() - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn ring_equality_and_order() {
        let x = GenNumber::eps_pow(1.0);
        let s = IndexSet::interval(0.3, 0.6).unwrap();
        let y = &x + &GenNumber::scalar(NetExpr::mask(s.clone(), NetExpr::Const(5.0)));
        assert_eq!(eq_in_ring(&x, &y, &g()).unwrap(), Verdict::True);
        assert_eq!(eq_in_ring(&x, &GenNumber::real(0.0), &g()).unwrap(), Verdict::False);
        assert_eq!(leq(&x, &GenNumber::real(1.0), &g()).unwrap(), Verdict::True);
        assert_eq!(leq(&GenNumber::real(1.0), &x, &g()).unwrap(), Verdict::False);
        let e_s = GenNumber::scalar(crate::net::idempotent(&IndexSet::geometric(0.5, 0.5).unwrap()));
        assert_eq!(leq(&e_s, &GenNumber::real(1.0), &g()).unwrap(), Verdict::True);
    }

    #[test]
    fn invertibility() {
        assert!(is_invertible(&GenNumber::eps_pow(3.0), &g()).unwrap().verdict.is_true());
        assert!(is_invertible(&GenNumber::real(0.0), &g()).unwrap().verdict.is_false());
        let s = IndexSet::geometric(0.5, 0.25).unwrap();
        let e_s = GenNumber::scalar(crate::net::idempotent(&s));
        assert!(is_invertible(&e_s, &g()).unwrap().verdict.is_false());
        // Outside the canonical layer: a zero sample is the witness.
        let odd = GenNumber::scalar(NetExpr::mask(s, NetExpr::ExpInvEps));
        let d = is_invertible(&odd, &g()).unwrap();
        assert!(d.verdict.is_false() && d.witness.is_some());
    }

    #[test]
    fn infinitesimals_and_standard_parts() {
        assert!(is_infinitesimal(&GenNumber::eps_pow(0.5), &g()).unwrap().verdict.is_true());
        assert!(is_infinitesimal(&GenNumber::real(0.1), &g()).unwrap().verdict.is_false());
        let s = IndexSet::geometric(0.5, 0.5).unwrap();
        let z = interleave(&s, &GenNumber::eps_pow(1.0), &GenNumber::real(1.0)).unwrap();
        assert!(is_infinitesimal(&z, &g()).unwrap().verdict.is_false());

        let x = GenNumber::scalar(net("(sum (const 3) (epspow 1))"));
        assert_eq!(standard_part(&x, &g()).unwrap(), Some(vec![3.0]));
        assert_eq!(standard_part(&GenNumber::scalar(NetExpr::ExpInvEps), &g()).unwrap(), None);
        let osc = interleave(&s, &GenNumber::real(0.0), &GenNumber::real(1.0)).unwrap();
        assert_eq!(standard_part(&osc, &g()).unwrap(), None);
    }

    #[test]
    fn fermat_examples() {
        let x = GenNumber::scalar(net("(sum (const 3) (epspow 1))"));
        assert_eq!(fermat_pseudometric(&x, &GenNumber::real(3.0), &g()).unwrap(), 0.0);
        assert_eq!(fermat_pseudometric(&x, &GenNumber::real(4.0), &g()).unwrap(), 1.0);
        let err = fermat_pseudometric(&GenNumber::scalar(NetExpr::ExpInvEps), &GenNumber::real(0.0), &g());
        assert!(matches!(err, Err(Error::Precondition(m)) if m.contains("first")));
    }
}
