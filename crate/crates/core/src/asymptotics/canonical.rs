//! Grid-independent normal forms.
//!
//! A net normalises when, near `eps = 0` and on each "atom" of the index
//! sets it mentions, it equals a generalized polynomial `sum c_i eps^{a_i}`
//! known exactly up to a truncation exponent. Atoms come from at most one
//! geometric sequence: the sequence itself and its complement. Interval
//! masks are eventually full or empty and never split an atom.

use crate::jet::{smooth_step_derivative, Jet};
use crate::net::expr::NetExpr;
use crate::net::index::{GeometricKey, IndexSet, NearZero};
use crate::smooth::{Prim, SmoothExpr};

/// Terms with exponent above `lead + HORIZON` are dropped.
const HORIZON: f64 = 60.0;
const MAX_TERMS: usize = 64;
const EXP_TOL: f64 = 1e-12;
const CANCEL_TOL: f64 = 1e-13;
const MAX_TAYLOR: usize = 64;

/// A generalized polynomial in `eps` with known error order.
///
/// `terms` are sorted by exponent, have nonzero coefficients and exponents
/// strictly below `trunc`; the represented net equals the sum plus
/// `O(eps^trunc)`. `trunc = inf` means the sum is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub terms: Vec<(f64, f64)>,
    pub trunc: f64,
}

fn same_exp(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXP_TOL * a.abs().max(b.abs()).max(1.0)
}

impl Series {
    pub fn zero() -> Series {
        Series {
            terms: Vec::new(),
            trunc: f64::INFINITY,
        }
    }

    pub fn monomial(c: f64, a: f64) -> Series {
        Series::from_terms(vec![(a, c)], f64::INFINITY)
    }

    pub fn constant(c: f64) -> Series {
        Series::monomial(c, 0.0)
    }

    /// Normalises raw terms: merges equal exponents, cancels, truncates.
    pub fn from_terms(mut raw: Vec<(f64, f64)>, trunc: f64) -> Series {
        raw.retain(|t| t.1 != 0.0);
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut terms: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        let mut scale: Vec<f64> = Vec::with_capacity(raw.len());
        for (a, c) in raw {
            match terms.last_mut() {
                Some(last) if same_exp(last.0, a) => {
                    last.1 += c;
                    let s = scale.last_mut().unwrap();
                    *s = s.max(c.abs());
                }
                _ => {
                    terms.push((a, c));
                    scale.push(c.abs());
                }
            }
        }
        let mut out: Vec<(f64, f64)> = terms
            .into_iter()
            .zip(scale)
            .filter(|((_, c), s)| c.abs() > CANCEL_TOL * s)
            .map(|(t, _)| t)
            .collect();
        let mut trunc = trunc;
        if let Some(&(lead, _)) = out.first() {
            let cut = out
                .iter()
                .position(|t| t.0 > lead + HORIZON)
                .unwrap_or(out.len())
                .min(MAX_TERMS);
            if cut < out.len() {
                trunc = trunc.min(out[cut].0);
                out.truncate(cut);
            }
        }
        out.retain(|t| t.0 < trunc);
        Series { terms: out, trunc }
    }

    pub fn is_exact(&self) -> bool {
        self.trunc == f64::INFINITY
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.is_exact()
    }

    /// Leading `(exponent, coefficient)`; `None` for zero or unknown.
    pub fn lead(&self) -> Option<(f64, f64)> {
        self.terms.first().copied()
    }

    /// True when the leading behaviour is known (nonzero lead, or exact zero).
    pub fn is_determined(&self) -> bool {
        !self.terms.is_empty() || self.is_exact()
    }

    /// Order (valuation) of this atom: lead exponent, `inf` for exact zero.
    pub fn order(&self) -> Option<f64> {
        match self.lead() {
            Some((a, _)) => Some(a),
            None if self.is_exact() => Some(f64::INFINITY),
            None => None,
        }
    }

    pub fn coefficient_at(&self, a: f64) -> f64 {
        self.terms
            .iter()
            .find(|t| same_exp(t.0, a))
            .map_or(0.0, |t| t.1)
    }

    pub fn eval(&self, eps: f64) -> f64 {
        self.terms.iter().map(|&(a, c)| c * eps.powf(a)).sum()
    }

    pub fn add(&self, o: &Series) -> Series {
        let mut raw = self.terms.clone();
        raw.extend_from_slice(&o.terms);
        Series::from_terms(raw, self.trunc.min(o.trunc))
    }

    pub fn neg(&self) -> Series {
        self.scale(-1.0)
    }

    pub fn scale(&self, k: f64) -> Series {
        if k == 0.0 {
            return Series::zero();
        }
        Series {
            terms: self.terms.iter().map(|&(a, c)| (a, c * k)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn mul(&self, o: &Series) -> Series {
        if self.is_exact_zero() || o.is_exact_zero() {
            return Series::zero();
        }
        // Lowest exponent that can occur; the truncation order when unknown.
        let low = |s: &Series| s.lead().map_or(s.trunc, |t| t.0);
        let (la, lb) = (low(self), low(o));
        let mut raw = Vec::with_capacity(self.terms.len() * o.terms.len());
        for &(a, c) in &self.terms {
            for &(b, d) in &o.terms {
                raw.push((a + b, c * d));
            }
        }
        let trunc = (self.trunc + lb).min(o.trunc + la);
        Series::from_terms(raw, trunc)
    }

    /// Multiplicative inverse; `None` when the leading term is unknown or zero.
    pub fn recip(&self) -> Option<Series> {
        let (a, c) = self.lead()?;
        // self = c eps^a (1 + r), r has positive exponents.
        let r = self.div_lead();
        let inv = r.taylor_at_one(|k| if k % 2 == 0 { 1.0 } else { -1.0 })?;
        Some(inv.mul(&Series::monomial(1.0 / c, -a)))
    }

    /// `self / lead - 1`: the relative correction, of positive order.
    fn div_lead(&self) -> Series {
        let (a, c) = self.lead().expect("lead checked by caller");
        Series::from_terms(
            self.terms[1..].iter().map(|&(b, d)| (b - a, d / c)).collect(),
            self.trunc - a,
        )
    }

    /// `sum_k coef(k) h^k` for `h = self` of positive order.
    fn taylor_at_one(&self, coef: impl Fn(usize) -> f64) -> Option<Series> {
        let coefs: Vec<f64> = (0..=MAX_TAYLOR).map(coef).collect();
        self.taylor(&coefs)
    }

    /// Substitutes `self` (positive order) into a power series with the given
    /// normalised coefficients.
    fn taylor(&self, coefs: &[f64]) -> Option<Series> {
        if self.is_exact_zero() {
            return Some(Series::constant(coefs[0]));
        }
        let g = self.order()?;
        if !(g > 0.0) {
            return None;
        }
        let needed = ((HORIZON / g).ceil() as usize + 1).min(coefs.len() - 1);
        let mut acc = Series::constant(coefs[0]);
        let mut power = Series::constant(1.0);
        for c in coefs.iter().take(needed + 1).skip(1) {
            power = power.mul(self);
            if *c != 0.0 {
                acc = acc.add(&power.scale(*c));
            }
        }
        let remainder = (needed + 1) as f64 * g;
        Some(Series::from_terms(acc.terms, acc.trunc.min(remainder)))
    }

    pub fn powi(&self, n: i32) -> Option<Series> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut out = Series::constant(1.0);
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        Some(out)
    }

    /// Applies a smooth primitive.
    pub fn apply(&self, p: Prim) -> Option<Series> {
        if !self.is_determined() {
            return None;
        }
        if p == Prim::Sqrt {
            return self.sqrt();
        }
        // Split into a constant part and an infinitesimal part.
        if let Some((a, _)) = self.lead() {
            if a < 0.0 && !same_exp(a, 0.0) {
                return None;
            }
        }
        let a0 = self.coefficient_at(0.0);
        let h = Series::from_terms(
            self.terms
                .iter()
                .filter(|t| !same_exp(t.0, 0.0))
                .copied()
                .collect(),
            self.trunc,
        );
        let order = MAX_TAYLOR;
        let coefs: Vec<f64> = match p {
            Prim::Sin | Prim::Cos => {
                let (s, c) = Jet::variable(a0, order).sin_cos();
                if p == Prim::Sin {
                    s.0
                } else {
                    c.0
                }
            }
            Prim::Exp => Jet::variable(a0, order).exp().0,
            Prim::Tanh => Jet::variable(a0, order).tanh().0,
            Prim::Log => {
                if !(a0 > 0.0) {
                    return None;
                }
                Jet::variable(a0, order).ln().0
            }
            Prim::Step(k) => {
                if h.is_exact_zero() {
                    vec![smooth_step_derivative(k as usize, a0)]
                } else if a0 == 0.0 || a0 == 1.0 {
                    // Flat at the seam: every Taylor coefficient vanishes but
                    // the function does not.
                    return None;
                } else {
                    let mut fact = 1.0;
                    (0..=24)
                        .map(|j| {
                            if j > 0 {
                                fact *= j as f64;
                            }
                            smooth_step_derivative(k as usize + j, a0) / fact
                        })
                        .collect()
                }
            }
            Prim::Sqrt => unreachable!(),
        };
        if coefs.iter().any(|c| !c.is_finite()) {
            return None;
        }
        h.taylor(&coefs)
    }

    fn sqrt(&self) -> Option<Series> {
        if self.is_exact_zero() {
            return Some(Series::zero());
        }
        let (a, c) = self.lead()?;
        if c < 0.0 {
            return None;
        }
        let r = self.div_lead();
        let coefs = Jet::variable(1.0, MAX_TAYLOR).sqrt().0;
        let root = r.taylor(&coefs)?;
        Some(root.mul(&Series::monomial(c.sqrt(), a / 2.0)))
    }
}

/// One region of the index set near zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Atom {
    /// No geometric sequence involved.
    All,
    /// Indices on the sequence.
    On(GeometricKey),
    /// Indices off the sequence.
    Off(GeometricKey),
}

impl Atom {
    fn contains(&self, s: &IndexSet) -> Option<bool> {
        match (s.near_zero(), self) {
            (NearZero::Empty, _) => Some(false),
            (NearZero::Full, _) => Some(true),
            (NearZero::Sequence { seq, complemented }, Atom::On(k)) if seq == *k => {
                Some(!complemented)
            }
            (NearZero::Sequence { seq, complemented }, Atom::Off(k)) if seq == *k => {
                Some(complemented)
            }
            _ => None,
        }
    }
}

/// Normal form of a scalar net: one series per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Canonical {
    pub atoms: Vec<(Atom, Series)>,
}

impl Canonical {
    /// `None` when the net leaves the supported subalgebra (for example
    /// `e^{1/eps}`, oscillation like `sin(1/eps)`, two distinct geometric
    /// sequences) or its leading behaviour is lost to truncation.
    pub fn of(net: &NetExpr) -> Option<Canonical> {
        let mut sets = Vec::new();
        net.collect_index_sets(&mut sets);
        let mut key: Option<GeometricKey> = None;
        for s in &sets {
            if let NearZero::Sequence { seq, .. } = s.near_zero() {
                match key {
                    None => key = Some(seq),
                    Some(k) if k == seq => {}
                    Some(_) => return None,
                }
            }
        }
        let atoms: Vec<Atom> = match key {
            None => vec![Atom::All],
            Some(k) => vec![Atom::On(k), Atom::Off(k)],
        };
        let mut out = Vec::with_capacity(atoms.len());
        for atom in atoms {
            let s = net_series(net, &atom)?;
            if !s.is_determined() {
                return None;
            }
            out.push((atom, s));
        }
        Some(Canonical { atoms: out })
    }

    pub fn is_exact_zero(&self) -> bool {
        self.atoms.iter().all(|(_, s)| s.is_exact_zero())
    }

    /// `v`: the smallest atom order.
    pub fn valuation(&self) -> f64 {
        self.atoms
            .iter()
            .filter_map(|(_, s)| s.order())
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest atom order: `|x| >= c eps^q` eventually iff `q` exceeds it.
    /// `inf` when some atom vanishes identically.
    pub fn lower_order(&self) -> f64 {
        self.atoms
            .iter()
            .filter_map(|(_, s)| s.order())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The common limit of all atoms as `eps -> 0`, if it exists.
    pub fn limit(&self) -> Option<f64> {
        let mut lim: Option<f64> = None;
        for (_, s) in &self.atoms {
            if let Some((a, _)) = s.lead() {
                if a < 0.0 && !same_exp(a, 0.0) {
                    return None;
                }
            }
            if s.trunc <= 0.0 {
                return None;
            }
            let v = s.coefficient_at(0.0);
            match lim {
                None => lim = Some(v),
                Some(l) if (l - v).abs() <= 1e-12 * l.abs().max(v.abs()).max(1.0) => {}
                Some(_) => return None,
            }
        }
        lim
    }

    /// `Some((c, a))` when every atom is exactly the monomial `c eps^a`.
    pub fn as_monomial(&self) -> Option<(f64, f64)> {
        let mut m: Option<(f64, f64)> = None;
        for (_, s) in &self.atoms {
            if !s.is_exact() || s.terms.len() != 1 {
                return None;
            }
            let (a, c) = s.terms[0];
            match m {
                None => m = Some((c, a)),
                Some((c0, a0))
                    if same_exp(a0, a) && (c0 - c).abs() <= 1e-12 * c0.abs().max(c.abs()) => {}
                Some(_) => return None,
            }
        }
        m
    }

    /// Sign of the leading term on every atom (+1/-1, 0 for exact zero).
    pub fn lead_signs(&self) -> Vec<f64> {
        self.atoms
            .iter()
            .map(|(_, s)| s.lead().map_or(0.0, |(_, c)| c.signum()))
            .collect()
    }
}

fn net_series(net: &NetExpr, atom: &Atom) -> Option<Series> {
    let s = match net {
        NetExpr::Const(c) => {
            if !c.is_finite() {
                return None;
            }
            Series::constant(*c)
        }
        NetExpr::EpsPow(a) => {
            if !a.is_finite() {
                return None;
            }
            Series::monomial(1.0, *a)
        }
        NetExpr::ExpInvEps => return None,
        NetExpr::Mask(s, child) => {
            if atom.contains(s)? {
                net_series(child, atom)?
            } else {
                Series::zero()
            }
        }
        NetExpr::Sum(xs) => {
            let mut acc = Series::zero();
            for x in xs {
                acc = acc.add(&net_series(x, atom)?);
            }
            acc
        }
        NetExpr::Prod(xs) => {
            let parts = xs
                .iter()
                .map(|x| net_series(x, atom))
                .collect::<Option<Vec<_>>>()?;
            if parts.iter().any(Series::is_exact_zero) {
                return Some(Series::zero());
            }
            parts
                .iter()
                .fold(Series::constant(1.0), |acc, p| acc.mul(p))
        }
        NetExpr::Neg(x) => net_series(x, atom)?.neg(),
        NetExpr::Abs(x) => {
            let s = net_series(x, atom)?;
            match s.lead() {
                Some((_, c)) if c < 0.0 => s.neg(),
                Some(_) => s,
                None if s.is_exact() => s,
                None => return None,
            }
        }
        NetExpr::Min(a, b) | NetExpr::Max(a, b) => {
            let (sa, sb) = (net_series(a, atom)?, net_series(b, atom)?);
            let d = sa.add(&sb.neg());
            let a_bigger = match d.lead() {
                Some((_, c)) => c > 0.0,
                None if d.is_exact() => true,
                None => return None,
            };
            let take_a = matches!(net, NetExpr::Max(..)) == a_bigger;
            if take_a {
                sa
            } else {
                sb
            }
        }
        NetExpr::Recip(x) => net_series(x, atom)?.recip()?,
        NetExpr::Apply(f, args) => {
            let xs = args
                .iter()
                .map(|x| net_series(x, atom))
                .collect::<Option<Vec<_>>>()?;
            smooth_series(f, &xs, atom)?
        }
    };
    Some(s)
}

fn smooth_series(f: &SmoothExpr, args: &[Series], atom: &Atom) -> Option<Series> {
    Some(match f {
        SmoothExpr::Var(i) => args.get(*i)?.clone(),
        SmoothExpr::Coef(n) => net_series(n, atom)?,
        SmoothExpr::Sum(xs) => {
            let mut acc = Series::zero();
            for x in xs {
                acc = acc.add(&smooth_series(x, args, atom)?);
            }
            acc
        }
        SmoothExpr::Prod(xs) => {
            let parts = xs
                .iter()
                .map(|x| smooth_series(x, args, atom))
                .collect::<Option<Vec<_>>>()?;
            if parts.iter().any(Series::is_exact_zero) {
                return Some(Series::zero());
            }
            parts
                .iter()
                .fold(Series::constant(1.0), |acc, p| acc.mul(p))
        }
        SmoothExpr::Powi(b, n) => smooth_series(b, args, atom)?.powi(*n)?,
        SmoothExpr::Apply(p, a) => smooth_series(a, args, atom)?.apply(*p)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_one;

    fn canon(src: &str) -> Option<Canonical> {
        Canonical::of(&NetExpr::from_sexp(&parse_one(src).unwrap()).unwrap())
    }

    #[test]
    fn monomials_and_sums() {
        let c = canon("(prod (const 3) (epspow 2.5))").unwrap();
        assert_eq!(c.valuation(), 2.5);
        assert_eq!(c.as_monomial(), Some((3.0, 2.5)));
        let c = canon("(sum (epspow 1) (epspow 3))").unwrap();
        assert_eq!(c.valuation(), 1.0);
        assert_eq!(canon("(const 5)").unwrap().valuation(), 0.0);
    }

    #[test]
    fn cancellation_reaches_zero() {
        let c = canon("(sum (epspow 1) (neg (epspow 1)))").unwrap();
        assert!(c.is_exact_zero());
        assert_eq!(c.valuation(), f64::INFINITY);
    }

    #[test]
    fn masks_split_atoms() {
        let c = canon("(mask (intervals (0.3 0.6)) (epspow -5))").unwrap();
        assert!(c.is_exact_zero());
        let c = canon("(sum (mask (geometric 0.5 0.5) (epspow 1)) (mask (complement (geometric 0.5 0.5)) (const 1)))")
            .unwrap();
        assert_eq!(c.atoms.len(), 2);
        assert_eq!(c.valuation(), 0.0);
        assert_eq!(c.lower_order(), 1.0);
        assert_eq!(c.limit(), None);
        assert!(canon("(sum (mask (geometric 0.5 0.5) (const 1)) (mask (geometric 0.5 0.25) (const 1)))").is_none());
    }

    #[test]
    fn reciprocal_series() {
        // 1 / (eps + eps^2) = eps^-1 - 1 + eps - ...
        let c = canon("(recip (sum (epspow 1) (epspow 2)))").unwrap();
        let s = &c.atoms[0].1;
        assert_eq!(s.lead(), Some((-1.0, 1.0)));
        assert!((s.coefficient_at(0.0) + 1.0).abs() < 1e-12);
        assert!((s.coefficient_at(1.0) - 1.0).abs() < 1e-12);
        assert!(canon("(recip (const 0))").is_none());
    }

    #[test]
    fn smooth_application() {
        // sin(eps) = eps - eps^3/6 + ...
        let c = canon("(apply (sin x1) (epspow 1))").unwrap();
        let s = &c.atoms[0].1;
        assert_eq!(s.lead(), Some((1.0, 1.0)));
        assert!((s.coefficient_at(3.0) + 1.0 / 6.0).abs() < 1e-12);
        // sqrt(eps^2 + eps^4) has order 1.
        let c = canon("(apply (sqrt x1) (sum (epspow 2) (epspow 4)))").unwrap();
        assert_eq!(c.valuation(), 1.0);
        // sin(1/eps) oscillates.
        assert!(canon("(apply (sin x1) (epspow -1))").is_none());
        assert!(canon("(expinv)").is_none());
    }

    #[test]
    fn min_max_by_leading_sign() {
        let c = canon("(min (const 1) (epspow 1))").unwrap();
        assert_eq!(c.as_monomial(), Some((1.0, 1.0)));
        let c = canon("(max (sum (epspow 1) (neg (const 1))) (const 0))").unwrap();
        assert!(c.is_exact_zero());
    }

    #[test]
    fn series_agrees_with_evaluation() {
        let net = NetExpr::from_sexp(
            &parse_one("(apply (exp x1) (sum (const 0.25) (epspow 0.5)))").unwrap(),
        )
        .unwrap();
        let c = Canonical::of(&net).unwrap();
        for eps in [1e-2, 1e-4, 1e-6] {
            let want = net.eval(eps).unwrap();
            let got = c.atoms[0].1.eval(eps);
            assert!((want - got).abs() < 1e-10 * want.abs(), "eps={eps}");
        }
    }
}
