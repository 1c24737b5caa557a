//! Sets of radii, the balls they generate, and the identification of points
//! that the induced topology cannot separate.

use std::fmt;

use crate::asymptotics::{eq_in_ring, is_infinitesimal, is_invertible, leq, Canonical, Verdict};
use crate::error::{Error, Result};
use crate::net::{EpsGrid, GenNumber, NetExpr};
use crate::sexpr::{format_f64, parse_all, Sexp};

#[derive(Debug, Clone, PartialEq)]
pub enum RadiiSet {
    /// All positive invertible numbers.
    Sharp,
    /// Positive reals.
    Fermat,
    /// `{r eps^b : r > 0, 0 < b < a}`.
    PowerBand(f64),
    /// Finite wedges of positive multiples of the generators.
    Generated(Vec<GenNumber>),
}

impl RadiiSet {
    /// Parses `sharp | fermat | powerband:a | generated:[n1 n2 ...]`, where
    /// each generator is a net in prefix form.
    pub fn parse(s: &str) -> Result<RadiiSet> {
        let s = s.trim();
        match s {
            "sharp" => return Ok(RadiiSet::Sharp),
            "fermat" => return Ok(RadiiSet::Fermat),
            _ => {}
        }
        if let Some(a) = s.strip_prefix("powerband:") {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad power band exponent {a:?}")))?;
            if !(a > 0.0) {
                return Err(Error::Precondition(format!("power band needs a > 0, got {a}")));
            }
            return Ok(RadiiSet::PowerBand(a));
        }
        if let Some(rest) = s.strip_prefix("generated:") {
            let inner = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| Error::parse(format!("expected generated:[...], got {s:?}")))?;
            let gens = parse_all(inner)?
                .iter()
                .map(|e| Ok(GenNumber::scalar(NetExpr::from_sexp(e)?)))
                .collect::<Result<Vec<_>>>()?;
            if gens.is_empty() {
                return Err(Error::Precondition("generated radii need at least one generator".into()));
            }
            return Ok(RadiiSet::Generated(gens));
        }
        Err(Error::parse(format!("unknown set of radii {s:?}")))
    }
}

impl fmt::Display for RadiiSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiiSet::Sharp => f.write_str("sharp"),
            RadiiSet::Fermat => f.write_str("fermat"),
            RadiiSet::PowerBand(a) => write!(f, "powerband:{}", format_f64(*a)),
            RadiiSet::Generated(h) => {
                f.write_str("generated:[")?;
                for (i, g) in h.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}", g.component(0).to_sexp())?;
                }
                f.write_str("]")
            }
        }
    }
}

fn canonical_scalar(rho: &GenNumber) -> Result<Option<Canonical>> {
    rho.as_scalar()?;
    Ok(rho.canonical()[0].clone())
}

/// `Some(c)` when `x` is exactly the positive constant `c`.
fn positive_constant(c: &Canonical) -> Option<f64> {
    c.as_monomial()
        .filter(|&(k, a)| a.abs() <= 1e-12 && k > 0.0)
        .map(|(k, _)| k)
}

fn min_leaves(n: &NetExpr, out: &mut Vec<NetExpr>) {
    match n {
        NetExpr::Min(a, b) => {
            min_leaves(a, out);
            min_leaves(b, out);
        }
        other => out.push(other.clone()),
    }
}

/// Is `leaf` a positive constant multiple of one of the generators?
fn multiple_of_generator(leaf: &NetExpr, gens: &[GenNumber]) -> Verdict {
    let mut out = Verdict::False;
    for h in gens {
        let h = h.component(0);
        let ratio = leaf.clone().mul(h.clone().recip());
        let Some(k) = Canonical::of(&ratio).map(|c| c.limit()) else {
            out = Verdict::Undetermined;
            continue;
        };
        // The ratio series is truncated; confirm `leaf = k h` exactly.
        let Some(k) = k.filter(|&k| k > 0.0) else { continue };
        let rest = leaf.clone().sub(NetExpr::Const(k).mul(h.clone()));
        match Canonical::of(&rest) {
            Some(c) if c.is_exact_zero() => return Verdict::True,
            Some(_) => {}
            None => out = Verdict::Undetermined,
        }
    }
    out
}

/// Membership of a scalar radius in a set of radii.
pub fn radii_contains(r: &RadiiSet, rho: &GenNumber, grid: &EpsGrid) -> Result<Verdict> {
    let canon = canonical_scalar(rho)?;
    match r {
        RadiiSet::Sharp => {
            let inv = is_invertible(rho, grid)?.verdict;
            Ok(inv.and(leq(&GenNumber::real(0.0), rho, grid)?))
        }
        RadiiSet::Fermat => Ok(match canon {
            Some(c) => Verdict::from_bool(positive_constant(&c).is_some()),
            None => Verdict::Undetermined,
        }),
        RadiiSet::PowerBand(a) => Ok(match canon {
            Some(c) => Verdict::from_bool(
                c.as_monomial()
                    .is_some_and(|(k, b)| k > 0.0 && b > 0.0 && b < *a),
            ),
            None => Verdict::Undetermined,
        }),
        RadiiSet::Generated(gens) => {
            if canon.is_none() {
                return Ok(Verdict::Undetermined);
            }
            let mut leaves = Vec::new();
            min_leaves(rho.component(0), &mut leaves);
            let mut out = Verdict::True;
            for leaf in &leaves {
                out = out.and(multiple_of_generator(leaf, gens));
            }
            Ok(out)
        }
    }
}

/// `y in B_rho(x)`: `|y - x| <= rho` and `|y - x| != rho`.
pub fn ball_member(y: &GenNumber, x: &GenNumber, rho: &GenNumber, grid: &EpsGrid) -> Result<Verdict> {
    x.check_dim(y)?;
    rho.as_scalar()?;
    let d = (y - x).norm();
    Ok(leq(&d, rho, grid)?.and(eq_in_ring(&d, rho, grid)?.not()))
}

/// Whether every `R`-ball around `x` contains `y` and vice versa.
pub fn tau_identified(x: &GenNumber, y: &GenNumber, r: &RadiiSet, grid: &EpsGrid) -> Result<Verdict> {
    x.check_dim(y)?;
    match r {
        RadiiSet::Sharp => eq_in_ring(x, y, grid),
        RadiiSet::Fermat => Ok(is_infinitesimal(&(x - y), grid)?.verdict),
        RadiiSet::PowerBand(_) | RadiiSet::Generated(_) => Ok(Verdict::Undetermined),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomFailure {
    /// `"wedge"` or `"scale"`.
    pub rule: &'static str,
    pub operands: Vec<GenNumber>,
    pub result: Verdict,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxiomReport {
    pub checked: usize,
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![Sexp::tagged("checked", vec![Sexp::atom(self.checked.to_string())])];
        for f in &self.failures {
            let mut ops = vec![Sexp::atom(f.rule), Sexp::atom(f.result.name())];
            ops.extend(f.operands.iter().map(GenNumber::to_sexp));
            items.push(Sexp::tagged("failure", ops));
        }
        Sexp::tagged("radii-axioms", items)
    }
}

/// Scaling factors used by the axiom probe.
pub const PROBE_SCALES: [f64; 3] = [0.5, 2.0, 7.0];

/// Closure under wedge and positive scaling, on every sample pair.
pub fn radii_axiom_probe(r: &RadiiSet, samples: &[GenNumber], grid: &EpsGrid) -> Result<AxiomReport> {
    let mut rep = AxiomReport::default();
    let check = |rule, operands: Vec<GenNumber>, rho: &GenNumber, rep: &mut AxiomReport| -> Result<()> {
        rep.checked += 1;
        let v = radii_contains(r, rho, grid)?;
        if !v.is_true() {
            rep.failures.push(AxiomFailure {
                rule,
                operands,
                result: v,
            });
        }
        Ok(())
    };
    for (i, a) in samples.iter().enumerate() {
        for k in PROBE_SCALES {
            check("scale", vec![a.clone(), GenNumber::real(k)], &a.scale(k), &mut rep)?;
        }
        for b in &samples[i..] {
            check("wedge", vec![a.clone(), b.clone()], &a.wedge(b)?, &mut rep)?;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{idempotent, IndexSet};

    fn g() -> EpsGrid {
        EpsGrid::default()
    }

    #[test]
    fn contains_examples() {
        let band = RadiiSet::PowerBand(1.0);
        assert_eq!(radii_contains(&band, &GenNumber::eps_pow(0.5), &g()).unwrap(), Verdict::True);
        assert_eq!(radii_contains(&band, &GenNumber::eps_pow(2.0), &g()).unwrap(), Verdict::False);
        assert_eq!(radii_contains(&RadiiSet::Fermat, &GenNumber::real(3.0), &g()).unwrap(), Verdict::True);
        assert_eq!(radii_contains(&RadiiSet::Fermat, &GenNumber::eps_pow(1.0), &g()).unwrap(), Verdict::False);
        assert_eq!(radii_contains(&RadiiSet::Sharp, &GenNumber::eps_pow(3.0), &g()).unwrap(), Verdict::True);
        assert_eq!(radii_contains(&RadiiSet::Sharp, &GenNumber::real(-1.0), &g()).unwrap(), Verdict::False);
        let wild = GenNumber::scalar(NetExpr::ExpInvEps);
        assert_eq!(radii_contains(&band, &wild, &g()).unwrap(), Verdict::Undetermined);
    }

    #[test]
    fn generated_recognition() {
        let h = GenNumber::scalar(NetExpr::EpsPow(1.0).add(NetExpr::EpsPow(2.0)));
        let r = RadiiSet::Generated(vec![h.clone()]);
        assert_eq!(radii_contains(&r, &h.scale(2.0), &g()).unwrap(), Verdict::True);
        let w = h.scale(2.0).wedge(&h.scale(3.0)).unwrap();
        assert_eq!(radii_contains(&r, &w, &g()).unwrap(), Verdict::True);
        assert_eq!(radii_contains(&r, &GenNumber::eps_pow(1.0), &g()).unwrap(), Verdict::False);
    }

    #[test]
    fn ball_examples() {
        let x = GenNumber::real(1.0);
        let rho = GenNumber::eps_pow(1.0);
        assert_eq!(ball_member(&x, &x, &rho, &g()).unwrap(), Verdict::True);
        let y = &x + &GenNumber::eps_pow(2.0);
        assert_eq!(ball_member(&y, &x, &rho, &g()).unwrap(), Verdict::True);
        let y = &x + &GenNumber::eps_pow(1.0);
        assert_eq!(ball_member(&y, &x, &GenNumber::eps_pow(2.0), &g()).unwrap(), Verdict::False);
    }

    #[test]
    fn identification_examples() {
        let s = IndexSet::interval(0.4, 0.6).unwrap();
        let x = GenNumber::real(2.0);
        let y = &x + &GenNumber::scalar(idempotent(&s)).scale(5.0);
        assert_eq!(tau_identified(&x, &y, &RadiiSet::Sharp, &g()).unwrap(), Verdict::True);
        let (z, e) = (GenNumber::real(0.0), GenNumber::eps_pow(1.0));
        assert_eq!(tau_identified(&z, &e, &RadiiSet::Fermat, &g()).unwrap(), Verdict::True);
        assert_eq!(tau_identified(&z, &e, &RadiiSet::Sharp, &g()).unwrap(), Verdict::False);
        assert_eq!(
            tau_identified(&z, &e, &RadiiSet::PowerBand(1.0), &g()).unwrap(),
            Verdict::Undetermined
        );
    }

    #[test]
    fn axiom_examples() {
        let rep = radii_axiom_probe(
            &RadiiSet::Fermat,
            &[GenNumber::real(2.0), GenNumber::real(3.0)],
            &g(),
        )
        .unwrap();
        assert!(rep.passed());
        let rep = radii_axiom_probe(
            &RadiiSet::PowerBand(1.0),
            &[GenNumber::eps_pow(0.3), GenNumber::eps_pow(0.7)],
            &g(),
        )
        .unwrap();
        assert!(rep.passed(), "{rep:?}");
        let h = GenNumber::eps_pow(1.5);
        let rep = radii_axiom_probe(&RadiiSet::Generated(vec![h.clone()]), &[h], &g()).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["sharp", "fermat", "powerband:1.5", "generated:[(epspow 1) (const 2)]"] {
            let r = RadiiSet::parse(s).unwrap();
            assert_eq!(RadiiSet::parse(&r.to_string()).unwrap(), r);
        }
        assert!(RadiiSet::parse("powerband:-1").is_err());
        assert!(RadiiSet::parse("hyperbolic").is_err());
    }
}
