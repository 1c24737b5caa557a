use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::logmag::LogMag;
use crate::net::index::IndexSet;
use crate::sexpr::Sexp;
use crate::smooth::SmoothExpr;

/// An inspectable expression for a net `eps -> value`.
///
/// This is the representative of a scalar generalized number. Evaluation is
/// pure: the same `eps` always yields the same result.
#[derive(Debug, Clone, PartialEq)]
pub enum NetExpr {
    Const(f64),
    /// `eps^a`
    EpsPow(f64),
    /// `e^{1/eps}`
    ExpInvEps,
    /// The child on `S`, zero off `S`.
    Mask(IndexSet, Box<NetExpr>),
    Sum(Vec<NetExpr>),
    Prod(Vec<NetExpr>),
    Neg(Box<NetExpr>),
    Abs(Box<NetExpr>),
    Min(Box<NetExpr>, Box<NetExpr>),
    Max(Box<NetExpr>, Box<NetExpr>),
    Recip(Box<NetExpr>),
    /// A smooth family evaluated at `eps` on the argument nets (`x1 = args[0]`, ...).
    Apply(Arc<SmoothExpr>, Vec<NetExpr>),
}

impl NetExpr {
    pub fn zero() -> NetExpr {
        NetExpr::Const(0.0)
    }

    pub fn one() -> NetExpr {
        NetExpr::Const(1.0)
    }

    pub fn eps() -> NetExpr {
        NetExpr::EpsPow(1.0)
    }

    pub fn mask(s: IndexSet, child: NetExpr) -> NetExpr {
        NetExpr::Mask(s, Box::new(child))
    }

    pub fn neg(self) -> NetExpr {
        NetExpr::Neg(Box::new(self))
    }

    pub fn abs(self) -> NetExpr {
        NetExpr::Abs(Box::new(self))
    }

    pub fn recip(self) -> NetExpr {
        NetExpr::Recip(Box::new(self))
    }

    pub fn min(self, other: NetExpr) -> NetExpr {
        NetExpr::Min(Box::new(self), Box::new(other))
    }

    pub fn max(self, other: NetExpr) -> NetExpr {
        NetExpr::Max(Box::new(self), Box::new(other))
    }

    pub fn add(self, other: NetExpr) -> NetExpr {
        NetExpr::Sum(vec![self, other])
    }

    pub fn sub(self, other: NetExpr) -> NetExpr {
        NetExpr::Sum(vec![self, other.neg()])
    }

    pub fn mul(self, other: NetExpr) -> NetExpr {
        NetExpr::Prod(vec![self, other])
    }

    /// `c * eps^a`
    pub fn monomial(c: f64, a: f64) -> NetExpr {
        NetExpr::Prod(vec![NetExpr::Const(c), NetExpr::EpsPow(a)])
    }

    pub fn apply(f: SmoothExpr, args: Vec<NetExpr>) -> NetExpr {
        NetExpr::Apply(Arc::new(f), args)
    }

    /// Value of the net at `eps`.
    pub fn eval(&self, eps: f64) -> Result<f64> {
        Ok(match self {
            NetExpr::Const(c) => *c,
            NetExpr::EpsPow(a) => eps.powf(*a),
            NetExpr::ExpInvEps => (1.0 / eps).exp(),
            NetExpr::Mask(s, child) => {
                if s.contains(eps) {
                    child.eval(eps)?
                } else {
                    0.0
                }
            }
            NetExpr::Sum(xs) => {
                let mut acc = 0.0;
                for x in xs {
                    acc += x.eval(eps)?;
                }
                acc
            }
            NetExpr::Prod(xs) => {
                let mut acc = 1.0;
                let mut zero = false;
                for x in xs {
                    let v = x.eval(eps)?;
                    zero |= v == 0.0;
                    acc *= v;
                }
                if zero {
                    0.0
                } else {
                    acc
                }
            }
            NetExpr::Neg(x) => -x.eval(eps)?,
            NetExpr::Abs(x) => x.eval(eps)?.abs(),
            NetExpr::Min(a, b) => a.eval(eps)?.min(b.eval(eps)?),
            NetExpr::Max(a, b) => a.eval(eps)?.max(b.eval(eps)?),
            NetExpr::Recip(x) => {
                let v = x.eval(eps)?;
                if v == 0.0 {
                    return Err(Error::Domain {
                        eps,
                        what: "reciprocal of zero",
                        node: self.label(),
                    });
                }
                1.0 / v
            }
            NetExpr::Apply(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| a.eval(eps))
                    .collect::<Result<Vec<_>>>()?;
                f.eval(eps, &vals)?
            }
        })
    }

    /// `ln |value|` at `eps`, evaluated in the log domain so that products,
    /// reciprocals and powers of huge or tiny factors do not overflow.
    /// Exact zero gives `-inf`.
    pub fn log_abs_eval(&self, eps: f64) -> Result<f64> {
        Ok(self.eval_log(eps)?.ln_abs)
    }

    /// Signed log-magnitude evaluation.
    pub fn eval_log(&self, eps: f64) -> Result<LogMag> {
        Ok(match self {
            NetExpr::Const(c) => LogMag::from_f64(*c),
            NetExpr::EpsPow(a) => LogMag::positive(a * eps.ln()),
            NetExpr::ExpInvEps => LogMag::positive(1.0 / eps),
            NetExpr::Mask(s, child) => {
                if s.contains(eps) {
                    child.eval_log(eps)?
                } else {
                    LogMag::ZERO
                }
            }
            NetExpr::Sum(xs) => {
                let terms = xs
                    .iter()
                    .map(|x| x.eval_log(eps))
                    .collect::<Result<Vec<_>>>()?;
                LogMag::sum(&terms)
            }
            NetExpr::Prod(xs) => {
                let mut acc = LogMag::ONE;
                for x in xs {
                    acc = acc.mul(x.eval_log(eps)?);
                }
                acc
            }
            NetExpr::Neg(x) => x.eval_log(eps)?.neg(),
            NetExpr::Abs(x) => x.eval_log(eps)?.abs(),
            NetExpr::Min(a, b) => a.eval_log(eps)?.min(b.eval_log(eps)?),
            NetExpr::Max(a, b) => a.eval_log(eps)?.max(b.eval_log(eps)?),
            NetExpr::Recip(x) => x.eval_log(eps)?.recip().ok_or_else(|| Error::Domain {
                eps,
                what: "reciprocal of zero",
                node: self.label(),
            })?,
            NetExpr::Apply(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| a.eval_log(eps))
                    .collect::<Result<Vec<_>>>()?;
                f.eval_log(eps, &vals)?
            }
        })
    }

    /// Collects every index set mentioned in the tree (including inside smooth
    /// families), for grid augmentation.
    pub fn collect_index_sets(&self, out: &mut Vec<IndexSet>) {
        match self {
            NetExpr::Const(_) | NetExpr::EpsPow(_) | NetExpr::ExpInvEps => {}
            NetExpr::Mask(s, child) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
                child.collect_index_sets(out);
            }
            NetExpr::Sum(xs) | NetExpr::Prod(xs) => {
                xs.iter().for_each(|x| x.collect_index_sets(out))
            }
            NetExpr::Neg(x) | NetExpr::Abs(x) | NetExpr::Recip(x) => x.collect_index_sets(out),
            NetExpr::Min(a, b) | NetExpr::Max(a, b) => {
                a.collect_index_sets(out);
                b.collect_index_sets(out);
            }
            NetExpr::Apply(f, args) => {
                f.collect_index_sets(out);
                args.iter().for_each(|x| x.collect_index_sets(out));
            }
        }
    }

    /// Short description for error messages.
    pub fn label(&self) -> String {
        let s = self.to_string();
        if s.len() > 80 {
            format!("{}...", &s[..s.floor_char_boundary(77)])
        } else {
            s
        }
    }

    pub fn to_sexp(&self) -> Sexp {
        match self {
            NetExpr::Const(c) => Sexp::tagged("const", vec![Sexp::num(*c)]),
            NetExpr::EpsPow(a) => Sexp::tagged("epspow", vec![Sexp::num(*a)]),
            NetExpr::ExpInvEps => Sexp::tagged("expinv", vec![]),
            NetExpr::Mask(s, c) => Sexp::tagged("mask", vec![s.to_sexp(), c.to_sexp()]),
            NetExpr::Sum(xs) => Sexp::tagged("sum", xs.iter().map(NetExpr::to_sexp).collect()),
            NetExpr::Prod(xs) => Sexp::tagged("prod", xs.iter().map(NetExpr::to_sexp).collect()),
            NetExpr::Neg(x) => Sexp::tagged("neg", vec![x.to_sexp()]),
            NetExpr::Abs(x) => Sexp::tagged("abs", vec![x.to_sexp()]),
            NetExpr::Min(a, b) => Sexp::tagged("min", vec![a.to_sexp(), b.to_sexp()]),
            NetExpr::Max(a, b) => Sexp::tagged("max", vec![a.to_sexp(), b.to_sexp()]),
            NetExpr::Recip(x) => Sexp::tagged("recip", vec![x.to_sexp()]),
            NetExpr::Apply(f, args) => {
                let mut items = vec![f.to_sexp()];
                items.extend(args.iter().map(NetExpr::to_sexp));
                Sexp::tagged("apply", items)
            }
        }
    }

    pub fn from_sexp(s: &Sexp) -> Result<NetExpr> {
        let head = s
            .head()
            .ok_or_else(|| s.err("expected a net expression `(op ...)`"))?;
        let items = s.expect_list()?;
        let rest = &items[1..];
        let boxed = |i: usize| -> Result<Box<NetExpr>> { Ok(Box::new(NetExpr::from_sexp(&rest[i])?)) };
        Ok(match head {
            "const" => NetExpr::Const(s.args("const", 1)?[0].expect_f64()?),
            "epspow" => NetExpr::EpsPow(s.args("epspow", 1)?[0].expect_f64()?),
            "expinv" => {
                s.args("expinv", 0)?;
                NetExpr::ExpInvEps
            }
            "mask" => {
                let a = s.args("mask", 2)?;
                NetExpr::Mask(IndexSet::from_sexp(&a[0])?, Box::new(NetExpr::from_sexp(&a[1])?))
            }
            "sum" | "prod" => {
                if rest.is_empty() {
                    return Err(s.err(format!("`{head}` needs at least one argument")));
                }
                let xs = rest.iter().map(NetExpr::from_sexp).collect::<Result<Vec<_>>>()?;
                if head == "sum" {
                    NetExpr::Sum(xs)
                } else {
                    NetExpr::Prod(xs)
                }
            }
            "neg" => {
                s.args("neg", 1)?;
                NetExpr::Neg(boxed(0)?)
            }
            "abs" => {
                s.args("abs", 1)?;
                NetExpr::Abs(boxed(0)?)
            }
            "recip" => {
                s.args("recip", 1)?;
                NetExpr::Recip(boxed(0)?)
            }
            "min" => {
                s.args("min", 2)?;
                NetExpr::Min(boxed(0)?, boxed(1)?)
            }
            "max" => {
                s.args("max", 2)?;
                NetExpr::Max(boxed(0)?, boxed(1)?)
            }
            "apply" => {
                if rest.is_empty() {
                    return Err(s.err("`apply` needs a smooth family"));
                }
                let f = SmoothExpr::from_sexp(&rest[0])?;
                let args = rest[1..]
                    .iter()
                    .map(NetExpr::from_sexp)
                    .collect::<Result<Vec<_>>>()?;
                if f.arity() > args.len() {
                    return Err(s.err(format!(
                        "smooth family uses {} variable(s) but {} argument(s) given",
                        f.arity(),
                        args.len()
                    )));
                }
                NetExpr::Apply(Arc::new(f), args)
            }
            other => return Err(s.err(format!("unknown net operator `{other}`"))),
        })
    }
}

impl fmt::Display for NetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_one;

    fn parse(s: &str) -> NetExpr {
        NetExpr::from_sexp(&parse_one(s).unwrap()).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(NetExpr::EpsPow(2.0).eval(0.5).unwrap(), 0.25);
        let m = NetExpr::mask(IndexSet::interval(0.0, 0.1).unwrap(), NetExpr::one());
        assert_eq!(m.eval(0.5).unwrap(), 0.0);
        assert_eq!(m.eval(0.05).unwrap(), 1.0);
        let s = parse("(sum (const 1) (epspow 1))");
        assert!((s.eval(0.1).unwrap() - 1.1).abs() < 1e-15);
    }

    #[test]
    fn log_eval_examples() {
        let v = NetExpr::EpsPow(-100.0)
            .log_abs_eval(2f64.powi(-30))
            .unwrap();
        assert!((v - 3000.0 * 2f64.ln()).abs() < 1e-9);
        assert!((v - 2079.44).abs() < 0.01);
        assert_eq!(NetExpr::zero().log_abs_eval(0.3).unwrap(), f64::NEG_INFINITY);
        assert!((NetExpr::ExpInvEps.log_abs_eval(0.01).unwrap() - 100.0).abs() < 1e-12);
        // Far beyond f64 range in the direct evaluator.
        let huge = NetExpr::ExpInvEps.mul(NetExpr::EpsPow(3.0));
        let l = huge.log_abs_eval(1e-6).unwrap();
        assert!((l - (1e6 + 3.0 * 1e-6f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn reciprocal_of_zero_is_a_domain_error() {
        let r = NetExpr::mask(IndexSet::interval(0.0, 0.1).unwrap(), NetExpr::one()).recip();
        assert!(r.eval(0.05).is_ok());
        match r.eval(0.5) {
            Err(Error::Domain { node, .. }) => assert!(node.starts_with("(recip")),
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(r.log_abs_eval(0.5).is_err());
    }

    #[test]
    fn text_round_trip() {
        let src = "(apply (prod x1 (sin x2)) (sum (const 1) (epspow 1)) (mask (geometric 0.5 0.5) (expinv)))";
        let e = parse(src);
        assert_eq!(e.to_string(), src);
        assert_eq!(parse(&e.to_string()), e);
    }
}
