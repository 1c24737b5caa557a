//! Symbolic smooth expressions in spatial variables `x1..xd` whose
//! coefficients are nets. A `SmoothExpr` is the net of smooth maps
//! `u_eps(x)`; it can be evaluated at `(eps, point)` and differentiated
//! exactly to any order.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{smooth_step, smooth_step_derivative};
use crate::logmag::LogMag;
use crate::net::expr::NetExpr;
use crate::net::index::IndexSet;
use crate::sexpr::Sexp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prim {
    Sin,
    Cos,
    Exp,
    /// Defined for positive arguments only.
    Log,
    Tanh,
    /// Defined for non-negative arguments only.
    Sqrt,
    /// `k`-th derivative of the standard smooth transition from 0 (at t <= 0)
    /// to 1 (at t >= 1).
    Step(u8),
}

impl Prim {
    fn name(&self) -> String {
        match self {
            Prim::Sin => "sin".into(),
            Prim::Cos => "cos".into(),
            Prim::Exp => "exp".into(),
            Prim::Log => "log".into(),
            Prim::Tanh => "tanh".into(),
            Prim::Sqrt => "sqrt".into(),
            Prim::Step(k) => format!("step{k}"),
        }
    }

    fn from_name(s: &str) -> Option<Prim> {
        Some(match s {
            "sin" => Prim::Sin,
            "cos" => Prim::Cos,
            "exp" => Prim::Exp,
            "log" => Prim::Log,
            "tanh" => Prim::Tanh,
            "sqrt" => Prim::Sqrt,
            _ => Prim::Step(s.strip_prefix("step")?.parse().ok()?),
        })
    }

    fn apply_f64(&self, x: f64, eps: f64, node: &SmoothExpr) -> Result<f64> {
        Ok(match self {
            Prim::Sin => x.sin(),
            Prim::Cos => x.cos(),
            Prim::Exp => x.exp(),
            Prim::Tanh => x.tanh(),
            Prim::Log => {
                if !(x > 0.0) {
                    return Err(domain(eps, "log of a non-positive value", node));
                }
                x.ln()
            }
            Prim::Sqrt => {
                if x < 0.0 || x.is_nan() {
                    return Err(domain(eps, "sqrt of a negative value", node));
                }
                x.sqrt()
            }
            Prim::Step(0) => smooth_step(x),
            Prim::Step(k) => smooth_step_derivative(*k as usize, x),
        })
    }
}

fn domain(eps: f64, what: &'static str, node: &SmoothExpr) -> Error {
    let s = node.to_string();
    let node = if s.len() > 80 {
        format!("{}...", &s[..s.floor_char_boundary(77)])
    } else {
        s
    };
    Error::Domain { eps, what, node }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SmoothExpr {
    /// Spatial variable, zero-based (`Var(0)` prints as `x1`).
    Var(usize),
    Coef(NetExpr),
    Sum(Vec<SmoothExpr>),
    Prod(Vec<SmoothExpr>),
    Powi(Box<SmoothExpr>, i32),
    Apply(Prim, Box<SmoothExpr>),
}

impl SmoothExpr {
    pub fn var(i: usize) -> SmoothExpr {
        SmoothExpr::Var(i)
    }

    pub fn constant(c: f64) -> SmoothExpr {
        SmoothExpr::Coef(NetExpr::Const(c))
    }

    pub fn coef(n: NetExpr) -> SmoothExpr {
        match n {
            NetExpr::Const(c) => SmoothExpr::constant(c),
            other => SmoothExpr::Coef(other),
        }
    }

    pub fn zero() -> SmoothExpr {
        SmoothExpr::constant(0.0)
    }

    pub fn one() -> SmoothExpr {
        SmoothExpr::constant(1.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            SmoothExpr::Coef(NetExpr::Const(c)) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    /// Flattening, constant-folding sum.
    pub fn sum(terms: Vec<SmoothExpr>) -> SmoothExpr {
        let mut out = Vec::with_capacity(terms.len());
        let mut c = 0.0;
        let mut stack = terms;
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t {
                SmoothExpr::Sum(inner) => stack.extend(inner.into_iter().rev()),
                t => match t.as_const() {
                    Some(v) => c += v,
                    None => out.push(t),
                },
            }
        }
        if c != 0.0 {
            out.push(SmoothExpr::constant(c));
        }
        match out.len() {
            0 => SmoothExpr::zero(),
            1 => out.pop().unwrap(),
            _ => SmoothExpr::Sum(out),
        }
    }

    /// Flattening, constant-folding product; any literal zero factor collapses it.
    pub fn prod(factors: Vec<SmoothExpr>) -> SmoothExpr {
        let mut out = Vec::with_capacity(factors.len());
        let mut c = 1.0;
        let mut stack = factors;
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f {
                SmoothExpr::Prod(inner) => stack.extend(inner.into_iter().rev()),
                f => match f.as_const() {
                    Some(v) => c *= v,
                    None => out.push(f),
                },
            }
        }
        if c == 0.0 {
            return SmoothExpr::zero();
        }
        if c != 1.0 || out.is_empty() {
            out.insert(0, SmoothExpr::constant(c));
        }
        match out.len() {
            1 => out.pop().unwrap(),
            _ => SmoothExpr::Prod(out),
        }
    }

    pub fn powi(base: SmoothExpr, n: i32) -> SmoothExpr {
        match (n, base) {
            (0, _) => SmoothExpr::one(),
            (1, b) => b,
            (n, b) if b.as_const().is_some() && n > 0 => {
                SmoothExpr::constant(b.as_const().unwrap().powi(n))
            }
            (n, SmoothExpr::Powi(inner, m)) => SmoothExpr::Powi(inner, n * m),
            (n, b) => SmoothExpr::Powi(Box::new(b), n),
        }
    }

    pub fn apply(p: Prim, arg: SmoothExpr) -> SmoothExpr {
        SmoothExpr::Apply(p, Box::new(arg))
    }

    pub fn sin(a: SmoothExpr) -> SmoothExpr {
        Self::apply(Prim::Sin, a)
    }
    pub fn cos(a: SmoothExpr) -> SmoothExpr {
        Self::apply(Prim::Cos, a)
    }
    pub fn exp(a: SmoothExpr) -> SmoothExpr {
        Self::apply(Prim::Exp, a)
    }
    pub fn log(a: SmoothExpr) -> SmoothExpr {
        Self::apply(Prim::Log, a)
    }
    pub fn tanh(a: SmoothExpr) -> SmoothExpr {
        Self::apply(Prim::Tanh, a)
    }
    pub fn sqrt(a: SmoothExpr) -> SmoothExpr {
        Self::apply(Prim::Sqrt, a)
    }
    pub fn step(a: SmoothExpr) -> SmoothExpr {
        Self::apply(Prim::Step(0), a)
    }

    pub fn add(self, o: SmoothExpr) -> SmoothExpr {
        SmoothExpr::sum(vec![self, o])
    }
    pub fn sub(self, o: SmoothExpr) -> SmoothExpr {
        SmoothExpr::sum(vec![self, o.neg()])
    }
    pub fn mul(self, o: SmoothExpr) -> SmoothExpr {
        SmoothExpr::prod(vec![self, o])
    }
    pub fn neg(self) -> SmoothExpr {
        SmoothExpr::prod(vec![SmoothExpr::constant(-1.0), self])
    }

    /// Number of spatial variables referenced (one past the largest index).
    pub fn arity(&self) -> usize {
        match self {
            SmoothExpr::Var(i) => i + 1,
            SmoothExpr::Coef(_) => 0,
            SmoothExpr::Sum(xs) | SmoothExpr::Prod(xs) => {
                xs.iter().map(SmoothExpr::arity).max().unwrap_or(0)
            }
            SmoothExpr::Powi(b, _) | SmoothExpr::Apply(_, b) => b.arity(),
        }
    }

    pub fn eval(&self, eps: f64, x: &[f64]) -> Result<f64> {
        Ok(match self {
            SmoothExpr::Var(i) => *x.get(*i).ok_or(Error::Dimension {
                expected: i + 1,
                got: x.len(),
            })?,
            SmoothExpr::Coef(n) => n.eval(eps)?,
            SmoothExpr::Sum(xs) => {
                let mut acc = 0.0;
                for t in xs {
                    acc += t.eval(eps, x)?;
                }
                acc
            }
            SmoothExpr::Prod(xs) => {
                // A factor that is exactly zero annihilates the product even
                // when another factor overflowed.
                let mut acc = 1.0;
                let mut zero = false;
                for f in xs {
                    let v = f.eval(eps, x)?;
                    zero |= v == 0.0;
                    acc *= v;
                }
                if zero {
                    0.0
                } else {
                    acc
                }
            }
            SmoothExpr::Powi(b, n) => {
                let v = b.eval(eps, x)?;
                if v == 0.0 && *n < 0 {
                    return Err(domain(eps, "negative power of zero", self));
                }
                v.powi(*n)
            }
            SmoothExpr::Apply(p, a) => p.apply_f64(a.eval(eps, x)?, eps, self)?,
        })
    }

    /// Log-magnitude evaluation with log-magnitude arguments.
    pub fn eval_log(&self, eps: f64, x: &[LogMag]) -> Result<LogMag> {
        Ok(match self {
            SmoothExpr::Var(i) => *x.get(*i).ok_or(Error::Dimension {
                expected: i + 1,
                got: x.len(),
            })?,
            SmoothExpr::Coef(n) => n.eval_log(eps)?,
            SmoothExpr::Sum(xs) => {
                let terms = xs
                    .iter()
                    .map(|t| t.eval_log(eps, x))
                    .collect::<Result<Vec<_>>>()?;
                LogMag::sum(&terms)
            }
            SmoothExpr::Prod(xs) => {
                let mut acc = LogMag::ONE;
                for f in xs {
                    acc = acc.mul(f.eval_log(eps, x)?);
                }
                acc
            }
            SmoothExpr::Powi(b, n) => b
                .eval_log(eps, x)?
                .powi(*n)
                .ok_or_else(|| domain(eps, "negative power of zero", self))?,
            SmoothExpr::Apply(p, a) => {
                let v = a.eval_log(eps, x)?;
                match p {
                    Prim::Exp => LogMag::positive(v.to_f64()),
                    Prim::Log => {
                        if v.sign <= 0.0 {
                            return Err(domain(eps, "log of a non-positive value", self));
                        }
                        LogMag::from_f64(v.ln_abs)
                    }
                    Prim::Sqrt => {
                        if v.sign < 0.0 {
                            return Err(domain(eps, "sqrt of a negative value", self));
                        }
                        if v.is_zero() {
                            LogMag::ZERO
                        } else {
                            LogMag::positive(v.ln_abs / 2.0)
                        }
                    }
                    _ => LogMag::from_f64(p.apply_f64(v.to_f64(), eps, self)?),
                }
            }
        })
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> SmoothExpr {
        match self {
            SmoothExpr::Var(j) => {
                if *j == i {
                    SmoothExpr::one()
                } else {
                    SmoothExpr::zero()
                }
            }
            SmoothExpr::Coef(_) => SmoothExpr::zero(),
            SmoothExpr::Sum(xs) => SmoothExpr::sum(xs.iter().map(|t| t.diff(i)).collect()),
            SmoothExpr::Prod(xs) => {
                let mut terms = Vec::new();
                for (k, f) in xs.iter().enumerate() {
                    let df = f.diff(i);
                    if df.is_zero() {
                        continue;
                    }
                    let mut factors: Vec<SmoothExpr> = xs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .map(|(_, g)| g.clone())
                        .collect();
                    factors.push(df);
                    terms.push(SmoothExpr::prod(factors));
                }
                SmoothExpr::sum(terms)
            }
            SmoothExpr::Powi(b, n) => {
                let db = b.diff(i);
                if db.is_zero() {
                    return SmoothExpr::zero();
                }
                SmoothExpr::prod(vec![
                    SmoothExpr::constant(*n as f64),
                    SmoothExpr::powi((**b).clone(), n - 1),
                    db,
                ])
            }
            SmoothExpr::Apply(p, a) => {
                let da = a.diff(i);
                if da.is_zero() {
                    return SmoothExpr::zero();
                }
                let a = (**a).clone();
                let outer = match p {
                    Prim::Sin => SmoothExpr::cos(a),
                    Prim::Cos => SmoothExpr::sin(a).neg(),
                    Prim::Exp => SmoothExpr::exp(a),
                    Prim::Log => SmoothExpr::powi(a, -1),
                    Prim::Tanh => SmoothExpr::one().sub(SmoothExpr::powi(SmoothExpr::tanh(a), 2)),
                    Prim::Sqrt => SmoothExpr::prod(vec![
                        SmoothExpr::constant(0.5),
                        SmoothExpr::powi(SmoothExpr::sqrt(a), -1),
                    ]),
                    Prim::Step(k) => SmoothExpr::apply(Prim::Step(k + 1), a),
                };
                SmoothExpr::prod(vec![outer, da])
            }
        }
    }

    /// `∂^alpha` for a multi-index `alpha` (entry `i` = order in `x_{i+1}`).
    pub fn diff_multi(&self, alpha: &[usize]) -> SmoothExpr {
        let mut out = self.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                out = out.diff(i);
            }
        }
        out
    }

    /// Replaces `x_{i+1}` by `subs[i]`.
    pub fn substitute(&self, subs: &[SmoothExpr]) -> SmoothExpr {
        match self {
            SmoothExpr::Var(i) => subs.get(*i).cloned().unwrap_or(SmoothExpr::Var(*i)),
            SmoothExpr::Coef(_) => self.clone(),
            SmoothExpr::Sum(xs) => {
                SmoothExpr::sum(xs.iter().map(|t| t.substitute(subs)).collect())
            }
            SmoothExpr::Prod(xs) => {
                SmoothExpr::prod(xs.iter().map(|t| t.substitute(subs)).collect())
            }
            SmoothExpr::Powi(b, n) => SmoothExpr::powi(b.substitute(subs), *n),
            SmoothExpr::Apply(p, a) => SmoothExpr::apply(*p, a.substitute(subs)),
        }
    }

    pub fn collect_index_sets(&self, out: &mut Vec<IndexSet>) {
        match self {
            SmoothExpr::Var(_) => {}
            SmoothExpr::Coef(n) => n.collect_index_sets(out),
            SmoothExpr::Sum(xs) | SmoothExpr::Prod(xs) => {
                xs.iter().for_each(|t| t.collect_index_sets(out))
            }
            SmoothExpr::Powi(b, _) | SmoothExpr::Apply(_, b) => b.collect_index_sets(out),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match self {
            SmoothExpr::Var(_) | SmoothExpr::Coef(_) => 0,
            SmoothExpr::Sum(xs) | SmoothExpr::Prod(xs) => {
                xs.iter().map(SmoothExpr::node_count).sum()
            }
            SmoothExpr::Powi(b, _) | SmoothExpr::Apply(_, b) => b.node_count(),
        }
    }

    pub fn to_sexp(&self) -> Sexp {
        match self {
            SmoothExpr::Var(i) => Sexp::atom(format!("x{}", i + 1)),
            SmoothExpr::Coef(NetExpr::Const(c)) => Sexp::num(*c),
            SmoothExpr::Coef(n) => Sexp::tagged("coef", vec![n.to_sexp()]),
            SmoothExpr::Sum(xs) => Sexp::tagged("sum", xs.iter().map(Self::to_sexp).collect()),
            SmoothExpr::Prod(xs) => Sexp::tagged("prod", xs.iter().map(Self::to_sexp).collect()),
            SmoothExpr::Powi(b, n) => {
                Sexp::tagged("powi", vec![b.to_sexp(), Sexp::atom(n.to_string())])
            }
            SmoothExpr::Apply(p, a) => Sexp::tagged(&p.name(), vec![a.to_sexp()]),
        }
    }

    pub fn from_sexp(s: &Sexp) -> Result<SmoothExpr> {
        if let Some(a) = s.as_atom() {
            if let Some(idx) = a.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                if idx == 0 {
                    return Err(s.err("variables are numbered from x1"));
                }
                return Ok(SmoothExpr::Var(idx - 1));
            }
            return Ok(SmoothExpr::Coef(NetExpr::Const(s.expect_f64()?)));
        }
        let head = s.head().ok_or_else(|| s.err("expected a smooth expression"))?;
        let rest = &s.expect_list()?[1..];
        Ok(match head {
            "coef" => SmoothExpr::Coef(NetExpr::from_sexp(&s.args("coef", 1)?[0])?),
            "sum" | "prod" => {
                if rest.is_empty() {
                    return Err(s.err(format!("`{head}` needs at least one argument")));
                }
                let xs = rest
                    .iter()
                    .map(SmoothExpr::from_sexp)
                    .collect::<Result<Vec<_>>>()?;
                if head == "sum" {
                    SmoothExpr::Sum(xs)
                } else {
                    SmoothExpr::Prod(xs)
                }
            }
            "powi" => {
                let a = s.args("powi", 2)?;
                let n = a[1].expect_i64()?;
                let n = i32::try_from(n).map_err(|_| a[1].err("exponent out of range"))?;
                SmoothExpr::Powi(Box::new(SmoothExpr::from_sexp(&a[0])?), n)
            }
            name => {
                let p = Prim::from_name(name)
                    .ok_or_else(|| s.err(format!("unknown smooth operator `{name}`")))?;
                let a = s.args(name, 1)?;
                SmoothExpr::Apply(p, Box::new(SmoothExpr::from_sexp(&a[0])?))
            }
        })
    }
}

impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_one;

    fn parse(s: &str) -> SmoothExpr {
        SmoothExpr::from_sexp(&parse_one(s).unwrap()).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let sq = parse("(powi x1 2)");
        let d = sq.diff(0);
        assert_eq!(d.eval(0.1, &[3.0]).unwrap(), 6.0);

        // d/dx sin(c x) = c cos(c x) with c = 1/eps.
        let f = parse("(sin (prod (coef (epspow -1)) x1))");
        let df = f.diff(0);
        let (eps, x) = (0.25f64, 0.3f64);
        let want = (1.0 / eps) * (x / eps).cos();
        assert!((df.eval(eps, &[x]).unwrap() - want).abs() < 1e-12);

        let affine = parse("(sum (prod 3 x1) (coef (epspow 2)))");
        assert!(affine.diff(0).diff(0).is_zero());
    }

    #[test]
    fn domain_guards() {
        assert!(parse("(log x1)").eval(0.1, &[-1.0]).is_err());
        assert!(parse("(sqrt x1)").eval(0.1, &[-1.0]).is_err());
        assert!(parse("(powi x1 -1)").eval(0.1, &[0.0]).is_err());
        assert!(parse("(sqrt x1)").eval(0.1, &[0.0]).is_ok());
    }

    #[test]
    fn log_eval_agrees_and_survives_overflow() {
        let f = parse("(prod (exp x1) (powi x1 3))");
        let direct = f.eval(0.1, &[2.0]).unwrap();
        let logged = f.eval_log(0.1, &[LogMag::from_f64(2.0)]).unwrap();
        assert!((direct.ln() - logged.ln_abs).abs() < 1e-12);
        let huge = f.eval_log(0.1, &[LogMag::from_f64(1e6)]).unwrap();
        assert!((huge.ln_abs - (1e6 + 3.0 * 1e6f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn zero_factor_annihilates_overflow() {
        let f = SmoothExpr::prod(vec![
            SmoothExpr::apply(Prim::Step(1), SmoothExpr::var(0)),
            SmoothExpr::Coef(NetExpr::ExpInvEps),
        ]);
        assert_eq!(f.eval(1e-4, &[2.0]).unwrap(), 0.0);
    }

    #[test]
    fn substitution_composes() {
        let g = parse("(sin x1)");
        let f = parse("(prod 2 x1)");
        let h = g.substitute(&[f]);
        assert!((h.eval(0.1, &[0.25]).unwrap() - 0.5f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let src = "(sum (prod (coef (epspow -1)) (exp (powi x1 2))) 3 (step2 x2))";
        let e = parse(src);
        assert_eq!(e.to_string(), src);
    }
}
