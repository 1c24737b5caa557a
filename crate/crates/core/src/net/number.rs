use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use crate::asymptotics::canonical::Canonical;
use crate::error::{Error, Result};
use crate::net::expr::NetExpr;
use crate::net::index::IndexSet;
use crate::sexpr::Sexp;
use crate::smooth::SmoothExpr;

/// A generalized number (or point of `R~^n`) given by a representative net.
///
/// The intended semantics is the class modulo negligible nets: compare with
/// [`crate::asymptotics::eq_in_ring`], never with `==` on the trees. The
/// grid-independent canonical normal form of each component is cached.
#[derive(Clone)]
pub struct GenNumber {
    comps: Vec<NetExpr>,
    canon: Arc<OnceLock<Vec<Option<Canonical>>>>,
}

impl GenNumber {
    pub fn vector(comps: Vec<NetExpr>) -> GenNumber {
        assert!(!comps.is_empty(), "generalized points need at least one component");
        GenNumber {
            comps,
            canon: Arc::new(OnceLock::new()),
        }
    }

    pub fn scalar(net: NetExpr) -> GenNumber {
        GenNumber::vector(vec![net])
    }

    /// The standard real `c`.
    pub fn real(c: f64) -> GenNumber {
        GenNumber::scalar(NetExpr::Const(c))
    }

    /// `[eps^a]`
    pub fn eps_pow(a: f64) -> GenNumber {
        GenNumber::scalar(NetExpr::EpsPow(a))
    }

    /// `[c * eps^a]`
    pub fn monomial(c: f64, a: f64) -> GenNumber {
        GenNumber::scalar(NetExpr::monomial(c, a))
    }

    pub fn reals(xs: &[f64]) -> GenNumber {
        GenNumber::vector(xs.iter().map(|&c| NetExpr::Const(c)).collect())
    }

    pub fn zeros(dim: usize) -> GenNumber {
        GenNumber::vector(vec![NetExpr::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[NetExpr] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &NetExpr {
        &self.comps[i]
    }

    /// The only component of a scalar.
    pub fn as_scalar(&self) -> Result<&NetExpr> {
        if self.dim() == 1 {
            Ok(&self.comps[0])
        } else {
            Err(Error::Dimension {
                expected: 1,
                got: self.dim(),
            })
        }
    }

    pub fn check_dim(&self, other: &GenNumber) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            })
        }
    }

    /// Canonical forms of the components (cached; `None` where a component
    /// does not normalise).
    pub fn canonical(&self) -> &[Option<Canonical>] {
        self.canon
            .get_or_init(|| self.comps.iter().map(Canonical::of).collect())
    }

    pub fn eval(&self, eps: f64) -> Result<Vec<f64>> {
        self.comps.iter().map(|c| c.eval(eps)).collect()
    }

    /// Euclidean norm net `|x|`: `abs` in dimension one, `sqrt(sum x_i^2)` otherwise.
    pub fn norm_net(&self) -> NetExpr {
        if self.dim() == 1 {
            return self.comps[0].clone().abs();
        }
        let squares = self
            .comps
            .iter()
            .map(|c| NetExpr::Prod(vec![c.clone(), c.clone()]))
            .collect();
        NetExpr::apply(SmoothExpr::sqrt(SmoothExpr::var(0)), vec![NetExpr::Sum(squares)])
    }

    pub fn norm(&self) -> GenNumber {
        GenNumber::scalar(self.norm_net())
    }

    pub fn abs(&self) -> GenNumber {
        self.map(|c| c.clone().abs())
    }

    pub fn recip(&self) -> GenNumber {
        self.map(|c| c.clone().recip())
    }

    /// Scalar multiple `k * x` for a standard real `k`.
    pub fn scale(&self, k: f64) -> GenNumber {
        self.map(|c| NetExpr::Prod(vec![NetExpr::Const(k), c.clone()]))
    }

    /// Multiplies every component by the scalar `s`.
    pub fn scale_by(&self, s: &GenNumber) -> Result<GenNumber> {
        let k = s.as_scalar()?;
        Ok(self.map(|c| NetExpr::Prod(vec![k.clone(), c.clone()])))
    }

    /// Pointwise minimum (scalars) / componentwise minimum.
    pub fn wedge(&self, other: &GenNumber) -> Result<GenNumber> {
        self.zip(other, |a, b| a.clone().min(b.clone()))
    }

    /// Pointwise maximum.
    pub fn vee(&self, other: &GenNumber) -> Result<GenNumber> {
        self.zip(other, |a, b| a.clone().max(b.clone()))
    }

    pub fn map(&self, f: impl Fn(&NetExpr) -> NetExpr) -> GenNumber {
        GenNumber::vector(self.comps.iter().map(f).collect())
    }

    pub fn zip(
        &self,
        other: &GenNumber,
        f: impl Fn(&NetExpr, &NetExpr) -> NetExpr,
    ) -> Result<GenNumber> {
        self.check_dim(other)?;
        Ok(GenNumber::vector(
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| f(a, b))
                .collect(),
        ))
    }

    pub fn collect_index_sets(&self, out: &mut Vec<IndexSet>) {
        self.comps.iter().for_each(|c| c.collect_index_sets(out));
    }

    /// Scalars print as the bare net, vectors as `(vec ...)`.
    pub fn to_sexp(&self) -> Sexp {
        if self.dim() == 1 {
            self.comps[0].to_sexp()
        } else {
            Sexp::tagged("vec", self.comps.iter().map(NetExpr::to_sexp).collect())
        }
    }

    pub fn from_sexp(s: &Sexp) -> Result<GenNumber> {
        if s.head() == Some("vec") {
            let items = &s.expect_list()?[1..];
            if items.is_empty() {
                return Err(s.err("`vec` needs at least one component"));
            }
            Ok(GenNumber::vector(
                items.iter().map(NetExpr::from_sexp).collect::<Result<_>>()?,
            ))
        } else {
            Ok(GenNumber::scalar(NetExpr::from_sexp(s)?))
        }
    }
}

impl PartialEq for GenNumber {
    /// Structural (tree) identity; see the type docs for ring equality.
    fn eq(&self, other: &Self) -> bool {
        self.comps == other.comps
    }
}

impl fmt::Debug for GenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GenNumber{}", self.to_sexp())
    }
}

impl fmt::Display for GenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

impl From<NetExpr> for GenNumber {
    fn from(net: NetExpr) -> Self {
        GenNumber::scalar(net)
    }
}

fn zip_or_panic(
    a: &GenNumber,
    b: &GenNumber,
    f: impl Fn(&NetExpr, &NetExpr) -> NetExpr,
) -> GenNumber {
    a.zip(b, f)
        .unwrap_or_else(|e| panic!("arithmetic on generalized points: {e}"))
}

impl Add for &GenNumber {
    type Output = GenNumber;
    fn add(self, rhs: &GenNumber) -> GenNumber {
        zip_or_panic(self, rhs, |a, b| a.clone().add(b.clone()))
    }
}

impl Sub for &GenNumber {
    type Output = GenNumber;
    fn sub(self, rhs: &GenNumber) -> GenNumber {
        zip_or_panic(self, rhs, |a, b| a.clone().sub(b.clone()))
    }
}

impl Mul for &GenNumber {
    type Output = GenNumber;
    /// Componentwise product; a scalar on either side broadcasts.
    fn mul(self, rhs: &GenNumber) -> GenNumber {
        if self.dim() == 1 && rhs.dim() != 1 {
            return rhs.map(|c| self.comps[0].clone().mul(c.clone()));
        }
        if rhs.dim() == 1 && self.dim() != 1 {
            return self.map(|c| c.clone().mul(rhs.comps[0].clone()));
        }
        zip_or_panic(self, rhs, |a, b| a.clone().mul(b.clone()))
    }
}

impl Neg for &GenNumber {
    type Output = GenNumber;
    fn neg(self) -> GenNumber {
        self.map(|c| c.clone().neg())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GenNumber {
            type Output = GenNumber;
            fn $m(self, rhs: GenNumber) -> GenNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GenNumber {
    type Output = GenNumber;
    fn neg(self) -> GenNumber {
        -&self
    }
}
