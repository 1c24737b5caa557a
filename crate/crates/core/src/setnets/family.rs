use std::fmt;

use crate::error::{Error, Result};
use crate::logmag::LogMag;
use crate::net::{GenNumber, IndexSet, NetExpr};
use crate::setnets::hull;
use crate::sexpr::Sexp;

/// Symbolic stand-in for the distance to an empty complement.
pub const HUGE: f64 = 1e300;

/// A net of subsets `A_eps` of `R^n` given by a signed-distance oracle,
/// positive inside.
#[derive(Debug, Clone, PartialEq)]
pub enum SetExpr {
    /// Open ball.
    Ball { center: GenNumber, radius: NetExpr },
    /// Axis-aligned box; `closed` only affects printing, since every
    /// oracle here is distance based.
    Box {
        lo: GenNumber,
        hi: GenNumber,
        closed: bool,
    },
    /// `{x : n . x < offset}`.
    HalfSpace { normal: GenNumber, offset: NetExpr },
    FinitePoints(Vec<GenNumber>),
    /// `R^n` minus finitely many points.
    Punctured(Vec<GenNumber>),
    /// A set that does not depend on `eps` (checked at construction).
    Constant(std::boxed::Box<SetExpr>),
    Whole(usize),
    Empty(usize),
    Complement(std::boxed::Box<SetExpr>),
    Union(Vec<SetExpr>),
    Intersection(Vec<SetExpr>),
    /// `{x : d(x, A^c) >= eps^m}`.
    Erode(std::boxed::Box<SetExpr>, u32),
    /// `{x : d(x, A) < eps^m}`.
    Dilate(std::boxed::Box<SetExpr>, u32),
    /// Per-eps convex hull of finitely many points (dimension at most 2).
    Hull(Vec<GenNumber>),
}

fn is_constant_net(n: &NetExpr) -> bool {
    match n {
        NetExpr::Const(_) => true,
        NetExpr::EpsPow(a) => *a == 0.0,
        NetExpr::ExpInvEps | NetExpr::Mask(..) | NetExpr::Apply(..) => false,
        NetExpr::Sum(xs) | NetExpr::Prod(xs) => xs.iter().all(is_constant_net),
        NetExpr::Neg(x) | NetExpr::Abs(x) | NetExpr::Recip(x) => is_constant_net(x),
        NetExpr::Min(a, b) | NetExpr::Max(a, b) => is_constant_net(a) && is_constant_net(b),
    }
}

fn constant_point(p: &GenNumber) -> bool {
    p.components().iter().all(is_constant_net)
}

fn eval_point(p: &GenNumber, eps: f64) -> Result<Vec<f64>> {
    p.eval(eps)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn same_dim(points: &[GenNumber]) -> Result<usize> {
    let d = points
        .first()
        .ok_or_else(|| Error::Precondition("point list is empty".into()))?
        .dim();
    for p in points {
        if p.dim() != d {
            return Err(Error::Dimension {
                expected: d,
                got: p.dim(),
            });
        }
    }
    Ok(d)
}

impl SetExpr {
    pub fn ball(center: GenNumber, radius: NetExpr) -> SetExpr {
        SetExpr::Ball { center, radius }
    }

    pub fn interval(lo: NetExpr, hi: NetExpr) -> SetExpr {
        SetExpr::Box {
            lo: GenNumber::scalar(lo),
            hi: GenNumber::scalar(hi),
            closed: false,
        }
    }

    pub fn closed_interval(lo: NetExpr, hi: NetExpr) -> SetExpr {
        SetExpr::Box {
            lo: GenNumber::scalar(lo),
            hi: GenNumber::scalar(hi),
            closed: true,
        }
    }

    pub fn boxed(lo: GenNumber, hi: GenNumber) -> Result<SetExpr> {
        lo.check_dim(&hi)?;
        Ok(SetExpr::Box {
            lo,
            hi,
            closed: false,
        })
    }

    pub fn constant(inner: SetExpr) -> Result<SetExpr> {
        if !inner.is_eps_free() {
            return Err(Error::Precondition(
                "constant set family depends on eps".into(),
            ));
        }
        Ok(SetExpr::Constant(std::boxed::Box::new(inner)))
    }

    /// Complement; a double complement collapses.
    pub fn complement(self) -> SetExpr {
        match self {
            SetExpr::Complement(inner) => *inner,
            other => SetExpr::Complement(std::boxed::Box::new(other)),
        }
    }

    pub fn union(parts: Vec<SetExpr>) -> SetExpr {
        SetExpr::Union(parts)
    }

    pub fn intersection(parts: Vec<SetExpr>) -> SetExpr {
        SetExpr::Intersection(parts)
    }

    pub fn erode(self, m: u32) -> SetExpr {
        SetExpr::Erode(std::boxed::Box::new(self), m)
    }

    pub fn dilate(self, m: u32) -> SetExpr {
        SetExpr::Dilate(std::boxed::Box::new(self), m)
    }

    pub fn dim(&self) -> usize {
        match self {
            SetExpr::Ball { center, .. } => center.dim(),
            SetExpr::Box { lo, .. } => lo.dim(),
            SetExpr::HalfSpace { normal, .. } => normal.dim(),
            SetExpr::FinitePoints(ps) | SetExpr::Punctured(ps) | SetExpr::Hull(ps) => {
                ps.first().map_or(1, GenNumber::dim)
            }
            SetExpr::Whole(d) | SetExpr::Empty(d) => *d,
            SetExpr::Constant(a)
            | SetExpr::Complement(a)
            | SetExpr::Erode(a, _)
            | SetExpr::Dilate(a, _) => a.dim(),
            SetExpr::Union(xs) | SetExpr::Intersection(xs) => xs.first().map_or(1, SetExpr::dim),
        }
    }

    /// Structural checks: consistent dimensions, non-empty lists, hull dimension.
    pub fn validate(&self) -> Result<()> {
        match self {
            SetExpr::Ball { .. } => Ok(()),
            SetExpr::Box { lo, hi, .. } => lo.check_dim(hi),
            SetExpr::HalfSpace { .. } => Ok(()),
            SetExpr::FinitePoints(ps) | SetExpr::Punctured(ps) => same_dim(ps).map(|_| ()),
            SetExpr::Hull(ps) => {
                let d = same_dim(ps)?;
                if d > 2 {
                    return Err(Error::Unsupported(format!("convex hulls in dimension {d}")));
                }
                Ok(())
            }
            SetExpr::Whole(_) | SetExpr::Empty(_) => Ok(()),
            SetExpr::Constant(a) => {
                if !a.is_eps_free() {
                    return Err(Error::Precondition("constant set family depends on eps".into()));
                }
                a.validate()
            }
            SetExpr::Complement(a) | SetExpr::Erode(a, _) | SetExpr::Dilate(a, _) => a.validate(),
            SetExpr::Union(xs) | SetExpr::Intersection(xs) => {
                let d = xs
                    .first()
                    .ok_or_else(|| Error::Precondition("empty set combination".into()))?
                    .dim();
                for x in xs {
                    x.validate()?;
                    if x.dim() != d {
                        return Err(Error::Dimension {
                            expected: d,
                            got: x.dim(),
                        });
                    }
                }
                Ok(())
            }
        }
    }

    fn is_eps_free(&self) -> bool {
        match self {
            SetExpr::Ball { center, radius } => constant_point(center) && is_constant_net(radius),
            SetExpr::Box { lo, hi, .. } => constant_point(lo) && constant_point(hi),
            SetExpr::HalfSpace { normal, offset } => {
                constant_point(normal) && is_constant_net(offset)
            }
            SetExpr::FinitePoints(ps) | SetExpr::Punctured(ps) | SetExpr::Hull(ps) => {
                ps.iter().all(constant_point)
            }
            SetExpr::Whole(_) | SetExpr::Empty(_) => true,
            SetExpr::Constant(_) => true,
            SetExpr::Complement(a) => a.is_eps_free(),
            SetExpr::Erode(..) | SetExpr::Dilate(..) => false,
            SetExpr::Union(xs) | SetExpr::Intersection(xs) => xs.iter().all(SetExpr::is_eps_free),
        }
    }

    /// Whether the sdf magnitude is the true boundary distance.
    pub fn is_exact(&self) -> bool {
        match self {
            SetExpr::Union(xs) | SetExpr::Intersection(xs) => xs.len() <= 1 && xs.iter().all(SetExpr::is_exact),
            SetExpr::Constant(a)
            | SetExpr::Complement(a)
            | SetExpr::Erode(a, _)
            | SetExpr::Dilate(a, _) => a.is_exact(),
            _ => true,
        }
    }

    /// Signed distance at `eps`: positive inside `A_eps`.
    pub fn sdf(&self, eps: f64, p: &[f64]) -> Result<f64> {
        if p.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(match self {
            SetExpr::Ball { center, radius } => {
                radius.eval(eps)? - dist(&eval_point(center, eps)?, p)
            }
            SetExpr::Box { lo, hi, .. } => {
                let (lo, hi) = (lo.eval(eps)?, hi.eval(eps)?);
                box_sdf(&lo, &hi, p)
            }
            SetExpr::HalfSpace { normal, offset } => {
                let n = normal.eval(eps)?;
                let len = n.iter().map(|v| v * v).sum::<f64>().sqrt();
                if len == 0.0 {
                    return Err(Error::Domain {
                        eps,
                        what: "zero half-space normal",
                        node: normal.to_string(),
                    });
                }
                (offset.eval(eps)? - n.iter().zip(p).map(|(a, b)| a * b).sum::<f64>()) / len
            }
            SetExpr::FinitePoints(ps) => -min_dist(ps, eps, p)?,
            SetExpr::Punctured(ps) => min_dist(ps, eps, p)?,
            SetExpr::Constant(a) => a.sdf(eps, p)?,
            SetExpr::Whole(_) => f64::INFINITY,
            SetExpr::Empty(_) => f64::NEG_INFINITY,
            SetExpr::Complement(a) => -a.sdf(eps, p)?,
            SetExpr::Union(xs) => {
                let mut m = f64::NEG_INFINITY;
                for x in xs {
                    m = m.max(x.sdf(eps, p)?);
                }
                m
            }
            SetExpr::Intersection(xs) => {
                let mut m = f64::INFINITY;
                for x in xs {
                    m = m.min(x.sdf(eps, p)?);
                }
                m
            }
            SetExpr::Erode(a, m) => a.sdf(eps, p)? - eps.powi(*m as i32),
            SetExpr::Dilate(a, m) => a.sdf(eps, p)? + eps.powi(*m as i32),
            SetExpr::Hull(ps) => {
                let pts = ps.iter().map(|q| q.eval(eps)).collect::<Result<Vec<_>>>()?;
                hull::hull_sdf(&pts, p)
            }
        })
    }

    /// `sdf(x_eps)` as a net, when expressible; `None` for 2D hulls.
    pub fn sdf_net(&self, x: &GenNumber) -> Result<Option<NetExpr>> {
        if x.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let min_chain = |xs: Vec<NetExpr>| xs.into_iter().reduce(|a, b| a.min(b));
        let max_chain = |xs: Vec<NetExpr>| xs.into_iter().reduce(|a, b| a.max(b));
        Ok(Some(match self {
            SetExpr::Ball { center, radius } => radius.clone().sub((x - center).norm_net()),
            SetExpr::Box { lo, hi, .. } => {
                let d = x.dim();
                let mut inner = Vec::with_capacity(2 * d);
                let mut outer = Vec::with_capacity(d);
                for i in 0..d {
                    let below = x.component(i).clone().sub(lo.component(i).clone());
                    let above = hi.component(i).clone().sub(x.component(i).clone());
                    if d == 1 {
                        return Ok(Some(below.min(above)));
                    }
                    let gap = below.clone().neg().max(above.clone().neg()).max(NetExpr::zero());
                    outer.push(gap);
                    inner.push(below);
                    inner.push(above);
                }
                let inside = min_chain(inner).unwrap().max(NetExpr::zero());
                let outside = GenNumber::vector(outer).norm_net();
                inside.sub(outside)
            }
            SetExpr::HalfSpace { normal, offset } => {
                let dot = NetExpr::Sum(
                    (0..x.dim())
                        .map(|i| normal.component(i).clone().mul(x.component(i).clone()))
                        .collect(),
                );
                offset.clone().sub(dot).mul(normal.norm_net().recip())
            }
            SetExpr::FinitePoints(ps) => {
                min_chain(ps.iter().map(|p| (x - p).norm_net()).collect()).unwrap().neg()
            }
            SetExpr::Punctured(ps) => min_chain(ps.iter().map(|p| (x - p).norm_net()).collect()).unwrap(),
            SetExpr::Constant(a) => return a.sdf_net(x),
            SetExpr::Whole(_) => NetExpr::Const(HUGE),
            SetExpr::Empty(_) => NetExpr::Const(-HUGE),
            SetExpr::Complement(a) => match a.sdf_net(x)? {
                Some(n) => n.neg(),
                None => return Ok(None),
            },
            SetExpr::Union(xs) | SetExpr::Intersection(xs) => {
                let mut parts = Vec::with_capacity(xs.len());
                for s in xs {
                    match s.sdf_net(x)? {
                        Some(n) => parts.push(n),
                        None => return Ok(None),
                    }
                }
                if matches!(self, SetExpr::Union(_)) {
                    max_chain(parts).unwrap()
                } else {
                    min_chain(parts).unwrap()
                }
            }
            SetExpr::Erode(a, m) => match a.sdf_net(x)? {
                Some(n) => n.sub(NetExpr::EpsPow(*m as f64)),
                None => return Ok(None),
            },
            SetExpr::Dilate(a, m) => match a.sdf_net(x)? {
                Some(n) => n.add(NetExpr::EpsPow(*m as f64)),
                None => return Ok(None),
            },
            SetExpr::Hull(ps) => {
                if x.dim() != 1 {
                    return Ok(None);
                }
                let vals: Vec<NetExpr> = ps.iter().map(|p| p.component(0).clone()).collect();
                let lo = min_chain(vals.clone()).unwrap();
                let hi = max_chain(vals).unwrap();
                x.component(0).clone().sub(lo).min(hi.sub(x.component(0).clone()))
            }
        }))
    }

    /// Axis-aligned box containing `A_eps`; `None` when unbounded.
    pub fn bbox(&self, eps: f64) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        Ok(match self {
            SetExpr::Ball { center, radius } => {
                let c = center.eval(eps)?;
                let r = radius.eval(eps)?;
                if !r.is_finite() {
                    return Ok(None);
                }
                let r = r.max(0.0);
                Some((c.iter().map(|v| v - r).collect(), c.iter().map(|v| v + r).collect()))
            }
            SetExpr::Box { lo, hi, .. } => Some((lo.eval(eps)?, hi.eval(eps)?)),
            SetExpr::FinitePoints(ps) | SetExpr::Hull(ps) => {
                let pts = ps.iter().map(|p| p.eval(eps)).collect::<Result<Vec<_>>>()?;
                let d = pts[0].len();
                let lo = (0..d).map(|i| pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
                let hi = (0..d)
                    .map(|i| pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max))
                    .collect();
                Some((lo, hi))
            }
            SetExpr::Empty(d) => Some((vec![0.0; *d], vec![0.0; *d])),
            SetExpr::HalfSpace { .. } | SetExpr::Punctured(_) | SetExpr::Whole(_) | SetExpr::Complement(_) => None,
            SetExpr::Constant(a) | SetExpr::Erode(a, _) => a.bbox(eps)?,
            SetExpr::Dilate(a, m) => a.bbox(eps)?.map(|(lo, hi)| {
                let r = eps.powi(*m as i32);
                (lo.iter().map(|v| v - r).collect(), hi.iter().map(|v| v + r).collect())
            }),
            SetExpr::Union(xs) => {
                let mut acc: Option<(Vec<f64>, Vec<f64>)> = None;
                for x in xs {
                    let Some((lo, hi)) = x.bbox(eps)? else {
                        return Ok(None);
                    };
                    acc = Some(match acc {
                        None => (lo, hi),
                        Some((l, h)) => (
                            l.iter().zip(&lo).map(|(a, b)| a.min(*b)).collect(),
                            h.iter().zip(&hi).map(|(a, b)| a.max(*b)).collect(),
                        ),
                    });
                }
                acc
            }
            SetExpr::Intersection(xs) => {
                let mut acc: Option<(Vec<f64>, Vec<f64>)> = None;
                for x in xs {
                    if let Some((lo, hi)) = x.bbox(eps)? {
                        acc = Some(match acc {
                            None => (lo, hi),
                            Some((l, h)) => (
                                l.iter().zip(&lo).map(|(a, b)| a.max(*b)).collect(),
                                h.iter().zip(&hi).map(|(a, b)| a.min(*b)).collect(),
                            ),
                        });
                    }
                }
                acc
            }
        })
    }

    /// `ln sup_{a in A_eps} |a|`, from the primitive geometry; `None` when
    /// unbounded. Computed in the log domain so huge radii do not overflow.
    pub fn log_sup_norm(&self, eps: f64) -> Result<Option<f64>> {
        let norm_log = |p: &GenNumber| -> Result<LogMag> {
            Ok(LogMag::from_f64(p.eval(eps)?.iter().map(|v| v * v).sum::<f64>().sqrt()))
        };
        Ok(match self {
            SetExpr::Ball { center, radius } => {
                let r = radius.eval_log(eps)?;
                if r.sign <= 0.0 {
                    Some(f64::NEG_INFINITY)
                } else {
                    Some(LogMag::sum(&[norm_log(center)?, r]).ln_abs)
                }
            }
            SetExpr::Box { lo, hi, .. } => {
                let (l, h) = (lo.eval(eps)?, hi.eval(eps)?);
                let corner: f64 = l
                    .iter()
                    .zip(&h)
                    .map(|(a, b)| a.abs().max(b.abs()).powi(2))
                    .sum::<f64>()
                    .sqrt();
                Some(corner.ln())
            }
            SetExpr::FinitePoints(ps) | SetExpr::Hull(ps) => {
                let mut m = f64::NEG_INFINITY;
                for p in ps {
                    m = m.max(norm_log(p)?.ln_abs);
                }
                Some(m)
            }
            SetExpr::Empty(_) => Some(f64::NEG_INFINITY),
            SetExpr::HalfSpace { .. } | SetExpr::Punctured(_) | SetExpr::Whole(_) | SetExpr::Complement(_) => None,
            SetExpr::Constant(a) | SetExpr::Erode(a, _) => a.log_sup_norm(eps)?,
            SetExpr::Dilate(a, m) => a
                .log_sup_norm(eps)?
                .map(|l| LogMag::sum(&[LogMag::positive(l), LogMag::positive(*m as f64 * eps.ln())]).ln_abs),
            SetExpr::Union(xs) => {
                let mut m = f64::NEG_INFINITY;
                for x in xs {
                    match x.log_sup_norm(eps)? {
                        Some(l) => m = m.max(l),
                        None => return Ok(None),
                    }
                }
                Some(m)
            }
            SetExpr::Intersection(xs) => {
                let mut m: Option<f64> = None;
                for x in xs {
                    if let Some(l) = x.log_sup_norm(eps)? {
                        m = Some(m.map_or(l, |v: f64| v.min(l)));
                    }
                }
                m
            }
        })
    }

    /// Points on primitive boundaries and primitive witnesses (centres,
    /// listed points), used to bias sampled sups toward where they peak.
    pub fn boundary_samples(&self, eps: f64, per_primitive: usize) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::new();
        self.collect_boundary(eps, per_primitive, &mut out)?;
        Ok(out)
    }

    fn collect_boundary(&self, eps: f64, k: usize, out: &mut Vec<Vec<f64>>) -> Result<()> {
        match self {
            SetExpr::Ball { center, radius } => {
                let c = center.eval(eps)?;
                let r = radius.eval(eps)?;
                out.push(c.clone());
                if r.is_finite() && r > 0.0 {
                    sphere_points(&c, r, k, out);
                }
            }
            SetExpr::Box { lo, hi, .. } => {
                let (l, h) = (lo.eval(eps)?, hi.eval(eps)?);
                box_boundary(&l, &h, k, out);
            }
            SetExpr::HalfSpace { .. } | SetExpr::Whole(_) | SetExpr::Empty(_) => {}
            SetExpr::FinitePoints(ps) | SetExpr::Punctured(ps) => {
                for p in ps {
                    out.push(p.eval(eps)?);
                }
            }
            SetExpr::Hull(ps) => {
                let pts = ps.iter().map(|p| p.eval(eps)).collect::<Result<Vec<_>>>()?;
                hull::hull_boundary(&pts, k, out);
            }
            SetExpr::Constant(a) | SetExpr::Complement(a) => a.collect_boundary(eps, k, out)?,
            SetExpr::Erode(a, m) | SetExpr::Dilate(a, m) => {
                let start = out.len();
                a.collect_boundary(eps, k, out)?;
                // Offset boundary copies: push the child's samples along the
                // sdf gradient by eps^m, estimated by central differences.
                let shift = eps.powi(*m as i32) * if matches!(self, SetExpr::Erode(..)) { 1.0 } else { -1.0 };
                let base: Vec<Vec<f64>> = out[start..].to_vec();
                for p in base {
                    if let Some(g) = a.sdf_gradient(eps, &p)? {
                        out.push(p.iter().zip(&g).map(|(v, gi)| v + shift * gi).collect());
                    }
                }
            }
            SetExpr::Union(xs) | SetExpr::Intersection(xs) => {
                for x in xs {
                    x.collect_boundary(eps, k, out)?;
                }
            }
        }
        Ok(())
    }

    pub(crate) fn sdf_gradient(&self, eps: f64, p: &[f64]) -> Result<Option<Vec<f64>>> {
        let scale = p.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let h = 1e-7 * scale;
        let mut g = Vec::with_capacity(p.len());
        for i in 0..p.len() {
            let mut a = p.to_vec();
            let mut b = p.to_vec();
            a[i] += h;
            b[i] -= h;
            let d = (self.sdf(eps, &a)? - self.sdf(eps, &b)?) / (2.0 * h);
            if !d.is_finite() {
                return Ok(None);
            }
            g.push(d);
        }
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n == 0.0 {
            return Ok(None);
        }
        Ok(Some(g.iter().map(|v| v / n).collect()))
    }

    /// Symbolic sample points of each primitive: centres, box corners and
    /// face midpoints, listed points. Used as default membership catalogs.
    pub fn catalog_points(&self) -> Vec<GenNumber> {
        let mut out = Vec::new();
        self.collect_catalog(&mut out);
        out
    }

    fn collect_catalog(&self, out: &mut Vec<GenNumber>) {
        match self {
            SetExpr::Ball { center, radius } => {
                out.push(center.clone());
                for i in 0..center.dim() {
                    for s in [1.0, -1.0] {
                        let mut comps = center.components().to_vec();
                        comps[i] = comps[i]
                            .clone()
                            .add(NetExpr::Prod(vec![NetExpr::Const(s), radius.clone()]));
                        out.push(GenNumber::vector(comps));
                    }
                }
            }
            SetExpr::Box { lo, hi, .. } => {
                out.push(lo.clone());
                out.push(hi.clone());
                let mid = lo.zip(hi, |a, b| {
                    NetExpr::Prod(vec![NetExpr::Const(0.5), a.clone().add(b.clone())])
                });
                if let Ok(m) = mid {
                    out.push(m);
                }
            }
            SetExpr::FinitePoints(ps) | SetExpr::Punctured(ps) | SetExpr::Hull(ps) => {
                out.extend(ps.iter().cloned())
            }
            SetExpr::HalfSpace { .. } | SetExpr::Whole(_) | SetExpr::Empty(_) => {}
            SetExpr::Constant(a)
            | SetExpr::Complement(a)
            | SetExpr::Erode(a, _)
            | SetExpr::Dilate(a, _) => a.collect_catalog(out),
            SetExpr::Union(xs) | SetExpr::Intersection(xs) => {
                xs.iter().for_each(|x| x.collect_catalog(out))
            }
        }
    }

    pub fn collect_index_sets(&self, out: &mut Vec<IndexSet>) {
        match self {
            SetExpr::Ball { center, radius } => {
                center.collect_index_sets(out);
                radius.collect_index_sets(out);
            }
            SetExpr::Box { lo, hi, .. } => {
                lo.collect_index_sets(out);
                hi.collect_index_sets(out);
            }
            SetExpr::HalfSpace { normal, offset } => {
                normal.collect_index_sets(out);
                offset.collect_index_sets(out);
            }
            SetExpr::FinitePoints(ps) | SetExpr::Punctured(ps) | SetExpr::Hull(ps) => {
                ps.iter().for_each(|p| p.collect_index_sets(out))
            }
            SetExpr::Whole(_) | SetExpr::Empty(_) => {}
            SetExpr::Constant(a)
            | SetExpr::Complement(a)
            | SetExpr::Erode(a, _)
            | SetExpr::Dilate(a, _) => a.collect_index_sets(out),
            SetExpr::Union(xs) | SetExpr::Intersection(xs) => {
                xs.iter().for_each(|x| x.collect_index_sets(out))
            }
        }
    }

    pub fn to_sexp(&self) -> Sexp {
        let pts = |ps: &[GenNumber]| ps.iter().map(GenNumber::to_sexp).collect::<Vec<_>>();
        match self {
            SetExpr::Ball { center, radius } => {
                Sexp::tagged("ball", vec![center.to_sexp(), radius.to_sexp()])
            }
            SetExpr::Box { lo, hi, closed } => Sexp::tagged(
                if *closed { "cbox" } else { "box" },
                vec![lo.to_sexp(), hi.to_sexp()],
            ),
            SetExpr::HalfSpace { normal, offset } => {
                Sexp::tagged("halfspace", vec![normal.to_sexp(), offset.to_sexp()])
            }
            SetExpr::FinitePoints(ps) => Sexp::tagged("points", pts(ps)),
            SetExpr::Punctured(ps) => Sexp::tagged("punctured", pts(ps)),
            SetExpr::Hull(ps) => Sexp::tagged("hull", pts(ps)),
            SetExpr::Constant(a) => Sexp::tagged("constant", vec![a.to_sexp()]),
            SetExpr::Whole(d) => Sexp::tagged("whole", vec![Sexp::atom(d.to_string())]),
            SetExpr::Empty(d) => Sexp::tagged("empty", vec![Sexp::atom(d.to_string())]),
            SetExpr::Complement(a) => Sexp::tagged("complement", vec![a.to_sexp()]),
            SetExpr::Union(xs) => Sexp::tagged("union", xs.iter().map(SetExpr::to_sexp).collect()),
            SetExpr::Intersection(xs) => {
                Sexp::tagged("intersection", xs.iter().map(SetExpr::to_sexp).collect())
            }
            SetExpr::Erode(a, m) => {
                Sexp::tagged("erode", vec![a.to_sexp(), Sexp::atom(m.to_string())])
            }
            SetExpr::Dilate(a, m) => {
                Sexp::tagged("dilate", vec![a.to_sexp(), Sexp::atom(m.to_string())])
            }
        }
    }

    pub fn from_sexp(s: &Sexp) -> Result<SetExpr> {
        let head = s.head().ok_or_else(|| s.err("expected a set family `(kind ...)`"))?;
        let rest = &s.expect_list()?[1..];
        let points = || -> Result<Vec<GenNumber>> {
            if rest.is_empty() {
                return Err(s.err(format!("`{head}` needs at least one point")));
            }
            rest.iter().map(GenNumber::from_sexp).collect()
        };
        let set = match head {
            "ball" => {
                let a = s.args("ball", 2)?;
                SetExpr::Ball {
                    center: GenNumber::from_sexp(&a[0])?,
                    radius: NetExpr::from_sexp(&a[1])?,
                }
            }
            "box" | "cbox" => {
                let a = s.args(head, 2)?;
                SetExpr::Box {
                    lo: GenNumber::from_sexp(&a[0])?,
                    hi: GenNumber::from_sexp(&a[1])?,
                    closed: head == "cbox",
                }
            }
            "halfspace" => {
                let a = s.args("halfspace", 2)?;
                SetExpr::HalfSpace {
                    normal: GenNumber::from_sexp(&a[0])?,
                    offset: NetExpr::from_sexp(&a[1])?,
                }
            }
            "points" => SetExpr::FinitePoints(points()?),
            "punctured" => SetExpr::Punctured(points()?),
            "hull" => SetExpr::Hull(points()?),
            "constant" => SetExpr::Constant(std::boxed::Box::new(SetExpr::from_sexp(
                &s.args("constant", 1)?[0],
            )?)),
            "whole" => SetExpr::Whole(s.args("whole", 1)?[0].expect_usize()?),
            "empty" => SetExpr::Empty(s.args("empty", 1)?[0].expect_usize()?),
            "complement" => SetExpr::from_sexp(&s.args("complement", 1)?[0])?.complement(),
            "union" | "intersection" => {
                if rest.is_empty() {
                    return Err(s.err(format!("`{head}` needs at least one set")));
                }
                let xs = rest.iter().map(SetExpr::from_sexp).collect::<Result<Vec<_>>>()?;
                if head == "union" {
                    SetExpr::Union(xs)
                } else {
                    SetExpr::Intersection(xs)
                }
            }
            "erode" | "dilate" => {
                let a = s.args(head, 2)?;
                let m = a[1].expect_usize()?;
                let m = u32::try_from(m).map_err(|_| a[1].err("order out of range"))?;
                let inner = SetExpr::from_sexp(&a[0])?;
                if head == "erode" {
                    inner.erode(m)
                } else {
                    inner.dilate(m)
                }
            }
            other => return Err(s.err(format!("unknown set family `{other}`"))),
        };
        set.validate().map_err(|e| s.err(e.to_string()))?;
        Ok(set)
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

fn min_dist(ps: &[GenNumber], eps: f64, p: &[f64]) -> Result<f64> {
    let mut m = f64::INFINITY;
    for q in ps {
        m = m.min(dist(&q.eval(eps)?, p));
    }
    Ok(m)
}

fn box_sdf(lo: &[f64], hi: &[f64], p: &[f64]) -> f64 {
    let mut inside = f64::INFINITY;
    let mut outside = 0.0;
    for i in 0..p.len() {
        let (a, b) = (p[i] - lo[i], hi[i] - p[i]);
        inside = inside.min(a).min(b);
        let gap = (-a).max(-b).max(0.0);
        outside += gap * gap;
    }
    if inside > 0.0 {
        inside
    } else {
        -outside.sqrt()
    }
}

fn sphere_points(c: &[f64], r: f64, k: usize, out: &mut Vec<Vec<f64>>) {
    match c.len() {
        1 => {
            out.push(vec![c[0] - r]);
            out.push(vec![c[0] + r]);
        }
        _ => {
            for j in 0..k.max(4) {
                let t = std::f64::consts::TAU * j as f64 / k.max(4) as f64;
                let mut p = c.to_vec();
                p[0] += r * t.cos();
                p[1] += r * t.sin();
                out.push(p);
            }
        }
    }
}

fn box_boundary(lo: &[f64], hi: &[f64], k: usize, out: &mut Vec<Vec<f64>>) {
    match lo.len() {
        1 => {
            out.push(vec![lo[0]]);
            out.push(vec![hi[0]]);
            out.push(vec![0.5 * (lo[0] + hi[0])]);
        }
        _ => {
            let per = (k / 4).max(2);
            for j in 0..=per {
                let t = j as f64 / per as f64;
                let x = lo[0] + t * (hi[0] - lo[0]);
                let y = lo[1] + t * (hi[1] - lo[1]);
                out.push(vec![x, lo[1]]);
                out.push(vec![x, hi[1]]);
                out.push(vec![lo[0], y]);
                out.push(vec![hi[0], y]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_one;

    fn unit_ball(d: usize) -> SetExpr {
        SetExpr::ball(GenNumber::zeros(d), NetExpr::one())
    }

    #[test]
    fn sdf_examples() {
        let b = unit_ball(1);
        assert_eq!(b.sdf(0.1, &[0.5]).unwrap(), 0.5);
        assert_eq!(b.clone().complement().sdf(0.1, &[0.5]).unwrap(), -0.5);
        assert_eq!(b.sdf(0.1, &[2.0]).unwrap(), -1.0);
        assert_eq!(b.clone().complement().complement(), b);
    }

    #[test]
    fn box_sdf_is_exact_outside_corners() {
        let b = SetExpr::boxed(GenNumber::reals(&[0.0, 0.0]), GenNumber::reals(&[1.0, 1.0])).unwrap();
        assert!((b.sdf(0.1, &[2.0, 2.0]).unwrap() + 2f64.sqrt()).abs() < 1e-15);
        assert!((b.sdf(0.1, &[0.5, 0.25]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn numeric_and_symbolic_sdf_agree() {
        let sets = [
            "(ball (vec (const 0) (const 0)) (epspow 0))",
            "(box (vec (const -1) (const 0)) (vec (const 1) (const 2)))",
            "(punctured (const 0))",
            "(union (ball (const 0) (const 1)) (ball (const 3) (epspow 1)))",
            "(erode (ball (const 0) (const 1)) 2)",
            "(halfspace (vec (const 1) (const 1)) (const 1))",
            "(hull (const 0) (epspow 1) (const -2))",
        ];
        let pts: [&[f64]; 4] = [&[0.3, -0.2], &[2.0, 1.5], &[-0.7, 0.1], &[0.0, 0.0]];
        for src in sets {
            let s = SetExpr::from_sexp(&parse_one(src).unwrap()).unwrap();
            for p in pts {
                let p = &p[..s.dim()];
                let x = GenNumber::reals(p);
                let net = s.sdf_net(&x).unwrap().unwrap();
                for eps in [0.25, 1e-3] {
                    let a = s.sdf(eps, p).unwrap();
                    let b = net.eval(eps).unwrap();
                    assert!((a - b).abs() < 1e-12, "{src} at {p:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn erosion_and_dilation_shift_ball_radius() {
        let b = unit_ball(2);
        let e = b.clone().erode(3);
        let d = b.clone().dilate(3);
        let eps: f64 = 0.1;
        let shrunk = SetExpr::ball(GenNumber::zeros(2), NetExpr::Const(1.0 - eps.powi(3)));
        for p in [[0.2, 0.1], [0.9, 0.0], [1.5, -0.3]] {
            assert!((e.sdf(eps, &p).unwrap() - shrunk.sdf(eps, &p).unwrap()).abs() < 1e-15);
            assert!(d.sdf(eps, &p).unwrap() > b.sdf(eps, &p).unwrap());
        }
        assert_eq!(SetExpr::Whole(1).erode(2).sdf(0.1, &[0.0]).unwrap(), f64::INFINITY);
        assert_eq!(SetExpr::Empty(1).dilate(2).sdf(0.1, &[0.0]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn constant_rejects_eps_dependence() {
        assert!(SetExpr::constant(SetExpr::interval(NetExpr::zero(), NetExpr::one())).is_ok());
        assert!(SetExpr::constant(SetExpr::interval(NetExpr::zero(), NetExpr::eps())).is_err());
    }

    #[test]
    fn text_round_trip() {
        for src in [
            "(ball (vec (const 0) (const 1)) (epspow -3))",
            "(cbox (const 0) (const 1))",
            "(union (punctured (const 0)) (complement (points (const 1) (const 2))))",
            "(dilate (erode (whole 2) 2) 3)",
        ] {
            let s = SetExpr::from_sexp(&parse_one(src).unwrap()).unwrap();
            assert_eq!(s.to_string(), src);
        }
    }

    #[test]
    fn log_sup_norm_survives_huge_radii() {
        let b = SetExpr::ball(GenNumber::zeros(1), NetExpr::ExpInvEps);
        let l = b.log_sup_norm(1e-6).unwrap().unwrap();
        assert!((l - 1e6).abs() < 1e-6);
        assert!(SetExpr::Punctured(vec![GenNumber::real(0.0)]).log_sup_norm(0.1).unwrap().is_none());
    }
}
