use std::fmt;

use crate::error::{Error, Result};
use crate::sexpr::Sexp;

/// Relative tolerance for recognising a sample as a term of a geometric sequence.
const GEOMETRIC_TOL: f64 = 1e-12;

/// A subset `S` of the index interval `(0, 1]`.
///
/// Two shapes are representable: finite unions of half-open intervals
/// `(a, b]`, and geometric sequences `{start * ratio^n : n >= 0}` (optionally
/// complemented). Interval unions are closed under complement, so only the
/// geometric kind carries the flag.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    kind: IndexKind,
    complemented: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexKind {
    /// Sorted, pairwise disjoint `(a_i, b_i]` with `0 <= a_i < b_i <= 1`.
    Intervals(Vec<(f64, f64)>),
    Geometric { start: f64, ratio: f64 },
}

/// What an index set looks like on `(0, delta]` for `delta` small enough.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NearZero {
    Empty,
    Full,
    /// The geometric sequence (`complemented == false`) or its complement.
    Sequence {
        seq: GeometricKey,
        complemented: bool,
    },
}

/// Identity of a geometric sequence, compared up to rounding.
#[derive(Debug, Clone, Copy)]
pub struct GeometricKey {
    pub start: f64,
    pub ratio: f64,
}

impl PartialEq for GeometricKey {
    fn eq(&self, other: &Self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= GEOMETRIC_TOL * a.abs().max(b.abs());
        close(self.start, other.start) && close(self.ratio, other.ratio)
    }
}

impl IndexSet {
    pub fn intervals(mut ivs: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &ivs {
            if !(0.0..1.0).contains(&a) || !(b > a && b <= 1.0) {
                return Err(Error::IndexSet(format!(
                    "interval ({a}, {b}] is not a non-empty subinterval of (0,1]"
                )));
            }
        }
        ivs.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in ivs.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(Error::IndexSet(format!(
                    "intervals ({}, {}] and ({}, {}] overlap",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(IndexSet {
            kind: IndexKind::Intervals(ivs),
            complemented: false,
        })
    }

    /// Single interval `(a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::intervals(vec![(a, b)])
    }

    /// The whole index set `I = (0, 1]`.
    pub fn full() -> Self {
        IndexSet {
            kind: IndexKind::Intervals(vec![(0.0, 1.0)]),
            complemented: false,
        }
    }

    pub fn empty() -> Self {
        IndexSet {
            kind: IndexKind::Intervals(Vec::new()),
            complemented: false,
        }
    }

    pub fn geometric(start: f64, ratio: f64) -> Result<Self> {
        if !(start > 0.0 && start <= 1.0) || !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::IndexSet(format!(
                "geometric sequence needs start in (0,1] and ratio in (0,1), got ({start}, {ratio})"
            )));
        }
        Ok(IndexSet {
            kind: IndexKind::Geometric { start, ratio },
            complemented: false,
        })
    }

    pub fn kind(&self) -> &IndexKind {
        &self.kind
    }

    pub fn is_complemented(&self) -> bool {
        self.complemented
    }

    /// `S^c = (0,1] \ S`.
    pub fn complement(&self) -> IndexSet {
        match &self.kind {
            IndexKind::Intervals(ivs) => {
                let mut out = Vec::new();
                let mut cursor = 0.0;
                for &(a, b) in ivs {
                    if a > cursor {
                        out.push((cursor, a));
                    }
                    cursor = b;
                }
                if cursor < 1.0 {
                    out.push((cursor, 1.0));
                }
                IndexSet {
                    kind: IndexKind::Intervals(out),
                    complemented: false,
                }
            }
            IndexKind::Geometric { .. } => IndexSet {
                kind: self.kind.clone(),
                complemented: !self.complemented,
            },
        }
    }

    pub fn contains(&self, eps: f64) -> bool {
        let raw = match &self.kind {
            IndexKind::Intervals(ivs) => ivs.iter().any(|&(a, b)| a < eps && eps <= b),
            IndexKind::Geometric { start, ratio } => on_sequence(*start, *ratio, eps),
        };
        raw != self.complemented
    }

    /// True iff `0` lies in the closure of the set, i.e. `e_S != 0`.
    pub fn accumulates_at_zero(&self) -> bool {
        match self.near_zero() {
            NearZero::Empty => false,
            NearZero::Full | NearZero::Sequence { .. } => true,
        }
    }

    pub fn near_zero(&self) -> NearZero {
        match &self.kind {
            IndexKind::Intervals(ivs) => {
                if ivs.first().is_some_and(|iv| iv.0 == 0.0) {
                    NearZero::Full
                } else {
                    NearZero::Empty
                }
            }
            IndexKind::Geometric { start, ratio } => NearZero::Sequence {
                seq: GeometricKey {
                    start: *start,
                    ratio: *ratio,
                },
                complemented: self.complemented,
            },
        }
    }

    /// Sample points in `[lo, hi]` that witness both `S` and `S^c` for a
    /// geometric set: the sequence terms and the geometric means between
    /// consecutive terms. Empty for interval unions.
    pub fn witness_points(&self, lo: f64, hi: f64, cap: usize) -> Vec<f64> {
        let IndexKind::Geometric { start, ratio } = self.kind else {
            return Vec::new();
        };
        let mut terms = Vec::new();
        let mut n = 0i32;
        loop {
            let t = start * ratio.powi(n);
            if t < lo || n > 100_000 {
                break;
            }
            if t <= hi {
                terms.push(t);
            }
            n += 1;
        }
        let mut pts = Vec::with_capacity(2 * terms.len());
        for (i, &t) in terms.iter().enumerate() {
            pts.push(t);
            if let Some(&next) = terms.get(i + 1) {
                pts.push((t * next).sqrt());
            }
        }
        if pts.len() > cap && cap > 0 {
            // Keep the smallest samples densely; they drive the asymptotics.
            let stride = pts.len().div_ceil(cap);
            let mut kept: Vec<f64> = pts
                .iter()
                .rev()
                .step_by(stride)
                .copied()
                .collect::<Vec<_>>();
            // Pair every kept term with its successor midpoint so that both S
            // and S^c stay represented after thinning.
            let extra: Vec<f64> = kept
                .iter()
                .filter_map(|&t| {
                    let idx = pts.iter().position(|&p| p == t)?;
                    pts.get(idx + 1).copied()
                })
                .collect();
            kept.extend(extra);
            kept.sort_by(|a, b| b.total_cmp(a));
            kept.dedup();
            return kept;
        }
        pts
    }

    pub fn to_sexp(&self) -> Sexp {
        let base = match &self.kind {
            IndexKind::Intervals(ivs) => Sexp::tagged(
                "intervals",
                ivs.iter()
                    .map(|&(a, b)| Sexp::list(vec![Sexp::num(a), Sexp::num(b)]))
                    .collect(),
            ),
            IndexKind::Geometric { start, ratio } => {
                Sexp::tagged("geometric", vec![Sexp::num(*start), Sexp::num(*ratio)])
            }
        };
        if self.complemented {
            Sexp::tagged("complement", vec![base])
        } else {
            base
        }
    }

    pub fn from_sexp(s: &Sexp) -> Result<Self> {
        match s.head() {
            Some("intervals") => {
                let items = &s.expect_list()?[1..];
                let mut ivs = Vec::with_capacity(items.len());
                for it in items {
                    let pair = it.expect_list()?;
                    if pair.len() != 2 {
                        return Err(it.err("interval must be `(a b)`"));
                    }
                    ivs.push((pair[0].expect_f64()?, pair[1].expect_f64()?));
                }
                Self::intervals(ivs).map_err(|e| s.err(e.to_string()))
            }
            Some("geometric") => {
                let a = s.args("geometric", 2)?;
                Self::geometric(a[0].expect_f64()?, a[1].expect_f64()?)
                    .map_err(|e| s.err(e.to_string()))
            }
            Some("complement") => {
                let a = s.args("complement", 1)?;
                Ok(Self::from_sexp(&a[0])?.complement())
            }
            _ => Err(s.err("expected an index set: intervals | geometric | complement")),
        }
    }
}

fn on_sequence(start: f64, ratio: f64, eps: f64) -> bool {
    if eps > start * (1.0 + GEOMETRIC_TOL) || eps <= 0.0 {
        return false;
    }
    let n = ((eps / start).ln() / ratio.ln()).round();
    if n < 0.0 || n > i32::MAX as f64 {
        return false;
    }
    let t = start * ratio.powi(n as i32);
    (t - eps).abs() <= GEOMETRIC_TOL * eps
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulation_examples() {
        assert!(IndexSet::interval(0.0, 0.5).unwrap().accumulates_at_zero());
        assert!(!IndexSet::interval(0.3, 0.6).unwrap().accumulates_at_zero());
        assert!(IndexSet::geometric(0.5, 0.5).unwrap().accumulates_at_zero());
        assert!(IndexSet::geometric(0.5, 0.5)
            .unwrap()
            .complement()
            .accumulates_at_zero());
    }

    #[test]
    fn interval_complement_partitions_index_set() {
        let s = IndexSet::intervals(vec![(0.1, 0.2), (0.5, 0.7)]).unwrap();
        let c = s.complement();
        assert_eq!(
            c.kind(),
            &IndexKind::Intervals(vec![(0.0, 0.1), (0.2, 0.5), (0.7, 1.0)])
        );
        for k in 1..200 {
            let eps = k as f64 / 200.0;
            assert_ne!(s.contains(eps), c.contains(eps), "eps={eps}");
        }
        assert!(c.accumulates_at_zero());
        assert!(!s.accumulates_at_zero());
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(IndexSet::interval(0.5, 0.5).is_err());
        assert!(IndexSet::interval(-0.1, 0.5).is_err());
        assert!(IndexSet::intervals(vec![(0.1, 0.5), (0.4, 0.6)]).is_err());
        assert!(IndexSet::geometric(0.5, 1.0).is_err());
    }

    #[test]
    fn geometric_membership_and_witnesses() {
        let s = IndexSet::geometric(0.3, 0.7).unwrap();
        let pts = s.witness_points(1e-6, 1.0, 10_000);
        let inside = pts.iter().filter(|&&e| s.contains(e)).count();
        let outside = pts.len() - inside;
        assert!(inside > 10 && outside > 10);
        assert!(s.contains(0.3) && s.contains(0.21));
        assert!(!s.contains(0.25));
        let thinned = s.witness_points(1e-12, 1.0, 20);
        assert!(thinned.iter().any(|&e| s.contains(e)));
        assert!(thinned.iter().any(|&e| !s.contains(e)));
    }

    #[test]
    fn text_round_trip() {
        for s in [
            IndexSet::intervals(vec![(0.0, 0.25), (0.5, 1.0)]).unwrap(),
            IndexSet::geometric(0.5, 0.25).unwrap().complement(),
        ] {
            let back = IndexSet::from_sexp(&crate::sexpr::parse_one(&s.to_string()).unwrap())
                .unwrap();
            assert_eq!(back, s);
        }
    }
}
