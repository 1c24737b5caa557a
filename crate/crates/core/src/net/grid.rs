use crate::error::{Error, Result};
use crate::net::index::IndexSet;
use crate::sexpr::Sexp;

/// Minimum number of samples in a grid.
pub const MIN_SAMPLES: usize = 12;
/// Minimum number of samples in the tail window.
pub const MIN_TAIL: usize = 8;
/// Upper bound on the witness points added per geometric index set.
const WITNESS_CAP: usize = 96;

/// A strictly decreasing sample of `eps` values in `(0, 1]`.
///
/// The last `tail_fraction` of the samples (the smallest `eps`) form the tail
/// window used by asymptotic fits.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsGrid {
    samples: Vec<f64>,
    tail_fraction: f64,
}

impl Default for EpsGrid {
    /// `eps_k = 2^-k`, `k = 4..=48`, tail fraction one half.
    fn default() -> Self {
        EpsGrid::dyadic(4, 48).expect("default grid is valid")
    }
}

impl EpsGrid {
    pub fn new(mut samples: Vec<f64>, tail_fraction: f64) -> Result<Self> {
        samples.sort_by(|a, b| b.total_cmp(a));
        if samples.len() < MIN_SAMPLES {
            return Err(Error::Grid(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::Grid("samples must lie in (0,1]".into()));
        }
        if samples.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Grid("samples must be distinct".into()));
        }
        let ratio = samples[samples.len() - 1] / samples[0];
        if ratio > 2f64.powi(-24) {
            return Err(Error::Grid(format!(
                "smallest/largest sample ratio {ratio:e} exceeds 2^-24"
            )));
        }
        if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
            return Err(Error::Grid("tail fraction must lie in (0,1]".into()));
        }
        let grid = EpsGrid {
            samples,
            tail_fraction,
        };
        if grid.tail_len() < MIN_TAIL {
            return Err(Error::Grid(format!(
                "tail window holds {} samples, need {MIN_TAIL}",
                grid.tail_len()
            )));
        }
        Ok(grid)
    }

    /// `eps_k = 2^-k` for `k = k_min..=k_max`.
    pub fn dyadic(k_min: u32, k_max: u32) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::Grid(format!("empty range {k_min}..{k_max}")));
        }
        let samples = (k_min..=k_max).map(|k| 2f64.powi(-(k as i32))).collect();
        Self::new(samples, 0.5)
    }

    pub fn with_tail_fraction(mut self, tail_fraction: f64) -> Result<Self> {
        self.tail_fraction = tail_fraction;
        Self::new(self.samples, tail_fraction)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn tail_fraction(&self) -> f64 {
        self.tail_fraction
    }

    pub fn tail_len(&self) -> usize {
        ((self.samples.len() as f64 * self.tail_fraction).ceil() as usize).min(self.samples.len())
    }

    /// The smallest `tail_len()` samples, still in decreasing order.
    pub fn tail(&self) -> &[f64] {
        &self.samples[self.samples.len() - self.tail_len()..]
    }

    pub fn smallest(&self) -> f64 {
        *self.samples.last().expect("grid is non-empty")
    }

    pub fn largest(&self) -> f64 {
        self.samples[0]
    }

    /// Adds witness points for every geometric index set so that masks on a
    /// sequence disjoint from the grid do not silently read as zero.
    pub fn augmented(&self, sets: &[IndexSet]) -> EpsGrid {
        let mut samples = self.samples.clone();
        let (lo, hi) = (self.smallest(), self.largest());
        let mut added = false;
        for s in sets {
            let pts = s.witness_points(lo, hi, WITNESS_CAP);
            added |= !pts.is_empty();
            samples.extend(pts);
        }
        if !added {
            return self.clone();
        }
        samples.sort_by(|a, b| b.total_cmp(a));
        samples.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs());
        EpsGrid {
            samples,
            tail_fraction: self.tail_fraction,
        }
    }

    /// `(grid (samples ...) (tail f))`
    pub fn to_sexp(&self) -> Sexp {
        Sexp::tagged(
            "grid",
            vec![
                Sexp::tagged("samples", self.samples.iter().map(|&e| Sexp::num(e)).collect()),
                Sexp::tagged("tail", vec![Sexp::num(self.tail_fraction)]),
            ],
        )
    }

    /// Accepts `(grid (samples ...) (tail f))`, `(grid (dyadic kmin kmax))` and
    /// `(grid (dyadic kmin kmax) (tail f))`.
    pub fn from_sexp(s: &Sexp) -> Result<Self> {
        let items = s.expect_list()?;
        if s.head() != Some("grid") {
            return Err(s.err("expected `(grid ...)`"));
        }
        let mut samples = None;
        let mut tail = 0.5;
        for it in &items[1..] {
            match it.head() {
                Some("samples") => {
                    let xs = it.expect_list()?[1..]
                        .iter()
                        .map(Sexp::expect_f64)
                        .collect::<Result<Vec<_>>>()?;
                    samples = Some(xs);
                }
                Some("dyadic") => {
                    let a = it.args("dyadic", 2)?;
                    let (k0, k1) = (a[0].expect_usize()?, a[1].expect_usize()?);
                    samples = Some((k0..=k1).map(|k| 2f64.powi(-(k as i32))).collect());
                }
                Some("tail") => tail = it.args("tail", 1)?[0].expect_f64()?,
                _ => return Err(it.err("expected `samples`, `dyadic` or `tail`")),
            }
        }
        let samples = samples.ok_or_else(|| s.err("grid needs `samples` or `dyadic`"))?;
        Self::new(samples, tail).map_err(|e| s.err(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = EpsGrid::default();
        assert_eq!(g.samples().len(), 45);
        assert_eq!(g.largest(), 2f64.powi(-4));
        assert_eq!(g.smallest(), 2f64.powi(-48));
        assert_eq!(g.tail_len(), 23);
        assert!(g.tail().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn rejects_invalid_grids() {
        assert!(EpsGrid::dyadic(4, 10).is_err());
        assert!(EpsGrid::new(vec![0.5; 20], 0.5).is_err());
        assert!(EpsGrid::dyadic(4, 48).unwrap().with_tail_fraction(0.1).is_err());
    }

    #[test]
    fn augmentation_covers_sequence_and_complement() {
        let s = IndexSet::geometric(0.3, 0.7).unwrap();
        let g = EpsGrid::default().augmented(std::slice::from_ref(&s));
        let tail = g.tail();
        assert!(tail.iter().any(|&e| s.contains(e)));
        assert!(tail.iter().any(|&e| !s.contains(e)));
        assert!(g.samples().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn text_round_trip() {
        let g = EpsGrid::dyadic(3, 30).unwrap();
        let back = EpsGrid::from_sexp(&crate::sexpr::parse_one(&g.to_sexp().to_string()).unwrap())
            .unwrap();
        assert_eq!(back, g);
    }
}
