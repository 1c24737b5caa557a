//! Deterministic sample clouds for sampled sups: a randomly shifted Halton
//! sequence over a bounding box plus boundary-biased points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::setnets::family::SetExpr;

/// Samples per eps per set.
pub const DEFAULT_BUDGET: usize = 1024;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub budget: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            budget: DEFAULT_BUDGET,
            seed: DEFAULT_SEED,
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `n` Halton points in `[0,1)^d` (`d <= 2`) with a Cranley-Patterson shift.
pub fn halton(n: usize, d: usize, shift: &[f64]) -> Vec<Vec<f64>> {
    const BASES: [u64; 2] = [2, 3];
    (1..=n as u64)
        .map(|i| {
            (0..d)
                .map(|k| (radical_inverse(i, BASES[k % 2]) + shift[k]).fract())
                .collect()
        })
        .collect()
}

/// Sample points for a sup over a region: a quarter of the budget goes to
/// boundary samples of `boundary_sets`, the rest to Halton points in the
/// bounding box of `region` at `eps`.
pub fn sample_points(
    region: &SetExpr,
    boundary_sets: &[&SetExpr],
    eps: f64,
    cfg: SampleConfig,
) -> Result<Vec<Vec<f64>>> {
    let (lo, hi) = region.bbox(eps)?.ok_or_else(|| {
        Error::Sampling(format!("no bounding box for {region} at eps={eps:e}"))
    })?;
    if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
        return Err(Error::Sampling(format!(
            "bounding box of {region} is not finite at eps={eps:e}"
        )));
    }
    let d = lo.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ eps.to_bits());
    let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    let n_boundary = cfg.budget / 4;
    let mut pts = Vec::with_capacity(cfg.budget + 8);
    for s in boundary_sets {
        let per = (n_boundary / boundary_sets.len().max(1)).max(8);
        pts.extend(s.boundary_samples(eps, per)?);
    }
    let n_halton = cfg.budget.saturating_sub(pts.len()).max(cfg.budget / 2);
    for u in halton(n_halton, d, &shift) {
        pts.push(
            u.iter()
                .enumerate()
                .map(|(k, t)| lo[k] + t * (hi[k] - lo[k]))
                .collect(),
        );
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{GenNumber, NetExpr};

    #[test]
    fn halton_is_low_discrepancy() {
        let pts = halton(1000, 2, &[0.0, 0.0]);
        let q = pts.iter().filter(|p| p[0] < 0.5 && p[1] < 0.5).count();
        assert!((q as i64 - 250).abs() < 10);
    }

    #[test]
    fn samples_are_deterministic() {
        let b = SetExpr::ball(GenNumber::zeros(2), NetExpr::one());
        let cfg = SampleConfig::default();
        let a = sample_points(&b, &[&b], 0.1, cfg).unwrap();
        let c = sample_points(&b, &[&b], 0.1, cfg).unwrap();
        assert_eq!(a, c);
        assert!(a.len() >= cfg.budget);
        let other = sample_points(&b, &[&b], 0.1, SampleConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn unbounded_regions_fail_distinctly() {
        let p = SetExpr::Punctured(vec![GenNumber::real(0.0)]);
        assert!(matches!(
            sample_points(&p, &[], 0.1, SampleConfig::default()),
            Err(Error::Sampling(_))
        ));
    }
}
