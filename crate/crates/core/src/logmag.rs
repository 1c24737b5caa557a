//! Signed log-magnitude numbers: `sign * exp(ln_abs)`.
//!
//! Used to evaluate nets whose magnitudes leave the `f64` range (for example
//! `eps^-100` or `e^{1/eps}` at `eps = 2^-40`) without overflow.

use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMag {
    /// -1, 0 or +1.
    pub sign: f64,
    /// `ln |value|`; `-inf` for zero.
    pub ln_abs: f64,
}

impl LogMag {
    pub const ZERO: LogMag = LogMag {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogMag = LogMag {
        sign: 1.0,
        ln_abs: 0.0,
    };

    pub fn from_f64(x: f64) -> LogMag {
        if x == 0.0 {
            LogMag::ZERO
        } else {
            LogMag {
                sign: x.signum(),
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn positive(ln_abs: f64) -> LogMag {
        LogMag { sign: 1.0, ln_abs }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    /// Back to `f64`, saturating to `+-inf` / `0`.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn neg(self) -> LogMag {
        LogMag {
            sign: -self.sign,
            ..self
        }
    }

    pub fn abs(self) -> LogMag {
        LogMag {
            sign: self.sign.abs(),
            ..self
        }
    }

    pub fn mul(self, other: LogMag) -> LogMag {
        if self.is_zero() || other.is_zero() {
            return LogMag::ZERO;
        }
        LogMag {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    /// `None` for zero.
    pub fn recip(self) -> Option<LogMag> {
        if self.is_zero() {
            None
        } else {
            Some(LogMag {
                sign: self.sign,
                ln_abs: -self.ln_abs,
            })
        }
    }

    pub fn powi(self, n: i32) -> Option<LogMag> {
        if n == 0 {
            return Some(LogMag::ONE);
        }
        if self.is_zero() {
            return if n > 0 { Some(LogMag::ZERO) } else { None };
        }
        let sign = if n % 2 == 0 { 1.0 } else { self.sign };
        Some(LogMag {
            sign,
            ln_abs: self.ln_abs * n as f64,
        })
    }

    /// Sum with a max-shift so that large magnitudes do not overflow.
    pub fn sum(terms: &[LogMag]) -> LogMag {
        let m = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| t.ln_abs)
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return LogMag::ZERO;
        }
        if m == f64::INFINITY {
            // Infinite magnitudes: sum of signs of the infinite terms decides.
            let s: f64 = terms
                .iter()
                .filter(|t| t.ln_abs == f64::INFINITY)
                .map(|t| t.sign)
                .sum();
            return LogMag {
                sign: s.signum(),
                ln_abs: if s == 0.0 { f64::NAN } else { f64::INFINITY },
            };
        }
        let s: f64 = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| t.sign * (t.ln_abs - m).exp())
            .sum();
        if s == 0.0 {
            LogMag::ZERO
        } else {
            LogMag {
                sign: s.signum(),
                ln_abs: m + s.abs().ln(),
            }
        }
    }

    pub fn total_cmp(&self, other: &LogMag) -> Ordering {
        let key = |x: &LogMag| -> (i8, f64) {
            if x.sign > 0.0 {
                (1, x.ln_abs)
            } else if x.sign < 0.0 {
                (-1, -x.ln_abs)
            } else {
                (0, 0.0)
            }
        };
        let (sa, va) = key(self);
        let (sb, vb) = key(other);
        sa.cmp(&sb).then(va.total_cmp(&vb))
    }

    pub fn min(self, other: LogMag) -> LogMag {
        if self.total_cmp(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: LogMag) -> LogMag {
        if self.total_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_handles_huge_magnitudes() {
        let big = LogMag::positive(5000.0);
        let s = LogMag::sum(&[big, big]);
        assert!((s.ln_abs - (5000.0 + 2f64.ln())).abs() < 1e-12);
        let cancel = LogMag::sum(&[big, big.neg()]);
        assert!(cancel.is_zero());
    }

    #[test]
    fn ordering_matches_reals() {
        let xs = [-3.0, -0.5, 0.0, 0.25, 7.0];
        for &a in &xs {
            for &b in &xs {
                let la = LogMag::from_f64(a);
                let lb = LogMag::from_f64(b);
                assert_eq!(la.total_cmp(&lb), a.total_cmp(&b), "{a} vs {b}");
            }
        }
    }
}
