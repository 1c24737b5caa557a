//! Truncated Taylor series ("jets") in one variable.
//!
//! A jet holds the normalised Taylor coefficients `c_n = f^{(n)}(t0) / n!`
//! up to a fixed order. Arithmetic follows the usual recurrences, so the
//! derivatives of compositions come out without symbolic expansion.

#[derive(Debug, Clone, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    /// The identity function expanded at `t0`.
    pub fn variable(t0: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = t0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet(c)
    }

    pub fn constant(v: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet(c)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    /// `n`-th derivative at the expansion point.
    pub fn derivative(&self, n: usize) -> f64 {
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        self.0.get(n).copied().unwrap_or(0.0) * fact
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * k).collect())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        let mut out = vec![0.0; n];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for j in 0..n - i {
                out[i + j] += a * o.0[j];
            }
        }
        Jet(out)
    }

    pub fn recip(&self) -> Jet {
        let a = &self.0;
        let mut b = vec![0.0; a.len()];
        b[0] = 1.0 / a[0];
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|k| a[k] * b[n - k]).sum();
            b[n] = -s / a[0];
        }
        Jet(b)
    }

    pub fn exp(&self) -> Jet {
        let a = &self.0;
        let mut e = vec![0.0; a.len()];
        e[0] = a[0].exp();
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|k| k as f64 * a[k] * e[n - k]).sum();
            e[n] = s / n as f64;
        }
        Jet(e)
    }

    pub fn ln(&self) -> Jet {
        let a = &self.0;
        let mut l = vec![0.0; a.len()];
        l[0] = a[0].ln();
        for n in 1..a.len() {
            let s: f64 = (1..n).map(|k| k as f64 * l[k] * a[n - k]).sum();
            l[n] = (a[n] - s / n as f64) / a[0];
        }
        Jet(l)
    }

    pub fn sin_cos(&self) -> (Jet, Jet) {
        let a = &self.0;
        let mut s = vec![0.0; a.len()];
        let mut c = vec![0.0; a.len()];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for n in 1..a.len() {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for k in 1..=n {
                ss += k as f64 * a[k] * c[n - k];
                cc += k as f64 * a[k] * s[n - k];
            }
            s[n] = ss / n as f64;
            c[n] = -cc / n as f64;
        }
        (Jet(s), Jet(c))
    }

    pub fn sqrt(&self) -> Jet {
        let a = &self.0;
        let mut r = vec![0.0; a.len()];
        r[0] = a[0].sqrt();
        for n in 1..a.len() {
            let s: f64 = (1..n).map(|k| r[k] * r[n - k]).sum();
            r[n] = (a[n] - s) / (2.0 * r[0]);
        }
        Jet(r)
    }

    pub fn tanh(&self) -> Jet {
        // t' = (1 - t^2) a'
        let a = &self.0;
        let len = a.len();
        let mut t = vec![0.0; len];
        let mut u = vec![0.0; len];
        t[0] = a[0].tanh();
        u[0] = 1.0 - t[0] * t[0];
        for n in 1..len {
            let s: f64 = (1..=n).map(|k| k as f64 * a[k] * u[n - k]).sum();
            t[n] = s / n as f64;
            let sq: f64 = (0..=n).map(|i| t[i] * t[n - i]).sum();
            u[n] = -sq;
        }
        Jet(t)
    }

    pub fn powi(&self, n: i32) -> Jet {
        let base = if n < 0 { self.recip() } else { self.clone() };
        let mut out = Jet::constant(1.0, self.order());
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }
}

/// The standard smooth transition `psi` with `psi = 0` on `(-inf, 0]`,
/// `psi = 1` on `[1, inf)`, built from `f(t) = exp(-1/t)` as
/// `f(t) / (f(t) + f(1 - t))`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        smooth_step_jet(t, 0).0[0]
    }
}

/// `k`-th derivative of [`smooth_step`].
pub fn smooth_step_derivative(k: usize, t: f64) -> f64 {
    if k == 0 {
        return smooth_step(t);
    }
    if t <= 0.0 || t >= 1.0 || t.is_nan() {
        return 0.0;
    }
    smooth_step_jet(t, k).derivative(k)
}

fn smooth_step_jet(t: f64, order: usize) -> Jet {
    let x = Jet::variable(t, order);
    let one = Jet::constant(1.0, order);
    let f1 = x.recip().scale(-1.0).exp();
    let f2 = one.sub(&x).recip().scale(-1.0).exp();
    f1.mul(&f1.add(&f2).recip())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn elementary_derivatives() {
        let x = Jet::variable(0.7, 5);
        let (s, c) = x.sin_cos();
        assert!(close(s.derivative(3), -0.7f64.cos(), 1e-12));
        assert!(close(c.derivative(2), -0.7f64.cos(), 1e-12));
        assert!(close(x.exp().derivative(4), 0.7f64.exp(), 1e-12));
        assert!(close(x.ln().derivative(2), -1.0 / 0.49, 1e-12));
        assert!(close(x.sqrt().derivative(1), 0.5 / 0.7f64.sqrt(), 1e-12));
        let th = 0.7f64.tanh();
        assert!(close(x.tanh().derivative(1), 1.0 - th * th, 1e-12));
        assert!(close(
            x.tanh().derivative(2),
            -2.0 * th * (1.0 - th * th),
            1e-12
        ));
        assert!(close(x.powi(-2).derivative(1), -2.0 / 0.343, 1e-12));
    }

    #[test]
    fn step_is_a_smooth_partition() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        assert!(close(smooth_step(0.5), 0.5, 1e-15));
        for &t in &[0.2, 0.5, 0.8] {
            assert!(close(smooth_step(t) + smooth_step(1.0 - t), 1.0, 1e-14));
            let h = 1e-6;
            let fd = (smooth_step(t + h) - smooth_step(t - h)) / (2.0 * h);
            assert!(close(smooth_step_derivative(1, t), fd, 1e-7));
            let fd2 = (smooth_step_derivative(1, t + h) - smooth_step_derivative(1, t - h))
                / (2.0 * h);
            assert!(close(smooth_step_derivative(2, t), fd2, 1e-6));
        }
        assert_eq!(smooth_step_derivative(3, 1.2), 0.0);
    }
}
