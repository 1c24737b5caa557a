//! Nets `eps -> value`: index sets, grids, expression trees and generalized
//! numbers, plus the elementary constructions on them (idempotents,
//! interleaving, pointwise infimum).

pub mod expr;
pub mod grid;
pub mod index;
pub mod number;

pub use expr::NetExpr;
pub use grid::EpsGrid;
pub use index::{IndexKind, IndexSet};
pub use number::GenNumber;

use crate::error::Result;

/// The idempotent `e_S`: the characteristic-function net of `S`.
pub fn idempotent(s: &IndexSet) -> NetExpr {
    NetExpr::mask(s.clone(), NetExpr::one())
}

/// The net equal to `x_eps` for `eps` in `S` and to `y_eps` off `S`, i.e.
/// `x e_S + y e_{S^c}`. Used to build oscillating witnesses.
pub fn interleave(s: &IndexSet, x: &GenNumber, y: &GenNumber) -> Result<GenNumber> {
    let sc = s.complement();
    x.zip(y, |a, b| {
        NetExpr::Sum(vec![
            NetExpr::mask(s.clone(), a.clone()),
            NetExpr::mask(sc.clone(), b.clone()),
        ])
    })
}

/// `[x_eps] ∧ [y_eps] := [min(x_eps, y_eps)]` for scalars.
pub fn wedge(x: &GenNumber, y: &GenNumber) -> Result<GenNumber> {
    x.as_scalar()?;
    x.wedge(y)
}

/// Pointwise supremum, dual to [`wedge`].
pub fn vee(x: &GenNumber, y: &GenNumber) -> Result<GenNumber> {
    x.as_scalar()?;
    x.vee(y)
}

pub fn accumulates_at_zero(s: &IndexSet) -> bool {
    s.accumulates_at_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idempotent_examples() {
        let g = EpsGrid::default();
        let full = idempotent(&IndexSet::full());
        assert!(g.samples().iter().all(|&e| full.eval(e).unwrap() == 1.0));

        let s = IndexSet::geometric(0.5, 0.25).unwrap();
        let e_s = idempotent(&s);
        let e_sc = idempotent(&s.complement());
        for &e in g.augmented(std::slice::from_ref(&s)).samples() {
            let (a, b) = (e_s.eval(e).unwrap(), e_sc.eval(e).unwrap());
            assert_eq!(a, if s.contains(e) { 1.0 } else { 0.0 });
            assert_eq!(a + b, 1.0);
        }
    }

    #[test]
    fn interleave_selects_branches() {
        let s = IndexSet::geometric(0.5, 0.5).unwrap();
        let x = GenNumber::eps_pow(1.0);
        let y = GenNumber::real(1.0);
        let z = interleave(&s, &x, &y).unwrap();
        let g = EpsGrid::default().augmented(std::slice::from_ref(&s));
        for &e in g.samples() {
            let want = if s.contains(e) { e } else { 1.0 };
            assert_eq!(z.eval(e).unwrap()[0], want);
        }
        let same = interleave(&s, &x, &x).unwrap();
        for &e in g.samples() {
            assert_eq!(same.eval(e).unwrap(), x.eval(e).unwrap());
        }
    }

    #[test]
    fn wedge_examples() {
        let w = wedge(&GenNumber::real(1.0), &GenNumber::eps_pow(1.0)).unwrap();
        for &e in EpsGrid::default().samples() {
            assert_eq!(w.eval(e).unwrap()[0], e);
        }
        assert!(wedge(&GenNumber::reals(&[1.0, 2.0]), &GenNumber::reals(&[0.0, 0.0])).is_err());
    }
}
