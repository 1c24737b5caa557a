use proptest::prelude::*;

use colombeau::asymptotics::{eq_in_ring, leq, sharp_norm, valuation, Method, Verdict};
use colombeau::net::{idempotent, EpsGrid, GenNumber, IndexSet, NetExpr};
use colombeau::setnets::{internal_member, strong_member_sharp, SetExpr};
use colombeau::sexpr::parse_one;
use colombeau::smooth::SmoothExpr;

fn grid() -> EpsGrid {
    EpsGrid::default()
}

/// Sums of one to three monomials with quarter-integer exponents.
fn canonical() -> impl Strategy<Value = GenNumber> {
    prop::collection::vec((-5i32..=5, -12i32..=12), 1..=3).prop_map(|terms| {
        let nets = terms
            .into_iter()
            .map(|(c, a)| NetExpr::monomial(if c == 0 { 1.0 } else { c as f64 }, a as f64 / 4.0))
            .collect();
        GenNumber::scalar(NetExpr::Sum(nets))
    })
}

fn intervals() -> impl Strategy<Value = IndexSet> {
    prop::collection::vec(0.0f64..1.0, 2..=6).prop_map(|mut cuts| {
        cuts.sort_by(f64::total_cmp);
        let ivs = cuts.chunks(2).filter(|c| c.len() == 2 && c[0] < c[1]).map(|c| (c[0], c[1])).collect();
        IndexSet::intervals(ivs).unwrap()
    })
}

/// Small smooth expressions in one variable.
fn smooth() -> impl Strategy<Value = SmoothExpr> {
    let x = SmoothExpr::var(0);
    let leaf = prop_oneof![
        Just(x.clone()),
        (-3.0f64..3.0).prop_map(SmoothExpr::constant),
        (-2.0f64..2.0).prop_map(|a| SmoothExpr::coef(NetExpr::EpsPow(a))),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
            inner.clone().prop_map(SmoothExpr::sin),
            inner.clone().prop_map(SmoothExpr::tanh),
            inner.prop_map(|a| SmoothExpr::powi(a, 2)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn addition_is_associative_and_commutative(a in canonical(), b in canonical(), c in canonical()) {
        let g = grid();
        prop_assert_eq!(eq_in_ring(&(&(&a + &b) + &c), &(&a + &(&b + &c)), &g).unwrap(), Verdict::True);
        prop_assert_eq!(eq_in_ring(&(&a + &b), &(&b + &a), &g).unwrap(), Verdict::True);
    }

    #[test]
    fn multiplication_distributes(a in canonical(), b in canonical(), c in canonical()) {
        let g = grid();
        let lhs = &a * &(&b + &c);
        let rhs = &(&a * &b) + &(&a * &c);
        prop_assert_eq!(eq_in_ring(&lhs, &rhs, &g).unwrap(), Verdict::True);
    }

    #[test]
    fn additive_inverse(a in canonical()) {
        let z = &a + &(-&a);
        prop_assert_eq!(eq_in_ring(&z, &GenNumber::real(0.0), &grid()).unwrap(), Verdict::True);
        prop_assert_eq!(sharp_norm(&z, &grid()).unwrap(), 0.0);
    }

    #[test]
    fn sharp_norm_is_ultrametric(a in canonical(), b in canonical()) {
        let g = grid();
        let s = sharp_norm(&(&a + &b), &g).unwrap();
        prop_assert!(s <= sharp_norm(&a, &g).unwrap().max(sharp_norm(&b, &g).unwrap()));
    }

    #[test]
    fn monomial_valuation_is_exact(c in 0.1f64..100.0, a in -10.0f64..10.0) {
        let v = valuation(&NetExpr::monomial(c, a), &grid()).unwrap();
        prop_assert_eq!(v.method, Method::Exact);
        prop_assert_eq!(v.value, a);
    }

    #[test]
    fn order_is_reflexive_and_monotone(a in canonical(), k in 0i32..8, c in 0.5f64..4.0) {
        let g = grid();
        prop_assert_eq!(leq(&a, &a, &g).unwrap(), Verdict::True);
        let bigger = &a + &GenNumber::monomial(c, k as f64);
        prop_assert_eq!(leq(&a, &bigger, &g).unwrap(), Verdict::True);
        prop_assert_eq!(leq(&bigger, &a, &g).unwrap(), Verdict::False);
    }

    #[test]
    fn idempotents_are_idempotent(s in intervals()) {
        let e = idempotent(&s);
        let ec = idempotent(&s.complement());
        for &eps in grid().augmented(std::slice::from_ref(&s)).samples() {
            let v = e.eval(eps).unwrap();
            prop_assert_eq!(v * v, v);
            prop_assert_eq!(v + ec.eval(eps).unwrap(), 1.0);
        }
    }

    #[test]
    fn strong_membership_implies_internal(c in -2.0f64..2.0, r in 0.1f64..2.0, x in -3.0f64..3.0, k in 0i32..3) {
        let g = grid();
        let a = SetExpr::ball(GenNumber::real(c), NetExpr::Const(r));
        let p = &GenNumber::real(x) + &GenNumber::eps_pow(k as f64);
        if strong_member_sharp(&p, &a, &g).unwrap().is_in() {
            prop_assert!(internal_member(&p, &a, &g).unwrap().is_in());
        }
    }

    #[test]
    fn derivatives_match_finite_differences(u in smooth(), x in -1.0f64..1.0) {
        let (eps, h) = (0.5, 1e-5);
        let du = u.diff(0).eval(eps, &[x]).unwrap();
        let fd = (u.eval(eps, &[x + h]).unwrap() - u.eval(eps, &[x - h]).unwrap()) / (2.0 * h);
        prop_assert!((du - fd).abs() <= 1e-4 * (1.0 + du.abs()), "{} at {}: {} vs {}", u, x, du, fd);
    }

    #[test]
    fn nets_round_trip_through_text(a in canonical(), s in intervals()) {
        let n = NetExpr::mask(s, a.component(0).clone()).recip().abs();
        let back = NetExpr::from_sexp(&parse_one(&n.to_sexp().to_string()).unwrap()).unwrap();
        prop_assert_eq!(back, n);
    }
}
