//! Cross-layer checks through the public API.

use colombeau::asymptotics::{classify, eq_in_ring, standard_part, ClassVerdict, Verdict};
use colombeau::gsf::families::{compact_catalog, delta, unit_interval};
use colombeau::gsf::{compose, gsf_derivative, gsf_eval, GsfDef};
use colombeau::net::{interleave, EpsGrid, GenNumber, IndexSet, NetExpr};
use colombeau::setnets::{strong_member_fermat, strong_member_sharp, SetExpr};
use colombeau::smooth::SmoothExpr;
use colombeau::topology::{radii_axiom_probe, tau_identified, RadiiSet};

fn g() -> EpsGrid {
    EpsGrid::default()
}

#[test]
fn delta_value_and_derivatives_at_zero() {
    let f = GsfDef::new(vec![delta()], unit_interval(), compact_catalog(), &g(), 4).unwrap();
    assert!(f.is_valid());
    let y = gsf_eval(&f, &GenNumber::real(0.0), &g()).unwrap();
    assert_eq!(eq_in_ring(&y, &GenNumber::eps_pow(-1.0), &g()).unwrap(), Verdict::True);
    let d2 = gsf_derivative(&f, &[2], &g()).unwrap();
    let y2 = gsf_eval(&d2, &GenNumber::real(0.0), &g()).unwrap();
    // delta''(0) = -2 eps^-3.
    assert_eq!(eq_in_ring(&y2, &GenNumber::monomial(-2.0, -3.0), &g()).unwrap(), Verdict::True);
}

#[test]
fn sharp_and_fermat_membership_differ_on_infinitesimal_margins() {
    let a = SetExpr::constant(SetExpr::interval(NetExpr::zero(), NetExpr::one())).unwrap();
    let x = GenNumber::eps_pow(3.0);
    assert!(strong_member_sharp(&x, &a, &g()).unwrap().is_in());
    assert!(strong_member_fermat(&x, &a, &g()).unwrap().is_out());
}

#[test]
fn interleaved_points_have_no_standard_part() {
    let s = IndexSet::geometric(0.5, 0.5).unwrap();
    let x = interleave(&s, &GenNumber::real(0.0), &GenNumber::real(1.0)).unwrap();
    assert_eq!(standard_part(&x, &g()).unwrap(), None);
    let d = &x - &GenNumber::real(1.0);
    assert_eq!(tau_identified(&x, &GenNumber::real(1.0), &RadiiSet::Fermat, &g()).unwrap(), Verdict::False);
    assert_eq!(classify(d.component(0), &g()).unwrap().verdict, ClassVerdict::Moderate);
}

#[test]
fn radii_axioms_hold_for_the_closed_families() {
    let cases = [
        (RadiiSet::Sharp, vec![GenNumber::eps_pow(1.0), GenNumber::real(2.0), GenNumber::monomial(3.0, 0.5)]),
        (RadiiSet::PowerBand(2.0), vec![GenNumber::eps_pow(1.5), GenNumber::monomial(3.0, 0.5)]),
    ];
    for (r, samples) in cases {
        let rep = radii_axiom_probe(&r, &samples, &g()).unwrap();
        assert!(rep.passed(), "{r}: {}", rep.to_sexp());
    }
}

#[test]
fn composition_with_blow_up_is_certified() {
    let cat = compact_catalog();
    let up = GsfDef::new(
        vec![SmoothExpr::prod(vec![SmoothExpr::coef(NetExpr::EpsPow(-1.0)), SmoothExpr::var(0)])],
        SetExpr::Whole(1),
        cat.clone(),
        &g(),
        3,
    )
    .unwrap();
    let tanh = GsfDef::new(vec![SmoothExpr::tanh(SmoothExpr::var(0))], SetExpr::Whole(1), cat, &g(), 3).unwrap();
    let h = compose(&up, &tanh, &g(), 3).unwrap();
    assert!(h.is_valid(), "{}", h.certificate.to_sexp());
}
