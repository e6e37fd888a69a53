//! Golden transcriptions and the exact derivation findings.

use std::fmt::Write as _;
use std::time::Instant;

use effgap_core::asympoly::{
    AsymPoly, EtaMonomial, EtaPoly, FactorPattern, Symbol, TermKey, Variables,
};
use effgap_core::catalog::{transcribed, Catalog, EquationId, Status};

const GOLDEN: &str = include_str!("golden/transcriptions.txt");

fn render_all() -> String {
    let mut out = String::new();
    for id in EquationId::ALL {
        writeln!(out, "{id}: {}", transcribed(id)).unwrap();
    }
    out
}

#[test]
fn transcriptions_match_golden_file() {
    let rendered = render_all();
    assert_eq!(
        rendered, GOLDEN,
        "rendered transcriptions changed:\n{rendered}"
    );
    // The golden file parses back to the same polynomials.
    for (line, id) in GOLDEN.lines().zip(EquationId::ALL) {
        let text = line.split_once(": ").unwrap().1;
        assert_eq!(
            AsymPoly::parse_as(text, id.variables()).unwrap(),
            transcribed(id),
            "{id}"
        );
    }
}

fn coefficient_has(p: &AsymPoly, key: TermKey, term: &str) -> bool {
    let t = EtaPoly::parse(term).unwrap();
    let (m, r) = t.terms().next().unwrap();
    p.coefficient(key).coefficient(m) == *r
}

#[test]
fn printed_rational_spot_checks() {
    let g = transcribed(EquationId::MleQuantile);
    assert!(coefficient_has(
        &g,
        TermKey::new(3, 4, 0),
        "-19/1728*eta3^3"
    ));
    let b = transcribed(EquationId::Bound);
    assert!(coefficient_has(&b, TermKey::new(3, 4, 0), "eta5/80"));
    let s = transcribed(EquationId::BoundVSymmetric);
    assert!(coefficient_has(&s, TermKey::new(3, 2, 0), "-5/162*eta3^3"));
    // Denominators are exact well past machine-friendly sizes.
    let m = EtaMonomial::ONE.with(Symbol::Eta3, 3);
    assert_eq!(
        g.coefficient(TermKey::new(3, 4, 0))
            .coefficient(&m)
            .denom()
            .to_string(),
        "1728"
    );
}

#[test]
fn lower_orders_of_one_sided_gap_vanish() {
    let start = Instant::now();
    let c = Catalog::new();
    let gap = c.derived(EquationId::OneSidedGap).unwrap();
    for k in 0..3 {
        assert!(gap.stratum(k).is_zero(), "order {k}");
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn one_sided_gap_factors_through_w() {
    let c = Catalog::new();
    let gap = c.derived(EquationId::OneSidedGap).unwrap();
    let check = gap.factor_check(3, &FactorPattern::third_order_gap());
    assert!(check.holds);
    assert_eq!(
        c.diff(EquationId::OneSidedGapFactored).status,
        Status::Matches
    );
}

#[test]
fn two_sided_gap_second_order() {
    let c = Catalog::new();
    let d = c.derived(EquationId::TwoSidedGap).unwrap();
    let expected =
        AsymPoly::parse("-W/8*zv^3*n^-1 + W/8*zu^3*n^-1 - W/8*zv^2*zu*n^-1 + W/8*zu^2*zv*n^-1")
            .unwrap();
    assert!(d.stratum(2).equals_expanded(&expected));
    assert!(d.coefficient(TermKey::new(2, 1, 0)).is_zero());
    assert!(d.coefficient(TermKey::new(2, 0, 1)).is_zero());
    assert_eq!(c.diff(EquationId::TwoSidedGap).status, Status::Matches);
}

#[test]
fn symmetric_bound_residual_is_missing_term() {
    let c = Catalog::new();
    let r = c.diff(EquationId::BoundVSymmetric);
    assert_eq!(r.status, Status::Differs);
    assert_eq!(
        r.residual.as_ref().unwrap().to_string(),
        "-1/24*eta3*z^4*n^-3/2"
    );
    // The derived z^4 coefficient at n^-3/2.
    let d = c.derived(EquationId::BoundVSymmetric).unwrap();
    let want =
        EtaPoly::parse("eta2*eta3/16 - 7/432*eta3^3 - eta3*eta4/72 + eta5/30 - eta6/8 - eta3/24")
            .unwrap();
    assert_eq!(d.coefficient(TermKey::new(3, 4, 0)), want);
}

#[test]
fn adjustment_cancels_and_printed_signs_differ() {
    let c = Catalog::new();
    let a = c.adjustment().unwrap();
    assert_eq!(
        a.derived,
        AsymPoly::parse("eta3*W/48*zv^2*zu^2*n^-3/2 + eta3*W/12*zv*zu*n^-3/2").unwrap()
    );
    assert!(a.derived_cancels());
    assert!(!a.printed_cancels());
    assert_eq!(
        a.difference.to_string(),
        "1/24*eta3*W*zv^2*zu^2*n^-3/2 + 1/6*eta3*W*zv*zu*n^-3/2"
    );
    // With the printed signs the gap doubles instead of cancelling.
    let twice = FactorPattern::third_order_gap()
        .at_order(3, Variables::Symmetric)
        .scale(&effgap_core::asympoly::rational(2, 1));
    assert!(a.printed_residual.equals_expanded(&twice));
    assert_eq!(c.diff(EquationId::AdjustedBoundV).status, Status::Differs);
}
