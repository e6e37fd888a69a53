use super::*;
use alloc::string::ToString;
use alloc::vec::Vec;
use proptest::prelude::*;

fn eta(s: &str) -> EtaPoly {
    EtaPoly::parse(s).unwrap()
}

fn poly(s: &str) -> AsymPoly {
    AsymPoly::parse(s).unwrap()
}

fn gaussian() -> EtaValues {
    EtaValues::new(2.0, 0.0, 3.0, 0.0, 0.0)
}

#[test]
fn subtracting_self_gives_zero() {
    let p = poly("eta3/12*zv^2*n^-1/2 + zv - zu");
    assert!(p.sub(&p).is_zero());
    assert_eq!(p.sub(&p).to_string(), "0");
}

#[test]
fn scaling_by_two() {
    let p = poly("eta3/12*zv");
    let q = p.scale(&rational(2, 1));
    assert_eq!(q.coefficient(TermKey::new(0, 1, 0)), eta("1/6*eta3"));
}

#[test]
fn substitution_sign_rule() {
    let p = poly("7/5*eta2*zv^2*zu*n^-1");
    let s = p.substitute_symmetric();
    assert_eq!(s.variables(), Variables::Symmetric);
    assert_eq!(s, AsymPoly::parse("-7/5*eta2*z^3*n^-1").unwrap());
    // Even powers with no zu only change the variable name.
    let e = poly("eta4*zv^4 + zv^2*n^-1");
    assert_eq!(e.substitute_symmetric().to_string(), "eta4*z^4 + z^2*n^-1");
}

#[test]
fn evaluation_examples() {
    let m = gaussian();
    assert_eq!(
        AsymPoly::zero(Variables::Split)
            .evaluate(&m, 1.3, -0.2, 7)
            .unwrap(),
        0.0
    );
    assert_eq!(poly("zv").evaluate(&m, 1.96, 0.0, 10).unwrap(), 1.96);
    let s = poly("zv*n^-1/2 + zv*n^-1 + zv*n^-3/2")
        .evaluate_strata(&m, 1.0, 0.0, 4)
        .unwrap();
    assert_eq!(s, [0.0, 0.5, 0.25, 0.125]);
    assert!(matches!(
        poly("zv").evaluate(&m, 1.0, 0.0, 0),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        poly("zv").evaluate(&m, f64::INFINITY, 0.0, 3),
        Err(Error::NonFiniteResult)
    ));
}

#[test]
fn gap_pattern_vanishes_at_gaussian_moments() {
    let gap = FactorPattern::third_order_gap().at_order(3, Variables::Symmetric);
    for z in [0.3, 1.0, 1.96, 3.5] {
        for n in [1, 25, 10_000] {
            assert_eq!(gap.evaluate(&gaussian(), z, 0.0, n).unwrap(), 0.0);
        }
    }
}

#[test]
fn factor_check_self_and_perturbed() {
    let pattern = FactorPattern::third_order_gap();
    let p = pattern.at_order(3, Variables::Symmetric).expand_w();
    let c = p.factor_check(3, &pattern);
    assert!(c.holds);
    assert!(c.residual.expand_w().is_zero());

    let extra = AsymPoly::parse("1/1000*z^2*n^-3/2").unwrap();
    let c = p.add(&extra).factor_check(3, &pattern);
    assert!(!c.holds);
    assert_eq!(c.residual.expand_w(), extra);
}

#[test]
fn bounds_are_enforced() {
    assert!(AsymPoly::parse("zv^5").is_err());
    assert!(AsymPoly::parse("zv^3*zu^2").is_err());
    assert!(AsymPoly::parse("zv*n^-2").is_err());
    assert!(AsymPoly::parse("z*zv").is_err());
    assert!(AsymPoly::parse_as("zu", Variables::Symmetric).is_err());
}

#[test]
fn rendering_format() {
    let p = poly("-5/72*eta4*zv^3*n^-1 + eta3/12*zv^2*n^-1/2 + zv - zu - 1/8*W*zv^2*zu*n^-1");
    assert_eq!(
        p.to_string(),
        "zv - zu + 1/12*eta3*zv^2*n^-1/2 - 5/72*eta4*zv^3*n^-1 - 1/8*W*zv^2*zu*n^-1"
    );
    assert_eq!(
        eta("1 - eta2 + eta4/3 + eta3^2/4").to_string(),
        "1 + 1/3*eta4 + 1/4*eta3^2 - eta2"
    );
    assert_eq!(EtaPoly::w_definition(), eta("1 - eta2 + eta4/3 + eta3^2/4"));
}

#[test]
fn parser_accepts_unicode_operators_and_reports_positions() {
    assert_eq!(poly("\u{2212}1/24\u{b7}eta3\u{b7}zv"), poly("-eta3*zv/24"));
    match AsymPoly::parse("zv + foo") {
        Err(Error::Parse { position, .. }) => assert_eq!(position, 5),
        other => panic!("{other:?}"),
    }
    assert!(AsymPoly::parse("zv +").is_err());
    assert!(AsymPoly::parse("1/0").is_err());
    assert!(EtaPoly::parse("eta2*zv").is_err());
}

#[test]
fn swap_moves_expansion_to_lower_level() {
    let g = poly("zv + eta3/12*zv^2*n^-1/2");
    assert_eq!(g.swap_variables(), poly("zu + eta3/12*zu^2*n^-1/2"));
}

// Small random polynomials over a fixed key and monomial vocabulary.
fn arb_poly(vars: Variables) -> impl Strategy<Value = AsymPoly> {
    let keys: Vec<TermKey> = (0..=MAX_ORDER)
        .flat_map(|o| {
            (0..=4u8).flat_map(move |a| (0..=4u8 - a).map(move |b| TermKey::new(o, a, b)))
        })
        .filter(|k| vars == Variables::Split || k.zu == 0)
        .collect();
    let monos = [
        EtaMonomial::ONE,
        EtaMonomial::symbol(Symbol::Eta2),
        EtaMonomial::symbol(Symbol::Eta3).with(Symbol::Eta3, 2),
        EtaMonomial::symbol(Symbol::Eta3).with(Symbol::Eta4, 1),
        EtaMonomial::symbol(Symbol::Eta5),
        EtaMonomial::symbol(Symbol::Eta6),
        EtaMonomial::symbol(Symbol::W).with(Symbol::Eta3, 1),
    ];
    proptest::collection::vec(
        (0..keys.len(), 0..monos.len(), -50i64..50, 1i64..1729),
        0..8,
    )
    .prop_map(move |entries| {
        let mut p = AsymPoly::zero(vars);
        for (k, m, num, den) in entries {
            p.add_term(keys[k], EtaPoly::term(rational(num, den), monos[m]))
                .unwrap();
        }
        p
    })
}

fn arb_values() -> impl Strategy<Value = (EtaValues, f64, u64)> {
    (
        0.5f64..4.0,
        -2.0f64..2.0,
        1.0f64..8.0,
        -3.0f64..3.0,
        -3.0f64..3.0,
        -3.0f64..3.0,
        1u64..500,
    )
        .prop_map(|(e2, e3, e4, e5, e6, z, n)| (EtaValues::new(e2, e3, e4, e5, e6), z, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn difference_then_sum_is_exact(p in arb_poly(Variables::Split), q in arb_poly(Variables::Split)) {
        prop_assert_eq!(p.sub(&q).add(&q), p.clone());
        prop_assert_eq!(p.add(&q), q.add(&p));
    }

    #[test]
    fn substitution_is_linear(p in arb_poly(Variables::Split), q in arb_poly(Variables::Split)) {
        prop_assert_eq!(
            p.add(&q).substitute_symmetric(),
            p.substitute_symmetric().add(&q.substitute_symmetric())
        );
    }

    #[test]
    fn evaluation_commutes_with_substitution(p in arb_poly(Variables::Split), (m, z, n) in arb_values()) {
        let direct = p.evaluate(&m, z, -z, n).unwrap();
        let subst = p.substitute_symmetric().evaluate(&m, z, 0.0, n).unwrap();
        // Relative to the magnitude of the summed terms, which bounds cancellation.
        let mut scale = 0.0;
        for (k, c) in p.terms() {
            scale += c.evaluate_abs(&m) * z.abs().powi((k.zv + k.zu) as i32);
        }
        prop_assert!((direct - subst).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn render_parse_round_trip(p in arb_poly(Variables::Split), s in arb_poly(Variables::Symmetric)) {
        prop_assert_eq!(AsymPoly::parse_as(&p.to_string(), Variables::Split).unwrap(), p.clone());
        prop_assert_eq!(AsymPoly::parse_as(&s.to_string(), Variables::Symmetric).unwrap(), s);
    }

    #[test]
    fn expanding_w_preserves_value(p in arb_poly(Variables::Split), (m, z, n) in arb_values()) {
        let a = p.evaluate(&m, z, 0.7, n).unwrap();
        let b = p.expand_w().evaluate(&m, z, 0.7, n).unwrap();
        let mut scale = 0.0;
        for (k, c) in p.expand_w().terms().chain(p.terms()) {
            scale += c.evaluate_abs(&m) * z.abs().powi(k.zv as i32) * 0.7f64.powi(k.zu as i32);
        }
        prop_assert!((a - b).abs() <= 1e-12 * scale.max(1e-300));
    }
}
