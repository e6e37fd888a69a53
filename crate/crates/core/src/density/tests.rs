use super::*;
use crate::stats::{ks_critical, ks_statistic, mean, sorted_copy, variance};
use alloc::vec;

fn builtins() -> Vec<LocationDensity> {
    vec![
        LocationDensity::gaussian(),
        LocationDensity::logistic(),
        LocationDensity::student_t(8.0).unwrap(),
        LocationDensity::skew_normal(2.0).unwrap(),
        LocationDensity::mixture(vec![
            Component {
                weight: 0.7,
                density: LocationDensity::gaussian(),
            },
            Component {
                weight: 0.3,
                density: LocationDensity::gaussian()
                    .with_location(2.0)
                    .unwrap()
                    .with_scale(0.5)
                    .unwrap(),
            },
        ])
        .unwrap(),
    ]
}

#[test]
fn psi_examples() {
    let d = LocationDensity::gaussian();
    assert_eq!(d.psi(1, 0.0).unwrap(), 0.0);
    assert_eq!(d.psi(1, 1.5).unwrap(), -1.5);
    assert_eq!(d.psi(2, 1.0).unwrap(), 0.0);
    assert!(matches!(d.psi(4, 0.0), Err(Error::InvalidParameter(_))));
}

#[test]
fn psi_refused_where_density_underflows() {
    let d = LocationDensity::gaussian();
    assert!(matches!(d.psi(1, 50.0), Err(Error::Underflow { .. })));
}

#[test]
fn psi_times_density_is_derivative() {
    for d in builtins() {
        for k in 0..50 {
            let x = -3.0 + 6.0 * k as f64 / 49.0;
            let f = d.value(x);
            for i in 1..=3 {
                let lhs = d.psi(i, x).unwrap() * f;
                let rhs = d.derivative(i, x);
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(f),
                    "{} i={i} x={x}",
                    d.name()
                );
            }
        }
    }
}

#[test]
fn score_identities_by_finite_differences() {
    let h = 1e-4;
    for d in builtins() {
        for k in 0..100 {
            let x = -3.0 + 6.0 * k as f64 / 99.0;
            let s = d.scores(x).unwrap();
            let dpsi1 = (d.psi(1, x + h).unwrap() - d.psi(1, x - h).unwrap()) / (2.0 * h);
            assert!((dpsi1 - s.psi1_prime()).abs() < 1e-6, "{} at {x}", d.name());
            let dpsi2 = (d.psi(2, x + h).unwrap() - d.psi(2, x - h).unwrap()) / (2.0 * h);
            assert!(
                (dpsi2 - (s.psi3() - s.psi1() * s.psi2())).abs() < 1e-6,
                "{} at {x}",
                d.name()
            );
            let dlog = (d.value(x + h).ln() - d.value(x - h).ln()) / (2.0 * h);
            assert!((dlog - s.psi1()).abs() < 1e-6);
        }
    }
}

#[test]
fn log_jet_agrees_with_scores() {
    for d in builtins() {
        for k in 0..40 {
            let x = -3.0 + 6.0 * k as f64 / 39.0;
            let s = d.scores(x).unwrap();
            let j = d.log_jet(x).unwrap();
            assert!((j.log_value - s.value.ln()).abs() < 1e-12, "{}", d.name());
            assert!((j.d1 - s.psi1()).abs() < 1e-10);
            assert!((j.d2 - s.psi1_prime()).abs() < 1e-9);
        }
    }
    // Far tails stay finite where the density itself underflows.
    let j = LocationDensity::gaussian().log_jet(60.0).unwrap();
    assert_eq!(j.d1, -60.0);
}

#[test]
fn densities_integrate_to_one() {
    for d in builtins() {
        let r = d.expectation(|_| Ok(1.0)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{}", d.name());
        assert!(d.support().tail_mass < 1e-10);
    }
}

#[test]
fn gaussian_expectations() {
    let d = LocationDensity::gaussian();
    assert!(d.expectation(Ok).unwrap().value.abs() < 1e-10);
    assert!((d.expectation(|x| Ok(x.powi(4))).unwrap().value - 3.0).abs() < 1e-8);
}

#[test]
fn fisher_information_examples() {
    let i = LocationDensity::gaussian().fisher_information().unwrap();
    assert!((i.value - 1.0).abs() < 1e-9);
    let i = LocationDensity::logistic().fisher_information().unwrap();
    assert!((i.value - 1.0 / 3.0).abs() < 1e-8);
    // (ν+1)/(ν+3) for Student-t.
    let i = LocationDensity::student_t(8.0)
        .unwrap()
        .fisher_information()
        .unwrap();
    assert!((i.value - 9.0 / 11.0).abs() < 1e-8);
}

#[test]
fn normalize_examples() {
    let g = LocationDensity::gaussian().normalize().unwrap();
    assert!((g.scale() - 1.0).abs() < 1e-10);

    let l = LocationDensity::logistic().normalize().unwrap();
    assert!((l.scale() - 1.0 / 3f64.sqrt()).abs() < 1e-9);
    assert!((l.fisher_information().unwrap().value - 1.0).abs() < 1e-8);

    let once = LocationDensity::logistic().normalize().unwrap();
    let twice_scaled = LocationDensity::logistic()
        .with_scale(2.0)
        .unwrap()
        .normalize()
        .unwrap();
    assert!((once.scale() - twice_scaled.scale()).abs() < 1e-10);
}

#[test]
fn every_builtin_normalizes_to_unit_fisher_information() {
    for d in builtins() {
        let n = d.normalize().unwrap();
        assert!(
            (n.fisher_information().unwrap().value - 1.0).abs() < 1e-8,
            "{}",
            d.name()
        );
    }
}

#[test]
fn normalize_is_idempotent() {
    for d in builtins() {
        let once = d.normalize().unwrap();
        let twice = once.normalize().unwrap();
        for k in 0..21 {
            let x = -2.0 + 0.2 * k as f64;
            assert!((once.value(x) - twice.value(x)).abs() < 1e-10);
            for i in 1..=3 {
                assert!((once.psi(i, x).unwrap() - twice.psi(i, x).unwrap()).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(LocationDensity::student_t(3.0).is_err());
    assert!(LocationDensity::gaussian().with_scale(-1.0).is_err());
    assert!(LocationDensity::skew_normal(f64::INFINITY).is_err());
    assert!(LocationDensity::mixture(vec![]).is_err());
}

#[test]
fn finite_difference_fallback_is_flagged_and_close() {
    let exact = LocationDensity::skew_normal(2.0).unwrap();
    let fd = exact
        .clone()
        .with_derivatives(Derivatives::FiniteDifference);
    assert!(fd.reduced_accuracy());
    assert!(!exact.reduced_accuracy());
    for k in 0..20 {
        let x = -2.0 + 0.25 * k as f64;
        for i in 1..=3 {
            let a = exact.psi(i, x).unwrap();
            let b = fd.psi(i, x).unwrap();
            assert!(
                (a - b).abs() < 1e-4 * (1.0 + a.abs()),
                "i={i} x={x}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn sampling_is_seeded() {
    let d = LocationDensity::skew_normal(2.0).unwrap();
    assert_eq!(d.sample(5, 42).unwrap(), d.sample(5, 42).unwrap());
    assert_ne!(d.sample(5, 42).unwrap(), d.sample(5, 43).unwrap());
}

#[test]
fn gaussian_sample_mean() {
    let xs = LocationDensity::gaussian().sample(1_000_000, 11).unwrap();
    assert!(mean(&xs).abs() < 4.0 / 1000.0);
}

#[test]
fn logistic_sample_variance_matches_quadrature() {
    let d = LocationDensity::logistic().normalize().unwrap();
    let var = d.expectation(|x| Ok(x * x)).unwrap().value;
    let xs = d.sample(1_000_000, 5).unwrap();
    assert!((variance(&xs) / var - 1.0).abs() < 0.01);
}

#[test]
fn samples_pass_ks_against_quadrature_cdf() {
    for d in builtins() {
        let xs = sorted_copy(&d.sample(100_000, 2024).unwrap());
        let cdf = d.cdf_sorted(&xs).unwrap();
        let stat = ks_statistic(&cdf);
        assert!(
            stat < ks_critical(xs.len(), 0.001),
            "{}: D = {stat}",
            d.name()
        );
    }
}

#[test]
fn quadrature_cdf_and_quantile_invert() {
    let d = LocationDensity::student_t(8.0).unwrap();
    for p in [0.01, 0.3, 0.5, 0.9] {
        let x = d.quantile(p).unwrap();
        assert!((d.cdf(x).unwrap() - p).abs() < 1e-10);
    }
    assert!(d.quantile(0.5).unwrap().abs() < 1e-9);
    let g = LocationDensity::gaussian();
    assert!((g.spread().unwrap() - 1.348_979_500_392_163_4).abs() < 1e-12);
}

#[derive(Debug)]
struct SquaredGaussian;

impl DensityFunction for SquaredGaussian {
    fn name(&self) -> String {
        "x^2*phi(x)".into()
    }
    fn value(&self, t: f64) -> f64 {
        t * t * crate::special::normal_pdf(t)
    }
}

#[test]
fn custom_density_uses_finite_differences() {
    let d = LocationDensity::custom(Arc::new(SquaredGaussian)).unwrap();
    assert!(d.reduced_accuracy());
    // ψ₁ = 2/x − x
    let x = 1.3;
    assert!((d.psi(1, x).unwrap() - (2.0 / x - x)).abs() < 1e-6);
    let draws = d.sample(3, 1).unwrap();
    assert_eq!(draws.len(), 3);
}
