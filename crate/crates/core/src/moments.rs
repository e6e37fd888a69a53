//! Score-moment functionals η₂…η₆, the combination W, and the checks that
//! tie them together.
//!
//! With `ψᵢ = f⁽ⁱ⁾/f`:
//! `η₂ = Eψ₂²`, `η₃ = Eψ₁³`, `η₄ = Eψ₁⁴`, `η₅ = Eψ₁⁵`, `η₆ = E ψ₂ψ₃` and
//! `W = 1 − η₂ + η₄/3 + η₃²/4`.

use alloc::format;
use alloc::string::String;

use crate::asympoly::EtaValues;
use crate::density::{LocationDensity, Scores};
use crate::quadrature::Estimate;
use crate::{Error, Result};
#[allow(unused_imports)] // inherent when std is in the dependency graph
use num_traits::Float;

/// `1 − η₂ + η₄/3 + η₃²/4`.
pub fn compute_w(eta2: f64, eta3: f64, eta4: f64) -> f64 {
    1.0 - eta2 + eta4 / 3.0 + eta3 * eta3 / 4.0
}

/// Tolerances used by the moment checks.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    /// Accepted `|I − 1|` before computing moments.
    pub normalization: f64,
    /// Accepted `|I − 1|` in the report.
    pub fisher: f64,
    /// Slack for `W ≤ 0`, the Cauchy–Schwarz margin and the sign constraints.
    pub w: f64,
    /// Slack for `Eψ₁²ψ₂ = (2/3)Eψ₁⁴`.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            normalization: 1e-6,
            fisher: 1e-8,
            w: 1e-7,
            identity: 1e-6,
        }
    }
}

/// Floor applied to every tolerance when derivatives come from finite differences.
pub const REDUCED_ACCURACY_TOLERANCE: f64 = 1e-5;

impl Tolerances {
    /// Defaults, widened for reduced-accuracy densities.
    pub fn for_density(d: &LocationDensity) -> Self {
        let t = Self::default();
        if d.reduced_accuracy() {
            t.widened(REDUCED_ACCURACY_TOLERANCE)
        } else {
            t
        }
    }

    pub fn widened(self, floor: f64) -> Self {
        Self {
            normalization: self.normalization.max(floor),
            fisher: self.fisher.max(floor),
            w: self.w.max(floor),
            identity: self.identity.max(floor),
        }
    }
}

/// The η-functionals of one density with their quadrature error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoreMoments {
    pub fisher: Estimate,
    pub eta2: Estimate,
    pub eta3: Estimate,
    pub eta4: Estimate,
    pub eta5: Estimate,
    pub eta6: Estimate,
    pub w: Estimate,
}

fn functional(d: &LocationDensity, name: &str, h: impl FnMut(&Scores) -> f64) -> Result<Estimate> {
    let r = d
        .expect_scores(h)
        .map_err(|e| e.context(format!("computing {name}")))?;
    if !(r.value.is_finite() && r.error.is_finite()) {
        return Err(Error::NonFiniteFunctional { name: name.into() });
    }
    Ok(r)
}

fn w_estimate(eta2: Estimate, eta3: Estimate, eta4: Estimate) -> Estimate {
    Estimate::new(
        compute_w(eta2.value, eta3.value, eta4.value),
        eta2.error + eta4.error / 3.0 + 0.5 * eta3.value.abs() * eta3.error,
    )
}

/// Functionals of any density, without the normalization requirement.
pub fn compute_raw_moments(d: &LocationDensity) -> Result<ScoreMoments> {
    let fisher = functional(d, "fisher", |s| s.psi1().powi(2))?;
    let eta2 = functional(d, "eta2", |s| s.psi2().powi(2))?;
    let eta3 = functional(d, "eta3", |s| s.psi1().powi(3))?;
    let eta4 = functional(d, "eta4", |s| s.psi1().powi(4))?;
    let eta5 = functional(d, "eta5", |s| s.psi1().powi(5))?;
    let eta6 = functional(d, "eta6", |s| s.psi2() * s.psi3())?;
    Ok(ScoreMoments {
        fisher,
        eta2,
        eta3,
        eta4,
        eta5,
        eta6,
        w: w_estimate(eta2, eta3, eta4),
    })
}

/// Functionals of a Fisher-normalized density.
///
/// Fails with [`Error::NotNormalized`] when `|I − 1|` exceeds the
/// normalization tolerance of [`Tolerances::for_density`].
pub fn compute_moments(d: &LocationDensity) -> Result<ScoreMoments> {
    require_normalized(d)?;
    compute_raw_moments(d)
}

/// Fisher information, or [`Error::NotNormalized`] when it is not 1 within
/// the normalization tolerance.
pub fn require_normalized(d: &LocationDensity) -> Result<Estimate> {
    let fisher = functional(d, "fisher", |s| s.psi1().powi(2))?;
    if (fisher.value - 1.0).abs() > Tolerances::for_density(d).normalization + fisher.error {
        return Err(Error::NotNormalized {
            fisher: fisher.value,
        });
    }
    Ok(fisher)
}

impl ScoreMoments {
    pub fn values(&self) -> EtaValues {
        EtaValues {
            eta2: self.eta2.value,
            eta3: self.eta3.value,
            eta4: self.eta4.value,
            eta5: self.eta5.value,
            eta6: self.eta6.value,
            w: self.w.value,
        }
    }

    /// The functionals the density would have after normalization.
    ///
    /// Rescaling by `c` multiplies `ψᵢ` by `c⁻ⁱ`, so each functional is divided
    /// by the matching power of `√I`.
    pub fn standardized(&self) -> ScoreMoments {
        let i = self.fisher.value;
        let div = |e: Estimate, p: f64| {
            let s = i.powf(p);
            Estimate::new(e.value / s, e.error / s)
        };
        let eta2 = div(self.eta2, 2.0);
        let eta3 = div(self.eta3, 1.5);
        let eta4 = div(self.eta4, 2.0);
        ScoreMoments {
            fisher: Estimate::new(1.0, self.fisher.error / i),
            eta2,
            eta3,
            eta4,
            eta5: div(self.eta5, 2.5),
            eta6: div(self.eta6, 2.5),
            w: w_estimate(eta2, eta3, eta4),
        }
    }

    /// Pass/fail of each functional against its constraint.
    pub fn check(&self, tol: &Tolerances) -> MomentReport {
        let finite = |e: Estimate| FunctionalCheck::new(e, 0.0, e.value.is_finite());
        let fisher_sq = self.fisher.value * self.fisher.value;
        MomentReport {
            fisher: FunctionalCheck::new(
                self.fisher,
                tol.fisher,
                (self.fisher.value - 1.0).abs() <= tol.fisher + self.fisher.error,
            ),
            eta2: FunctionalCheck::new(
                self.eta2,
                tol.w,
                self.eta2.value >= -(tol.w + self.eta2.error),
            ),
            eta3: finite(self.eta3),
            // Jensen: Eψ₁⁴ ≥ (Eψ₁²)².
            eta4: FunctionalCheck::new(
                self.eta4,
                tol.w,
                self.eta4.value >= fisher_sq - (tol.w + self.eta4.error + 2.0 * self.fisher.error),
            ),
            eta5: finite(self.eta5),
            eta6: finite(self.eta6),
            w: FunctionalCheck::new(self.w, tol.w, self.w.value <= tol.w + self.w.error),
        }
    }
}

/// One value with its error estimate, the tolerance it was judged at, and the verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FunctionalCheck {
    pub value: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl FunctionalCheck {
    pub fn new(e: Estimate, tolerance: f64, pass: bool) -> Self {
        Self {
            value: e.value,
            error: e.error,
            tolerance,
            pass,
        }
    }
}

/// Constraint checks for every functional: `I = 1`, `η₂ ≥ 0`, `η₄ ≥ I²`,
/// `W ≤ 0`, and finiteness for the odd ones.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentReport {
    pub fisher: FunctionalCheck,
    pub eta2: FunctionalCheck,
    pub eta3: FunctionalCheck,
    pub eta4: FunctionalCheck,
    pub eta5: FunctionalCheck,
    pub eta6: FunctionalCheck,
    #[cfg_attr(feature = "serde", serde(rename = "W"))]
    pub w: FunctionalCheck,
}

impl MomentReport {
    pub fn all_pass(&self) -> bool {
        [
            self.fisher,
            self.eta2,
            self.eta3,
            self.eta4,
            self.eta5,
            self.eta6,
            self.w,
        ]
        .iter()
        .all(|c| c.pass)
    }

    pub fn entries(&self) -> [(&'static str, FunctionalCheck); 7] {
        [
            ("fisher", self.fisher),
            ("eta2", self.eta2),
            ("eta3", self.eta3),
            ("eta4", self.eta4),
            ("eta5", self.eta5),
            ("eta6", self.eta6),
            ("W", self.w),
        ]
    }
}

/// Both sides of `Eψ₁²ψ₂ = (2/3)Eψ₁⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdentityReport {
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn verify_identity(d: &LocationDensity) -> Result<IdentityReport> {
    let tol = Tolerances::for_density(d);
    require_normalized(d)?;
    let lhs = functional(d, "E psi1^2 psi2", |s| s.psi1().powi(2) * s.psi2())?;
    let eta4 = functional(d, "eta4", |s| s.psi1().powi(4))?;
    let rhs = Estimate::new(2.0 / 3.0 * eta4.value, 2.0 / 3.0 * eta4.error);
    let difference = lhs.value - rhs.value;
    Ok(IdentityReport {
        lhs,
        rhs,
        difference,
        tolerance: tol.identity,
        pass: difference.abs() <= tol.identity + lhs.error + rhs.error,
    })
}

/// `(Eψ₁³)² ≤ 4 Eψ₁² var(ψ₁')` and `W ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CauchySchwarzReport {
    /// `(Eψ₁³)²`.
    pub lhs: Estimate,
    /// `4 Eψ₁² var(ψ₁')`.
    pub rhs: Estimate,
    /// `rhs − lhs`; equals `−4W` when the identity holds.
    pub margin: Estimate,
    pub tolerance: f64,
    pub inequality_pass: bool,
    /// `Eψ₁'`, computed rather than assumed.
    pub mean_psi1_prime: Estimate,
    /// `Eψ₁' + Eψ₁²`; zero for a regular density.
    pub regularity_residual: f64,
    pub var_psi1_prime: Estimate,
    pub w: FunctionalCheck,
}

impl CauchySchwarzReport {
    pub fn pass(&self) -> bool {
        self.inequality_pass && self.w.pass
    }
}

pub fn verify_cauchy_schwarz(d: &LocationDensity) -> Result<CauchySchwarzReport> {
    let tol = Tolerances::for_density(d);
    require_normalized(d)?;
    let m = compute_raw_moments(d)?;
    let mean = functional(d, "E psi1'", |s| s.psi1_prime())?;
    let second = functional(d, "E psi1'^2", |s| s.psi1_prime().powi(2))?;
    let var = Estimate::new(
        second.value - mean.value * mean.value,
        second.error + 2.0 * mean.value.abs() * mean.error,
    );
    let lhs = Estimate::new(
        m.eta3.value.powi(2),
        2.0 * m.eta3.value.abs() * m.eta3.error,
    );
    let rhs = Estimate::new(
        4.0 * m.fisher.value * var.value,
        4.0 * (m.fisher.value * var.error + var.value.abs() * m.fisher.error),
    );
    let margin = Estimate::new(rhs.value - lhs.value, rhs.error + lhs.error);
    Ok(CauchySchwarzReport {
        lhs,
        rhs,
        margin,
        tolerance: tol.w,
        inequality_pass: margin.value >= -(tol.w + margin.error),
        mean_psi1_prime: mean,
        regularity_residual: mean.value + m.fisher.value,
        var_psi1_prime: var,
        w: m.check(&tol).w,
    })
}

/// Human-readable one-liner, used in error contexts and logs.
pub fn describe(m: &ScoreMoments) -> String {
    format!(
        "I={:.10} eta2={:.10} eta3={:.10} eta4={:.10} eta5={:.10} eta6={:.10} W={:.3e}",
        m.fisher.value,
        m.eta2.value,
        m.eta3.value,
        m.eta4.value,
        m.eta5.value,
        m.eta6.value,
        m.w.value
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Component, DensityFunction};
    use alloc::sync::Arc;
    use alloc::vec;

    fn normalized(d: LocationDensity) -> LocationDensity {
        d.normalize().unwrap()
    }

    #[test]
    fn w_formula() {
        assert_eq!(compute_w(1.0, 0.0, 0.0), 0.0);
        assert_eq!(compute_w(2.0, 0.0, 3.0), 0.0);
    }

    #[test]
    fn gaussian_functionals() {
        let m = compute_moments(&LocationDensity::gaussian()).unwrap();
        let expected = [
            (m.eta2, 2.0),
            (m.eta3, 0.0),
            (m.eta4, 3.0),
            (m.eta5, 0.0),
            (m.eta6, 0.0),
            (m.w, 0.0),
        ];
        for (e, v) in expected {
            assert!((e.value - v).abs() <= 1e-8, "{e:?} vs {v}");
        }
        assert!(m.check(&Tolerances::default()).all_pass());
    }

    #[test]
    fn logistic_is_symmetric_with_negative_w() {
        let m = compute_moments(&normalized(LocationDensity::logistic())).unwrap();
        assert!(m.eta3.value.abs() < 1e-9);
        assert!(m.eta5.value.abs() < 1e-9);
        assert!(m.eta2.value > 0.0 && m.eta4.value > 0.0);
        // Under the logistic F(X) is uniform, so η₂ = η₄ = 9/5 after normalizing.
        assert!((m.w.value + 0.2).abs() < 1e-8, "{}", describe(&m));
        assert!(m.check(&Tolerances::default()).all_pass());
    }

    #[test]
    fn skew_normal_has_negative_w() {
        let m = compute_moments(&normalized(LocationDensity::skew_normal(2.0).unwrap())).unwrap();
        assert!(m.w.value < -1e-6, "{}", describe(&m));
        assert!(m.eta3.value.abs() > 1e-3);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        assert!(matches!(
            compute_moments(&LocationDensity::logistic()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn identity_examples() {
        let r = verify_identity(&LocationDensity::gaussian()).unwrap();
        assert!((r.lhs.value - 2.0).abs() < 1e-8 && (r.rhs.value - 2.0).abs() < 1e-8);
        assert!(r.pass);
        assert!(
            verify_identity(&normalized(LocationDensity::logistic()))
                .unwrap()
                .pass
        );
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let g = verify_cauchy_schwarz(&LocationDensity::gaussian()).unwrap();
        assert!(g.pass());
        assert!(g.lhs.value.abs() < 1e-12);
        assert!(g.w.value.abs() < 1e-8);
        assert!((g.mean_psi1_prime.value + 1.0).abs() < 1e-9);

        let s =
            verify_cauchy_schwarz(&normalized(LocationDensity::skew_normal(2.0).unwrap())).unwrap();
        assert!(s.pass());
        assert!(s.margin.value > 1e-6);
        assert!(s.w.value < 0.0);
        // margin = −4W once the identity holds.
        assert!((s.margin.value + 4.0 * s.w.value).abs() < 1e-7);
        assert!(s.regularity_residual.abs() < 1e-8);

        let t =
            verify_cauchy_schwarz(&normalized(LocationDensity::student_t(8.0).unwrap())).unwrap();
        assert!(t.lhs.value.abs() < 1e-12);
    }

    #[test]
    fn moments_are_shift_invariant() {
        let d = normalized(LocationDensity::skew_normal(2.0).unwrap());
        let a = compute_moments(&d).unwrap();
        let b = compute_moments(&d.with_location(3.7).unwrap()).unwrap();
        for (x, y) in [
            (a.eta2, b.eta2),
            (a.eta3, b.eta3),
            (a.eta4, b.eta4),
            (a.eta5, b.eta5),
            (a.eta6, b.eta6),
        ] {
            assert!((x.value - y.value).abs() < 1e-8);
        }
    }

    #[test]
    fn standardizing_commutes_with_normalizing() {
        let mix = LocationDensity::mixture(vec![
            Component {
                weight: 0.6,
                density: LocationDensity::gaussian(),
            },
            Component {
                weight: 0.4,
                density: LocationDensity::gaussian()
                    .with_location(1.5)
                    .unwrap()
                    .with_scale(0.7)
                    .unwrap(),
            },
        ])
        .unwrap();
        for d in [
            LocationDensity::skew_normal(2.0)
                .unwrap()
                .with_scale(1.7)
                .unwrap(),
            mix,
        ] {
            let a = compute_raw_moments(&d).unwrap().standardized();
            let b = compute_moments(&d.normalize().unwrap()).unwrap();
            for (x, y) in [
                (a.eta2, b.eta2),
                (a.eta3, b.eta3),
                (a.eta4, b.eta4),
                (a.eta5, b.eta5),
                (a.eta6, b.eta6),
                (a.w, b.w),
            ] {
                assert!((x.value - y.value).abs() < 1e-7, "{x:?} {y:?}");
            }
        }
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

    // ψ₁ = 2/x − x is not in L⁴, so η₄ diverges: that must be an error.
    #[test]
    fn divergent_functionals_are_errors() {
        let d = LocationDensity::custom(Arc::new(SquaredGaussian))
            .unwrap()
            .with_location(0.01)
            .unwrap();
        assert!(compute_raw_moments(&d).is_err());
        assert!(verify_identity(&d).is_err());
        assert!(LocationDensity::student_t(3.0).is_err());
    }
}
