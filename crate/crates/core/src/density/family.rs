//! Closed-form standardized densities and their score functions.

use core::f64::consts::{LN_2, PI};

use crate::special::{normal_log_cdf, normal_log_pdf, normal_mills_lower, normal_pdf};
#[allow(unused_imports)] // inherent when std is in the dependency graph
use num_traits::Float;

/// Density value and the score ratios `f^(i)/f`, i = 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub value: f64,
    pub psi: [f64; 3],
}

impl Scores {
    pub fn psi1(&self) -> f64 {
        self.psi[0]
    }
    pub fn psi2(&self) -> f64 {
        self.psi[1]
    }
    pub fn psi3(&self) -> f64 {
        self.psi[2]
    }
    /// `ψ₁' = ψ₂ − ψ₁²`.
    pub fn psi1_prime(&self) -> f64 {
        self.psi[1] - self.psi[0] * self.psi[0]
    }
}

/// `ln f` with its first two derivatives; finite well outside the working support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogJet {
    pub log_value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Scores from the derivatives of `ln f`.
pub(crate) fn scores_from_log_derivatives(value: f64, l1: f64, l2: f64, l3: f64) -> Scores {
    Scores {
        value,
        psi: [l1, l1 * l1 + l2, l1 * l1 * l1 + 3.0 * l1 * l2 + l3],
    }
}

pub(crate) mod normal {
    use super::*;

    pub fn scores(t: f64) -> Scores {
        scores_from_log_derivatives(normal_pdf(t), -t, -1.0, 0.0)
    }

    pub fn log_jet(t: f64) -> LogJet {
        LogJet {
            log_value: normal_log_pdf(t),
            d1: -t,
            d2: -1.0,
        }
    }
}

pub(crate) mod logistic {
    use super::*;

    /// `(σ(t), 1 − σ(t))` without cancellation.
    fn sigmoid_pair(t: f64) -> (f64, f64) {
        let e = (-t.abs()).exp();
        let big = 1.0 / (1.0 + e);
        let small = e / (1.0 + e);
        if t >= 0.0 {
            (big, small)
        } else {
            (small, big)
        }
    }

    pub fn value(t: f64) -> f64 {
        let e = (-t.abs()).exp();
        e / ((1.0 + e) * (1.0 + e))
    }

    pub fn cdf(t: f64) -> f64 {
        sigmoid_pair(t).0
    }

    pub fn quantile(p: f64) -> f64 {
        p.ln() - (-p).ln_1p()
    }

    pub fn scores(t: f64) -> Scores {
        let (s, u) = sigmoid_pair(t);
        let s2 = s * s;
        Scores {
            value: value(t),
            psi: [
                u - s,
                1.0 - 6.0 * s + 6.0 * s2,
                1.0 - 14.0 * s + 36.0 * s2 - 24.0 * s2 * s,
            ],
        }
    }

    pub fn log_jet(t: f64) -> LogJet {
        let a = t.abs();
        let (s, u) = sigmoid_pair(t);
        LogJet {
            log_value: -a - 2.0 * (-a).exp().ln_1p(),
            d1: u - s,
            d2: -2.0 * s * u,
        }
    }
}

pub(crate) mod student_t {
    use super::*;

    fn log_norm(df: f64) -> f64 {
        libm::lgamma(0.5 * (df + 1.0)) - libm::lgamma(0.5 * df) - 0.5 * (df * PI).ln()
    }

    fn log_derivatives(df: f64, t: f64) -> (f64, f64, f64) {
        let q = df + t * t;
        let l1 = -(df + 1.0) * t / q;
        let l2 = -(df + 1.0) * (df - t * t) / (q * q);
        let l3 = 2.0 * (df + 1.0) * t * (3.0 * df - t * t) / (q * q * q);
        (l1, l2, l3)
    }

    pub fn log_value(df: f64, t: f64) -> f64 {
        log_norm(df) - 0.5 * (df + 1.0) * (t * t / df).ln_1p()
    }

    pub fn scores(df: f64, t: f64) -> Scores {
        let (l1, l2, l3) = log_derivatives(df, t);
        scores_from_log_derivatives(log_value(df, t).exp(), l1, l2, l3)
    }

    pub fn log_jet(df: f64, t: f64) -> LogJet {
        let (l1, l2, _) = log_derivatives(df, t);
        LogJet {
            log_value: log_value(df, t),
            d1: l1,
            d2: l2,
        }
    }
}

pub(crate) mod skew_normal {
    use super::*;

    // With x = λt and M = φ(x)/Φ(x): M' = −M(x+M), M'' = M((x+M)(x+2M) − 1).
    fn log_derivatives(shape: f64, t: f64) -> (f64, f64, f64) {
        let x = shape * t;
        let m = normal_mills_lower(x);
        let xm = x + m;
        let l1 = -t + shape * m;
        let l2 = -1.0 - shape * shape * m * xm;
        let l3 = shape * shape * shape * m * (xm * (x + 2.0 * m) - 1.0);
        (l1, l2, l3)
    }

    pub fn log_value(shape: f64, t: f64) -> f64 {
        LN_2 + normal_log_pdf(t) + normal_log_cdf(shape * t)
    }

    pub fn scores(shape: f64, t: f64) -> Scores {
        let (l1, l2, l3) = log_derivatives(shape, t);
        scores_from_log_derivatives(log_value(shape, t).exp(), l1, l2, l3)
    }

    pub fn log_jet(shape: f64, t: f64) -> LogJet {
        let (l1, l2, _) = log_derivatives(shape, t);
        LogJet {
            log_value: log_value(shape, t),
            d1: l1,
            d2: l2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Central differences of ln f against the closed-form log-derivatives,
    // and ψ₁' = ψ₂ − ψ₁² on a 100-point grid.
    fn check_log_derivatives(log_f: impl Fn(f64) -> f64, scores: impl Fn(f64) -> Scores) {
        let h = 1e-4;
        for k in 0..100 {
            let t = -4.0 + 8.0 * k as f64 / 99.0;
            let s = scores(t);
            let d1 = (log_f(t + h) - log_f(t - h)) / (2.0 * h);
            let d2 = (log_f(t + h) - 2.0 * log_f(t) + log_f(t - h)) / (h * h);
            assert!(
                (d1 - s.psi1()).abs() < 1e-6,
                "psi1 at {t}: {d1} vs {}",
                s.psi1()
            );
            assert!(
                (d2 - s.psi1_prime()).abs() < 1e-6 * (1.0 + d2.abs()),
                "psi1' at {t}: {d2} vs {}",
                s.psi1_prime()
            );
            let psi1p = (scores(t + h).psi1() - scores(t - h).psi1()) / (2.0 * h);
            assert!((psi1p - s.psi1_prime()).abs() < 1e-6 * (1.0 + psi1p.abs()));
            // d/dt ψ₂ = ψ₃ − ψ₁ψ₂
            let psi2p = (scores(t + h).psi2() - scores(t - h).psi2()) / (2.0 * h);
            assert!(
                (psi2p - (s.psi3() - s.psi1() * s.psi2())).abs() < 1e-6 * (1.0 + psi2p.abs()),
                "psi3 at {t}"
            );
            assert!((log_f(t).exp() - s.value).abs() <= 1e-10 * s.value);
        }
    }

    #[test]
    fn normal_log_derivatives() {
        check_log_derivatives(normal_log_pdf, normal::scores);
        let s = normal::scores(1.0);
        assert_eq!(s.psi2(), 0.0);
        assert_eq!(normal::scores(1.5).psi1(), -1.5);
    }

    #[test]
    fn logistic_log_derivatives() {
        check_log_derivatives(|t| logistic::log_jet(t).log_value, logistic::scores);
        assert!((logistic::quantile(logistic::cdf(1.3)) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn student_t_log_derivatives() {
        for df in [4.5, 8.0, 30.0] {
            check_log_derivatives(
                |t| student_t::log_value(df, t),
                |t| student_t::scores(df, t),
            );
        }
    }

    #[test]
    fn skew_normal_log_derivatives() {
        for shape in [-3.0, 0.5, 2.0, 5.0] {
            check_log_derivatives(
                |t| skew_normal::log_value(shape, t),
                |t| skew_normal::scores(shape, t),
            );
        }
    }

    #[test]
    fn skew_normal_with_zero_shape_is_normal() {
        for t in [-2.0, 0.3, 1.7] {
            let a = skew_normal::scores(0.0, t);
            let b = normal::scores(t);
            assert!((a.value - b.value).abs() < 1e-15);
            for i in 0..3 {
                assert!((a.psi[i] - b.psi[i]).abs() < 1e-12);
            }
        }
    }
}
