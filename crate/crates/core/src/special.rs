//! Standard normal distribution helpers.
//!
//! `normal_quantile` uses Wichura's AS241 rational approximation (about 1e-16
//! relative accuracy) followed by one Newton step on `normal_cdf`. Every
//! expansion evaluates its quantile variables through this function, and
//! they enter up to fourth powers.

// Published coefficients are kept digit for digit.
#![allow(clippy::excessive_precision)]

use core::f64::consts::{FRAC_1_SQRT_2, PI};

#[allow(unused_imports)] // inherent when std is in the dependency graph
use num_traits::Float;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `ln φ(x)`.
pub fn normal_log_pdf(x: f64) -> f64 {
    -0.5 * x * x - 0.5 * (2.0 * PI).ln()
}

/// Standard normal distribution function, accurate in the lower tail.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `ln Φ(x)` without underflow for very negative arguments.
pub fn normal_log_cdf(x: f64) -> f64 {
    if x > ASYMPTOTIC_BELOW {
        normal_cdf(x).ln()
    } else {
        normal_log_pdf(x) - (-x).ln() + mills_series(x).ln()
    }
}

/// `φ(x)/Φ(x)`, finite for all real x.
pub fn normal_mills_lower(x: f64) -> f64 {
    if x > ASYMPTOTIC_BELOW {
        normal_pdf(x) / normal_cdf(x)
    } else {
        -x / mills_series(x)
    }
}

// Φ(x) stays a normal float down to about −37.5.
const ASYMPTOTIC_BELOW: f64 = -37.0;

/// `-x Φ(x)/φ(x)` for large negative x; truncation error below 1e-13 at x = −37.
fn mills_series(x: f64) -> f64 {
    let r = 1.0 / (x * x);
    1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r * (1.0 - 9.0 * r))))
}

const A: [f64; 8] = [
    3.387_132_872_796_366_608e0,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34e0,
    4.630_337_846_156_545_295_9e0,
    5.769_497_221_460_691_405_5e0,
    3.647_848_324_763_204_605_04e0,
    1.270_458_252_452_368_382_58e0,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87e0,
    1.676_384_830_183_803_849_4e0,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2e0,
    5.463_784_911_164_114_369_9e0,
    1.784_826_539_917_291_335_8e0,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn horner(coeffs: &[f64; 8], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn as241(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * horner(&A, r) / horner(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        horner(&C, r) / horner(&D, r)
    } else {
        r -= 5.0;
        horner(&E, r) / horner(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Standard normal quantile function `Φ⁻¹(p)`.
///
/// Returns NaN outside `[0, 1]` and ±∞ at the end points.
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    // Work in the lower tail; 1 - p is exact for p >= 1/2.
    let (tail, sign) = if p > 0.5 { (1.0 - p, -1.0) } else { (p, 1.0) };
    let mut x = as241(tail);
    let density = normal_pdf(x);
    if density > 0.0 {
        x -= (normal_cdf(x) - tail) / density;
    }
    sign * x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_reference_values() {
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert!((normal_quantile(0.5)).abs() < 1e-16);
        assert!((normal_quantile(0.9) - 1.281_551_565_544_600_5).abs() < 1e-14);
        assert!((normal_quantile(1e-10) + 6.361_340_902_404_056).abs() < 1e-12);
        assert!(normal_quantile(1.5).is_nan());
        assert_eq!(normal_quantile(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn quantile_inverts_cdf_on_grid() {
        // 10^3 points spanning [1e-6, 1 - 1e-6].
        let lo: f64 = 1e-6;
        let hi: f64 = 1.0 - 1e-6;
        for k in 0..1000 {
            let p = lo + (hi - lo) * k as f64 / 999.0;
            let z = normal_quantile(p);
            assert!((normal_cdf(z) - p).abs() <= 1e-12, "p = {p}");
        }
    }

    #[test]
    fn quantile_is_odd() {
        // Levels whose complement is exact in binary.
        for &p in &[0.0078125, 0.125, 0.25, 0.375] {
            let (a, b) = (normal_quantile(p), -normal_quantile(1.0 - p));
            assert!((a - b).abs() <= 1e-15 * a.abs());
        }
    }

    #[test]
    fn log_cdf_matches_direct_and_asymptotic() {
        for &x in &[-29.0, -10.0, -1.0, 0.0, 3.0] {
            assert!((normal_log_cdf(x) - normal_cdf(x).ln()).abs() < 1e-12);
        }
        // The asymptotic branch agrees with the direct formula where both are valid.
        for x in [-37.1, -37.3] {
            let a = normal_log_cdf(x);
            let b = normal_cdf(x).ln();
            assert!((a - b).abs() / b.abs() < 1e-12);
            assert!((normal_mills_lower(x) / (normal_pdf(x) / normal_cdf(x)) - 1.0).abs() < 1e-12);
        }
    }
}
