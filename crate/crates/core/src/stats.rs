//! Empirical summaries of draws: quantiles, kernel density, Kolmogorov–Smirnov.

use alloc::vec::Vec;

use crate::special::normal_pdf;
#[allow(unused_imports)] // inherent when std is in the dependency graph
use num_traits::Float;

/// Linear-interpolation quantile (Hyndman–Fan type 7) of ascending data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(xs: &[f64]) -> f64 {
    quantile_sorted(&sorted_copy(xs), 0.5)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Silverman's rule-of-thumb bandwidth.
pub fn silverman_bandwidth(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let sd = variance(sorted).sqrt();
    let iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.349) } else { sd };
    0.9 * spread * n.powf(-0.2)
}

/// Gaussian kernel density estimate at `x`; kernels beyond 8 bandwidths are skipped.
pub fn kde_sorted(sorted: &[f64], x: f64, bandwidth: f64) -> f64 {
    let start = sorted.partition_point(|&v| v < x - 8.0 * bandwidth);
    let end = sorted.partition_point(|&v| v <= x + 8.0 * bandwidth);
    let sum: f64 = sorted[start..end]
        .iter()
        .map(|&v| normal_pdf((x - v) / bandwidth))
        .sum();
    sum / (sorted.len() as f64 * bandwidth)
}

/// Two-sided Kolmogorov–Smirnov statistic; `cdf[i]` is the model CDF at `sorted[i]`.
pub fn ks_statistic(cdf: &[f64]) -> f64 {
    let n = cdf.len() as f64;
    cdf.iter()
        .enumerate()
        .map(|(i, &f)| {
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value of the KS statistic at significance `level`.
pub fn ks_critical(n: usize, level: f64) -> f64 {
    (-(0.5 * level).ln() / 2.0).sqrt() / (n as f64).sqrt()
}
