//! Monte Carlo distribution of the normalized location MLE.
//!
//! Each replication draws `n` observations at `θ = 0`, solves the likelihood
//! equation, and records `√n·θ̂`. The generator for replication `r` is
//! ChaCha8 seeded with `seed` on stream `r`, so a replication does not depend
//! on which worker runs it or in what order. Results are gathered in
//! replication order and sorted before any summary is taken.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

#[allow(unused_imports)] // inherent when std is in the dependency graph
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asympoly::{AsymPoly, EtaValues};
use crate::catalog::{Catalog, EquationId};
use crate::density::LocationDensity;
use crate::special::normal_quantile;
use crate::stats::{kde_sorted, quantile_sorted, silverman_bandwidth, sorted_copy};
use crate::{Error, Result};

/// Grid size used to locate score roots when the likelihood may be multimodal.
pub const ROOT_GRID: usize = 256;
/// Half-width of the search bracket in units of the larger of the sample
/// and model interquartile ranges.
pub const BRACKET_IQRS: f64 = 10.0;
const MAX_ITERATIONS: usize = 200;

/// Location MLE for one density; caches what does not depend on the sample.
#[derive(Debug, Clone)]
pub struct MleSolver<'a> {
    density: &'a LocationDensity,
    spread: f64,
    unimodal: bool,
}

impl<'a> MleSolver<'a> {
    pub fn new(density: &'a LocationDensity) -> Result<Self> {
        Ok(Self {
            density,
            spread: density.spread()?,
            unimodal: density.is_log_concave(),
        })
    }

    /// Score `−Σψ₁(xᵢ − θ)`, its derivative `Σψ₁'(xᵢ − θ)`, and the log-likelihood.
    fn score(&self, xs: &[f64], theta: f64) -> Result<(f64, f64, f64)> {
        let (mut s, mut ds, mut ll) = (0.0, 0.0, 0.0);
        for &x in xs {
            let j = self.density.log_jet(x - theta)?;
            s -= j.d1;
            ds += j.d2;
            ll += j.log_value;
        }
        Ok((s, ds, ll))
    }

    /// Root of the score in `[lo, hi]` where it changes from positive to
    /// negative: Newton steps, falling back to bisection whenever a step
    /// leaves the bracket or the curvature has the wrong sign.
    fn polish(&self, xs: &[f64], mut lo: f64, mut hi: f64, start: f64) -> Result<(f64, f64)> {
        let mut theta = start.clamp(lo, hi);
        for _ in 0..MAX_ITERATIONS {
            let (s, ds, ll) = self.score(xs, theta)?;
            if s == 0.0 {
                return Ok((theta, ll));
            }
            if s > 0.0 {
                lo = theta;
            } else {
                hi = theta;
            }
            let newton = theta - s / ds;
            let next = if ds < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let tol = 1e-13 * (1.0 + next.abs());
            if (next - theta).abs() <= tol || hi - lo <= tol {
                let (_, _, ll) = self.score(xs, next)?;
                return Ok((next, ll));
            }
            theta = next;
        }
        Err(Error::MleNoConvergence)
    }

    /// Maximizer of `Σ log f(xᵢ − θ)`.
    ///
    /// Log-concave families have a single score root, found directly from
    /// the sample median. Other families scan [`ROOT_GRID`] points of the
    /// bracket for every local maximum, polish each, and keep the one with
    /// the highest likelihood.
    pub fn solve(&self, xs: &[f64]) -> Result<f64> {
        if xs.is_empty() {
            return Err(Error::EmptyList("sample"));
        }
        let sorted = sorted_copy(xs);
        let median = quantile_sorted(&sorted, 0.5);
        let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
        let half = BRACKET_IQRS * iqr.max(self.spread);
        let (lo, hi) = (median - half, median + half);

        if self.unimodal {
            let (s_lo, _, _) = self.score(xs, lo)?;
            let (s_hi, _, _) = self.score(xs, hi)?;
            if !(s_lo >= 0.0 && s_hi <= 0.0) {
                return Err(Error::MleNoConvergence);
            }
            return self.polish(xs, lo, hi, median).map(|r| r.0);
        }

        let step = (hi - lo) / (ROOT_GRID - 1) as f64;
        let mut best: Option<(f64, f64)> = None;
        let mut prev = (lo, self.score(xs, lo)?.0);
        for k in 1..ROOT_GRID {
            let t = if k == ROOT_GRID - 1 {
                hi
            } else {
                lo + step * k as f64
            };
            let s = self.score(xs, t)?.0;
            if prev.1 >= 0.0 && s <= 0.0 && !(prev.1 == 0.0 && k > 1) {
                let root = self.polish(xs, prev.0, t, 0.5 * (prev.0 + t))?;
                if best.is_none_or(|b| root.1 > b.1) {
                    best = Some(root);
                }
            }
            prev = (t, s);
        }
        best.map(|b| b.0).ok_or(Error::MleNoConvergence)
    }
}

/// Convenience wrapper around [`MleSolver`].
pub fn mle_solve(sample: &[f64], d: &LocationDensity) -> Result<f64> {
    MleSolver::new(d)?.solve(sample)
}

/// Runs replications; implementations may run them in parallel but must
/// return the outcomes in replication order.
pub trait RepRunner {
    fn run(&self, reps: usize, job: &(dyn Fn(usize) -> Result<f64> + Sync)) -> Vec<Result<f64>>;
}

/// Runs every replication on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl RepRunner for Sequential {
    fn run(&self, reps: usize, job: &(dyn Fn(usize) -> Result<f64> + Sync)) -> Vec<Result<f64>> {
        (0..reps).map(job).collect()
    }
}

/// How standard errors of the empirical quantiles are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "method"))]
pub enum SeMethod {
    /// `√(v(1−v)/N) / f̂(q_v)` with a Gaussian kernel density estimate.
    #[default]
    Analytic,
    /// Standard deviation over bootstrap resamples.
    Bootstrap { resamples: usize },
}

/// Default number of bootstrap resamples.
pub const BOOTSTRAP_RESAMPLES: usize = 500;
/// Smallest accepted replication count.
pub const MIN_REPS: usize = 1000;
/// Default tolerated fraction of failed replications.
pub const FAILURE_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct SimulationConfig {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub levels: Vec<f64>,
    pub se_method: SeMethod,
    pub failure_threshold: f64,
    /// Added to every observation and subtracted from every estimate.
    pub shift: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n: 25,
            reps: 10_000,
            seed: 1,
            levels: vec![0.5, 0.9, 0.975],
            se_method: SeMethod::Analytic,
            failure_threshold: FAILURE_THRESHOLD,
            shift: 0.0,
        }
    }
}

/// One replication: `√n·θ̂` from the sample on stream `rep`.
pub fn replicate(
    solver: &MleSolver<'_>,
    n: usize,
    seed: u64,
    rep: usize,
    shift: f64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    let mut xs = Vec::with_capacity(n);
    for _ in 0..n {
        xs.push(solver.density.draw(&mut rng)? + shift);
    }
    let theta = solver.solve(&xs)? - shift;
    Ok((n as f64).sqrt() * theta)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationResult {
    pub density: String,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub levels: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub se_method: SeMethod,
    pub failures: usize,
    pub failure_threshold: f64,
    /// False when the failure fraction exceeds the threshold.
    pub valid: bool,
    /// Successful replications, ascending.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub sorted: Vec<f64>,
    /// Bootstrap quantiles per resample, one row per resample.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub bootstrap: Vec<Vec<f64>>,
}

fn check_level(v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(v))
    }
}

/// Simulates `G_n` for a normalized density.
pub fn simulate_gn(
    d: &LocationDensity,
    cfg: &SimulationConfig,
    runner: &dyn RepRunner,
) -> Result<SimulationResult> {
    if cfg.levels.is_empty() {
        return Err(Error::EmptyList("levels"));
    }
    for &v in &cfg.levels {
        check_level(v)?;
    }
    if cfg.n == 0 {
        return Err(Error::InvalidParameter(
            "sample size n must be at least 1".into(),
        ));
    }
    if cfg.reps < MIN_REPS {
        return Err(Error::InvalidParameter(format!(
            "reps = {} is below the minimum of {MIN_REPS}",
            cfg.reps
        )));
    }
    if !(0.0..=1.0).contains(&cfg.failure_threshold) {
        return Err(Error::InvalidParameter(format!(
            "failure threshold {} is outside [0, 1]",
            cfg.failure_threshold
        )));
    }
    if !cfg.shift.is_finite() {
        return Err(Error::InvalidParameter("shift must be finite".into()));
    }
    crate::moments::require_normalized(d)?;

    let solver = MleSolver::new(d)?;
    let outcomes = runner.run(cfg.reps, &|rep| {
        replicate(&solver, cfg.n, cfg.seed, rep, cfg.shift)
    });
    let mut values = Vec::with_capacity(cfg.reps);
    let mut failures = 0;
    for o in outcomes {
        match o {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) | Err(Error::MleNoConvergence) => failures += 1,
            Err(e) => return Err(e.context("simulation replication")),
        }
    }
    if values.len() < 2 {
        return Err(Error::MleNoConvergence);
    }
    let sorted = sorted_copy(&values);
    let quantiles: Vec<f64> = cfg
        .levels
        .iter()
        .map(|&v| quantile_sorted(&sorted, v))
        .collect();

    let (standard_errors, bootstrap) = match cfg.se_method {
        SeMethod::Analytic => {
            let h = silverman_bandwidth(&sorted);
            let m = sorted.len() as f64;
            let se = cfg
                .levels
                .iter()
                .zip(&quantiles)
                .map(|(&v, &q)| (v * (1.0 - v) / m).sqrt() / kde_sorted(&sorted, q, h))
                .collect();
            (se, Vec::new())
        }
        SeMethod::Bootstrap { resamples } => {
            let rows = bootstrap_quantiles(&sorted, &cfg.levels, resamples.max(2), cfg.seed);
            let se = (0..cfg.levels.len())
                .map(|j| sd(rows.iter().map(|r| r[j])))
                .collect();
            (se, rows)
        }
    };

    let fraction = failures as f64 / cfg.reps as f64;
    Ok(SimulationResult {
        density: d.name(),
        n: cfg.n,
        reps: cfg.reps,
        seed: cfg.seed,
        levels: cfg.levels.clone(),
        quantiles,
        standard_errors,
        se_method: cfg.se_method,
        failures,
        failure_threshold: cfg.failure_threshold,
        valid: fraction <= cfg.failure_threshold,
        sorted,
        bootstrap,
    })
}

fn sd(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    (xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

// Resampling uses its own stream so it never overlaps a replication stream.
fn bootstrap_quantiles(
    sorted: &[f64],
    levels: &[f64],
    resamples: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let m = sorted.len();
    let mut counts = vec![0u32; m];
    let mut buf = Vec::with_capacity(m);
    (0..resamples)
        .map(|_| {
            counts.iter_mut().for_each(|c| *c = 0);
            for _ in 0..m {
                counts[rng.random_range(0..m)] += 1;
            }
            // Counting keeps the resample sorted without a second sort.
            buf.clear();
            for (x, &c) in sorted.iter().zip(&counts) {
                buf.extend(core::iter::repeat_n(*x, c as usize));
            }
            levels.iter().map(|&v| quantile_sorted(&buf, v)).collect()
        })
        .collect()
}

impl SimulationResult {
    fn index_of(&self, v: f64) -> Result<usize> {
        self.levels
            .iter()
            .position(|&l| (l - v).abs() <= 1e-12)
            .ok_or(Error::MissingLevel(v))
    }

    /// Empirical quantile and its standard error at a simulated level.
    pub fn quantile_at(&self, v: f64) -> Result<(f64, f64)> {
        let i = self.index_of(v)?;
        Ok((self.quantiles[i], self.standard_errors[i]))
    }

    /// Standard error of `q(a) − q(b)` for two simulated levels.
    pub fn difference_se(&self, a: f64, b: f64) -> Result<f64> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        if !self.bootstrap.is_empty() {
            return Ok(sd(self.bootstrap.iter().map(|r| r[ia] - r[ib])));
        }
        let h = silverman_bandwidth(&self.sorted);
        let m = self.sorted.len() as f64;
        let fa = kde_sorted(&self.sorted, self.quantiles[ia], h);
        let fb = kde_sorted(&self.sorted, self.quantiles[ib], h);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let var = (a * (1.0 - a) / (fa * fa) + b * (1.0 - b) / (fb * fb)
            - 2.0 * lo * (1.0 - hi) / (fa * fb))
            / m;
        Ok(var.max(0.0).sqrt())
    }

    pub fn failure_fraction(&self) -> f64 {
        self.failures as f64 / self.reps as f64
    }
}

/// Empirical one-sided quantile difference against `ε_v` at `v = 1 − α/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapEstimate {
    pub alpha: f64,
    pub n: usize,
    /// `q(1 − α/2) − q(1/2)`.
    pub empirical: f64,
    /// `ε_v` from the derived symmetric expansion.
    pub expansion: f64,
    /// `empirical − expansion`.
    pub gap: f64,
    pub se: f64,
}

pub fn empirical_gap(
    result: &SimulationResult,
    catalog: &Catalog,
    m: &EtaValues,
    alpha: f64,
) -> Result<GapEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidLevel(alpha));
    }
    let v = 1.0 - alpha / 2.0;
    let (qv, _) = result.quantile_at(v)?;
    let (qh, _) = result.quantile_at(0.5)?;
    let z = normal_quantile(v);
    let eps_v = catalog.authoritative(EquationId::BoundVSymmetric)?;
    let expansion = eps_v.evaluate(m, z, 0.0, result.n as u64)?;
    let empirical = qv - qh;
    Ok(GapEstimate {
        alpha,
        n: result.n,
        empirical,
        expansion,
        gap: empirical - expansion,
        se: result.difference_se(v, 0.5)?,
    })
}

/// Sign agreement between a simulated gap and a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SignCheck {
    Agrees,
    Disagrees,
    /// `|gap|` is within the resolution of the simulation.
    Unresolved,
}

/// Compares signs only when `|gap|` exceeds `k` standard errors.
pub fn sign_check(gap: f64, se: f64, predicted: f64, k: f64) -> SignCheck {
    if gap.abs() < k * se || predicted == 0.0 {
        SignCheck::Unresolved
    } else if gap.signum() == predicted.signum() {
        SignCheck::Agrees
    } else {
        SignCheck::Disagrees
    }
}

/// One CSV row: the empirical quantile at `v` against the median-centred
/// quantile expansion at `Φ⁻¹(v)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationRow {
    pub density: String,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub v: f64,
    pub empirical_q: f64,
    pub se: f64,
    pub expansion_q: f64,
    /// `(q(v) − q(1/2)) − expansion_q`; blank when the median was not simulated.
    pub gap: Option<f64>,
}

pub fn expansion_rows(
    result: &SimulationResult,
    expansion: &AsymPoly,
    m: &EtaValues,
) -> Result<Vec<SimulationRow>> {
    let median = result.quantile_at(0.5).ok().map(|q| q.0);
    result
        .levels
        .iter()
        .zip(result.quantiles.iter().zip(&result.standard_errors))
        .map(|(&v, (&q, &se))| {
            let e = expansion.evaluate(m, normal_quantile(v), 0.0, result.n as u64)?;
            Ok(SimulationRow {
                density: result.density.clone(),
                n: result.n,
                reps: result.reps,
                seed: result.seed,
                v,
                empirical_q: q,
                se,
                expansion_q: e,
                gap: median.map(|h| q - h - e),
            })
        })
        .collect()
}
