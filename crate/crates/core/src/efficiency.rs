//! Efficiency report: density → moments → catalog evaluations → gaps, with
//! an optional Monte Carlo cross-check.
//!
//! Every expansion is evaluated from the authoritative catalog polynomial,
//! which is the derived form wherever a derivation exists.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt::Write as _;

use crate::asympoly::{AsymPoly, EtaValues};
use crate::catalog::{Catalog, EquationId, Status};
use crate::density::LocationDensity;
use crate::moments::{compute_moments, FunctionalCheck, MomentReport, ScoreMoments, Tolerances};
use crate::simulate::{
    empirical_gap, sign_check, simulate_gn, RepRunner, SignCheck, SimulationConfig,
};
use crate::special::normal_quantile;
use crate::{Error, Result};

/// Version of the serialized report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Multiple of the standard error below which a simulated sign is not trusted.
pub const SIGN_RESOLUTION: f64 = 3.0;

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(normal_quantile(1.0 - alpha / 2.0))
    } else {
        Err(Error::InvalidLevel(alpha))
    }
}

/// `(η₃/48)·W·(z⁴ − 4z²)·n^(−3/2)` at a given `z`.
pub fn third_order_gap_at(catalog: &Catalog, m: &EtaValues, z: f64, n: u64) -> Result<f64> {
    catalog
        .authoritative(EquationId::OneSidedGapFactored)?
        .evaluate(m, z, 0.0, n)
}

/// Third-order one-sided gap at `z = Φ⁻¹(1 − α/2)`.
pub fn third_order_gap(catalog: &Catalog, m: &EtaValues, alpha: f64, n: u64) -> Result<f64> {
    let z = check_alpha(alpha)?;
    third_order_gap_at(catalog, m, z, n)
}

/// Polynomials evaluated for every report cell, resolved once.
struct Expansions<'a> {
    g: &'a AsymPoly,
    eps_v: &'a AsymPoly,
    gap: &'a AsymPoly,
    two_sided: &'a AsymPoly,
    adjusted: &'a AsymPoly,
    adjusted_printed: &'a AsymPoly,
}

impl<'a> Expansions<'a> {
    fn new(c: &'a Catalog) -> Result<Self> {
        let adj = c.adjustment()?;
        Ok(Self {
            g: c.authoritative(EquationId::MleQuantile)?,
            eps_v: c.authoritative(EquationId::BoundVSymmetric)?,
            gap: c.authoritative(EquationId::OneSidedGapFactored)?,
            two_sided: c.authoritative(EquationId::TwoSidedGap)?,
            adjusted: &adj.derived_residual,
            adjusted_printed: &adj.printed_residual,
        })
    }

    fn row(&self, m: &EtaValues, alpha: f64, n: u64) -> Result<GapRow> {
        let z = check_alpha(alpha)?;
        Ok(GapRow {
            alpha,
            n,
            z,
            epsilon_v: self.eps_v.evaluate(m, z, 0.0, n)?,
            g_expansion: self.g.evaluate(m, z, 0.0, n)?,
            third_order_gap: self.gap.evaluate(m, z, 0.0, n)?,
            two_sided_strata: self.two_sided.evaluate_strata(m, z, -z, n)?,
            adjusted_gap: self.adjusted.evaluate(m, z, 0.0, n)?,
            adjusted_gap_printed: self.adjusted_printed.evaluate(m, z, 0.0, n)?,
        })
    }
}

/// One `(α, n)` cell. The symmetric levels are `v = 1 − α/2`, `u = α/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapRow {
    pub alpha: f64,
    pub n: u64,
    /// `Φ⁻¹(1 − α/2)`.
    pub z: f64,
    pub epsilon_v: f64,
    /// `G_n⁻¹(v) − G_n⁻¹(1/2)` from the expansion.
    pub g_expansion: f64,
    pub third_order_gap: f64,
    /// Two-sided gap by order: `n^0`, `n^(−1/2)`, `n^(−1)`, `n^(−3/2)`.
    pub two_sided_strata: [f64; 4],
    /// One-sided gap after the derived adjustment; zero through `n^(−3/2)`.
    pub adjusted_gap: f64,
    /// The same with the printed adjustment terms.
    pub adjusted_gap_printed: f64,
}

/// Status of one catalog entry in rendered form.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlgebraEntry {
    pub id: EquationId,
    pub status: Status,
    pub residual: Option<String>,
    pub recipe: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdjustmentSummary {
    pub derived: String,
    pub printed: String,
    pub difference: String,
    pub derived_cancels: bool,
    pub printed_cancels: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlgebraSummary {
    pub all_recipes_succeeded: bool,
    pub entries: Vec<AlgebraEntry>,
    pub adjustment: Option<AdjustmentSummary>,
}

impl AlgebraSummary {
    pub fn from_catalog(c: &Catalog) -> Self {
        let entries = c
            .entries()
            .iter()
            .map(|e| AlgebraEntry {
                id: e.id,
                status: e.report.status,
                residual: e.report.residual.as_ref().map(ToString::to_string),
                recipe: e.report.recipe.into(),
            })
            .collect();
        let adjustment = c.adjustment().ok().map(|a| AdjustmentSummary {
            derived: a.derived.to_string(),
            printed: a.printed.to_string(),
            difference: a.difference.to_string(),
            derived_cancels: a.derived_cancels(),
            printed_cancels: a.printed_cancels(),
        });
        Self {
            all_recipes_succeeded: c.all_recipes_succeeded(),
            entries,
            adjustment,
        }
    }
}

/// Simulated counterpart of one report cell.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationCheck {
    pub alpha: f64,
    pub n: u64,
    pub reps: usize,
    /// `q(1 − α/2) − q(1/2)` of `√n·θ̂`.
    pub empirical: f64,
    pub epsilon_v: f64,
    /// `empirical − epsilon_v`.
    pub gap: f64,
    pub se: f64,
    pub order3_prediction: f64,
    pub sign: SignCheck,
    pub failures: usize,
    pub valid: bool,
}

/// Monte Carlo settings for [`build_report`]; `n` and `levels` are set per cell.
pub struct SimulationSettings<'a> {
    pub config: SimulationConfig,
    pub runner: &'a dyn RepRunner,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EfficiencyReport {
    pub schema_version: u32,
    pub density: String,
    pub tolerances: Tolerances,
    pub moments: ScoreMoments,
    pub checks: MomentReport,
    /// `W ≤ 0` at the `W` tolerance.
    pub w_nonpositive: FunctionalCheck,
    pub rows: Vec<GapRow>,
    pub algebra: AlgebraSummary,
    pub simulation: Option<Vec<SimulationCheck>>,
}

/// Assembles the full report for a normalized density.
pub fn build_report(
    d: &LocationDensity,
    catalog: &Catalog,
    alphas: &[f64],
    ns: &[u64],
    simulation: Option<&SimulationSettings<'_>>,
) -> Result<EfficiencyReport> {
    if alphas.is_empty() {
        return Err(Error::EmptyList("alpha"));
    }
    if ns.is_empty() {
        return Err(Error::EmptyList("n"));
    }
    for &a in alphas {
        check_alpha(a)?;
    }
    if let Some(&n) = ns.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidParameter(format!(
            "sample size n = {n} must be at least 1"
        )));
    }
    let name = d.name();
    let tolerances = Tolerances::for_density(d);
    let moments = compute_moments(d).map_err(|e| e.context(format!("moments of {name}")))?;
    let m = moments.values();
    let checks = moments.check(&tolerances);

    let ex = Expansions::new(catalog)?;
    let mut rows = Vec::with_capacity(alphas.len() * ns.len());
    for &alpha in alphas {
        for &n in ns {
            rows.push(
                ex.row(&m, alpha, n)
                    .map_err(|e| e.context(format!("{name}, alpha = {alpha}, n = {n}")))?,
            );
        }
    }

    let simulation = match simulation {
        None => None,
        Some(s) => Some(simulate_cells(d, catalog, &m, alphas, ns, s)?),
    };

    Ok(EfficiencyReport {
        schema_version: SCHEMA_VERSION,
        density: name,
        tolerances,
        moments,
        checks,
        w_nonpositive: checks.w,
        rows,
        algebra: AlgebraSummary::from_catalog(catalog),
        simulation,
    })
}

/// Levels needed to compare every `α`: the median and each `1 − α/2`.
pub fn gap_levels(alphas: &[f64]) -> Vec<f64> {
    let mut levels = vec![0.5];
    for &a in alphas {
        let v = 1.0 - a / 2.0;
        if !levels.iter().any(|&l: &f64| (l - v).abs() <= 1e-12) {
            levels.push(v);
        }
    }
    levels
}

fn simulate_cells(
    d: &LocationDensity,
    catalog: &Catalog,
    m: &EtaValues,
    alphas: &[f64],
    ns: &[u64],
    s: &SimulationSettings<'_>,
) -> Result<Vec<SimulationCheck>> {
    let levels = gap_levels(alphas);
    let mut out = Vec::with_capacity(alphas.len() * ns.len());
    for &n in ns {
        let cfg = SimulationConfig {
            n: n as usize,
            levels: levels.clone(),
            ..s.config.clone()
        };
        let result = simulate_gn(d, &cfg, s.runner)
            .map_err(|e| e.context(format!("simulating {}, n = {n}", d.name())))?;
        for &alpha in alphas {
            let g = empirical_gap(&result, catalog, m, alpha)?;
            let prediction = third_order_gap(catalog, m, alpha, n)?;
            out.push(SimulationCheck {
                alpha,
                n,
                reps: result.reps,
                empirical: g.empirical,
                epsilon_v: g.expansion,
                gap: g.gap,
                se: g.se,
                order3_prediction: prediction,
                sign: sign_check(g.gap, g.se, prediction, SIGN_RESOLUTION),
                failures: result.failures,
                valid: result.valid,
            });
        }
    }
    Ok(out)
}

/// One point of the gap-versus-`n` curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlotRow {
    pub n: u64,
    /// Simulated gap; absent when the report was built without simulation.
    pub gap: Option<f64>,
    pub order3_prediction: f64,
}

impl EfficiencyReport {
    /// Curve for the first `α` of the report.
    pub fn plot_rows(&self) -> Vec<PlotRow> {
        let Some(alpha) = self.rows.first().map(|r| r.alpha) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter(|r| r.alpha == alpha)
            .map(|r| PlotRow {
                n: r.n,
                gap: self
                    .simulation
                    .iter()
                    .flatten()
                    .find(|s| s.alpha == alpha && s.n == r.n)
                    .map(|s| s.gap),
                order3_prediction: r.third_order_gap,
            })
            .collect()
    }

    /// True when any simulated cell exceeded its failure threshold.
    pub fn simulation_invalid(&self) -> bool {
        self.simulation.iter().flatten().any(|s| !s.valid)
    }

    /// Aligned plain-text rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "density: {}", self.density);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<8} {:>22} {:>12} {:>10} {:>5}",
            "moment", "value", "error", "tolerance", "check"
        );
        for (name, c) in self.checks.entries() {
            let _ = writeln!(
                out,
                "{:<8} {:>22.15e} {:>12.3e} {:>10.1e} {:>5}",
                name,
                c.value,
                c.error,
                c.tolerance,
                if c.pass { "ok" } else { "FAIL" }
            );
        }
        let _ = writeln!(out);

        let header = [
            "alpha",
            "n",
            "z",
            "epsilon_v",
            "G",
            "gap3",
            "two_sided_n^-1",
            "two_sided_n^-3/2",
            "adjusted",
            "adjusted_printed",
        ];
        let cells: Vec<[String; 10]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    format!("{}", r.alpha),
                    format!("{}", r.n),
                    format!("{:.6}", r.z),
                    format!("{:.9}", r.epsilon_v),
                    format!("{:.9}", r.g_expansion),
                    format!("{:.3e}", r.third_order_gap),
                    format!("{:.3e}", r.two_sided_strata[2]),
                    format!("{:.3e}", r.two_sided_strata[3]),
                    format!("{:.3e}", r.adjusted_gap),
                    format!("{:.3e}", r.adjusted_gap_printed),
                ]
            })
            .collect();
        push_table(&mut out, &header, &cells);

        if let Some(sim) = &self.simulation {
            let _ = writeln!(out);
            let header = [
                "alpha",
                "n",
                "reps",
                "empirical",
                "epsilon_v",
                "gap",
                "se",
                "gap3",
                "sign",
                "valid",
            ];
            let cells: Vec<[String; 10]> = sim
                .iter()
                .map(|s| {
                    [
                        format!("{}", s.alpha),
                        format!("{}", s.n),
                        format!("{}", s.reps),
                        format!("{:.6}", s.empirical),
                        format!("{:.6}", s.epsilon_v),
                        format!("{:.3e}", s.gap),
                        format!("{:.3e}", s.se),
                        format!("{:.3e}", s.order3_prediction),
                        format!("{:?}", s.sign).to_lowercase(),
                        format!("{}", s.valid),
                    ]
                })
                .collect();
            push_table(&mut out, &header, &cells);
        }

        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "algebra (all recipes succeeded: {})",
            self.algebra.all_recipes_succeeded
        );
        let width = self
            .algebra
            .entries
            .iter()
            .map(|e| e.id.name().len())
            .max()
            .unwrap_or(0);
        for e in &self.algebra.entries {
            let _ = match &e.residual {
                Some(r) => writeln!(
                    out,
                    "  {:<width$}  {:<7}  residual {r}",
                    e.id.name(),
                    e.status.label()
                ),
                None => writeln!(out, "  {:<width$}  {}", e.id.name(), e.status.label()),
            };
        }
        out
    }
}

fn push_table<const N: usize>(out: &mut String, header: &[&str; N], rows: &[[String; N]]) {
    let mut widths = header.map(str::len);
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  "));
    };
    line(out, &mut header.iter().copied());
    for r in rows {
        line(out, &mut r.iter().map(String::as_str));
    }
}
