//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use effgap_core::catalog::{Catalog, EquationId, Status};
use effgap_core::efficiency::{self, AlgebraSummary, SimulationSettings, SCHEMA_VERSION};
use effgap_core::moments::{
    compute_moments, verify_cauchy_schwarz, verify_identity, CauchySchwarzReport, IdentityReport,
    MomentReport, ScoreMoments, Tolerances,
};
use effgap_core::simulate::{
    expansion_rows, simulate_gn, SeMethod, SimulationConfig, SimulationRow,
};
use effgap_core::special::normal_quantile;
use serde::Serialize;

use crate::config::{DensitySpec, Format, RunConfig, SeChoice};
use crate::error::CliError;
use crate::output::{csv_bytes, emit, json_bytes};
use crate::runner::RayonRunner;

/// Score-moment functionals, expansion algebra checks, Monte Carlo of the
/// location MLE and efficiency-gap reports for one-dimensional location models.
///
/// Settings come from built-in defaults, then the `--config` JSON file, then
/// flags; later sources win. Exit codes: 0 success, 1 configuration error,
/// 2 numerical failure, 3 solver failures above the threshold.
#[derive(Debug, Parser)]
#[command(name = "effgap", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration; unknown keys are rejected.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Density: a family name (gaussian, logistic, student-t, skew-normal,
    /// mixture) or a JSON object such as
    /// '{"family":"student-t","params":{"df":8},"normalize":true}'.
    /// [default: gaussian, normalized]
    #[arg(long, global = true, value_name = "NAME|JSON")]
    pub density: Option<String>,
    /// Base seed for simulation. [default: 1]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Absolute quadrature tolerance. [default: 1e-10]
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Maximum worker threads for simulation; results do not depend on it.
    /// [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file, written atomically. [default: standard output]
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fisher information, eta2..eta6 and W with their checks (JSON).
    Moments,
    /// Evaluate a catalog expansion numerically (JSON).
    Expand(ExpandArgs),
    /// Derive every catalog entry and report differences from the printed forms.
    VerifyAlgebra(FormatArgs),
    /// Simulate the normalized MLE and write quantiles as CSV.
    Simulate(SimulateArgs),
    /// Third-order one-sided gap (eta3/48)*W*(z^4 - 4z^2)*n^-3/2 (JSON).
    Gap(GridArgs),
    /// Full efficiency report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct FormatArgs {
    /// Output format. [default: text]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Two-sided levels alpha, comma separated. [default: 0.05]
    #[arg(long = "alpha", value_delimiter = ',')]
    pub alphas: Vec<f64>,
    /// Sample sizes, comma separated. [default: 25,100]
    #[arg(long = "n", value_delimiter = ',')]
    pub ns: Vec<u64>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Catalog entry, e.g. mle-quantile, bound-v-symmetric, two-sided-gap.
    #[arg(long)]
    pub equation: String,
    /// Upper level v; the variable zv is its normal quantile.
    #[arg(long, conflicts_with = "alphas")]
    pub v: Option<f64>,
    /// Lower level u. [default: 1/2]
    #[arg(long, requires = "v")]
    pub u: Option<f64>,
    /// Evaluate the printed form instead of the derived one.
    #[arg(long)]
    pub transcribed: bool,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sample sizes, comma separated. [default: 25,100]
    #[arg(long = "n", value_delimiter = ',')]
    pub ns: Vec<u64>,
    /// Replications per sample size, at least 1000. [default: 10000]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Quantile levels, comma separated. [default: 0.5,0.9,0.975]
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<f64>,
    /// Standard-error method. [default: analytic]
    #[arg(long, value_enum)]
    pub se_method: Option<SeChoice>,
    /// Bootstrap resamples. [default: 500]
    #[arg(long)]
    pub bootstrap_resamples: Option<usize>,
    /// Largest tolerated fraction of failed replications. [default: 1e-4]
    #[arg(long)]
    pub failure_threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Add Monte Carlo rows for every (alpha, n) cell.
    #[arg(long)]
    pub simulate: bool,
    /// Replications when simulating. [default: 10000]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Output format. [default: json]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write the gap-versus-n CSV (n, gap, order3_prediction) here.
    #[arg(long, value_name = "PATH")]
    pub plot: Option<PathBuf>,
}

/// Merges the configuration file and flags into one configuration.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut c = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let common = &cli.common;
    if let Some(d) = &common.density {
        c.density = DensitySpec::parse_arg(d)?;
    }
    if let Some(s) = common.seed {
        c.seed = s;
    }
    if let Some(t) = common.tolerance {
        c.tolerance = t;
    }
    if common.threads.is_some() {
        c.threads = common.threads;
    }
    if common.output.is_some() {
        c.output = common.output.clone();
    }
    let grid = |c: &mut RunConfig, g: &GridArgs| {
        if !g.alphas.is_empty() {
            c.alphas = g.alphas.clone();
        }
        if !g.ns.is_empty() {
            c.ns = g.ns.clone();
        }
    };
    match &cli.command {
        Command::Moments | Command::VerifyAlgebra(_) => {}
        Command::Expand(a) => grid(&mut c, &a.grid),
        Command::Gap(g) => grid(&mut c, g),
        Command::Simulate(a) => {
            if !a.ns.is_empty() {
                c.ns = a.ns.clone();
            }
            if !a.levels.is_empty() {
                c.levels = a.levels.clone();
            }
            c.reps = a.reps.unwrap_or(c.reps);
            c.se_method = a.se_method.unwrap_or(c.se_method);
            c.bootstrap_resamples = a.bootstrap_resamples.unwrap_or(c.bootstrap_resamples);
            c.failure_threshold = a.failure_threshold.unwrap_or(c.failure_threshold);
        }
        Command::Report(a) => {
            grid(&mut c, &a.grid);
            c.reps = a.reps.unwrap_or(c.reps);
            c.format = a.format.unwrap_or(c.format);
            if a.plot.is_some() {
                c.plot_output = a.plot.clone();
            }
        }
    }
    if c.threads == Some(0) {
        return Err(CliError::Config("threads must be at least 1".into()));
    }
    Ok(c)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("effgap: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let out = cfg.output.as_deref();
    match &cli.command {
        Command::Moments => emit(out, &json_bytes(&moments_output(&cfg)?)),
        Command::Expand(a) => emit(out, &json_bytes(&expand_output(&cfg, a)?)),
        Command::VerifyAlgebra(f) => {
            let catalog = Catalog::new();
            let v = verify_output(&catalog);
            let bytes = match f.format.unwrap_or(Format::Text) {
                Format::Json => json_bytes(&v),
                Format::Text => render_verify(&v).into_bytes(),
            };
            emit(out, &bytes)?;
            if v.all_recipes_succeeded {
                Ok(())
            } else {
                Err(CliError::Numeric(effgap_core::Error::RecipeFailed {
                    id: "catalog",
                    reason: "at least one derivation failed; see the report".into(),
                }))
            }
        }
        Command::Simulate(_) => {
            let (rows, invalid) = simulate_rows(&cfg)?;
            emit(out, &csv_bytes(&rows)?)?;
            match invalid {
                Some(msg) => Err(CliError::SolverThreshold(msg)),
                None => Ok(()),
            }
        }
        Command::Gap(_) => emit(out, &json_bytes(&gap_output(&cfg)?)),
        Command::Report(a) => {
            let report = build_report(&cfg, a.simulate)?;
            let bytes = match cfg.format {
                Format::Json => json_bytes(&report),
                Format::Text => report.render_text().into_bytes(),
            };
            emit(out, &bytes)?;
            if let Some(p) = &cfg.plot_output {
                crate::output::write_atomic(p, &csv_bytes(&report.plot_rows())?)?;
            }
            if report.simulation_invalid() {
                return Err(CliError::SolverThreshold(
                    "a simulated cell exceeded its failure threshold".into(),
                ));
            }
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MomentsOutput {
    pub schema_version: u32,
    pub density: String,
    pub tolerances: Tolerances,
    pub moments: ScoreMoments,
    pub checks: MomentReport,
    pub identity: IdentityReport,
    pub cauchy_schwarz: CauchySchwarzReport,
}

pub fn moments_output(cfg: &RunConfig) -> Result<MomentsOutput, CliError> {
    let d = cfg.build_density()?;
    let tolerances = Tolerances::for_density(&d);
    let moments = compute_moments(&d)?;
    Ok(MomentsOutput {
        schema_version: SCHEMA_VERSION,
        density: d.name(),
        tolerances,
        checks: moments.check(&tolerances),
        moments,
        identity: verify_identity(&d)?,
        cauchy_schwarz: verify_cauchy_schwarz(&d)?,
    })
}

#[derive(Debug, Serialize)]
pub struct ExpandRow {
    pub alpha: Option<f64>,
    pub v: f64,
    pub u: f64,
    pub zv: f64,
    pub zu: f64,
    pub n: u64,
    /// Contributions of `n^0`, `n^(−1/2)`, `n^(−1)`, `n^(−3/2)`.
    pub strata: [f64; 4],
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct ExpandOutput {
    pub schema_version: u32,
    pub equation: EquationId,
    pub form: &'static str,
    pub polynomial: String,
    pub density: String,
    pub rows: Vec<ExpandRow>,
}

pub fn expand_output(cfg: &RunConfig, a: &ExpandArgs) -> Result<ExpandOutput, CliError> {
    let id: EquationId = a.equation.parse()?;
    let catalog = Catalog::new();
    let (form, poly) = if a.transcribed || id.is_input() {
        ("transcribed", catalog.transcribed(id))
    } else {
        ("derived", catalog.derived(id)?)
    };
    let d = cfg.build_density()?;
    let m = compute_moments(&d)?.values();
    let level = |p: f64| {
        if p > 0.0 && p < 1.0 {
            Ok(normal_quantile(p))
        } else {
            Err(CliError::Config(format!("level {p} is outside (0, 1)")))
        }
    };
    // Explicit levels, or the symmetric pair v = 1 − α/2, u = α/2 per alpha.
    let points: Vec<(Option<f64>, f64, f64)> = match a.v {
        Some(v) => vec![(None, v, a.u.unwrap_or(0.5))],
        None => {
            if cfg.alphas.is_empty() {
                return Err(CliError::Config("alpha list is empty".into()));
            }
            cfg.alphas
                .iter()
                .map(|&al| (Some(al), 1.0 - al / 2.0, al / 2.0))
                .collect()
        }
    };
    if cfg.ns.is_empty() {
        return Err(CliError::Config("n list is empty".into()));
    }
    let mut rows = Vec::new();
    for (alpha, v, u) in points {
        let zv = level(v)?;
        let zu = level(u)?;
        for &n in &cfg.ns {
            let strata = poly.evaluate_strata(&m, zv, zu, n)?;
            rows.push(ExpandRow {
                alpha,
                v,
                u,
                zv,
                zu,
                n,
                strata,
                value: strata.iter().sum(),
            });
        }
    }
    Ok(ExpandOutput {
        schema_version: SCHEMA_VERSION,
        equation: id,
        form,
        polynomial: poly.to_string(),
        density: d.name(),
        rows,
    })
}

#[derive(Debug, Serialize)]
pub struct FindingOutput {
    pub name: String,
    pub holds: bool,
    pub residual: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyEntry {
    pub id: EquationId,
    pub description: &'static str,
    pub status: Status,
    pub recipe: &'static str,
    pub transcribed: String,
    pub derived: Option<String>,
    pub residual: Option<String>,
    pub failure: Option<String>,
    pub findings: Vec<FindingOutput>,
}

#[derive(Debug, Serialize)]
pub struct VerifyOutput {
    pub schema_version: u32,
    pub all_recipes_succeeded: bool,
    pub entries: Vec<VerifyEntry>,
    pub adjustment: Option<efficiency::AdjustmentSummary>,
}

pub fn verify_output(catalog: &Catalog) -> VerifyOutput {
    let entries = catalog
        .entries()
        .iter()
        .map(|e| VerifyEntry {
            id: e.id,
            description: e.id.description(),
            status: e.report.status,
            recipe: e.report.recipe,
            transcribed: e.transcribed.to_string(),
            derived: e.report.derived.as_ref().map(ToString::to_string),
            residual: e.report.residual.as_ref().map(ToString::to_string),
            failure: e.report.failure.clone(),
            findings: e
                .report
                .findings
                .iter()
                .map(|f| FindingOutput {
                    name: f.name.clone(),
                    holds: f.holds,
                    residual: f.residual.to_string(),
                })
                .collect(),
        })
        .collect();
    let summary = AlgebraSummary::from_catalog(catalog);
    VerifyOutput {
        schema_version: SCHEMA_VERSION,
        all_recipes_succeeded: summary.all_recipes_succeeded,
        entries,
        adjustment: summary.adjustment,
    }
}

pub fn render_verify(v: &VerifyOutput) -> String {
    let mut s = String::new();
    for e in &v.entries {
        let _ = writeln!(s, "[{}] {}", e.id, e.description);
        let _ = writeln!(s, "  status:      {}", e.status);
        let _ = writeln!(s, "  recipe:      {}", e.recipe);
        if let Some(r) = &e.residual {
            let _ = writeln!(s, "  residual:    {r}");
        }
        if let Some(f) = &e.failure {
            let _ = writeln!(s, "  failure:     {f}");
        }
        for f in &e.findings {
            let verdict = if f.holds { "holds" } else { "does not hold" };
            let _ = writeln!(
                s,
                "  finding:     {} ({verdict}); residual {}",
                f.name, f.residual
            );
        }
        let _ = writeln!(s);
    }
    if let Some(a) = &v.adjustment {
        let _ = writeln!(s, "[adjustment] n^-3/2 terms added to epsilon_v");
        let _ = writeln!(s, "  derived:     {}", a.derived);
        let _ = writeln!(s, "  printed:     {}", a.printed);
        let _ = writeln!(s, "  difference:  {}", a.difference);
        let _ = writeln!(s, "  derived terms cancel the gap: {}", a.derived_cancels);
        let _ = writeln!(s, "  printed terms cancel the gap: {}", a.printed_cancels);
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "all recipes succeeded: {}", v.all_recipes_succeeded);
    s
}

fn sim_config(cfg: &RunConfig, n: u64, levels: Vec<f64>) -> SimulationConfig {
    SimulationConfig {
        n: n as usize,
        reps: cfg.reps,
        seed: cfg.seed,
        levels,
        se_method: match cfg.se_method {
            SeChoice::Analytic => SeMethod::Analytic,
            SeChoice::Bootstrap => SeMethod::Bootstrap {
                resamples: cfg.bootstrap_resamples,
            },
        },
        failure_threshold: cfg.failure_threshold,
        shift: 0.0,
    }
}

fn runner(cfg: &RunConfig) -> Result<RayonRunner, CliError> {
    RayonRunner::new(cfg.threads).map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// CSV rows for every `(n, v)`, and a message when any batch is invalid.
pub fn simulate_rows(cfg: &RunConfig) -> Result<(Vec<SimulationRow>, Option<String>), CliError> {
    if cfg.ns.is_empty() {
        return Err(CliError::Config("n list is empty".into()));
    }
    let d = cfg.build_density()?;
    let m = compute_moments(&d)?.values();
    let catalog = Catalog::new();
    let g = catalog.authoritative(EquationId::MleQuantile)?;
    let pool = runner(cfg)?;
    let mut rows = Vec::new();
    let mut invalid = None;
    for &n in &cfg.ns {
        let r = simulate_gn(&d, &sim_config(cfg, n, cfg.levels.clone()), &pool)?;
        if !r.valid && invalid.is_none() {
            invalid = Some(format!(
                "n = {n}: {} of {} replications failed (threshold {})",
                r.failures, r.reps, r.failure_threshold
            ));
        }
        rows.extend(expansion_rows(&r, g, &m)?);
    }
    Ok((rows, invalid))
}

#[derive(Debug, Serialize)]
pub struct GapRow {
    pub alpha: f64,
    pub n: u64,
    pub z: f64,
    pub third_order_gap: f64,
}

#[derive(Debug, Serialize)]
pub struct GapOutput {
    pub schema_version: u32,
    pub density: String,
    pub eta3: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub rows: Vec<GapRow>,
}

pub fn gap_output(cfg: &RunConfig) -> Result<GapOutput, CliError> {
    if cfg.alphas.is_empty() || cfg.ns.is_empty() {
        return Err(CliError::Config(
            "alpha and n lists must be non-empty".into(),
        ));
    }
    let d = cfg.build_density()?;
    let m = compute_moments(&d)?.values();
    let catalog = Catalog::new();
    let mut rows = Vec::new();
    for &alpha in &cfg.alphas {
        for &n in &cfg.ns {
            rows.push(GapRow {
                alpha,
                n,
                z: normal_quantile(1.0 - alpha / 2.0),
                third_order_gap: efficiency::third_order_gap(&catalog, &m, alpha, n)?,
            });
        }
    }
    Ok(GapOutput {
        schema_version: SCHEMA_VERSION,
        density: d.name(),
        eta3: m.eta3,
        w: m.w,
        rows,
    })
}

pub fn build_report(
    cfg: &RunConfig,
    simulate: bool,
) -> Result<efficiency::EfficiencyReport, CliError> {
    let d = cfg.build_density()?;
    let catalog = Catalog::new();
    let pool;
    let settings;
    let sim = if simulate {
        pool = runner(cfg)?;
        settings = SimulationSettings {
            config: sim_config(cfg, 0, Vec::new()),
            runner: &pool,
        };
        Some(&settings)
    } else {
        None
    };
    Ok(efficiency::build_report(
        &d,
        &catalog,
        &cfg.alphas,
        &cfg.ns,
        sim,
    )?)
}
