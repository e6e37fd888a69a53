//! Run configuration: JSON file contents, density specifications and defaults.
//!
//! Precedence is built-in defaults, then the `--config` file, then flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use effgap_core::density::{Component, Derivatives, LocationDensity};
use effgap_core::quadrature::QuadratureConfig;
use effgap_core::simulate::{BOOTSTRAP_RESAMPLES, FAILURE_THRESHOLD};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A density as written in configuration files or passed to `--density`.
///
/// `{"family": "student-t", "params": {"df": 8}, "normalize": true}`;
/// mixtures list `components` of `{"density": …, "weight": …}` instead of params.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default = "yes")]
    pub normalize: bool,
    #[serde(default, skip_serializing_if = "is_closed_form")]
    pub derivatives: Derivatives,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub density: DensitySpec,
    pub weight: f64,
}

fn yes() -> bool {
    true
}

fn is_closed_form(d: &Derivatives) -> bool {
    *d == Derivatives::ClosedForm
}

impl Default for DensitySpec {
    fn default() -> Self {
        Self::named("gaussian")
    }
}

impl DensitySpec {
    pub fn named(family: &str) -> Self {
        Self {
            family: family.into(),
            params: BTreeMap::new(),
            normalize: true,
            derivatives: Derivatives::ClosedForm,
            components: Vec::new(),
        }
    }

    /// A family name such as `logistic`, or an inline JSON object.
    pub fn parse_arg(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| CliError::Config(format!("--density: {e}")))
        } else {
            Ok(Self::named(s))
        }
    }

    fn param(&self, name: &str, default: Option<f64>) -> Result<f64, CliError> {
        self.params.get(name).copied().or(default).ok_or_else(|| {
            CliError::Config(format!("density `{}` needs params.{name}", self.family))
        })
    }

    fn check_params(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Config(format!(
                "density `{}` has no parameter `{k}` (expected one of: {})",
                self.family,
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    /// Builds the density, rescaled to unit Fisher information when `normalize` is set.
    pub fn build(&self, quadrature: &QuadratureConfig) -> Result<LocationDensity, CliError> {
        let base = match self.family.as_str() {
            "gaussian" | "normal" => {
                self.check_params(&["location", "scale"])?;
                LocationDensity::gaussian()
            }
            "logistic" => {
                self.check_params(&["location", "scale"])?;
                LocationDensity::logistic()
            }
            "student-t" => {
                self.check_params(&["df", "location", "scale"])?;
                LocationDensity::student_t(self.param("df", None)?)?
            }
            "skew-normal" => {
                self.check_params(&["shape", "location", "scale"])?;
                LocationDensity::skew_normal(self.param("shape", None)?)?
            }
            "mixture" => {
                self.check_params(&["location", "scale"])?;
                if self.components.is_empty() {
                    return Err(CliError::Config("mixture needs a non-empty `components` list".into()));
                }
                let components = self
                    .components
                    .iter()
                    .map(|c| {
                        Ok(Component {
                            weight: c.weight,
                            density: c.density.build(quadrature)?,
                        })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                LocationDensity::mixture(components)?
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown density family `{other}` (expected gaussian, logistic, student-t, skew-normal or mixture)"
                )))
            }
        };
        if self.family != "mixture" && !self.components.is_empty() {
            return Err(CliError::Config(format!(
                "density `{}` does not take components",
                self.family
            )));
        }
        let base = base
            .with_location(self.param("location", Some(0.0))?)?
            .with_scale(self.param("scale", Some(1.0))?)?
            .with_derivatives(self.derivatives)
            .with_quadrature(*quadrature);
        let name = base.name();
        let d = if self.normalize {
            base.normalize()?
        } else {
            base
        };
        Ok(d.with_label(name))
    }
}

/// How quantile standard errors are computed in `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SeChoice {
    #[default]
    Analytic,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Every setting a subcommand may read. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub density: DensitySpec,
    pub alphas: Vec<f64>,
    pub ns: Vec<u64>,
    pub reps: usize,
    pub seed: u64,
    pub levels: Vec<f64>,
    /// Quadrature absolute tolerance.
    pub tolerance: f64,
    /// Worker cap for simulation; `None` uses every core.
    pub threads: Option<usize>,
    pub se_method: SeChoice,
    pub bootstrap_resamples: usize,
    pub failure_threshold: f64,
    pub output: Option<PathBuf>,
    /// Gap-versus-`n` CSV written by `report`.
    pub plot_output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            density: DensitySpec::default(),
            alphas: vec![0.05],
            ns: vec![25, 100],
            reps: 10_000,
            seed: 1,
            levels: vec![0.5, 0.9, 0.975],
            tolerance: QuadratureConfig::default().abs_tol,
            threads: None,
            se_method: SeChoice::Analytic,
            bootstrap_resamples: BOOTSTRAP_RESAMPLES,
            failure_threshold: FAILURE_THRESHOLD,
            output: None,
            plot_output: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn quadrature(&self) -> Result<QuadratureConfig, CliError> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(CliError::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(QuadratureConfig {
            abs_tol: self.tolerance,
            ..QuadratureConfig::default()
        })
    }

    pub fn build_density(&self) -> Result<LocationDensity, CliError> {
        self.density.build(&self.quadrature()?)
    }
}
