//! Location densities on the real line.
//!
//! A [`LocationDensity`] is a standardized family `g` placed at `location`
//! with `scale`, i.e. `f(x) = g((x - location)/scale)/scale`. Closed-form
//! families supply `f`, `f'`, `f''`, `f'''` exactly; anything else falls back
//! to central differences and is flagged as reduced-accuracy.
//!
//! Integrals against `f` run over a truncated support `[lower, upper]` chosen
//! where `f` drops below `1e-16` of its maximum. The mass lost there is
//! measured once at construction and added to every expectation's error.

mod family;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // inherent when std is in the dependency graph
use num_traits::Float;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

pub use family::{LogJet, Scores};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Estimate, QuadratureConfig};
use crate::special::{normal_cdf, normal_quantile};

/// ψ evaluation is refused where the density is smaller than this.
pub const POSITIVITY_THRESHOLD: f64 = 1e-300;

/// Tails are cut where `f < TAIL_RATIO * max f`.
pub const TAIL_RATIO: f64 = 1e-16;

/// A user-supplied standardized density.
pub trait DensityFunction: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn value(&self, t: f64) -> f64;

    /// `g^(order)(t)` for order 1..=3 when known in closed form.
    fn derivative(&self, _order: usize, _t: f64) -> Option<f64> {
        None
    }

    /// Whether [`DensityFunction::derivative`] covers orders 1..=3.
    fn has_derivatives(&self) -> bool {
        false
    }

    /// Where the bulk of the mass sits, used to locate the support.
    fn center(&self) -> f64 {
        0.0
    }

    fn width(&self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone)]
pub struct Component {
    pub weight: f64,
    pub density: LocationDensity,
}

#[derive(Debug, Clone)]
pub enum Family {
    Normal,
    Logistic,
    StudentT { df: f64 },
    SkewNormal { shape: f64 },
    Mixture(Vec<Component>),
    Custom(Arc<dyn DensityFunction>),
}

impl Family {
    fn label(&self) -> String {
        match self {
            Family::Normal => "gaussian".into(),
            Family::Logistic => "logistic".into(),
            Family::StudentT { df } => format!("student-t(df={df})"),
            Family::SkewNormal { shape } => format!("skew-normal(shape={shape})"),
            Family::Mixture(components) => {
                let parts: Vec<String> = components
                    .iter()
                    .map(|c| format!("{}*{}", c.weight, c.density.name()))
                    .collect();
                format!("mixture({})", parts.join("+"))
            }
            Family::Custom(f) => f.name(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Family::StudentT { df } if !(df.is_finite() && *df > 4.0) => {
                Err(Error::InvalidParameter(format!(
                    "student-t degrees of freedom must exceed 4, got {df}"
                )))
            }
            Family::SkewNormal { shape } if !shape.is_finite() => Err(Error::InvalidParameter(
                format!("skew-normal shape must be finite, got {shape}"),
            )),
            Family::Mixture(components) => {
                if components.is_empty() {
                    return Err(Error::EmptyList("mixture components"));
                }
                if components
                    .iter()
                    .any(|c| !(c.weight.is_finite() && c.weight > 0.0))
                {
                    return Err(Error::InvalidParameter(
                        "mixture weights must be positive and finite".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Rescales mixture weights to sum to one.
    fn normalized_weights(self) -> Self {
        match self {
            Family::Mixture(mut components) => {
                let total: f64 = components.iter().map(|c| c.weight).sum();
                for c in &mut components {
                    c.weight /= total;
                }
                Family::Mixture(components)
            }
            other => other,
        }
    }
}

/// How `f', f'', f'''` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Derivatives {
    #[default]
    ClosedForm,
    FiniteDifference,
}

/// Truncated working support and the mass it misses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
    pub max_value: f64,
    pub tail_mass: f64,
}

#[derive(Debug, Clone)]
pub struct LocationDensity {
    family: Family,
    location: f64,
    scale: f64,
    derivatives: Derivatives,
    quadrature: QuadratureConfig,
    label: Option<String>,
    support: Support,
}

impl LocationDensity {
    pub fn new(family: Family, location: f64, scale: f64) -> Result<Self> {
        family.validate()?;
        let mut d = Self {
            family: family.normalized_weights(),
            location,
            scale,
            derivatives: Derivatives::ClosedForm,
            quadrature: QuadratureConfig::default(),
            label: None,
            support: Support {
                lower: 0.0,
                upper: 0.0,
                max_value: 0.0,
                tail_mass: 0.0,
            },
        };
        d.rebuild()?;
        Ok(d)
    }

    pub fn gaussian() -> Self {
        Self::new(Family::Normal, 0.0, 1.0).expect("standard normal is valid")
    }

    pub fn logistic() -> Self {
        Self::new(Family::Logistic, 0.0, 1.0).expect("standard logistic is valid")
    }

    pub fn student_t(df: f64) -> Result<Self> {
        Self::new(Family::StudentT { df }, 0.0, 1.0)
    }

    pub fn skew_normal(shape: f64) -> Result<Self> {
        Self::new(Family::SkewNormal { shape }, 0.0, 1.0)
    }

    pub fn mixture(components: Vec<Component>) -> Result<Self> {
        Self::new(Family::Mixture(components), 0.0, 1.0)
    }

    pub fn custom(function: Arc<dyn DensityFunction>) -> Result<Self> {
        Self::new(Family::Custom(function), 0.0, 1.0)
    }

    fn rebuild(&mut self) -> Result<()> {
        if !(self.location.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "location must be finite, got {}",
                self.location
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive and finite, got {}",
                self.scale
            )));
        }
        let (lower, upper, max_value) = self.locate_support()?;
        self.support = Support {
            lower,
            upper,
            max_value,
            tail_mass: 0.0,
        };
        let total = integrate(
            |x| Ok(self.value(x)),
            lower,
            upper,
            &QuadratureConfig {
                abs_tol: 1e-13,
                ..self.quadrature
            },
        )?;
        if (total.value - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "density integrates to {} rather than 1",
                total.value
            )));
        }
        self.support.tail_mass = (1.0 - total.value).abs() + total.error;
        Ok(())
    }

    /// Support bounds in x coordinates and the maximum of f.
    fn locate_support(&self) -> Result<(f64, f64, f64)> {
        let (lo, hi, max) = match &self.family {
            Family::Mixture(components) => {
                let lo = components
                    .iter()
                    .map(|c| c.density.support.lower)
                    .fold(f64::INFINITY, f64::min);
                let hi = components
                    .iter()
                    .map(|c| c.density.support.upper)
                    .fold(f64::NEG_INFINITY, f64::max);
                let max = components
                    .iter()
                    .map(|c| c.weight * c.density.support.max_value)
                    .fold(0.0, f64::max);
                (lo, hi, max)
            }
            _ => {
                let (center, width) = match &self.family {
                    Family::Custom(f) => (f.center(), f.width()),
                    _ => (0.0, 1.0),
                };
                self.walk_tails(center, width)?
            }
        };
        Ok((
            self.location + self.scale * lo,
            self.location + self.scale * hi,
            max / self.scale,
        ))
    }

    /// Walks outward from the mode in doubling steps until the standardized
    /// density drops below `TAIL_RATIO` of its maximum, then bisects.
    fn walk_tails(&self, center: f64, width: f64) -> Result<(f64, f64, f64)> {
        let g = |t: f64| self.standard_value(t);
        let (mut mode, mut max) = (center, g(center));
        for k in 0..=2000 {
            let t = center - 20.0 * width + 40.0 * width * k as f64 / 2000.0;
            let v = g(t);
            if v > max {
                mode = t;
                max = v;
            }
        }
        if !(max > 0.0 && max.is_finite()) {
            return Err(Error::UnboundedSupport);
        }
        let threshold = TAIL_RATIO * max;
        let edge = |direction: f64| -> Result<f64> {
            let mut inside = mode;
            let mut step = width;
            for _ in 0..80 {
                let probe = mode + direction * step;
                if g(probe) < threshold {
                    let mut outside = probe;
                    for _ in 0..200 {
                        let mid = 0.5 * (inside + outside);
                        if mid == inside || mid == outside {
                            break;
                        }
                        if g(mid) < threshold {
                            outside = mid;
                        } else {
                            inside = mid;
                        }
                    }
                    return Ok(inside);
                }
                inside = probe;
                step *= 2.0;
            }
            Err(Error::UnboundedSupport)
        };
        Ok((edge(-1.0)?, edge(1.0)?, max))
    }

    pub fn with_location(&self, location: f64) -> Result<Self> {
        let mut d = self.clone();
        d.location = location;
        d.rebuild()?;
        Ok(d)
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        let mut d = self.clone();
        d.scale = scale;
        d.rebuild()?;
        Ok(d)
    }

    pub fn with_derivatives(mut self, derivatives: Derivatives) -> Self {
        self.derivatives = derivatives;
        self
    }

    pub fn with_quadrature(mut self, quadrature: QuadratureConfig) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn name(&self) -> String {
        if let Some(label) = &self.label {
            return label.clone();
        }
        let base = self.family.label();
        if self.location == 0.0 && self.scale == 1.0 {
            base
        } else {
            format!("{base}[location={},scale={}]", self.location, self.scale)
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn quadrature(&self) -> &QuadratureConfig {
        &self.quadrature
    }

    pub fn derivatives(&self) -> Derivatives {
        self.derivatives
    }

    /// True when any derivative comes from finite differences.
    pub fn reduced_accuracy(&self) -> bool {
        self.derivatives == Derivatives::FiniteDifference
            || match &self.family {
                Family::Custom(f) => !f.has_derivatives(),
                Family::Mixture(components) => {
                    components.iter().any(|c| c.density.reduced_accuracy())
                }
                _ => false,
            }
    }

    /// Whether `ln f` is concave, so the likelihood equation has one root.
    pub fn is_log_concave(&self) -> bool {
        matches!(
            self.family,
            Family::Normal | Family::Logistic | Family::SkewNormal { .. }
        )
    }

    fn standardize(&self, x: f64) -> f64 {
        (x - self.location) / self.scale
    }

    fn standard_value(&self, t: f64) -> f64 {
        match &self.family {
            Family::Normal => crate::special::normal_pdf(t),
            Family::Logistic => family::logistic::value(t),
            Family::StudentT { df } => family::student_t::log_value(*df, t).exp(),
            Family::SkewNormal { shape } => family::skew_normal::log_value(*shape, t).exp(),
            Family::Mixture(components) => components
                .iter()
                .map(|c| c.weight * c.density.value(t))
                .sum(),
            Family::Custom(f) => f.value(t),
        }
    }

    /// Standardized scores; ψ entries may be non-finite where g vanishes.
    fn standard_scores(&self, t: f64) -> Scores {
        match &self.family {
            Family::Normal => family::normal::scores(t),
            Family::Logistic => family::logistic::scores(t),
            Family::StudentT { df } => family::student_t::scores(*df, t),
            Family::SkewNormal { shape } => family::skew_normal::scores(*shape, t),
            Family::Mixture(components) => {
                let mut value = 0.0;
                let mut derivs = [0.0; 3];
                for c in components {
                    let s = c.density.raw_scores(t);
                    value += c.weight * s.value;
                    for (d, psi) in derivs.iter_mut().zip(s.psi) {
                        *d += c.weight * s.value * psi;
                    }
                }
                Scores {
                    value,
                    psi: derivs.map(|d| d / value),
                }
            }
            Family::Custom(f) => {
                let value = f.value(t);
                let mut psi = [0.0; 3];
                for (i, p) in psi.iter_mut().enumerate() {
                    let d = f
                        .derivative(i + 1, t)
                        .unwrap_or_else(|| finite_difference(|s| f.value(s), i + 1, t));
                    *p = d / value;
                }
                Scores { value, psi }
            }
        }
    }

    /// Scores without the positivity check.
    fn raw_scores(&self, x: f64) -> Scores {
        if self.derivatives == Derivatives::FiniteDifference {
            let value = self.value(x);
            let mut psi = [0.0; 3];
            for (i, p) in psi.iter_mut().enumerate() {
                *p = finite_difference(|s| self.value(s), i + 1, x) / value;
            }
            return Scores { value, psi };
        }
        let s = self.standard_scores(self.standardize(x));
        let inv = 1.0 / self.scale;
        Scores {
            value: s.value * inv,
            psi: [
                s.psi[0] * inv,
                s.psi[1] * inv * inv,
                s.psi[2] * inv * inv * inv,
            ],
        }
    }

    /// `f(x)`.
    pub fn value(&self, x: f64) -> f64 {
        self.standard_value(self.standardize(x)) / self.scale
    }

    /// `f^(order)(x)` for order 0..=3.
    pub fn derivative(&self, order: usize, x: f64) -> f64 {
        match order {
            0 => self.value(x),
            1..=3 => {
                let s = self.raw_scores(x);
                s.psi[order - 1] * s.value
            }
            _ => f64::NAN,
        }
    }

    /// `f(x)` and `ψ_i(x) = f^(i)(x)/f(x)` for i = 1, 2, 3.
    pub fn scores(&self, x: f64) -> Result<Scores> {
        let s = self.raw_scores(x);
        if s.value.is_nan() || s.value < POSITIVITY_THRESHOLD {
            return Err(Error::Underflow { x, value: s.value });
        }
        Ok(s)
    }

    /// `ψ_order(x)`, order ∈ {1, 2, 3}.
    pub fn psi(&self, order: usize, x: f64) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidParameter(format!(
                "score order must be 1, 2 or 3, got {order}"
            )));
        }
        Ok(self.scores(x)?.psi[order - 1])
    }

    /// `ln f(x)`, `ψ₁(x)` and `(ln f)''(x)`, stable far into the tails for
    /// the closed-form families.
    pub fn log_jet(&self, x: f64) -> Result<LogJet> {
        let t = self.standardize(x);
        let jet = match (&self.family, self.derivatives) {
            (Family::Normal, Derivatives::ClosedForm) => family::normal::log_jet(t),
            (Family::Logistic, Derivatives::ClosedForm) => family::logistic::log_jet(t),
            (Family::StudentT { df }, Derivatives::ClosedForm) => {
                family::student_t::log_jet(*df, t)
            }
            (Family::SkewNormal { shape }, Derivatives::ClosedForm) => {
                family::skew_normal::log_jet(*shape, t)
            }
            (Family::Mixture(components), Derivatives::ClosedForm) => {
                let mut jets = Vec::with_capacity(components.len());
                for c in components {
                    jets.push((c.weight.ln(), c.density.log_jet(t)?));
                }
                let top = jets
                    .iter()
                    .map(|(lw, j)| lw + j.log_value)
                    .fold(f64::NEG_INFINITY, f64::max);
                if !top.is_finite() {
                    return Err(Error::Underflow { x, value: 0.0 });
                }
                let mut total = 0.0;
                let mut d1 = 0.0;
                let mut second = 0.0;
                for (lw, j) in &jets {
                    let r = (lw + j.log_value - top).exp();
                    total += r;
                    d1 += r * j.d1;
                    second += r * (j.d2 + j.d1 * j.d1);
                }
                d1 /= total;
                LogJet {
                    log_value: top + total.ln(),
                    d1,
                    d2: second / total - d1 * d1,
                }
            }
            _ => {
                let s = self.scores(x)?;
                return Ok(LogJet {
                    log_value: s.value.ln(),
                    d1: s.psi1(),
                    d2: s.psi1_prime(),
                });
            }
        };
        let inv = 1.0 / self.scale;
        Ok(LogJet {
            log_value: jet.log_value - self.scale.ln(),
            d1: jet.d1 * inv,
            d2: jet.d2 * inv * inv,
        })
    }

    /// `E[h(X)]` over the truncated support, with the truncated mass folded
    /// into the error estimate.
    pub fn expectation<H>(&self, mut h: H) -> Result<Estimate>
    where
        H: FnMut(f64) -> Result<f64>,
    {
        let Support {
            lower,
            upper,
            tail_mass,
            ..
        } = self.support;
        let tail = tail_mass * h(lower)?.abs().max(h(upper)?.abs());
        let r = integrate(
            |x| Ok(h(x)? * self.value(x)),
            lower,
            upper,
            &self.quadrature,
        )?;
        Ok(Estimate::new(r.value, r.error + tail))
    }

    /// `E[h(scores(X))]`.
    pub fn expect_scores<H>(&self, mut h: H) -> Result<Estimate>
    where
        H: FnMut(&Scores) -> f64,
    {
        let Support {
            lower,
            upper,
            tail_mass,
            ..
        } = self.support;
        let tail = tail_mass
            * h(&self.scores(lower)?)
                .abs()
                .max(h(&self.scores(upper)?).abs());
        let r = integrate(
            |x| {
                let s = self.scores(x)?;
                Ok(h(&s) * s.value)
            },
            lower,
            upper,
            &self.quadrature,
        )?;
        Ok(Estimate::new(r.value, r.error + tail))
    }

    /// `I(f) = E ψ₁²`.
    pub fn fisher_information(&self) -> Result<Estimate> {
        let r = self.expect_scores(|s| s.psi1() * s.psi1())?;
        if !r.value.is_finite() {
            return Err(Error::NonFiniteFunctional {
                name: "fisher".into(),
            });
        }
        Ok(r)
    }

    /// Rescales to unit Fisher information: the scale is multiplied by `√I`.
    pub fn normalize(&self) -> Result<Self> {
        let fisher = self.fisher_information()?.value;
        if !(fisher.is_finite() && fisher > 0.0) {
            return Err(Error::InvalidFisherInformation(fisher));
        }
        self.with_scale(self.scale * fisher.sqrt())
    }

    /// Distribution function. Closed form where available, otherwise
    /// quadrature from the lower support bound.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if let Some(p) = self.closed_form_cdf(x) {
            return Ok(p);
        }
        let Support { lower, upper, .. } = self.support;
        if x <= lower {
            return Ok(0.0);
        }
        if x >= upper {
            return Ok(1.0);
        }
        let r = integrate(|s| Ok(self.value(s)), lower, x, &self.cdf_quadrature())?;
        Ok(r.value.clamp(0.0, 1.0))
    }

    /// Distribution function at ascending points, integrating increment by
    /// increment.
    pub fn cdf_sorted(&self, xs: &[f64]) -> Result<Vec<f64>> {
        if self.has_closed_form_cdf() {
            return xs.iter().map(|&x| self.cdf(x)).collect();
        }
        let Support { lower, upper, .. } = self.support;
        let cfg = self.cdf_quadrature();
        let mut out = Vec::with_capacity(xs.len());
        let mut at = lower;
        let mut acc = 0.0;
        for &x in xs {
            let x = x.clamp(lower, upper);
            if x < at {
                return Err(Error::InvalidParameter("points must be sorted".into()));
            }
            acc += integrate(|s| Ok(self.value(s)), at, x, &cfg)?.value;
            at = x;
            out.push(acc.clamp(0.0, 1.0));
        }
        Ok(out)
    }

    fn cdf_quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            abs_tol: 1e-13,
            initial_panels: 1,
            ..self.quadrature
        }
    }

    fn has_closed_form_cdf(&self) -> bool {
        match &self.family {
            Family::Normal | Family::Logistic => true,
            Family::Mixture(components) => {
                components.iter().all(|c| c.density.has_closed_form_cdf())
            }
            _ => false,
        }
    }

    fn closed_form_cdf(&self, x: f64) -> Option<f64> {
        let t = self.standardize(x);
        match &self.family {
            Family::Normal => Some(normal_cdf(t)),
            Family::Logistic => Some(family::logistic::cdf(t)),
            Family::Mixture(components) if self.has_closed_form_cdf() => Some(
                components
                    .iter()
                    .map(|c| c.weight * c.density.closed_form_cdf(t).unwrap_or(0.0))
                    .sum(),
            ),
            _ => None,
        }
    }

    /// Quantile function: closed form for the normal and logistic families,
    /// safeguarded Newton on the distribution function otherwise.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidLevel(p));
        }
        match &self.family {
            Family::Normal => return Ok(self.location + self.scale * normal_quantile(p)),
            Family::Logistic => {
                return Ok(self.location + self.scale * family::logistic::quantile(p))
            }
            _ => {}
        }
        let Support { lower, upper, .. } = self.support;
        let cfg = self.cdf_quadrature();
        let (mut lo, mut hi) = (lower, upper);
        let mut x = self.location;
        if !(lo < x && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let mut fx = self.cdf(x)?;
        for _ in 0..200 {
            let r = fx - p;
            if r.abs() <= 1e-13 {
                return Ok(x);
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            if hi - lo <= 1e-13 * (1.0 + x.abs()) {
                return Ok(x);
            }
            let density = self.value(x);
            let mut next = x - r / density;
            if !(density > 0.0 && next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            fx += integrate(|s| Ok(self.value(s)), x, next, &cfg)?.value;
            x = next;
        }
        Err(Error::RootFinding(format!(
            "quantile {p} of {}",
            self.name()
        )))
    }

    /// Interquartile range.
    pub fn spread(&self) -> Result<f64> {
        Ok(self.quantile(0.75)? - self.quantile(0.25)?)
    }

    /// One draw.
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let t = match &self.family {
            Family::Normal => normal_quantile(open_unit(rng)),
            Family::Logistic => family::logistic::quantile(open_unit(rng)),
            Family::StudentT { df } => rand_distr::StudentT::new(*df)
                .map_err(|e| Error::InvalidParameter(format!("{e}")))?
                .sample(rng),
            Family::SkewNormal { shape } => {
                let delta = shape / (1.0 + shape * shape).sqrt();
                let z0 = normal_quantile(open_unit(rng));
                let z1 = normal_quantile(open_unit(rng));
                delta * z0.abs() + (1.0 - delta * delta).sqrt() * z1
            }
            Family::Mixture(components) => {
                let u = open_unit(rng);
                let mut acc = 0.0;
                let mut chosen = &components[components.len() - 1];
                for c in components {
                    acc += c.weight;
                    if u < acc {
                        chosen = c;
                        break;
                    }
                }
                chosen.density.draw(rng)?
            }
            Family::Custom(_) => {
                return self.quantile(open_unit(rng));
            }
        };
        Ok(self.location + self.scale * t)
    }

    /// `n` i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }
}

/// Uniform on the open interval (0, 1).
pub(crate) fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.random::<u64>() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Central differences with an order-dependent step: `h = ε^(1/(order+2))(1+|x|)`.
pub fn finite_difference(f: impl Fn(f64) -> f64, order: usize, x: f64) -> f64 {
    let h = f64::EPSILON.powf(1.0 / (order as f64 + 2.0)) * (1.0 + x.abs());
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => {
            (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
        }
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests;
