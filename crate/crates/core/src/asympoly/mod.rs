//! Exact graded polynomials for truncated asymptotic expansions.
//!
//! An [`AsymPoly`] is a finite sum of terms `c · Zv^a · Zu^b · n^(−k/2)` where
//! the coefficient `c` is an [`EtaPoly`]. After the symmetric substitution the
//! polynomial has a single variable `Z`, stored in the `Zv` slot.
//!
//! The order `k` runs from 0 to [`MAX_ORDER`]; everything beyond it is
//! truncated, as every expansion here ends in `o(n^(−3/2))`.

mod eta;
mod text;

use alloc::collections::BTreeMap;
use alloc::format;
use core::cmp::Ordering;
use core::fmt;

use num_rational::BigRational;
#[allow(unused_imports)] // inherent when std is in the dependency graph
use num_traits::Float;
use num_traits::{One, Zero};

pub use eta::{rational, EtaMonomial, EtaPoly, EtaValues, Symbol};

use crate::{Error, Result};

/// Highest retained order `k` of `n^(−k/2)`.
pub const MAX_ORDER: u8 = 3;
/// Highest power of a quantile variable, and highest total degree per term.
pub const MAX_DEGREE: u8 = 4;

/// Which formal quantile variables a polynomial is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Variables {
    /// `Zv = Φ⁻¹(v)` and `Zu = Φ⁻¹(u)`.
    Split,
    /// The single `Z = Φ⁻¹(1 − α/2)`.
    Symmetric,
}

/// Position of a term: order of `n^(−k/2)` and the powers of the variables.
///
/// Sorted by order ascending, then `Zv` power descending, then `Zu` power
/// descending, which is the display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TermKey {
    pub order: u8,
    pub zv: u8,
    pub zu: u8,
}

impl TermKey {
    pub const fn new(order: u8, zv: u8, zu: u8) -> Self {
        Self { order, zv, zu }
    }
}

impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order
            .cmp(&other.order)
            .then(other.zv.cmp(&self.zv))
            .then(other.zu.cmp(&self.zu))
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AsymPoly {
    vars: Variables,
    terms: BTreeMap<TermKey, EtaPoly>,
}

fn check_key(vars: Variables, key: TermKey) -> Result<()> {
    if key.order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order n^-{}/2 is beyond the truncation n^-{}/2",
            key.order, MAX_ORDER
        )));
    }
    if key.zv > MAX_DEGREE || key.zu > MAX_DEGREE || key.zv + key.zu > MAX_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "term degree zv^{} zu^{} exceeds {}",
            key.zv, key.zu, MAX_DEGREE
        )));
    }
    if vars == Variables::Symmetric && key.zu != 0 {
        return Err(Error::InvalidParameter(
            "a symmetric polynomial has no zu".into(),
        ));
    }
    Ok(())
}

impl AsymPoly {
    pub fn zero(vars: Variables) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// A single term. Fails when the key breaks the degree or order bounds.
    pub fn monomial(vars: Variables, key: TermKey, coeff: EtaPoly) -> Result<Self> {
        let mut p = Self::zero(vars);
        p.add_term(key, coeff)?;
        Ok(p)
    }

    pub fn add_term(&mut self, key: TermKey, coeff: EtaPoly) -> Result<()> {
        check_key(self.vars, key)?;
        self.accumulate(key, &coeff);
        Ok(())
    }

    fn accumulate(&mut self, key: TermKey, coeff: &EtaPoly) {
        if coeff.is_zero() {
            return;
        }
        let sum = match self.terms.get(&key) {
            Some(c) => c + coeff,
            None => coeff.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn variables(&self) -> Variables {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &EtaPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: TermKey) -> EtaPoly {
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    // A zero polynomial adopts the other operand's variables; otherwise the
    // kinds must agree.
    fn common_vars(&self, other: &AsymPoly) -> Variables {
        if self.is_zero() {
            return other.vars;
        }
        if other.is_zero() {
            return self.vars;
        }
        assert_eq!(
            self.vars, other.vars,
            "cannot combine polynomials in different variables"
        );
        self.vars
    }

    /// Exact sum.
    ///
    /// # Panics
    /// If both operands are non-zero and written in different variables.
    pub fn add(&self, other: &AsymPoly) -> AsymPoly {
        let mut out = self.clone();
        out.vars = self.common_vars(other);
        for (k, c) in &other.terms {
            out.accumulate(*k, c);
        }
        out
    }

    /// Exact difference. Panics under the same condition as [`AsymPoly::add`].
    pub fn sub(&self, other: &AsymPoly) -> AsymPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> AsymPoly {
        self.map_coefficients(|c| -c)
    }

    pub fn scale(&self, r: &BigRational) -> AsymPoly {
        self.map_coefficients(|c| c.scale(r))
    }

    pub fn scale_monomial(&self, m: &EtaMonomial) -> AsymPoly {
        self.map_coefficients(|c| c.scale_monomial(m))
    }

    pub fn scale_poly(&self, q: &EtaPoly) -> AsymPoly {
        self.map_coefficients(|c| c * q)
    }

    fn map_coefficients(&self, f: impl Fn(&EtaPoly) -> EtaPoly) -> AsymPoly {
        let mut out = AsymPoly::zero(self.vars);
        for (k, c) in &self.terms {
            out.accumulate(*k, &f(c));
        }
        out
    }

    fn map_keys(&self, vars: Variables, f: impl Fn(TermKey) -> (TermKey, bool)) -> AsymPoly {
        let mut out = AsymPoly::zero(vars);
        for (k, c) in &self.terms {
            let (key, negate) = f(*k);
            if negate {
                out.accumulate(key, &-c);
            } else {
                out.accumulate(key, c);
            }
        }
        out
    }

    /// Puts `v = 1 − α/2`, `u = α/2`: `Zv → Z`, `Zu → −Z`.
    pub fn substitute_symmetric(&self) -> AsymPoly {
        if self.vars == Variables::Symmetric {
            return self.clone();
        }
        self.map_keys(Variables::Symmetric, |k| {
            (TermKey::new(k.order, k.zv + k.zu, 0), k.zu % 2 == 1)
        })
    }

    /// Exchanges `Zv` and `Zu`. On a polynomial in `Zv` alone this gives the
    /// same expansion evaluated at the level `u`.
    ///
    /// # Panics
    /// On a symmetric polynomial.
    pub fn swap_variables(&self) -> AsymPoly {
        assert_eq!(self.vars, Variables::Split, "swap needs split variables");
        self.map_keys(Variables::Split, |k| {
            (TermKey::new(k.order, k.zu, k.zv), false)
        })
    }

    /// The terms of one order.
    pub fn stratum(&self, order: u8) -> AsymPoly {
        AsymPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.order == order)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Orders that carry at least one term, ascending.
    pub fn orders(&self) -> alloc::vec::Vec<u8> {
        let mut v: alloc::vec::Vec<u8> = self.terms.keys().map(|k| k.order).collect();
        v.dedup();
        v
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.terms.values().any(|c| c.contains(s))
    }

    /// Replaces every `W` by `1 − η₂ + η₄/3 + η₃²/4`.
    pub fn expand_w(&self) -> AsymPoly {
        self.map_coefficients(EtaPoly::expand_w)
    }

    /// Exact equality once `W` is expanded on both sides.
    pub fn equals_expanded(&self, other: &AsymPoly) -> bool {
        self.sub(other).expand_w().is_zero()
    }

    /// Contribution of each order to the numeric value.
    ///
    /// For a symmetric polynomial `zv` is the value of `Z` and `zu` is ignored.
    pub fn evaluate_strata(&self, m: &EtaValues, zv: f64, zu: f64, n: u64) -> Result<[f64; 4]> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "sample size must be at least 1".into(),
            ));
        }
        let nf = n as f64;
        let root = nf.sqrt();
        let weights = [1.0, 1.0 / root, 1.0 / nf, 1.0 / (nf * root)];
        let mut out = [0.0; 4];
        for (k, c) in &self.terms {
            let mut v = c.evaluate(m) * zv.powi(k.zv as i32);
            if self.vars == Variables::Split {
                v *= zu.powi(k.zu as i32);
            }
            out[k.order as usize] += v * weights[k.order as usize];
        }
        if out.iter().all(|x| x.is_finite()) {
            Ok(out)
        } else {
            Err(Error::NonFiniteResult)
        }
    }

    /// `Σ_k n^(−k/2) · c_k(m) · zv^a · zu^b`.
    pub fn evaluate(&self, m: &EtaValues, zv: f64, zu: f64, n: u64) -> Result<f64> {
        Ok(self.evaluate_strata(m, zv, zu, n)?.iter().sum())
    }

    /// Decides whether the order-`order` stratum equals `pattern` placed at
    /// that order, comparing after `W` expansion.
    pub fn factor_check(&self, order: u8, pattern: &FactorPattern) -> FactorCheck {
        let target = pattern.at_order(order, self.vars);
        let residual = self.stratum(order).sub(&target);
        FactorCheck {
            holds: residual.expand_w().is_zero(),
            residual,
        }
    }
}

impl fmt::Display for AsymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render(self))
    }
}

impl core::str::FromStr for AsymPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        text::parse(s, None)
    }
}

impl AsymPoly {
    /// Parses the rendering, inferring the variables (split when none appear).
    pub fn parse(s: &str) -> Result<Self> {
        text::parse(s, None)
    }

    /// Parses with the variable kind fixed in advance.
    pub fn parse_as(s: &str, vars: Variables) -> Result<Self> {
        text::parse(s, Some(vars))
    }
}

impl EtaPoly {
    pub fn parse(s: &str) -> Result<Self> {
        text::parse_eta(s)
    }
}

impl fmt::Display for EtaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render_eta(self))
    }
}

impl core::str::FromStr for EtaPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        text::parse_eta(s)
    }
}

/// A product `factor · shape` where `shape` is a polynomial in the quantile
/// variables with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorPattern {
    pub factor: EtaPoly,
    pub shape: alloc::vec::Vec<(u8, u8, BigRational)>,
}

impl FactorPattern {
    /// `(η₃/48) · W · (Z⁴ − 4Z²)`.
    pub fn third_order_gap() -> Self {
        let factor = EtaPoly::term(
            rational(1, 48),
            EtaMonomial::symbol(Symbol::Eta3).with(Symbol::W, 1),
        );
        Self {
            factor,
            shape: alloc::vec![(4, 0, BigRational::one()), (2, 0, rational(-4, 1))],
        }
    }

    /// The pattern as a polynomial of the given order.
    pub fn at_order(&self, order: u8, vars: Variables) -> AsymPoly {
        let mut out = AsymPoly::zero(vars);
        for (zv, zu, r) in &self.shape {
            if r.is_zero() {
                continue;
            }
            out.accumulate(TermKey::new(order, *zv, *zu), &self.factor.scale(r));
        }
        out
    }
}

/// Outcome of [`AsymPoly::factor_check`]. The residual is the stratum minus
/// the pattern, before `W` expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorCheck {
    pub holds: bool,
    pub residual: AsymPoly,
}

#[cfg(test)]
mod tests;
