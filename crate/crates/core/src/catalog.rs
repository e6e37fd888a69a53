//! The displayed expansions, as printed and as rederived by the engine.
//!
//! Three entries are inputs taken on trust: the median-centred quantile
//! expansion of the MLE, the two-sided bound `ε`, and its one-sided part
//! `ε_v`. Every other entry is both transcribed and rederived from those
//! inputs by ring operations; the difference is reported exactly. Where the
//! two disagree the derived polynomial is authoritative.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::asympoly::{AsymPoly, EtaPoly, FactorPattern, TermKey, Variables};
use crate::{Error, Result};

/// Catalog entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum EquationId {
    /// `G_n⁻¹(v) − G_n⁻¹(1/2)`.
    MleQuantile,
    /// Two-sided bound `ε` in `Zv`, `Zu`.
    Bound,
    /// One-sided part `ε_v`, with `ε = ε_v − ε_u`.
    BoundV,
    /// `ε_v` at `v = 1 − α/2`, `u = α/2`.
    BoundVSymmetric,
    /// `G_n⁻¹(1−α/2) − G_n⁻¹(1/2) − ε_{1−α/2}`.
    OneSidedGap,
    /// The same gap written as `(η₃/48)·W·(z⁴ − 4z²)·n^(−3/2)`.
    OneSidedGapFactored,
    /// `G_n⁻¹(v) − G_n⁻¹(u) − ε`.
    TwoSidedGap,
    /// `ε_v` with the order-`n^(−3/2)` terms in `Zv²Zu²` and `ZvZu` added.
    AdjustedBoundV,
}

impl EquationId {
    pub const ALL: [EquationId; 8] = [
        EquationId::MleQuantile,
        EquationId::Bound,
        EquationId::BoundV,
        EquationId::BoundVSymmetric,
        EquationId::OneSidedGap,
        EquationId::OneSidedGapFactored,
        EquationId::TwoSidedGap,
        EquationId::AdjustedBoundV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquationId::MleQuantile => "mle-quantile",
            EquationId::Bound => "bound",
            EquationId::BoundV => "bound-v",
            EquationId::BoundVSymmetric => "bound-v-symmetric",
            EquationId::OneSidedGap => "one-sided-gap",
            EquationId::OneSidedGapFactored => "one-sided-gap-factored",
            EquationId::TwoSidedGap => "two-sided-gap",
            EquationId::AdjustedBoundV => "adjusted-bound-v",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            EquationId::MleQuantile => "G_n^-1(v) - G_n^-1(1/2), median-centred MLE quantile",
            EquationId::Bound => "confidence-interval bound epsilon",
            EquationId::BoundV => "one-sided part epsilon_v of the bound",
            EquationId::BoundVSymmetric => "epsilon_v at v = 1 - alpha/2, u = alpha/2",
            EquationId::OneSidedGap => "G_n^-1(1-alpha/2) - G_n^-1(1/2) - epsilon_(1-alpha/2)",
            EquationId::OneSidedGapFactored => "one-sided gap in factored W form",
            EquationId::TwoSidedGap => "G_n^-1(v) - G_n^-1(u) - epsilon",
            EquationId::AdjustedBoundV => "epsilon_v with added zv^2*zu^2 and zv*zu terms",
        }
    }

    pub fn variables(self) -> Variables {
        match self {
            EquationId::BoundVSymmetric
            | EquationId::OneSidedGap
            | EquationId::OneSidedGapFactored => Variables::Symmetric,
            _ => Variables::Split,
        }
    }

    pub fn is_input(self) -> bool {
        matches!(
            self,
            EquationId::MleQuantile | EquationId::Bound | EquationId::BoundV
        )
    }
}

impl fmt::Display for EquationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for EquationId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EquationId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownEquation(s.into()))
    }
}

/// Builds a polynomial from grouped terms `coefficient · Σ sign·Zv^a·Zu^b`.
struct Builder(AsymPoly);

impl Builder {
    fn new(vars: Variables) -> Self {
        Builder(AsymPoly::zero(vars))
    }

    fn group(mut self, order: u8, coeff: &str, shape: &[(u8, u8, i64)]) -> Self {
        let c = EtaPoly::parse(coeff).expect("catalog coefficient parses");
        for &(zv, zu, sign) in shape {
            let term = c.scale(&crate::asympoly::rational(sign, 1));
            self.0
                .add_term(TermKey::new(order, zv, zu), term)
                .expect("catalog term within bounds");
        }
        self
    }

    fn done(self) -> AsymPoly {
        self.0
    }
}

const V: &[(u8, u8, i64)] = &[(1, 0, 1)];
const V2: &[(u8, u8, i64)] = &[(2, 0, 1)];
const V3: &[(u8, u8, i64)] = &[(3, 0, 1)];
const V4: &[(u8, u8, i64)] = &[(4, 0, 1)];
const V2U: &[(u8, u8, i64)] = &[(2, 1, 1)];
const V3U: &[(u8, u8, i64)] = &[(3, 1, 1)];
const DIFF1: &[(u8, u8, i64)] = &[(1, 0, 1), (0, 1, -1)];
const DIFF2: &[(u8, u8, i64)] = &[(2, 0, 1), (0, 2, -1)];
const DIFF3: &[(u8, u8, i64)] = &[(3, 0, 1), (0, 3, -1)];
const DIFF4: &[(u8, u8, i64)] = &[(4, 0, 1), (0, 4, -1)];
const CROSS21: &[(u8, u8, i64)] = &[(2, 1, 1), (1, 2, -1)];
const CROSS31: &[(u8, u8, i64)] = &[(3, 1, 1), (1, 3, -1)];

// Coefficients shared by the bound and its one-sided part.
const BOUND_A: &str = "eta2/24 + 5/288*eta3^2 - eta4/36";
const BOUND_B: &str = "1/8 - eta2/8 + eta3^2/32 + eta4/24";
const BOUND_C: &str = "eta4/24 - 1/8 - eta3^2/36";
const BOUND_D: &str = "eta2*eta3/48 + eta3^3/216 - eta3*eta4/72 + eta5/80 - eta6/24";
const BOUND_E: &str = "eta3/24 - eta2*eta3/24 + eta3^3/48 - eta5/48 + eta6/12";
const BOUND_F: &str = "7/144*eta3*eta4 - eta3/48 - 5/162*eta3^3 - eta5/80";

/// The printed polynomial of an entry, coefficient by coefficient.
pub fn transcribed(id: EquationId) -> AsymPoly {
    use Variables::{Split, Symmetric};
    match id {
        EquationId::MleQuantile => Builder::new(Split)
            .group(0, "1", V)
            .group(1, "eta3/12", V2)
            .group(2, "-5/72*eta4 - 1/8 + eta2/6 - eta3^2/72", V3)
            .group(2, "-eta3^2/36 - 1/8 + eta4/24", V)
            .group(
                3,
                "eta2*eta3/24 - eta3*eta4/144 - eta3/48 - eta6/8 + eta5/30 - 19/1728*eta3^3",
                V4,
            )
            .group(
                3,
                "eta3*eta4/48 - 67/1296*eta3^3 - 5/48*eta3 + eta2*eta3/12 - eta5/80",
                V2,
            )
            .done(),
        EquationId::Bound => Builder::new(Split)
            .group(0, "1", DIFF1)
            .group(1, "eta3/12", DIFF2)
            .group(2, BOUND_A, DIFF3)
            .group(2, BOUND_B, CROSS21)
            .group(2, BOUND_C, DIFF1)
            .group(3, BOUND_D, DIFF4)
            .group(3, BOUND_E, CROSS31)
            .group(3, BOUND_F, DIFF2)
            .done(),
        // The printed display closes the 1/n bracket before the Zv term;
        // that term is read as part of the 1/n stratum, as in the bound.
        EquationId::BoundV => bound_v_printed(),
        EquationId::BoundVSymmetric => Builder::new(Symmetric)
            .group(0, "1", V)
            .group(1, "eta3/12", V2)
            .group(2, "-5/72*eta4 - 1/8 + eta2/6 - eta3^2/72", V3)
            .group(2, "eta4/24 - 1/8 - eta3^2/36", V)
            .group(
                3,
                "eta2*eta3/16 - 7/432*eta3^3 - eta3*eta4/72 + eta5/30 - eta6/8",
                V4,
            )
            .group(3, BOUND_F, V2)
            .done(),
        EquationId::OneSidedGap => Builder::new(Symmetric)
            .group(3, "eta3/48 - eta2*eta3/48 + eta3*eta4/144 + eta3^3/192", V4)
            .group(3, "eta2*eta3/12 - eta3/12 - eta3*eta4/36 - eta3^3/48", V2)
            .done(),
        EquationId::OneSidedGapFactored => FactorPattern::third_order_gap().at_order(3, Symmetric),
        EquationId::TwoSidedGap => Builder::new(Split)
            .group(2, "-W/8", DIFF3)
            .group(2, "-W/8", CROSS21)
            .group(
                3,
                "-eta3*W/48 - eta6/12 + eta5/48 - eta3^3/96 + eta3*eta4/72",
                DIFF4,
            )
            .group(
                3,
                "-eta3*W/24 - eta6/12 + eta5/48 - eta3^3/96 + eta3*eta4/72",
                CROSS31,
            )
            .group(3, "-eta3*W/12", DIFF2)
            .done(),
        EquationId::AdjustedBoundV => bound_v_printed().add(&printed_adjustment()),
    }
}

fn bound_v_printed() -> AsymPoly {
    Builder::new(Variables::Split)
        .group(0, "1", V)
        .group(1, "eta3/12", V2)
        .group(2, BOUND_A, V3)
        .group(2, BOUND_B, V2U)
        .group(2, BOUND_C, V)
        .group(3, BOUND_D, V4)
        .group(3, BOUND_E, V3U)
        .group(3, BOUND_F, V2)
        .done()
}

/// The two terms added to `ε_v` as printed, both with minus signs.
pub fn printed_adjustment() -> AsymPoly {
    Builder::new(Variables::Split)
        .group(3, "-eta3*W/48", &[(2, 2, 1)])
        .group(3, "-eta3*W/12", &[(1, 1, 1)])
        .done()
}

/// Outcome of comparing a derivation with its transcription.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum Status {
    Input,
    Matches,
    Differs,
    Failed,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Input => "INPUT",
            Status::Matches => "MATCHES",
            Status::Differs => "DIFFERS",
            Status::Failed => "FAILED",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A named exact property checked during derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub name: String,
    pub holds: bool,
    /// What is left over; zero when the property holds.
    pub residual: AsymPoly,
}

impl Finding {
    fn zero_check(name: impl Into<String>, residual: AsymPoly) -> Self {
        let holds = residual.expand_w().is_zero();
        Finding {
            name: name.into(),
            holds,
            residual: if holds {
                AsymPoly::zero(residual.variables())
            } else {
                residual
            },
        }
    }
}

/// Derived form of an entry and its exact difference from the transcription.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffReport {
    pub id: EquationId,
    pub status: Status,
    pub recipe: &'static str,
    pub derived: Option<AsymPoly>,
    /// `derived − transcribed`; zero when they agree after `W` expansion.
    pub residual: Option<AsymPoly>,
    pub failure: Option<String>,
    pub findings: Vec<Finding>,
}

/// Order-`n^(−3/2)` terms `a·Zv²Zu² + b·ZvZu` added to `ε_v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustmentReport {
    pub derived: AsymPoly,
    pub printed: AsymPoly,
    /// `derived − printed`.
    pub difference: AsymPoly,
    /// `substitute_symmetric(G − ε_v − derived)`; zero by construction.
    pub derived_residual: AsymPoly,
    /// The same with the printed terms.
    pub printed_residual: AsymPoly,
}

impl AdjustmentReport {
    pub fn derived_cancels(&self) -> bool {
        self.derived_residual.expand_w().is_zero()
    }

    pub fn printed_cancels(&self) -> bool {
        self.printed_residual.expand_w().is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: EquationId,
    pub transcribed: AsymPoly,
    pub report: DiffReport,
}

/// All entries, derived once at construction and immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    adjustment: core::result::Result<AdjustmentReport, String>,
}

impl Default for Catalog {
    fn default() -> Self {
        Self::new()
    }
}

const RECIPE_INPUT: &str = "input, taken as printed";
const RECIPE_SYMMETRIC: &str = "substitute_symmetric(bound-v)";
const RECIPE_GAP: &str = "substitute_symmetric(mle-quantile) - derived bound-v-symmetric";
const RECIPE_FACTORED: &str =
    "orders n^0, n^-1/2, n^-1 of derived one-sided-gap empty, then factor_check at n^-3/2 against eta3/48*W*(z^4 - 4*z^2)";
const RECIPE_TWO_SIDED: &str = "mle-quantile at zv - mle-quantile at zu - bound";
const RECIPE_ADJUSTED: &str =
    "bound-v + a*zv^2*zu^2*n^-3/2 + b*zv*zu*n^-3/2 where a*z^4 - b*z^2 is the n^-3/2 stratum of derived one-sided-gap-factored";

impl Catalog {
    pub fn new() -> Self {
        let g = transcribed(EquationId::MleQuantile);
        let bound = transcribed(EquationId::Bound);
        let bound_v = transcribed(EquationId::BoundV);

        let mut entries = Vec::new();
        let mut push = |id: EquationId,
                        recipe: &'static str,
                        derived: core::result::Result<AsymPoly, String>,
                        findings: Vec<Finding>| {
            let t = transcribed(id);
            let report = compare(id, recipe, &t, derived, findings);
            entries.push(CatalogEntry {
                id,
                transcribed: t,
                report,
            });
        };

        push(
            EquationId::MleQuantile,
            RECIPE_INPUT,
            Err(String::new()),
            Vec::new(),
        );
        push(
            EquationId::Bound,
            RECIPE_INPUT,
            Err(String::new()),
            Vec::new(),
        );
        // ε_u := ε_v − ε must be ε_v with the two levels exchanged.
        let split = Finding::zero_check(
            "bound-v - bound equals bound-v with zv and zu exchanged",
            bound_v.sub(&bound).sub(&bound_v.swap_variables()),
        );
        push(
            EquationId::BoundV,
            RECIPE_INPUT,
            Err(String::new()),
            alloc::vec![split],
        );

        let sym = bound_v.substitute_symmetric();
        push(
            EquationId::BoundVSymmetric,
            RECIPE_SYMMETRIC,
            Ok(sym.clone()),
            Vec::new(),
        );

        let gap = g.substitute_symmetric().sub(&sym);
        let mut gap_findings = Vec::new();
        let low = (0..3).fold(AsymPoly::zero(Variables::Symmetric), |acc, k| {
            acc.add(&gap.stratum(k))
        });
        gap_findings.push(Finding::zero_check(
            "orders n^0, n^-1/2, n^-1 are empty",
            low.clone(),
        ));
        let printed_sym_gap = g
            .substitute_symmetric()
            .sub(&transcribed(EquationId::BoundVSymmetric));
        gap_findings.push(Finding::zero_check(
            "the same difference taken with printed bound-v-symmetric matches the derived gap",
            printed_sym_gap.sub(&gap),
        ));
        push(
            EquationId::OneSidedGap,
            RECIPE_GAP,
            Ok(gap.clone()),
            gap_findings,
        );

        let pattern = FactorPattern::third_order_gap();
        let factored = if !low.is_zero() {
            Err(format!("lower orders are not empty: {low}"))
        } else {
            let check = gap.factor_check(3, &pattern);
            if check.holds {
                Ok(pattern.at_order(3, Variables::Symmetric))
            } else {
                Err(format!(
                    "factor_check failed, residual {}",
                    check.residual.expand_w()
                ))
            }
        };
        push(
            EquationId::OneSidedGapFactored,
            RECIPE_FACTORED,
            factored.clone(),
            Vec::new(),
        );

        let two_sided = g.sub(&g.swap_variables()).sub(&bound);
        let linear = two_sided.coefficient(TermKey::new(2, 1, 0)).expand_w();
        let linear_u = two_sided.coefficient(TermKey::new(2, 0, 1)).expand_w();
        let mut linear_poly = AsymPoly::zero(Variables::Split);
        linear_poly
            .add_term(TermKey::new(2, 1, 0), linear)
            .expect("in bounds");
        linear_poly
            .add_term(TermKey::new(2, 0, 1), linear_u)
            .expect("in bounds");
        let two_sided_findings = alloc::vec![
            Finding::zero_check(
                "orders n^0, n^-1/2 are empty",
                two_sided.stratum(0).add(&two_sided.stratum(1))
            ),
            Finding::zero_check("n^-1 coefficients of zv and zu are zero", linear_poly),
        ];
        push(
            EquationId::TwoSidedGap,
            RECIPE_TWO_SIDED,
            Ok(two_sided),
            two_sided_findings,
        );

        let adjustment = factored
            .and_then(|f| solve_adjustment(&f).map(|adj| (f, adj)))
            .map(|(f, derived)| {
                // Shown in W form when it agrees with the direct computation.
                let residual = |adj: &AsymPoly| {
                    let direct = g.sub(&bound_v.add(adj)).substitute_symmetric();
                    let compact = f.sub(&adj.substitute_symmetric());
                    if direct.equals_expanded(&compact) {
                        compact
                    } else {
                        direct
                    }
                };
                let printed = printed_adjustment();
                AdjustmentReport {
                    difference: derived.sub(&printed),
                    derived_residual: residual(&derived),
                    printed_residual: residual(&printed),
                    derived,
                    printed,
                }
            });
        let (adjusted, adjusted_findings) = match &adjustment {
            Ok(a) => (
                Ok(bound_v.add(&a.derived)),
                alloc::vec![
                    Finding::zero_check(
                        "substitute_symmetric(mle-quantile - derived adjusted-bound-v) is zero through n^-3/2",
                        a.derived_residual.clone(),
                    ),
                    Finding::zero_check(
                        "substitute_symmetric(mle-quantile - printed adjusted-bound-v) is zero through n^-3/2",
                        a.printed_residual.clone(),
                    ),
                ],
            ),
            Err(e) => (Err(e.clone()), Vec::new()),
        };
        push(
            EquationId::AdjustedBoundV,
            RECIPE_ADJUSTED,
            adjusted,
            adjusted_findings,
        );

        Catalog {
            entries,
            adjustment,
        }
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn entry(&self, id: EquationId) -> &CatalogEntry {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .expect("every id has an entry")
    }

    pub fn transcribed(&self, id: EquationId) -> &AsymPoly {
        &self.entry(id).transcribed
    }

    /// The derived polynomial. Inputs have none.
    pub fn derived(&self, id: EquationId) -> Result<&AsymPoly> {
        let r = &self.entry(id).report;
        match (&r.derived, r.status) {
            (Some(p), _) => Ok(p),
            (None, Status::Input) => Err(Error::NoRecipe(id.name())),
            (None, _) => Err(Error::RecipeFailed {
                id: id.name(),
                reason: r.failure.clone().unwrap_or_default(),
            }),
        }
    }

    /// Derived when a recipe exists, otherwise the transcription.
    pub fn authoritative(&self, id: EquationId) -> Result<&AsymPoly> {
        if id.is_input() {
            Ok(self.transcribed(id))
        } else {
            self.derived(id)
        }
    }

    pub fn diff(&self, id: EquationId) -> &DiffReport {
        &self.entry(id).report
    }

    pub fn adjustment(&self) -> Result<&AdjustmentReport> {
        self.adjustment.as_ref().map_err(|e| Error::RecipeFailed {
            id: EquationId::AdjustedBoundV.name(),
            reason: e.clone(),
        })
    }

    /// True when every recipe produced a polynomial. Differences from the
    /// transcriptions are findings and do not count as failures.
    pub fn all_recipes_succeeded(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.report.status != Status::Failed)
    }
}

fn compare(
    id: EquationId,
    recipe: &'static str,
    transcribed: &AsymPoly,
    derived: core::result::Result<AsymPoly, String>,
    findings: Vec<Finding>,
) -> DiffReport {
    if id.is_input() {
        return DiffReport {
            id,
            status: Status::Input,
            recipe,
            derived: None,
            residual: None,
            failure: None,
            findings,
        };
    }
    match derived {
        Ok(d) => {
            let raw = d.sub(transcribed);
            let matches = raw.expand_w().is_zero();
            DiffReport {
                id,
                status: if matches {
                    Status::Matches
                } else {
                    Status::Differs
                },
                recipe,
                derived: Some(d),
                residual: Some(if matches {
                    AsymPoly::zero(raw.variables())
                } else {
                    raw
                }),
                failure: None,
                findings,
            }
        }
        Err(reason) => DiffReport {
            id,
            status: Status::Failed,
            recipe,
            derived: None,
            residual: None,
            failure: Some(reason),
            findings,
        },
    }
}

/// Finds `a·Zv²Zu² + b·ZvZu` at order 3 whose symmetric substitution
/// `a·Z⁴ − b·Z²` equals the order-3 stratum of the gap.
fn solve_adjustment(gap: &AsymPoly) -> core::result::Result<AsymPoly, String> {
    let stratum = gap.stratum(3);
    let a = stratum.coefficient(TermKey::new(3, 4, 0));
    let b = -stratum.coefficient(TermKey::new(3, 2, 0));
    let mut adj = AsymPoly::zero(Variables::Split);
    adj.add_term(TermKey::new(3, 2, 2), a)
        .map_err(|e| format!("{e}"))?;
    adj.add_term(TermKey::new(3, 1, 1), b)
        .map_err(|e| format!("{e}"))?;
    if !adj.substitute_symmetric().equals_expanded(&stratum) {
        return Err(format!(
            "no adjustment of the form a*zv^2*zu^2 + b*zv*zu reproduces {stratum}"
        ));
    }
    Ok(adj)
}
