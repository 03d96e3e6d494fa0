//! Predicted lower bounds for restricted sumsets, their applicability rules,
//! and verdict reports comparing a prediction with the actual `|C|`.
//!
//! [`evaluate`] works on precomputed [`AmbientFacts`], [`ConstraintFacts`],
//! [`SetFacts`] and [`SumStats`] so the sweep engine and [`check_instance`]
//! share one implementation of every formula.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{largest_power_at_most, prime_power};
use crate::error::{Error, Result};
use crate::field::{embed_elementary, unembed_elementary, FieldSpec};
use crate::group::GroupClass;
use crate::poly::{build_difference_poly, Degree};
use crate::sumsets::{Ambient, Constraint, Element, Instance, InstanceDoc, SumsetProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "cauchy_davenport")]
    CauchyDavenport,
    #[serde(rename = "kemperman_scherk")]
    KempermanScherk,
    #[serde(rename = "erdos_heilbronn")]
    ErdosHeilbronn,
    #[serde(rename = "anr")]
    Anr,
    #[serde(rename = "lev_conjecture")]
    LevConjecture,
    #[serde(rename = "thm_1_1")]
    PolyRestricted,
    #[serde(rename = "thm_1_2")]
    LinearRestricted,
    #[serde(rename = "thm_1_3_i")]
    DifferenceFieldLike,
    #[serde(rename = "thm_1_3_ii")]
    DifferenceCyclicTorsion,
    #[serde(rename = "ps_bound")]
    PsBound,
    #[serde(rename = "karolyi_style")]
    KarolyiStyle,
    /// Predicts `|A| + |B|`, which no instance reaches. Only exists so the
    /// violation path can be exercised.
    #[serde(rename = "test_sentinel")]
    TestSentinel,
}

impl TheoremId {
    /// Every public id, in reporting order. The sentinel is not listed.
    pub const ALL: [TheoremId; 11] = [
        TheoremId::CauchyDavenport,
        TheoremId::KempermanScherk,
        TheoremId::ErdosHeilbronn,
        TheoremId::Anr,
        TheoremId::LevConjecture,
        TheoremId::PolyRestricted,
        TheoremId::LinearRestricted,
        TheoremId::DifferenceFieldLike,
        TheoremId::DifferenceCyclicTorsion,
        TheoremId::PsBound,
        TheoremId::KarolyiStyle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::CauchyDavenport => "cauchy_davenport",
            TheoremId::KempermanScherk => "kemperman_scherk",
            TheoremId::ErdosHeilbronn => "erdos_heilbronn",
            TheoremId::Anr => "anr",
            TheoremId::LevConjecture => "lev_conjecture",
            TheoremId::PolyRestricted => "thm_1_1",
            TheoremId::LinearRestricted => "thm_1_2",
            TheoremId::DifferenceFieldLike => "thm_1_3_i",
            TheoremId::DifferenceCyclicTorsion => "thm_1_3_ii",
            TheoremId::PsBound => "ps_bound",
            TheoremId::KarolyiStyle => "karolyi_style",
            TheoremId::TestSentinel => "test_sentinel",
        }
    }

    /// Which minimum of `ν` the formula subtracts, if any.
    pub fn nu_domain(self) -> Option<NuDomain> {
        match self {
            TheoremId::KempermanScherk | TheoremId::LevConjecture => Some(NuDomain::Sumset),
            TheoremId::PolyRestricted
            | TheoremId::LinearRestricted
            | TheoremId::DifferenceFieldLike
            | TheoremId::DifferenceCyclicTorsion => Some(NuDomain::Restricted),
            _ => None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .iter()
            .chain([&TheoremId::TestSentinel])
            .find(|t| t.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = TheoremId::ALL.iter().map(|t| t.name()).collect();
                Error::InvalidInput(format!(
                    "unknown theorem {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NuDomain {
    #[serde(rename = "C")]
    Restricted,
    #[serde(rename = "A+B")]
    Sumset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Tight,
    Violated,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Tight => "tight",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not_applicable",
        })
    }
}

/// Properties of the ambient that decide applicability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbientFacts {
    pub is_field: bool,
    /// Class of the additive group.
    pub class: GroupClass,
    pub cyclic_torsion: bool,
    /// `Some(p)` for `Z/p` and `GF(p)`.
    pub prime_cyclic: Option<u64>,
    /// `Some((p, e))` when the additive group is `Z/p^e`.
    pub prime_power_cyclic: Option<(u64, u32)>,
    /// Characteristic when the ambient is a field (`0` for `Q`).
    pub field_characteristic: Option<u64>,
}

impl AmbientFacts {
    pub fn of(ambient: &Ambient) -> Self {
        let prime_power_cyclic = match ambient {
            Ambient::Group(g) if g.free_rank() == 0 && g.invariant_factors().len() == 1 => {
                prime_power(g.invariant_factors()[0])
            }
            Ambient::Field(f) => f.prime_field().map(|p| (p, 1)),
            Ambient::Group(_) => None,
        };
        AmbientFacts {
            is_field: matches!(ambient, Ambient::Field(_)),
            class: ambient.additive_class(),
            cyclic_torsion: ambient.has_cyclic_torsion(),
            prime_cyclic: ambient.prime_cyclic(),
            prime_power_cyclic,
            field_characteristic: ambient.field().map(FieldSpec::characteristic),
        }
    }

    fn torsion_free_or_elementary(&self) -> bool {
        matches!(
            self.class,
            GroupClass::TorsionFree | GroupClass::ElementaryAbelian(_)
        )
    }

    /// Characteristic of a field whose additive group this is, when odd.
    fn odd_characteristic(&self) -> Option<u64> {
        let p = match (self.field_characteristic, self.class) {
            (Some(p), _) => p,
            (None, GroupClass::ElementaryAbelian(p)) => p,
            _ => return None,
        };
        (p > 2).then_some(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    None,
    Distinct,
    Poly,
    Linear,
    Difference,
}

/// Numeric summary of the constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintFacts {
    pub kind: ConstraintKind,
    /// `|S|`: `1` for distinct, `0` for none.
    pub s_size: Option<usize>,
    /// Total degree of the constraint polynomial over a field
    /// (`1` for distinct, `|S|` for difference, `0` for none).
    pub poly_degree: Option<Degree>,
    /// `Σ (m_i + n_i)` for linear constraints, `0` for none.
    pub linear_weight: Option<u64>,
}

impl ConstraintFacts {
    pub fn of(constraint: &Constraint, is_field: bool) -> Self {
        let field_deg = |d: u32| is_field.then_some(Degree::Finite(d));
        match constraint {
            Constraint::None => ConstraintFacts {
                kind: ConstraintKind::None,
                s_size: Some(0),
                poly_degree: field_deg(0),
                linear_weight: Some(0),
            },
            Constraint::Distinct => ConstraintFacts {
                kind: ConstraintKind::Distinct,
                s_size: Some(1),
                poly_degree: field_deg(1),
                linear_weight: None,
            },
            Constraint::Difference(s) => ConstraintFacts {
                kind: ConstraintKind::Difference,
                s_size: Some(s.len()),
                poly_degree: field_deg(s.len() as u32),
                linear_weight: None,
            },
            Constraint::Poly(p) => ConstraintFacts {
                kind: ConstraintKind::Poly,
                s_size: None,
                poly_degree: Some(p.total_degree()),
                linear_weight: None,
            },
            Constraint::Linear(cs) => ConstraintFacts {
                kind: ConstraintKind::Linear,
                s_size: None,
                poly_degree: None,
                linear_weight: Some(cs.iter().map(|c| u64::from(c.m) + u64::from(c.n)).sum()),
            },
        }
    }
}

/// Sizes of `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetFacts {
    pub size_a: usize,
    pub size_b: usize,
    pub a_equals_b: bool,
}

/// Counts measured from one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumStats {
    pub sumset_size: usize,
    pub min_nu_sumset: usize,
    pub restricted_size: usize,
    /// `None` when `C` is empty.
    pub min_nu_restricted: Option<usize>,
}

impl SumStats {
    pub fn of(profile: &SumsetProfile) -> Self {
        SumStats {
            sumset_size: profile.sumset_size(),
            min_nu_sumset: profile.min_nu_sumset().map_or(0, |(n, _)| n),
            restricted_size: profile.restricted_size(),
            min_nu_restricted: profile.min_nu_restricted().map(|(n, _)| n),
        }
    }
}

/// Result of applying one theorem to one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub predicted: Option<i64>,
    pub actual: usize,
    pub min_nu: Option<usize>,
    pub verdict: Verdict,
    /// Why the theorem does not apply.
    pub skipped: Option<&'static str>,
}

impl Outcome {
    fn skip(actual: usize, reason: &'static str) -> Self {
        Outcome {
            predicted: None,
            actual,
            min_nu: None,
            verdict: Verdict::NotApplicable,
            skipped: Some(reason),
        }
    }

    fn compare(predicted: i64, actual: usize, min_nu: Option<usize>) -> Self {
        let a = actual as i64;
        let verdict = if a < predicted {
            Verdict::Violated
        } else if a == predicted && predicted >= 1 {
            Verdict::Tight
        } else {
            Verdict::Satisfied
        };
        Outcome {
            predicted: Some(predicted),
            actual,
            min_nu,
            verdict,
            skipped: None,
        }
    }
}

fn restricted_kind(kind: ConstraintKind) -> bool {
    matches!(kind, ConstraintKind::Distinct | ConstraintKind::Difference)
}

/// Applies `theorem` to the measured counts.
pub fn evaluate(
    theorem: TheoremId,
    ambient: &AmbientFacts,
    constraint: &ConstraintFacts,
    sets: &SetFacts,
    stats: &SumStats,
) -> Outcome {
    let ab = (sets.size_a + sets.size_b) as i64;
    let restricted = stats.restricted_size;
    let min_c = stats.min_nu_restricted;
    let cap = |p: u64, v: i64| v.min(p as i64);
    match theorem {
        TheoremId::CauchyDavenport => {
            let Some(p) = ambient.prime_cyclic else {
                return Outcome::skip(restricted, "ambient is not Z/p");
            };
            if constraint.kind != ConstraintKind::None {
                return Outcome::skip(restricted, "bound is for the unrestricted sumset");
            }
            Outcome::compare(cap(p, ab - 1), restricted, None)
        }
        TheoremId::KempermanScherk => {
            if constraint.kind != ConstraintKind::None {
                return Outcome::skip(restricted, "bound is for the unrestricted sumset");
            }
            let m = stats.min_nu_sumset;
            Outcome::compare(ab - m as i64, restricted, Some(m))
        }
        TheoremId::ErdosHeilbronn => {
            let Some(p) = ambient.prime_cyclic else {
                return Outcome::skip(restricted, "ambient is not Z/p");
            };
            if constraint.kind != ConstraintKind::Distinct {
                return Outcome::skip(restricted, "needs the distinct constraint");
            }
            if !sets.a_equals_b {
                return Outcome::skip(restricted, "needs A = B");
            }
            Outcome::compare(cap(p, 2 * sets.size_a as i64 - 3), restricted, None)
        }
        TheoremId::Anr => {
            let Some(p) = ambient.prime_cyclic else {
                return Outcome::skip(restricted, "ambient is not Z/p");
            };
            if constraint.kind != ConstraintKind::Distinct {
                return Outcome::skip(restricted, "needs the distinct constraint");
            }
            let delta = i64::from(sets.size_a == sets.size_b);
            Outcome::compare(cap(p, ab - 2 - delta), restricted, None)
        }
        TheoremId::LevConjecture => {
            if constraint.kind != ConstraintKind::Distinct {
                return Outcome::skip(restricted, "needs the distinct constraint");
            }
            if restricted == 0 {
                return Outcome::skip(restricted, "restricted sumset is empty");
            }
            let m = stats.min_nu_sumset;
            Outcome::compare(ab - 2 - m as i64, restricted, Some(m))
        }
        TheoremId::PolyRestricted => {
            if !ambient.is_field {
                return Outcome::skip(restricted, "needs a field ambient");
            }
            let deg = match constraint.poly_degree {
                Some(Degree::Finite(d)) => d,
                Some(Degree::NegInfinity) => return Outcome::skip(restricted, "P is the zero polynomial"),
                None => return Outcome::skip(restricted, "constraint is not polynomial"),
            };
            let Some(m) = min_c else {
                return Outcome::skip(restricted, "restricted sumset is empty");
            };
            Outcome::compare(ab - i64::from(deg) - m as i64, restricted, Some(m))
        }
        TheoremId::LinearRestricted => {
            if !ambient.cyclic_torsion {
                return Outcome::skip(restricted, "torsion subgroup is not cyclic");
            }
            let Some(w) = constraint.linear_weight else {
                return Outcome::skip(restricted, "constraint is not linear");
            };
            let Some(m) = min_c else {
                return Outcome::skip(restricted, "restricted sumset is empty");
            };
            Outcome::compare(ab - w as i64 - m as i64, restricted, Some(m))
        }
        TheoremId::DifferenceFieldLike | TheoremId::DifferenceCyclicTorsion => {
            let (ok, reason, factor) = if theorem == TheoremId::DifferenceFieldLike {
                (
                    ambient.torsion_free_or_elementary(),
                    "ambient is neither torsion-free nor elementary abelian",
                    1,
                )
            } else {
                (ambient.cyclic_torsion, "torsion subgroup is not cyclic", 2)
            };
            if !ok {
                return Outcome::skip(restricted, reason);
            }
            if !restricted_kind(constraint.kind) {
                return Outcome::skip(restricted, "needs a difference constraint");
            }
            let s = constraint.s_size.unwrap_or(0);
            if s == 0 {
                return Outcome::skip(restricted, "S is empty");
            }
            let Some(m) = min_c else {
                return Outcome::skip(restricted, "restricted sumset is empty");
            };
            Outcome::compare(ab - factor * s as i64 - m as i64, restricted, Some(m))
        }
        TheoremId::PsBound => {
            let Some(p) = ambient.odd_characteristic() else {
                return Outcome::skip(restricted, "needs odd prime characteristic");
            };
            if !restricted_kind(constraint.kind) {
                return Outcome::skip(restricted, "needs a difference constraint");
            }
            let s = constraint.s_size.unwrap_or(0);
            if s == 0 {
                return Outcome::skip(restricted, "S is empty");
            }
            let q = largest_power_at_most(p, s as u64) as i64;
            Outcome::compare(cap(p, ab - s as i64 - q - 1), restricted, None)
        }
        TheoremId::KarolyiStyle => {
            let Some((p, _)) = ambient.prime_power_cyclic else {
                return Outcome::skip(restricted, "ambient is not Z/q for a prime power q");
            };
            let s = match constraint.kind {
                ConstraintKind::None => 0,
                ConstraintKind::Distinct | ConstraintKind::Difference => {
                    constraint.s_size.unwrap_or(0)
                }
                _ => return Outcome::skip(restricted, "needs a difference constraint"),
            };
            if sets.size_a.min(sets.size_b) <= s {
                return Outcome::skip(restricted, "needs min(|A|, |B|) > |S|");
            }
            Outcome::compare(cap(p, ab - 2 * s as i64 - 1), restricted, None)
        }
        TheoremId::TestSentinel => Outcome::compare(ab, restricted, None),
    }
}

/// The sets and counts behind a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// The restricted sumset `C`.
    #[serde(rename = "C")]
    pub restricted: Vec<String>,
    /// An element attaining `min_nu`.
    pub argmin: Option<String>,
    pub instance: InstanceDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub predicted: Option<i64>,
    pub actual: usize,
    pub min_nu: Option<usize>,
    pub min_nu_domain: Option<NuDomain>,
    pub verdict: Verdict,
    pub detail: String,
    pub witness: Witness,
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let predicted = self
            .predicted
            .map_or_else(|| "-".to_string(), |p| p.to_string());
        write!(
            f,
            "{:<18} predicted {:>4}  actual {:>4}  {:<14} {}",
            self.theorem.name(),
            predicted,
            self.actual,
            self.verdict.to_string(),
            self.detail
        )
    }
}

fn set_facts(instance: &Instance) -> SetFacts {
    SetFacts {
        size_a: instance.a().len(),
        size_b: instance.b().len(),
        a_equals_b: instance.a() == instance.b(),
    }
}

/// Profile of an elementary abelian group instance computed in `GF(p^n)`
/// through the coordinate embedding, with `C` mapped back to the group.
fn embedded_profile(instance: &Instance) -> Option<SumsetProfile> {
    let Ambient::Group(group) = instance.ambient() else {
        return None;
    };
    let GroupClass::ElementaryAbelian(p) = group.classify() else {
        return None;
    };
    if group.free_rank() != 0 {
        return None;
    }
    let field = FieldSpec::extension(p, group.invariant_factors().len()).ok()?;
    let embed = |v: &[Element]| -> Option<Vec<Element>> {
        v.iter()
            .map(|e| Some(Element::Field(embed_elementary(e.as_group()?, group, &field).ok()?)))
            .collect()
    };
    let s = match instance.constraint() {
        Constraint::Distinct => vec![field.zero()],
        Constraint::Difference(s) => embed(s)?
            .into_iter()
            .filter_map(|e| e.as_field().cloned())
            .collect(),
        _ => return None,
    };
    let poly = build_difference_poly(&field, &s);
    let lifted = Instance::new(
        Ambient::Field(field.clone()),
        embed(instance.a())?,
        embed(instance.b())?,
        Constraint::Poly(poly),
    )
    .ok()?;
    let profile = SumsetProfile::compute(&lifted).ok()?;
    let back = |e: &Element| -> Option<Element> {
        Some(Element::Group(unembed_elementary(e.as_field()?, group, &field).ok()?))
    };
    let nu = profile
        .nu
        .iter()
        .map(|(c, &n)| Some((back(c)?, n)))
        .collect::<Option<_>>()?;
    let mut restricted = profile
        .restricted
        .iter()
        .map(back)
        .collect::<Option<Vec<_>>>()?;
    restricted.sort();
    Some(SumsetProfile { nu, restricted })
}

fn profile_for(theorem: TheoremId, instance: &Instance) -> (SumsetProfile, bool) {
    if theorem == TheoremId::DifferenceFieldLike {
        if let Some(p) = embedded_profile(instance) {
            return (p, true);
        }
    }
    let profile = SumsetProfile::compute(instance).expect("instance elements conform to the ambient");
    (profile, false)
}

/// The right-hand side of `theorem` on `instance`, or `None` when the
/// theorem does not apply.
pub fn predicted_bound(theorem: TheoremId, instance: &Instance) -> Option<i64> {
    check_instance(theorem, instance).predicted
}

/// Computes `C`, the prediction and the verdict for one instance.
pub fn check_instance(theorem: TheoremId, instance: &Instance) -> BoundReport {
    let ambient = AmbientFacts::of(instance.ambient());
    let constraint = ConstraintFacts::of(instance.constraint(), ambient.is_field);
    let sets = set_facts(instance);
    let (profile, embedded) = profile_for(theorem, instance);
    let stats = SumStats::of(&profile);
    let outcome = evaluate(theorem, &ambient, &constraint, &sets, &stats);
    let domain = outcome.min_nu.and(theorem.nu_domain());
    let argmin = match domain {
        Some(NuDomain::Sumset) => profile.min_nu_sumset().map(|(_, c)| c.to_string()),
        Some(NuDomain::Restricted) => profile.min_nu_restricted().map(|(_, c)| c.to_string()),
        None => None,
    };
    let detail = match (outcome.skipped, outcome.predicted) {
        (Some(reason), _) => reason.to_string(),
        (None, Some(predicted)) => {
            let mut d = format!(
                "|A| = {}, |B| = {}, |C| = {}, predicted {predicted}",
                sets.size_a, sets.size_b, outcome.actual
            );
            if let (Some(m), Some(dom)) = (outcome.min_nu, domain) {
                let dom = match dom {
                    NuDomain::Sumset => "A+B",
                    NuDomain::Restricted => "C",
                };
                d.push_str(&format!(", min nu over {dom} = {m}"));
            }
            if embedded {
                d.push_str(", computed in the field via the coordinate embedding");
            }
            d
        }
        (None, None) => String::new(),
    };
    BoundReport {
        theorem,
        predicted: outcome.predicted,
        actual: outcome.actual,
        min_nu: outcome.min_nu,
        min_nu_domain: domain,
        verdict: outcome.verdict,
        detail,
        witness: Witness {
            restricted: profile.restricted.iter().map(ToString::to_string).collect(),
            argmin,
            instance: instance.to_doc(),
        },
    }
}
