//! Sumsets, restricted sumsets and representation counts over a group or a
//! field ambient.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::group::{GroupClass, GroupElement, GroupSpec};
use crate::poly::{build_difference_poly, MultiPoly};

/// Where `A` and `B` live: a finitely generated abelian group, or a field
/// (used through its additive group, plus polynomial constraints).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ambient {
    Group(GroupSpec),
    Field(FieldSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Group(GroupElement),
    Field(FieldElement),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Group(g) => g.fmt(f),
            Element::Field(a) => a.fmt(f),
        }
    }
}

impl Element {
    pub fn as_group(&self) -> Option<&GroupElement> {
        match self {
            Element::Group(g) => Some(g),
            Element::Field(_) => None,
        }
    }

    pub fn as_field(&self) -> Option<&FieldElement> {
        match self {
            Element::Field(a) => Some(a),
            Element::Group(_) => None,
        }
    }
}

impl Ambient {
    pub fn group(&self) -> Option<&GroupSpec> {
        match self {
            Ambient::Group(g) => Some(g),
            Ambient::Field(_) => None,
        }
    }

    pub fn field(&self) -> Option<&FieldSpec> {
        match self {
            Ambient::Field(f) => Some(f),
            Ambient::Group(_) => None,
        }
    }

    pub fn zero(&self) -> Element {
        match self {
            Ambient::Group(g) => Element::Group(g.identity()),
            Ambient::Field(f) => Element::Field(f.zero()),
        }
    }

    pub fn conforms(&self, e: &Element) -> bool {
        match (self, e) {
            (Ambient::Group(g), Element::Group(x)) => g.conforms(x),
            (Ambient::Field(f), Element::Field(x)) => f.conforms(x),
            _ => false,
        }
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        match (self, a, b) {
            (Ambient::Group(g), Element::Group(x), Element::Group(y)) => {
                g.add(x, y).map(Element::Group)
            }
            (Ambient::Field(f), Element::Field(x), Element::Field(y)) => {
                f.add(x, y).map(Element::Field)
            }
            _ => invalid(format!("elements {a}, {b} do not belong to {self}")),
        }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Result<Element> {
        match (self, a, b) {
            (Ambient::Group(g), Element::Group(x), Element::Group(y)) => {
                g.sub(x, y).map(Element::Group)
            }
            (Ambient::Field(f), Element::Field(x), Element::Field(y)) => {
                f.sub(x, y).map(Element::Field)
            }
            _ => invalid(format!("elements {a}, {b} do not belong to {self}")),
        }
    }

    pub fn parse_element(&self, text: &str) -> Result<Element> {
        match self {
            Ambient::Group(g) => g.parse_element(text).map(Element::Group),
            Ambient::Field(f) => f.parse_element(text).map(Element::Field),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Ambient::Group(g) => g.is_finite(),
            Ambient::Field(f) => f.size().is_some(),
        }
    }

    /// Every element (finite ambients) or the elements of the box of the
    /// given radius (free coordinates of a group, integers of `Q`).
    pub fn box_elements(&self, radius: u64) -> Result<Vec<Element>> {
        match self {
            Ambient::Group(g) => Ok(g
                .box_elements(radius)?
                .into_iter()
                .map(Element::Group)
                .collect()),
            Ambient::Field(f) => Ok(f
                .box_elements(radius)?
                .into_iter()
                .map(Element::Field)
                .collect()),
        }
    }

    /// Class of the additive group.
    pub fn additive_class(&self) -> GroupClass {
        match self {
            Ambient::Group(g) => g.classify(),
            Ambient::Field(f) => f.additive_class(),
        }
    }

    /// The torsion subgroup of the additive group is cyclic (trivial counts).
    pub fn has_cyclic_torsion(&self) -> bool {
        match self {
            Ambient::Group(g) => g.has_cyclic_torsion(),
            Ambient::Field(FieldSpec::Rationals) => true,
            Ambient::Field(FieldSpec::Finite(f)) => f.degree() == 1,
        }
    }

    /// `Some(p)` when the additive group is `Z/p` for a prime `p`.
    pub fn prime_cyclic(&self) -> Option<u64> {
        match self {
            Ambient::Group(g) => g.prime_cyclic(),
            Ambient::Field(f) => f.prime_field(),
        }
    }

    /// Number of elements, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        match self {
            Ambient::Group(g) => g.order(),
            Ambient::Field(f) => f.size(),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Group(g) => g.fmt(f),
            Ambient::Field(x) => x.fmt(f),
        }
    }
}

impl FromStr for Ambient {
    type Err = Error;

    /// `"Q"` and `"GF(...)"` are fields; anything else is a group spec.
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "Q" || t.starts_with("GF") {
            t.parse().map(Ambient::Field)
        } else {
            t.parse().map(Ambient::Group)
        }
    }
}

/// One avoided relation `m·a - n·b = d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub m: u32,
    pub n: u32,
    pub d: GroupElement,
}

/// The admissibility condition on a pair `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// Every pair is admissible: `C = A + B`.
    None,
    /// `a ≠ b`.
    Distinct,
    /// `P(a, b) ≠ 0`; field ambients only.
    Poly(MultiPoly),
    /// `m_i a - n_i b ≠ d_i` for all `i`; group ambients only.
    Linear(Vec<LinearConstraint>),
    /// `a - b ∉ S`.
    Difference(Vec<Element>),
}

impl Constraint {
    pub fn type_name(&self) -> &'static str {
        match self {
            Constraint::None => "none",
            Constraint::Distinct => "distinct",
            Constraint::Poly(_) => "poly",
            Constraint::Linear(_) => "linear",
            Constraint::Difference(_) => "difference",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::None | Constraint::Distinct => write!(f, "{}", self.type_name()),
            Constraint::Poly(p) => write!(f, "poly {p}"),
            Constraint::Linear(cs) => {
                let parts: Vec<String> = cs
                    .iter()
                    .map(|c| format!("{}a-{}b≠{}", c.m, c.n, c.d))
                    .collect();
                write!(f, "linear [{}]", parts.join(", "))
            }
            Constraint::Difference(s) => {
                let parts: Vec<String> = s.iter().map(ToString::to_string).collect();
                write!(f, "difference {{{}}}", parts.join(", "))
            }
        }
    }
}

/// One problem: ambient, nonempty duplicate-free `A` and `B` in canonical
/// order, and a constraint compatible with the ambient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    ambient: Ambient,
    a: Vec<Element>,
    b: Vec<Element>,
    constraint: Constraint,
}

fn canonical_set(ambient: &Ambient, name: &str, items: Vec<Element>, allow_empty: bool) -> Result<Vec<Element>> {
    if items.is_empty() && !allow_empty {
        return invalid(format!("{name} must be nonempty"));
    }
    if let Some(bad) = items.iter().find(|e| !ambient.conforms(e)) {
        return invalid(format!("{name} contains {bad}, which is not in {ambient}"));
    }
    let n = items.len();
    let set: BTreeSet<Element> = items.into_iter().collect();
    if set.len() != n {
        return invalid(format!("{name} contains duplicate elements"));
    }
    Ok(set.into_iter().collect())
}

impl Instance {
    pub fn new(
        ambient: Ambient,
        a: Vec<Element>,
        b: Vec<Element>,
        constraint: Constraint,
    ) -> Result<Self> {
        let a = canonical_set(&ambient, "A", a, false)?;
        let b = canonical_set(&ambient, "B", b, false)?;
        let constraint = match (constraint, &ambient) {
            (Constraint::Poly(p), Ambient::Field(f)) => {
                if p.field() != f || p.nvars() != 2 {
                    return invalid(format!("P must be a polynomial in x, y over {f}"));
                }
                Constraint::Poly(p)
            }
            (Constraint::Poly(_), Ambient::Group(g)) => {
                return invalid(format!("polynomial constraints need a field ambient, not {g}"))
            }
            (Constraint::Linear(cs), Ambient::Group(g)) => {
                if let Some(c) = cs.iter().find(|c| !g.conforms(&c.d)) {
                    return invalid(format!("d = {} is not in {g}", c.d));
                }
                Constraint::Linear(cs)
            }
            (Constraint::Linear(_), Ambient::Field(f)) => {
                return invalid(format!("linear constraints need a group ambient, not {f}"))
            }
            (Constraint::Difference(s), amb) => {
                Constraint::Difference(canonical_set(amb, "S", s, true)?)
            }
            (c, _) => c,
        };
        Ok(Instance {
            ambient,
            a,
            b,
            constraint,
        })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn a(&self) -> &[Element] {
        &self.a
    }

    pub fn b(&self) -> &[Element] {
        &self.b
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    /// Compiles the constraint into a per-pair test.
    pub fn admissibility(&self) -> Admissibility<'_> {
        let ambient = &self.ambient;
        let test = match (&self.constraint, ambient) {
            (Constraint::None, _) => Test::All,
            (Constraint::Distinct, Ambient::Group(_)) => {
                Test::Differences([ambient.zero()].into_iter().collect())
            }
            (Constraint::Difference(s), Ambient::Group(_)) => {
                Test::Differences(s.iter().cloned().collect())
            }
            // Over a field, difference avoidance goes through P = ∏ (x - y - s).
            (Constraint::Distinct, Ambient::Field(f)) => Test::Poly(build_difference_poly(f, &[f.zero()])),
            (Constraint::Difference(s), Ambient::Field(f)) => {
                let s: Vec<FieldElement> = s.iter().filter_map(|e| e.as_field().cloned()).collect();
                Test::Poly(build_difference_poly(f, &s))
            }
            (Constraint::Poly(p), _) => Test::Poly(p.clone()),
            (Constraint::Linear(cs), _) => Test::Linear(cs),
        };
        Admissibility { ambient, test }
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let text = |v: &[Element]| -> Vec<ElementText> {
            v.iter().map(|e| ElementText::Text(e.to_string())).collect()
        };
        let constraint = match &self.constraint {
            Constraint::None => ConstraintDoc::None,
            Constraint::Distinct => ConstraintDoc::Distinct,
            Constraint::Poly(p) => ConstraintDoc::Poly(p.to_string()),
            Constraint::Linear(cs) => ConstraintDoc::Linear(
                cs.iter()
                    .map(|c| LinearDoc {
                        m: c.m,
                        n: c.n,
                        d: ElementText::Text(c.d.to_string()),
                    })
                    .collect(),
            ),
            Constraint::Difference(s) => ConstraintDoc::Difference(text(s)),
        };
        InstanceDoc {
            ambient: self.ambient.to_string(),
            a: text(&self.a),
            b: text(&self.b),
            constraint,
        }
    }

    pub fn from_doc(doc: &InstanceDoc) -> Result<Self> {
        let ambient: Ambient = doc.ambient.parse()?;
        let parse_all = |v: &[ElementText]| -> Result<Vec<Element>> {
            v.iter().map(|t| ambient.parse_element(&t.text())).collect()
        };
        let a = parse_all(&doc.a)?;
        let b = parse_all(&doc.b)?;
        let constraint = match &doc.constraint {
            ConstraintDoc::None => Constraint::None,
            ConstraintDoc::Distinct => Constraint::Distinct,
            ConstraintDoc::Poly(text) => match &ambient {
                Ambient::Field(f) => Constraint::Poly(MultiPoly::parse(text, f, 2)?),
                Ambient::Group(g) => {
                    return invalid(format!("polynomial constraints need a field ambient, not {g}"))
                }
            },
            ConstraintDoc::Linear(items) => {
                let g = ambient
                    .group()
                    .ok_or_else(|| Error::InvalidInput("linear constraints need a group ambient".into()))?;
                let cs = items
                    .iter()
                    .map(|c| {
                        Ok(LinearConstraint {
                            m: c.m,
                            n: c.n,
                            d: g.parse_element(&c.d.text())?,
                        })
                    })
                    .collect::<Result<_>>()?;
                Constraint::Linear(cs)
            }
            ConstraintDoc::Difference(s) => Constraint::Difference(parse_all(s)?),
        };
        Instance::new(ambient, a, b, constraint)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("instance document: {e}")))?;
        Self::from_doc(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("instance documents serialize")
    }
}

enum Test<'a> {
    All,
    Differences(BTreeSet<Element>),
    Poly(MultiPoly),
    Linear(&'a [LinearConstraint]),
}

/// A compiled pair-admissibility test for one instance.
pub struct Admissibility<'a> {
    ambient: &'a Ambient,
    test: Test<'a>,
}

impl Admissibility<'_> {
    pub fn admits(&self, a: &Element, b: &Element) -> Result<bool> {
        match &self.test {
            Test::All => Ok(true),
            Test::Differences(s) => Ok(!s.contains(&self.ambient.sub(a, b)?)),
            Test::Poly(p) => {
                let (Element::Field(x), Element::Field(y)) = (a, b) else {
                    return invalid("polynomial constraint on group elements");
                };
                let v = p.eval(&[x.clone(), y.clone()])?;
                Ok(!p.field().is_zero(&v))
            }
            Test::Linear(cs) => {
                let (Ambient::Group(g), Element::Group(x), Element::Group(y)) = (self.ambient, a, b)
                else {
                    return invalid("linear constraint outside a group");
                };
                for c in cs.iter() {
                    let lhs = g.sub(&g.scalar_mul(c.m as i64, x)?, &g.scalar_mul(c.n as i64, y)?)?;
                    if lhs == c.d {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Everything the bound checks need about one instance, computed in a single
/// pass over `A × B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumsetProfile {
    /// `ν(c)` for every `c ∈ A + B`.
    pub nu: BTreeMap<Element, usize>,
    /// The restricted sumset `C`, in canonical order.
    pub restricted: Vec<Element>,
}

impl SumsetProfile {
    pub fn compute(instance: &Instance) -> Result<Self> {
        let ambient = instance.ambient();
        let test = instance.admissibility();
        let mut nu: BTreeMap<Element, usize> = BTreeMap::new();
        let mut restricted = BTreeSet::new();
        for a in instance.a() {
            for b in instance.b() {
                let s = ambient.add(a, b)?;
                if test.admits(a, b)? {
                    restricted.insert(s.clone());
                }
                *nu.entry(s).or_insert(0) += 1;
            }
        }
        Ok(SumsetProfile {
            nu,
            restricted: restricted.into_iter().collect(),
        })
    }

    pub fn sumset_size(&self) -> usize {
        self.nu.len()
    }

    pub fn restricted_size(&self) -> usize {
        self.restricted.len()
    }

    /// `(min ν over A + B, an element attaining it)`.
    pub fn min_nu_sumset(&self) -> Option<(usize, &Element)> {
        self.nu.iter().map(|(c, &n)| (n, c)).min_by_key(|(n, _)| *n)
    }

    /// `(min ν over C, an element attaining it)`, `None` when `C = ∅`.
    pub fn min_nu_restricted(&self) -> Option<(usize, &Element)> {
        self.restricted
            .iter()
            .map(|c| (self.nu[c], c))
            .min_by_key(|(n, _)| *n)
    }
}

fn check_sets(ambient: &Ambient, a: &[Element], b: &[Element]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return invalid("A and B must be nonempty");
    }
    if let Some(bad) = a.iter().chain(b).find(|e| !ambient.conforms(e)) {
        return invalid(format!("{bad} is not an element of {ambient}"));
    }
    Ok(())
}

/// `A + B` in canonical order.
pub fn sumset(ambient: &Ambient, a: &[Element], b: &[Element]) -> Result<Vec<Element>> {
    check_sets(ambient, a, b)?;
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            out.insert(ambient.add(x, y)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// Number of ordered pairs `(a, b) ∈ A × B` with `a + b = c`.
pub fn nu(ambient: &Ambient, a: &[Element], b: &[Element], c: &Element) -> Result<usize> {
    check_sets(ambient, a, b)?;
    let mut count = 0;
    for x in a {
        for y in b {
            if &ambient.add(x, y)? == c {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// The set `C` of sums `a + b` over admissible pairs.
pub fn restricted_sumset(instance: &Instance) -> Result<Vec<Element>> {
    let ambient = instance.ambient();
    let test = instance.admissibility();
    let mut out = BTreeSet::new();
    for a in instance.a() {
        for b in instance.b() {
            if test.admits(a, b)? {
                out.insert(ambient.add(a, b)?);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// `min_{c ∈ target} ν(c)`, `None` for an empty target.
pub fn min_nu_over(
    ambient: &Ambient,
    a: &[Element],
    b: &[Element],
    target: &[Element],
) -> Result<Option<usize>> {
    check_sets(ambient, a, b)?;
    let mut counts: BTreeMap<Element, usize> = target.iter().map(|c| (c.clone(), 0)).collect();
    for x in a {
        for y in b {
            if let Some(n) = counts.get_mut(&ambient.add(x, y)?) {
                *n += 1;
            }
        }
    }
    Ok(counts.values().copied().min())
}

/// Element text in documents: a string, or a bare integer for rank-one
/// ambients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementText {
    Int(i64),
    Text(String),
}

impl ElementText {
    pub fn text(&self) -> String {
        match self {
            ElementText::Int(v) => v.to_string(),
            ElementText::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearDoc {
    pub m: u32,
    pub n: u32,
    pub d: ElementText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ConstraintDoc {
    None,
    Distinct,
    Poly(String),
    Linear(Vec<LinearDoc>),
    Difference(Vec<ElementText>),
}

/// JSON form of an [`Instance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub ambient: String,
    #[serde(rename = "A")]
    pub a: Vec<ElementText>,
    #[serde(rename = "B")]
    pub b: Vec<ElementText>,
    #[serde(default = "default_constraint")]
    pub constraint: ConstraintDoc,
}

fn default_constraint() -> ConstraintDoc {
    ConstraintDoc::None
}
