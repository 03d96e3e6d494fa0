//! Deterministic exhaustive and sampled sweeps over instance spaces, plus a
//! counterexample hunt for Lev's conjecture.
//!
//! Exhaustive sweeps precompute, for a universe `U` of candidate elements, the
//! table of sums `U × U` and one admissibility matrix per constraint, all with
//! exact arithmetic. Each `(A, B, constraint)` is then measured with table
//! lookups and judged by [`bounds::evaluate`]; tight and violating instances
//! are re-checked through [`check_instance`] before they are reported.

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    check_instance, evaluate, AmbientFacts, BoundReport, ConstraintFacts, Outcome, SetFacts,
    SumStats, TheoremId, Verdict,
};
use crate::error::{invalid, Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::group::{GroupElement, GroupSpec};
use crate::poly::MultiPoly;
use crate::sumsets::{Ambient, Constraint, Element, Instance, LinearConstraint};

const MAX_SUBSETS: u128 = 10_000_000;
const MAX_CONSTRAINTS: u128 = 10_000_000;
const MAX_TABLE_BYTES: u128 = 1 << 28;
/// Random polynomials use streams far above the per-sample ones.
const POLY_STREAM: u64 = 1 << 62;

/// Iterator over the `k`-subsets of `{0, …, n-1}` in colexicographic order.
#[derive(Debug, Clone)]
pub struct ColexSubsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl ColexSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        ColexSubsets {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for ColexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.as_mut()?;
        let out = cur.clone();
        let k = cur.len();
        let mut i = 0;
        loop {
            if i == k {
                self.current = None;
                break;
            }
            let limit = if i + 1 < k { cur[i + 1] } else { self.n };
            if cur[i] + 1 < limit {
                cur[i] += 1;
                for (j, slot) in cur[..i].iter_mut().enumerate() {
                    *slot = j;
                }
                break;
            }
            i += 1;
        }
        Some(out)
    }
}

pub(crate) fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Inverse of colex ranking among the `k`-subsets of `{0, …, n-1}`.
fn colex_unrank(mut rank: u128, k: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    let mut hi = n;
    for i in (1..=k).rev() {
        let mut c = i - 1;
        while c + 1 < hi && binom(c + 1, i) <= rank {
            c += 1;
        }
        out[i - 1] = c;
        rank -= binom(c, i);
        hi = c;
    }
    out
}

/// Candidate elements for `A` and `B`: the whole ambient when finite, the
/// box of the given radius otherwise.
pub fn universe(ambient: &Ambient, box_radius: Option<u64>) -> Result<Vec<Element>> {
    if ambient.is_finite() {
        return ambient.box_elements(0);
    }
    match box_radius {
        Some(r) => ambient.box_elements(r),
        None => invalid(format!("{ambient} is infinite; a box bound is required")),
    }
}

/// All `k`-element subsets, in colex order over the canonical element order.
pub fn enumerate_subsets(
    ambient: &Ambient,
    k: usize,
    box_radius: Option<u64>,
) -> Result<impl Iterator<Item = Vec<Element>>> {
    let u = universe(ambient, box_radius)?;
    if k == 0 {
        return invalid("subset size must be positive");
    }
    if k > u.len() {
        return invalid(format!("cannot choose {k} of {} elements", u.len()));
    }
    Ok(ColexSubsets::new(u.len(), k).map(move |idx| idx.iter().map(|&i| u[i].clone()).collect()))
}

/// One family of constraints in a plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintFamily {
    None,
    Distinct,
    /// Every `S` with `min_size ≤ |S| ≤ max_size`, drawn from the ambient
    /// (finite) or from `U - U` (box).
    Difference {
        #[serde(default = "one")]
        min_size: usize,
        max_size: usize,
    },
    /// Every set of `l` distinct triples `(m, n, d)` with
    /// `min_l ≤ l ≤ max_l`, `m ≤ max_m`, `n ≤ max_n`, `d` from the ambient
    /// (finite) or from `⋃ (mU - nU)` (box).
    Linear {
        #[serde(default = "one")]
        min_l: usize,
        max_l: usize,
        max_m: u32,
        max_n: u32,
    },
    /// Explicit polynomials in `x`, `y`.
    Poly { polys: Vec<String> },
    /// `count` seeded random polynomials of total degree at most `max_degree`.
    RandomPoly { count: usize, max_degree: u32 },
}

fn one() -> usize {
    1
}

fn default_constraints() -> Vec<ConstraintFamily> {
    vec![ConstraintFamily::None]
}

fn default_instance_cap() -> u64 {
    1 << 40
}

fn default_tight_cap() -> usize {
    100
}

fn default_violation_cap() -> usize {
    1000
}

/// JSON plan for [`sweep`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub ambient: String,
    #[serde(default = "one")]
    pub min_a: usize,
    pub max_a: usize,
    #[serde(default = "one")]
    pub min_b: usize,
    pub max_b: usize,
    pub theorems: Vec<TheoremId>,
    #[serde(default = "default_constraints")]
    pub constraints: Vec<ConstraintFamily>,
    /// Radius of the box for free coordinates (and for `Q`).
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_radius: Option<u64>,
    #[serde(default = "default_instance_cap")]
    pub instance_cap: u64,
    #[serde(default)]
    pub seed: u64,
    /// Draw this many random instances instead of enumerating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default = "default_tight_cap")]
    pub tight_cap: usize,
    #[serde(default = "default_violation_cap")]
    pub violation_cap: usize,
    /// Only sets `A` containing the first universe element (the box corner).
    #[serde(default)]
    pub translation_normalize: bool,
}

impl SweepPlan {
    /// A plan with defaults for everything but the ambient, sizes and theorems.
    pub fn new(ambient: &str, max_a: usize, max_b: usize, theorems: &[TheoremId]) -> Self {
        SweepPlan {
            ambient: ambient.to_string(),
            min_a: 1,
            max_a,
            min_b: 1,
            max_b,
            theorems: theorems.to_vec(),
            constraints: default_constraints(),
            box_radius: None,
            instance_cap: default_instance_cap(),
            seed: 0,
            samples: None,
            tight_cap: default_tight_cap(),
            violation_cap: default_violation_cap(),
            translation_normalize: false,
        }
    }

    pub fn with_constraints(mut self, families: Vec<ConstraintFamily>) -> Self {
        self.constraints = families;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("sweep plan: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremTally {
    pub theorem: TheoremId,
    pub satisfied: u64,
    pub tight: u64,
    pub violated: u64,
    pub not_applicable: u64,
}

impl TheoremTally {
    fn new(theorem: TheoremId) -> Self {
        TheoremTally {
            theorem,
            satisfied: 0,
            tight: 0,
            violated: 0,
            not_applicable: 0,
        }
    }

    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Satisfied => self.satisfied += 1,
            Verdict::Tight => self.tight += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::NotApplicable => self.not_applicable += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.satisfied + self.tight + self.violated + self.not_applicable
    }
}

/// A flagged instance with its position in the enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: u64,
    pub report: BoundReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub ambient: String,
    pub mode: String,
    pub instances_checked: u64,
    /// The instance cap stopped the sweep early.
    pub partial: bool,
    pub tallies: Vec<TheoremTally>,
    pub not_applicable: u64,
    pub violation_count: u64,
    /// The first `violation_cap` violations in enumeration order.
    pub violations: Vec<InstanceRecord>,
    pub tight_count: u64,
    /// The first `tight_cap` tight instances in enumeration order.
    pub tight_instances: Vec<InstanceRecord>,
    pub elapsed_ms: u64,
}

impl SweepReport {
    fn empty(ambient: &str, mode: &str, theorems: &[TheoremId]) -> Self {
        SweepReport {
            ambient: ambient.to_string(),
            mode: mode.to_string(),
            instances_checked: 0,
            partial: false,
            tallies: theorems.iter().map(|&t| TheoremTally::new(t)).collect(),
            not_applicable: 0,
            violation_count: 0,
            violations: Vec::new(),
            tight_count: 0,
            tight_instances: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn tally(&self, theorem: TheoremId) -> Option<&TheoremTally> {
        self.tallies.iter().find(|t| t.theorem == theorem)
    }

    pub fn has_violations(&self) -> bool {
        self.violation_count > 0
    }

    /// The report with the elapsed time cleared, for comparisons.
    pub fn without_timing(mut self) -> Self {
        self.elapsed_ms = 0;
        self
    }
}

/// Concatenates reports of consecutive enumeration ranges.
pub fn merge_reports(
    parts: Vec<SweepReport>,
    tight_cap: usize,
    violation_cap: usize,
) -> Option<SweepReport> {
    let mut iter = parts.into_iter();
    let mut acc = iter.next()?;
    for part in iter {
        acc.instances_checked += part.instances_checked;
        acc.partial |= part.partial;
        for (t, p) in acc.tallies.iter_mut().zip(&part.tallies) {
            t.satisfied += p.satisfied;
            t.tight += p.tight;
            t.violated += p.violated;
            t.not_applicable += p.not_applicable;
        }
        acc.not_applicable += part.not_applicable;
        acc.violation_count += part.violation_count;
        acc.tight_count += part.tight_count;
        acc.violations.extend(part.violations);
        acc.tight_instances.extend(part.tight_instances);
        acc.elapsed_ms += part.elapsed_ms;
    }
    acc.violations.truncate(violation_cap);
    acc.tight_instances.truncate(tight_cap);
    Some(acc)
}

/// Constraints of one family, addressable by rank.
enum FamilySpace {
    Single(Constraint),
    Difference {
        universe: Vec<Element>,
        min: usize,
        max: usize,
    },
    Linear {
        triples: Vec<LinearConstraint>,
        min: usize,
        max: usize,
    },
    Polys(Vec<MultiPoly>),
    RandomPolys {
        field: FieldSpec,
        pool: Vec<FieldElement>,
        count: usize,
        max_degree: u32,
        seed: u64,
    },
}

impl FamilySpace {
    fn count(&self) -> u128 {
        match self {
            FamilySpace::Single(_) => 1,
            FamilySpace::Difference { universe, min, max } => {
                (*min..=*max).map(|k| binom(universe.len(), k)).sum()
            }
            FamilySpace::Linear { triples, min, max } => {
                (*min..=*max).map(|k| binom(triples.len(), k)).sum()
            }
            FamilySpace::Polys(ps) => ps.len() as u128,
            FamilySpace::RandomPolys { count, .. } => *count as u128,
        }
    }

    /// Splits a rank into (subset size, rank within that size).
    fn locate(n: usize, min: usize, max: usize, mut rank: u128) -> (usize, u128) {
        for k in min..=max {
            let c = binom(n, k);
            if rank < c {
                return (k, rank);
            }
            rank -= c;
        }
        unreachable!("rank below the family count")
    }

    fn get(&self, rank: u128) -> Constraint {
        match self {
            FamilySpace::Single(c) => c.clone(),
            FamilySpace::Difference { universe, min, max } => {
                let (k, r) = Self::locate(universe.len(), *min, *max, rank);
                let idx = colex_unrank(r, k, universe.len());
                Constraint::Difference(idx.into_iter().map(|i| universe[i].clone()).collect())
            }
            FamilySpace::Linear { triples, min, max } => {
                let (k, r) = Self::locate(triples.len(), *min, *max, rank);
                let idx = colex_unrank(r, k, triples.len());
                Constraint::Linear(idx.into_iter().map(|i| triples[i].clone()).collect())
            }
            FamilySpace::Polys(ps) => Constraint::Poly(ps[rank as usize].clone()),
            FamilySpace::RandomPolys {
                field,
                pool,
                max_degree,
                seed,
                ..
            } => Constraint::Poly(random_poly(field, pool, *max_degree, *seed, rank as u64)),
        }
    }
}

/// Deterministic random bivariate polynomial number `index`: a degree drawn
/// uniformly up to `max_degree`, one forced nonzero top-degree term, and each
/// other monomial present with probability one half.
pub fn random_poly(
    field: &FieldSpec,
    pool: &[FieldElement],
    max_degree: u32,
    seed: u64,
    index: u64,
) -> MultiPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(POLY_STREAM + index);
    let degree = rng.gen_range(0..=max_degree);
    let top_x = rng.gen_range(0..=degree);
    let nonzero: Vec<&FieldElement> = pool.iter().filter(|c| !field.is_zero(c)).collect();
    let mut p = MultiPoly::zero(field, 2);
    for total in 0..=degree {
        for i in 0..=total {
            let exps = vec![i, total - i];
            let coeff = if total == degree && i == top_x {
                nonzero[rng.gen_range(0..nonzero.len())].clone()
            } else if rng.gen_bool(0.5) {
                pool[rng.gen_range(0..pool.len())].clone()
            } else {
                continue;
            };
            p = p.add(&MultiPoly::term(field, 2, coeff, exps));
        }
    }
    p
}

fn coefficient_pool(field: &FieldSpec) -> Result<Vec<FieldElement>> {
    match field {
        FieldSpec::Rationals => Ok((-5..=5).map(|v| field.from_i64(v)).collect()),
        FieldSpec::Finite(_) => field.elements(),
    }
}

fn sorted_unique(items: impl IntoIterator<Item = Element>) -> Vec<Element> {
    items.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

fn build_family(
    family: &ConstraintFamily,
    ambient: &Ambient,
    u: &[Element],
    seed: u64,
) -> Result<FamilySpace> {
    Ok(match family {
        ConstraintFamily::None => FamilySpace::Single(Constraint::None),
        ConstraintFamily::Distinct => FamilySpace::Single(Constraint::Distinct),
        ConstraintFamily::Difference { min_size, max_size } => {
            if min_size > max_size {
                return invalid("difference family needs min_size ≤ max_size");
            }
            let universe = if ambient.is_finite() {
                u.to_vec()
            } else {
                let mut diffs = Vec::with_capacity(u.len() * u.len());
                for x in u {
                    for y in u {
                        diffs.push(ambient.sub(x, y)?);
                    }
                }
                sorted_unique(diffs)
            };
            let max = (*max_size).min(universe.len());
            FamilySpace::Difference {
                universe,
                min: *min_size,
                max,
            }
        }
        ConstraintFamily::Linear {
            min_l,
            max_l,
            max_m,
            max_n,
        } => {
            let Ambient::Group(g) = ambient else {
                return invalid("linear constraints need a group ambient");
            };
            if min_l > max_l {
                return invalid("linear family needs min_l ≤ max_l");
            }
            let ds: Vec<GroupElement> = if ambient.is_finite() {
                u.iter().filter_map(|e| e.as_group().cloned()).collect()
            } else {
                let mut out = BTreeSet::new();
                for m in 0..=*max_m {
                    for n in 0..=*max_n {
                        for x in u {
                            for y in u {
                                let (Some(x), Some(y)) = (x.as_group(), y.as_group()) else {
                                    continue;
                                };
                                out.insert(g.sub(&g.scalar_mul(m as i64, x)?, &g.scalar_mul(n as i64, y)?)?);
                            }
                        }
                    }
                }
                out.into_iter().collect()
            };
            let mut triples = Vec::new();
            for m in 0..=*max_m {
                for n in 0..=*max_n {
                    for d in &ds {
                        triples.push(LinearConstraint { m, n, d: d.clone() });
                    }
                }
            }
            let max = (*max_l).min(triples.len());
            FamilySpace::Linear {
                triples,
                min: *min_l,
                max,
            }
        }
        ConstraintFamily::Poly { polys } => {
            let Ambient::Field(f) = ambient else {
                return invalid("polynomial constraints need a field ambient");
            };
            FamilySpace::Polys(
                polys
                    .iter()
                    .map(|t| MultiPoly::parse(t, f, 2))
                    .collect::<Result<_>>()?,
            )
        }
        ConstraintFamily::RandomPoly { count, max_degree } => {
            let Ambient::Field(f) = ambient else {
                return invalid("polynomial constraints need a field ambient");
            };
            FamilySpace::RandomPolys {
                field: f.clone(),
                pool: coefficient_pool(f)?,
                count: *count,
                max_degree: *max_degree,
                seed,
            }
        }
    })
}

/// A constraint with its admissibility matrix over `U × U`.
struct Compiled {
    constraint: Constraint,
    facts: ConstraintFacts,
    admissible: Vec<bool>,
}

/// Reusable buffers for measuring one `(A, B)`.
struct Scratch {
    slot_of: Vec<u32>,
    touched: Vec<u32>,
    counts: Vec<u32>,
    pair_slot: Vec<u32>,
    pair_cell: Vec<u32>,
    marks: Vec<bool>,
}

const UNUSED: u32 = u32::MAX;

impl Scratch {
    fn new(w_len: usize) -> Self {
        Scratch {
            slot_of: vec![UNUSED; w_len],
            touched: Vec::new(),
            counts: Vec::new(),
            pair_slot: Vec::new(),
            pair_cell: Vec::new(),
            marks: Vec::new(),
        }
    }

    /// Tabulates `A + B` and `ν`; returns `(|A + B|, min ν over A + B)`.
    fn load(&mut self, sums: &[u32], n: usize, a: &[u32], b: &[u32]) -> (usize, usize) {
        for &w in &self.touched {
            self.slot_of[w as usize] = UNUSED;
        }
        self.touched.clear();
        self.counts.clear();
        self.pair_slot.clear();
        self.pair_cell.clear();
        for &x in a {
            let row = x as usize * n;
            for &y in b {
                let cell = row + y as usize;
                let w = sums[cell] as usize;
                let mut slot = self.slot_of[w];
                if slot == UNUSED {
                    slot = self.touched.len() as u32;
                    self.slot_of[w] = slot;
                    self.touched.push(w as u32);
                    self.counts.push(0);
                }
                self.counts[slot as usize] += 1;
                self.pair_slot.push(slot);
                self.pair_cell.push(cell as u32);
            }
        }
        let min = self.counts.iter().copied().min().unwrap_or(0) as usize;
        (self.touched.len(), min)
    }

    /// `(|C|, min ν over C)` for one admissibility matrix.
    fn restrict(&mut self, admissible: &[bool]) -> (usize, Option<usize>) {
        let slots = self.touched.len();
        if slots <= 64 {
            let mut mask = 0u64;
            for (&cell, &slot) in self.pair_cell.iter().zip(&self.pair_slot) {
                if admissible[cell as usize] {
                    mask |= 1 << slot;
                }
            }
            let size = mask.count_ones() as usize;
            let mut min: Option<usize> = None;
            while mask != 0 {
                let s = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                let c = self.counts[s] as usize;
                min = Some(min.map_or(c, |m| m.min(c)));
            }
            return (size, min);
        }
        self.marks.clear();
        self.marks.resize(slots, false);
        for (&cell, &slot) in self.pair_cell.iter().zip(&self.pair_slot) {
            if admissible[cell as usize] {
                self.marks[slot as usize] = true;
            }
        }
        let mut size = 0;
        let mut min: Option<usize> = None;
        for (s, &m) in self.marks.iter().enumerate() {
            if m {
                size += 1;
                let c = self.counts[s] as usize;
                min = Some(min.map_or(c, |v| v.min(c)));
            }
        }
        (size, min)
    }
}

enum Mode {
    Exhaustive {
        a_sets: Vec<Vec<u32>>,
        b_sets: Vec<Vec<u32>>,
        sums: Vec<u32>,
        w_len: usize,
        compiled: Vec<Compiled>,
    },
    Sampled {
        samples: u64,
        families: Vec<FamilySpace>,
        family_counts: Vec<u128>,
        total: u128,
    },
}

#[derive(Debug, Clone, Copy, Default)]
struct RunOptions {
    stop_on_violation: bool,
    record_all: bool,
}

struct ChunkResult {
    report: SweepReport,
    records: Vec<serde_json::Value>,
}

/// A validated plan with its precomputed tables.
pub struct Sweeper {
    plan: SweepPlan,
    ambient: Ambient,
    ambient_facts: AmbientFacts,
    universe: Vec<Element>,
    theorems: Vec<TheoremId>,
    mode: Mode,
}

fn size_range(min: usize, max: usize, n: usize, name: &str) -> Result<Range<usize>> {
    if min == 0 || min > max {
        return invalid(format!("need 1 ≤ min_{name} ≤ max_{name}"));
    }
    if min > n {
        return invalid(format!("min_{name} = {min} exceeds the {n} candidate elements"));
    }
    Ok(min..max.min(n) + 1)
}

fn all_subsets(n: usize, sizes: Range<usize>, normalize: bool) -> Result<Vec<Vec<u32>>> {
    let total: u128 = sizes.clone().map(|k| binom(n, k)).sum();
    if total > MAX_SUBSETS {
        return Err(Error::ResourceLimit(format!("{total} subsets per side")));
    }
    let mut out = Vec::new();
    for k in sizes {
        for s in ColexSubsets::new(n, k) {
            if normalize && s[0] != 0 {
                continue;
            }
            out.push(s.into_iter().map(|i| i as u32).collect());
        }
    }
    Ok(out)
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, sizes: &Range<usize>, normalize: bool) -> Vec<usize> {
    let k = rng.gen_range(sizes.clone());
    let mut out: Vec<usize> = if normalize {
        let mut v: Vec<usize> = sample(rng, n - 1, k - 1).into_iter().map(|i| i + 1).collect();
        v.push(0);
        v
    } else {
        sample(rng, n, k).into_vec()
    };
    out.sort_unstable();
    out
}

impl Sweeper {
    pub fn new(plan: &SweepPlan) -> Result<Self> {
        let ambient: Ambient = plan.ambient.parse()?;
        if plan.theorems.is_empty() {
            return invalid("a sweep needs at least one theorem");
        }
        if plan.instance_cap == 0 {
            return invalid("instance_cap must be at least 1");
        }
        if plan.constraints.is_empty() {
            return invalid("a sweep needs at least one constraint family");
        }
        if plan.translation_normalize
            && plan.constraints.iter().any(|c| {
                !matches!(
                    c,
                    ConstraintFamily::None | ConstraintFamily::Distinct | ConstraintFamily::Difference { .. }
                )
            })
        {
            return invalid("translation normalization only applies to none, distinct and difference constraints");
        }
        let mut theorems = Vec::new();
        for t in &plan.theorems {
            if !theorems.contains(t) {
                theorems.push(*t);
            }
        }
        let universe = universe(&ambient, plan.box_radius)?;
        let n = universe.len();
        let a_sizes = size_range(plan.min_a, plan.max_a, n, "a")?;
        let b_sizes = size_range(plan.min_b, plan.max_b, n, "b")?;
        let families = plan
            .constraints
            .iter()
            .map(|f| build_family(f, &ambient, &universe, plan.seed))
            .collect::<Result<Vec<_>>>()?;
        let family_counts: Vec<u128> = families.iter().map(FamilySpace::count).collect();
        let total: u128 = family_counts.iter().sum();
        if total == 0 {
            return invalid("the constraint families are empty");
        }
        let mode = match plan.samples {
            Some(samples) => Mode::Sampled {
                samples,
                families,
                family_counts,
                total,
            },
            None => {
                if total > MAX_CONSTRAINTS || total * (n * n) as u128 > MAX_TABLE_BYTES {
                    return Err(Error::ResourceLimit(format!(
                        "{total} constraints over {n} elements is too many to tabulate; use samples"
                    )));
                }
                let a_sets = all_subsets(n, a_sizes, plan.translation_normalize)?;
                let b_sets = all_subsets(n, b_sizes, false)?;
                let (sums, w_len) = sum_table(&ambient, &universe)?;
                let is_field = ambient.field().is_some();
                let mut compiled = Vec::new();
                for (fam, &count) in families.iter().zip(&family_counts) {
                    for r in 0..count {
                        compiled.push(compile(&ambient, &universe, fam.get(r), is_field)?);
                    }
                }
                Mode::Exhaustive {
                    a_sets,
                    b_sets,
                    sums,
                    w_len,
                    compiled,
                }
            }
        };
        Ok(Sweeper {
            plan: plan.clone(),
            ambient_facts: AmbientFacts::of(&ambient),
            ambient,
            universe,
            theorems,
            mode,
        })
    }

    /// Length of the outer enumeration: the number of `A` sets, or samples.
    pub fn outer_len(&self) -> usize {
        match &self.mode {
            Mode::Exhaustive { a_sets, .. } => a_sets.len(),
            Mode::Sampled { samples, .. } => *samples as usize,
        }
    }

    fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::Exhaustive { .. } => "exhaustive",
            Mode::Sampled { .. } => "sampled",
        }
    }

    fn empty_report(&self) -> SweepReport {
        SweepReport::empty(&self.plan.ambient, self.mode_name(), &self.theorems)
    }

    /// Runs the outer positions in `range` only.
    pub fn run_range(&self, range: Range<usize>) -> Result<SweepReport> {
        Ok(self.run_chunk(range, RunOptions::default())?.report)
    }

    fn instance(&self, a: &[u32], b: &[u32], constraint: Constraint) -> Result<Instance> {
        let pick = |v: &[u32]| v.iter().map(|&i| self.universe[i as usize].clone()).collect();
        Instance::new(self.ambient.clone(), pick(a), pick(b), constraint)
    }

    fn run_chunk(&self, range: Range<usize>, opts: RunOptions) -> Result<ChunkResult> {
        match &self.mode {
            Mode::Exhaustive {
                a_sets,
                b_sets,
                sums,
                w_len,
                compiled,
            } => self.run_exhaustive(range, opts, a_sets, b_sets, sums, *w_len, compiled),
            Mode::Sampled {
                families,
                family_counts,
                total,
                ..
            } => self.run_sampled(range, opts, families, family_counts, *total),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn run_exhaustive(
        &self,
        range: Range<usize>,
        opts: RunOptions,
        a_sets: &[Vec<u32>],
        b_sets: &[Vec<u32>],
        sums: &[u32],
        w_len: usize,
        compiled: &[Compiled],
    ) -> Result<ChunkResult> {
        let mut report = self.empty_report();
        let mut records = Vec::new();
        let mut scratch = Scratch::new(w_len);
        let n = self.universe.len();
        let nb = b_sets.len() as u64;
        let nc = compiled.len() as u64;
        let cap = self.plan.instance_cap;
        for pos in range {
            let a = &a_sets[pos];
            for (bpos, b) in b_sets.iter().enumerate() {
                let base = (pos as u64 * nb + bpos as u64) * nc;
                if base >= cap {
                    report.partial = true;
                    return Ok(ChunkResult { report, records });
                }
                let (sumset_size, min_nu_sumset) = scratch.load(sums, n, a, b);
                let sets = SetFacts {
                    size_a: a.len(),
                    size_b: b.len(),
                    a_equals_b: a == b,
                };
                for (ci, comp) in compiled.iter().enumerate() {
                    let index = base + ci as u64;
                    if index >= cap {
                        report.partial = true;
                        return Ok(ChunkResult { report, records });
                    }
                    let (restricted_size, min_nu_restricted) = scratch.restrict(&comp.admissible);
                    let stats = SumStats {
                        sumset_size,
                        min_nu_sumset,
                        restricted_size,
                        min_nu_restricted,
                    };
                    report.instances_checked += 1;
                    let mut verdicts = Vec::new();
                    for (ti, &theorem) in self.theorems.iter().enumerate() {
                        let out = evaluate(theorem, &self.ambient_facts, &comp.facts, &sets, &stats);
                        report.tallies[ti].add(out.verdict);
                        if out.verdict == Verdict::NotApplicable {
                            report.not_applicable += 1;
                        }
                        if opts.record_all {
                            verdicts.push((theorem, out.verdict));
                        }
                        let keep = match out.verdict {
                            Verdict::Violated => {
                                report.violation_count += 1;
                                report.violations.len() < self.plan.violation_cap
                            }
                            Verdict::Tight => {
                                report.tight_count += 1;
                                report.tight_instances.len() < self.plan.tight_cap
                            }
                            _ => false,
                        };
                        if keep {
                            let inst = self.instance(a, b, comp.constraint.clone())?;
                            let exact = check_instance(theorem, &inst);
                            confirm(&exact, &out);
                            let record = InstanceRecord { index, report: exact };
                            if out.verdict == Verdict::Violated {
                                report.violations.push(record);
                            } else {
                                report.tight_instances.push(record);
                            }
                        }
                    }
                    if opts.record_all {
                        let inst = self.instance(a, b, comp.constraint.clone())?;
                        records.push(instance_line(index, &inst, &verdicts));
                    }
                    if opts.stop_on_violation && report.violation_count > 0 {
                        return Ok(ChunkResult { report, records });
                    }
                }
            }
        }
        Ok(ChunkResult { report, records })
    }

    fn run_sampled(
        &self,
        range: Range<usize>,
        opts: RunOptions,
        families: &[FamilySpace],
        family_counts: &[u128],
        total: u128,
    ) -> Result<ChunkResult> {
        let mut report = self.empty_report();
        let mut records = Vec::new();
        let n = self.universe.len();
        let a_sizes = size_range(self.plan.min_a, self.plan.max_a, n, "a")?;
        let b_sizes = size_range(self.plan.min_b, self.plan.max_b, n, "b")?;
        for i in range {
            let index = i as u64;
            if index >= self.plan.instance_cap {
                report.partial = true;
                break;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(self.plan.seed);
            rng.set_stream(index);
            let a = random_subset(&mut rng, n, &a_sizes, self.plan.translation_normalize);
            let b = random_subset(&mut rng, n, &b_sizes, false);
            let mut rank = rng.gen_range(0..total);
            let mut fam = 0;
            while rank >= family_counts[fam] {
                rank -= family_counts[fam];
                fam += 1;
            }
            let constraint = families[fam].get(rank);
            let to32 = |v: Vec<usize>| v.into_iter().map(|x| x as u32).collect::<Vec<_>>();
            let inst = self.instance(&to32(a), &to32(b), constraint)?;
            report.instances_checked += 1;
            let mut verdicts = Vec::new();
            for (ti, &theorem) in self.theorems.iter().enumerate() {
                let exact = check_instance(theorem, &inst);
                report.tallies[ti].add(exact.verdict);
                verdicts.push((theorem, exact.verdict));
                match exact.verdict {
                    Verdict::NotApplicable => report.not_applicable += 1,
                    Verdict::Violated => {
                        report.violation_count += 1;
                        if report.violations.len() < self.plan.violation_cap {
                            report.violations.push(InstanceRecord { index, report: exact });
                        }
                    }
                    Verdict::Tight => {
                        report.tight_count += 1;
                        if report.tight_instances.len() < self.plan.tight_cap {
                            report.tight_instances.push(InstanceRecord { index, report: exact });
                        }
                    }
                    Verdict::Satisfied => {}
                }
            }
            if opts.record_all {
                records.push(instance_line(index, &inst, &verdicts));
            }
            if opts.stop_on_violation && report.violation_count > 0 {
                break;
            }
        }
        Ok(ChunkResult { report, records })
    }

    fn chunks(&self, workers: usize) -> Vec<Range<usize>> {
        let len = self.outer_len();
        let pieces = (workers.max(1) * 8).min(len.max(1));
        let mut out = Vec::with_capacity(pieces);
        let mut start = 0;
        for i in 0..pieces {
            let end = len * (i + 1) / pieces;
            out.push(start..end);
            start = end;
        }
        out
    }

    fn run_with(
        &self,
        workers: usize,
        opts: RunOptions,
        sink: &mut dyn FnMut(&serde_json::Value),
    ) -> Result<SweepReport> {
        let started = Instant::now();
        let workers = workers.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::ResourceLimit(format!("worker pool: {e}")))?;
        let chunks = self.chunks(workers);
        let mut parts = Vec::new();
        for batch in chunks.chunks(workers) {
            let results: Vec<ChunkResult> = pool.install(|| {
                batch
                    .par_iter()
                    .map(|r| self.run_chunk(r.clone(), opts))
                    .collect::<Result<Vec<_>>>()
            })?;
            let mut stop = false;
            for r in results {
                for line in &r.records {
                    sink(line);
                }
                stop |= r.report.partial || (opts.stop_on_violation && r.report.violation_count > 0);
                parts.push(r.report);
                if stop {
                    break;
                }
            }
            if stop {
                break;
            }
        }
        let mut report = merge_reports(parts, self.plan.tight_cap, self.plan.violation_cap)
            .unwrap_or_else(|| self.empty_report());
        report.elapsed_ms = started.elapsed().as_millis() as u64;
        Ok(report)
    }

    /// Runs the whole plan on `workers` threads.
    pub fn run(&self, workers: usize) -> Result<SweepReport> {
        self.run_with(workers, RunOptions::default(), &mut |_| {})
    }

    /// Like [`Sweeper::run`], handing one JSON record per instance to `sink`
    /// in enumeration order.
    pub fn run_streaming(
        &self,
        workers: usize,
        sink: &mut dyn FnMut(&serde_json::Value),
    ) -> Result<SweepReport> {
        let opts = RunOptions {
            record_all: true,
            ..RunOptions::default()
        };
        self.run_with(workers, opts, sink)
    }
}

fn instance_line(index: u64, inst: &Instance, verdicts: &[(TheoremId, Verdict)]) -> serde_json::Value {
    let results: serde_json::Map<String, serde_json::Value> = verdicts
        .iter()
        .map(|(t, v)| (t.name().to_string(), serde_json::Value::String(v.to_string())))
        .collect();
    serde_json::json!({
        "index": index,
        "instance": inst.to_doc(),
        "verdicts": results,
    })
}

/// The table and exact paths must agree on every flagged instance.
fn confirm(exact: &BoundReport, fast: &Outcome) {
    assert!(
        exact.verdict == fast.verdict
            && exact.predicted == fast.predicted
            && exact.actual == fast.actual
            && exact.min_nu == fast.min_nu,
        "table engine disagrees with the exact check: {exact:?} vs {fast:?}"
    );
}

fn sum_table(ambient: &Ambient, u: &[Element]) -> Result<(Vec<u32>, usize)> {
    let n = u.len();
    let mut index: HashMap<Element, u32> = HashMap::new();
    let mut sums = Vec::with_capacity(n * n);
    if ambient.is_finite() {
        for (i, e) in u.iter().enumerate() {
            index.insert(e.clone(), i as u32);
        }
    }
    for x in u {
        for y in u {
            let s = ambient.add(x, y)?;
            let next = index.len() as u32;
            sums.push(*index.entry(s).or_insert(next));
        }
    }
    Ok((sums, index.len()))
}

fn compile(ambient: &Ambient, u: &[Element], constraint: Constraint, is_field: bool) -> Result<Compiled> {
    let probe = Instance::new(ambient.clone(), vec![u[0].clone()], vec![u[0].clone()], constraint)?;
    let test = probe.admissibility();
    let mut admissible = Vec::with_capacity(u.len() * u.len());
    for x in u {
        for y in u {
            admissible.push(test.admits(x, y)?);
        }
    }
    let constraint = probe.constraint().clone();
    Ok(Compiled {
        facts: ConstraintFacts::of(&constraint, is_field),
        constraint,
        admissible,
    })
}

/// Runs `plan` on one thread.
pub fn sweep(plan: &SweepPlan) -> Result<SweepReport> {
    Sweeper::new(plan)?.run(1)
}

/// Runs `plan` on `workers` threads; the report does not depend on `workers`.
pub fn sweep_with_workers(plan: &SweepPlan, workers: usize) -> Result<SweepReport> {
    Sweeper::new(plan)?.run(workers)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuntReport {
    pub group: String,
    pub instances_checked: u64,
    /// The whole space was searched.
    pub exhausted: bool,
    pub witness: Option<BoundReport>,
    pub elapsed_ms: u64,
}

/// First instance, in enumeration order, violating Lev's inequality in a
/// finite group with `|A| ≤ max_a`, `|B| ≤ max_b`.
pub fn hunt_lev_counterexample(
    spec: &GroupSpec,
    max_a: usize,
    max_b: usize,
    instance_cap: u64,
    workers: usize,
) -> Result<HuntReport> {
    if !spec.is_finite() {
        return invalid(format!("{spec} is infinite; the hunt needs a finite group"));
    }
    let mut plan = SweepPlan::new(&spec.to_string(), max_a, max_b, &[TheoremId::LevConjecture])
        .with_constraints(vec![ConstraintFamily::Distinct]);
    plan.instance_cap = instance_cap;
    plan.violation_cap = 1;
    plan.tight_cap = 0;
    let sweeper = Sweeper::new(&plan)?;
    let opts = RunOptions {
        stop_on_violation: true,
        ..RunOptions::default()
    };
    let report = sweeper.run_with(workers, opts, &mut |_| {})?;
    let witness = report.violations.first().cloned();
    Ok(HuntReport {
        group: spec.to_string(),
        instances_checked: witness
            .as_ref()
            .map_or(report.instances_checked, |w| w.index + 1),
        exhausted: witness.is_none() && !report.partial,
        witness: witness.map(|w| w.report),
        elapsed_ms: report.elapsed_ms,
    })
}
