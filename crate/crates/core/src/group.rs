//! Finitely generated abelian groups `Z^r ⊕ Z/n1 ⊕ … ⊕ Z/nk` in invariant-factor form.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{checked_lcm, gcd, is_prime, reduce_i128};
use crate::error::{invalid, parse_err, Error, Result};

/// A finitely generated abelian group. Always stored normalized: every
/// invariant factor is at least 2 and each one divides the next.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    free_rank: usize,
    invariant_factors: Vec<u64>,
}

/// An element of a [`GroupSpec`]. Ordering is lexicographic on the free part,
/// then on the torsion part, which is the canonical element order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    free: Vec<BigInt>,
    torsion: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(u64),
    Infinite,
}

/// Structural label used to decide which bounds apply. Precedence is the
/// declaration order, so `Z/p` is reported as `ElementaryAbelian(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupClass {
    TorsionFree,
    ElementaryAbelian(u64),
    TorsionCyclic,
    Other,
}

/// Brings `Z^free_rank ⊕ ⨁ Z/m` into invariant-factor form by repeated
/// pairwise (gcd, lcm) replacement.
pub fn normalize_group_spec(moduli: &[u64], free_rank: usize) -> Result<GroupSpec> {
    if let Some(bad) = moduli.iter().find(|&&m| m < 2) {
        return invalid(format!("modulus {bad} is smaller than 2"));
    }
    let mut m = moduli.to_vec();
    loop {
        let mut changed = false;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                if !m[j].is_multiple_of(m[i]) {
                    let g = gcd(m[i], m[j]);
                    let l = checked_lcm(m[i], m[j]).ok_or_else(|| {
                        Error::ResourceLimit(format!("lcm({}, {}) overflows", m[i], m[j]))
                    })?;
                    m[i] = g;
                    m[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    m.retain(|&x| x != 1);
    debug_assert!(m.windows(2).all(|w| w[1] % w[0] == 0));
    Ok(GroupSpec {
        free_rank,
        invariant_factors: m,
    })
}

impl GroupSpec {
    pub fn new(moduli: &[u64], free_rank: usize) -> Result<Self> {
        normalize_group_spec(moduli, free_rank)
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        normalize_group_spec(&[n], 0)
    }

    pub fn free(rank: usize) -> Self {
        GroupSpec {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Number of elements, or `None` for an infinite group (or on overflow).
    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.invariant_factors
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n))
    }

    /// Exponent of the torsion subgroup.
    pub fn torsion_exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    /// `Tor(G)` is cyclic; the trivial torsion subgroup counts.
    pub fn has_cyclic_torsion(&self) -> bool {
        self.invariant_factors.len() <= 1
    }

    /// `Some(p)` when the group is `Z/p` for a prime `p`.
    pub fn prime_cyclic(&self) -> Option<u64> {
        match (self.free_rank, self.invariant_factors.as_slice()) {
            (0, [p]) if is_prime(*p) => Some(*p),
            _ => None,
        }
    }

    pub fn classify(&self) -> GroupClass {
        classify(self)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            free: vec![BigInt::zero(); self.free_rank],
            torsion: vec![0; self.invariant_factors.len()],
        }
    }

    /// Builds an element, reducing the torsion coordinates.
    pub fn element(&self, free: Vec<BigInt>, torsion: &[i64]) -> Result<GroupElement> {
        if free.len() != self.free_rank || torsion.len() != self.invariant_factors.len() {
            return invalid(format!(
                "element shape ({} free, {} torsion) does not match {self}",
                free.len(),
                torsion.len()
            ));
        }
        let torsion = torsion
            .iter()
            .zip(&self.invariant_factors)
            .map(|(&t, &n)| reduce_i128(t as i128, n))
            .collect();
        Ok(GroupElement { free, torsion })
    }

    /// Builds an element of `Z/n`-type groups or `Z` from small integers.
    pub fn element_from_i64(&self, free: &[i64], torsion: &[i64]) -> Result<GroupElement> {
        self.element(free.iter().map(|&f| BigInt::from(f)).collect(), torsion)
    }

    pub fn conforms(&self, g: &GroupElement) -> bool {
        g.free.len() == self.free_rank
            && g.torsion.len() == self.invariant_factors.len()
            && g.torsion.iter().zip(&self.invariant_factors).all(|(t, n)| t < n)
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.conforms(g) {
            Ok(())
        } else {
            invalid(format!("element {g:?} does not belong to {self}"))
        }
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(GroupElement {
            free: g.free.iter().zip(&h.free).map(|(a, b)| a + b).collect(),
            torsion: g
                .torsion
                .iter()
                .zip(&h.torsion)
                .zip(&self.invariant_factors)
                .map(|((&a, &b), &n)| ((a as u128 + b as u128) % n as u128) as u64)
                .collect(),
        })
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(GroupElement {
            free: g.free.iter().map(|a| -a).collect(),
            torsion: g
                .torsion
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&a, &n)| (n - a) % n)
                .collect(),
        })
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.add(g, &self.neg(h)?)
    }

    /// `c`-fold sum of `g`; negative `c` uses the inverse.
    pub fn scalar_mul(&self, c: i64, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        let big_c = BigInt::from(c);
        Ok(GroupElement {
            free: g.free.iter().map(|a| &big_c * a).collect(),
            torsion: g
                .torsion
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&a, &n)| {
                    let c_mod = reduce_i128(c as i128, n) as u128;
                    ((c_mod * a as u128) % n as u128) as u64
                })
                .collect(),
        })
    }

    pub fn element_order(&self, g: &GroupElement) -> Result<ElementOrder> {
        self.check(g)?;
        if g.free.iter().any(|f| !f.is_zero()) {
            return Ok(ElementOrder::Infinite);
        }
        let mut order = 1u64;
        for (&t, &n) in g.torsion.iter().zip(&self.invariant_factors) {
            let component = n / gcd(t, n);
            order = checked_lcm(order, component)
                .ok_or_else(|| Error::ResourceLimit("element order overflows".into()))?;
        }
        Ok(ElementOrder::Finite(order))
    }

    /// Every element of a finite group in canonical order.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        if !self.is_finite() {
            return invalid(format!("{self} is infinite; a box bound is required"));
        }
        self.box_elements(0)
    }

    /// Elements whose free coordinates lie in `[-radius, radius]`, all torsion
    /// values, in canonical order.
    pub fn box_elements(&self, radius: u64) -> Result<Vec<GroupElement>> {
        let side = 2 * radius as u128 + 1;
        let mut total: u128 = side.pow(self.free_rank as u32);
        for &n in &self.invariant_factors {
            total = total.saturating_mul(n as u128);
        }
        if total > 1 << 24 {
            return Err(Error::ResourceLimit(format!(
                "{total} elements in the box of {self}"
            )));
        }
        // Mixed-radix counter over (free coordinates, torsion coordinates).
        let mut radices: Vec<u64> = vec![side as u64; self.free_rank];
        radices.extend(&self.invariant_factors);
        let mut digits = vec![0u64; radices.len()];
        let mut out = Vec::with_capacity(total as usize);
        loop {
            let free = digits[..self.free_rank]
                .iter()
                .map(|&d| BigInt::from(d as i64 - radius as i64))
                .collect();
            let torsion = digits[self.free_rank..].to_vec();
            out.push(GroupElement { free, torsion });
            let mut pos = radices.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < radices[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let body = text.trim();
        let body = body
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .unwrap_or(body);
        let ints = |s: &str| -> Result<Vec<BigInt>> {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<BigInt>()
                        .or_else(|_| parse_err(format!("bad integer {t:?} in element {text:?}")))
                })
                .collect()
        };
        let (r, k) = (self.free_rank, self.invariant_factors.len());
        let (free, torsion) = if let Some((f, t)) = body.split_once(';') {
            (ints(f)?, ints(t)?)
        } else {
            let mut all = ints(body)?;
            if r + k == 0 && all.len() == 1 && all[0].is_zero() {
                all.clear();
            }
            if all.len() != r + k {
                return parse_err(format!("element {text:?} needs {} coordinates", r + k));
            }
            let torsion = all.split_off(r);
            (all, torsion)
        };
        if free.len() != r || torsion.len() != k {
            return parse_err(format!("element {text:?} does not match {self}"));
        }
        let torsion = torsion
            .iter()
            .zip(&self.invariant_factors)
            .map(|(t, &n)| {
                let reduced = ((t % BigInt::from(n)) + BigInt::from(n)) % BigInt::from(n);
                u64::try_from(reduced).expect("residue fits u64")
            })
            .collect();
        Ok(GroupElement { free, torsion })
    }

    pub fn format_element(&self, g: &GroupElement) -> String {
        g.to_string()
    }
}

/// Classifies a normalized group; see [`GroupClass`] for precedence.
pub fn classify(spec: &GroupSpec) -> GroupClass {
    let factors = &spec.invariant_factors;
    if factors.is_empty() {
        return GroupClass::TorsionFree;
    }
    if spec.free_rank == 0 && is_prime(factors[0]) && factors.iter().all(|&n| n == factors[0]) {
        return GroupClass::ElementaryAbelian(factors[0]);
    }
    if factors.len() == 1 {
        GroupClass::TorsionCyclic
    } else {
        GroupClass::Other
    }
}

impl GroupElement {
    pub fn free_part(&self) -> &[BigInt] {
        &self.free
    }

    pub fn torsion_part(&self) -> &[u64] {
        &self.torsion
    }

    pub fn is_identity(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(|&t| t == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        let free: Vec<String> = self.free.iter().map(ToString::to_string).collect();
        let tors: Vec<String> = self.torsion.iter().map(ToString::to_string).collect();
        match (free.len(), tors.len()) {
            (0, 0) => write!(f, "0"),
            (1, 0) => write!(f, "{}", free[0]),
            (0, 1) => write!(f, "{}", tors[0]),
            (_, 0) => write!(f, "({})", join(free)),
            (0, _) => write!(f, "({})", join(tors)),
            _ => write!(f, "({}; {})", join(free), join(tors)),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|n| format!("Z/{n}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Accepts `"Z^r x Z/n1 x ... x Z/nk"` with either part optional; `"0"`
    /// denotes the trivial group. Non-canonical moduli are normalized.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return parse_err("empty group spec");
        }
        let mut rank = 0usize;
        let mut moduli = Vec::new();
        for raw in text.split(['x', '⊕', '+']) {
            let part = raw.trim();
            if part == "0" || part == "Z/1" || part == "1" {
                continue;
            }
            if let Some(n) = part.strip_prefix("Z/") {
                let n: u64 = n
                    .trim()
                    .parse()
                    .or_else(|_| parse_err(format!("bad modulus in {part:?}")))?;
                if n < 2 {
                    return invalid(format!("modulus {n} is smaller than 2"));
                }
                moduli.push(n);
            } else if let Some(r) = part.strip_prefix("Z^") {
                rank += r
                    .trim()
                    .parse::<usize>()
                    .or_else(|_| parse_err(format!("bad rank in {part:?}")))?;
            } else if part == "Z" {
                rank += 1;
            } else {
                return parse_err(format!("unrecognized group factor {part:?}"));
            }
        }
        normalize_group_spec(&moduli, rank)
    }
}
