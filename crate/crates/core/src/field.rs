//! Exact arithmetic over `Q`, `GF(p)` and `GF(p^n)`.
//!
//! Extension-field elements are coefficient vectors over the basis
//! `1, α, …, α^{n-1}` where `α` is a root of the field's monic irreducible
//! modulus. A prime field is the degree-one extension with modulus `x`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime, prime_power};
use crate::error::{invalid, parse_err, Error, Result};
use crate::group::{GroupClass, GroupElement, GroupSpec};

/// Largest `p^n` accepted for finite fields.
pub const FIELD_SIZE_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Finite(FiniteField),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteField {
    p: u64,
    /// Monic, low degree first, length `degree + 1`.
    modulus: Vec<u64>,
}

/// A field element. Finite-field coefficient vectors compare from the
/// constant term upward, which matches the canonical order of `(Z/p)^n`
/// under [`embed_elementary`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Rational(BigRational),
    Finite(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldOp {
    Add(FieldElement),
    Sub(FieldElement),
    Mul(FieldElement),
    Inv,
    Pow(i64),
}

/// Dense univariate polynomials over `GF(p)`, low degree first, trimmed.
mod gfp_poly {
    pub type Poly = Vec<u64>;

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        pow_mod(a, p - 2, p)
    }

    pub fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1u64 % p;
        base %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = (acc as u128 * base as u128 % p as u128) as u64;
            }
            base = (base as u128 * base as u128 % p as u128) as u64;
            e >>= 1;
        }
        acc
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u128; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u128 * y as u128) % p as u128;
            }
        }
        trim(out.into_iter().map(|c| c as u64).collect())
    }

    /// Remainder of `a` modulo a nonzero `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let factor = (*r.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
            for (i, &c) in m.iter().enumerate() {
                let t = (factor as u128 * c as u128 % p as u128) as u64;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
        rem(&mul(a, b, p), m, p)
    }

    pub fn pow_poly_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Poly {
        let mut acc = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }
}

/// Rabin-style test: no factor of degree `d < n` and `m | x^{p^n} - x`.
fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let n = modulus.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut frob = x.clone();
    for _ in 1..n {
        frob = gfp_poly::pow_poly_mod(&frob, p, modulus, p);
        let g = gfp_poly::gcd(&gfp_poly::sub(&frob, &x, p), modulus, p);
        if g.len() != 1 {
            return false;
        }
    }
    frob = gfp_poly::pow_poly_mod(&frob, p, modulus, p);
    gfp_poly::sub(&frob, &x, p).is_empty()
}

/// Smallest monic irreducible of degree `n` over `GF(p)`, where candidates
/// are ranked by the integer `Σ c_i p^i` of their lower coefficients.
pub fn find_irreducible(p: u64, n: usize) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if n == 0 {
        return invalid("extension degree must be at least 1");
    }
    let size = field_size(p, n)?;
    for code in 0..size {
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut rest = code;
        for _ in 0..n {
            coeffs.push(rest % p);
            rest /= p;
        }
        coeffs.push(1);
        if is_irreducible(&coeffs, p) {
            return Ok(coeffs);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

fn field_size(p: u64, n: usize) -> Result<u64> {
    let too_big = || Error::ResourceLimit(format!("GF({p}^{n}) exceeds 2^20 elements"));
    let size = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(p).ok_or_else(too_big))?;
    if size > FIELD_SIZE_CAP {
        return Err(too_big());
    }
    Ok(size)
}

impl FiniteField {
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.degree() as u32)
    }
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        Self::extension(p, 1)
    }

    /// `GF(p^n)` with the modulus chosen by [`find_irreducible`].
    pub fn extension(p: u64, n: usize) -> Result<Self> {
        let modulus = find_irreducible(p, n)?;
        Ok(FieldSpec::Finite(FiniteField { p, modulus }))
    }

    /// `GF(p^n)` with a caller-supplied modulus (low degree first).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        let modulus = gfp_poly::trim(modulus.into_iter().map(|c| c % p).collect());
        if modulus.len() < 2 || modulus.last() != Some(&1) {
            return invalid("field modulus must be monic of degree at least 1");
        }
        field_size(p, modulus.len() - 1)?;
        if !is_irreducible(&modulus, p) {
            return invalid("field modulus is not irreducible");
        }
        Ok(FieldSpec::Finite(FiniteField { p, modulus }))
    }

    pub fn finite(&self) -> Option<&FiniteField> {
        match self {
            FieldSpec::Finite(f) => Some(f),
            FieldSpec::Rationals => None,
        }
    }

    /// `0` for `Q`.
    pub fn characteristic(&self) -> u64 {
        self.finite().map_or(0, FiniteField::characteristic)
    }

    /// Number of elements, `None` for `Q`.
    pub fn size(&self) -> Option<u64> {
        self.finite().map(FiniteField::size)
    }

    /// `Some(p)` for a prime field `GF(p)`.
    pub fn prime_field(&self) -> Option<u64> {
        self.finite().filter(|f| f.degree() == 1).map(|f| f.p)
    }

    /// The class of the additive group `(F, +)`.
    pub fn additive_class(&self) -> GroupClass {
        match self {
            FieldSpec::Rationals => GroupClass::TorsionFree,
            FieldSpec::Finite(f) => GroupClass::ElementaryAbelian(f.p),
        }
    }

    pub fn zero(&self) -> FieldElement {
        match self {
            FieldSpec::Rationals => FieldElement::Rational(BigRational::zero()),
            FieldSpec::Finite(f) => FieldElement::Finite(vec![0; f.degree()]),
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> FieldElement {
        match self {
            FieldSpec::Rationals => FieldElement::Rational(BigRational::from_integer(v.clone())),
            FieldSpec::Finite(f) => {
                let mut c = vec![0; f.degree()];
                c[0] = reduce_big(v, f.p);
                FieldElement::Finite(c)
            }
        }
    }

    pub fn rational(&self, num: i64, den: i64) -> Result<FieldElement> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.from_i64(num);
        let d = self.from_i64(den);
        self.div(&n, &d)
    }

    /// The generator `α` of an extension field (`x` reduced mod the modulus).
    pub fn generator(&self) -> Result<FieldElement> {
        match self {
            FieldSpec::Finite(f) if f.degree() >= 2 => {
                let mut c = vec![0; f.degree()];
                c[1] = 1;
                Ok(FieldElement::Finite(c))
            }
            FieldSpec::Finite(f) => {
                // α is the root of the degree-one modulus x + c0.
                let c0 = f.modulus[0];
                Ok(FieldElement::Finite(vec![(f.p - c0) % f.p]))
            }
            FieldSpec::Rationals => invalid("Q has no generator α"),
        }
    }

    pub fn conforms(&self, a: &FieldElement) -> bool {
        match (self, a) {
            (FieldSpec::Rationals, FieldElement::Rational(_)) => true,
            (FieldSpec::Finite(f), FieldElement::Finite(c)) => {
                c.len() == f.degree() && c.iter().all(|&x| x < f.p)
            }
            _ => false,
        }
    }

    fn check(&self, a: &FieldElement) -> Result<()> {
        if self.conforms(a) {
            Ok(())
        } else {
            invalid(format!("element {a:?} does not belong to {self}"))
        }
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        match a {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Finite(c) => c.iter().all(|&x| x == 0),
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (self, a, b) {
            (_, FieldElement::Rational(x), FieldElement::Rational(y)) => {
                FieldElement::Rational(x + y)
            }
            (FieldSpec::Finite(f), FieldElement::Finite(x), FieldElement::Finite(y)) => {
                FieldElement::Finite(x.iter().zip(y).map(|(&u, &v)| (u + v) % f.p).collect())
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        Ok(match (self, a) {
            (_, FieldElement::Rational(x)) => FieldElement::Rational(-x),
            (FieldSpec::Finite(f), FieldElement::Finite(x)) => {
                FieldElement::Finite(x.iter().map(|&u| (f.p - u) % f.p).collect())
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.add(a, &self.neg(b)?)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (self, a, b) {
            (_, FieldElement::Rational(x), FieldElement::Rational(y)) => {
                FieldElement::Rational(x * y)
            }
            (FieldSpec::Finite(f), FieldElement::Finite(x), FieldElement::Finite(y)) => {
                let mut r = gfp_poly::mul_mod(x, y, &f.modulus, f.p);
                r.resize(f.degree(), 0);
                FieldElement::Finite(r)
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        match (self, a) {
            (_, FieldElement::Rational(x)) => Ok(FieldElement::Rational(x.recip())),
            (FieldSpec::Finite(f), _) => self.pow_unsigned(a, f.size() - 2),
            _ => unreachable!("checked above"),
        }
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.mul(a, &self.inv(b)?)
    }

    fn pow_unsigned(&self, a: &FieldElement, mut e: u64) -> Result<FieldElement> {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            base = self.mul(&base, &base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `a^e`; negative exponents invert first, and `0^0 = 1`.
    pub fn pow(&self, a: &FieldElement, e: i64) -> Result<FieldElement> {
        self.check(a)?;
        if e < 0 {
            let inv = self.inv(a)?;
            self.pow_unsigned(&inv, e.unsigned_abs())
        } else {
            self.pow_unsigned(a, e as u64)
        }
    }

    pub fn apply(&self, a: &FieldElement, op: FieldOp) -> Result<FieldElement> {
        field_arith(op, a, self)
    }

    /// All elements of a finite field in canonical order.
    pub fn elements(&self) -> Result<Vec<FieldElement>> {
        let f = match self {
            FieldSpec::Finite(f) => f,
            FieldSpec::Rationals => return invalid("Q is infinite; a box bound is required"),
        };
        let n = f.degree();
        // Canonical order compares the constant coefficient first.
        let mut out = Vec::with_capacity(f.size() as usize);
        let mut digits = vec![0u64; n];
        loop {
            out.push(FieldElement::Finite(digits.clone()));
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < f.p {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    /// Finite fields: every element. `Q`: the integers in `[-radius, radius]`.
    pub fn box_elements(&self, radius: u64) -> Result<Vec<FieldElement>> {
        match self {
            FieldSpec::Finite(_) => self.elements(),
            FieldSpec::Rationals => Ok((-(radius as i64)..=radius as i64)
                .map(|v| self.from_i64(v))
                .collect()),
        }
    }

    pub fn parse_element(&self, text: &str) -> Result<FieldElement> {
        let t = text.trim();
        match self {
            FieldSpec::Rationals => t
                .replace(' ', "")
                .parse::<BigRational>()
                .map(FieldElement::Rational)
                .or_else(|_| parse_err(format!("bad rational {text:?}"))),
            FieldSpec::Finite(f) => {
                let terms = parse_univariate(t, &["α", "a"])?;
                let mut acc = self.zero();
                let alpha = self.generator()?;
                for (c, e) in terms {
                    let term = self.mul(&self.from_bigint(&c), &self.pow(&alpha, e as i64)?)?;
                    acc = self.add(&acc, &term)?;
                }
                debug_assert!(self.conforms(&acc), "{f:?}");
                Ok(acc)
            }
        }
    }

    pub fn format_element(&self, a: &FieldElement) -> String {
        a.to_string()
    }
}

fn reduce_big(v: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    (((v % &m) + &m) % &m).to_u64().expect("residue fits u64")
}

/// Exact field operation dispatch.
pub fn field_arith(op: FieldOp, a: &FieldElement, spec: &FieldSpec) -> Result<FieldElement> {
    match op {
        FieldOp::Add(b) => spec.add(a, &b),
        FieldOp::Sub(b) => spec.sub(a, &b),
        FieldOp::Mul(b) => spec.mul(a, &b),
        FieldOp::Inv => spec.inv(a),
        FieldOp::Pow(e) => spec.pow(a, e),
    }
}

fn check_elementary(group: &GroupSpec, field: &FieldSpec) -> Result<u64> {
    let f = match field {
        FieldSpec::Finite(f) => f,
        FieldSpec::Rationals => return invalid("Q has no elementary abelian additive group"),
    };
    match group.classify() {
        GroupClass::ElementaryAbelian(p)
            if p == f.p && group.invariant_factors().len() == f.degree() =>
        {
            Ok(p)
        }
        _ => invalid(format!("{group} is not the additive group of {field}")),
    }
}

/// Coordinate map `(Z/p)^n → GF(p^n)` onto the basis `1, α, …, α^{n-1}`.
pub fn embed_elementary(
    g: &GroupElement,
    group: &GroupSpec,
    field: &FieldSpec,
) -> Result<FieldElement> {
    check_elementary(group, field)?;
    if !group.conforms(g) {
        return invalid(format!("element {g} does not belong to {group}"));
    }
    Ok(FieldElement::Finite(g.torsion_part().to_vec()))
}

/// Inverse of [`embed_elementary`].
pub fn unembed_elementary(
    a: &FieldElement,
    group: &GroupSpec,
    field: &FieldSpec,
) -> Result<GroupElement> {
    check_elementary(group, field)?;
    match a {
        FieldElement::Finite(c) if field.conforms(a) => {
            let t: Vec<i64> = c.iter().map(|&x| x as i64).collect();
            group.element(Vec::new(), &t)
        }
        _ => invalid(format!("{a:?} does not belong to {field}")),
    }
}

/// Parses `c*v^e` terms joined by `+`/`-`, where `v` is any of `vars`.
/// Coefficients are integers; repeated exponents are summed.
fn parse_univariate(text: &str, vars: &[&str]) -> Result<Vec<(BigInt, u32)>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return parse_err("empty polynomial");
    }
    let mut terms = Vec::new();
    let mut rest = s.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let mut sign = BigInt::one();
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
        } else if !first {
            return parse_err(format!("expected + or - in {text:?}"));
        }
        first = false;
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let (term, tail) = rest.split_at(end);
        rest = tail;
        let mut coeff = sign;
        let mut exp = 0u32;
        for factor in term.split('*') {
            // A numeric prefix may be glued to the variable, as in `2α`.
            let digits = factor.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(factor.len());
            let factor = if digits > 0 && digits < factor.len() {
                coeff *= factor[..digits].parse::<BigInt>().expect("ascii digits");
                &factor[digits..]
            } else {
                factor
            };
            if let Some(v) = vars.iter().find(|v| factor.starts_with(**v)) {
                let after = &factor[v.len()..];
                let e = if after.is_empty() {
                    1
                } else {
                    after
                        .strip_prefix('^')
                        .and_then(|e| e.parse::<u32>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad power {factor:?}")))?
                };
                exp += e;
            } else {
                let c: BigInt = factor
                    .parse()
                    .or_else(|_| parse_err(format!("bad coefficient {factor:?} in {text:?}")))?;
                coeff *= c;
            }
        }
        terms.push((coeff, exp));
    }
    Ok(terms)
}

fn format_univariate(coeffs: &[u64], var: &str) -> String {
    let mut parts = Vec::new();
    for (e, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        parts.push(match (c, mono.is_empty()) {
            (_, true) => c.to_string(),
            (1, false) => mono,
            (_, false) => format!("{c}{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => write!(f, "{r}"),
            FieldElement::Finite(c) => write!(f, "{}", format_univariate(c, "α")),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Finite(ff) if ff.degree() == 1 && ff.modulus[0] == 0 => {
                write!(f, "GF({})", ff.p)
            }
            FieldSpec::Finite(ff) => {
                let m: Vec<String> = ff
                    .modulus
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, &c)| c != 0)
                    .map(|(e, &c)| {
                        let mono = match e {
                            0 => String::new(),
                            1 => "x".into(),
                            _ => format!("x^{e}"),
                        };
                        match (c, mono.is_empty()) {
                            (_, true) => c.to_string(),
                            (1, false) => mono,
                            _ => format!("{c}*{mono}"),
                        }
                    })
                    .collect();
                write!(f, "GF({}^{}; {})", ff.p, ff.degree(), m.join("+"))
            }
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// `"Q"`, `"GF(p)"`, `"GF(p^n)"`, or `"GF(p^n; modulus)"` with the
    /// modulus written in `x`.
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        let body = t
            .strip_prefix("GF(")
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("unrecognized field {text:?}")))?;
        let (size, modulus) = match body.split_once(';') {
            Some((s, m)) => (s.trim(), Some(m.trim())),
            None => (body.trim(), None),
        };
        let (p, n) = match size.split_once('^') {
            Some((p, n)) => (p.trim(), n.trim()),
            None => (size, "1"),
        };
        let mut p: u64 = p
            .parse()
            .or_else(|_| parse_err(format!("bad characteristic in {text:?}")))?;
        let mut n: usize = n
            .parse()
            .or_else(|_| parse_err(format!("bad degree in {text:?}")))?;
        // `GF(q)` with `q = p^e` names the same field as `GF(p^e)`.
        if n == 1 && !is_prime(p) {
            if let Some((base, e)) = prime_power(p) {
                p = base;
                n = e as usize;
            }
        }
        match modulus {
            None => FieldSpec::extension(p, n),
            Some(m) => {
                if !is_prime(p) {
                    return invalid(format!("{p} is not prime"));
                }
                let mut coeffs = vec![0u64; n + 1];
                for (c, e) in parse_univariate(m, &["x"])? {
                    let slot = coeffs.get_mut(e as usize).ok_or_else(|| {
                        Error::InvalidInput(format!("modulus {m:?} exceeds degree {n}"))
                    })?;
                    *slot = (*slot + reduce_big(&c, p)) % p;
                }
                FieldSpec::with_modulus(p, coeffs)
            }
        }
    }
}

impl FieldElement {
    /// Numerator/denominator view for rationals.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(r) => Some(r),
            FieldElement::Finite(_) => None,
        }
    }

    pub fn coefficients(&self) -> Option<&[u64]> {
        match self {
            FieldElement::Finite(c) => Some(c),
            FieldElement::Rational(_) => None,
        }
    }

    pub(crate) fn is_negative_rational(&self) -> bool {
        matches!(self, FieldElement::Rational(r) if r.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(text: &str) -> FieldSpec {
        text.parse().unwrap()
    }

    /// Brute force: a monic polynomial of degree 2 or 3 is irreducible iff
    /// it has no root.
    fn has_root(coeffs: &[u64], p: u64) -> bool {
        (0..p).any(|x| {
            coeffs
                .iter()
                .rev()
                .fold(0u64, |acc, &c| (acc * x + c) % p)
                == 0
        })
    }

    #[test]
    fn parses_glued_coefficients() {
        let f = gf("GF(9)");
        for e in f.elements().unwrap() {
            assert_eq!(f.parse_element(&f.format_element(&e)).unwrap(), e);
        }
        assert_eq!(f.parse_element("2α+1").unwrap(), f.parse_element("2*a + 1").unwrap());
    }

    #[test]
    fn find_irreducible_examples() {
        assert_eq!(find_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(find_irreducible(3, 1).unwrap(), vec![0, 1]);
        assert_eq!(find_irreducible(2, 3).unwrap(), vec![1, 1, 0, 1]);
    }

    #[test]
    fn find_irreducible_matches_root_scan_for_low_degree() {
        for p in [2u64, 3, 5, 7] {
            for n in [2usize, 3] {
                let size = p.pow(n as u32);
                let expected = (0..size)
                    .map(|code| {
                        let mut c: Vec<u64> = (0..n).map(|i| code / p.pow(i as u32) % p).collect();
                        c.push(1);
                        c
                    })
                    .find(|c| !has_root(c, p))
                    .unwrap();
                assert_eq!(find_irreducible(p, n).unwrap(), expected, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn find_irreducible_errors() {
        assert!(matches!(find_irreducible(4, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(find_irreducible(2, 21), Err(Error::ResourceLimit(_))));
        assert!(matches!(find_irreducible(1031, 2), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn irreducible_output_has_no_roots_and_divides_frobenius() {
        for (p, n) in [(2u64, 4usize), (3, 3), (5, 2), (2, 6), (7, 2)] {
            let m = find_irreducible(p, n).unwrap();
            assert!(!has_root(&m, p));
            let frob = gfp_poly::pow_poly_mod(&[0, 1], p.pow(n as u32), &m, p);
            assert_eq!(frob, vec![0, 1]);
        }
    }

    #[test]
    fn arithmetic_examples() {
        let gf4 = gf("GF(2^2)");
        let a = gf4.generator().unwrap();
        let a2 = gf4.mul(&a, &a).unwrap();
        assert_eq!(a2, gf4.parse_element("α+1").unwrap());

        let gf7 = gf("GF(7)");
        assert_eq!(gf7.inv(&gf7.from_i64(3)).unwrap(), gf7.from_i64(5));

        let gf8 = gf("GF(2^3; x^3+x+1)");
        let b = gf8.generator().unwrap();
        assert_eq!(
            gf8.pow(&b, 3).unwrap(),
            gf8.parse_element("a+1").unwrap()
        );
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        for f in [gf("GF(7)"), gf("GF(3^2)"), FieldSpec::Rationals] {
            assert_eq!(f.inv(&f.zero()), Err(Error::DivisionByZero));
        }
    }

    #[test]
    fn field_arith_dispatch() {
        let f = gf("GF(5)");
        let two = f.from_i64(2);
        assert_eq!(
            field_arith(FieldOp::Pow(-1), &two, &f).unwrap(),
            f.from_i64(3)
        );
        assert_eq!(
            field_arith(FieldOp::Sub(f.from_i64(4)), &two, &f).unwrap(),
            f.from_i64(3)
        );
    }

    #[test]
    fn rationals_are_canonical() {
        let q = FieldSpec::Rationals;
        let x = q.rational(2, -4).unwrap();
        assert_eq!(x.to_string(), "-1/2");
        let sixth = q
            .sub(&q.parse_element("1/2").unwrap(), &q.parse_element("1/3").unwrap())
            .unwrap();
        assert_eq!(sixth.to_string(), "1/6");
    }

    #[test]
    fn embed_examples() {
        let v4: GroupSpec = "Z/2 x Z/2".parse().unwrap();
        let gf4 = gf("GF(2^2)");
        let g = v4.parse_element("(1,1)").unwrap();
        assert_eq!(
            embed_elementary(&g, &v4, &gf4).unwrap(),
            gf4.parse_element("1+α").unwrap()
        );
        assert_eq!(
            embed_elementary(&v4.identity(), &v4, &gf4).unwrap(),
            gf4.zero()
        );
        let z3: GroupSpec = "Z/3".parse().unwrap();
        let gf3 = gf("GF(3)");
        assert_eq!(
            embed_elementary(&z3.parse_element("2").unwrap(), &z3, &gf3).unwrap(),
            gf3.from_i64(2)
        );
        assert!(embed_elementary(&g, &v4, &gf3).is_err());
    }

    #[test]
    fn spec_text_round_trip() {
        for t in ["Q", "GF(7)", "GF(2^3; x^3+x+1)", "GF(3^2; x^2+1)"] {
            assert_eq!(gf(t).to_string(), t);
        }
        assert_eq!(gf("GF(2^2)").to_string(), "GF(2^2; x^2+x+1)");
        assert!("GF(2^2; x^2+1)".parse::<FieldSpec>().is_err());
        assert!("GF(6)".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn element_printing() {
        let f = gf("GF(3^2)");
        let e = f.parse_element("2*a^1 + 1 + 3").unwrap();
        assert_eq!(e.to_string(), "2α+1");
        assert_eq!(f.zero().to_string(), "0");
    }
}
