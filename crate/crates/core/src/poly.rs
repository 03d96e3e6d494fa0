//! Sparse multivariate polynomials over a [`FieldSpec`], a constructive
//! Combinatorial Nullstellensatz, and a checker for the line-counting lemma
//! `k + min ν_i ≥ |A| + |B| - deg P`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{invalid, parse_err, Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Exponent vector, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree; the zero polynomial has degree `NegInfinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::NegInfinity => write!(f, "-inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: FieldSpec,
    nvars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl MultiPoly {
    pub fn zero(field: &FieldSpec, nvars: usize) -> Self {
        MultiPoly {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &FieldSpec, nvars: usize, c: FieldElement) -> Self {
        Self::term(field, nvars, c, vec![0; nvars])
    }

    pub fn one(field: &FieldSpec, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    /// The variable `x_index` (0-based).
    pub fn var(field: &FieldSpec, nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::term(field, nvars, field.one(), e)
    }

    pub fn term(field: &FieldSpec, nvars: usize, c: FieldElement, exps: Vec<u32>) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Self::zero(field, nvars);
        p.add_term(Monomial(exps), c);
        p
    }

    /// Univariate `∏_{a ∈ roots} (x_index - a)`.
    pub fn vanishing(field: &FieldSpec, nvars: usize, index: usize, roots: &[FieldElement]) -> Self {
        let x = Self::var(field, nvars, index);
        roots.iter().fold(Self::one(field, nvars), |acc, a| {
            let lin = x.sub(&Self::constant(field, nvars, a.clone()));
            acc.mul(&lin)
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, exps: &[u32]) -> FieldElement {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    fn add_term(&mut self, m: Monomial, c: FieldElement) {
        if self.field.is_zero(&c) {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let sum = self.field.add(&old, &c).expect("same field");
                if !self.field.is_zero(&sum) {
                    self.terms.insert(m, sum);
                }
            }
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(self.field, other.field, "polynomials over different fields");
        assert_eq!(self.nvars, other.nvars, "polynomials in different rings");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), self.field.neg(c).expect("same field")))
            .collect();
        MultiPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut out = Self::zero(&self.field, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let e = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                let c = self.field.mul(c1, c2).expect("same field");
                out.add_term(Monomial(e), c);
            }
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let mut out = Self::zero(&self.field, self.nvars);
        for (m, d) in &self.terms {
            out.add_term(m.clone(), self.field.mul(c, d).expect("same field"));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(&self.field, self.nvars), |acc, _| acc.mul(self))
    }

    pub fn total_degree(&self) -> Degree {
        total_degree(self)
    }

    /// Degree in a single variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        poly_eval(self, point)
    }

    /// Parses an expression such as `"x^2 - x"`, `"(x-y-1)*(x-y-2)"` or
    /// `"3*x1^2*x2 + (α+1)*x3"`.
    pub fn parse(text: &str, field: &FieldSpec, nvars: usize) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            field,
            nvars,
        };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return parse_err(format!("trailing input in polynomial {text:?}"));
        }
        Ok(p)
    }

    fn var_name(&self, i: usize) -> String {
        if self.nvars <= 3 {
            ["x", "y", "z"][i].to_string()
        } else {
            format!("x{}", i + 1)
        }
    }
}

/// Exact evaluation at a point.
pub fn poly_eval(f: &MultiPoly, point: &[FieldElement]) -> Result<FieldElement> {
    if point.len() != f.nvars {
        return invalid(format!(
            "point has {} coordinates, polynomial has {} variables",
            point.len(),
            f.nvars
        ));
    }
    if let Some(bad) = point.iter().find(|a| !f.field.conforms(a)) {
        return invalid(format!("{bad} is not an element of {}", f.field));
    }
    let field = &f.field;
    // Power tables per variable, sized by the largest exponent used.
    let mut powers: Vec<Vec<FieldElement>> = Vec::with_capacity(f.nvars);
    for (i, a) in point.iter().enumerate() {
        let max = f.degree_in(i).unwrap_or(0) as usize;
        let mut row = Vec::with_capacity(max + 1);
        row.push(field.one());
        for k in 1..=max {
            row.push(field.mul(&row[k - 1], a)?);
        }
        powers.push(row);
    }
    let mut acc = field.zero();
    for (m, c) in &f.terms {
        let mut t = c.clone();
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                t = field.mul(&t, &powers[i][e as usize])?;
            }
        }
        acc = field.add(&acc, &t)?;
    }
    Ok(acc)
}

pub fn total_degree(f: &MultiPoly) -> Degree {
    f.terms
        .keys()
        .map(Monomial::degree)
        .max()
        .map_or(Degree::NegInfinity, Degree::Finite)
}

fn dedup_grid(field: &FieldSpec, grid: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if grid.is_empty() {
        return invalid("grid sets must be nonempty");
    }
    if let Some(bad) = grid.iter().find(|a| !field.conforms(a)) {
        return invalid(format!("grid point {bad} is not an element of {field}"));
    }
    let set: BTreeSet<FieldElement> = grid.iter().cloned().collect();
    Ok(set.into_iter().collect())
}

/// `f = Σ g_i h_i + r` with `g_i = ∏_{a ∈ A_i} (x_i - a)` and `r` reduced
/// (`deg_{x_i} r < |A_i|`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnDecomposition {
    pub grid_polys: Vec<MultiPoly>,
    pub quotients: Vec<MultiPoly>,
    pub remainder: MultiPoly,
}

impl CnDecomposition {
    pub fn reconstruct(&self) -> MultiPoly {
        self.grid_polys
            .iter()
            .zip(&self.quotients)
            .fold(self.remainder.clone(), |acc, (g, h)| acc.add(&g.mul(h)))
    }

    /// `deg h_i ≤ deg f - deg g_i` for every nonzero quotient.
    pub fn quotient_degrees_bounded(&self, f: &MultiPoly) -> bool {
        let df = match f.total_degree() {
            Degree::Finite(d) => d as i64,
            Degree::NegInfinity => return self.quotients.iter().all(MultiPoly::is_zero),
        };
        self.grid_polys.iter().zip(&self.quotients).all(|(g, h)| {
            match (h.total_degree(), g.total_degree()) {
                (Degree::NegInfinity, _) => true,
                (Degree::Finite(dh), Degree::Finite(dg)) => dh as i64 <= df - dg as i64,
                _ => false,
            }
        })
    }

    /// `deg_{x_i} r < |A_i|` for all `i`.
    pub fn remainder_reduced(&self) -> bool {
        self.grid_polys.iter().enumerate().all(|(i, g)| {
            let t = g.degree_in(i).unwrap_or(0);
            self.remainder.degree_in(i).is_none_or(|d| d < t)
        })
    }
}

/// Reduces `f` modulo the grid polynomials, variable by variable in ascending
/// index order, highest power of the current variable first.
pub fn cn_decompose(f: &MultiPoly, grids: &[Vec<FieldElement>]) -> Result<CnDecomposition> {
    if grids.len() != f.nvars {
        return invalid(format!(
            "{} grids given for a polynomial in {} variables",
            grids.len(),
            f.nvars
        ));
    }
    let field = &f.field;
    let n = f.nvars;
    let grids: Vec<Vec<FieldElement>> = grids
        .iter()
        .map(|g| dedup_grid(field, g))
        .collect::<Result<_>>()?;
    let grid_polys: Vec<MultiPoly> = grids
        .iter()
        .enumerate()
        .map(|(i, g)| MultiPoly::vanishing(field, n, i, g))
        .collect();
    let mut quotients: Vec<MultiPoly> = (0..n).map(|_| MultiPoly::zero(field, n)).collect();
    let mut r = f.clone();

    for i in 0..n {
        let t = grids[i].len() as u32;
        // g_i = x_i^t + Σ_{j<t} tail[j] x_i^j
        let tail: Vec<(u32, FieldElement)> = (0..t)
            .filter_map(|j| {
                let mut e = vec![0; n];
                e[i] = j;
                let c = grid_polys[i].coefficient(&e);
                (!field.is_zero(&c)).then_some((j, c))
            })
            .collect();
        loop {
            let pick = r
                .terms
                .iter()
                .filter(|(m, _)| m.0[i] >= t)
                .max_by(|(a, _), (b, _)| a.0[i].cmp(&b.0[i]).then_with(|| a.cmp(b)))
                .map(|(m, c)| (m.clone(), c.clone()));
            let Some((m, c)) = pick else { break };
            let mut q = m.0.clone();
            q[i] -= t;
            quotients[i].add_term(Monomial(q.clone()), c.clone());
            // r -= c x^q g_i; the leading monomial cancels exactly.
            r.terms.remove(&m);
            for (j, gj) in &tail {
                let mut e = q.clone();
                e[i] += j;
                let delta = field.neg(&field.mul(&c, gj)?)?;
                r.add_term(Monomial(e), delta);
            }
        }
    }
    Ok(CnDecomposition {
        grid_polys,
        quotients,
        remainder: r,
    })
}

/// Largest grid product that [`vanishes_on_grid`] will enumerate.
pub const GRID_POINT_CAP: u64 = 1_000_000;

/// Exhaustive evaluation over `A_1 × … × A_n`.
pub fn vanishes_on_grid(f: &MultiPoly, grids: &[Vec<FieldElement>]) -> Result<bool> {
    if grids.len() != f.nvars {
        return invalid(format!(
            "{} grids given for a polynomial in {} variables",
            grids.len(),
            f.nvars
        ));
    }
    let grids: Vec<Vec<FieldElement>> = grids
        .iter()
        .map(|g| dedup_grid(&f.field, g))
        .collect::<Result<_>>()?;
    let total = grids
        .iter()
        .try_fold(1u64, |acc, g| acc.checked_mul(g.len() as u64))
        .unwrap_or(u64::MAX);
    if total > GRID_POINT_CAP {
        return Err(Error::ResourceLimit(format!(
            "grid has {total} points (cap {GRID_POINT_CAP})"
        )));
    }
    let mut idx = vec![0usize; grids.len()];
    loop {
        let point: Vec<FieldElement> = idx.iter().zip(&grids).map(|(&k, g)| g[k].clone()).collect();
        if !f.field.is_zero(&poly_eval(f, &point)?) {
            return Ok(false);
        }
        let mut pos = grids.len();
        loop {
            if pos == 0 {
                return Ok(true);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < grids[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `∏_{s ∈ S} (x - y - s)` in two variables.
pub fn build_difference_poly(field: &FieldSpec, s: &[FieldElement]) -> MultiPoly {
    let x = MultiPoly::var(field, 2, 0);
    let y = MultiPoly::var(field, 2, 1);
    let diff = x.sub(&y);
    s.iter().fold(MultiPoly::one(field, 2), |acc, si| {
        acc.mul(&diff.sub(&MultiPoly::constant(field, 2, si.clone())))
    })
}

/// `∏_i (x^{m_i} y^{n_i} - d_i)` in two variables.
pub fn build_monomial_constraint_poly(
    field: &FieldSpec,
    constraints: &[(u32, u32, FieldElement)],
) -> MultiPoly {
    constraints
        .iter()
        .fold(MultiPoly::one(field, 2), |acc, (m, n, d)| {
            let mono = MultiPoly::term(field, 2, field.one(), vec![*m, *n]);
            acc.mul(&mono.sub(&MultiPoly::constant(field, 2, d.clone())))
        })
}

/// A line `a + λ b = μ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Line {
    pub lambda: FieldElement,
    pub mu: FieldElement,
}

/// The lines `a + b = c` for each `c` in a sumset.
pub fn sum_lines(field: &FieldSpec, sums: &[FieldElement]) -> Vec<Line> {
    sums.iter()
        .map(|c| Line {
            lambda: field.one(),
            mu: c.clone(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma21Report {
    pub hypotheses_ok: bool,
    pub failure: Option<String>,
    pub nu_values: Vec<usize>,
    pub k: usize,
    pub lhs: usize,
    /// `|A| + |B| - deg P`, absent when `P = 0`.
    pub rhs: Option<i64>,
    pub inequality_holds: bool,
    pub is_tight: bool,
}

/// Checks the hypotheses and evaluates `k + min ν_i ≥ |A| + |B| - deg P`,
/// where `ν_i` counts all pairs of `A × B` on line `i`.
pub fn lemma21_check(
    a: &[FieldElement],
    b: &[FieldElement],
    lines: &[Line],
    p: &MultiPoly,
) -> Result<Lemma21Report> {
    let field = p.field();
    if p.nvars() != 2 {
        return invalid("P must be a polynomial in x, y");
    }
    let a = dedup_grid(field, a)?;
    let b = dedup_grid(field, b)?;
    if lines.is_empty() {
        return invalid("at least one line is required");
    }
    for l in lines {
        if !field.conforms(&l.lambda) || !field.conforms(&l.mu) {
            return invalid(format!("line coefficients must lie in {field}"));
        }
        if field.is_zero(&l.lambda) {
            return invalid("λ must be nonzero");
        }
    }
    let distinct: BTreeSet<&Line> = lines.iter().collect();
    if distinct.len() != lines.len() {
        return invalid("lines must be pairwise distinct");
    }

    let k = lines.len();
    let mut nu = vec![0usize; k];
    let mut carried = vec![false; k];
    let mut failure: Option<String> = None;
    for x in &a {
        for y in &b {
            let nonzero = !field.is_zero(&p.eval(&[x.clone(), y.clone()])?);
            let mut on = Vec::new();
            for (i, l) in lines.iter().enumerate() {
                let v = field.add(x, &field.mul(&l.lambda, y)?)?;
                if v == l.mu {
                    nu[i] += 1;
                    on.push(i);
                    if nonzero {
                        carried[i] = true;
                    }
                }
            }
            if nonzero && on.len() != 1 && failure.is_none() {
                failure = Some(format!(
                    "pair ({x}, {y}) has P ≠ 0 and lies on {} lines",
                    on.len()
                ));
            }
        }
    }
    if failure.is_none() {
        if let Some(i) = carried.iter().position(|c| !c) {
            let l = &lines[i];
            failure = Some(format!(
                "line a + {}·b = {} carries no pair with P ≠ 0",
                l.lambda, l.mu
            ));
        }
    }
    let hypotheses_ok = failure.is_none();
    let lhs = k + nu.iter().copied().min().unwrap_or(0);
    let rhs = p
        .total_degree()
        .finite()
        .map(|d| a.len() as i64 + b.len() as i64 - d as i64);
    let inequality_holds = rhs.is_some_and(|r| lhs as i64 >= r);
    let is_tight = rhs == Some(lhs as i64);
    Ok(Lemma21Report {
        hypotheses_ok,
        failure,
        nu_values: nu,
        k,
        lhs,
        rhs,
        inequality_holds,
        is_tight,
    })
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms().enumerate() {
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.var_name(i)
                    } else {
                        format!("{}^{e}", self.var_name(i))
                    }
                })
                .collect();
            let mono = mono.join("*");
            let negative = c.is_negative_rational();
            let abs = if negative {
                self.field.neg(c).expect("same field")
            } else {
                c.clone()
            };
            let coeff = abs.to_string();
            let body = match (coeff.as_str(), mono.is_empty()) {
                (_, true) => coeff,
                ("1", false) => mono,
                (_, false) if coeff.contains('+') => format!("({coeff})*{mono}"),
                (_, false) => format!("{coeff}*{mono}"),
            };
            match (idx, negative) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Num(s.parse().expect("digits")));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return parse_err(format!("unexpected character {c:?} in {text:?}"));
        }
    }
    if out.is_empty() {
        return parse_err("empty polynomial");
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    field: &'a FieldSpec,
    nvars: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = MultiPoly::zero(self.field, self.nvars);
        let mut first = true;
        loop {
            let negate = if self.eat('-') {
                true
            } else if self.eat('+') || first {
                false
            } else {
                return Ok(acc);
            };
            first = false;
            let t = self.term()?;
            acc = if negate { acc.sub(&t) } else { acc.add(&t) };
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                let d = self.power()?;
                let c = match d.total_degree() {
                    Degree::Finite(0) => d.coefficient(&vec![0; self.nvars]),
                    Degree::NegInfinity => return Err(Error::DivisionByZero),
                    Degree::Finite(_) => return parse_err("division by a non-constant"),
                };
                acc = acc.scale(&self.field.inv(&c)?);
            } else if matches!(
                self.peek(),
                Some(Token::Num(_) | Token::Ident(_) | Token::Op('('))
            ) {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Num(e)) => {
                    self.pos += 1;
                    let e = u32::try_from(e).or_else(|_| parse_err("exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => parse_err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of polynomial".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(n) => Ok(MultiPoly::constant(
                self.field,
                self.nvars,
                self.field.from_bigint(&n),
            )),
            Token::Op('-') => Ok(self.atom()?.neg()),
            Token::Op('(') => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return parse_err("missing ')'");
                }
                Ok(inner)
            }
            Token::Ident(name) => self.ident(&name),
            Token::Op(c) => parse_err(format!("unexpected {c:?}")),
        }
    }

    fn ident(&self, name: &str) -> Result<MultiPoly> {
        let index = match name {
            "x" => Some(0),
            "y" => Some(1),
            "z" => Some(2),
            "α" | "a" => None,
            _ => match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                Some(k) if k >= 1 => Some(k - 1),
                _ => return parse_err(format!("unknown variable {name:?}")),
            },
        };
        match index {
            Some(i) if i < self.nvars => Ok(MultiPoly::var(self.field, self.nvars, i)),
            Some(_) => parse_err(format!(
                "variable {name:?} out of range for {} variables",
                self.nvars
            )),
            None => match self.field.finite() {
                Some(f) if f.degree() >= 2 => Ok(MultiPoly::constant(
                    self.field,
                    self.nvars,
                    self.field.generator()?,
                )),
                _ => parse_err(format!("α is only defined in extension fields, not {}", self.field)),
            },
        }
    }
}
