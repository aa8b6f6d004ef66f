//! Exact multivariate polynomials over arbitrary-precision rationals.
//!
//! Symbols come in five indexed families: the off-diagonal random
//! variables `a0, a1, ...` and `b0, b1, ...`, the distribution moments
//! `m1, m2, ...`, and the expected weight polynomials `alpha1, ...` and
//! `omega1, ...`. Polynomials are kept in a canonical sparse form, so
//! equality is structural and both the text and the JSON renderings are
//! stable byte for byte.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::traits::ToPrimitive;
use num::{BigInt, BigRational, One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational scalar used throughout the crate.
pub type Rat = BigRational;

/// The exact rational `n / d`.
///
/// # Panics
///
/// Panics if `d == 0`.
#[must_use]
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// The exact rational `n / 1`.
#[must_use]
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Errors produced by polynomial parsing, evaluation and expectation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    /// Text or JSON input that does not match the canonical grammar.
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    /// A numeric evaluation met a symbol with no assigned value.
    #[error("no value assigned for symbol `{0}`")]
    MissingAssignment(SymbolId),
    /// An expectation was requested over a symbol that is not an `a`/`b`
    /// random variable.
    #[error("expectation requires `a`/`b` symbols only, found `{0}`")]
    NonRandomSymbol(SymbolId),
}

fn parse_err(input: &str, reason: impl Into<String>) -> PolyError {
    PolyError::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// The five indexed symbol families, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Off-diagonal random variables `a0, a1, ...`.
    A,
    /// Mirrored random variables `b0, b1, ...`.
    B,
    /// Moments `m1, m2, ...` of the common distribution of the `a`/`b`
    /// variables; `m0` is pinned to one and never appears as a symbol.
    M,
    /// Expected weight polynomials `alpha1, alpha2, ...` of paths that
    /// stay on or above the axis.
    Alpha,
    /// Expected weight polynomials `omega1, omega2, ...` of unrestricted
    /// paths.
    Omega,
}

impl Family {
    /// Lower-case spelling used in canonical text and JSON keys.
    #[must_use]
    pub fn prefix(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::B => "b",
            Family::M => "m",
            Family::Alpha => "alpha",
            Family::Omega => "omega",
        }
    }

    /// Whether expectation acts on this family.
    #[must_use]
    pub fn is_random(self) -> bool {
        matches!(self, Family::A | Family::B)
    }
}

/// A single indexed symbol such as `a0`, `b3`, `m2`, `alpha4` or `omega1`.
///
/// Symbols order by family first and index second; this order fixes the
/// factor order inside monomials and every listing of symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId {
    pub family: Family,
    pub index: u32,
}

impl SymbolId {
    #[must_use]
    pub const fn new(family: Family, index: u32) -> Self {
        Self { family, index }
    }

    #[must_use]
    pub const fn a(index: u32) -> Self {
        Self::new(Family::A, index)
    }

    #[must_use]
    pub const fn b(index: u32) -> Self {
        Self::new(Family::B, index)
    }

    #[must_use]
    pub const fn m(index: u32) -> Self {
        Self::new(Family::M, index)
    }

    #[must_use]
    pub const fn alpha(index: u32) -> Self {
        Self::new(Family::Alpha, index)
    }

    #[must_use]
    pub const fn omega(index: u32) -> Self {
        Self::new(Family::Omega, index)
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.prefix(), self.index)
    }
}

impl FromStr for SymbolId {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits_at = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| parse_err(s, "symbol has no index"))?;
        let (name, digits) = s.split_at(digits_at);
        let family = match name {
            "a" => Family::A,
            "b" => Family::B,
            "m" => Family::M,
            "alpha" => Family::Alpha,
            "omega" => Family::Omega,
            _ => return Err(parse_err(s, "unknown symbol family")),
        };
        let index = digits
            .parse::<u32>()
            .map_err(|e| parse_err(s, format!("bad symbol index: {e}")))?;
        Ok(Self { family, index })
    }
}

/// A product of symbols with positive integer exponents.
///
/// The unit monomial is the empty product. Zero exponents are never
/// stored, so structural equality is monomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exponents: BTreeMap<SymbolId, u32>,
}

impl Monomial {
    /// The empty product.
    #[must_use]
    pub fn unit() -> Self {
        Self::default()
    }

    /// A single symbol to the first power.
    #[must_use]
    pub fn symbol(id: SymbolId) -> Self {
        Self::from_powers([(id, 1)])
    }

    /// Builds a monomial from `(symbol, exponent)` pairs, merging repeated
    /// symbols and dropping zero exponents.
    #[must_use]
    pub fn from_powers<I>(powers: I) -> Self
    where
        I: IntoIterator<Item = (SymbolId, u32)>,
    {
        let mut exponents = BTreeMap::new();
        for (id, e) in powers {
            if e > 0 {
                *exponents.entry(id).or_insert(0) += e;
            }
        }
        Self { exponents }
    }

    #[must_use]
    pub fn is_unit(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Total degree, the sum of all exponents.
    #[must_use]
    pub fn degree(&self) -> u32 {
        self.exponents.values().sum()
    }

    /// Exponent of `id`, zero when the symbol is absent.
    #[must_use]
    pub fn exponent(&self, id: SymbolId) -> u32 {
        self.exponents.get(&id).copied().unwrap_or(0)
    }

    /// Factors in ascending symbol order.
    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, u32)> + '_ {
        self.exponents.iter().map(|(&id, &e)| (id, e))
    }

    /// Product of two monomials.
    #[must_use]
    pub fn mul(&self, other: &Self) -> Self {
        let mut exponents = self.exponents.clone();
        for (&id, &e) in &other.exponents {
            *exponents.entry(id).or_insert(0) += e;
        }
        Self { exponents }
    }

    #[must_use]
    pub fn pow(&self, k: u32) -> Self {
        let exponents = self
            .exponents
            .iter()
            .map(|(&id, &e)| (id, e * k))
            .collect();
        if k == 0 {
            Self::unit()
        } else {
            Self { exponents }
        }
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order: lower total degree sorts first; among
    /// equal degrees, the monomial with the larger exponent on the
    /// earliest differing symbol sorts later.
    fn cmp(&self, other: &Self) -> Ordering {
        let by_degree = self.degree().cmp(&other.degree());
        if by_degree != Ordering::Equal {
            return by_degree;
        }
        let mut lhs = self.exponents.iter().peekable();
        let mut rhs = other.exponents.iter().peekable();
        loop {
            match (lhs.peek(), rhs.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(lid, le)), Some(&(rid, re))) => match lid.cmp(rid) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if le != re {
                            return le.cmp(re);
                        }
                        lhs.next();
                        rhs.next();
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut first = true;
        for (id, e) in self.iter() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{id}")?;
            } else {
                write!(f, "{id}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A sparse polynomial with exact rational coefficients.
///
/// Terms are keyed by monomial in graded-lexicographic order and zero
/// coefficients are never stored, so equality is structural and the
/// canonical renderings are deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    #[must_use]
    pub fn zero() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    #[must_use]
    pub fn constant(c: Rat) -> Self {
        Self::term(Monomial::unit(), c)
    }

    /// Constant polynomial with integer value `n`.
    #[must_use]
    pub fn int(n: i64) -> Self {
        Self::constant(rat_int(n))
    }

    #[must_use]
    pub fn symbol(id: SymbolId) -> Self {
        Self::term(Monomial::symbol(id), Rat::one())
    }

    /// Single-term polynomial `c * mono`; the zero polynomial when `c`
    /// is zero.
    #[must_use]
    pub fn term(mono: Monomial, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Self { terms }
    }

    /// Sums `(monomial, coefficient)` contributions, merging repeats.
    #[must_use]
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rat)>,
    {
        let mut poly = Self::zero();
        for (mono, c) in terms {
            poly.add_term(mono, c);
        }
        poly
    }

    fn add_term(&mut self, mono: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[must_use]
    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value of a constant polynomial, `None` when any symbol occurs.
    #[must_use]
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (mono, c) = self.terms.iter().next().unwrap();
                mono.is_unit().then(|| c.clone())
            }
            _ => None,
        }
    }

    #[must_use]
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Rat)> + '_ {
        self.terms.iter()
    }

    /// Terms in descending graded-lexicographic order, the canonical
    /// print order.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &Rat)> + '_ {
        self.terms.iter().rev()
    }

    /// Coefficient of `mono`, zero when the term is absent.
    #[must_use]
    pub fn coefficient(&self, mono: &Monomial) -> Rat {
        self.terms.get(mono).cloned().unwrap_or_else(Rat::zero)
    }

    /// Largest total degree over all terms; zero for the zero polynomial.
    #[must_use]
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Whether every term has total degree exactly `n`. The zero
    /// polynomial is homogeneous of every degree.
    #[must_use]
    pub fn is_homogeneous(&self, n: u32) -> bool {
        self.terms.keys().all(|mono| mono.degree() == n)
    }

    /// All symbols that occur, in canonical order.
    #[must_use]
    pub fn symbols(&self) -> BTreeSet<SymbolId> {
        self.terms
            .keys()
            .flat_map(|mono| mono.iter().map(|(id, _)| id))
            .collect()
    }

    /// Multiplies every coefficient by `c`.
    #[must_use]
    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(mono, coeff)| (mono.clone(), coeff * c))
                .collect(),
        }
    }

    #[must_use]
    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Renames every symbol through `f`, merging any collisions.
    #[must_use]
    pub fn rename_symbols(&self, f: impl Fn(SymbolId) -> SymbolId) -> Self {
        Self::from_terms(self.terms.iter().map(|(mono, c)| {
            let renamed = Monomial::from_powers(mono.iter().map(|(id, e)| (f(id), e)));
            (renamed, c.clone())
        }))
    }

    /// Replaces each symbol with `f(symbol)` where `f` returns a
    /// polynomial, leaving symbols with `None` untouched.
    #[must_use]
    pub fn substitute(&self, f: impl Fn(SymbolId) -> Option<Poly>) -> Self {
        let mut out = Self::zero();
        for (mono, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            for (id, e) in mono.iter() {
                let factor = match f(id) {
                    Some(poly) => poly.pow(e),
                    None => Self::term(Monomial::from_powers([(id, e)]), Rat::one()),
                };
                term = &term * &factor;
            }
            out += &term;
        }
        out
    }

    /// Expectation over independent identically distributed `a`/`b`
    /// variables: each factor with exponent `p` contributes the moment
    /// symbol `m{p}`, and distinct variables factorize.
    pub fn expectation(&self) -> Result<Self, PolyError> {
        if let Some(id) = self.symbols().iter().find(|id| !id.family.is_random()) {
            return Err(PolyError::NonRandomSymbol(*id));
        }
        Ok(Self::from_terms(self.terms.iter().map(|(mono, c)| {
            let moments = Monomial::from_powers(mono.iter().map(|(_, e)| (SymbolId::m(e), 1)));
            (moments, c.clone())
        })))
    }

    fn first_missing<T>(&self, assign: &BTreeMap<SymbolId, T>) -> Result<(), PolyError> {
        match self.symbols().iter().find(|id| !assign.contains_key(id)) {
            Some(&id) => Err(PolyError::MissingAssignment(id)),
            None => Ok(()),
        }
    }

    /// Exact evaluation at the given assignment. Fails with the first
    /// unassigned symbol in canonical order.
    pub fn evaluate(&self, assign: &BTreeMap<SymbolId, Rat>) -> Result<Rat, PolyError> {
        self.first_missing(assign)?;
        let mut total = Rat::zero();
        for (mono, c) in &self.terms {
            let mut value = c.clone();
            for (id, e) in mono.iter() {
                let base = &assign[&id];
                for _ in 0..e {
                    value *= base;
                }
            }
            total += value;
        }
        Ok(total)
    }

    /// Floating-point evaluation. Terms accumulate in ascending canonical
    /// order and factors multiply in symbol order, so the result is
    /// bit-stable for a fixed polynomial and assignment.
    pub fn evaluate_f64(&self, assign: &BTreeMap<SymbolId, f64>) -> Result<f64, PolyError> {
        self.first_missing(assign)?;
        let mut total = 0.0;
        for (mono, c) in &self.terms {
            let mut value = c.to_f64().unwrap_or(f64::NAN);
            for (id, e) in mono.iter() {
                value *= assign[&id].powi(e as i32);
            }
            total += value;
        }
        Ok(total)
    }

    /// Canonical JSON value, `{"terms": [{"coeff": ..., "monomial":
    /// {...}}, ...]}` with terms in descending graded-lexicographic order
    /// and monomial keys in symbol order.
    #[must_use]
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomial serialization cannot fail")
    }

    /// Parses the canonical JSON form produced by [`Poly::to_json`].
    pub fn from_json(value: &serde_json::Value) -> Result<Self, PolyError> {
        serde_json::from_value(value.clone())
            .map_err(|e| parse_err(&value.to_string(), e.to_string()))
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (mono, c) in &rhs.terms {
            self.add_term(mono.clone(), c.clone());
        }
    }
}

impl AddAssign for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        for (mono, c) in rhs.terms {
            self.add_term(mono, c);
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (mono, c) in &rhs.terms {
            self.add_term(mono.clone(), -c.clone());
        }
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(mut self, rhs: Poly) -> Poly {
        self += rhs;
        self
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;

    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(mono, c)| (mono.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (lm, lc) in &self.terms {
            for (rm, rc) in &rhs.terms {
                out.add_term(lm.mul(rm), lc * rc);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;

    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, c) in self.terms_desc() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mono.is_unit() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{c}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(parse_err(s, "empty polynomial"));
        }
        let mut out = Self::zero();
        for chunk in trimmed.split('+') {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                return Err(parse_err(s, "empty term between `+` signs"));
            }
            out += parse_term(chunk)?;
        }
        Ok(out)
    }
}

fn parse_term(term: &str) -> Result<Poly, PolyError> {
    let mut coeff = Rat::one();
    let mut mono = Monomial::unit();
    for (i, factor) in term.split('*').enumerate() {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(parse_err(term, "empty factor between `*` signs"));
        }
        let leading = factor.chars().next().unwrap();
        if leading.is_ascii_digit() || leading == '-' {
            if i != 0 {
                return Err(parse_err(term, "coefficient must lead the term"));
            }
            coeff =
                Rat::from_str(factor).map_err(|e| parse_err(term, format!("bad coefficient: {e}")))?;
        } else {
            let (name, exp) = match factor.split_once('^') {
                Some((name, exp)) => {
                    let exp = exp
                        .trim()
                        .parse::<u32>()
                        .map_err(|e| parse_err(term, format!("bad exponent: {e}")))?;
                    (name.trim(), exp)
                }
                None => (factor, 1),
            };
            mono = mono.mul(&Monomial::from_powers([(name.parse::<SymbolId>()?, exp)]));
        }
    }
    Ok(Poly::term(mono, coeff))
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: String,
    monomial: serde_json::Map<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms_desc()
            .map(|(mono, c)| TermRepr {
                coeff: c.to_string(),
                monomial: mono
                    .iter()
                    .map(|(id, e)| (id.to_string(), serde_json::Value::from(e)))
                    .collect(),
            })
            .collect();
        PolyRepr { terms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut out = Poly::zero();
        for term in repr.terms {
            let coeff = Rat::from_str(&term.coeff)
                .map_err(|e| D::Error::custom(format!("bad coefficient `{}`: {e}", term.coeff)))?;
            let mut mono = Monomial::unit();
            for (key, value) in &term.monomial {
                let id = key
                    .parse::<SymbolId>()
                    .map_err(|e| D::Error::custom(e.to_string()))?;
                let exp = value
                    .as_u64()
                    .and_then(|e| u32::try_from(e).ok())
                    .ok_or_else(|| D::Error::custom(format!("bad exponent for `{key}`")))?;
                mono = mono.mul(&Monomial::from_powers([(id, exp)]));
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn symbol_order_is_family_then_index() {
        let mut ids = [
            SymbolId::omega(1),
            SymbolId::b(0),
            SymbolId::a(10),
            SymbolId::m(3),
            SymbolId::a(2),
            SymbolId::alpha(4),
        ];
        ids.sort();
        let printed: Vec<String> = ids.iter().map(ToString::to_string).collect();
        assert_eq!(printed, ["a2", "a10", "b0", "m3", "alpha4", "omega1"]);
    }

    #[test]
    fn symbol_round_trips_through_text() {
        for id in [
            SymbolId::a(0),
            SymbolId::b(17),
            SymbolId::m(2),
            SymbolId::alpha(3),
            SymbolId::omega(12),
        ] {
            assert_eq!(id.to_string().parse::<SymbolId>().unwrap(), id);
        }
        assert!("c1".parse::<SymbolId>().is_err());
        assert!("alpha".parse::<SymbolId>().is_err());
    }

    #[test]
    fn graded_lex_orders_by_degree_then_lexicographically() {
        let ordered = ["a0^2", "a0*a1", "a0*b0", "b0^2", "b0*b1"];
        for pair in ordered.windows(2) {
            let hi: Poly = pair[0].parse().unwrap();
            let lo: Poly = pair[1].parse().unwrap();
            let hi = hi.iter().next().unwrap().0.clone();
            let lo = lo.iter().next().unwrap().0.clone();
            assert!(hi > lo, "{} should sort above {}", pair[0], pair[1]);
        }
        let quadratic = p("a0*a1").iter().next().unwrap().0.clone();
        let linear = Monomial::symbol(SymbolId::m(2));
        assert!(quadratic > linear);
    }

    #[test]
    fn ring_laws_hold_on_small_examples() {
        let x = Poly::symbol(SymbolId::a(0));
        let y = Poly::symbol(SymbolId::b(0));
        let square = (&x + &y).pow(2);
        assert_eq!(square, p("a0^2 + 2*a0*b0 + b0^2"));
        assert_eq!(&square - &square, Poly::zero());
        assert_eq!(&square * &Poly::one(), square);
        assert_eq!(&square * &Poly::zero(), Poly::zero());
        assert_eq!(&x * &y, &y * &x);
        assert_eq!((&x - &y) * (&x + &y), p("a0^2 + -1*b0^2"));
    }

    #[test]
    fn canonical_text_matches_fixture() {
        let poly = Poly::from_terms([
            (Monomial::symbol(SymbolId::m(2)), rat_int(-1)),
            (
                Monomial::from_powers([(SymbolId::a(0), 2), (SymbolId::a(1), 1)]),
                rat_int(3),
            ),
        ]);
        assert_eq!(poly.to_string(), "3*a0^2*a1 + -1*m2");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(p("a0*a1 + 1").to_string(), "a0*a1 + 1");
        assert_eq!(p("-1/2*omega1^2").to_string(), "-1/2*omega1^2");
    }

    #[test]
    fn text_round_trips() {
        for text in [
            "3*a0^2*a1 + -1*m2",
            "0",
            "a0 + b0",
            "1/3",
            "m2 + -1*alpha1^2",
            "2*a0*b0 + a0^2 + b0^2",
        ] {
            let poly = p(text);
            assert_eq!(p(&poly.to_string()), poly);
        }
        assert!("".parse::<Poly>().is_err());
        assert!("a0 *".parse::<Poly>().is_err());
        assert!("a0^".parse::<Poly>().is_err());
        assert!("a0*3".parse::<Poly>().is_err());
    }

    #[test]
    fn canonical_json_matches_fixture() {
        let poly = p("3*a0^2*a1 + -1*m2");
        assert_eq!(
            serde_json::to_string(&poly).unwrap(),
            r#"{"terms":[{"coeff":"3","monomial":{"a0":2,"a1":1}},{"coeff":"-1","monomial":{"m2":1}}]}"#
        );
        let back = Poly::from_json(&poly.to_json()).unwrap();
        assert_eq!(back, poly);
    }

    #[test]
    fn expectation_factorizes_over_distinct_variables() {
        assert_eq!(p("a0^2*a1").expectation().unwrap(), p("m1*m2"));
        assert_eq!(p("a0 + b0").expectation().unwrap(), p("2*m1"));
        assert_eq!(p("a0^2 + a0*a1").expectation().unwrap(), p("m2 + m1^2"));
        assert_eq!(p("a0*b0").expectation().unwrap(), p("m1^2"));
        assert_eq!(p("5").expectation().unwrap(), p("5"));
        assert_eq!(
            p("m1*a0").expectation().unwrap_err(),
            PolyError::NonRandomSymbol(SymbolId::m(1))
        );
    }

    #[test]
    fn exact_evaluation_with_uniform_moments() {
        let assign: BTreeMap<SymbolId, Rat> = [
            (SymbolId::m(1), rat(1, 2)),
            (SymbolId::m(2), rat(1, 3)),
        ]
        .into_iter()
        .collect();
        let value = p("m2 + m1^2").evaluate(&assign).unwrap();
        assert_eq!(value, rat(7, 12));
    }

    #[test]
    fn evaluation_reports_first_missing_symbol() {
        let assign: BTreeMap<SymbolId, Rat> = [(SymbolId::m(2), rat(1, 3))].into_iter().collect();
        let err = p("m2 + m1^2 + m3").evaluate(&assign).unwrap_err();
        assert_eq!(err, PolyError::MissingAssignment(SymbolId::m(1)));
        let f64s: BTreeMap<SymbolId, f64> = [(SymbolId::a(0), 1.0)].into_iter().collect();
        let err = p("a0*b1").evaluate_f64(&f64s).unwrap_err();
        assert_eq!(err, PolyError::MissingAssignment(SymbolId::b(1)));
    }

    #[test]
    fn float_evaluation_matches_exact_on_rationals() {
        let exact: BTreeMap<SymbolId, Rat> = [
            (SymbolId::a(0), rat(1, 4)),
            (SymbolId::a(1), rat(3, 2)),
        ]
        .into_iter()
        .collect();
        let floats: BTreeMap<SymbolId, f64> = [
            (SymbolId::a(0), 0.25),
            (SymbolId::a(1), 1.5),
        ]
        .into_iter()
        .collect();
        let poly = p("a0^2 + 2*a0*a1 + -1/2*a1^2");
        let want = poly.evaluate(&exact).unwrap().to_f64().unwrap();
        let got = poly.evaluate_f64(&floats).unwrap();
        assert!((want - got).abs() < 1e-15);
    }

    #[test]
    fn substitution_and_renaming() {
        let swapped = p("a0^2 + a0*a1 + 2*a0*b0").rename_symbols(|id| match id.family {
            Family::A => SymbolId::b(id.index),
            Family::B => SymbolId::a(id.index),
            _ => id,
        });
        assert_eq!(swapped, p("b0^2 + b0*b1 + 2*a0*b0"));

        let expanded = p("alpha2 + alpha1^2").substitute(|id| {
            (id == SymbolId::alpha(2)).then(|| p("m2 + m1^2"))
        });
        assert_eq!(expanded, p("m2 + m1^2 + alpha1^2"));
    }

    #[test]
    fn homogeneity_and_degree() {
        assert!(p("a0^2 + a0*a1 + b0*b1").is_homogeneous(2));
        assert!(!p("a0^2 + a0").is_homogeneous(2));
        assert_eq!(p("a0^2*a1 + m2").total_degree(), 3);
        assert!(Poly::zero().is_homogeneous(5));
    }
}
