//! Lattice paths, their weight polynomials, and the composition
//! calculus behind the closed-form expansions.
//!
//! Paths live on the integer grid and move by `+1` (up) or `-1` (down)
//! per unit of abscissa. Up steps carry weight one; a down step ending at
//! ordinate `h` carries the variable `a{h}` when `h >= 0` and `b{-h-1}`
//! otherwise. Weight polynomials sum the path weights over a path
//! family: `W_n` over all closed paths of length `2n`, `A_n` over the
//! paths that never go below the axis, and `B_n` over their mirror
//! images below the axis.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::polycore::{Monomial, Poly, PolyError, Rat, SymbolId};

/// Default bound on `n` for operations that enumerate paths of length
/// `2n`; `n = 14` means up to `binom(28, 14) ~ 4e7` paths.
pub const DEFAULT_ENUMERATION_CAP: usize = 14;

/// Bound on `n` for the closed-form expansions, which sum over at most
/// `2^{n-1}` compositions instead of enumerating paths.
pub const CLOSED_FORM_CAP: usize = 24;

/// A requested size exceeded the configured cap.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("size {requested} exceeds the {what} cap of {cap}")]
pub struct CapError {
    pub what: &'static str,
    pub requested: usize,
    pub cap: usize,
}

fn check_cap(what: &'static str, requested: usize, cap: usize) -> Result<(), CapError> {
    if requested > cap {
        Err(CapError {
            what,
            requested,
            cap,
        })
    } else {
        Ok(())
    }
}

/// One unit step of a lattice path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    /// `+1` to the ordinate; prints as `U`.
    Up,
    /// `-1` to the ordinate; prints as `D`.
    Down,
}

impl Step {
    #[must_use]
    pub fn delta(self) -> i64 {
        match self {
            Step::Up => 1,
            Step::Down => -1,
        }
    }
}

/// A lattice path: a starting ordinate and a step sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePath {
    start_height: i64,
    steps: Vec<Step>,
}

impl LatticePath {
    #[must_use]
    pub fn new(start_height: i64, steps: Vec<Step>) -> Self {
        Self {
            start_height,
            steps,
        }
    }

    /// A path starting at the axis.
    #[must_use]
    pub fn from_steps(steps: Vec<Step>) -> Self {
        Self::new(0, steps)
    }

    #[must_use]
    pub fn start_height(&self) -> i64 {
        self.start_height
    }

    #[must_use]
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Ordinates visited by the path, starting ordinate included, so the
    /// iterator yields `len() + 1` values.
    pub fn heights(&self) -> impl Iterator<Item = i64> + '_ {
        std::iter::once(self.start_height).chain(self.steps.iter().scan(
            self.start_height,
            |h, step| {
                *h += step.delta();
                Some(*h)
            },
        ))
    }

    #[must_use]
    pub fn end_height(&self) -> i64 {
        self.start_height + self.steps.iter().map(|s| s.delta()).sum::<i64>()
    }

    #[must_use]
    pub fn min_height(&self) -> i64 {
        self.heights().min().unwrap_or(self.start_height)
    }

    #[must_use]
    pub fn max_height(&self) -> i64 {
        self.heights().max().unwrap_or(self.start_height)
    }

    /// Mirror image with respect to the horizontal axis.
    #[must_use]
    pub fn reflected(&self) -> Self {
        Self {
            start_height: -self.start_height,
            steps: self
                .steps
                .iter()
                .map(|s| match s {
                    Step::Up => Step::Down,
                    Step::Down => Step::Up,
                })
                .collect(),
        }
    }

    /// Mirror image with respect to the vertical line through the
    /// midpoint; only meaningful for paths that end where they start.
    #[must_use]
    pub fn mirrored(&self) -> Self {
        Self {
            start_height: self.end_height(),
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| match s {
                    Step::Up => Step::Down,
                    Step::Down => Step::Up,
                })
                .collect(),
        }
    }

    /// Weight of the path: each down step ending at ordinate `h`
    /// contributes `a{h}` for `h >= 0` and `b{-h-1}` for `h < 0`; up
    /// steps contribute one.
    #[must_use]
    pub fn weight(&self) -> Poly {
        Poly::term(weight_of_steps(self.start_height, &self.steps), Rat::one())
    }
}

fn down_step_symbol(end_height: i64) -> SymbolId {
    if end_height >= 0 {
        SymbolId::a(end_height as u32)
    } else {
        SymbolId::b((-end_height - 1) as u32)
    }
}

fn weight_of_steps(start_height: i64, steps: &[Step]) -> Monomial {
    let mut height = start_height;
    Monomial::from_powers(steps.iter().filter_map(|step| {
        height += step.delta();
        match step {
            Step::Up => None,
            Step::Down => Some((down_step_symbol(height), 1)),
        }
    }))
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            f.write_str(match step {
                Step::Up => "U",
                Step::Down => "D",
            })?;
        }
        Ok(())
    }
}

impl FromStr for LatticePath {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let steps = s
            .chars()
            .map(|c| match c {
                'U' => Ok(Step::Up),
                'D' => Ok(Step::Down),
                other => Err(PolyError::Parse {
                    input: s.to_string(),
                    reason: format!("invalid step character `{other}`"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_steps(steps))
    }
}

/// Path family selector for enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    /// Closed paths of length `2n` that never go below the axis.
    Dyck,
    /// All closed paths of length `2n`.
    Generalized,
    /// Mirror images of the Dyck paths: closed paths of length `2n`
    /// that never go above the axis.
    ReflectedDyck,
    /// Dyck paths with exactly `k` down steps ending on the axis.
    DyckWithReturns(usize),
}

/// Weight-polynomial selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Over all closed paths.
    W,
    /// Over paths on or above the axis.
    A,
    /// Over paths on or below the axis.
    B,
}

impl WeightKind {
    fn path_kind(self) -> PathKind {
        match self {
            WeightKind::W => PathKind::Generalized,
            WeightKind::A => PathKind::Dyck,
            WeightKind::B => PathKind::ReflectedDyck,
        }
    }
}

struct PathSearch<'a, F> {
    kind: PathKind,
    steps: Vec<Step>,
    visit: &'a mut F,
}

impl<F: FnMut(&[Step])> PathSearch<'_, F> {
    /// Depth-first search in lexicographic order with `Up < Down`,
    /// pruning branches that cannot return to the axis in the remaining
    /// steps.
    fn descend(&mut self, height: i64, remaining: usize, returns: usize) {
        if remaining == 0 {
            (self.visit)(&self.steps);
            return;
        }
        let remaining = remaining - 1;
        if self.feasible(height + 1, remaining, returns) {
            self.steps.push(Step::Up);
            self.descend(height + 1, remaining, returns);
            self.steps.pop();
        }
        let returns = returns + usize::from(height == 1);
        if self.feasible(height - 1, remaining, returns) {
            self.steps.push(Step::Down);
            self.descend(height - 1, remaining, returns);
            self.steps.pop();
        }
    }

    fn feasible(&self, height: i64, remaining: usize, returns: usize) -> bool {
        if height.unsigned_abs() as usize > remaining {
            return false;
        }
        match self.kind {
            PathKind::Generalized => true,
            PathKind::Dyck => height >= 0,
            PathKind::ReflectedDyck => height <= 0,
            PathKind::DyckWithReturns(k) => {
                if height < 0 || returns > k {
                    return false;
                }
                let slack = remaining - height as usize;
                let max_extra = slack / 2 + usize::from(height > 0);
                returns + max_extra >= k
            }
        }
    }
}

/// Visits every path of the family in lexicographic step order without
/// materializing the list. The closure receives the step slice of each
/// path; all paths start at ordinate zero.
pub fn for_each_path<F: FnMut(&[Step])>(
    kind: PathKind,
    n: usize,
    cap: usize,
    mut visit: F,
) -> Result<(), CapError> {
    check_cap("enumeration", n, cap)?;
    let mut search = PathSearch {
        kind,
        steps: Vec::with_capacity(2 * n),
        visit: &mut visit,
    };
    search.descend(0, 2 * n, 0);
    Ok(())
}

/// Materializes the path family in lexicographic step order, under the
/// default enumeration cap.
pub fn enumerate_paths(kind: PathKind, n: usize) -> Result<Vec<LatticePath>, CapError> {
    enumerate_paths_with_cap(kind, n, DEFAULT_ENUMERATION_CAP)
}

/// [`enumerate_paths`] with an explicit cap override.
pub fn enumerate_paths_with_cap(
    kind: PathKind,
    n: usize,
    cap: usize,
) -> Result<Vec<LatticePath>, CapError> {
    let mut paths = Vec::new();
    for_each_path(kind, n, cap, |steps| {
        paths.push(LatticePath::from_steps(steps.to_vec()));
    })?;
    Ok(paths)
}

/// Number of paths in the family, by exhaustive enumeration.
pub fn count_paths(kind: PathKind, n: usize) -> Result<u128, CapError> {
    count_paths_with_cap(kind, n, DEFAULT_ENUMERATION_CAP)
}

/// [`count_paths`] with an explicit cap override.
pub fn count_paths_with_cap(kind: PathKind, n: usize, cap: usize) -> Result<u128, CapError> {
    let mut count = 0u128;
    for_each_path(kind, n, cap, |_| count += 1)?;
    Ok(count)
}

/// Weight polynomial of the family, by exhaustive enumeration under the
/// default cap.
pub fn weight_polynomial(kind: WeightKind, n: usize) -> Result<Poly, CapError> {
    weight_polynomial_with_cap(kind, n, DEFAULT_ENUMERATION_CAP)
}

/// [`weight_polynomial`] with an explicit cap override.
pub fn weight_polynomial_with_cap(
    kind: WeightKind,
    n: usize,
    cap: usize,
) -> Result<Poly, CapError> {
    let mut terms: Vec<(Monomial, Rat)> = Vec::new();
    for_each_path(kind.path_kind(), n, cap, |steps| {
        terms.push((weight_of_steps(0, steps), Rat::one()));
    })?;
    Ok(Poly::from_terms(terms))
}

/// Visits every path of length `len` from `(0, start)` back to ordinate
/// `start` whose ordinates all stay within `[lo, hi]`, in lexicographic
/// step order.
pub fn for_each_strip_path<F: FnMut(&[Step])>(
    start: i64,
    len: usize,
    lo: i64,
    hi: i64,
    mut visit: F,
) {
    fn descend<F: FnMut(&[Step])>(
        steps: &mut Vec<Step>,
        height: i64,
        remaining: usize,
        target: i64,
        lo: i64,
        hi: i64,
        visit: &mut F,
    ) {
        if remaining == 0 {
            visit(steps);
            return;
        }
        let remaining = remaining - 1;
        for step in [Step::Up, Step::Down] {
            let next = height + step.delta();
            if next < lo || next > hi {
                continue;
            }
            if (next - target).unsigned_abs() as usize > remaining {
                continue;
            }
            steps.push(step);
            descend(steps, next, remaining, target, lo, hi, visit);
            steps.pop();
        }
    }

    if start < lo || start > hi {
        return;
    }
    let mut steps = Vec::with_capacity(len);
    descend(&mut steps, start, len, start, lo, hi, &mut visit);
}

/// A composition: a possibly empty tuple of positive parts. The empty
/// composition is the unique element of the size-zero family.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Composition(Vec<u32>);

impl Composition {
    /// The empty composition.
    #[must_use]
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a composition from its parts.
    ///
    /// # Panics
    ///
    /// Panics if any part is zero.
    #[must_use]
    pub fn new(parts: impl Into<Vec<u32>>) -> Self {
        let parts = parts.into();
        assert!(
            parts.iter().all(|&p| p > 0),
            "composition parts must be positive"
        );
        Self(parts)
    }

    #[must_use]
    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Sum of the parts; zero for the empty composition.
    #[must_use]
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    #[must_use]
    pub fn first(&self) -> Option<u32> {
        self.0.first().copied()
    }

    /// The monomial `a0^{n_0} * a1^{n_1} * ...` with parts as exponents
    /// in position order.
    #[must_use]
    pub fn monomial_a(&self) -> Monomial {
        Monomial::from_powers(
            self.0
                .iter()
                .enumerate()
                .map(|(j, &p)| (SymbolId::a(j as u32), p)),
        )
    }

    /// The monomial `b0^{n_0} * b1^{n_1} * ...`.
    #[must_use]
    pub fn monomial_b(&self) -> Monomial {
        Monomial::from_powers(
            self.0
                .iter()
                .enumerate()
                .map(|(j, &p)| (SymbolId::b(j as u32), p)),
        )
    }

    /// The monomial `m{n_0} * m{n_1} * ...` with parts as moment indices.
    #[must_use]
    pub fn monomial_m(&self) -> Monomial {
        Monomial::from_powers(self.0.iter().map(|&p| (SymbolId::m(p), 1)))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "e");
        }
        write!(f, "(")?;
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{part}")?;
        }
        write!(f, ")")
    }
}

/// All compositions of `n`, in ascending order of the separator bitmask:
/// bit `j` of the mask splits between positions `j` and `j + 1`, so the
/// single-part composition comes first and the all-ones composition
/// last. There are `2^{n-1}` of them for `n >= 1`, and exactly the empty
/// composition for `n = 0`.
#[must_use]
pub fn compositions(n: usize) -> Vec<Composition> {
    if n == 0 {
        return vec![Composition::empty()];
    }
    let mut out = Vec::with_capacity(1 << (n - 1));
    for mask in 0u64..(1 << (n - 1)) {
        let mut parts = Vec::new();
        let mut run = 1u32;
        for bit in 0..(n - 1) {
            if mask & (1 << bit) != 0 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        out.push(Composition(parts));
    }
    out
}

/// All pairs from the split families: for `j = 0..=n`, every composition
/// of `j` paired with every composition of `n - j`, in that nested order.
#[must_use]
pub fn comp_pairs(n: usize) -> Vec<(Composition, Composition)> {
    let mut out = Vec::new();
    for j in 0..=n {
        let left = compositions(j);
        let right = compositions(n - j);
        for p in &left {
            for q in &right {
                out.push((p.clone(), q.clone()));
            }
        }
    }
    out
}

/// Binomial coefficient extended by the convention `binom(n, -1) =
/// delta(n, -1)`; any other negative `k` gives zero. Negative `n` with
/// `k >= 0` does not arise in this crate and gives zero.
#[must_use]
pub fn binom_ext(n: i64, k: i64) -> BigInt {
    match k {
        -1 => BigInt::from(i32::from(n == -1)),
        _ if k < -1 => BigInt::zero(),
        _ => {
            if n < 0 || n < k {
                BigInt::zero()
            } else {
                num::integer::binomial(BigInt::from(n), BigInt::from(k))
            }
        }
    }
}

/// Number of paths of length `2n` on or above the axis.
#[must_use]
pub fn catalan(n: usize) -> BigInt {
    central_binomial(n) / BigInt::from(n as u64 + 1)
}

/// Number of closed paths of length `2n`.
#[must_use]
pub fn central_binomial(n: usize) -> BigInt {
    binom_ext(2 * n as i64, n as i64)
}

/// Product of adjacent-part binomials: for parts `(n_0, ..., n_r)`, the
/// product over `j < r` of `binom(n_j + n_{j+1} - 1, n_j - 1)`; one for
/// the empty and the single-part composition.
#[must_use]
pub fn rho1(c: &Composition) -> Rat {
    let parts = c.parts();
    let mut value = BigInt::one();
    for pair in parts.windows(2) {
        let (p, q) = (i64::from(pair[0]), i64::from(pair[1]));
        value *= binom_ext(p + q - 1, p - 1);
    }
    Rat::from_integer(value)
}

/// Pair weight: `binom(p_0 + q_0, p_0) * rho1(p) * rho1(q)` when both
/// sides are nonempty, and `rho1` of the nonempty side otherwise.
#[must_use]
pub fn rho2(pair: &(Composition, Composition)) -> Rat {
    let (p, q) = pair;
    match (p.first(), q.first()) {
        (Some(p0), Some(q0)) => {
            let join = binom_ext(i64::from(p0 + q0), i64::from(p0));
            Rat::from_integer(join) * rho1(p) * rho1(q)
        }
        (Some(_), None) => rho1(p),
        (None, _) => rho1(q),
    }
}

/// Closed-form selector for the weight polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// `A_n` as a composition sum weighted by [`rho1`].
    FlajoletA,
    /// `B_n` as the same sum in the `b` variables.
    FlajoletB,
    /// `W_n` as a sum over composition pairs weighted by [`rho2`].
    TheoremW,
    /// `A_n` as nested sums with unit coefficients.
    TouchardA,
    /// `W_n` as nested sums over signed indices with unit coefficients.
    NestedW,
    /// `A_n` with variables shifted up by `k`.
    ShiftedA(u32),
    /// `B_n` with variables shifted up by `k`.
    ShiftedB(u32),
    /// The weight polynomial of the paths on or above the axis with
    /// exactly `k` down steps ending on the axis.
    ReturnsA(u32),
}

/// Evaluates the selected closed form exactly, under the closed-form cap.
pub fn closed_form(kind: ClosedForm, n: usize) -> Result<Poly, CapError> {
    check_cap("closed-form", n, CLOSED_FORM_CAP)?;
    Ok(match kind {
        ClosedForm::FlajoletA => composition_sum(n, Composition::monomial_a),
        ClosedForm::FlajoletB => composition_sum(n, Composition::monomial_b),
        ClosedForm::TheoremW => Poly::from_terms(comp_pairs(n).iter().map(|pair| {
            let mono = pair.0.monomial_a().mul(&pair.1.monomial_b());
            (mono, rho2(pair))
        })),
        ClosedForm::TouchardA => nested_sum(n, |prev, _| match prev {
            None => (0, 0),
            Some(p) => (0, p + 1),
        }),
        ClosedForm::NestedW => nested_sum(n, |prev, depth| {
            let hi = n as i64 - 1 - depth as i64;
            match prev {
                None => (-1, hi),
                Some(p) => (p - 1, hi),
            }
        }),
        ClosedForm::ShiftedA(k) => shift_family(&closed_form(ClosedForm::FlajoletA, n)?, k),
        ClosedForm::ShiftedB(k) => shift_family(&closed_form(ClosedForm::FlajoletB, n)?, k),
        ClosedForm::ReturnsA(k) => returns_poly(n, k),
    })
}

fn composition_sum(n: usize, monomial: impl Fn(&Composition) -> Monomial) -> Poly {
    Poly::from_terms(
        compositions(n)
            .iter()
            .map(|c| (monomial(c), rho1(c))),
    )
}

/// Expands `sum prod_j a_{i_j}` over index tuples, where the inclusive
/// range of the index at `depth` (counted from zero) is given by
/// `bounds(previous index, depth)`. Negative indices map to the `b`
/// family, like down steps below the axis.
fn nested_sum(n: usize, bounds: impl Fn(Option<i64>, usize) -> (i64, i64)) -> Poly {
    fn descend(
        depth: usize,
        n: usize,
        prev: Option<i64>,
        chosen: &mut Vec<i64>,
        bounds: &impl Fn(Option<i64>, usize) -> (i64, i64),
        terms: &mut Vec<(Monomial, Rat)>,
    ) {
        if depth == n {
            let mono = Monomial::from_powers(chosen.iter().map(|&i| (down_step_symbol(i), 1)));
            terms.push((mono, Rat::one()));
            return;
        }
        let (lo, hi) = bounds(prev, depth);
        for i in lo..=hi {
            chosen.push(i);
            descend(depth + 1, n, Some(i), chosen, bounds, terms);
            chosen.pop();
        }
    }

    let mut terms = Vec::new();
    let mut chosen = Vec::new();
    descend(0, n, None, &mut chosen, &bounds, &mut terms);
    Poly::from_terms(terms)
}

fn shift_family(poly: &Poly, k: u32) -> Poly {
    poly.rename_symbols(|id| SymbolId::new(id.family, id.index + k))
}

/// `a0^k` times the sum over compositions `(n_1, ..., n_r)` of `n - k`
/// of `binom(k + n_1 - 1, k - 1)` times the adjacent-part binomials,
/// with variables `a1, ..., ar` in position order. The extended binomial
/// convention makes the `k = 0` term vanish for `n > 0`.
fn returns_poly(n: usize, k: u32) -> Poly {
    if (k as usize) > n {
        return Poly::zero();
    }
    let a0_k = Monomial::from_powers([(SymbolId::a(0), k)]);
    Poly::from_terms(compositions(n - k as usize).iter().map(|c| {
        let coeff = if c.is_empty() {
            Rat::one()
        } else {
            let n1 = i64::from(c.parts()[0]);
            let head = binom_ext(i64::from(k) + n1 - 1, i64::from(k) - 1);
            Rat::from_integer(head) * rho1(c)
        };
        let tail = Monomial::from_powers(
            c.parts()
                .iter()
                .enumerate()
                .map(|(j, &p)| (SymbolId::a(j as u32 + 1), p)),
        );
        (a0_k.mul(&tail), coeff)
    }))
}
