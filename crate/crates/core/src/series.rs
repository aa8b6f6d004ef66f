//! Truncated formal Laurent series in `1/z` with polynomial
//! coefficients.
//!
//! A series stores the coefficient of `z^-n` keyed by `n` together with
//! a truncation order `N`: coefficients at exponents above `N` are
//! unknown, not zero. Every operation tracks the order pessimistically,
//! so a coefficient is reported only when it is provably correct.

use std::collections::BTreeMap;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{self, CapError, ClosedForm, WeightKind};
use crate::moments;
use crate::polycore::{rat_int, Poly, Rat, SymbolId};

/// Errors from series construction and coefficient extraction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    /// A coefficient beyond the provable truncation order was requested.
    #[error("coefficient at z^-{exponent} is beyond the provable order {order}")]
    OrderExceeded { exponent: i64, order: i64 },
    /// The series does not consist of odd negative powers only.
    #[error("series is not in odd form: nonzero coefficient at z^-{exponent}")]
    MalformedParity { exponent: i64 },
    /// The leading coefficient is not a nonzero rational constant.
    #[error("series has no invertible leading coefficient")]
    NonInvertible,
    /// An underlying enumeration exceeded its cap.
    #[error(transparent)]
    Cap(#[from] CapError),
}

/// A truncated formal Laurent series `sum_n c_n z^-n`.
///
/// Negative keys are positive powers of `z`; the polynomial `z` itself
/// is the single coefficient one at key `-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, Poly>,
    truncation_order: i64,
}

impl LaurentSeries {
    /// The zero series, known up to `order`.
    #[must_use]
    pub fn zero(order: i64) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            truncation_order: order,
        }
    }

    /// The unit series `1`, known up to `order`.
    #[must_use]
    pub fn unit(order: i64) -> Self {
        let mut s = Self::zero(order);
        s.set_coeff(0, Poly::one());
        s
    }

    /// The series `z`, known up to `order`.
    #[must_use]
    pub fn z(order: i64) -> Self {
        let mut s = Self::zero(order);
        s.set_coeff(-1, Poly::one());
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs; pairs above
    /// `order` are dropped as unknowable.
    #[must_use]
    pub fn from_coeffs<I>(pairs: I, order: i64) -> Self
    where
        I: IntoIterator<Item = (i64, Poly)>,
    {
        let mut s = Self::zero(order);
        for (n, p) in pairs {
            if n <= order {
                s.set_coeff(n, p);
            }
        }
        s
    }

    fn set_coeff(&mut self, n: i64, p: Poly) {
        debug_assert!(n <= self.truncation_order);
        if p.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, p);
        }
    }

    #[must_use]
    pub fn truncation_order(&self) -> i64 {
        self.truncation_order
    }

    /// The provable coefficient of `z^-n`.
    pub fn coeff(&self, n: i64) -> Result<Poly, SeriesError> {
        if n > self.truncation_order {
            return Err(SeriesError::OrderExceeded {
                exponent: n,
                order: self.truncation_order,
            });
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_else(Poly::zero))
    }

    /// Exponents with nonzero coefficients, ascending.
    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    /// Smallest exponent with a nonzero coefficient, `None` when the
    /// series is zero as far as it is known.
    #[must_use]
    pub fn leading_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Whether every known coefficient is zero.
    #[must_use]
    pub fn is_zero_up_to_order(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Reduces the truncation order, discarding coefficients above it.
    #[must_use]
    pub fn truncated(&self, order: i64) -> Self {
        let order = order.min(self.truncation_order);
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&n, _)| n <= order)
                .map(|(&n, p)| (n, p.clone()))
                .collect(),
            truncation_order: order,
        }
    }

    /// Multiplies by `z^-delta`, shifting every exponent and the order.
    #[must_use]
    pub fn shifted(&self, delta: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&n, p)| (n + delta, p.clone())).collect(),
            truncation_order: self.truncation_order + delta,
        }
    }

    /// Multiplies every coefficient by a `z`-independent polynomial.
    #[must_use]
    pub fn scaled(&self, factor: &Poly) -> Self {
        Self::from_coeffs(
            self.coeffs.iter().map(|(&n, p)| (n, p * factor)),
            self.truncation_order,
        )
    }

    #[must_use]
    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.truncation_order.min(rhs.truncation_order);
        let mut out = self.truncated(order);
        for (&n, p) in &rhs.coeffs {
            if n <= order {
                let sum = &out.coeff(n).unwrap() + p;
                out.set_coeff(n, sum);
            }
        }
        out
    }

    #[must_use]
    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    #[must_use]
    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&n, p)| (n, -p)).collect(),
            truncation_order: self.truncation_order,
        }
    }

    /// Product with pessimistic order tracking: orders `N1, N2` and
    /// leading exponents `d1, d2` give order `min(N1 + d2, N2 + d1)`; a
    /// factor with no known nonzero coefficient counts `d = N + 1`.
    #[must_use]
    pub fn mul(&self, rhs: &Self) -> Self {
        let d1 = self.leading_exponent().unwrap_or(self.truncation_order + 1);
        let d2 = rhs.leading_exponent().unwrap_or(rhs.truncation_order + 1);
        let order = (self.truncation_order + d2).min(rhs.truncation_order + d1);
        let mut out = Self::zero(order);
        for (&n1, p1) in &self.coeffs {
            for (&n2, p2) in &rhs.coeffs {
                let n = n1 + n2;
                if n <= order {
                    let sum = &out.coeff(n).unwrap() + &(p1 * p2);
                    out.set_coeff(n, sum);
                }
            }
        }
        out
    }

    /// `k`-th power by repeated truncated multiplication; `k = 0` gives
    /// the unit series at this series' order.
    #[must_use]
    pub fn power(&self, k: u32) -> Self {
        let mut out = Self::unit(self.truncation_order);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Checks the odd form `sum_{n>=0} s_n z^-(2n+1)`: every known
    /// nonzero coefficient sits at a positive odd exponent.
    pub fn check_odd_form(&self) -> Result<(), SeriesError> {
        match self.coeffs.keys().find(|&&n| n < 1 || n % 2 == 0) {
            Some(&n) => Err(SeriesError::MalformedParity { exponent: n }),
            None => Ok(()),
        }
    }

    /// Multiplicative inverse, requiring the leading coefficient to be a
    /// nonzero rational constant. The result is provable to order
    /// `N - 2d` where `d` is the leading exponent.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let d = self.leading_exponent().ok_or(SeriesError::NonInvertible)?;
        let lead = self.coeffs[&d]
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or(SeriesError::NonInvertible)?;
        let inv_lead = Poly::constant(Rat::one() / lead);
        let tail_order = self.truncation_order - d;
        let tail = Self::from_coeffs(
            self.coeffs
                .iter()
                .filter(|(&n, _)| n > d)
                .map(|(&n, p)| (n - d, p * &inv_lead)),
            tail_order,
        );
        let mut acc = Self::unit(tail_order);
        let mut power = Self::unit(tail_order);
        let neg_tail = tail.neg();
        while let Some(lead) = {
            power = power.mul(&neg_tail);
            power.leading_exponent()
        } {
            if lead > tail_order {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc.shifted(-d).scaled(&inv_lead))
    }

    /// JSON rendering: the truncation order plus the nonzero
    /// coefficients as ordered `(exponent, polynomial)` pairs.
    #[must_use]
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("series serialization cannot fail")
    }
}

impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct CoeffRepr {
            exponent: i64,
            poly: Poly,
        }
        let coefficients: Vec<CoeffRepr> = self
            .coeffs
            .iter()
            .map(|(&n, p)| CoeffRepr {
                exponent: n,
                poly: p.clone(),
            })
            .collect();
        let mut state = serializer.serialize_struct("LaurentSeries", 2)?;
        state.serialize_field("truncation_order", &self.truncation_order)?;
        state.serialize_field("coefficients", &coefficients)?;
        state.end()
    }
}

/// The reciprocal `R = 1 / (z - S)` of an odd-form series, via the
/// coefficient recurrence `r_0 = 1`, `r_n = sum_{k<n} s_k r_{n-k-1}`.
/// Knowing `s_0..s_K` determines `r_0..r_{K+1}`, so the result's order
/// exceeds the input's by two.
pub fn reciprocal_z_minus(s: &LaurentSeries) -> Result<LaurentSeries, SeriesError> {
    s.check_odd_form()?;
    let known = ((s.truncation_order() - 1).div_euclid(2)).max(-1);
    let mut r: Vec<Poly> = Vec::new();
    for n in 0..=(known + 1) {
        if n == 0 {
            r.push(Poly::one());
            continue;
        }
        let mut total = Poly::zero();
        for k in 0..n {
            let s_k = s.coeff(2 * k + 1).unwrap_or_else(|_| Poly::zero());
            total += &(&s_k * &r[(n - k - 1) as usize]);
        }
        r.push(total);
    }
    Ok(LaurentSeries::from_coeffs(
        r.into_iter()
            .enumerate()
            .map(|(n, p)| (2 * n as i64 + 1, p)),
        2 * (known + 1) + 1,
    ))
}

/// `[S^k]_idx`: the coefficient of `z^-idx` in the `k`-th power. The
/// zeroth power is exactly known at every index.
pub fn power_coefficient(s: &LaurentSeries, k: u32, idx: i64) -> Result<Poly, SeriesError> {
    if k == 0 {
        return Ok(if idx == 0 { Poly::one() } else { Poly::zero() });
    }
    s.power(k).coeff(idx)
}

/// Which standard series to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesKind {
    /// `sum_n W_n z^-(2n+1)` over all closed paths.
    W,
    /// `sum_n A_n^{(k)} z^-(2n+1)` over paths above the axis, variables
    /// shifted by `k`.
    A(u32),
    /// `sum_n B_n^{(k)} z^-(2n+1)` below the axis.
    B(u32),
    /// `sum_n alpha_n^{(k)} z^-(2n+k)`; the `k = 0` case is the unit.
    G(u32),
    /// `sum_n omega_n z^-(2n+1)`.
    F,
    /// Odd form `sum_n s_n z^-(2n+1)` with the given coefficients.
    Custom(Vec<Poly>),
}

/// How to obtain the coefficients of a standard series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffSource {
    /// Exhaustive path enumeration (expectations of it for `G`/`F`).
    Enumeration,
    /// The composition closed forms.
    ClosedForm,
}

/// Builds a standard series with all coefficients provable up to
/// `order`.
pub fn series_from(
    kind: &SeriesKind,
    order: i64,
    source: CoeffSource,
) -> Result<LaurentSeries, SeriesError> {
    let odd_indices = |order: i64| (0..).take_while(move |n| 2 * n < order);
    let series = match kind {
        SeriesKind::W => LaurentSeries::from_coeffs(
            odd_indices(order)
                .map(|n| Ok((2 * n + 1, weight_poly(WeightKind::W, n as usize, source)?)))
                .collect::<Result<Vec<_>, SeriesError>>()?,
            order,
        ),
        SeriesKind::A(k) => shifted_family(WeightKind::A, *k, order, source)?,
        SeriesKind::B(k) => shifted_family(WeightKind::B, *k, order, source)?,
        SeriesKind::G(k) => {
            let k = *k;
            let pairs = (0..)
                .take_while(|n| 2 * n + i64::from(k) <= order)
                .map(|n| {
                    let coeff = moments::alpha_k_from(n as usize, k, source)?;
                    Ok((2 * n + i64::from(k), coeff))
                })
                .collect::<Result<Vec<_>, SeriesError>>()?;
            LaurentSeries::from_coeffs(pairs, order)
        }
        SeriesKind::F => LaurentSeries::from_coeffs(
            odd_indices(order)
                .map(|n| Ok((2 * n + 1, moments::omega_from(n as usize, source)?)))
                .collect::<Result<Vec<_>, SeriesError>>()?,
            order,
        ),
        SeriesKind::Custom(coeffs) => LaurentSeries::from_coeffs(
            coeffs
                .iter()
                .enumerate()
                .map(|(n, p)| (2 * n as i64 + 1, p.clone())),
            order,
        ),
    };
    Ok(series)
}

fn weight_poly(kind: WeightKind, n: usize, source: CoeffSource) -> Result<Poly, SeriesError> {
    let poly = match source {
        CoeffSource::Enumeration => lattice::weight_polynomial(kind, n)?,
        CoeffSource::ClosedForm => {
            let form = match kind {
                WeightKind::W => ClosedForm::TheoremW,
                WeightKind::A => ClosedForm::FlajoletA,
                WeightKind::B => ClosedForm::FlajoletB,
            };
            lattice::closed_form(form, n)?
        }
    };
    Ok(poly)
}

fn shifted_family(
    kind: WeightKind,
    k: u32,
    order: i64,
    source: CoeffSource,
) -> Result<LaurentSeries, SeriesError> {
    let pairs = (0..)
        .take_while(|n| 2 * n < order)
        .map(|n| {
            let base = weight_poly(kind, n as usize, source)?;
            let shifted = base.rename_symbols(|id| SymbolId::new(id.family, id.index + k));
            Ok((2 * n + 1, shifted))
        })
        .collect::<Result<Vec<_>, SeriesError>>()?;
    Ok(LaurentSeries::from_coeffs(pairs, order))
}

/// A coefficient where two routes disagreed.
#[derive(Debug, Clone, Serialize)]
pub struct CoeffMismatch {
    pub exponent: i64,
    pub lhs: Poly,
    pub rhs: Poly,
}

/// Outcome of a relation check: per-coefficient exact comparison of two
/// independently computed series.
#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub relation: String,
    pub order: i64,
    pub coefficients_checked: usize,
    pub mismatches: Vec<CoeffMismatch>,
}

impl RelationReport {
    #[must_use]
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn compare_series(
    relation: impl Into<String>,
    lhs: &LaurentSeries,
    rhs: &LaurentSeries,
    upto: i64,
) -> RelationReport {
    let floor = lhs
        .leading_exponent()
        .into_iter()
        .chain(rhs.leading_exponent())
        .min()
        .unwrap_or(1)
        .min(1);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for n in floor..=upto {
        let l = lhs.coeff(n).expect("lhs order insufficient for comparison");
        let r = rhs.coeff(n).expect("rhs order insufficient for comparison");
        checked += 1;
        if l != r {
            mismatches.push(CoeffMismatch {
                exponent: n,
                lhs: l,
                rhs: r,
            });
        }
    }
    RelationReport {
        relation: relation.into(),
        order: upto,
        coefficients_checked: checked,
        mismatches,
    }
}

fn merge_reports(relation: impl Into<String>, parts: Vec<RelationReport>) -> RelationReport {
    let order = parts.iter().map(|r| r.order).max().unwrap_or(0);
    RelationReport {
        relation: relation.into(),
        order,
        coefficients_checked: parts.iter().map(|r| r.coefficients_checked).sum(),
        mismatches: parts.into_iter().flat_map(|r| r.mismatches).collect(),
    }
}

/// The verifiable series relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationId {
    /// The full series over closed paths equals the reciprocal built
    /// from the two one-sided series.
    Decoupling,
    /// Each one-sided series equals the reciprocal built from its shift
    /// by one, `a` side.
    ChainA,
    /// Same on the `b` side.
    ChainB,
    /// The closed-path series as the harmonic-style combination of the
    /// two one-sided series.
    Harmonic,
    /// The continued-fraction unrolling of the `a`-side chain to the
    /// given depth.
    ContFrac(u32),
    /// The reciprocal coefficients as sums of power coefficients, on a
    /// seeded random series and on the shifted one-sided series.
    LemmaRk,
    /// Power coefficients of the reciprocal as binomial-weighted sums of
    /// power coefficients of the input, seeded random.
    LemmaPowersR,
}

const LEMMA_SEED: u64 = 0x6d6f_6d5f_7365 /* "mom_se" */;

/// Deterministic pseudo-random odd-form series for the lemma checks:
/// small integer-coefficient polynomials in a handful of variables.
fn random_odd_series(len: usize, order: i64, rng: &mut ChaCha8Rng) -> LaurentSeries {
    let vars = [
        SymbolId::a(0),
        SymbolId::a(1),
        SymbolId::b(0),
        SymbolId::b(1),
    ];
    let coeffs: Vec<Poly> = (0..len)
        .map(|_| {
            let mut poly = Poly::constant(rat_int(rng.random_range(-3..=3)));
            for _ in 0..rng.random_range(1..=2) {
                let var = vars[rng.random_range(0..vars.len())];
                let c = rat_int(rng.random_range(-3..=3));
                poly += &Poly::symbol(var).scale(&c);
            }
            poly
        })
        .collect();
    LaurentSeries::from_coeffs(
        coeffs
            .into_iter()
            .enumerate()
            .map(|(n, p)| (2 * n as i64 + 1, p)),
        order,
    )
}

/// Verifies the selected relation with both sides computed through
/// independent routes, comparing every coefficient up to order `N`.
pub fn verify_relation(id: RelationId, n_order: i64) -> Result<RelationReport, SeriesError> {
    match id {
        RelationId::Decoupling => {
            let lhs = series_from(&SeriesKind::W, n_order, CoeffSource::Enumeration)?;
            let a1 = series_from(&SeriesKind::A(1), n_order, CoeffSource::ClosedForm)?
                .scaled(&Poly::symbol(SymbolId::a(0)));
            let b1 = series_from(&SeriesKind::B(1), n_order, CoeffSource::ClosedForm)?
                .scaled(&Poly::symbol(SymbolId::b(0)));
            let rhs = reciprocal_z_minus(&a1.add(&b1))?;
            Ok(compare_series("decoupling", &lhs, &rhs, n_order))
        }
        RelationId::ChainA => chain_relation(WeightKind::A, "chain_A", n_order),
        RelationId::ChainB => chain_relation(WeightKind::B, "chain_B", n_order),
        RelationId::Harmonic => {
            let w = series_from(&SeriesKind::W, n_order, CoeffSource::Enumeration)?;
            let a = series_from(&SeriesKind::A(0), n_order + 4, CoeffSource::ClosedForm)?;
            let b = series_from(&SeriesKind::B(0), n_order + 4, CoeffSource::ClosedForm)?;
            let combined = a
                .inverse()?
                .add(&b.inverse()?)
                .sub(&LaurentSeries::z(n_order + 2));
            let rhs = combined.inverse()?;
            Ok(compare_series("harmonic", &w, &rhs, n_order))
        }
        RelationId::ContFrac(depth) => {
            let depth = depth.max(1);
            let mut tail =
                series_from(&SeriesKind::A(depth), n_order, CoeffSource::ClosedForm)?;
            for j in (0..depth).rev() {
                tail = reciprocal_z_minus(&tail.scaled(&Poly::symbol(SymbolId::a(j))))?;
            }
            let lhs = series_from(&SeriesKind::A(0), n_order, CoeffSource::Enumeration)?;
            Ok(compare_series(
                format!("contfrac(depth={depth})"),
                &lhs,
                &tail,
                n_order,
            ))
        }
        RelationId::LemmaRk => {
            let mut rng = ChaCha8Rng::seed_from_u64(LEMMA_SEED);
            let mut parts = Vec::new();
            let len = ((n_order - 1) / 2 + 1).max(1) as usize;
            let random = random_odd_series(len, n_order, &mut rng);
            parts.push(lemma_rk_on(&random, "random", n_order)?);
            let shifted = series_from(&SeriesKind::A(1), n_order, CoeffSource::ClosedForm)?
                .scaled(&Poly::symbol(SymbolId::a(0)));
            parts.push(lemma_rk_on(&shifted, "one-sided", n_order)?);
            Ok(merge_reports("lemma_rk", parts))
        }
        RelationId::LemmaPowersR => {
            let mut rng = ChaCha8Rng::seed_from_u64(LEMMA_SEED ^ 1);
            let len = ((n_order - 1) / 2 + 1).max(1) as usize;
            let s = random_odd_series(len, n_order, &mut rng);
            let r = reciprocal_z_minus(&s)?;
            let m_max = (n_order - 1) / 2;
            let mut checked = 0;
            let mut mismatches = Vec::new();
            for k in 1i64..=4 {
                for m in 0..=m_max.min(5) {
                    if 2 * m + k > r.power(k as u32).truncation_order() {
                        continue;
                    }
                    let lhs = power_coefficient(&r, k as u32, 2 * m + k)?;
                    let mut rhs = Poly::zero();
                    for n in 0..=m {
                        let factor = lattice::binom_ext(n + k - 1, k - 1);
                        let coeff = power_coefficient(&s, n as u32, 2 * m - n)?;
                        rhs += &coeff.scale(&Rat::from_integer(factor));
                    }
                    checked += 1;
                    if lhs != rhs {
                        mismatches.push(CoeffMismatch {
                            exponent: 2 * m + k,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
            Ok(RelationReport {
                relation: "lemma_powers_r".to_string(),
                order: n_order,
                coefficients_checked: checked,
                mismatches,
            })
        }
    }
}

fn chain_relation(
    kind: WeightKind,
    name: &str,
    n_order: i64,
) -> Result<RelationReport, SeriesError> {
    let mut parts = Vec::new();
    for k in 0..=3u32 {
        let series_kind = match kind {
            WeightKind::A => SeriesKind::A(k),
            WeightKind::B => SeriesKind::B(k),
            WeightKind::W => unreachable!("chain relations are one-sided"),
        };
        let next_kind = match kind {
            WeightKind::A => SeriesKind::A(k + 1),
            WeightKind::B => SeriesKind::B(k + 1),
            WeightKind::W => unreachable!(),
        };
        let var = match kind {
            WeightKind::A => SymbolId::a(k),
            WeightKind::B => SymbolId::b(k),
            WeightKind::W => unreachable!(),
        };
        let lhs = series_from(&series_kind, n_order, CoeffSource::Enumeration)?;
        let inner =
            series_from(&next_kind, n_order, CoeffSource::ClosedForm)?.scaled(&Poly::symbol(var));
        let rhs = reciprocal_z_minus(&inner)?;
        parts.push(compare_series(format!("{name}[k={k}]"), &lhs, &rhs, n_order));
    }
    Ok(merge_reports(name, parts))
}

fn lemma_rk_on(
    s: &LaurentSeries,
    label: &str,
    n_order: i64,
) -> Result<RelationReport, SeriesError> {
    let r = reciprocal_z_minus(s)?;
    let n_max = (n_order - 1) / 2;
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for n in 0..=n_max {
        let lhs = r.coeff(2 * n + 1)?;
        let mut rhs = Poly::zero();
        for k in 0..=n {
            rhs += &power_coefficient(s, k as u32, 2 * n - k)?;
        }
        checked += 1;
        if lhs != rhs {
            mismatches.push(CoeffMismatch {
                exponent: 2 * n + 1,
                lhs,
                rhs,
            });
        }
    }
    Ok(RelationReport {
        relation: format!("lemma_rk[{label}]"),
        order: n_order,
        coefficients_checked: checked,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn standard_series_fill_the_printed_coefficients() {
        let a = series_from(&SeriesKind::A(0), 5, CoeffSource::Enumeration).unwrap();
        assert_eq!(a.coeff(1).unwrap(), Poly::one());
        assert_eq!(a.coeff(3).unwrap(), p("a0"));
        assert_eq!(a.coeff(5).unwrap(), p("a0^2 + a0*a1"));
        assert_eq!(a.coeff(2).unwrap(), Poly::zero());
        assert!(a.coeff(7).is_err());
        let w = series_from(&SeriesKind::W, 3, CoeffSource::ClosedForm).unwrap();
        assert_eq!(w.coeff(3).unwrap(), p("a0 + b0"));
    }

    #[test]
    fn reciprocal_of_zero_is_one_over_z() {
        let r = reciprocal_z_minus(&LaurentSeries::zero(5)).unwrap();
        assert_eq!(r.coeff(1).unwrap(), Poly::one());
        assert_eq!(r.coeff(3).unwrap(), Poly::zero());
        assert_eq!(r.coeff(5).unwrap(), Poly::zero());
        assert_eq!(r.truncation_order(), 7);
    }

    #[test]
    fn reciprocal_recurrence_matches_hand_expansion() {
        let s = series_from(
            &SeriesKind::Custom(vec![p("a0"), p("b0")]),
            3,
            CoeffSource::ClosedForm,
        )
        .unwrap();
        let r = reciprocal_z_minus(&s).unwrap();
        assert_eq!(r.coeff(1).unwrap(), Poly::one());
        assert_eq!(r.coeff(3).unwrap(), p("a0"));
        assert_eq!(r.coeff(5).unwrap(), p("a0^2 + b0"));
        assert_eq!(r.truncation_order(), 5);
    }

    #[test]
    fn reciprocal_times_z_minus_s_is_one() {
        let s = series_from(
            &SeriesKind::Custom(vec![p("a0"), p("a1 + b0"), p("2*a0*b1")]),
            5,
            CoeffSource::ClosedForm,
        )
        .unwrap();
        let r = reciprocal_z_minus(&s).unwrap();
        let z_minus_s = LaurentSeries::z(5).sub(&s);
        let product = r.mul(&z_minus_s);
        assert_eq!(product.coeff(0).unwrap(), Poly::one());
        for n in 1..=product.truncation_order() {
            assert_eq!(product.coeff(n).unwrap(), Poly::zero(), "exponent {n}");
        }
    }

    #[test]
    fn reciprocal_rejects_even_exponents() {
        let mut s = LaurentSeries::zero(4);
        s.set_coeff(2, p("a0"));
        assert_eq!(
            reciprocal_z_minus(&s).unwrap_err(),
            SeriesError::MalformedParity { exponent: 2 }
        );
    }

    #[test]
    fn power_coefficients_match_hand_values() {
        let a = series_from(&SeriesKind::A(0), 7, CoeffSource::ClosedForm).unwrap();
        assert_eq!(power_coefficient(&a, 0, 0).unwrap(), Poly::one());
        assert_eq!(power_coefficient(&a, 0, 4).unwrap(), Poly::zero());
        assert_eq!(power_coefficient(&a, 1, 3).unwrap(), p("a0"));
        assert_eq!(power_coefficient(&a, 2, 2).unwrap(), Poly::one());
        let s = series_from(
            &SeriesKind::Custom(vec![p("a0"), p("b0")]),
            3,
            CoeffSource::ClosedForm,
        )
        .unwrap();
        assert_eq!(power_coefficient(&s, 2, 2).unwrap(), p("a0^2"));
        let err = power_coefficient(&s, 2, 40).unwrap_err();
        assert!(matches!(err, SeriesError::OrderExceeded { .. }));
    }

    #[test]
    fn multiplication_tracks_orders() {
        let a = series_from(&SeriesKind::A(0), 5, CoeffSource::ClosedForm).unwrap();
        let square = a.mul(&a);
        assert_eq!(square.truncation_order(), 6);
        assert_eq!(square.coeff(2).unwrap(), Poly::one());
        assert_eq!(square.coeff(4).unwrap(), p("2*a0"));
        let zero = LaurentSeries::zero(5);
        assert_eq!(zero.mul(&a).truncation_order(), 6);
    }

    #[test]
    fn inverse_agrees_with_multiplication() {
        let a = series_from(&SeriesKind::A(0), 9, CoeffSource::ClosedForm).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(inv.truncation_order(), 7);
        assert_eq!(inv.coeff(-1).unwrap(), Poly::one());
        let product = a.mul(&inv);
        assert_eq!(product.coeff(0).unwrap(), Poly::one());
        for n in 1..=product.truncation_order() {
            assert_eq!(product.coeff(n).unwrap(), Poly::zero());
        }
    }

    #[test]
    fn relations_hold_at_small_order() {
        for id in [
            RelationId::Decoupling,
            RelationId::ChainA,
            RelationId::ChainB,
            RelationId::Harmonic,
            RelationId::ContFrac(3),
            RelationId::LemmaRk,
            RelationId::LemmaPowersR,
        ] {
            let report = verify_relation(id, 9).unwrap();
            assert!(
                report.pass(),
                "{}: {:?}",
                report.relation,
                report.mismatches.first()
            );
            assert!(report.coefficients_checked > 0);
        }
    }

    #[test]
    fn series_json_lists_ordered_pairs() {
        let a = series_from(&SeriesKind::A(0), 3, CoeffSource::ClosedForm).unwrap();
        let json = a.to_json();
        assert_eq!(json["truncation_order"], 3);
        let coeffs = json["coefficients"].as_array().unwrap();
        assert_eq!(coeffs.len(), 2);
        assert_eq!(coeffs[0]["exponent"], 1);
        assert_eq!(coeffs[1]["exponent"], 3);
    }
}
