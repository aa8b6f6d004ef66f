//! Exact and Monte Carlo statistics of random tridiagonal matrices.
//!
//! The matrix of dimension `n` has a zero diagonal, ones on the
//! superdiagonal, and independent positive random variables on the
//! subdiagonal. Its powers are expanded exactly as weighted closed
//! walks confined to a strip, so diagonal entries of expected powers
//! are evaluated without any eigenvalue computation. An independent
//! Monte Carlo route estimates the same quantities from samples, and a
//! spectral route diagonalizes the symmetrized matrix to cross-check
//! the walk chain against its spectral measure.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Dyn, SymmetricEigen};
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{for_each_strip_path, CapError, LatticePath, DEFAULT_ENUMERATION_CAP};
use crate::moments;
use crate::polycore::{Family, Poly, PolyError, Rat, SymbolId};

/// Highest order for which exponential moments are served; the
/// factorial growth makes larger orders useless for the checks here.
pub const EXPONENTIAL_MOMENT_CAP: u32 = 20;

/// Errors for distribution handling and spectral checks.
#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("cannot parse distribution `{input}`: {reason}")]
    ParseDistribution { input: String, reason: String },
    #[error("{name} moments are available up to order {max}, requested {requested}")]
    MomentOrder {
        name: &'static str,
        max: u32,
        requested: u32,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("dimension {dim} is too small: {reason}")]
    Dimension { dim: usize, reason: String },
    #[error("row {row} is outside a matrix of dimension {dim}")]
    Row { row: usize, dim: usize },
    #[error("expected a moment symbol, found {0}")]
    NonMoment(SymbolId),
    #[error(transparent)]
    Cap(#[from] CapError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn rat_pow(base: &Rat, k: u32) -> Rat {
    let mut out = Rat::one();
    for _ in 0..k {
        out *= base;
    }
    out
}

fn parse_rat(text: &str) -> Result<Rat, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty number".to_string());
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let (negative, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !digits(frac) || !(whole.is_empty() || digits(whole)) {
            return Err(format!("`{t}` is not a decimal number"));
        }
        let whole_val: BigInt = if whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|e| format!("{e}"))?
        };
        let frac_val: BigInt = frac.parse().map_err(|e| format!("{e}"))?;
        let scale = num::pow(BigInt::from(10), frac.len());
        let numer = whole_val * &scale + frac_val;
        return Ok(Rat::new(if negative { -numer } else { numer }, scale));
    }
    Rat::from_str(t).map_err(|e| e.to_string())
}

/// A distribution on the positive half line for the subdiagonal
/// entries. Moments are exact rationals; samples are `f64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distribution {
    /// Point mass at `value > 0`.
    Constant { value: Rat },
    /// Uniform on `(0, upper)` with `upper > 0`.
    Uniform { upper: Rat },
    /// Exponential with rate `rate > 0`.
    Exponential { rate: Rat },
    /// Mass `weight` at `low` and `1 - weight` at `high`, with both
    /// atoms positive and `weight` in `[0, 1]`.
    TwoPoint { weight: Rat, low: Rat, high: Rat },
}

impl Distribution {
    pub fn constant(value: Rat) -> Result<Self, SpectraError> {
        let d = Distribution::Constant { value };
        d.validate()?;
        Ok(d)
    }

    pub fn uniform(upper: Rat) -> Result<Self, SpectraError> {
        let d = Distribution::Uniform { upper };
        d.validate()?;
        Ok(d)
    }

    pub fn exponential(rate: Rat) -> Result<Self, SpectraError> {
        let d = Distribution::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn two_point(weight: Rat, low: Rat, high: Rat) -> Result<Self, SpectraError> {
        let d = Distribution::TwoPoint { weight, low, high };
        d.validate()?;
        Ok(d)
    }

    #[must_use]
    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Constant { .. } => "constant",
            Distribution::Uniform { .. } => "uniform",
            Distribution::Exponential { .. } => "exponential",
            Distribution::TwoPoint { .. } => "two_point",
        }
    }

    /// Checks that the support lies in the open positive half line and
    /// that probabilities are probabilities.
    pub fn validate(&self) -> Result<(), SpectraError> {
        let positive = |value: &Rat, what: &str| {
            if value.is_positive() {
                Ok(())
            } else {
                Err(SpectraError::Parameter(format!(
                    "{what} must be positive, got {value}"
                )))
            }
        };
        match self {
            Distribution::Constant { value } => positive(value, "the constant value"),
            Distribution::Uniform { upper } => positive(upper, "the uniform upper bound"),
            Distribution::Exponential { rate } => positive(rate, "the exponential rate"),
            Distribution::TwoPoint { weight, low, high } => {
                positive(low, "the first atom")?;
                positive(high, "the second atom")?;
                if weight.is_negative() || weight > &Rat::one() {
                    return Err(SpectraError::Parameter(format!(
                        "the first atom's weight must lie in [0, 1], got {weight}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// The exact `k`-th moment.
    pub fn moment(&self, k: u32) -> Result<Rat, SpectraError> {
        if k == 0 {
            return Ok(Rat::one());
        }
        match self {
            Distribution::Constant { value } => Ok(rat_pow(value, k)),
            Distribution::Uniform { upper } => {
                Ok(rat_pow(upper, k) / Rat::from_integer(BigInt::from(k + 1)))
            }
            Distribution::Exponential { rate } => {
                if k > EXPONENTIAL_MOMENT_CAP {
                    return Err(SpectraError::MomentOrder {
                        name: "exponential",
                        max: EXPONENTIAL_MOMENT_CAP,
                        requested: k,
                    });
                }
                let factorial: BigInt = (1..=i64::from(k)).map(BigInt::from).product();
                Ok(Rat::from_integer(factorial) / rat_pow(rate, k))
            }
            Distribution::TwoPoint { weight, low, high } => {
                let complement = Rat::one() - weight;
                Ok(weight * rat_pow(low, k) + complement * rat_pow(high, k))
            }
        }
    }

    fn sampler(&self) -> Sampler {
        let f = |r: &Rat| r.to_f64().expect("validated parameters fit in f64");
        match self {
            Distribution::Constant { value } => Sampler::Constant(f(value)),
            Distribution::Uniform { upper } => Sampler::Uniform(f(upper)),
            Distribution::Exponential { rate } => Sampler::Exponential(f(rate)),
            Distribution::TwoPoint { weight, low, high } => Sampler::TwoPoint {
                weight: f(weight),
                low: f(low),
                high: f(high),
            },
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Constant { value } => write!(f, "constant:{value}"),
            Distribution::Uniform { upper } => write!(f, "uniform:{upper}"),
            Distribution::Exponential { rate } => write!(f, "exponential:{rate}"),
            Distribution::TwoPoint { weight, low, high } => {
                write!(f, "two_point:{weight},{low},{high}")
            }
        }
    }
}

impl FromStr for Distribution {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: String| SpectraError::ParseDistribution {
            input: s.to_string(),
            reason,
        };
        let (name, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected `name:parameters`".to_string()))?;
        let params: Vec<Rat> = rest
            .split(',')
            .map(|p| parse_rat(p).map_err(&bad))
            .collect::<Result<_, _>>()?;
        let arity = |want: usize| {
            if params.len() == want {
                Ok(())
            } else {
                Err(bad(format!(
                    "`{name}` takes {want} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let dist = match name.trim() {
            "constant" => {
                arity(1)?;
                Distribution::Constant {
                    value: params[0].clone(),
                }
            }
            "uniform" => {
                arity(1)?;
                Distribution::Uniform {
                    upper: params[0].clone(),
                }
            }
            "exponential" => {
                arity(1)?;
                Distribution::Exponential {
                    rate: params[0].clone(),
                }
            }
            "two_point" => {
                arity(3)?;
                Distribution::TwoPoint {
                    weight: params[0].clone(),
                    low: params[1].clone(),
                    high: params[2].clone(),
                }
            }
            other => {
                return Err(bad(format!(
                    "unknown distribution `{other}`; expected constant, uniform, \
                     exponential, or two_point"
                )))
            }
        };
        dist.validate()?;
        Ok(dist)
    }
}

#[derive(Clone, Copy)]
enum Sampler {
    Constant(f64),
    Uniform(f64),
    Exponential(f64),
    TwoPoint { weight: f64, low: f64, high: f64 },
}

impl Sampler {
    fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Constant(value) => value,
            Sampler::Uniform(upper) => upper * rng.random::<f64>(),
            Sampler::Exponential(rate) => -(1.0 - rng.random::<f64>()).ln() / rate,
            Sampler::TwoPoint { weight, low, high } => {
                if rng.random::<f64>() < weight {
                    low
                } else {
                    high
                }
            }
        }
    }
}

/// Subdiagonal samples for one matrix draw: sample `index` of the run
/// seeded by `seed` uses its own counter stream, so any sample can be
/// regenerated independently of the others.
#[must_use]
pub fn sample_subdiagonal(dist: &Distribution, dim: usize, seed: u64, index: u64) -> Vec<f64> {
    let sampler = dist.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..dim.saturating_sub(1)).map(|_| sampler.draw(&mut rng)).collect()
}

/// The exact weight polynomial of `(H^len)` at diagonal position
/// `row` (zero-based), as a polynomial in the subdiagonal variables:
/// closed walks from `row` confined to `[0, dim - 1]`, each down step
/// ending at ordinate `h` contributing the variable `a_h`.
pub fn closed_walk_polynomial(dim: usize, len: usize, row: usize) -> Result<Poly, SpectraError> {
    if dim == 0 {
        return Err(SpectraError::Dimension {
            dim,
            reason: "the matrix needs at least one row".to_string(),
        });
    }
    if row >= dim {
        return Err(SpectraError::Row { row, dim });
    }
    if len > 2 * DEFAULT_ENUMERATION_CAP {
        return Err(SpectraError::Cap(CapError {
            what: "walk length",
            requested: len,
            cap: 2 * DEFAULT_ENUMERATION_CAP,
        }));
    }
    let mut total = Poly::zero();
    for_each_strip_path(row as i64, len, 0, dim as i64 - 1, |steps| {
        total += &LatticePath::new(row as i64, steps.to_vec()).weight();
    });
    Ok(total)
}

fn moment_assignment(
    poly: &Poly,
    dist: &Distribution,
) -> Result<BTreeMap<SymbolId, Rat>, SpectraError> {
    poly.symbols()
        .into_iter()
        .map(|id| {
            if id.family != Family::M {
                return Err(SpectraError::NonMoment(id));
            }
            Ok((id, dist.moment(id.index)?))
        })
        .collect()
}

/// Evaluates a polynomial in the moment symbols at the exact moments
/// of the distribution.
pub fn evaluate_moment_poly(poly: &Poly, dist: &Distribution) -> Result<Rat, SpectraError> {
    let assignment = moment_assignment(poly, dist)?;
    Ok(poly.evaluate(&assignment)?)
}

/// The exact value of `E[(H^len)_{row,row}]` for a matrix of the given
/// dimension with i.i.d. subdiagonal entries from `dist`. Odd powers
/// vanish because closed walks have even length.
pub fn expected_closed_walk(
    dim: usize,
    len: usize,
    row: usize,
    dist: &Distribution,
) -> Result<Rat, SpectraError> {
    let walks = closed_walk_polynomial(dim, len, row)?;
    let expected = walks.expectation()?;
    evaluate_moment_poly(&expected, dist)
}

/// The exact value of `E[(H^len)_{11}]`.
pub fn expected_entry(dim: usize, len: usize, dist: &Distribution) -> Result<Rat, SpectraError> {
    expected_closed_walk(dim, len, 0, dist)
}

/// The exact value of `E[Tr(H^len)]`.
pub fn expected_trace(dim: usize, len: usize, dist: &Distribution) -> Result<Rat, SpectraError> {
    let mut total = Rat::zero();
    for row in 0..dim {
        total += expected_closed_walk(dim, len, row, dist)?;
    }
    Ok(total)
}

fn rat_as_string<S: Serializer>(value: &Rat, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&value.to_string())
}

fn rats_as_strings<S: Serializer>(values: &[Rat], ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_seq(values.iter().map(Rat::to_string))
}

/// Expected diagonal entries of `H^{2 order}` row by row, compared
/// against the spectral and averaged moment polynomials: the first row
/// matches the spectral moment, every row at distance at least `order`
/// from both ends matches the averaged moment, rows mirror under
/// reflection, and no row exceeds the averaged moment.
#[derive(Debug, Clone, Serialize)]
pub struct RowCheck {
    pub dim: usize,
    pub order: usize,
    #[serde(serialize_with = "rats_as_strings")]
    pub rows: Vec<Rat>,
    #[serde(serialize_with = "rat_as_string")]
    pub alpha: Rat,
    #[serde(serialize_with = "rat_as_string")]
    pub omega: Rat,
    pub pass: bool,
}

/// Computes every diagonal entry of `E[H^{2 order}]` and checks it
/// against the moment identities. Needs `dim >= 2 order + 1` so at
/// least one interior row exists.
pub fn interior_row_check(
    dim: usize,
    order: usize,
    dist: &Distribution,
) -> Result<RowCheck, SpectraError> {
    if dim < 2 * order + 1 {
        return Err(SpectraError::Dimension {
            dim,
            reason: format!("order {order} needs dimension at least {}", 2 * order + 1),
        });
    }
    let alpha = evaluate_moment_poly(&moments::alpha(order), dist)?;
    let omega = evaluate_moment_poly(&moments::omega(order), dist)?;
    let rows: Vec<Rat> = (0..dim)
        .map(|row| expected_closed_walk(dim, 2 * order, row, dist))
        .collect::<Result<_, _>>()?;
    let mut pass = rows[0] == alpha;
    for (row, value) in rows.iter().enumerate() {
        if row >= order && row + order < dim && *value != omega {
            pass = false;
        }
        if *value != rows[dim - 1 - row] || *value > omega {
            pass = false;
        }
    }
    Ok(RowCheck {
        dim,
        order,
        rows,
        alpha,
        omega,
        pass,
    })
}

/// One dimension of the normalized-trace limit check: the deficit
/// `omega - E[Tr(H^{2 order})] / dim` must stay within
/// `[0, min(2 order, dim) * omega / dim]`, which forces the advertised
/// `O(1/dim)` convergence.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRow {
    pub dim: usize,
    #[serde(serialize_with = "rat_as_string")]
    pub normalized_trace: Rat,
    #[serde(serialize_with = "rat_as_string")]
    pub limit: Rat,
    #[serde(serialize_with = "rat_as_string")]
    pub deficit: Rat,
    #[serde(serialize_with = "rat_as_string")]
    pub bound: Rat,
    pub pass: bool,
}

/// Exact normalized traces of `H^{2 order}` across dimensions, with
/// the deficit against the averaged moment and its bound.
pub fn asymptotic_check(
    order: usize,
    dist: &Distribution,
    dims: &[usize],
) -> Result<Vec<AsymptoticRow>, SpectraError> {
    let limit = evaluate_moment_poly(&moments::omega(order), dist)?;
    dims.iter()
        .map(|&dim| {
            if dim == 0 {
                return Err(SpectraError::Dimension {
                    dim,
                    reason: "the matrix needs at least one row".to_string(),
                });
            }
            let trace = expected_trace(dim, 2 * order, dist)?;
            let normalized_trace = trace / Rat::from_integer(BigInt::from(dim));
            let deficit = &limit - &normalized_trace;
            let boundary = BigInt::from((2 * order).min(dim));
            let bound = &limit * Rat::new(boundary, BigInt::from(dim));
            let pass = !deficit.is_negative() && deficit <= bound;
            Ok(AsymptoticRow {
                dim,
                normalized_trace,
                limit: limit.clone(),
                deficit,
                bound,
                pass,
            })
        })
        .collect()
}

/// CSV rendering of the asymptotic table.
#[must_use]
pub fn asymptotic_csv(rows: &[AsymptoticRow]) -> String {
    let mut out = String::from("dim,normalized_trace,limit,deficit,bound,pass\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.dim, row.normalized_trace, row.limit, row.deficit, row.bound, row.pass
        ));
    }
    out
}

/// CSV rendering of the row-by-row diagonal check.
#[must_use]
pub fn row_check_csv(check: &RowCheck) -> String {
    let mut out = String::from("row,value,kind,reference\n");
    for (row, value) in check.rows.iter().enumerate() {
        let interior = row >= check.order && row + check.order < check.dim;
        let (kind, reference) = if interior {
            ("interior", &check.omega)
        } else if row == 0 {
            ("first", &check.alpha)
        } else {
            ("boundary", value)
        };
        out.push_str(&format!("{},{},{},{}\n", row + 1, value, kind, reference));
    }
    out
}

/// A sampled statistic of the random matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum McStatistic {
    /// `(H^power)_{11}` through iterated matrix-vector products.
    Entry { dim: usize, power: usize },
    /// `Tr(H^power)` through iterated matrix-vector products.
    Trace { dim: usize, power: usize },
    /// `power`-th moment of the spectral measure at the first
    /// coordinate, through diagonalization of the symmetrized matrix.
    SpectralMoment { dim: usize, power: usize },
    /// `power`-th moment of the eigenvalue-counting measure.
    EmpiricalMoment { dim: usize, power: usize },
}

impl McStatistic {
    #[must_use]
    pub fn dim(self) -> usize {
        match self {
            McStatistic::Entry { dim, .. }
            | McStatistic::Trace { dim, .. }
            | McStatistic::SpectralMoment { dim, .. }
            | McStatistic::EmpiricalMoment { dim, .. } => dim,
        }
    }

    #[must_use]
    pub fn power(self) -> usize {
        match self {
            McStatistic::Entry { power, .. }
            | McStatistic::Trace { power, .. }
            | McStatistic::SpectralMoment { power, .. }
            | McStatistic::EmpiricalMoment { power, .. } => power,
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

fn apply_matrix(off: &[f64], v: &[f64], out: &mut [f64]) {
    let dim = v.len();
    for r in 0..dim {
        let mut x = 0.0;
        if r > 0 {
            x += off[r - 1] * v[r - 1];
        }
        if r + 1 < dim {
            x += v[r + 1];
        }
        out[r] = x;
    }
}

fn walk_chain(off: &[f64], start: usize, power: usize) -> f64 {
    let dim = off.len() + 1;
    let mut v = vec![0.0; dim];
    v[start] = 1.0;
    let mut w = vec![0.0; dim];
    for _ in 0..power {
        apply_matrix(off, &v, &mut w);
        std::mem::swap(&mut v, &mut w);
    }
    v[start]
}

fn trace_chains(off: &[f64], power: usize) -> f64 {
    let dim = off.len() + 1;
    (0..dim).map(|row| walk_chain(off, row, power)).sum()
}

fn symmetrized_eigen(off: &[f64]) -> SymmetricEigen<f64, Dyn> {
    let dim = off.len() + 1;
    let j = DMatrix::<f64>::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            off[r].sqrt()
        } else if r == c + 1 {
            off[c].sqrt()
        } else {
            0.0
        }
    });
    j.symmetric_eigen()
}

fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

fn summarize(values: &[f64]) -> McEstimate {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let centered: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let std_error = if values.len() < 2 {
        0.0
    } else {
        (pairwise_sum(&centered) / (n - 1.0) / n).sqrt()
    };
    McEstimate {
        mean,
        std_error,
        samples: values.len() as u64,
    }
}

fn sample_values<F>(dim: usize, dist: &Distribution, seed: u64, samples: u64, f: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let sampler = dist.sampler();
    (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index);
            let off: Vec<f64> = (0..dim.saturating_sub(1))
                .map(|_| sampler.draw(&mut rng))
                .collect();
            f(&off)
        })
        .collect()
}

/// Estimates the statistic over `samples` independent matrix draws.
/// Sample `index` always uses RNG stream `index` of `seed`, and sums
/// are reduced pairwise in index order, so the result is bitwise
/// reproducible for a given build regardless of the number of worker
/// threads.
pub fn mc_estimate(
    stat: McStatistic,
    dist: &Distribution,
    seed: u64,
    samples: u64,
) -> Result<McEstimate, SpectraError> {
    dist.validate()?;
    if stat.dim() == 0 {
        return Err(SpectraError::Dimension {
            dim: 0,
            reason: "the matrix needs at least one row".to_string(),
        });
    }
    if samples == 0 {
        return Err(SpectraError::Parameter(
            "at least one sample is required".to_string(),
        ));
    }
    let power = stat.power();
    let values = match stat {
        McStatistic::Entry { dim, .. } => {
            sample_values(dim, dist, seed, samples, |off| walk_chain(off, 0, power))
        }
        McStatistic::Trace { dim, .. } => {
            sample_values(dim, dist, seed, samples, |off| trace_chains(off, power))
        }
        McStatistic::SpectralMoment { dim, .. } => {
            sample_values(dim, dist, seed, samples, |off| {
                let eigen = symmetrized_eigen(off);
                (0..dim)
                    .map(|i| {
                        eigen.eigenvectors[(0, i)].powi(2)
                            * eigen.eigenvalues[i].powi(power as i32)
                    })
                    .sum()
            })
        }
        McStatistic::EmpiricalMoment { dim, .. } => {
            sample_values(dim, dist, seed, samples, |off| {
                let eigen = symmetrized_eigen(off);
                eigen
                    .eigenvalues
                    .iter()
                    .map(|l| l.powi(power as i32))
                    .sum::<f64>()
                    / dim as f64
            })
        }
    };
    Ok(summarize(&values))
}

/// Agreement record between the walk chain and the spectral measure of
/// the symmetrized matrix across sampled draws.
#[derive(Debug, Clone, Serialize)]
pub struct TauReport {
    pub dim: usize,
    pub max_power: usize,
    pub samples: u64,
    /// Largest relative gap between `(H^k)_{11}` from the walk chain
    /// and the `k`-th moment of the spectral measure.
    pub max_moment_error: f64,
    /// Largest deviation of the squared first eigenvector components
    /// from summing to one.
    pub max_weight_error: f64,
    /// Smallest gap between adjacent eigenvalues over all draws.
    pub min_eigen_gap: f64,
    pub moment_tolerance: f64,
    pub weight_tolerance: f64,
    pub pass: bool,
}

/// Cross-checks, per sample, the walk-chain value of `(H^k)_{11}` for
/// every `k` up to `max_power` against the spectral-measure moment of
/// the symmetrized matrix, and the Christoffel weights against summing
/// to one. The two routes share the sample but nothing else.
pub fn tau_consistency(
    dim: usize,
    max_power: usize,
    dist: &Distribution,
    seed: u64,
    samples: u64,
    moment_tolerance: f64,
    weight_tolerance: f64,
) -> Result<TauReport, SpectraError> {
    dist.validate()?;
    if dim == 0 {
        return Err(SpectraError::Dimension {
            dim,
            reason: "the matrix needs at least one row".to_string(),
        });
    }
    if samples == 0 {
        return Err(SpectraError::Parameter(
            "at least one sample is required".to_string(),
        ));
    }
    let sampler = dist.sampler();
    let stats: Vec<(f64, f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index);
            let off: Vec<f64> = (0..dim.saturating_sub(1))
                .map(|_| sampler.draw(&mut rng))
                .collect();
            let eigen = symmetrized_eigen(&off);
            let weights: Vec<f64> =
                (0..dim).map(|i| eigen.eigenvectors[(0, i)].powi(2)).collect();
            let weight_error = (weights.iter().sum::<f64>() - 1.0).abs();
            let mut moment_error = 0.0f64;
            for power in 0..=max_power {
                let chain = walk_chain(&off, 0, power);
                let spectral: f64 = (0..dim)
                    .map(|i| weights[i] * eigen.eigenvalues[i].powi(power as i32))
                    .sum();
                let scale = chain.abs().max(spectral.abs()).max(1.0);
                moment_error = moment_error.max((chain - spectral).abs() / scale);
            }
            let mut sorted: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
            sorted.sort_by(f64::total_cmp);
            let gap = sorted
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            (moment_error, weight_error, gap)
        })
        .collect();
    let max_moment_error = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let max_weight_error = stats.iter().map(|s| s.1).fold(0.0, f64::max);
    let min_eigen_gap = stats.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let pass = max_moment_error <= moment_tolerance
        && max_weight_error <= weight_tolerance
        && min_eigen_gap > 0.0;
    Ok(TauReport {
        dim,
        max_power,
        samples,
        max_moment_error,
        max_weight_error,
        min_eigen_gap,
        moment_tolerance,
        weight_tolerance,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{catalan, central_binomial, weight_polynomial, WeightKind};
    use crate::polycore::rat;

    fn dist(text: &str) -> Distribution {
        text.parse().unwrap()
    }

    #[test]
    fn distributions_parse_display_and_reject_bad_input() {
        let round = [
            "constant:1",
            "uniform:3/2",
            "exponential:2",
            "two_point:1/2,1,2",
        ];
        for text in round {
            assert_eq!(dist(text).to_string(), text);
        }
        assert_eq!(dist("uniform:0.25"), dist("uniform:1/4"));
        assert_eq!(dist("two_point:.5,1,2"), dist("two_point:1/2,1,2"));
        for bad in [
            "uniform",
            "normal:1",
            "uniform:0",
            "uniform:-1",
            "constant:0",
            "exponential:1,2",
            "two_point:2,1,2",
            "two_point:1/2,0,2",
            "uniform:abc",
            "uniform:1.2.3",
        ] {
            assert!(bad.parse::<Distribution>().is_err(), "{bad}");
        }
    }

    #[test]
    fn moments_match_closed_forms() {
        for text in ["constant:3", "uniform:2", "exponential:5", "two_point:1/3,1,4"] {
            assert_eq!(dist(text).moment(0).unwrap(), Rat::one());
        }
        assert_eq!(dist("constant:2").moment(3).unwrap(), rat(8, 1));
        for k in 1..=6 {
            assert_eq!(dist("uniform:1").moment(k).unwrap(), rat(1, i64::from(k) + 1));
        }
        assert_eq!(dist("uniform:3").moment(2).unwrap(), rat(3, 1));
        assert_eq!(dist("exponential:2").moment(3).unwrap(), rat(3, 4));
        assert_eq!(dist("exponential:1").moment(20).unwrap().to_string(), {
            let f: BigInt = (1..=20i64).map(BigInt::from).product();
            f.to_string()
        });
        assert!(matches!(
            dist("exponential:1").moment(21),
            Err(SpectraError::MomentOrder { max: 20, .. })
        ));
        assert_eq!(dist("two_point:1/2,1,2").moment(2).unwrap(), rat(5, 2));
    }

    #[test]
    fn walk_polynomials_match_the_path_weights() {
        assert_eq!(closed_walk_polynomial(1, 2, 0).unwrap(), Poly::zero());
        assert_eq!(
            closed_walk_polynomial(2, 2, 0).unwrap(),
            "a0".parse().unwrap()
        );
        for m in 0..=4usize {
            let free = weight_polynomial(WeightKind::A, m).unwrap();
            assert_eq!(
                closed_walk_polynomial(m + 1, 2 * m, 0).unwrap(),
                free,
                "m={m}"
            );
            assert_eq!(closed_walk_polynomial(m + 4, 2 * m, 0).unwrap(), free);
        }
        assert_eq!(closed_walk_polynomial(4, 3, 1).unwrap(), Poly::zero());
        assert!(matches!(
            closed_walk_polynomial(3, 2, 3),
            Err(SpectraError::Row { row: 3, dim: 3 })
        ));
        assert!(matches!(
            closed_walk_polynomial(3, 99, 0),
            Err(SpectraError::Cap(_))
        ));
    }

    #[test]
    fn expected_entries_reproduce_the_spectral_moments() {
        for text in ["constant:1", "uniform:1", "two_point:1/2,1,2"] {
            let d = dist(text);
            for m in 0..=3usize {
                let alpha = evaluate_moment_poly(&moments::alpha(m), &d).unwrap();
                for dim in [m + 1, m + 3] {
                    assert_eq!(
                        expected_entry(dim, 2 * m, &d).unwrap(),
                        alpha,
                        "{text} m={m} dim={dim}"
                    );
                }
                assert_eq!(expected_entry(m + 2, 2 * m + 1, &d).unwrap(), Rat::zero());
            }
        }
    }

    #[test]
    fn all_ones_entries_count_paths() {
        let ones = dist("constant:1");
        for m in 0..=5usize {
            assert_eq!(
                expected_entry(m + 1, 2 * m, &ones).unwrap(),
                Rat::from_integer(catalan(m))
            );
        }
        let check = interior_row_check(7, 2, &ones).unwrap();
        assert!(check.pass);
        assert_eq!(check.omega, Rat::from_integer(central_binomial(2)));
    }

    #[test]
    fn interior_rows_hit_the_averaged_moment() {
        for text in ["uniform:1", "exponential:3", "two_point:2/3,1,3"] {
            let d = dist(text);
            for (dim, order) in [(5, 2), (5, 1), (7, 3)] {
                let check = interior_row_check(dim, order, &d).unwrap();
                assert!(check.pass, "{text} dim={dim} order={order}");
                assert!(check.rows[0] < check.omega);
            }
        }
        assert!(matches!(
            interior_row_check(4, 2, &dist("uniform:1")),
            Err(SpectraError::Dimension { .. })
        ));
    }

    #[test]
    fn normalized_traces_approach_the_averaged_moment() {
        let ones = dist("constant:1");
        for order in 1..=3usize {
            let dims: Vec<usize> = (1..=12).collect();
            let rows = asymptotic_check(order, &ones, &dims).unwrap();
            for row in &rows {
                assert!(row.pass, "order={order} dim={}", row.dim);
            }
            let last = &rows[rows.len() - 1];
            let exact_interior = Rat::from_integer(central_binomial(order));
            assert_eq!(last.limit, exact_interior);
            assert!(last.deficit < rows[4].deficit);
        }
        let csv = asymptotic_csv(&asymptotic_check(1, &ones, &[2, 3]).unwrap());
        assert!(csv.starts_with("dim,normalized_trace,limit,deficit,bound,pass\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_unbiased() {
        let d = dist("uniform:1");
        let stat = McStatistic::Entry { dim: 3, power: 2 };
        let a = mc_estimate(stat, &d, 7, 4000).unwrap();
        let b = mc_estimate(stat, &d, 7, 4000).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let exact = expected_entry(3, 2, &d).unwrap().to_f64().unwrap();
        assert!((a.mean - exact).abs() < 5.0 * a.std_error);
        let c = mc_estimate(stat, &d, 8, 4000).unwrap();
        assert_ne!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn monte_carlo_is_independent_of_worker_count() {
        let d = dist("exponential:2");
        let stat = McStatistic::Trace { dim: 6, power: 4 };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| mc_estimate(stat, &d, 11, 2000).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| mc_estimate(stat, &d, 11, 2000).unwrap());
        assert_eq!(single.mean.to_bits(), many.mean.to_bits());
        assert_eq!(single.std_error.to_bits(), many.std_error.to_bits());
    }

    #[test]
    fn constant_entries_are_exact_with_zero_error() {
        let d = dist("constant:2");
        let est = mc_estimate(McStatistic::Entry { dim: 4, power: 4 }, &d, 1, 50).unwrap();
        let exact = expected_entry(4, 4, &d).unwrap().to_f64().unwrap();
        assert_eq!(est.mean, exact);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn spectral_and_chain_routes_agree_per_sample() {
        let report =
            tau_consistency(6, 6, &dist("uniform:1"), 3, 25, 1e-9, 1e-12).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.min_eigen_gap > 0.0);
        let wide =
            tau_consistency(1, 4, &dist("two_point:1/2,1,2"), 3, 5, 1e-9, 1e-12).unwrap();
        assert!(wide.pass);
    }

    #[test]
    fn spectral_statistics_match_their_chain_counterparts() {
        let d = dist("uniform:1");
        let chain = mc_estimate(McStatistic::Entry { dim: 5, power: 4 }, &d, 9, 500).unwrap();
        let spectral =
            mc_estimate(McStatistic::SpectralMoment { dim: 5, power: 4 }, &d, 9, 500).unwrap();
        assert!((chain.mean - spectral.mean).abs() < 1e-9);
        let trace = mc_estimate(McStatistic::Trace { dim: 5, power: 4 }, &d, 9, 500).unwrap();
        let empirical =
            mc_estimate(McStatistic::EmpiricalMoment { dim: 5, power: 4 }, &d, 9, 500)
                .unwrap();
        assert!((trace.mean / 5.0 - empirical.mean).abs() < 1e-9);
    }

    #[test]
    fn reports_serialize_with_rational_strings() {
        let check = interior_row_check(5, 2, &dist("uniform:1")).unwrap();
        let json = serde_json::to_string(&check).unwrap();
        assert!(json.contains("\"omega\":\""));
        assert!(check.pass);
        let csv = row_check_csv(&check);
        assert!(csv.starts_with("row,value,kind,reference\n"));
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.contains("interior"));
    }
}
