//! Expected weight polynomials, exactly, as polynomials in the moments
//! `m1, m2, ...` of the common distribution of the path variables.
//!
//! `alpha{n}` is the expectation of the weight polynomial over paths on
//! or above the axis, `omega{n}` over all closed paths. The zeroth
//! moment is pinned to one throughout, so the symbol `m0` never appears
//! in any output.

use serde::Serialize;

use num::{One, Zero};

use crate::lattice::{self, binom_ext, comp_pairs, compositions, ClosedForm, WeightKind};
use crate::polycore::{Poly, Rat, SymbolId};
use crate::series::{
    power_coefficient, series_from, CoeffSource, LaurentSeries, SeriesError, SeriesKind,
};

/// The moment `m{j}` as a polynomial; the zeroth moment is one.
#[must_use]
pub fn m_poly(j: u32) -> Poly {
    if j == 0 {
        Poly::one()
    } else {
        Poly::symbol(SymbolId::m(j))
    }
}

/// Expected one-sided weight polynomial: the composition sum with
/// [`lattice::rho1`] coefficients and moment monomials.
#[must_use]
pub fn alpha(n: usize) -> Poly {
    Poly::from_terms(
        compositions(n)
            .iter()
            .map(|c| (c.monomial_m(), lattice::rho1(c))),
    )
}

/// Expected closed-path weight polynomial: the composition-pair sum
/// with [`lattice::rho2`] coefficients.
#[must_use]
pub fn omega(n: usize) -> Poly {
    Poly::from_terms(comp_pairs(n).iter().map(|pair| {
        let mono = pair.0.monomial_m().mul(&pair.1.monomial_m());
        (mono, lattice::rho2(pair))
    }))
}

/// Expected power coefficient `alpha_n^{(k)}`: the composition sum with
/// an extra binomial in the first part. The empty composition
/// contributes one, so the value at `n = 0` is one for every `k`; the
/// extended binomial convention zeroes every `k = 0` value for `n > 0`.
#[must_use]
pub fn alpha_k(n: usize, k: u32) -> Poly {
    Poly::from_terms(compositions(n).iter().map(|c| {
        let coeff = match c.first() {
            None => Rat::one(),
            Some(first) => {
                let head = binom_ext(i64::from(first + k) - 1, i64::from(k) - 1);
                Rat::from_integer(head) * lattice::rho1(c)
            }
        };
        (c.monomial_m(), coeff)
    }))
}

fn expectation_of(poly: &Poly) -> Poly {
    poly.expectation()
        .expect("weight polynomials contain only a/b symbols")
}

/// `alpha_n^{(k)}` through the selected route: the composition closed
/// form, or the expectation of the `k`-th power coefficient of the
/// enumerated one-sided series.
pub fn alpha_k_from(n: usize, k: u32, source: CoeffSource) -> Result<Poly, SeriesError> {
    match source {
        CoeffSource::ClosedForm => Ok(alpha_k(n, k)),
        CoeffSource::Enumeration => {
            let order = 2 * n as i64 + 1;
            let a = series_from(&SeriesKind::A(0), order, CoeffSource::Enumeration)?;
            let coeff = power_coefficient(&a, k, 2 * n as i64 + i64::from(k))?;
            Ok(expectation_of(&coeff))
        }
    }
}

/// `omega_n` through the selected route: the composition-pair closed
/// form, or the expectation of the enumerated closed-path polynomial.
pub fn omega_from(n: usize, source: CoeffSource) -> Result<Poly, SeriesError> {
    match source {
        CoeffSource::ClosedForm => Ok(omega(n)),
        CoeffSource::Enumeration => Ok(expectation_of(&lattice::weight_polynomial(
            WeightKind::W,
            n,
        )?)),
    }
}

/// A site where two exactly computed polynomials disagreed.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityFailure {
    pub identity: String,
    pub site: String,
    pub lhs: Poly,
    pub rhs: Poly,
}

/// Outcome of a batch of exact identity checks.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub label: String,
    pub max_order: usize,
    pub checks: usize,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    #[must_use]
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, identity: &str, site: String, lhs: Poly, rhs: Poly) {
        self.checks += 1;
        if lhs != rhs {
            self.failures.push(IdentityFailure {
                identity: identity.to_string(),
                site,
                lhs,
                rhs,
            });
        }
    }
}

/// Verifies that the expectation of every enumerated weight polynomial
/// equals its composition closed form at size `n`: the one-sided and
/// mirrored polynomials against `alpha`, the closed-path polynomial
/// against `omega`, power coefficients against `alpha_k`, and the
/// return-count polynomials against `m_k * alpha_{n-k}^{(k)}`.
pub fn expectation_bridge(n: usize) -> Result<IdentityReport, SeriesError> {
    let mut report = IdentityReport {
        label: format!("expectation_bridge(n={n})"),
        max_order: n,
        checks: 0,
        failures: Vec::new(),
    };
    let a_n = lattice::weight_polynomial(WeightKind::A, n)?;
    report.record(
        "expected one-sided polynomial",
        format!("n={n}"),
        expectation_of(&a_n),
        alpha(n),
    );
    let b_n = lattice::weight_polynomial(WeightKind::B, n)?;
    report.record(
        "expected mirrored polynomial",
        format!("n={n}"),
        expectation_of(&b_n),
        alpha(n),
    );
    let w_n = lattice::weight_polynomial(WeightKind::W, n)?;
    report.record(
        "expected closed-path polynomial",
        format!("n={n}"),
        expectation_of(&w_n),
        omega(n),
    );
    for k in 0..=n.min(4) as u32 {
        report.record(
            "expected power coefficient",
            format!("n={n} k={k}"),
            alpha_k_from(n, k, CoeffSource::Enumeration)?,
            alpha_k(n, k),
        );
        let returns = lattice::closed_form(ClosedForm::ReturnsA(k), n)?;
        report.record(
            "expected return-count polynomial",
            format!("n={n} k={k}"),
            expectation_of(&returns),
            &m_poly(k) * &alpha_k(n - k as usize, k),
        );
    }
    Ok(report)
}

/// Verifies the moment recurrences exactly for all `n, k <= n_max`, and
/// their series forms at truncation order `2 * n_max + 1`.
///
/// The exact layer checks, coefficient by coefficient in the moment
/// symbols: the expansion of `alpha_n^{(k)}` over `alpha^{(j)}` values,
/// and both expansions of `omega_n` over `alpha^{(j)}` values. The
/// series layer checks the same identities as truncated series, where
/// each infinite sum is cut once the summand's leading exponent passes
/// the truncation order. The left-hand series come from path
/// enumeration, the right-hand sides from the composition closed forms.
pub fn check_recurrences(n_max: usize) -> Result<IdentityReport, SeriesError> {
    let mut report = IdentityReport {
        label: format!("recurrences(n_max={n_max})"),
        max_order: n_max,
        checks: 0,
        failures: Vec::new(),
    };

    for n in 0..=n_max {
        for k in 0..=n_max as u32 {
            let mut rhs = Poly::zero();
            for j in 0..=n as u32 {
                let binom = binom_ext(i64::from(j + k) - 1, i64::from(k) - 1);
                if binom.is_zero() {
                    continue;
                }
                let term = &(&m_poly(j) * &alpha_k(n - j as usize, j))
                    * &Poly::constant(Rat::from_integer(binom));
                rhs += &term;
            }
            report.record(
                "power-coefficient recurrence",
                format!("n={n} k={k}"),
                alpha_k(n, k),
                rhs,
            );
        }
    }

    for n in 0..=n_max {
        let mut simple = Poly::zero();
        let mut double = Poly::zero();
        for j in 0..=n as u32 {
            for l in 0..=(n - j as usize) {
                let tail = n - j as usize - l;
                simple += &(&(&m_poly(j) * &alpha_k(l, j)) * &alpha_k(tail, j + 1));
                for i in 0..=j {
                    let binom = binom_ext(i64::from(j), i64::from(i));
                    let term = &(&m_poly(i) * &m_poly(j - i))
                        * &(&alpha_k(l, i) * &alpha_k(tail, j - i));
                    double += &term.scale(&Rat::from_integer(binom));
                }
            }
        }
        report.record(
            "closed-path expansion",
            format!("n={n}"),
            omega(n),
            simple,
        );
        report.record(
            "closed-path double expansion",
            format!("n={n}"),
            omega(n),
            double,
        );
    }

    let order = 2 * n_max as i64 + 1;
    for k in 0..=n_max as u32 {
        let lhs = series_from(&SeriesKind::G(k), order, CoeffSource::Enumeration)?;
        let mut rhs = LaurentSeries::zero(order + i64::from(k));
        let mut j = 0u32;
        while 2 * i64::from(j) + i64::from(k) <= order {
            let binom = binom_ext(i64::from(j + k) - 1, i64::from(k) - 1);
            if !binom.is_zero() {
                let g_j = series_from(&SeriesKind::G(j), order, CoeffSource::ClosedForm)?;
                let scaled = g_j
                    .scaled(&m_poly(j).scale(&Rat::from_integer(binom)))
                    .shifted(i64::from(j + k));
                rhs = rhs.add(&scaled);
            }
            j += 1;
        }
        record_series(&mut report, "series chain", format!("k={k}"), &lhs, &rhs, order);
    }

    let f = series_from(&SeriesKind::F, order, CoeffSource::Enumeration)?;
    let mut simple = LaurentSeries::zero(order);
    let mut double = LaurentSeries::zero(order + 1);
    let mut j = 0u32;
    while 2 * i64::from(j) < order {
        let g_j = series_from(&SeriesKind::G(j), order, CoeffSource::ClosedForm)?;
        let g_next = series_from(&SeriesKind::G(j + 1), order, CoeffSource::ClosedForm)?;
        simple = simple.add(&g_j.mul(&g_next).scaled(&m_poly(j)));
        for i in 0..=j {
            let binom = binom_ext(i64::from(j), i64::from(i));
            let g_i = series_from(&SeriesKind::G(i), order, CoeffSource::ClosedForm)?;
            let g_diff = series_from(&SeriesKind::G(j - i), order, CoeffSource::ClosedForm)?;
            let factor = (&m_poly(i) * &m_poly(j - i)).scale(&Rat::from_integer(binom));
            double = double.add(&g_i.mul(&g_diff).scaled(&factor).shifted(i64::from(j) + 1));
        }
        j += 1;
    }
    record_series(&mut report, "series expansion", String::new(), &f, &simple, order);
    record_series(
        &mut report,
        "series double expansion",
        String::new(),
        &f,
        &double,
        order,
    );

    Ok(report)
}

fn record_series(
    report: &mut IdentityReport,
    identity: &str,
    site: String,
    lhs: &LaurentSeries,
    rhs: &LaurentSeries,
    order: i64,
) {
    for n in 0..=order {
        let l = lhs.coeff(n).expect("lhs series too short");
        let r = rhs.coeff(n).expect("rhs series too short");
        let site = if site.is_empty() {
            format!("z^-{n}")
        } else {
            format!("{site} z^-{n}")
        };
        report.record(identity, site, l, r);
    }
}

/// One row of the expected-polynomial table.
#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub n: usize,
    pub alpha: Poly,
    pub omega: Poly,
}

/// The table of expected weight polynomials for `n = 0..=max_n`.
#[must_use]
pub fn moment_table(max_n: usize) -> Vec<MomentRow> {
    (0..=max_n)
        .map(|n| MomentRow {
            n,
            alpha: alpha(n),
            omega: omega(n),
        })
        .collect()
}

/// CSV rendering of [`moment_table`] with a header row.
#[must_use]
pub fn moment_table_csv(max_n: usize) -> String {
    let mut out = String::from("n,alpha,omega\n");
    for row in moment_table(max_n) {
        out.push_str(&format!("{},\"{}\",\"{}\"\n", row.n, row.alpha, row.omega));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn expected_one_sided_polynomials_match_the_printed_table() {
        assert_eq!(alpha(0), Poly::one());
        assert_eq!(alpha(1), p("m1"));
        assert_eq!(alpha(2), p("m2 + m1^2"));
        assert_eq!(alpha(3), p("m3 + 3*m2*m1 + m1^3"));
        assert_eq!(alpha(4), p("m4 + 4*m3*m1 + 3*m2^2 + 5*m2*m1^2 + m1^4"));
        assert_eq!(
            alpha(5),
            p("m5 + 5*m4*m1 + 10*m3*m2 + 7*m3*m1^2 + 11*m2^2*m1 + 7*m2*m1^3 + m1^5")
        );
    }

    #[test]
    fn expected_closed_path_polynomials_match_the_printed_table() {
        assert_eq!(omega(0), Poly::one());
        assert_eq!(omega(1), p("2*m1"));
        assert_eq!(omega(2), p("2*m2 + 4*m1^2"));
        assert_eq!(omega(3), p("2*m3 + 12*m2*m1 + 6*m1^3"));
        assert_eq!(omega(4), p("2*m4 + 16*m3*m1 + 12*m2^2 + 32*m2*m1^2 + 8*m1^4"));
        assert_eq!(
            omega(5),
            p("2*m5 + 20*m4*m1 + 40*m3*m2 + 50*m3*m1^2 + 70*m2^2*m1 + 60*m2*m1^3 + 10*m1^5")
        );
    }

    #[test]
    fn power_coefficient_expectations_specialize_correctly() {
        for n in 0..=6 {
            assert_eq!(alpha_k(n, 1), alpha(n), "first power at n={n}");
        }
        for k in 0..=6 {
            assert_eq!(alpha_k(0, k), Poly::one(), "empty case at k={k}");
        }
        for n in 1..=6 {
            assert_eq!(alpha_k(n, 0), Poly::zero(), "zeroth power at n={n}");
        }
        for k in 0..=6u32 {
            let expected = p("m2").scale(&crate::polycore::rat(
                i64::from(k) * (i64::from(k) + 1) / 2,
                1,
            )) + p("m1^2").scale(&crate::polycore::rat(i64::from(k), 1));
            assert_eq!(alpha_k(2, k), expected, "quadratic case at k={k}");
        }
    }

    #[test]
    fn both_routes_agree_on_small_orders() {
        for n in 0..=4 {
            assert_eq!(
                omega_from(n, CoeffSource::Enumeration).unwrap(),
                omega_from(n, CoeffSource::ClosedForm).unwrap()
            );
            for k in 0..=3 {
                assert_eq!(
                    alpha_k_from(n, k, CoeffSource::Enumeration).unwrap(),
                    alpha_k_from(n, k, CoeffSource::ClosedForm).unwrap(),
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn bridge_holds_through_n_five() {
        for n in 0..=5 {
            let report = expectation_bridge(n).unwrap();
            assert!(report.pass(), "n={n}: {:?}", report.failures.first());
        }
    }

    #[test]
    fn recurrences_hold_at_small_order() {
        let report = check_recurrences(4).unwrap();
        assert!(report.pass(), "{:?}", report.failures.first());
        assert!(report.checks > 40);
    }

    #[test]
    fn outputs_never_contain_the_zeroth_moment() {
        for n in 0..=8 {
            for poly in [alpha(n), omega(n), alpha_k(n, 3)] {
                assert!(poly
                    .symbols()
                    .iter()
                    .all(|id| id.index > 0 || id.family != crate::polycore::Family::M));
            }
        }
    }

    #[test]
    fn table_renders_with_header() {
        let csv = moment_table_csv(2);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,alpha,omega");
        assert_eq!(lines[1], "0,\"1\",\"1\"");
        assert_eq!(lines[3], "2,\"m1^2 + m2\",\"4*m1^2 + 2*m2\"");
    }

    #[test]
    fn all_ones_specialization_counts_paths() {
        use std::collections::BTreeMap;
        for n in 0..=10usize {
            let assign: BTreeMap<SymbolId, Rat> = (1..=n.max(1) as u32)
                .map(|j| (SymbolId::m(j), Rat::one()))
                .collect();
            assert_eq!(
                alpha(n).evaluate(&assign).unwrap(),
                Rat::from_integer(lattice::catalan(n)),
                "one-sided count at n={n}"
            );
            assert_eq!(
                omega(n).evaluate(&assign).unwrap(),
                Rat::from_integer(lattice::central_binomial(n)),
                "closed-path count at n={n}"
            );
        }
    }

    #[test]
    fn monomials_are_weighted_homogeneous() {
        for n in 0..=8usize {
            for poly in [alpha(n), omega(n)] {
                for (mono, _) in poly.iter() {
                    let weighted: u32 = mono.iter().map(|(id, e)| id.index * e).sum();
                    assert_eq!(weighted as usize, n, "monomial {mono} at n={n}");
                }
            }
        }
    }
}
