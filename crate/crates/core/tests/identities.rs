//! Cross-module identities: each quantity is computed along two
//! independent routes that never share code below the public API.

use jacobi_moments::lattice::{
    catalan, central_binomial, compositions, weight_polynomial, WeightKind,
};
use jacobi_moments::moments::{alpha, alpha_k, m_poly, omega};
use jacobi_moments::polycore::{rat, rat_int, Family, Poly, Rat};
use jacobi_moments::spectra::{
    closed_walk_polynomial, evaluate_moment_poly, expected_entry, expected_trace, mc_estimate,
    Distribution, McStatistic,
};
use jacobi_moments::trees::{reconstruct, InversionTarget};

fn substitute_family(poly: &Poly, family: Family, table: impl Fn(u32) -> Poly) -> Poly {
    poly.substitute(|id| (id.family == family).then(|| table(id.index)))
}

#[test]
fn corner_walk_expectations_reduce_to_alpha() {
    for m in 0..=4usize {
        for dim in [m + 1, m + 2, 2 * m + 3] {
            let walk = closed_walk_polynomial(dim.max(1), 2 * m, 0).expect("within caps");
            assert_eq!(
                walk.expectation().expect("only random symbols"),
                alpha(m),
                "dim={dim}, m={m}"
            );
        }
    }
}

#[test]
fn interior_walk_expectations_reduce_to_omega() {
    for m in 1..=3usize {
        for dim in [2 * m + 1, 2 * m + 4] {
            for row in m..=(dim - 1 - m) {
                let walk = closed_walk_polynomial(dim, 2 * m, row).expect("within caps");
                assert_eq!(
                    walk.expectation().expect("only random symbols"),
                    omega(m),
                    "dim={dim}, row={row}, m={m}"
                );
            }
        }
    }
}

#[test]
fn path_expectations_match_the_composition_sums() {
    for n in 0..=7usize {
        let dyck = weight_polynomial(WeightKind::A, n).expect("within caps");
        assert_eq!(dyck.expectation().expect("random"), alpha(n), "A at n={n}");
        let general = weight_polynomial(WeightKind::W, n).expect("within caps");
        assert_eq!(
            general.expectation().expect("random"),
            omega(n),
            "W at n={n}"
        );
    }
}

#[test]
fn tree_expansions_substitute_back_to_the_source() {
    for n in 1..=6usize {
        let m_in_alpha = substitute_family(
            &reconstruct(InversionTarget::MFromAlpha, n),
            Family::Alpha,
            |j| alpha(j as usize),
        );
        assert_eq!(m_in_alpha, m_poly(n as u32), "m in alpha basis at n={n}");

        let omega_in_alpha = substitute_family(
            &reconstruct(InversionTarget::OmegaFromAlpha, n),
            Family::Alpha,
            |j| alpha(j as usize),
        );
        assert_eq!(omega_in_alpha, omega(n), "omega in alpha basis at n={n}");

        let m_in_omega = substitute_family(
            &reconstruct(InversionTarget::MFromOmega, n),
            Family::Omega,
            |j| omega(j as usize),
        );
        assert_eq!(m_in_omega, m_poly(n as u32), "m in omega basis at n={n}");

        let alpha_in_omega = substitute_family(
            &reconstruct(InversionTarget::AlphaFromOmega, n),
            Family::Omega,
            |j| omega(j as usize),
        );
        assert_eq!(alpha_in_omega, alpha(n), "alpha in omega basis at n={n}");
    }
}

#[test]
fn power_one_weighted_sums_are_the_plain_moments() {
    for n in 0..=6usize {
        assert_eq!(alpha_k(n, 1), alpha(n), "k=1 at n={n}");
    }
}

#[test]
fn all_ones_specialization_counts_paths() {
    let ones = Distribution::constant(rat_int(1)).expect("valid");
    for n in 0..=10usize {
        assert_eq!(
            evaluate_moment_poly(&alpha(n), &ones).expect("moments exist"),
            Rat::from_integer(catalan(n)),
            "alpha at n={n}"
        );
        assert_eq!(
            evaluate_moment_poly(&omega(n), &ones).expect("moments exist"),
            Rat::from_integer(central_binomial(n)),
            "omega at n={n}"
        );
    }
}

#[test]
fn exact_entry_is_independent_of_dimension() {
    let dist = Distribution::two_point(rat(1, 3), rat_int(1), rat_int(3)).expect("valid");
    let mut previous = None;
    for dim in 4..=9usize {
        let value = expected_entry(dim, 6, &dist).expect("within caps");
        if let Some(previous) = &previous {
            assert_eq!(&value, previous, "dim={dim}");
        }
        previous = Some(value);
    }
    assert_eq!(
        previous.expect("computed"),
        evaluate_moment_poly(&alpha(3), &dist).expect("moments exist")
    );
}

#[test]
fn constant_coefficients_make_sampling_deterministic() {
    use num::ToPrimitive;
    let dist = Distribution::constant(rat(3, 2)).expect("valid");
    let exact = expected_trace(5, 4, &dist).expect("within caps");
    let exact_f64 = exact.to_f64().expect("finite");
    let estimate = mc_estimate(McStatistic::Trace { dim: 5, power: 4 }, &dist, 11, 64)
        .expect("within caps");
    assert_eq!(estimate.mean, exact_f64);
    assert_eq!(estimate.std_error, 0.0);
}

#[test]
fn composition_sums_recover_the_expected_weight_polynomials() {
    use jacobi_moments::lattice::{rho1, rho2, comp_pairs};
    for n in 1..=6usize {
        let mut by_compositions = Poly::zero();
        for c in compositions(n) {
            let mut term = Poly::constant(rho1(&c));
            for part in c.parts() {
                term = &term * &m_poly(*part);
            }
            by_compositions += &term;
        }
        assert_eq!(by_compositions, alpha(n), "alpha at n={n}");

        let mut by_pairs = Poly::zero();
        for pair in comp_pairs(n) {
            let mut term = Poly::constant(rho2(&pair));
            for part in pair.0.parts().iter().chain(pair.1.parts()) {
                term = &term * &m_poly(*part);
            }
            by_pairs += &term;
        }
        assert_eq!(by_pairs, omega(n), "omega at n={n}");
    }
}

fn m_poly_product(parts: &[u32]) -> Poly {
    let mut out = Poly::one();
    for &part in parts {
        out = &out * &m_poly(part);
    }
    out
}

#[test]
fn moment_symbols_expand_multiplicatively() {
    assert_eq!(m_poly_product(&[2, 1]), m_poly_product(&[1, 2]));
    let squared = m_poly_product(&[3, 3]);
    let direct = &m_poly(3) * &m_poly(3);
    assert_eq!(squared, direct);
}
