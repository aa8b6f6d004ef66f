//! The verification engine behind `jmom verify-all`.
//!
//! Each check compares two independently computed routes to the same
//! quantity and reports every mismatch. The checks are also callable one
//! by one with explicit bounds, which is how the acceptance tests pin the
//! exact ranges they need.

use num::{BigInt, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use jacobi_moments::lattice::{
    self, catalan, central_binomial, compositions, ClosedForm, Composition, LatticePath, PathKind,
    WeightKind,
};
use jacobi_moments::moments;
use jacobi_moments::polycore::{rat, rat_int, Poly, Rat};
use jacobi_moments::series::{verify_relation, RelationId};
use jacobi_moments::spectra::{
    asymptotic_check, evaluate_moment_poly, expected_entry, expected_trace, interior_row_check,
    mc_estimate, tau_consistency, Distribution, McEstimate, McStatistic,
};
use jacobi_moments::trees::{
    enumerate_trees, invert_oracle, phi, reconstruct, tree_weight, InversionTarget, TreeClass,
};

use crate::CliError;

/// Sample count for the per-sample spectral consistency check, chosen so
/// the check stays cheap no matter how large `--samples` is.
pub const TAU_SAMPLES: u64 = 100;

/// Relative tolerance for the walk-chain versus spectral-moment comparison.
pub const TAU_MOMENT_TOLERANCE: f64 = 1e-9;

/// Absolute tolerance for the Christoffel weight sum.
pub const TAU_WEIGHT_TOLERANCE: f64 = 1e-12;

/// Result of one named check: a pass flag, the number of comparisons it
/// made, and a human-readable line per mismatch.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub pass: bool,
    pub comparisons: usize,
    pub failures: Vec<String>,
    pub detail: Value,
}

/// The aggregated result of a full `verify-all` run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub max_order: usize,
    pub seed: u64,
    pub samples: u64,
    pub pass: bool,
    pub checks: Vec<CheckOutcome>,
}

struct Tally {
    comparisons: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            comparisons: 0,
            failures: Vec::new(),
        }
    }

    fn eq<T: PartialEq + std::fmt::Display>(&mut self, site: &str, lhs: &T, rhs: &T) {
        self.comparisons += 1;
        if lhs != rhs {
            self.failures.push(format!("{site}: {lhs} != {rhs}"));
        }
    }

    fn require(&mut self, site: &str, ok: bool) {
        self.comparisons += 1;
        if !ok {
            self.failures.push(site.to_string());
        }
    }

    fn finish(self, id: &'static str, detail: Value) -> CheckOutcome {
        CheckOutcome {
            id,
            pass: self.failures.is_empty(),
            comparisons: self.comparisons,
            failures: self.failures,
            detail,
        }
    }
}

fn p(src: &str) -> Poly {
    src.parse().expect("builtin polynomial literal must parse")
}

/// Counts every path family against its closed-form count.
pub fn check_path_counts(max_half_length: usize) -> Result<CheckOutcome, CliError> {
    let mut t = Tally::new();
    for n in 0..=max_half_length {
        let dyck = BigInt::from(lattice::count_paths(PathKind::Dyck, n)?);
        t.eq(&format!("dyck path count at n={n}"), &dyck, &catalan(n));
        let general = BigInt::from(lattice::count_paths(PathKind::Generalized, n)?);
        t.eq(
            &format!("generalized path count at n={n}"),
            &general,
            &central_binomial(n),
        );
        let reflected = BigInt::from(lattice::count_paths(PathKind::ReflectedDyck, n)?);
        t.eq(
            &format!("reflected path count at n={n}"),
            &reflected,
            &catalan(n),
        );
    }
    Ok(t.finish(
        "paths.counts",
        json!({ "max_half_length": max_half_length }),
    ))
}

/// Compares every closed form for the weight polynomials against direct
/// path enumeration, including the first-return decomposition.
pub fn check_closed_forms(max_order: usize) -> Result<CheckOutcome, CliError> {
    let mut t = Tally::new();
    for n in 0..=max_order {
        let a = lattice::weight_polynomial(WeightKind::A, n)?;
        t.eq(
            &format!("continued-fraction form of A at n={n}"),
            &lattice::closed_form(ClosedForm::FlajoletA, n)?,
            &a,
        );
        t.eq(
            &format!("convolution form of A at n={n}"),
            &lattice::closed_form(ClosedForm::TouchardA, n)?,
            &a,
        );
        let w = lattice::weight_polynomial(WeightKind::W, n)?;
        t.eq(
            &format!("pair-sum form of W at n={n}"),
            &lattice::closed_form(ClosedForm::TheoremW, n)?,
            &w,
        );
        t.eq(
            &format!("nested form of W at n={n}"),
            &lattice::closed_form(ClosedForm::NestedW, n)?,
            &w,
        );
        let b = lattice::weight_polynomial(WeightKind::B, n)?;
        t.eq(
            &format!("continued-fraction form of B at n={n}"),
            &lattice::closed_form(ClosedForm::FlajoletB, n)?,
            &b,
        );
        let mut by_returns = Poly::zero();
        for k in 0..=n {
            by_returns += &lattice::closed_form(ClosedForm::ReturnsA(k as u32), n)?;
        }
        t.eq(
            &format!("first-return decomposition of A at n={n}"),
            &by_returns,
            &a,
        );
    }
    Ok(t.finish("paths.closed_forms", json!({ "max_order": max_order })))
}

const PRINTED_A: [&str; 4] = [
    "1",
    "a0",
    "a0^2 + a0*a1",
    "a0^3 + 2*a0^2*a1 + a0*a1^2 + a0*a1*a2",
];

const PRINTED_W: [&str; 4] = [
    "1",
    "a0 + b0",
    "a0^2 + a0*a1 + 2*a0*b0 + b0^2 + b0*b1",
    "a0^3 + 2*a0^2*a1 + a0*a1^2 + a0*a1*a2 \
     + 3*a0^2*b0 + 3*a0*b0^2 + 2*a0*a1*b0 + 2*a0*b0*b1 \
     + b0^3 + 2*b0^2*b1 + b0*b1^2 + b0*b1*b2",
];

const FIGURE_PATH_HIGH: &str = "UDUUDUUDDDUUDD";
const FIGURE_PATH_MIXED: &str = "DUUUDDDDUUDUUD";

/// Reproduces the reference tables of small weight polynomials and the
/// two worked example paths.
pub fn check_printed_paths() -> Result<CheckOutcome, CliError> {
    let mut t = Tally::new();
    for (n, src) in PRINTED_A.iter().enumerate() {
        t.eq(
            &format!("reference table A_{n}"),
            &lattice::weight_polynomial(WeightKind::A, n)?,
            &p(src),
        );
    }
    for (n, src) in PRINTED_W.iter().enumerate() {
        t.eq(
            &format!("reference table W_{n}"),
            &lattice::weight_polynomial(WeightKind::W, n)?,
            &p(src),
        );
    }
    let high: LatticePath = FIGURE_PATH_HIGH
        .parse()
        .expect("builtin path literal must parse");
    t.eq(
        &format!("weight of {FIGURE_PATH_HIGH}"),
        &high.weight(),
        &p("a0^3*a1^3*a2"),
    );
    let mixed: LatticePath = FIGURE_PATH_MIXED
        .parse()
        .expect("builtin path literal must parse");
    t.eq(
        &format!("weight of {FIGURE_PATH_MIXED}"),
        &mixed.weight(),
        &p("a0^2*a1*b0^3*b1"),
    );
    Ok(t.finish(
        "paths.reference_tables",
        json!({ "tables": ["A_0..A_3", "W_0..W_3"], "paths": [FIGURE_PATH_HIGH, FIGURE_PATH_MIXED] }),
    ))
}

/// Verifies every built-in series relation coefficient by coefficient.
pub fn check_series_relations(order: i64, contfrac_depth: u32) -> Result<CheckOutcome, CliError> {
    let mut t = Tally::new();
    let mut ids = vec![
        RelationId::Decoupling,
        RelationId::ChainA,
        RelationId::ChainB,
        RelationId::Harmonic,
    ];
    for depth in 1..=contfrac_depth {
        ids.push(RelationId::ContFrac(depth));
    }
    ids.push(RelationId::LemmaRk);
    ids.push(RelationId::LemmaPowersR);
    let mut rows = Vec::new();
    for id in ids {
        let report = verify_relation(id, order)?;
        t.comparisons += report.coefficients_checked;
        for m in &report.mismatches {
            t.failures.push(format!(
                "{}: coefficient at exponent {} differs: {} != {}",
                report.relation, m.exponent, m.lhs, m.rhs
            ));
        }
        rows.push(json!({
            "relation": report.relation,
            "order": report.order,
            "coefficients_checked": report.coefficients_checked,
            "mismatches": report.mismatches.len(),
        }));
    }
    Ok(t.finish(
        "series.relations",
        json!({ "order": order, "contfrac_depth": contfrac_depth, "relations": rows }),
    ))
}

const PRINTED_ALPHA: [&str; 6] = [
    "1",
    "m1",
    "m2 + m1^2",
    "m3 + 3*m2*m1 + m1^3",
    "m4 + 4*m3*m1 + 3*m2^2 + 5*m2*m1^2 + m1^4",
    "m5 + 5*m4*m1 + 10*m3*m2 + 7*m3*m1^2 + 11*m2^2*m1 + 7*m2*m1^3 + m1^5",
];

const PRINTED_OMEGA: [&str; 6] = [
    "1",
    "2*m1",
    "2*m2 + 4*m1^2",
    "2*m3 + 12*m2*m1 + 6*m1^3",
    "2*m4 + 16*m3*m1 + 12*m2^2 + 32*m2*m1^2 + 8*m1^4",
    "2*m5 + 20*m4*m1 + 40*m3*m2 + 50*m3*m1^2 + 70*m2^2*m1 + 60*m2*m1^3 + 10*m1^5",
];

fn absorb_identity(t: &mut Tally, report: &moments::IdentityReport) {
    t.comparisons += report.checks;
    for f in &report.failures {
        t.failures.push(format!(
            "{}: {} at {}: {} != {}",
            report.label, f.identity, f.site, f.lhs, f.rhs
        ));
    }
}

/// Checks the reference moment tables, the coefficient recurrences, and
/// the bridge from path expectation to the composition sums.
pub fn check_moment_tables(table_max: usize, identity_max: usize) -> Result<CheckOutcome, CliError> {
    let mut t = Tally::new();
    let top = table_max.min(5);
    for n in 0..=top {
        t.eq(
            &format!("reference table alpha_{n}"),
            &moments::alpha(n),
            &p(PRINTED_ALPHA[n]),
        );
        t.eq(
            &format!("reference table omega_{n}"),
            &moments::omega(n),
            &p(PRINTED_OMEGA[n]),
        );
    }
    let recurrences = moments::check_recurrences(identity_max)?;
    absorb_identity(&mut t, &recurrences);
    for n in 0..=top {
        let bridge = moments::expectation_bridge(n)?;
        absorb_identity(&mut t, &bridge);
    }
    Ok(t.finish(
        "moments.tables",
        json!({ "printed_max": top, "identity_max": identity_max }),
    ))
}

const M_FROM_ALPHA: [&str; 5] = [
    "alpha1",
    "alpha2 + -1*alpha1^2",
    "alpha3 + -3*alpha2*alpha1 + 2*alpha1^3",
    "alpha4 + -4*alpha3*alpha1 + 13*alpha2*alpha1^2 + -3*alpha2^2 + -7*alpha1^4",
    "alpha5 + -5*alpha4*alpha1 + -10*alpha3*alpha2 + 23*alpha3*alpha1^2 \
     + 34*alpha2^2*alpha1 + -79*alpha2*alpha1^3 + 36*alpha1^5",
];

const OMEGA_FROM_ALPHA: [&str; 5] = [
    "2*alpha1",
    "2*alpha2 + 2*alpha1^2",
    "2*alpha3 + 6*alpha2*alpha1 + -2*alpha1^3",
    "2*alpha4 + 8*alpha3*alpha1 + -14*alpha2*alpha1^2 + 6*alpha2^2 + 6*alpha1^4",
    "2*alpha5 + 10*alpha4*alpha1 + 20*alpha3*alpha2 + -24*alpha3*alpha1^2 \
     + -42*alpha2^2*alpha1 + 72*alpha2*alpha1^3 + -28*alpha1^5",
];

const M_FROM_OMEGA: [&str; 5] = [
    "1/2*omega1",
    "1/2*omega2 + -1/2*omega1^2",
    "1/2*omega3 + -3/2*omega2*omega1 + 9/8*omega1^3",
    "1/2*omega4 + -2*omega3*omega1 + 7*omega2*omega1^2 + -3/2*omega2^2 + -17/4*omega1^4",
    "1/2*omega5 + -5/2*omega4*omega1 + -5*omega3*omega2 + 95/8*omega3*omega1^2 \
     + 145/8*omega2^2*omega1 + -45*omega2*omega1^3 + 365/16*omega1^5",
];

const ALPHA_FROM_OMEGA: [&str; 5] = [
    "1/2*omega1",
    "1/2*omega2 + -1/4*omega1^2",
    "1/2*omega3 + -3/4*omega2*omega1 + 1/2*omega1^3",
    "1/2*omega4 + -1*omega3*omega1 + -3/4*omega2^2 + 25/8*omega2*omega1^2 + -29/16*omega1^4",
    "1/2*omega5 + -5/4*omega4*omega1 + -5/2*omega3*omega2 + 21/4*omega3*omega1^2 \
     + 33/4*omega2^2*omega1 + -309/16*omega2*omega1^3 + 19/2*omega1^5",
];

fn printed_inversion(target: InversionTarget) -> &'static [&'static str; 5] {
    match target {
        InversionTarget::MFromAlpha => &M_FROM_ALPHA,
        InversionTarget::OmegaFromAlpha => &OMEGA_FROM_ALPHA,
        InversionTarget::MFromOmega => &M_FROM_OMEGA,
        InversionTarget::AlphaFromOmega => &ALPHA_FROM_OMEGA,
    }
}

const CLASS3_ORDER2_WEIGHTS: [(i64, i64); 4] = [(1, 2), (-1, 8), (-1, 4), (-1, 8)];

const CLASS3_ORDER3_WEIGHTS: [(i64, i64); 29] = [
    (1, 2),
    (-1, 4),
    (-1, 4),
    (-3, 8),
    (-3, 8),
    (-1, 8),
    (-1, 8),
    (-1, 8),
    (-1, 8),
    (-1, 16),
    (-1, 16),
    (1, 16),
    (1, 16),
    (1, 16),
    (1, 16),
    (1, 16),
    (1, 16),
    (1, 8),
    (1, 8),
    (3, 32),
    (3, 32),
    (3, 32),
    (3, 32),
    (3, 16),
    (3, 16),
    (1, 32),
    (1, 32),
    (1, 32),
    (1, 32),
];

const CLASS4_ORDER3_COUNT: usize = 11;

fn sorted_rats(entries: &[(i64, i64)]) -> Vec<Rat> {
    let mut v: Vec<Rat> = entries.iter().map(|&(n, d)| rat(n, d)).collect();
    v.sort();
    v
}

fn class_weights(class: TreeClass, total: u32) -> Result<Vec<Rat>, CliError> {
    let mut out = Vec::new();
    for c in compositions(total as usize) {
        for tree in enumerate_trees(class, &c) {
            let w = tree_weight(class, &tree).map_err(|e| CliError::Fail(e.to_string()))?;
            out.push(w);
        }
    }
    Ok(out)
}

/// Checks the tree expansions: printed inversion tables, agreement of the
/// tree route with triangular elimination, the coefficient sum rules, and
/// the pinned small enumerations with their weight multisets.
pub fn check_tree_identities(
    table_max: usize,
    oracle_max: usize,
    sum_max: usize,
) -> Result<CheckOutcome, CliError> {
    let mut t = Tally::new();
    for target in InversionTarget::ALL {
        let table = printed_inversion(target);
        for n in 1..=table_max.min(5) {
            t.eq(
                &format!("reference table {target} at n={n}"),
                &reconstruct(target, n),
                &p(table[n - 1]),
            );
        }
        for n in 1..=oracle_max {
            t.eq(
                &format!("tree route vs elimination for {target} at n={n}"),
                &reconstruct(target, n),
                &invert_oracle(target, n),
            );
        }
    }
    for n in 2..=sum_max {
        let total: Rat = compositions(n)
            .iter()
            .map(|c| phi(TreeClass::Class1, c))
            .sum();
        t.eq(
            &format!("class 1 coefficient sum at n={n}"),
            &total,
            &Rat::zero(),
        );
    }
    for n in 1..=sum_max {
        let total: Rat = compositions(n)
            .iter()
            .map(|c| phi(TreeClass::Class2, c))
            .sum();
        t.eq(
            &format!("class 2 coefficient sum at n={n}"),
            &total,
            &rat_int(2 * n as i64),
        );
    }

    let mut order2 = class_weights(TreeClass::Class3, 2)?;
    t.eq("class 3 tree count at order 2", &order2.len(), &4usize);
    order2.sort();
    t.require(
        "class 3 weight multiset at order 2",
        order2 == sorted_rats(&CLASS3_ORDER2_WEIGHTS),
    );

    let mut order3 = class_weights(TreeClass::Class3, 3)?;
    t.eq("class 3 tree count at order 3", &order3.len(), &29usize);
    order3.sort();
    t.require(
        "class 3 weight multiset at order 3",
        order3 == sorted_rats(&CLASS3_ORDER3_WEIGHTS),
    );

    let comp = |parts: &[u32]| Composition::new(parts.to_vec());
    t.eq(
        "class 3 coefficient at (3)",
        &phi(TreeClass::Class3, &comp(&[3])),
        &rat(1, 2),
    );
    let split3 = phi(TreeClass::Class3, &comp(&[2, 1])) + phi(TreeClass::Class3, &comp(&[1, 2]));
    t.eq("class 3 coefficient sum at (2,1)+(1,2)", &split3, &rat(-3, 2));
    t.eq(
        "class 3 coefficient at (1,1,1)",
        &phi(TreeClass::Class3, &comp(&[1, 1, 1])),
        &rat(9, 8),
    );
    t.eq(
        "class 4 coefficient at (3)",
        &phi(TreeClass::Class4, &comp(&[3])),
        &rat(1, 2),
    );
    let split4 = phi(TreeClass::Class4, &comp(&[2, 1])) + phi(TreeClass::Class4, &comp(&[1, 2]));
    t.eq("class 4 coefficient sum at (2,1)+(1,2)", &split4, &rat(-3, 4));
    t.eq(
        "class 4 coefficient at (1,1,1)",
        &phi(TreeClass::Class4, &comp(&[1, 1, 1])),
        &rat(1, 2),
    );

    let class4_count = class_weights(TreeClass::Class4, 3)?.len();
    t.eq(
        "class 4 tree count at order 3",
        &class4_count,
        &CLASS4_ORDER3_COUNT,
    );

    Ok(t.finish(
        "trees.identities",
        json!({
            "table_max": table_max.min(5),
            "oracle_max": oracle_max,
            "sum_max": sum_max,
            "class4_order3": { "count": class4_count, "expected": CLASS4_ORDER3_COUNT },
        }),
    ))
}

fn standard_distributions() -> Result<Vec<Distribution>, CliError> {
    Ok(vec![
        Distribution::constant(rat_int(1))?,
        Distribution::uniform(rat_int(1))?,
        Distribution::two_point(rat(1, 2), rat_int(1), rat_int(2))?,
    ])
}

/// Checks the exact finite-dimension expectations: the corner entry at
/// even powers, vanishing odd powers, and the interior diagonal rows.
pub fn check_finite_spectra(max_order: usize) -> Result<CheckOutcome, CliError> {
    let mut t = Tally::new();
    for dist in &standard_distributions()? {
        for m in 1..=max_order {
            let reference = evaluate_moment_poly(&moments::alpha(m), dist)?;
            for dim in [m + 1, 2 * m + 3] {
                t.eq(
                    &format!("corner entry at dim={dim}, power={}, dist={dist}", 2 * m),
                    &expected_entry(dim, 2 * m, dist)?,
                    &reference,
                );
            }
            t.require(
                &format!("odd corner entry vanishes at power={}, dist={dist}", 2 * m - 1),
                expected_entry(m + 2, 2 * m - 1, dist)?.is_zero(),
            );
        }
        t.require(
            &format!("odd trace vanishes at power=5, dist={dist}"),
            expected_trace(6, 5, dist)?.is_zero(),
        );
        for (dim, order) in [(5, 2), (7, 3)] {
            let check = interior_row_check(dim, order, dist)?;
            t.require(
                &format!("interior rows at dim={dim}, order={order}, dist={dist}"),
                check.pass,
            );
        }
    }
    Ok(t.finish(
        "spectra.finite",
        json!({ "max_order": max_order, "distributions": ["constant:1", "uniform:1", "two_point:1/2,1,2"] }),
    ))
}

/// Checks the normalized-trace deficits against their boundary bound and
/// the all-ones specialization of both moment sequences.
pub fn check_asymptotics(
    max_order: usize,
    max_dim: usize,
    ones_max: usize,
) -> Result<CheckOutcome, CliError> {
    let mut t = Tally::new();
    let ones = Distribution::constant(rat_int(1))?;
    let dims: Vec<usize> = (1..=max_dim).collect();
    for order in 1..=max_order {
        for row in asymptotic_check(order, &ones, &dims)? {
            t.require(
                &format!("trace deficit at dim={}, order={order}", row.dim),
                row.pass,
            );
        }
    }
    for n in 0..=ones_max {
        t.eq(
            &format!("all-ones alpha at n={n}"),
            &evaluate_moment_poly(&moments::alpha(n), &ones)?,
            &Rat::from_integer(catalan(n)),
        );
        t.eq(
            &format!("all-ones omega at n={n}"),
            &evaluate_moment_poly(&moments::omega(n), &ones)?,
            &Rat::from_integer(central_binomial(n)),
        );
    }
    Ok(t.finish(
        "spectra.asymptotics",
        json!({ "max_order": max_order, "max_dim": max_dim, "all_ones_max": ones_max }),
    ))
}

fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

fn band_check(t: &mut Tally, site: &str, estimate: &McEstimate, exact: f64) -> Value {
    let deviation = (estimate.mean - exact).abs();
    let ok = deviation <= 4.0 * estimate.std_error;
    t.require(
        &format!(
            "{site}: mean {} vs exact {exact} is outside 4 standard errors ({})",
            estimate.mean, estimate.std_error
        ),
        ok,
    );
    json!({
        "mean": estimate.mean,
        "std_error": estimate.std_error,
        "samples": estimate.samples,
        "exact": exact,
        "within_four_std_errors": ok,
    })
}

/// Runs the Monte Carlo side: two seeded estimates against their exact
/// values and the per-sample spectral consistency report.
pub fn check_monte_carlo(seed: u64, samples: u64) -> Result<CheckOutcome, CliError> {
    let mut t = Tally::new();
    let uniform = Distribution::uniform(rat_int(1))?;
    let entry = mc_estimate(McStatistic::Entry { dim: 7, power: 4 }, &uniform, seed, samples)?;
    let entry_exact = rat_to_f64(&expected_entry(7, 4, &uniform)?);
    let entry_detail = band_check(
        &mut t,
        "corner entry estimate at dim=7, power=4",
        &entry,
        entry_exact,
    );
    let trace = mc_estimate(
        McStatistic::Trace { dim: 20, power: 2 },
        &uniform,
        seed,
        samples,
    )?;
    let trace_exact = rat_to_f64(&expected_trace(20, 2, &uniform)?);
    let trace_detail = band_check(
        &mut t,
        "trace estimate at dim=20, power=2",
        &trace,
        trace_exact,
    );
    let tau = tau_consistency(
        30,
        8,
        &uniform,
        seed,
        TAU_SAMPLES,
        TAU_MOMENT_TOLERANCE,
        TAU_WEIGHT_TOLERANCE,
    )?;
    t.require(
        &format!(
            "per-sample measure consistency at dim=30: moment error {}, weight error {}",
            tau.max_moment_error, tau.max_weight_error
        ),
        tau.pass,
    );
    Ok(t.finish(
        "spectra.monte_carlo",
        json!({
            "seed": seed,
            "samples": samples,
            "entry": entry_detail,
            "trace": trace_detail,
            "tau": serde_json::to_value(&tau).map_err(|e| CliError::Fail(e.to_string()))?,
        }),
    ))
}

/// Runs every check with bounds scaled from `max_order`, mirroring the
/// acceptance ranges when `max_order` is 5.
pub fn run_verify(max_order: usize, seed: u64, samples: u64) -> Result<VerifySummary, CliError> {
    let n = max_order;
    let checks = vec![
        check_path_counts((2 * n + 2).min(12))?,
        check_closed_forms((n + 3).min(8))?,
        check_printed_paths()?,
        check_series_relations((2 * n as i64 + 5).min(15), (n as u32).min(4))?,
        check_moment_tables(n.min(5), (n + 1).min(6))?,
        check_tree_identities(n.min(5), (n + 1).min(6), (n + 3).min(8))?,
        check_finite_spectra(n.min(5))?,
        check_asymptotics(3, (8 * n).clamp(4, 40), (2 * n).clamp(2, 10))?,
        check_monte_carlo(seed, samples)?,
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifySummary {
        max_order,
        seed,
        samples,
        pass,
        checks,
    })
}
