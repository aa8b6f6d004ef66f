//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line (visible with `--nocapture`) and asserting the result.

use std::process::Command;

use jmom::verify::{self, CheckOutcome};

fn report(number: u32, outcome: &CheckOutcome) {
    let status = if outcome.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {number:2}: {status} [{}] ({} comparisons)",
        outcome.id, outcome.comparisons
    );
    assert!(
        outcome.pass,
        "criterion {number} failed:\n{}",
        outcome.failures.join("\n")
    );
}

#[test]
fn criterion_01_path_counts() {
    report(1, &verify::check_path_counts(12).expect("check runs"));
}

#[test]
fn criterion_02_closed_forms() {
    report(2, &verify::check_closed_forms(8).expect("check runs"));
}

#[test]
fn criterion_03_reference_tables_and_figure_paths() {
    report(3, &verify::check_printed_paths().expect("check runs"));
}

#[test]
fn criterion_04_series_relations() {
    report(4, &verify::check_series_relations(15, 4).expect("check runs"));
}

#[test]
fn criterion_05_moment_tables_and_recurrences() {
    report(5, &verify::check_moment_tables(5, 6).expect("check runs"));
}

#[test]
fn criterion_06_tree_theorems() {
    report(6, &verify::check_tree_identities(5, 6, 8).expect("check runs"));
}

#[test]
fn criterion_07_finite_spectra() {
    report(7, &verify::check_finite_spectra(5).expect("check runs"));
}

#[test]
fn criterion_08_asymptotics() {
    report(8, &verify::check_asymptotics(3, 40, 10).expect("check runs"));
}

#[test]
fn criterion_09_monte_carlo() {
    report(9, &verify::check_monte_carlo(1, 100_000).expect("check runs"));
}

#[test]
fn criterion_10_reproducibility() {
    let outputs: Vec<Vec<u8>> = [None, None, Some("1"), Some("4")]
        .iter()
        .map(|threads| {
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_jmom"));
            cmd.args(["verify-all", "5", "--format", "json"]);
            for var in [
                "JMOM_FORMAT",
                "JMOM_SEED",
                "JMOM_SAMPLES",
                "JMOM_CAP",
                "JMOM_MAX_ORDER",
                "JMOM_DIST",
                "RAYON_NUM_THREADS",
            ] {
                cmd.env_remove(var);
            }
            if let Some(threads) = threads {
                cmd.env("RAYON_NUM_THREADS", threads);
            }
            let out = cmd.output().expect("the binary runs");
            assert!(
                out.status.success(),
                "verify-all 5 exited nonzero: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        })
        .collect();
    let identical = outputs.windows(2).all(|pair| pair[0] == pair[1]);
    let status = if identical { "PASS" } else { "FAIL" };
    println!("criterion 10: {status} [reproducibility] (4 runs compared)");
    assert!(
        identical,
        "verify-all 5 JSON differs across repeated runs or thread counts"
    );
}
