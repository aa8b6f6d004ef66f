//! Command-line front end: argument parsing, dispatch into the library,
//! and rendering of every result as text, JSON, or CSV.
//!
//! The JSON form is the canonical machine format: a manifest with the
//! resolved configuration (including seed and sample count) next to the
//! structured result, so runs can be diffed byte for byte.

pub mod verify;

use std::fmt;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigInt, ToPrimitive, Zero};
use serde_json::{json, Value};

use jacobi_moments::lattice::{
    self, catalan, central_binomial, compositions, ClosedForm, Composition, PathKind, WeightKind,
    DEFAULT_ENUMERATION_CAP,
};
use jacobi_moments::moments;
use jacobi_moments::polycore::{rat_int, PolyError, Rat};
use jacobi_moments::series::{verify_relation, RelationId, SeriesError};
use jacobi_moments::spectra::{
    self, Distribution, McStatistic, SpectraError,
};
use jacobi_moments::trees::{
    enumerate_trees, invert_oracle, phi, reconstruct, tree_weight, InversionTarget, TreeClass,
};

/// Exit code when every requested check passes.
pub const EXIT_PASS: u8 = 0;
/// Exit code when a check ran to completion and found a mismatch.
pub const EXIT_FAIL: u8 = 1;
/// Exit code for invalid arguments or malformed inputs.
pub const EXIT_USAGE: u8 = 2;
/// Exit code when a request exceeds an enumeration cap.
pub const EXIT_CAP: u8 = 3;

/// Default bound on the composition total for tree subcommands; tree
/// enumeration grows much faster than path enumeration.
pub const TREE_ORDER_CAP: usize = 10;

/// Errors surfaced to the shell, partitioned by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Rejected input: unknown names, malformed values, impossible sizes.
    Usage(String),
    /// A request exceeded a configured cap; the message names the bound.
    Cap(String),
    /// A computation failed or an internal invariant broke.
    Fail(String),
}

impl CliError {
    #[must_use]
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Fail(_) => EXIT_FAIL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Cap(msg) | CliError::Fail(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<lattice::CapError> for CliError {
    fn from(err: lattice::CapError) -> Self {
        CliError::Cap(err.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(err: SeriesError) -> Self {
        match err {
            SeriesError::Cap(cap) => CliError::Cap(cap.to_string()),
            other => CliError::Fail(other.to_string()),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(err: SpectraError) -> Self {
        match err {
            SpectraError::Cap(cap) => CliError::Cap(cap.to_string()),
            SpectraError::MomentOrder { .. } => CliError::Cap(err.to_string()),
            SpectraError::ParseDistribution { .. }
            | SpectraError::Parameter(_)
            | SpectraError::Dimension { .. }
            | SpectraError::Row { .. } => CliError::Usage(err.to_string()),
            other => CliError::Fail(other.to_string()),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(err: PolyError) -> Self {
        CliError::Fail(err.to_string())
    }
}

/// Output formats for every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Exact statistics and reproducible simulations for random tridiagonal
/// matrices: lattice paths, weight polynomials, moment tables, leveled
/// trees, and spectral checks.
#[derive(Debug, Parser)]
#[command(name = "jmom", version, about, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        env = "JMOM_FORMAT",
        default_value_t = Format::Text
    )]
    pub format: Format,

    /// Base seed for every sampling subcommand.
    #[arg(long, global = true, env = "JMOM_SEED", default_value_t = 1)]
    pub seed: u64,

    /// Number of Monte Carlo samples.
    #[arg(long, global = true, env = "JMOM_SAMPLES", default_value_t = 100_000)]
    pub samples: u64,

    /// Override for the enumeration caps (path half-length, tree order).
    #[arg(long, global = true, env = "JMOM_CAP")]
    pub cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count or list lattice paths and their weights.
    Paths(PathsArgs),
    /// Weight polynomials against their closed forms.
    Weights(WeightsArgs),
    /// Verify series relations coefficient by coefficient.
    Series(SeriesArgs),
    /// Expected weight polynomial tables and identity checks.
    Moments(MomentsArgs),
    /// Leveled trees: enumeration, coefficients, inversion tables.
    #[command(subcommand)]
    Trees(TreesCommand),
    /// Exact and Monte Carlo matrix statistics.
    #[command(subcommand)]
    Spectra(SpectraCommand),
    /// Run the whole verification suite scaled to the given order.
    VerifyAll(VerifyAllArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathFamily {
    /// Nonnegative paths weighted on the upper diagonal symbols.
    Dyck,
    /// Unconstrained paths weighted on both symbol families.
    General,
    /// Nonpositive paths weighted on the lower diagonal symbols.
    Reflected,
}

impl PathFamily {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            PathFamily::Dyck => "dyck",
            PathFamily::General => "general",
            PathFamily::Reflected => "reflected",
        }
    }

    fn kinds(self) -> (PathKind, WeightKind) {
        match self {
            PathFamily::Dyck => (PathKind::Dyck, WeightKind::A),
            PathFamily::General => (PathKind::Generalized, WeightKind::W),
            PathFamily::Reflected => (PathKind::ReflectedDyck, WeightKind::B),
        }
    }
}

#[derive(Debug, Args)]
pub struct PathsArgs {
    /// Path family to enumerate.
    #[arg(long, value_enum, default_value_t = PathFamily::Dyck)]
    pub kind: PathFamily,

    /// Half-length: each path has 2n steps.
    #[arg(short = 'n', long = "n")]
    pub n: usize,

    /// Print only the path count.
    #[arg(long, conflicts_with = "list")]
    pub count: bool,

    /// List every path with its weight monomial.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    A,
    B,
    W,
}

impl FamilyArg {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyArg::A => "a",
            FamilyArg::B => "b",
            FamilyArg::W => "w",
        }
    }
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// Weight polynomial family.
    #[arg(long, value_enum)]
    pub family: FamilyArg,

    /// Polynomial order.
    #[arg(short = 'n', long = "n")]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    All,
    Decoupling,
    ChainA,
    ChainB,
    Harmonic,
    Contfrac,
    LemmaRk,
    LemmaPowersR,
}

impl RelationArg {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            RelationArg::All => "all",
            RelationArg::Decoupling => "decoupling",
            RelationArg::ChainA => "chain-a",
            RelationArg::ChainB => "chain-b",
            RelationArg::Harmonic => "harmonic",
            RelationArg::Contfrac => "contfrac",
            RelationArg::LemmaRk => "lemma-rk",
            RelationArg::LemmaPowersR => "lemma-powers-r",
        }
    }
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Relation to check, or `all`.
    #[arg(long, value_enum, default_value_t = RelationArg::All)]
    pub relation: RelationArg,

    /// Largest inverse power of z to compare.
    #[arg(long, env = "JMOM_MAX_ORDER", default_value_t = 15)]
    pub max_order: i64,

    /// Continued-fraction unrolling depth.
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequenceArg {
    Alpha,
    Omega,
    Both,
}

impl SequenceArg {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            SequenceArg::Alpha => "alpha",
            SequenceArg::Omega => "omega",
            SequenceArg::Both => "both",
        }
    }
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Which sequence to tabulate.
    #[arg(long, value_enum, default_value_t = SequenceArg::Both)]
    pub sequence: SequenceArg,

    /// Largest order in the table.
    #[arg(
        long,
        visible_alias = "max-order",
        env = "JMOM_MAX_ORDER",
        default_value_t = 5
    )]
    pub max: usize,

    /// Also verify the recurrences and the expectation bridge.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Subcommand)]
pub enum TreesCommand {
    /// Enumerate the trees of one class over one composition.
    List(TreesListArgs),
    /// Coefficient tables with the sum identities.
    Phi(TreesPhiArgs),
    /// Inversion polynomials with the elimination cross-check.
    Invert(TreesInvertArgs),
}

#[derive(Debug, Args)]
pub struct TreesListArgs {
    /// Tree class, 1 through 4.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4), default_value_t = 1)]
    pub class: u8,

    /// Target composition as comma-separated parts, e.g. `2,1`.
    #[arg(long)]
    pub composition: String,
}

#[derive(Debug, Args)]
pub struct TreesPhiArgs {
    /// Tree class, 1 through 4.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4), default_value_t = 1)]
    pub class: u8,

    /// Tabulate every composition with total up to this order.
    #[arg(
        long,
        visible_alias = "max-order",
        env = "JMOM_MAX_ORDER",
        default_value_t = 5
    )]
    pub max: usize,

    /// Single composition to evaluate instead of a table.
    #[arg(long, conflicts_with = "max")]
    pub composition: Option<String>,

    /// Also verify the coefficient sum rules.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    MFromAlpha,
    OmegaFromAlpha,
    MFromOmega,
    AlphaFromOmega,
}

impl TargetArg {
    fn target(self) -> InversionTarget {
        match self {
            TargetArg::MFromAlpha => InversionTarget::MFromAlpha,
            TargetArg::OmegaFromAlpha => InversionTarget::OmegaFromAlpha,
            TargetArg::MFromOmega => InversionTarget::MFromOmega,
            TargetArg::AlphaFromOmega => InversionTarget::AlphaFromOmega,
        }
    }

    fn lhs_symbol(self) -> &'static str {
        match self {
            TargetArg::MFromAlpha | TargetArg::MFromOmega => "m",
            TargetArg::OmegaFromAlpha => "omega",
            TargetArg::AlphaFromOmega => "alpha",
        }
    }
}

#[derive(Debug, Args)]
pub struct TreesInvertArgs {
    /// Which sequence to express in which basis.
    #[arg(long, value_enum)]
    pub target: TargetArg,

    /// Largest order to expand.
    #[arg(
        long,
        visible_alias = "max-order",
        env = "JMOM_MAX_ORDER",
        default_value_t = 5
    )]
    pub max: usize,
}

#[derive(Debug, Subcommand)]
pub enum SpectraCommand {
    /// Exact expectations by walk enumeration and moment substitution.
    Exact(SpectraExactArgs),
    /// Monte Carlo estimates next to their exact references.
    Mc(SpectraMcArgs),
    /// Diagonal of an expected even matrix power, row by row.
    Rows(SpectraRowsArgs),
    /// Normalized traces against the averaged-moment limit.
    Asymptotic(SpectraAsymptoticArgs),
    /// Per-sample consistency of walk chains and the spectral measure.
    Tau(SpectraTauArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExactStat {
    /// Expected (1,1) entry of the matrix power.
    Entry,
    /// Expected trace of the matrix power.
    Trace,
}

impl ExactStat {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            ExactStat::Entry => "entry",
            ExactStat::Trace => "trace",
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectraExactArgs {
    /// Statistic to compute.
    #[arg(long, value_enum, default_value_t = ExactStat::Entry)]
    pub stat: ExactStat,

    /// Matrix dimension.
    #[arg(long)]
    pub dim: usize,

    /// Matrix power.
    #[arg(short = 'k', long)]
    pub power: usize,

    /// Entry distribution as `name:params`.
    #[arg(long, env = "JMOM_DIST", default_value = "uniform:1")]
    pub dist: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McStat {
    /// (1,1) entry of the matrix power via matrix-vector products.
    Entry,
    /// Trace of the matrix power via matrix-vector products.
    Trace,
    /// Moment of the spectral measure via diagonalization.
    Spectral,
    /// Moment of the eigenvalue-counting measure via diagonalization.
    Empirical,
}

impl McStat {
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            McStat::Entry => "entry",
            McStat::Trace => "trace",
            McStat::Spectral => "spectral",
            McStat::Empirical => "empirical",
        }
    }

    fn statistic(self, dim: usize, power: usize) -> McStatistic {
        match self {
            McStat::Entry => McStatistic::Entry { dim, power },
            McStat::Trace => McStatistic::Trace { dim, power },
            McStat::Spectral => McStatistic::SpectralMoment { dim, power },
            McStat::Empirical => McStatistic::EmpiricalMoment { dim, power },
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectraMcArgs {
    /// Statistic to estimate.
    #[arg(long, value_enum, default_value_t = McStat::Entry)]
    pub stat: McStat,

    /// Matrix dimension.
    #[arg(long)]
    pub dim: usize,

    /// Matrix power.
    #[arg(short = 'k', long)]
    pub power: usize,

    /// Entry distribution as `name:params`.
    #[arg(long, env = "JMOM_DIST", default_value = "uniform:1")]
    pub dist: String,
}

#[derive(Debug, Args)]
pub struct SpectraRowsArgs {
    /// Matrix dimension; must be at least twice the order plus one.
    #[arg(long)]
    pub dim: usize,

    /// Half the matrix power under the expectation.
    #[arg(long)]
    pub order: usize,

    /// Entry distribution as `name:params`.
    #[arg(long, env = "JMOM_DIST", default_value = "uniform:1")]
    pub dist: String,
}

#[derive(Debug, Args)]
pub struct SpectraAsymptoticArgs {
    /// Half the matrix power under the expectation.
    #[arg(long)]
    pub order: usize,

    /// Tabulate dimensions 1 through this bound.
    #[arg(long, default_value_t = 40)]
    pub max_dim: usize,

    /// Entry distribution as `name:params`.
    #[arg(long, env = "JMOM_DIST", default_value = "constant:1")]
    pub dist: String,
}

#[derive(Debug, Args)]
pub struct SpectraTauArgs {
    /// Matrix dimension.
    #[arg(long, default_value_t = 30)]
    pub dim: usize,

    /// Largest matrix power to compare.
    #[arg(long, default_value_t = 8)]
    pub max_power: usize,

    /// Entry distribution as `name:params`.
    #[arg(long, env = "JMOM_DIST", default_value = "uniform:1")]
    pub dist: String,

    /// Relative tolerance for the chain-versus-spectral comparison.
    #[arg(long, default_value_t = 1e-9)]
    pub moment_tolerance: f64,

    /// Absolute tolerance for the weight sums.
    #[arg(long, default_value_t = 1e-12)]
    pub weight_tolerance: f64,
}

#[derive(Debug, Args)]
pub struct VerifyAllArgs {
    /// Order that scales the bound of every check.
    pub max_order: usize,
}

/// Resolved global flags shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Globals {
    pub format: Format,
    pub seed: u64,
    pub samples: u64,
    pub cap: Option<usize>,
}

/// Final bytes for stdout plus the aggregate pass flag.
#[derive(Debug)]
pub struct RunOutput {
    pub text: String,
    pub pass: bool,
}

struct Rendered {
    command: &'static str,
    config: Value,
    result: Value,
    text: String,
    csv: String,
    pass: bool,
}

fn finish(globals: &Globals, rendered: Rendered) -> RunOutput {
    match globals.format {
        Format::Text => RunOutput {
            text: rendered.text,
            pass: rendered.pass,
        },
        Format::Csv => RunOutput {
            text: rendered.csv,
            pass: rendered.pass,
        },
        Format::Json => {
            let mut config = serde_json::Map::new();
            config.insert("format".into(), json!(globals.format.as_str()));
            config.insert("seed".into(), json!(globals.seed));
            config.insert("samples".into(), json!(globals.samples));
            config.insert("cap".into(), json!(globals.cap));
            if let Value::Object(extra) = rendered.config {
                for (key, value) in extra {
                    config.insert(key, value);
                }
            }
            let doc = json!({
                "command": rendered.command,
                "config": Value::Object(config),
                "result": rendered.result,
                "pass": rendered.pass,
            });
            let body = serde_json::to_string_pretty(&doc).expect("reports are serializable");
            RunOutput {
                text: body + "\n",
                pass: rendered.pass,
            }
        }
    }
}

/// Executes one parsed invocation and renders its output.
pub fn run(cli: Cli) -> Result<RunOutput, CliError> {
    let globals = Globals {
        format: cli.format,
        seed: cli.seed,
        samples: cli.samples,
        cap: cli.cap,
    };
    let rendered = match cli.command {
        Command::Paths(args) => run_paths(&args, &globals)?,
        Command::Weights(args) => run_weights(&args, &globals)?,
        Command::Series(args) => run_series(&args)?,
        Command::Moments(args) => run_moments(&args)?,
        Command::Trees(TreesCommand::List(args)) => run_trees_list(&args, &globals)?,
        Command::Trees(TreesCommand::Phi(args)) => run_trees_phi(&args, &globals)?,
        Command::Trees(TreesCommand::Invert(args)) => run_trees_invert(&args, &globals)?,
        Command::Spectra(SpectraCommand::Exact(args)) => run_spectra_exact(&args)?,
        Command::Spectra(SpectraCommand::Mc(args)) => run_spectra_mc(&args, &globals)?,
        Command::Spectra(SpectraCommand::Rows(args)) => run_spectra_rows(&args)?,
        Command::Spectra(SpectraCommand::Asymptotic(args)) => run_spectra_asymptotic(&args)?,
        Command::Spectra(SpectraCommand::Tau(args)) => run_spectra_tau(&args, &globals)?,
        Command::VerifyAll(args) => run_verify_all(&args, &globals)?,
    };
    Ok(finish(&globals, rendered))
}

fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains(' ') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn rat_approx(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn parse_composition(raw: &str) -> Result<Composition, CliError> {
    let mut parts = Vec::new();
    for token in raw.split(',') {
        let token = token.trim();
        let value: u32 = token.parse().map_err(|_| {
            CliError::Usage(format!(
                "invalid composition `{raw}`: `{token}` is not a positive integer"
            ))
        })?;
        if value == 0 {
            return Err(CliError::Usage(format!(
                "invalid composition `{raw}`: parts must be positive"
            )));
        }
        parts.push(value);
    }
    Ok(Composition::new(parts))
}

fn comp_label(c: &Composition) -> String {
    c.parts()
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn tree_order_guard(total: usize, cap: Option<usize>) -> Result<(), CliError> {
    let cap = cap.unwrap_or(TREE_ORDER_CAP);
    if total > cap {
        return Err(CliError::Cap(format!(
            "size {total} exceeds the tree-order cap of {cap}"
        )));
    }
    Ok(())
}

fn tree_class(index: u8) -> Result<TreeClass, CliError> {
    TreeClass::from_index(index)
        .ok_or_else(|| CliError::Usage(format!("tree class must be 1 through 4, got {index}")))
}

fn parse_distribution(raw: &str) -> Result<Distribution, CliError> {
    raw.parse::<Distribution>().map_err(CliError::from)
}

fn run_paths(args: &PathsArgs, globals: &Globals) -> Result<Rendered, CliError> {
    let cap = globals.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let (path_kind, weight_kind) = args.kind.kinds();
    let count = lattice::count_paths_with_cap(path_kind, args.n, cap)?;
    let closed = match args.kind {
        PathFamily::Dyck | PathFamily::Reflected => catalan(args.n),
        PathFamily::General => central_binomial(args.n),
    };
    let counts_match = BigInt::from(count) == closed;
    let weight = if args.count {
        None
    } else {
        Some(lattice::weight_polynomial_with_cap(weight_kind, args.n, cap)?)
    };
    let listed: Option<Vec<(String, String)>> = if args.list {
        let paths = lattice::enumerate_paths_with_cap(path_kind, args.n, cap)?;
        Some(
            paths
                .iter()
                .map(|p| (p.to_string(), p.weight().to_string()))
                .collect(),
        )
    } else {
        None
    };

    let mut text = String::new();
    if args.count {
        let _ = writeln!(text, "{count}");
    } else {
        let _ = writeln!(text, "kind: {}", args.kind.as_str());
        let _ = writeln!(text, "n: {}", args.n);
        if let Some(rows) = &listed {
            for (steps, monomial) in rows {
                let _ = writeln!(text, "{steps}  {monomial}");
            }
        }
        let _ = writeln!(text, "count: {count}");
        let _ = writeln!(text, "closed form count: {closed}");
        let _ = writeln!(text, "counts match: {}", pass_word(counts_match));
        if let Some(weight) = &weight {
            let _ = writeln!(text, "weight polynomial: {weight}");
        }
    }

    let mut csv = String::new();
    if let Some(rows) = &listed {
        let _ = writeln!(csv, "path,weight");
        for (steps, monomial) in rows {
            let _ = writeln!(csv, "{},{}", csv_field(steps), csv_field(monomial));
        }
    } else {
        let _ = writeln!(csv, "kind,n,count,closed_form,matches");
        let _ = writeln!(
            csv,
            "{},{},{count},{closed},{counts_match}",
            args.kind.as_str(),
            args.n
        );
    }

    let count_value = u64::try_from(count)
        .map(Value::from)
        .unwrap_or_else(|_| Value::from(count.to_string()));
    let mut result = serde_json::Map::new();
    result.insert("count".into(), count_value);
    result.insert("closed_form_count".into(), json!(closed.to_string()));
    result.insert("counts_match".into(), json!(counts_match));
    if let Some(weight) = &weight {
        result.insert("weight_polynomial".into(), json!(weight.to_string()));
    }
    if let Some(rows) = &listed {
        result.insert(
            "paths".into(),
            Value::Array(
                rows.iter()
                    .map(|(steps, monomial)| json!({ "steps": steps, "weight": monomial }))
                    .collect(),
            ),
        );
    }

    Ok(Rendered {
        command: "paths",
        config: json!({
            "kind": args.kind.as_str(),
            "n": args.n,
            "count": args.count,
            "list": args.list,
        }),
        result: Value::Object(result),
        text,
        csv,
        pass: counts_match,
    })
}

fn run_weights(args: &WeightsArgs, globals: &Globals) -> Result<Rendered, CliError> {
    let cap = globals.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let (weight_kind, forms): (WeightKind, Vec<(&str, ClosedForm)>) = match args.family {
        FamilyArg::A => (
            WeightKind::A,
            vec![
                ("continued_fraction", ClosedForm::FlajoletA),
                ("convolution", ClosedForm::TouchardA),
            ],
        ),
        FamilyArg::B => (
            WeightKind::B,
            vec![("continued_fraction", ClosedForm::FlajoletB)],
        ),
        FamilyArg::W => (
            WeightKind::W,
            vec![
                ("pair_sum", ClosedForm::TheoremW),
                ("nested", ClosedForm::NestedW),
            ],
        ),
    };
    let enumerated = lattice::weight_polynomial_with_cap(weight_kind, args.n, cap)?;
    let mut rows = Vec::new();
    let mut pass = true;
    for (name, form) in forms {
        let candidate = lattice::closed_form(form, args.n)?;
        let matches = candidate == enumerated;
        pass &= matches;
        rows.push((name, matches));
    }

    let mut text = String::new();
    let _ = writeln!(text, "family: {}", args.family.as_str());
    let _ = writeln!(text, "n: {}", args.n);
    let _ = writeln!(text, "enumerated: {enumerated}");
    for (name, matches) in &rows {
        let _ = writeln!(text, "{name}: {}", pass_word(*matches));
    }

    let mut csv = String::new();
    let _ = writeln!(csv, "family,n,form,matches");
    for (name, matches) in &rows {
        let _ = writeln!(csv, "{},{},{name},{matches}", args.family.as_str(), args.n);
    }

    Ok(Rendered {
        command: "weights",
        config: json!({ "family": args.family.as_str(), "n": args.n }),
        result: json!({
            "polynomial": enumerated.to_string(),
            "forms": rows
                .iter()
                .map(|(name, matches)| json!({ "form": name, "matches": matches }))
                .collect::<Vec<_>>(),
        }),
        text,
        csv,
        pass,
    })
}

fn run_series(args: &SeriesArgs) -> Result<Rendered, CliError> {
    let mut ids = Vec::new();
    match args.relation {
        RelationArg::All => {
            ids.extend([
                RelationId::Decoupling,
                RelationId::ChainA,
                RelationId::ChainB,
                RelationId::Harmonic,
            ]);
            for depth in 1..=args.depth {
                ids.push(RelationId::ContFrac(depth));
            }
            ids.extend([RelationId::LemmaRk, RelationId::LemmaPowersR]);
        }
        RelationArg::Decoupling => ids.push(RelationId::Decoupling),
        RelationArg::ChainA => ids.push(RelationId::ChainA),
        RelationArg::ChainB => ids.push(RelationId::ChainB),
        RelationArg::Harmonic => ids.push(RelationId::Harmonic),
        RelationArg::Contfrac => ids.push(RelationId::ContFrac(args.depth)),
        RelationArg::LemmaRk => ids.push(RelationId::LemmaRk),
        RelationArg::LemmaPowersR => ids.push(RelationId::LemmaPowersR),
    }

    let mut reports = Vec::new();
    for id in ids {
        reports.push(verify_relation(id, args.max_order)?);
    }
    let pass = reports.iter().all(jacobi_moments::series::RelationReport::pass);

    let mut text = String::new();
    for report in &reports {
        let _ = writeln!(
            text,
            "{}: {} ({} coefficients, order {})",
            report.relation,
            pass_word(report.pass()),
            report.coefficients_checked,
            report.order
        );
        for m in &report.mismatches {
            let _ = writeln!(
                text,
                "  exponent {}: {} != {}",
                m.exponent, m.lhs, m.rhs
            );
        }
    }

    let mut csv = String::new();
    let _ = writeln!(csv, "relation,order,coefficients_checked,mismatches");
    for report in &reports {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            csv_field(&report.relation),
            report.order,
            report.coefficients_checked,
            report.mismatches.len()
        );
    }

    Ok(Rendered {
        command: "series",
        config: json!({
            "relation": args.relation.as_str(),
            "max_order": args.max_order,
            "depth": args.depth,
        }),
        result: json!({
            "reports": serde_json::to_value(&reports).map_err(|e| CliError::Fail(e.to_string()))?,
        }),
        text,
        csv,
        pass,
    })
}

fn run_moments(args: &MomentsArgs) -> Result<Rendered, CliError> {
    let rows = moments::moment_table(args.max);
    let mut text = String::new();
    for row in &rows {
        if matches!(args.sequence, SequenceArg::Alpha | SequenceArg::Both) {
            let _ = writeln!(text, "alpha_{} = {}", row.n, row.alpha);
        }
        if matches!(args.sequence, SequenceArg::Omega | SequenceArg::Both) {
            let _ = writeln!(text, "omega_{} = {}", row.n, row.omega);
        }
    }

    let mut csv = String::new();
    match args.sequence {
        SequenceArg::Both => csv.push_str(&moments::moment_table_csv(args.max)),
        SequenceArg::Alpha => {
            let _ = writeln!(csv, "n,alpha");
            for row in &rows {
                let _ = writeln!(csv, "{},\"{}\"", row.n, row.alpha);
            }
        }
        SequenceArg::Omega => {
            let _ = writeln!(csv, "n,omega");
            for row in &rows {
                let _ = writeln!(csv, "{},\"{}\"", row.n, row.omega);
            }
        }
    }

    let mut pass = true;
    let mut checks = Vec::new();
    if args.check {
        let recurrences = moments::check_recurrences(args.max)?;
        pass &= recurrences.pass();
        let _ = writeln!(
            text,
            "recurrences up to order {}: {} ({} checks)",
            args.max,
            pass_word(recurrences.pass()),
            recurrences.checks
        );
        checks.push(recurrences);
        for n in 0..=args.max {
            let bridge = moments::expectation_bridge(n)?;
            pass &= bridge.pass();
            let _ = writeln!(
                text,
                "expectation bridge at n={n}: {} ({} checks)",
                pass_word(bridge.pass()),
                bridge.checks
            );
            checks.push(bridge);
        }
        for report in &checks {
            for failure in &report.failures {
                let _ = writeln!(
                    text,
                    "  {}: {} at {}: {} != {}",
                    report.label, failure.identity, failure.site, failure.lhs, failure.rhs
                );
            }
        }
    }

    let mut result = serde_json::Map::new();
    result.insert(
        "table".into(),
        Value::Array(
            rows.iter()
                .map(|row| {
                    let mut entry = serde_json::Map::new();
                    entry.insert("n".into(), json!(row.n));
                    if matches!(args.sequence, SequenceArg::Alpha | SequenceArg::Both) {
                        entry.insert("alpha".into(), json!(row.alpha.to_string()));
                    }
                    if matches!(args.sequence, SequenceArg::Omega | SequenceArg::Both) {
                        entry.insert("omega".into(), json!(row.omega.to_string()));
                    }
                    Value::Object(entry)
                })
                .collect(),
        ),
    );
    if args.check {
        result.insert(
            "checks".into(),
            serde_json::to_value(&checks).map_err(|e| CliError::Fail(e.to_string()))?,
        );
    }

    Ok(Rendered {
        command: "moments",
        config: json!({
            "sequence": args.sequence.as_str(),
            "max": args.max,
            "check": args.check,
        }),
        result: Value::Object(result),
        text,
        csv,
        pass,
    })
}

fn run_trees_list(args: &TreesListArgs, globals: &Globals) -> Result<Rendered, CliError> {
    let class = tree_class(args.class)?;
    let composition = parse_composition(&args.composition)?;
    tree_order_guard(composition.total() as usize, globals.cap)?;
    let trees = enumerate_trees(class, &composition);
    let mut rows = Vec::new();
    for tree in &trees {
        let weight = tree_weight(class, tree).map_err(|e| CliError::Fail(e.to_string()))?;
        rows.push((tree, weight));
    }

    let mut text = String::new();
    let _ = writeln!(text, "class: {class}");
    let _ = writeln!(text, "composition: {}", comp_label(&composition));
    let _ = writeln!(text, "count: {}", rows.len());
    for (index, (tree, weight)) in rows.iter().enumerate() {
        let _ = writeln!(text, "tree {} (weight {weight}):", index + 1);
        text.push_str(&tree.render_text());
    }

    let mut csv = String::new();
    let _ = writeln!(csv, "index,weight,height");
    for (index, (tree, weight)) in rows.iter().enumerate() {
        let _ = writeln!(csv, "{},{},{}", index + 1, csv_field(&weight.to_string()), tree.height());
    }

    Ok(Rendered {
        command: "trees-list",
        config: json!({
            "class": args.class,
            "composition": comp_label(&composition),
        }),
        result: json!({
            "count": rows.len(),
            "trees": rows
                .iter()
                .map(|(tree, weight)| {
                    json!({
                        "weight": weight.to_string(),
                        "levels": serde_json::to_value(tree).expect("trees are serializable"),
                    })
                })
                .collect::<Vec<_>>(),
        }),
        text,
        csv,
        pass: true,
    })
}

fn run_trees_phi(args: &TreesPhiArgs, globals: &Globals) -> Result<Rendered, CliError> {
    let class = tree_class(args.class)?;
    let mut rows: Vec<(usize, Composition, Rat)> = Vec::new();
    if let Some(raw) = &args.composition {
        let composition = parse_composition(raw)?;
        tree_order_guard(composition.total() as usize, globals.cap)?;
        let value = phi(class, &composition);
        rows.push((composition.total() as usize, composition, value));
    } else {
        tree_order_guard(args.max, globals.cap)?;
        for n in 1..=args.max {
            for composition in compositions(n) {
                let value = phi(class, &composition);
                rows.push((n, composition, value));
            }
        }
    }

    let mut sums: Vec<(usize, Rat)> = Vec::new();
    if args.composition.is_none() {
        for n in 1..=args.max {
            let total = rows
                .iter()
                .filter(|(order, _, _)| *order == n)
                .map(|(_, _, v)| v.clone())
                .sum::<Rat>();
            sums.push((n, total));
        }
    }

    let mut pass = true;
    let mut rule_lines = Vec::new();
    if args.check {
        for (n, total) in &sums {
            let expected = match class {
                TreeClass::Class1 if *n >= 2 => Some(Rat::zero()),
                TreeClass::Class2 => Some(rat_int(2 * *n as i64)),
                _ => None,
            };
            if let Some(expected) = expected {
                let ok = *total == expected;
                pass &= ok;
                rule_lines.push((*n, total.clone(), expected, ok));
            }
        }
    }

    let mut text = String::new();
    let _ = writeln!(text, "class: {class}");
    for (_, composition, value) in &rows {
        let _ = writeln!(text, "phi_{class}({}) = {value}", comp_label(composition));
    }
    for (n, total) in &sums {
        let _ = writeln!(text, "sum at n={n}: {total}");
    }
    for (n, total, expected, ok) in &rule_lines {
        let _ = writeln!(
            text,
            "sum rule at n={n}: {} (got {total}, want {expected})",
            pass_word(*ok)
        );
    }

    let mut csv = String::new();
    let _ = writeln!(csv, "class,n,composition,phi");
    for (n, composition, value) in &rows {
        let _ = writeln!(
            csv,
            "{},{n},{},{}",
            args.class,
            csv_field(&comp_label(composition)),
            csv_field(&value.to_string())
        );
    }

    let mut result = serde_json::Map::new();
    result.insert(
        "rows".into(),
        Value::Array(
            rows.iter()
                .map(|(n, composition, value)| {
                    json!({
                        "n": n,
                        "composition": comp_label(composition),
                        "phi": value.to_string(),
                    })
                })
                .collect(),
        ),
    );
    if !sums.is_empty() {
        result.insert(
            "sums".into(),
            Value::Array(
                sums.iter()
                    .map(|(n, total)| json!({ "n": n, "sum": total.to_string() }))
                    .collect(),
            ),
        );
    }
    if args.check {
        result.insert(
            "sum_rules".into(),
            Value::Array(
                rule_lines
                    .iter()
                    .map(|(n, total, expected, ok)| {
                        json!({
                            "n": n,
                            "sum": total.to_string(),
                            "expected": expected.to_string(),
                            "pass": ok,
                        })
                    })
                    .collect(),
            ),
        );
    }

    Ok(Rendered {
        command: "trees-phi",
        config: json!({
            "class": args.class,
            "max": args.max,
            "composition": args.composition,
            "check": args.check,
        }),
        result: Value::Object(result),
        text,
        csv,
        pass,
    })
}

fn run_trees_invert(args: &TreesInvertArgs, globals: &Globals) -> Result<Rendered, CliError> {
    tree_order_guard(args.max, globals.cap)?;
    let target = args.target.target();
    let mut rows = Vec::new();
    let mut pass = true;
    for n in 1..=args.max {
        let polynomial = reconstruct(target, n);
        let matches = polynomial == invert_oracle(target, n);
        pass &= matches;
        rows.push((n, polynomial, matches));
    }

    let mut text = String::new();
    for (n, polynomial, matches) in &rows {
        let _ = writeln!(
            text,
            "{}_{n} = {polynomial} (cross-check: {})",
            args.target.lhs_symbol(),
            pass_word(*matches)
        );
    }

    let mut csv = String::new();
    let _ = writeln!(csv, "target,n,polynomial,matches");
    for (n, polynomial, matches) in &rows {
        let _ = writeln!(
            csv,
            "{},{n},\"{polynomial}\",{matches}",
            target
        );
    }

    Ok(Rendered {
        command: "trees-invert",
        config: json!({ "target": target.to_string(), "max": args.max }),
        result: json!({
            "rows": rows
                .iter()
                .map(|(n, polynomial, matches)| {
                    json!({
                        "n": n,
                        "polynomial": polynomial.to_string(),
                        "matches_elimination": matches,
                    })
                })
                .collect::<Vec<_>>(),
        }),
        text,
        csv,
        pass,
    })
}

fn run_spectra_exact(args: &SpectraExactArgs) -> Result<Rendered, CliError> {
    let dist = parse_distribution(&args.dist)?;
    let value = match args.stat {
        ExactStat::Entry => spectra::expected_entry(args.dim, args.power, &dist)?,
        ExactStat::Trace => spectra::expected_trace(args.dim, args.power, &dist)?,
    };

    let mut text = String::new();
    let _ = writeln!(text, "stat: {}", args.stat.as_str());
    let _ = writeln!(text, "dim: {}", args.dim);
    let _ = writeln!(text, "power: {}", args.power);
    let _ = writeln!(text, "dist: {dist}");
    let _ = writeln!(text, "exact: {value} (~{})", rat_approx(&value));

    let mut csv = String::new();
    let _ = writeln!(csv, "kind,n,k,dist,exact,mc_mean,mc_stderr,N,seed");
    let _ = writeln!(
        csv,
        "{},{},{},{},{},,,,",
        args.stat.as_str(),
        args.dim,
        args.power,
        csv_field(&dist.to_string()),
        csv_field(&value.to_string())
    );

    Ok(Rendered {
        command: "spectra-exact",
        config: json!({
            "stat": args.stat.as_str(),
            "dim": args.dim,
            "power": args.power,
            "dist": dist.to_string(),
        }),
        result: json!({
            "exact": value.to_string(),
            "exact_f64": rat_approx(&value),
        }),
        text,
        csv,
        pass: true,
    })
}

fn run_spectra_mc(args: &SpectraMcArgs, globals: &Globals) -> Result<Rendered, CliError> {
    let dist = parse_distribution(&args.dist)?;
    let statistic = args.stat.statistic(args.dim, args.power);
    let estimate = spectra::mc_estimate(statistic, &dist, globals.seed, globals.samples)?;
    let exact = match args.stat {
        McStat::Entry | McStat::Spectral => spectra::expected_entry(args.dim, args.power, &dist)?,
        McStat::Trace => spectra::expected_trace(args.dim, args.power, &dist)?,
        McStat::Empirical => {
            spectra::expected_trace(args.dim, args.power, &dist)? / rat_int(args.dim as i64)
        }
    };
    let exact_f64 = rat_approx(&exact);
    let deviation = (estimate.mean - exact_f64).abs();
    let within = deviation <= 4.0 * estimate.std_error;

    let mut text = String::new();
    let _ = writeln!(text, "stat: {}", args.stat.as_str());
    let _ = writeln!(text, "dim: {}", args.dim);
    let _ = writeln!(text, "power: {}", args.power);
    let _ = writeln!(text, "dist: {dist}");
    let _ = writeln!(text, "samples: {}", estimate.samples);
    let _ = writeln!(text, "seed: {}", globals.seed);
    let _ = writeln!(text, "exact: {exact} (~{exact_f64})");
    let _ = writeln!(text, "mean: {}", estimate.mean);
    let _ = writeln!(text, "std error: {}", estimate.std_error);
    let _ = writeln!(text, "within four std errors: {}", pass_word(within));

    let mut csv = String::new();
    let _ = writeln!(csv, "kind,n,k,dist,exact,mc_mean,mc_stderr,N,seed");
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{},{},{}",
        args.stat.as_str(),
        args.dim,
        args.power,
        csv_field(&dist.to_string()),
        csv_field(&exact.to_string()),
        estimate.mean,
        estimate.std_error,
        estimate.samples,
        globals.seed
    );

    Ok(Rendered {
        command: "spectra-mc",
        config: json!({
            "stat": args.stat.as_str(),
            "dim": args.dim,
            "power": args.power,
            "dist": dist.to_string(),
        }),
        result: json!({
            "exact": exact.to_string(),
            "exact_f64": exact_f64,
            "mean": estimate.mean,
            "std_error": estimate.std_error,
            "samples": estimate.samples,
            "within_four_std_errors": within,
        }),
        text,
        csv,
        pass: within,
    })
}

fn run_spectra_rows(args: &SpectraRowsArgs) -> Result<Rendered, CliError> {
    let dist = parse_distribution(&args.dist)?;
    let check = spectra::interior_row_check(args.dim, args.order, &dist)?;

    let mut text = String::new();
    let _ = writeln!(text, "dim: {}", check.dim);
    let _ = writeln!(text, "order: {}", check.order);
    let _ = writeln!(text, "dist: {dist}");
    for (row, value) in check.rows.iter().enumerate() {
        let _ = writeln!(text, "row {row}: {value}");
    }
    let _ = writeln!(text, "corner value: {}", check.alpha);
    let _ = writeln!(text, "interior value: {}", check.omega);
    let _ = writeln!(text, "result: {}", pass_word(check.pass));

    Ok(Rendered {
        command: "spectra-rows",
        config: json!({
            "dim": args.dim,
            "order": args.order,
            "dist": dist.to_string(),
        }),
        result: serde_json::to_value(&check).map_err(|e| CliError::Fail(e.to_string()))?,
        text,
        csv: spectra::row_check_csv(&check),
        pass: check.pass,
    })
}

fn run_spectra_asymptotic(args: &SpectraAsymptoticArgs) -> Result<Rendered, CliError> {
    let dist = parse_distribution(&args.dist)?;
    let dims: Vec<usize> = (1..=args.max_dim).collect();
    let rows = spectra::asymptotic_check(args.order, &dist, &dims)?;
    let pass = rows.iter().all(|row| row.pass);

    let mut text = String::new();
    let _ = writeln!(text, "order: {}", args.order);
    let _ = writeln!(text, "dist: {dist}");
    for row in &rows {
        let _ = writeln!(
            text,
            "dim {}: normalized trace {}, deficit {} (bound {}) {}",
            row.dim,
            row.normalized_trace,
            row.deficit,
            row.bound,
            pass_word(row.pass)
        );
    }

    Ok(Rendered {
        command: "spectra-asymptotic",
        config: json!({
            "order": args.order,
            "max_dim": args.max_dim,
            "dist": dist.to_string(),
        }),
        result: serde_json::to_value(&rows).map_err(|e| CliError::Fail(e.to_string()))?,
        text,
        csv: spectra::asymptotic_csv(&rows),
        pass,
    })
}

fn run_spectra_tau(args: &SpectraTauArgs, globals: &Globals) -> Result<Rendered, CliError> {
    let dist = parse_distribution(&args.dist)?;
    let report = spectra::tau_consistency(
        args.dim,
        args.max_power,
        &dist,
        globals.seed,
        globals.samples,
        args.moment_tolerance,
        args.weight_tolerance,
    )?;

    let mut text = String::new();
    let _ = writeln!(text, "dim: {}", report.dim);
    let _ = writeln!(text, "max power: {}", report.max_power);
    let _ = writeln!(text, "dist: {dist}");
    let _ = writeln!(text, "samples: {}", report.samples);
    let _ = writeln!(text, "max moment error: {}", report.max_moment_error);
    let _ = writeln!(text, "max weight error: {}", report.max_weight_error);
    let _ = writeln!(text, "min eigenvalue gap: {}", report.min_eigen_gap);
    let _ = writeln!(text, "result: {}", pass_word(report.pass));

    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "dim,max_power,samples,max_moment_error,max_weight_error,min_eigen_gap,pass"
    );
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{}",
        report.dim,
        report.max_power,
        report.samples,
        report.max_moment_error,
        report.max_weight_error,
        report.min_eigen_gap,
        report.pass
    );

    Ok(Rendered {
        command: "spectra-tau",
        config: json!({
            "dim": args.dim,
            "max_power": args.max_power,
            "dist": dist.to_string(),
            "moment_tolerance": args.moment_tolerance,
            "weight_tolerance": args.weight_tolerance,
        }),
        result: serde_json::to_value(&report).map_err(|e| CliError::Fail(e.to_string()))?,
        text,
        csv,
        pass: report.pass,
    })
}

fn run_verify_all(args: &VerifyAllArgs, globals: &Globals) -> Result<Rendered, CliError> {
    let summary = verify::run_verify(args.max_order, globals.seed, globals.samples)?;

    let mut text = String::new();
    let mut comparisons = 0;
    for check in &summary.checks {
        comparisons += check.comparisons;
        let _ = writeln!(
            text,
            "{} {}: {} comparisons",
            if check.pass { "PASS" } else { "FAIL" },
            check.id,
            check.comparisons
        );
        for failure in &check.failures {
            let _ = writeln!(text, "  {failure}");
        }
    }
    let _ = writeln!(
        text,
        "RESULT: {} ({} checks, {comparisons} comparisons)",
        if summary.pass { "PASS" } else { "FAIL" },
        summary.checks.len()
    );

    let mut csv = String::new();
    let _ = writeln!(csv, "id,pass,comparisons,failures");
    for check in &summary.checks {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            check.id,
            check.pass,
            check.comparisons,
            check.failures.len()
        );
    }

    let pass = summary.pass;
    Ok(Rendered {
        command: "verify-all",
        config: json!({ "max_order": args.max_order }),
        result: serde_json::to_value(&summary).map_err(|e| CliError::Fail(e.to_string()))?,
        text,
        csv,
        pass,
    })
}
