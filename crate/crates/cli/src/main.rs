//! `lo-einstein`: solve, classify and verify critical-point censuses, and
//! print catalogs and partition bounds.
//!
//! Exit codes: 0 success, 1 verification mismatch or write failure,
//! 2 usage error or unreadable input, 3 capacity exceeded.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lo_einstein::catalog::{self, PartitionSummary};
use lo_einstein::isometry::{classify, ClassReport};
use lo_einstein::reference::{reference_set, verify_against_reference};
use lo_einstein::solver::{multistart_census, normalize, CriticalPointSet, Normalization, SolverOptions};
use lo_einstein::{Error as CoreError, Metric};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

/// Largest `n` accepted by `solve` without `--allow-large-n`.
const SOLVE_SOFT_CAP: usize = 6;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: std::io::Error },
    #[error("malformed input {path}: {source}")]
    Malformed { path: PathBuf, source: serde_json::Error },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("verification failed")]
    Mismatch,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch | CliError::Output { .. } | CliError::Csv(_) => 1,
            CliError::Core(CoreError::Capacity(_)) => 3,
            CliError::Usage(_) | CliError::Input { .. } | CliError::Malformed { .. } | CliError::Core(_) => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "lo-einstein", version, about = "Invariant Einstein metrics on F^(n+1)/diag(F)")]
struct Cli {
    /// Worker threads for the multistart solver (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find critical points by seeded multistart Newton.
    Solve(SolveArgs),
    /// Group a solve result into isometry classes.
    Classify(ClassifyArgs),
    /// Match a solve result against the bundled reference (n = 2, 3).
    Verify(VerifyArgs),
    /// Partitions, routine Einstein matrices and counts for n.
    Catalog(CatalogArgs),
    /// Partition counts and lower bounds.
    Bounds(BoundsArgs),
    /// The standard matrix and its Einstein rescaling.
    Standard(StandardArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Convention {
    #[value(name = "stilde-n")]
    STildeN,
    #[value(name = "einstein-1")]
    EinsteinOne,
    #[value(name = "unit-volume")]
    UnitVolume,
}

impl From<Convention> for Normalization {
    fn from(c: Convention) -> Self {
        match c {
            Convention::STildeN => Normalization::STildeEqualsN,
            Convention::EinsteinOne => Normalization::EinsteinConstantOne,
            Convention::UnitVolume => Normalization::UnitVolume,
        }
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the result here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Number of random starts (default depends on n).
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Newton convergence threshold on the residual max-norm.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1e-7)]
    dedup_tol: f64,
    #[arg(long, value_enum, default_value_t = Convention::STildeN)]
    convention: Convention,
    /// Permit n above the soft cap of 6.
    #[arg(long)]
    allow_large_n: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    input: PathBuf,
    /// Entry tolerance for equal canonical forms.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    input: PathBuf,
    /// Per-coordinate matching tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    #[arg(short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Emit one row for every value from n through this one.
    #[arg(long)]
    through: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct StandardArgs {
    #[arg(short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Mismatch) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Catalog(a) => catalog_cmd(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Standard(a) => standard(a),
    }
}

fn emit(out: &OutputArgs, json: Vec<u8>, csv: impl FnOnce() -> csv::Result<Vec<u8>>) -> Result<()> {
    let bytes = match out.format {
        Format::Json => json,
        Format::Csv => csv()?,
    };
    match &out.out {
        Some(path) => output::write_atomic(path, &bytes).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        }),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| CliError::Output {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Progress and summaries go to stdout only when the document goes to a file.
fn say(out: &OutputArgs, line: impl AsRef<str>) {
    use std::io::Write;
    // a closed pipe on the summary stream is not an error
    let _ = if out.out.is_some() {
        writeln!(std::io::stdout(), "{}", line.as_ref())
    } else {
        writeln!(std::io::stderr(), "{}", line.as_ref())
    };
}

fn read_points(path: &Path) -> Result<CriticalPointSet> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Malformed {
        path: path.to_path_buf(),
        source,
    })
}

fn solve(a: SolveArgs) -> Result<()> {
    let n = usize::try_from(a.n).map_err(|_| CliError::Usage("n too large".into()))?;
    if n > SOLVE_SOFT_CAP && !a.allow_large_n {
        return Err(CoreError::Capacity(format!(
            "solve is capped at n <= {SOLVE_SOFT_CAP}; pass --allow-large-n to override"
        ))
        .into());
    }
    if !(a.tol > 0.0 && a.dedup_tol > 0.0) {
        return Err(CliError::Usage("tolerances must be positive".into()));
    }
    let mut opts = SolverOptions::for_dimension(n);
    if let Some(s) = a.starts {
        opts.starts = s;
    }
    opts.seed = a.seed;
    opts.newton_tol = a.tol;
    opts.dedup_tol = a.dedup_tol;
    let census = multistart_census(n, &opts)?;
    let convention: Normalization = a.convention.into();
    let points = census.points.iter().map(|p| normalize(p, convention)).collect();
    let set = CriticalPointSet::new(n, convention, points)?;

    say(
        &a.output,
        format!(
            "n = {n}: {} critical points from {} starts ({} converged, {})",
            set.points.len(),
            census.starts,
            census.converged,
            if census.is_saturated() {
                "no new roots in the second half"
            } else {
                "still finding new roots in the second half"
            }
        ),
    );
    say(&a.output, format!("{:>5}  {:>20}  {:>20}  {:>10}", "index", "s_tilde", "volume", "residual"));
    for (k, p) in set.points.iter().enumerate() {
        say(
            &a.output,
            format!("{k:>5}  {:>20.15}  {:>20.15}  {:>10.2e}", p.s_tilde, p.volume, p.residual_norm),
        );
    }
    emit(&a.output, output::to_json(&set), || output::points_csv(&set))
}

fn classify_cmd(a: ClassifyArgs) -> Result<()> {
    let set = read_points(&a.input)?;
    let classes = classify(&set.points, a.tol)?;
    say(&a.output, format!("{} points in {} classes", set.points.len(), classes.len()));
    for (k, c) in classes.iter().enumerate() {
        say(
            &a.output,
            format!("class {k}: volume {:.12}, s_tilde {:.12}, {} members", c.volume, c.s_tilde, c.members.len()),
        );
    }
    let report = ClassReport { classes };
    emit(&a.output, output::to_json(&report), || output::classes_csv(&report))
}

fn verify(a: VerifyArgs) -> Result<()> {
    let set = read_points(&a.input)?;
    let reference = reference_set(set.n)?;
    let report = verify_against_reference(&set.points, reference, a.tol);
    use std::io::Write;
    let mut lines = vec![format!("{}/{} matched", report.matched.len(), reference.points.len())];
    for r in &report.missing {
        lines.push(format!("missing reference row {}", reference.points[*r].label));
    }
    for f in &report.extra {
        let p = &set.points[*f];
        lines.push(format!("extra point {f}: x = {:?}, u = {:?}", p.coords.x, p.coords.u));
    }
    let _ = writeln!(std::io::stdout(), "{}", lines.join("\n"));
    if report.is_exact() {
        Ok(())
    } else {
        Err(CliError::Mismatch)
    }
}

fn catalog_cmd(a: CatalogArgs) -> Result<()> {
    let n = usize::try_from(a.n).map_err(|_| CliError::Usage("n too large".into()))?;
    let cat = catalog::catalog(n)?;
    say(
        &a.output,
        format!(
            "n = {n}: {} partitions, {} routine points",
            cat.partitions.len(),
            cat.routine_points.len()
        ),
    );
    emit(&a.output, output::to_json(&cat), || output::catalog_csv(&cat))
}

#[derive(Serialize)]
struct BoundsTable {
    emhs_lower_constant: f64,
    rows: Vec<PartitionSummary>,
}

fn bounds_cmd(a: BoundsArgs) -> Result<()> {
    let last = a.through.unwrap_or(a.n);
    if last < a.n {
        return Err(CliError::Usage(format!("--through {last} is below -n {}", a.n)));
    }
    let rows = (a.n..=last)
        .map(|n| catalog::bounds(usize::try_from(n).unwrap_or(usize::MAX)))
        .collect::<lo_einstein::Result<Vec<_>>>()?;
    say(&a.output, format!("{:>5}  {:>40}  {:>14}", "n", "p(n)", "maroti"));
    for r in &rows {
        say(&a.output, format!("{:>5}  {:>40}  {:>14.6e}", r.n, r.p_n, r.maroti_bound));
    }
    let table = BoundsTable {
        emhs_lower_constant: catalog::emhs_lower_constant(),
        rows,
    };
    emit(&a.output, output::to_json(&table), || output::bounds_csv(&table.rows))
}

#[derive(Serialize)]
struct StandardReport {
    n: usize,
    standard: Metric,
    einstein: Metric,
    standard_s_tilde: f64,
    einstein_s_tilde: f64,
}

fn standard(a: StandardArgs) -> Result<()> {
    let n = usize::try_from(a.n).map_err(|_| CliError::Usage("n too large".into()))?;
    if n > 1000 {
        return Err(CoreError::Capacity("standard matrices are printed for n <= 1000".into()).into());
    }
    let st: Metric = catalog::standard_matrix(n)?;
    let ei: Metric = catalog::standard_einstein_matrix(n)?;
    let report = StandardReport {
        n,
        standard_s_tilde: lo_einstein::scalar_curvature_triangular(&st),
        einstein_s_tilde: lo_einstein::scalar_curvature_triangular(&ei),
        standard: st,
        einstein: ei,
    };
    emit(&a.output, output::to_json(&report), || {
        output::matrices_csv(&[("standard", &report.standard), ("einstein", &report.einstein)])
    })
}
