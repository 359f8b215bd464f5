//! Command-line surface: run two-sample tests on CSV data, drive Monte
//! Carlo simulation studies, and emit the exact null calibration curve.
//!
//! Exit codes: 0 success, 2 input errors (bad CSV, bad config, missing
//! files), 3 domain errors (invalid parameter values), 4 internal
//! invariant violation.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use smoothtest::basis::{BasisKind, BasisSystem};
use smoothtest::empirical::{MultiSample, UniSample};
use smoothtest::multitest::ms_test;
use smoothtest::numerics::{normal_cdf, OptimConfig, RngStream};
use smoothtest::simlab::{rows_to_csv, SimConfig};
use smoothtest::unitest::{bgx_test, cvm_test, ks_test, smooth_test, TestReport};
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "smoothtest",
    about = "Two-sample distribution-equality tests and simulation studies",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Univariate two-sample test on two single-column CSV files
    TestUni(TestUniArgs),
    /// Multivariate projection-pursuit smooth test on two CSV files
    TestMulti(TestMultiArgs),
    /// Run a simulation study from an experiment config file
    Simulate(SimulateArgs),
    /// Emit the exact null CDF (2 Phi(t) - 1)^d as plot-ready CSV
    Nullcdf(NullcdfArgs),
}

#[derive(Args)]
struct TestUniArgs {
    /// CSV with one numeric column (optional `value` header)
    x: PathBuf,
    y: PathBuf,
    /// smooth | ks | cvm | bgx
    #[arg(long, default_value = "smooth")]
    method: String,
    /// trig | legendre
    #[arg(long, default_value = "trig")]
    basis: String,
    /// Basis truncation; defaults to 10 (smooth) or 4 (bgx)
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Permutation replicates for ks/cvm calibration
    #[arg(long, default_value_t = 999)]
    perm: usize,
    /// Seed (falls back to SMOOTHTEST_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TestMultiArgs {
    /// CSV with p numeric columns of consistent width
    x: PathBuf,
    y: PathBuf,
    #[arg(long, default_value = "trig")]
    basis: String,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Multiplier-bootstrap replicates
    #[arg(long = "B", default_value_t = 500)]
    bootstrap: usize,
    /// Sphere-search restarts
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config file (`key = value` grammar)
    config: PathBuf,
    /// Output directory for the rate CSV and manifest
    #[arg(long)]
    out: PathBuf,
    /// Replicate parallelism width
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct NullcdfArgs {
    #[arg(long)]
    d: usize,
    /// Grid: `start:stop:count` or a comma-separated list of t values
    #[arg(long, default_value = "0:4:81")]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// CLI failure with its exit-code class.
enum CliError {
    Input(String),
    Domain(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
        }
    }
}

impl From<smoothtest::Error> for CliError {
    fn from(e: smoothtest::Error) -> Self {
        match e {
            smoothtest::Error::Input(m) => CliError::Input(m),
            smoothtest::Error::Domain(m) => CliError::Domain(m),
            smoothtest::Error::NonFinite(m) => CliError::Domain(m),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = std::panic::catch_unwind(|| match cli.command {
        Command::TestUni(args) => cmd_test_uni(args),
        Command::TestMulti(args) => cmd_test_multi(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Nullcdf(args) => cmd_nullcdf(args),
    });
    match run {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("smoothtest: {e}");
            match e {
                CliError::Input(_) => ExitCode::from(2),
                CliError::Domain(_) => ExitCode::from(3),
            }
        }
        Err(_) => {
            eprintln!("smoothtest: internal invariant violation");
            ExitCode::from(4)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("SMOOTHTEST_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

#[derive(Serialize)]
struct UniConfigEcho {
    command: &'static str,
    x: String,
    y: String,
    method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    perm: Option<usize>,
    seed: u64,
}

#[derive(Serialize)]
struct MultiConfigEcho {
    command: &'static str,
    x: String,
    y: String,
    basis: String,
    d: usize,
    alpha: f64,
    bootstrap: usize,
    restarts: usize,
    seed: u64,
}

#[derive(Serialize)]
struct ReportEnvelope<C: Serialize> {
    config: C,
    report: TestReport,
}

fn cmd_test_uni(args: TestUniArgs) -> CliResult<()> {
    let x = read_uni_csv(&args.x)?;
    let y = read_uni_csv(&args.y)?;
    let seed = resolve_seed(args.seed);
    let stream = RngStream::new(seed, 0);
    let kind: BasisKind = args.basis.parse().map_err(CliError::from)?;

    let (report, basis_used, d_used, perm_used) = match args.method.as_str() {
        "smooth" => {
            let d = args.d.unwrap_or(10);
            let basis = BasisSystem::new(kind, d)?;
            (smooth_test(&x, &y, &basis, args.alpha)?, Some(kind), Some(d), None)
        }
        "bgx" => {
            let d = args.d.unwrap_or(4);
            let basis = BasisSystem::new(kind, d)?;
            (bgx_test(&x, &y, &basis, args.alpha)?, Some(kind), Some(d), None)
        }
        "ks" => (
            ks_test(&x, &y, args.alpha, args.perm, &stream)?,
            None,
            None,
            Some(args.perm),
        ),
        "cvm" => (
            cvm_test(&x, &y, args.alpha, args.perm, &stream)?,
            None,
            None,
            Some(args.perm),
        ),
        other => {
            return Err(CliError::Domain(format!(
                "method must be smooth|ks|cvm|bgx, got {other}"
            )))
        }
    };

    let envelope = ReportEnvelope {
        config: UniConfigEcho {
            command: "test-uni",
            x: args.x.display().to_string(),
            y: args.y.display().to_string(),
            method: args.method.clone(),
            basis: basis_used.map(|k| k.to_string()),
            d: d_used,
            alpha: args.alpha,
            perm: perm_used,
            seed,
        },
        report,
    };
    emit_json(&envelope, args.out.as_deref())
}

fn cmd_test_multi(args: TestMultiArgs) -> CliResult<()> {
    let x = read_multi_csv(&args.x)?;
    let y = read_multi_csv(&args.y)?;
    if x.dim() != y.dim() {
        return Err(CliError::Input(format!(
            "column width mismatch: {} has {} columns, {} has {}",
            args.x.display(),
            x.dim(),
            args.y.display(),
            y.dim()
        )));
    }
    let seed = resolve_seed(args.seed);
    let stream = RngStream::new(seed, 0);
    let kind: BasisKind = args.basis.parse().map_err(CliError::from)?;
    let basis = BasisSystem::new(kind, args.d)?;
    let cfg = OptimConfig {
        restarts: args.restarts,
        ..OptimConfig::default()
    };
    let report = ms_test(&x, &y, &basis, args.alpha, args.bootstrap, &cfg, &stream)?;
    let envelope = ReportEnvelope {
        config: MultiConfigEcho {
            command: "test-multi",
            x: args.x.display().to_string(),
            y: args.y.display().to_string(),
            basis: kind.to_string(),
            d: args.d,
            alpha: args.alpha,
            bootstrap: args.bootstrap,
            restarts: args.restarts,
            seed,
        },
        report,
    };
    emit_json(&envelope, args.out.as_deref())
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    let mut cfg = SimConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.experiment.seed = seed;
    }
    let rows = cfg.run(args.jobs)?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))?;
    let stem = args
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "experiment".to_string());
    let csv_path = args.out.join(format!("{stem}.csv"));
    let manifest_path = args.out.join(format!("{stem}_manifest.cfg"));

    write_file(&csv_path, &rows_to_csv(&rows))?;
    let manifest = format!(
        "# resolved configuration; rerun with `smoothtest simulate` to reproduce\n{}# output = {}\n",
        cfg.resolved(),
        csv_path.display()
    );
    write_file(&manifest_path, &manifest)?;
    println!("{}", csv_path.display());
    println!("{}", manifest_path.display());
    Ok(())
}

fn cmd_nullcdf(args: NullcdfArgs) -> CliResult<()> {
    if args.d < 1 {
        return Err(CliError::Domain("d must be >= 1".into()));
    }
    let grid = parse_grid(&args.grid)?;
    let mut out = String::from("t,p\n");
    for t in grid {
        if t < 0.0 {
            return Err(CliError::Domain(format!("grid value {t} is negative")));
        }
        let p = (2.0 * normal_cdf(t) - 1.0).powi(args.d as i32);
        out.push_str(&format!("{t},{p}\n"));
    }
    match args.out.as_deref() {
        Some(path) => write_file(path, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Input(format!(
                "grid `{s}` must be start:stop:count"
            )));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| CliError::Input(format!("grid start `{}`", parts[0])))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| CliError::Input(format!("grid stop `{}`", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| CliError::Input(format!("grid count `{}`", parts[2])))?;
        if count < 2 || stop <= start {
            return Err(CliError::Input(
                "grid needs count >= 2 and stop > start".into(),
            ));
        }
        Ok((0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect())
    } else {
        s.split(',')
            .map(|tok| {
                tok.trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("grid value `{tok}`")))
            })
            .collect()
    }
}

fn emit_json<C: Serialize>(envelope: &ReportEnvelope<C>, out: Option<&Path>) -> CliResult<()> {
    let mut json = serde_json::to_string_pretty(envelope)
        .map_err(|e| CliError::Input(format!("serialization: {e}")))?;
    json.push('\n');
    match out {
        Some(path) => write_file(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    std::fs::write(path, content).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// One numeric column; a non-numeric first row is accepted as a header.
fn read_uni_csv(path: &Path) -> CliResult<UniSample> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    let mut first_data_row = true;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) => {
                values.push(v);
                first_data_row = false;
            }
            Err(_) if first_data_row => {
                // header row (conventionally `value`)
                first_data_row = false;
            }
            Err(_) => {
                return Err(CliError::Input(format!(
                    "{} line {}: cannot parse `{line}` as a number",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    UniSample::new(values).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// p comma-separated numeric columns of consistent width; a non-numeric
/// first row is accepted as a header.
fn read_multi_csv(path: &Path) -> CliResult<MultiSample> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut saw_header_or_row = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect();
        match parsed {
            Ok(row) => {
                if let Some(w) = width {
                    if row.len() != w {
                        return Err(CliError::Input(format!(
                            "{} line {}: expected {} columns, found {}",
                            path.display(),
                            lineno + 1,
                            w,
                            row.len()
                        )));
                    }
                } else {
                    width = Some(row.len());
                }
                rows.push(row);
                saw_header_or_row = true;
            }
            Err(_) if !saw_header_or_row => {
                // header row
                saw_header_or_row = true;
            }
            Err(_) => {
                return Err(CliError::Input(format!(
                    "{} line {}: cannot parse `{line}` as numbers",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    MultiSample::new(rows).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
