//! The `readiness` command line.
//!
//! Exit status: 0 on success, 1 when input cannot be read or fails
//! validation, 2 on usage errors (bad flags, unknown keys or formats,
//! out-of-range parameters).

use crate::ingest::{read_csv, read_jsonl, write_jsonl, ColumnMapping, RawTrace};
use crate::report::{
    check_identities, compute_report, render, to_json_string, Format, ReportParams,
};
use crate::simulator::{expected_metrics, simulate_trace, SimConfig};
use crate::trace::{PartitionKey, Trace};
use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Environment variable that overrides the simulator seed.
pub const SEED_ENV: &str = "READINESS_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "readiness",
    version,
    about = "Human-AI decision metrics from interaction traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Trace file (JSONL with a schema header, or CSV with --csv).
    #[arg(long)]
    input: PathBuf,
    /// Read the input as CSV.
    #[arg(long)]
    csv: bool,
    /// JSON column mapping for CSV input.
    #[arg(long, requires = "csv")]
    map: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the metric report.
    Compute {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated partition keys.
        #[arg(long, value_delimiter = ',')]
        group_by: Vec<String>,
        /// json or markdown.
        #[arg(long, default_value = "json")]
        format: String,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Window for both update-asymmetry and time-to-calibration.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Consecutive stable windows required for calibration.
        #[arg(long)]
        stability: Option<usize>,
        /// Block size when records carry no block_id.
        #[arg(long)]
        block_size: Option<usize>,
    },
    /// Generate a synthetic trace.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print closed-form expected metrics for a stationary config.
    Expect {
        #[arg(long)]
        config: PathBuf,
    },
    /// Validate a trace and its metric identities.
    Check {
        #[command(flatten)]
        input: InputArgs,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

/// Runs the CLI and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            2
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Compute {
            input: source,
            group_by,
            format,
            out,
            window,
            epsilon,
            stability,
            block_size,
        } => {
            let format: Format = format.parse().map_err(usage)?;
            let keys = PartitionKey::parse_list(&group_by).map_err(usage)?;
            let mut params = ReportParams::default();
            if let Some(w) = window {
                params.asymmetry.window = w;
                params.calibration.window = w;
            }
            if let Some(e) = epsilon {
                params.asymmetry.epsilon = e;
                params.calibration.epsilon = e;
            }
            if let Some(k) = stability {
                params.calibration.stability = k;
            }
            if let Some(b) = block_size {
                params.block_size = b;
            }
            params.validate().map_err(usage)?;
            let trace = load(&source)?;
            let reports = compute_report(&trace, &keys, &params).map_err(input)?;
            for r in &reports {
                for d in &r.diagnostics {
                    eprintln!("note [{}]: {d}", r.partition);
                }
            }
            let text = render(&reports, format).map_err(usage)?;
            emit(out.as_deref(), text.as_bytes())
        }
        Command::Simulate { config, out } => {
            let config = load_config(&config)?;
            let trace = simulate_trace(&config).map_err(usage)?;
            let mut buf = Vec::new();
            write_jsonl(&trace, &mut buf).map_err(input)?;
            emit(out.as_deref(), &buf)
        }
        Command::Expect { config } => {
            let config = load_config(&config)?;
            let expected = expected_metrics(&config).map_err(input)?;
            emit(None, to_json_string(&expected).as_bytes())
        }
        Command::Check { input: source } => {
            let trace = load(&source)?;
            let reports = compute_report(&trace, &[], &ReportParams::default()).map_err(input)?;
            let r = &reports[0];
            check_identities(&r.outcome, &r.reliance, &r.safety)
                .map_err(|v| input(anyhow!("identity violations: {}", v.join("; "))))?;
            println!(
                "ok: {} records, alphabet of {} labels",
                trace.len(),
                trace.alphabet().len()
            );
            Ok(())
        }
    }
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))
        .map_err(input)
}

fn load(args: &InputArgs) -> Result<Trace, Failure> {
    let file = open(&args.input)?;
    let raw: RawTrace = if args.csv {
        let mapping = match &args.map {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read {}", p.display()))
                    .map_err(input)?;
                Some(ColumnMapping::from_json(&text).map_err(usage)?)
            }
            None => None,
        };
        read_csv(BufReader::new(file), mapping.as_ref())
    } else {
        read_jsonl(BufReader::new(file))
    }
    .with_context(|| format!("reading {}", args.input.display()))
    .map_err(input)?;
    raw.validate()
        .map_err(|e| input(anyhow!("{}: {e}", args.input.display())))
}

fn load_config(path: &Path) -> Result<SimConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(input)?;
    let mut config = SimConfig::from_json(&text).map_err(usage)?;
    if let Ok(seed) = std::env::var(SEED_ENV) {
        config.seed = seed.parse().map_err(|_| {
            usage(anyhow!(
                "{SEED_ENV} must be an unsigned integer, got '{seed}'"
            ))
        })?;
    }
    Ok(config)
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let result = match path {
        Some(p) => File::create(p)
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                w.write_all(bytes)?;
                w.flush()
            })
            .with_context(|| format!("cannot write {}", p.display())),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)
                .and_then(|_| lock.flush())
                .context("cannot write to standard output")
        }
    };
    result.map_err(input)
}
