//! Command-line front end.
//!
//! Subcommands: `check` (PPT verdicts for a zoo state or a state file),
//! `threshold` (bisection of a family parameter to its PPT boundary),
//! `sweep` (family evaluation over a parameter grid), `oracle` (validation
//! of the closed-form block transforms against the dense kernel on seeded
//! random families) and `export` (write a zoo state to a state file).
//!
//! Exit codes: 0 when the check passes (fully PPT, oracle within
//! tolerance), 1 when it does not, 2 on errors.

mod commands;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Caps the worker pool used for sweeps and oracle runs.
pub const WORKERS_ENV: &str = "CIRCULANT_PPT_WORKERS";

#[derive(Parser)]
#[command(
    name = "circulant-ppt",
    version,
    about = "Circulant multipartite states: PPT verdicts, thresholds and transform validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct StateArgs {
    /// Zoo family name (see `--zoo help` for the list).
    #[arg(long, conflicts_with = "file")]
    zoo: Option<String>,

    /// State specification file (JSON).
    #[arg(long)]
    file: Option<std::path::PathBuf>,

    /// Local dimension (zoo states only).
    #[arg(long)]
    d: Option<usize>,

    /// Factor count (zoo states only).
    #[arg(long)]
    n: Option<usize>,

    /// Family parameter, repeatable: --param p=0.25
    #[arg(long = "param", value_parser = parse_key_value)]
    params: Vec<(String, String)>,
}

impl StateArgs {
    fn param_map(&self) -> BTreeMap<String, String> {
        self.params.iter().cloned().collect()
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format (CSV is available for sweep outputs only).
    #[arg(long, value_enum, default_value = "json")]
    format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// PPT verdicts for one mask or all masks of a state.
    Check {
        #[command(flatten)]
        state: StateArgs,

        /// Single transposition mask as a bit string, e.g. 01.
        #[arg(long, conflicts_with = "masks")]
        mask: Option<String>,

        /// Mask selection: "all" (the default).
        #[arg(long)]
        masks: Option<String>,

        /// Relative PSD tolerance (default 1e-10).
        #[arg(long)]
        tol: Option<f64>,

        /// Also report the deviation from the dense partial transpose.
        #[arg(long)]
        oracle: bool,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Bisect a family parameter to the zero of the minimum block eigenvalue.
    Threshold {
        #[command(flatten)]
        state: StateArgs,

        /// Parameter to sweep (defaults to the family's threshold parameter).
        #[arg(long)]
        sweep_param: Option<String>,

        /// Bracket as lo:hi (defaults to the family's registered bracket).
        #[arg(long, value_parser = parse_range)]
        bracket: Option<(f64, f64)>,

        /// Stop once the bracket is narrower than this (default 1e-8).
        #[arg(long, default_value_t = 1e-8)]
        width: f64,

        /// Relative PSD tolerance (default 1e-10).
        #[arg(long)]
        tol: Option<f64>,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Evaluate a family over a parameter grid.
    Sweep {
        #[command(flatten)]
        state: StateArgs,

        /// Grid axis, repeatable: --grid p=0:1:21 (lo:hi:count).
        #[arg(long = "grid", value_parser = parse_grid, required = true)]
        grids: Vec<(String, f64, f64, usize)>,

        /// Relative PSD tolerance (default 1e-10).
        #[arg(long)]
        tol: Option<f64>,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Validate closed-form transforms against the dense kernel on seeded
    /// random families.
    Oracle {
        /// Local dimension.
        #[arg(long)]
        d: usize,

        /// Factor count.
        #[arg(long)]
        n: usize,

        /// Number of random families.
        #[arg(long, default_value_t = 100)]
        count: u64,

        /// Base seed; family i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Block layout to validate: small, sigma or xi.
        #[arg(long, default_value = "small")]
        scheme: String,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Write a zoo state to a state specification file.
    Export {
        #[command(flatten)]
        state: StateArgs,

        /// Destination path.
        #[arg(long)]
        out: std::path::PathBuf,
    },

    /// List the available zoo families.
    Zoo,
}

fn parse_key_value(text: &str) -> Result<(String, String), String> {
    match text.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok((k.to_string(), v.to_string())),
        _ => Err(format!("expected name=value, got {text:?}")),
    }
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("expected lo:hi, got {text:?}"));
    }
    let lo = parts[0].parse().map_err(|e| format!("{e}"))?;
    let hi = parts[1].parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn parse_grid(text: &str) -> Result<(String, f64, f64, usize), String> {
    let (name, range) = text
        .split_once('=')
        .ok_or_else(|| format!("expected name=lo:hi:count, got {text:?}"))?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected name=lo:hi:count, got {text:?}"));
    }
    let lo: f64 = parts[0].parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = parts[1].parse().map_err(|e| format!("{e}"))?;
    let count: usize = parts[2].parse().map_err(|e| format!("{e}"))?;
    if count < 1 {
        return Err("count must be at least 1".to_string());
    }
    Ok((name.to_string(), lo, hi, count))
}

fn init_worker_pool() {
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        if let Ok(workers) = value.parse::<usize>() {
            if workers >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_worker_pool();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
