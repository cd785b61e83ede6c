//! The `lma` command-line pipeline: feature extraction, floor fitting,
//! synthetic data, training, evaluation, window sweeps, kinematic plots and
//! SHAP explanations. Every command writes its outputs plus a
//! `manifest.json` into the `--out` directory.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{kinematics_curve, sweep_accuracy, SweepRow};
pub use config::Config;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Marks an error as a command-line misuse (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Marks an error as a broken internal guarantee (exit code 3).
#[derive(Debug)]
pub struct InvariantViolation(pub String);

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "internal invariant violated: {}", self.0)
    }
}

impl std::error::Error for InvariantViolation {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn invariant(msg: impl Into<String>) -> anyhow::Error {
    InvariantViolation(msg.into()).into()
}

/// Exit code for an error: usage and invariant markers anywhere in the
/// chain win; everything else is a data error.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<UsageError>()) {
        EXIT_USAGE
    } else if err.chain().any(|e| e.is::<InvariantViolation>()) {
        EXIT_INTERNAL
    } else {
        EXIT_DATA
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lma",
    version,
    about = "Laban Movement Analysis features, style classification and explanations"
)]
pub struct Cli {
    /// Master random seed (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract per-window LMA features from sequence files.
    Extract(commands::extract::Args),
    /// Fit a floor line to a point cloud.
    Floor(commands::floor::Args),
    /// Generate a labeled synthetic corpus.
    Synth(commands::synth::Args),
    /// Grid-search, cross-validate and train a forest.
    Train(commands::train::Args),
    /// Score a trained model on a feature CSV.
    Eval(commands::eval::Args),
    /// Cross-validated accuracy for several window sizes.
    Sweep(commands::sweep::Args),
    /// SHAP attributions for the rows of a feature CSV.
    Explain(commands::explain::Args),
    /// Windowed mean joint speed over time.
    Kinplot(commands::kinplot::Args),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Extract(_) => "extract",
            Command::Floor(_) => "floor",
            Command::Synth(_) => "synth",
            Command::Train(_) => "train",
            Command::Eval(_) => "eval",
            Command::Sweep(_) => "sweep",
            Command::Explain(_) => "explain",
            Command::Kinplot(_) => "kinplot",
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// printing errors to stderr. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, &args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command on a dedicated thread pool.
pub fn execute(cli: Cli, argv: &[OsString]) -> anyhow::Result<()> {
    let config = Config::resolve(cli.config.as_deref(), cli.seed)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| invariant(format!("thread pool: {e}")))?;
    let ctx = commands::Context {
        config,
        out: cli.out,
        threads: cli.threads,
        argv: argv
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
        config_path: cli.config,
    };
    pool.install(|| commands::dispatch(&cli.command, &ctx))
}
