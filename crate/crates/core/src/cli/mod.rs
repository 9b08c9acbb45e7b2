//! The `kplane` command-line front end.
//!
//! Exit codes: 0 when every verdict passes, 1 on a numerical failure, 2 on a
//! usage or configuration error.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use self::config::{ConfigError, RunConfig};
use self::output::{Metadata, OutDir};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kplane", version, about = "Verify the k-plane transform on constant-curvature spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML configuration; every section is optional.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory for CSV and JSON outputs.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// Overrides the configured RNG seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Overrides the pass tolerance of the selected command.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,

    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Flip the sign of one checked relation; the run must then fail.
    #[arg(long, global = true)]
    pub self_test: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Residuals of the curvature-function identities and the Pythagoras cross-check.
    Identities,
    /// Closed-form transform against the polar-coordinates oracle over an offset grid.
    Transform,
    /// Endpoint ratios over a random profile family, scale flatness and the sub-endpoint probe.
    Endpoint,
    /// Stability sweeps of the one-dimensional integral inequality.
    Lemma,
    /// Hypergeometric residual suite and dual-route inequality checks.
    Hypergeo,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Identities => "identities",
            Command::Transform => "transform",
            Command::Endpoint => "endpoint",
            Command::Lemma => "lemma",
            Command::Hypergeo => "hypergeo",
        }
    }
}

#[derive(Debug)]
pub enum CommandError {
    Config(ConfigError),
    Io(std::io::Error),
    Numeric(crate::Error),
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e)
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::Io(e)
    }
}

impl From<crate::Error> for CommandError {
    fn from(e: crate::Error) -> Self {
        CommandError::Numeric(e)
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut RunConfig) -> Result<(), ConfigError> {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(ConfigError(format!("--tol: must be finite and > 0, got {tol}")));
        }
        match cli.command {
            Command::Identities => cfg.identities.tol = tol,
            Command::Transform => cfg.transform.tol = tol,
            Command::Endpoint => cfg.endpoint.tol = tol,
            Command::Lemma => cfg.lemma.tol = tol,
            Command::Hypergeo => cfg.hypergeo.tol = tol,
        }
    }
    Ok(())
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<commands::Outcome, CommandError> {
    let mut out = OutDir::create(&cli.out, Metadata::for_config(cfg))?;
    match cli.command {
        Command::Identities => commands::identities(cfg, &mut out, cli.self_test),
        Command::Transform => commands::transform(cfg, &mut out, cli.self_test),
        Command::Endpoint => commands::endpoint(cfg, &mut out, cli.self_test),
        Command::Lemma => commands::lemma(cfg, &mut out, cli.self_test),
        Command::Hypergeo => commands::hypergeo(cfg, &mut out, cli.self_test),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let mut cfg = match config::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = apply_overrides(&cli, &mut cfg) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs: must be >= 1");
            return EXIT_USAGE;
        }
        pool = pool.num_threads(jobs);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return EXIT_USAGE;
        }
    };

    let name = cli.command.name();
    match pool.install(|| execute(&cli, &cfg)) {
        Ok(outcome) => {
            let status = if outcome.pass { "PASS" } else { "FAIL" };
            println!("{name}: {status} ({})", outcome.summary);
            if outcome.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(CommandError::Config(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(CommandError::Io(e)) => {
            eprintln!("error: cannot write outputs to {}: {e}", cli.out.display());
            EXIT_USAGE
        }
        Err(CommandError::Numeric(e)) => {
            eprintln!("{name}: FAIL ({e})");
            EXIT_FAIL
        }
    }
}
