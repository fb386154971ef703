//! `bsslab`: run the verification suites and write reports.
//!
//! Exit status is 0 when every check passes, 1 when any check fails and 2
//! on configuration or output errors.

use std::path::PathBuf;
use std::process::ExitCode;

use bsslab_core::lab::{run_suite, RunConfig, Suite};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "bsslab", version, about = "Numerical checks of simplicial de Rham cocycles on matrix groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (`key = value` lines, `#` comments).
    #[arg(long, global = true, env = "BSSLAB_CONFIG")]
    config: Option<PathBuf>,

    /// Overrides the seed from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for report.jsonl, summary.txt and convergence tables.
    #[arg(long, global = true, default_value = "bsslab-out")]
    out: PathBuf,

    /// Number of worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Print the JSON-lines report to stdout instead of the summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Vanishing, degeneracy, simplicial relations and closed-form oracles for ω_n.
    VerifyBss,
    /// The degree-2 local cocycle identity and its convergence.
    VerifyEta,
    /// Loop-group cocycle and its Kac–Moody derivative.
    KacMoody,
    /// Feigin cocycles in degrees 2 and 3.
    Feigin,
    /// Central extension by the loop cocycle.
    Extension,
    /// Every suite.
    All,
}

impl From<Command> for Suite {
    fn from(c: Command) -> Self {
        match c {
            Command::VerifyBss => Suite::VerifyBss,
            Command::VerifyEta => Suite::VerifyEta,
            Command::KacMoody => Suite::KacMoody,
            Command::Feigin => Suite::Feigin,
            Command::Extension => Suite::Extension,
            Command::All => Suite::All,
        }
    }
}

fn load(cli: &Cli) -> bsslab_core::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bsslab: {e}");
            return ExitCode::from(2);
        }
    };
    let output = match run_suite(cli.command.into(), &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("bsslab: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = output.write_to(&cli.out) {
        eprintln!("bsslab: {e}");
        return ExitCode::from(2);
    }
    if cli.json {
        match output.jsonl() {
            Ok(s) => print!("{s}"),
            Err(e) => {
                eprintln!("bsslab: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        print!("{}", output.summary());
    }
    if output.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
