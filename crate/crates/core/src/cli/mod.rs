//! Batch command-line front end.
//!
//! Exit codes: 0 on success, 2 for configuration or input errors, 3 for
//! numerical failures.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
pub use commands::RunContext;
pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "stirap", version, about = "STIRAP simulations in three-level and Cooper-pair-box systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Configuration file; defaults apply to everything it leaves out.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Seed for Monte Carlo noise sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Efficiency level defining the linewidth.
    #[arg(long, global = true)]
    pub level: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Population histories for one pulse sequence.
    Simulate,
    /// Efficiency over a grid of detunings, with iso-efficiency contours.
    Diagram,
    /// Device levels, charge matrix elements and bias sensitivities.
    Cpb,
    /// Figure of merit over Josephson coupling and gate charge.
    Fom,
    /// Final populations against drive strength under Markovian and static dephasing.
    Dephasing,
    /// Half-width of the efficiency along a line in the detuning plane.
    Linewidth,
}

impl Cli {
    pub fn resolve_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.output.directory = out.to_string_lossy().into_owned();
        }
        if let Some(w) = self.workers {
            cfg.run.workers = w;
        }
        if let Some(s) = self.seed {
            cfg.noise.seed = s;
        }
        if let Some(l) = self.level {
            cfg.sweep.level = l;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn execute(cli: &Cli) -> Result<String> {
    let ctx = RunContext::prepare(cli.resolve_config()?)?;
    match cli.command {
        Command::Simulate => commands::simulate(&ctx),
        Command::Diagram => commands::diagram(&ctx),
        Command::Cpb => commands::cpb(&ctx),
        Command::Fom => commands::fom(&ctx),
        Command::Dephasing => commands::dephasing(&ctx),
        Command::Linewidth => commands::linewidth(&ctx),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_CONFIG
    }
}

/// Parse arguments, run, report. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match std::panic::catch_unwind(|| execute(&cli)) {
        Ok(Ok(summary)) => {
            println!("{summary}");
            EXIT_OK
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(_) => EXIT_NUMERIC,
    }
}
