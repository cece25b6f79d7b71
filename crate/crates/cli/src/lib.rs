//! Command-line driver for `heegner-core`: newform files, CSV reports and
//! the `heegner-aj` binary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use heegner_core::numerics::PrecisionContext;

pub mod cli;
pub mod commands;
pub mod error;
pub mod newform_file;
pub mod output;

use cli::{Cli, Command};
pub use error::{CliError, Result};
use output::Format;

/// Global settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub prec: usize,
    pub eps: f64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        if cli.jobs == 0 {
            return Err(CliError::parse("cli", "--jobs must be at least 1"));
        }
        let cfg = Self { prec: cli.prec, eps: cli.eps, jobs: cli.jobs, out: cli.out.clone(), format: cli.format };
        cfg.ctx()?;
        Ok(cfg)
    }

    pub fn ctx(&self) -> Result<PrecisionContext> {
        PrecisionContext::new(self.prec, self.eps).map_err(|e| CliError::parse("cli", e.to_string()))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::from_cli(&cli)?;
    let report = match &cli.command {
        Command::Aj(a) => commands::cmd_aj(&cfg, a)?,
        Command::Isog(a) => commands::cmd_isog(&cfg, a)?,
        Command::Sweep(a) => commands::cmd_sweep(&cfg, a)?,
        Command::Primes(a) => commands::cmd_primes(&cfg, a)?,
        Command::Periods(a) => commands::cmd_periods(&cfg, a)?,
    };
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            report.render(cfg.format, &mut w)?;
            Ok(w.flush()?)
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            report.render(cfg.format, &mut w)?;
            Ok(w.flush()?)
        }
    }
}
