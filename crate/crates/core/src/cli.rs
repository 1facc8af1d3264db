//! Command-line front end: argument parsing and report output.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::{self, RunOptions, SeReport};
use crate::scenario::SystemConfig;

#[derive(Debug, Parser)]
#[command(name = "starcf", version, about = "Downlink SE of active STAR-RIS-assisted cell-free massive MIMO")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Per-instant sum SE versus time instant (closed form).
    Fig1,
    /// Average SE versus number of APs (closed form and Monte Carlo).
    Fig2,
    /// Sum SE versus number of RIS elements (closed form).
    Fig3,
    /// Resource-block length per velocity.
    Table1,
    /// Per-user closed form vs Monte Carlo check at the configured point.
    Validate,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct CommonArgs {
    /// JSON config; missing fields take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Scenario seed; defaults to the config's `seed`.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Monte Carlo trials per point (fig2: 100, validate: 10000).
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<usize>,
    /// Output CSV path; stdout when absent. A `.json` metadata file is written next to it.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Scenario placements averaged per sweep point (fig2, fig3: 20).
    #[arg(long, global = true, value_name = "N")]
    pub seeds_per_point: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
}

impl Command {
    pub fn default_trials(self) -> usize {
        match self {
            Command::Fig2 => 100,
            Command::Validate => 10_000,
            _ => 0,
        }
    }

    pub fn default_seeds_per_point(self) -> usize {
        match self {
            Command::Fig2 | Command::Fig3 => 20,
            _ => 1,
        }
    }
}

/// Parses arguments without exiting the process.
pub fn parse_args<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)
}

impl Cli {
    pub fn load_config(&self) -> Result<SystemConfig> {
        let cfg = match &self.common.config {
            Some(p) => SystemConfig::from_json_file(p)?,
            None => SystemConfig::default(),
        };
        Ok(cfg)
    }

    pub fn options(&self, cfg: &SystemConfig) -> RunOptions {
        RunOptions {
            seed: self.common.seed.unwrap_or(cfg.seed),
            trials: self.common.trials.unwrap_or(self.command.default_trials()),
            seeds_per_point: self.common.seeds_per_point.unwrap_or(self.command.default_seeds_per_point()),
        }
    }
}

pub fn run_experiment(command: Command, cfg: &SystemConfig, opts: &RunOptions) -> Result<SeReport> {
    match command {
        Command::Fig1 => experiments::run_fig1(cfg, opts),
        Command::Fig2 => experiments::run_fig2(cfg, opts),
        Command::Fig3 => experiments::run_fig3(cfg, opts),
        Command::Table1 => experiments::run_table1(cfg, opts),
        Command::Validate => experiments::run_validate(cfg, opts),
    }
}

fn metadata_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn write_report(report: &SeReport, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write_csv(&mut w)?;
            w.flush()?;
            let meta = metadata_path(path);
            if meta != path {
                std::fs::write(meta, report.metadata_json(Some(&path.to_string_lossy())) + "\n")?;
            }
        }
        None => {
            let stdout = io::stdout();
            report.write_csv(stdout.lock())?;
        }
    }
    Ok(())
}

/// Runs a parsed command line end to end.
pub fn execute(cli: &Cli) -> Result<()> {
    let cfg = cli.load_config()?;
    let opts = cli.options(&cfg);
    let work = || -> Result<()> {
        let report = run_experiment(cli.command, &cfg, &opts)?;
        write_report(&report, cli.common.out.as_deref())?;
        if cli.command == Command::Validate {
            let failed = experiments::validation_failures(&report);
            if !failed.is_empty() {
                return Err(Error::Numerical(format!(
                    "closed form and Monte Carlo disagree beyond {}% for users {failed:?}",
                    experiments::VALIDATE_TOLERANCE * 100.0
                )));
            }
        }
        Ok(())
    };
    match cli.common.threads {
        Some(0) => Err(Error::config("threads", "must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(work),
        None => work(),
    }
}
