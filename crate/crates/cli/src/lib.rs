//! Command-line orchestration of the pfaffkp checks: constants, residual
//! suites, curve tables and the GOE Monte Carlo run.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::curves::Curve;
use commands::verify::Suite;
use config::{ConfigError, RunConfig};
use output::{Manifest, OutputDir};

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "pfaffkp", version, about = "Replica partition functions, integrable-hierarchy residuals and GOE correlations")]
pub struct Cli {
    /// TOML configuration file (tables or dotted keys).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Monte Carlo seed; overrides `goe.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; overrides `threads`.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Extra `key=value` overrides, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the normalization constants.
    Constants,
    /// Run residual suites; exit status 1 if any check misses its budget.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Rescale the neighbors in the replica recursion by this factor.
        #[arg(long, value_name = "B")]
        gauge_fault: Option<f64>,
    },
    /// Write curve tables.
    Curves {
        #[arg(long, value_enum)]
        what: Curve,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// GOE Monte Carlo estimate of the two-level correlation.
    Goemc {
        /// Multiply unfolded positions by this factor (fault injection).
        #[arg(long)]
        fault_scale: Option<f64>,
    },
}

fn effective_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.goe.seed = seed;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    match &cli.command {
        Some(Command::Verify { gauge_fault: Some(b), .. }) => cfg.pfkp.gauge = *b,
        Some(Command::Curves { from, to, resolution, .. }) => {
            if let Some(v) = from {
                cfg.curves.omega_min = *v;
            }
            if let Some(v) = to {
                cfg.curves.omega_max = *v;
            }
            if let Some(v) = resolution {
                cfg.curves.resolution = *v;
            }
        }
        Some(Command::Goemc { fault_scale: Some(f) }) => cfg.goe.fault_scale = *f,
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn command_line(command: &Command) -> String {
    match command {
        Command::Constants => "constants".into(),
        Command::Verify { suite, .. } => format!("verify --suite {}", format!("{suite:?}").to_lowercase()),
        Command::Curves { what, .. } => format!("curves --what {}", format!("{what:?}").to_lowercase()),
        Command::Goemc { .. } => "goemc".into(),
    }
}

fn is_config_error(e: &anyhow::Error) -> bool {
    e.downcast_ref::<ConfigError>().is_some()
        || matches!(e.downcast_ref::<pfaffkp::Error>(), Some(pfaffkp::Error::Config(_)))
}

/// Runs a parsed command line and maps the outcome to the exit-code
/// contract: 0 success, 1 failed check, 2 configuration error.
pub fn run(cli: Cli) -> ExitCode {
    let cfg = match effective_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if cli.print_config {
        print!("{}", cfg.to_flat_toml());
        return ExitCode::SUCCESS;
    }
    let Some(command) = &cli.command else {
        eprintln!("configuration error: no command given (see --help)");
        return ExitCode::from(EXIT_CONFIG);
    };
    if cfg.threads > 0 {
        // Only fails if a pool already exists, in which case it is reused.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    match execute(command, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) if is_config_error(&e) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}

fn execute(command: &Command, cfg: &RunConfig) -> anyhow::Result<bool> {
    let out = OutputDir::create(&cfg.output_dir, Manifest::new(command_line(command), cfg))?;
    Ok(match command {
        Command::Constants => commands::constants::run(&out).map(|_| true)?,
        Command::Verify { suite, .. } => commands::verify::run(*suite, cfg, &out)?.pass,
        Command::Curves { what, .. } => commands::curves::run(*what, cfg, &out)?.1 == 0,
        // the density check is reported; only the bin comparison sets the exit code
        Command::Goemc { .. } => commands::goemc::run(cfg, &out)?.comparison.pass,
    })
}
