use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use semiclass::Branch;

mod commands;
mod config;

use config::{Config, Overrides};

#[derive(Parser)]
#[command(name = "semiclass", version, about = "Bohr-Sommerfeld spectra for 2x2 semiclassical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the level curves `{mu = E}` for the configured energies.
    Trace(Common),
    /// Action, Berry, Rammal-Wilkinson and subprincipal phases per energy.
    Phases(Common),
    /// Bohr-Sommerfeld roots in the energy window, one table per h.
    BsSpectrum(Common),
    /// Eigenvalues of the Weyl-quantized operator, one table per h.
    OracleSpectrum(Common),
    /// BS orders 0 and 1 paired with the oracle levels, one table per h.
    Compare(Common),
    /// List the named model symbols.
    Presets,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Preset name, with default parameters.
    #[arg(long)]
    preset: Option<String>,
    /// Comma-separated list of h values.
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<f64>>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    order: Option<u8>,
    #[arg(long, value_parser = parse_branch)]
    branch: Option<Branch>,
    /// Energy window `a:b`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<[f64; 2]>,
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    s.parse().map_err(|_| format!("expected `plus` or `minus`, got `{s}`"))
}

fn parse_window(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok([num(a)?, num(b)?])
}

/// A failed run: the exit code and the message for standard error.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn config(message: String) -> Failure {
        Failure { code: 2, message: format!("ConfigError: {message}") }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Failure {
        Failure { code: 3, message: format!("IoError: {}: {e}", path.display()) }
    }
}

impl From<semiclass::Error> for Failure {
    fn from(e: semiclass::Error) -> Failure {
        let code = if e.is_config_error() { 2 } else { 3 };
        Failure { code, message: format!("{}: {e}", e.name()) }
    }
}

fn load(common: Common) -> Result<Config, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            Config::from_json(&text)?
        }
        None => Config::default(),
    };
    cfg.apply(Overrides {
        preset: common.preset,
        h: common.h,
        order: common.order,
        branch: common.branch,
        window: common.window,
        out: common.out,
    })?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Failure> {
    let (common, cmd): (Common, fn(&Config) -> Result<Vec<PathBuf>, Failure>) = match cli.command {
        Command::Presets => {
            print!("{}", commands::presets_listing());
            return Ok(Vec::new());
        }
        Command::Trace(c) => (c, commands::trace_curves),
        Command::Phases(c) => (c, commands::phases),
        Command::BsSpectrum(c) => (c, commands::bs_spectrum),
        Command::OracleSpectrum(c) => (c, commands::oracle_spectrum),
        Command::Compare(c) => (c, commands::compare),
    };
    cmd(&load(common)?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
