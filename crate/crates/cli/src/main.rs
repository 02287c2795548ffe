//! `tori` — experiments on singly thermostated 1-DOF Hamiltonian systems.
//!
//! ```text
//! tori <profile|averaged|scan|agreement|reconstruct> --config <path>
//!      [--out <dir>] [--format csv,svg] [--threads N]
//! ```
//!
//! Exit status: 0 success, 2 configuration error, 3 numerical failure.

mod commands;
mod config;
mod output;
mod setup;
mod svg;

use config::{Config, ConfigError};
use output::OutputDir;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numerical(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<tori_core::Error> for CliError {
    fn from(e: tori_core::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("io: {e}"))
    }
}

const USAGE: &str = "usage: tori <profile|averaged|scan|agreement|reconstruct> \
--config <path> [--out <dir>] [--format csv,svg] [--threads N]";

struct Args {
    command: String,
    config_path: String,
    out_dir: Option<String>,
    format: Option<String>,
    threads: usize,
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut command = None;
    let mut config_path = None;
    let mut out_dir = None;
    let mut format = None;
    let mut threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                config_path = Some(it.next().ok_or("--config needs a path")?.clone());
            }
            "--out" => {
                out_dir = Some(it.next().ok_or("--out needs a directory")?.clone());
            }
            "--format" => {
                format = Some(it.next().ok_or("--format needs csv,svg")?.clone());
            }
            "--threads" => {
                threads = it
                    .next()
                    .ok_or("--threads needs a count")?
                    .parse()
                    .map_err(|_| "--threads needs a positive integer".to_string())?;
            }
            "--help" | "-h" => return Err(USAGE.to_string()),
            other if command.is_none() && !other.starts_with('-') => {
                command = Some(other.to_string());
            }
            other => return Err(format!("unexpected argument `{other}`\n{USAGE}")),
        }
    }
    Ok(Args {
        command: command.ok_or(USAGE.to_string())?,
        config_path: config_path.ok_or(USAGE.to_string())?,
        out_dir,
        format,
        threads: threads.max(1),
    })
}

fn run() -> Result<(), CliError> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let args = parse_args(&argv).map_err(|m| CliError::Config(ConfigError(m)))?;
    let text = std::fs::read_to_string(&args.config_path).map_err(|e| {
        CliError::Config(ConfigError(format!("cannot read {}: {e}", args.config_path)))
    })?;
    let mut cfg = Config::parse(&args.config_path, &text)?;

    // experiment name in the file, when present, must match the subcommand
    if let Some(name) = cfg.str_opt("experiment", "name") {
        if name != args.command {
            return Err(CliError::Config(ConfigError(format!(
                "config declares experiment `{name}` but the command is `{}`",
                args.command
            ))));
        }
    }
    let dir = args
        .out_dir
        .or_else(|| cfg.str_opt("output", "dir"))
        .unwrap_or_else(|| "out".to_string());
    let formats = args
        .format
        .or_else(|| cfg.str_opt("output", "format"))
        .unwrap_or_else(|| "csv,svg".to_string());
    let out = OutputDir::new(&dir, &formats)
        .map_err(|e| CliError::Config(ConfigError(e.to_string())))?;

    match args.command.as_str() {
        "profile" => commands::cmd_profile(&mut cfg, &out)?,
        "averaged" => commands::cmd_averaged(&mut cfg, &out)?,
        "scan" => commands::cmd_scan(&mut cfg, &out, args.threads)?,
        "agreement" => commands::cmd_agreement(&mut cfg, &out)?,
        "reconstruct" => commands::cmd_reconstruct(&mut cfg, &out)?,
        other => {
            return Err(CliError::Config(ConfigError(format!(
                "unknown command `{other}`\n{USAGE}"
            ))))
        }
    }
    cfg.finish()?;
    Ok(())
}

fn main() {
    std::process::exit(match run() {
        Ok(()) => 0,
        Err(CliError::Config(e)) => {
            eprintln!("config error: {e}");
            2
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("error: {e}");
            3
        }
    });
}
