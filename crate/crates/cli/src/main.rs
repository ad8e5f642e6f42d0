mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Cli, RunConfig};

/// Exit status for bad flags, unreadable config or unwritable output.
const EXIT_USAGE: u8 = 2;

fn execute(cli: Cli) -> Result<bool> {
    let cfg = RunConfig::resolve(cli)?;
    let out = commands::run(&cfg)?;
    match &cfg.out {
        Some(path) => fs::write(path, &out.text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout()
            .write_all(out.text.as_bytes())
            .context("writing stdout")?,
    }
    Ok(out.ok)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
