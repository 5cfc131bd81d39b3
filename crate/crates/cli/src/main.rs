//! `read-mc`: run READ and nested Monte Carlo experiments from the shell.
//!
//! Exit status: 0 when the command completed (and an adaptive run converged),
//! 1 on a runtime failure, 2 on a usage or configuration error, 3 when an
//! adaptive run hit `--max-reps` without meeting `--epsilon`.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::io::Write;
use std::process::ExitCode;

use config::{ConfigError, Options};

#[derive(Parser)]
#[command(
    name = "read-mc",
    version,
    about = "Unbiased estimation of repeatedly nested expectations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated READ or NMC estimates with a summary and per-repetition records.
    Estimate(Options),
    /// MSE against cost for READ, NMC1 and NMC2 over a budget grid.
    Compare(Options),
    /// Standard deviation over an (r0, r1) grid for a depth-2 problem.
    Sweep(Options),
    /// Bermudan basket put price, optionally against NMC baselines.
    Price(Options),
}

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (options, command) = match cli.command {
        Command::Estimate(o) => (o, "estimate"),
        Command::Compare(o) => (o, "compare"),
        Command::Sweep(o) => (o, "sweep"),
        Command::Price(o) => (o, "price"),
    };
    let resolved = options.merged().and_then(|o| match command {
        "estimate" => o.for_estimate(),
        "compare" => o.for_compare(),
        "sweep" => o.for_sweep(),
        _ => o.for_price(),
    });
    let cfg = match resolved {
        Ok(cfg) => cfg,
        Err(ConfigError { field, message }) => {
            eprintln!("error: invalid {field}: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match command {
        "estimate" => commands::estimate(cfg),
        "compare" => commands::compare(cfg),
        "sweep" => commands::sweep(cfg),
        _ => commands::price(cfg),
    };
    match outcome {
        Ok(o) => {
            let _ = std::io::stdout().write_all(o.json.as_bytes());
            if o.complete {
                ExitCode::SUCCESS
            } else {
                eprintln!("warning: adaptive run stopped at --max-reps before reaching --epsilon");
                ExitCode::from(EXIT_NOT_CONVERGED)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
