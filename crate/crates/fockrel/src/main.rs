//! `fockrel` command-line front end.
//!
//! Exit codes: 0 when every result is acceptable, 1 when a check failed,
//! 2 for configuration errors, 3 when the truncation would overflow.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fockrel::config::{max_truncation, parse_tolerance, resolve, Overrides, RunConfig};
use fockrel::error::RunError;
use fockrel::{run_check_command, run_sweep_command, write_file, RunResult};

#[derive(Parser, Debug)]
#[command(
    name = "fockrel",
    version,
    about = "Verify weighted composition relations on truncated Fock space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate every record of a config file.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run checks on the configured triples.
    Check(RunArgs),
    /// Sample a parameter family and run its checks.
    Sweep(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Check to run; repeatable. Overrides the config list.
    #[arg(long = "check")]
    checks: Vec<String>,
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    /// Tolerance override as `name=value`; repeatable.
    #[arg(long = "tol", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    /// Treat failure of this check as the expected outcome; repeatable.
    #[arg(long = "expect-fail")]
    expect_fail: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn load(args: &RunArgs) -> Result<RunConfig, RunError> {
    let mut config = RunConfig::load(&args.config)?;
    Overrides {
        truncation: args.truncation,
        budget: args.budget,
        tolerances: args.tolerances.clone(),
        checks: args.checks.clone(),
        expect_fail: args.expect_fail.clone(),
        seed: args.seed,
        count: args.count,
    }
    .apply(&mut config);
    Ok(config)
}

fn emit(args: &RunArgs, result: &RunResult) -> Result<(), RunError> {
    let json = result.report.to_json();
    if let Some(path) = &args.report {
        write_file(path, &json)?;
    }
    match args.format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{}", result.report.to_text()),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, RunError> {
    let max_n = max_truncation()?;
    match cli.command {
        Command::Validate { config } => {
            let config = RunConfig::load(&config)?;
            let resolved = resolve(&config, max_n)?;
            println!(
                "ok: {} triple(s), {} conjugation(s), {} check(s)",
                resolved.sets.len(),
                config.conjugations.len(),
                resolved.checks.len()
            );
            Ok(0)
        }
        Command::Check(args) => {
            let result = run_check_command(&load(&args)?, max_n)?;
            emit(&args, &result)?;
            Ok(if result.all_ok { 0 } else { 1 })
        }
        Command::Sweep(args) => {
            let result = run_sweep_command(&load(&args)?, max_n)?;
            emit(&args, &result)?;
            Ok(if result.all_ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
