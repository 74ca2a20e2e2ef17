use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinbath::commands::{run, Command, Context};
use spinbath::config::{RunConfig, SCHEMA};
use spinbath::error::CliError;

#[derive(Parser)]
#[command(name = "spinbath", version, about = "Engineered spin-boson baths: circuit solve, frame mapping, synthesis and dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML run config, or a manifest JSON from an earlier run
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for internal parallelism
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Treat warnings as errors
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Z_eff and J over the configured grid
    Impedance,
    /// Transmon and spin-boson parameters of the configured circuit
    Params,
    /// Effective-frame spectral density and mode table
    Frame,
    /// Drive error budget
    Budget,
    /// Choose the shunt capacitance for a target ohmic bath
    Synthesize,
    /// Effective-frame dynamics
    Simulate,
    /// Oracle suite
    Validate,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Impedance => Command::Impedance,
            Cmd::Params => Command::Params,
            Cmd::Frame => Command::Frame,
            Cmd::Budget => Command::Budget,
            Cmd::Synthesize => Command::Synthesize,
            Cmd::Simulate => Command::Simulate,
            Cmd::Validate => Command::Validate,
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config { key: "--threads".into(), message: e.to_string() })?;
    }
    let command = Command::from(cli.command);
    let (config, text) = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if command == Command::Validate => {
            let text = format!("schema = \"{SCHEMA}\"\n");
            (RunConfig::parse(&text)?, text)
        }
        None => return Err(CliError::Config { key: "--config".into(), message: "a config file is required".into() }),
    };
    let mut ctx = Context::new(config, text, cli.out, cli.strict);
    let result = run(command, &mut ctx);
    for c in &ctx.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    for w in &ctx.warnings {
        eprintln!("warning: {w}");
    }
    if result.is_ok() {
        println!("{}: wrote {} to {}", command.name(), ctx.out.written.join(", "), ctx.out.dir.display());
    }
    result
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
