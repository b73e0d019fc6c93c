//! Batch front end for the `equivtest` library.
//!
//! Every subcommand produces one table, written as CSV (default) or JSON to
//! `--out` or stdout. With `--out` a manifest sidecar records the resolved
//! settings, their SHA-256 digest, the seed and the run timestamps.
//!
//! Exit codes: 0 on success, 2 for usage or configuration errors, 1 for
//! failures while computing or writing.

pub mod args;
pub mod commands;
pub mod config;
pub mod manifest;
pub mod table;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::Parser;

use args::{Cli, Command, Format};
use commands::CommandOutput;

pub const SUBCOMMANDS: [&str; 7] = [
    "conservativity",
    "power-curve",
    "theta-max",
    "noise-cdf",
    "correlation",
    "fdr-power",
    "tables",
];

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<equivtest::Error> for CliError {
    fn from(e: equivtest::Error) -> Self {
        use equivtest::Error::*;
        match e {
            Domain(_) | Config(_) | LengthMismatch { .. } => CliError::Config(e.to_string()),
            NoConvergence { .. } | NoRoot(_) => CliError::Runtime(e.to_string()),
        }
    }
}

pub fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Conservativity(_) => "conservativity",
        Command::PowerCurve(_) => "power-curve",
        Command::ThetaMax(_) => "theta-max",
        Command::NoiseCdf(_) => "noise-cdf",
        Command::Correlation(_) => "correlation",
        Command::FdrPower(_) => "fdr-power",
        Command::Tables(_) => "tables",
    }
}

/// Runs the parsed command and returns its table without writing anything.
pub fn execute(cli: &Cli) -> Result<CommandOutput, CliError> {
    let g = &cli.global;
    let work = || match &cli.command {
        Command::Conservativity(a) => commands::conservativity(a, g),
        Command::PowerCurve(a) => commands::power_curve(a, g),
        Command::ThetaMax(a) => commands::theta_max_cmd(a, g),
        Command::NoiseCdf(a) => commands::noise_cdf(a, g),
        Command::Correlation(a) => commands::correlation(a, g),
        Command::FdrPower(a) => commands::fdr_power(a, g),
        Command::Tables(a) => commands::tables(a, g),
    };
    match g.threads {
        Some(0) => Err(CliError::Config("--threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Runtime(format!("cannot start thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Renders the records in the requested format.
pub fn render(cli: &Cli, out: &CommandOutput) -> String {
    match cli.global.format.unwrap_or(Format::Csv) {
        Format::Csv => out.table.to_csv(),
        Format::Json => out.table.to_json(command_name(&cli.command)),
    }
}

fn run_parsed(cli: &Cli) -> Result<(), CliError> {
    let started = chrono::Utc::now();
    let out = execute(cli)?;
    let body = render(cli, &out);
    match &cli.global.out {
        Some(path) => {
            fs::write(path, &body).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
            let format = cli.global.format.unwrap_or(Format::Csv);
            let m = manifest::Manifest::new(command_name(&cli.command), &out, format, path, started);
            m.write_beside(path)?;
        }
        None => {
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Runtime(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}

/// Full entry point: parses `args`, runs, writes output, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Result<Vec<String>, _> = args.into_iter().map(|a| a.into().into_string()).collect();
    let Ok(args) = args else {
        eprintln!("configuration error: arguments must be valid UTF-8");
        return 2;
    };
    let args = match config::expand(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
