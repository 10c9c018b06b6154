//! `lzs` command line: run configurations, sweeps and table output.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

pub use config::{parse_real_list, Command, ConfigErrors, RunConfig};
pub use output::{format_real, Format, OutputTable};

use crate::error::Error;

/// Environment variable giving the default worker count.
pub const WORKERS_ENV: &str = "LZS_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigErrors),
    #[error("{context}: {source}")]
    Numerical { context: String, source: Error },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Runs `cfg` and returns its table with the resolved configuration, the
/// crate version and the wall time in the metadata.
pub fn execute(cfg: &RunConfig, offsets: bool) -> Result<OutputTable, CliError> {
    let start = Instant::now();
    let out = commands::run(cfg, offsets)?;
    let mut table = out.table;
    table.metadata.insert("command".into(), Value::from(cfg.command.name()));
    let echo: serde_json::Map<String, Value> = out.resolved.into_iter().map(|(k, v)| (k, Value::from(v))).collect();
    table.metadata.insert("config".into(), Value::Object(echo));
    if offsets {
        table.metadata.insert("offsets".into(), Value::from(true));
    }
    table.metadata.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    table.metadata.insert("wall_time_s".into(), Value::from(start.elapsed().as_secs_f64()));
    Ok(table)
}

#[derive(Debug, Parser)]
#[command(name = "lzs", version, about = "Rabi frequencies and dynamics of a strongly driven qubit, semiclassical and quantum")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Rabi frequencies of both pictures over a photon-number list
    RabiFreq(Common),
    /// Time traces of the qubit population
    Evolve(Common),
    /// Fit the amplitude shift per (coupling, k)
    FitShift(Common),
    /// Large-argument Bessel approximations against the exact values
    BesselApprox(Common),
    /// Bessel-Laguerre identity errors over an (x, n, k) grid
    IdentitySweep(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// key = value file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one key (repeatable), applied after the file
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads for sweeps
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Add vertical plotting offsets for stacked traces
    #[arg(long)]
    pub offsets: bool,
}

impl Sub {
    fn split(&self) -> (Command, &Common) {
        match self {
            Sub::RabiFreq(c) => (Command::RabiFreq, c),
            Sub::Evolve(c) => (Command::Evolve, c),
            Sub::FitShift(c) => (Command::FitShift, c),
            Sub::BesselApprox(c) => (Command::BesselApprox, c),
            Sub::IdentitySweep(c) => (Command::IdentitySweep, c),
        }
    }
}

fn load(command: Command, common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| std::io::Error::new(e.kind(), format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(command, &text)?
        }
        None => RunConfig::new(command),
    };
    let errors: Vec<String> = common.set.iter().filter_map(|p| cfg.set_pair(p).err()).collect();
    if !errors.is_empty() {
        return Err(ConfigErrors(errors).into());
    }
    Ok(cfg)
}

fn run_cli(cli: &Cli) -> Result<(), CliError> {
    let (command, common) = cli.command.split();
    let cfg = load(command, common)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(ConfigErrors(vec!["`--workers` must be >= 1".into()]).into());
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| ConfigErrors(vec![format!("thread pool: {e}")]))?;
    let table = pool.install(|| execute(&cfg, common.offsets))?;
    match &common.out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            table.write(common.format, &mut f)?;
            std::io::Write::flush(&mut f)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(common.format, &mut lock)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run_cli(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn main() -> ExitCode {
    main_from(std::env::args_os())
}
