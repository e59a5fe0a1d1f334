use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use glq_cli::commands::{run_geodesic, run_homotopy, GeodesicConfig, HomotopyConfig};
use glq_cli::{analyze_bundle, emit_report, run_experiment, CliError, ExperimentConfig};
use log::info;
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(name = "glq", version, about = "Ginzburg-Landau energy quantization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; falls back to GLQ_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Class tables, sum properties and norms of a finite group.
    Homotopy(Common),
    /// Relax a loop towards a closed geodesic.
    Geodesic(Common),
    /// Solve every ε of the schedule, run the requested diagnostics and report.
    Solve(Common),
    /// Rerun the diagnostics on an existing bundle.
    Analyze(Common),
    /// Rebuild the report of an existing bundle.
    Report(Common),
}

fn load<T: DeserializeOwned>(path: &Option<PathBuf>) -> Result<T, CliError> {
    let path = path.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn threads(requested: Option<usize>) -> Result<Option<usize>, CliError> {
    if requested.is_some() {
        return Ok(requested);
    }
    match std::env::var("GLQ_THREADS") {
        Ok(v) => v.parse().map(Some).map_err(|_| CliError::Config(format!("GLQ_THREADS = `{v}` is not a count"))),
        Err(_) => Ok(None),
    }
}

fn hard(pass: bool) -> Result<ExitCode, CliError> {
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn report(out: &Path) -> Result<ExitCode, CliError> {
    let r = emit_report(out)?;
    info!("report written to {}", out.display());
    hard(r.hard_pass)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let common = match &cli.command {
        Command::Homotopy(c) | Command::Geodesic(c) | Command::Solve(c) | Command::Analyze(c) | Command::Report(c) => c,
    };
    if let Some(n) = threads(common.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let out = common.out.as_path();
    match &cli.command {
        Command::Homotopy(c) => {
            let cfg: HomotopyConfig = load(&c.config)?;
            hard(run_homotopy(&cfg, out)?.passed())
        }
        Command::Geodesic(c) => {
            let mut cfg: GeodesicConfig = load(&c.config)?;
            if let Some(s) = c.seed {
                cfg.seed = s;
            }
            hard(run_geodesic(&cfg, out)?.passed())
        }
        Command::Solve(c) => {
            let path = c.config.as_deref().ok_or_else(|| CliError::Config("--config is required".into()))?;
            let mut cfg = ExperimentConfig::load(path)?;
            if let Some(s) = c.seed {
                cfg.seed = s;
            }
            hard(run_experiment(&cfg, out)?.hard_pass)
        }
        Command::Analyze(_) => {
            analyze_bundle(out)?;
            report(out)
        }
        Command::Report(_) => report(out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("glq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
