//! `rwa`: steady-state responses of driven oscillators in the bare and drive
//! rotating frames, written as CSV/JSON for plotting.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map};

use rwa_core::RwaError;

use commands::Run;
use config::{Command, ConfigError, FrameChoice, Overrides};
use output::{write_json, OutDir};

#[derive(Parser, Debug)]
#[command(name = "rwa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug, Clone)]
enum Cmd {
    /// Exact and rotating-frame responses of the driven harmonic oscillator.
    Harmonic(#[command(flatten)] Opts),
    /// Duffing steady-state branches, folds and optional oracle sweeps.
    Duffing(#[command(flatten)] Opts),
    /// Stable-solution counts over (ω, F₀) and the fold boundary.
    PhaseDiagram(#[command(flatten)] Opts),
}

#[derive(clap::Args, Debug, Clone)]
struct Opts {
    /// JSON configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    frame: Option<FrameChoice>,
    /// Run the time-domain oracle alongside the rotating-frame solvers.
    #[arg(long)]
    with_oracle: bool,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override a config value by dotted key, e.g. `physical.F0=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<RwaError>() {
            return match e {
                RwaError::InvalidParameter(_) => 2,
                RwaError::ResonanceSingularity { .. } => 3,
                RwaError::NumericalBlowup { .. } => 4,
                _ => 1,
            };
        }
    }
    1
}

fn init_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("RWA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        ConfigError(format!(
            "RWA_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(e.to_string()))
}

fn run(command: Command, opts: &Opts) -> anyhow::Result<()> {
    init_threads()?;
    let file = opts.config.as_deref().map(config::read_file).transpose()?;
    let overrides = Overrides {
        sets: opts.sets.clone(),
        frame: opts.frame,
        with_oracle: opts.with_oracle,
        out: opts.out.clone(),
    };
    let resolved = config::resolve(command, file, &overrides)?;
    let out = OutDir::create(&resolved.config.out)?;
    let mut job = Run {
        command,
        resolved,
        out,
        warnings: Vec::new(),
        results: Map::new(),
    };
    let outcome = job.execute();

    let mut parameters = serde_json::to_value(&job.resolved.config)?;
    let p = job.resolved.physical;
    parameters["physical"] = json!({
        "m": p.m, "omega0": p.omega0, "alpha": p.alpha, "F0": p.f0, "hbar": p.hbar,
    });
    let summary = json!({
        "command": command.name(),
        "status": if outcome.is_ok() { "ok" } else { "error" },
        "error": outcome.as_ref().err().map(|e| format!("{e:#}")),
        "exit_code": outcome.as_ref().err().map_or(0, exit_code),
        "versions": { "rwa-cli": env!("CARGO_PKG_VERSION"), "rwa-core": rwa_core::VERSION },
        "parameters": parameters,
        "defaults_applied": job.resolved.defaults_applied,
        "warning_count": job.warnings.len(),
        "warnings": job.warnings,
        "files": job.out.files,
        "results": job.results,
    });
    write_json(&job.out.root.join("run_summary.json"), &summary)?;
    outcome
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match &cli.command {
        Cmd::Harmonic(o) => (Command::Harmonic, o),
        Cmd::Duffing(o) => (Command::Duffing, o),
        Cmd::PhaseDiagram(o) => (Command::PhaseDiagram, o),
    };
    match run(command, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("rwa {}: {err:#}", command.name());
            ExitCode::from(exit_code(&err))
        }
    }
}
