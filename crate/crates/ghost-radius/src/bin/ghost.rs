//! Experiment launcher.
//!
//! `ghost <subcommand> --config <path>` with flat `key = value` configs;
//! every key has a default, so the config flag is optional. CLI flags
//! override config keys. Exit codes: 0 success, 2 divergence detected
//! (records are still written), 1 error.

use clap::{Parser, Subcommand};
use ghost_radius::harness::config::{ExperimentConfig, RawConfig};
use ghost_radius::harness::emit::{emit, Format, RunRecord};
use ghost_radius::harness::experiments;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ghost", about = "softmax trust-radius experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key = value config file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Restrict to one arm (spike: plain|grad_clip|rho; target-r-train:
    /// target_r_<r>|fixed_lr_<lr>).
    #[arg(long, global = true)]
    arm: Option<String>,

    /// Override the probe ratio grid, comma separated.
    #[arg(long, global = true)]
    r_grid: Option<String>,

    /// Override the learning-rate spike multiplier.
    #[arg(long, global = true)]
    spike_mult: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Learning-rate spike stress test: plain vs grad_clip vs rho arms.
    Spike,
    /// One-step probes from converged checkpoints, all architectures.
    PhaseSweep,
    /// Gradient and random direction probes at three training phases.
    RandomDirs,
    /// Collapse-onset fingerprint across softmax temperatures.
    Temperature,
    /// Train with the target-r controller against fixed-LR baselines.
    TargetRTrain,
    /// Nearest complex zero of the configured exponential sum.
    Zeros,
    /// Per-sample radius report from configured logits and slopes.
    Radius,
    /// KL identity, quadratic model, and remainder bound.
    Klcheck,
    /// Hessian-step-versus-radius crossover margins.
    Crossover,
    /// Per-layer activation-limited radii for a configured network.
    Actscan,
}

fn load_config(cli: &Cli) -> ghost_radius::Result<(ExperimentConfig, Format)> {
    let mut raw = match &cli.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    if let Some(seed) = cli.seed {
        raw.set("seed", &seed.to_string());
    }
    if let Some(dir) = &cli.out_dir {
        raw.set("out_dir", &dir.display().to_string());
    }
    if let Some(arm) = &cli.arm {
        raw.set("arm", arm);
    }
    if let Some(grid) = &cli.r_grid {
        raw.set("r_grid", grid);
    }
    if let Some(mult) = cli.spike_mult {
        raw.set("spike_multiplier", &mult.to_string());
    }
    let format = match raw.get("format").unwrap_or("csv") {
        "csv" => Format::Csv,
        "jsonl" => Format::Jsonl,
        other => {
            return Err(ghost_radius::Error::Config(format!(
                "unknown format {other:?}"
            )))
        }
    };
    Ok((ExperimentConfig::from_raw(&raw)?, format))
}

fn emit_record(
    record: &RunRecord,
    cfg: &ExperimentConfig,
    format: Format,
) -> ghost_radius::Result<ExitCode> {
    emit(record, format, &cfg.out_dir)?;
    eprintln!("wrote records to {}", cfg.out_dir.display());
    Ok(if record.divergent {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn run(cli: &Cli) -> ghost_radius::Result<ExitCode> {
    let (cfg, format) = load_config(cli)?;
    match cli.command {
        Command::Spike => emit_record(&experiments::run_spike(&cfg)?, &cfg, format),
        Command::PhaseSweep => emit_record(&experiments::run_phase_sweep(&cfg)?, &cfg, format),
        Command::RandomDirs => emit_record(&experiments::run_random_dirs(&cfg)?, &cfg, format),
        Command::Temperature => emit_record(&experiments::run_temperature(&cfg)?, &cfg, format),
        Command::TargetRTrain => {
            emit_record(&experiments::run_target_r_train(&cfg)?, &cfg, format)
        }
        Command::Zeros => {
            print!("{}", experiments::zeros_csv(&cfg)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Radius => {
            print!("{}", experiments::radius_csv(&cfg)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Klcheck => {
            print!("{}", experiments::klcheck_csv(&cfg)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Crossover => {
            print!("{}", experiments::crossover_csv(&cfg)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Actscan => {
            print!("{}", experiments::actscan_csv(&cfg)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
