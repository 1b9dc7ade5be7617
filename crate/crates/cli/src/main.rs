use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use racebank::harness::{
    compute_metrics, save_run, sweep_bank_size, sweep_window, Controller, Preset, RunTrace, Scenario,
    ScenarioConfig, SweepRow,
};

#[derive(Parser)]
#[command(name = "racebank", version, about = "Model-bank adaptive MPC racing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop scenario.
    Run {
        /// Scenario JSON; omitted fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// lla, oracle or fixed.
        #[arg(long)]
        controller: Option<Controller>,
        /// exp1, exp2 or exp3.
        #[arg(long)]
        preset: Option<Preset>,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for trace.csv, metrics.json and timing.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dump_track: Option<PathBuf>,
        /// Velocity-profile library as CSV.
        #[arg(long)]
        dump_library: Option<PathBuf>,
        /// Sampled parameter matrix, little-endian f64.
        #[arg(long)]
        dump_bank: Option<PathBuf>,
    },
    /// Median total MPC cost per bank size.
    SweepN {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        /// Write the rows as JSON here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Median total MPC cost per look-back window (seconds).
    SweepW {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute metrics from a saved trace.
    Metrics {
        #[arg(long)]
        trace: PathBuf,
        /// Scenario the trace came from; needed for its track.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Errors before anything was simulated exit with 1.
struct ConfigError(anyhow::Error);

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, ConfigError> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => ScenarioConfig::load(p).with_context(|| format!("loading {}", p.display())).map_err(ConfigError),
    }
}

fn print_rows(rows: &[SweepRow], out: Option<&Path>) -> anyhow::Result<()> {
    let json = serde_json::to_string_pretty(rows)?;
    println!("{json}");
    if let Some(p) = out {
        std::fs::write(p, &json).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode, ConfigError> {
    let runtime = |e: anyhow::Error| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    };
    match cli.command {
        Command::Run { config, controller, preset, seed, out, dump_track, dump_library, dump_bank } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(c) = controller {
                cfg = cfg.with_controller(c);
            }
            if let Some(p) = preset {
                cfg = cfg.with_preset(p);
            }
            if let Some(s) = seed {
                cfg = cfg.with_seed(s);
            }
            cfg.output.dir = out.or(cfg.output.dir);
            cfg.output.dump_track = dump_track.or(cfg.output.dump_track);
            cfg.output.dump_library = dump_library.or(cfg.output.dump_library);
            cfg.output.dump_bank = dump_bank.or(cfg.output.dump_bank);
            cfg.validate().map_err(|e| ConfigError(e.into()))?;

            let sc = Scenario::build(&cfg).map_err(|e| ConfigError(e.into()))?;
            let result = (|| -> anyhow::Result<(RunTrace, racebank::harness::Metrics)> {
                sc.dump_artifacts()?;
                let trace = sc.run()?;
                let metrics = compute_metrics(&trace, &sc.track);
                if let Some(dir) = &cfg.output.dir {
                    save_run(dir, &trace, &metrics)?;
                }
                Ok((trace, metrics))
            })();
            let (trace, metrics) = match result {
                Ok(r) => r,
                Err(e) => return Ok(runtime(e)),
            };
            println!("{}", metrics.to_json());
            if metrics.completed {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "run incomplete: {} of {} laps{}",
                    metrics.lap_times.len(),
                    trace.laps_target,
                    if trace.diverged { ", diverged" } else { "" }
                );
                Ok(ExitCode::from(2))
            }
        }
        Command::SweepN { config, n, seeds, out } => {
            let cfg = load_config(config.as_deref())?;
            match sweep_bank_size(&cfg, &n, seeds) {
                Ok(rows) => Ok(print_rows(&rows, out.as_deref()).map_or_else(runtime, |_| ExitCode::SUCCESS)),
                Err(e @ racebank::Error::Config(_)) => Err(ConfigError(e.into())),
                Err(e) => Ok(runtime(e.into())),
            }
        }
        Command::SweepW { config, w, seeds, out } => {
            let cfg = load_config(config.as_deref())?;
            match sweep_window(&cfg, &w, seeds) {
                Ok(rows) => Ok(print_rows(&rows, out.as_deref()).map_or_else(runtime, |_| ExitCode::SUCCESS)),
                Err(e @ racebank::Error::Config(_)) => Err(ConfigError(e.into())),
                Err(e) => Ok(runtime(e.into())),
            }
        }
        Command::Metrics { trace, config } => {
            let cfg = load_config(config.as_deref())?;
            let track = cfg.track.build().map_err(|e| ConfigError(e.into()))?;
            let trace = RunTrace::load(&trace)
                .with_context(|| format!("reading {}", trace.display()))
                .map_err(ConfigError)?;
            println!("{}", compute_metrics(&trace, &track).to_json());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(ConfigError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
