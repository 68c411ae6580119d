use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use mql_swarm::config::{load_config, Algorithm, SwarmConfig};
use mql_swarm::experiment::{run_experiment, RunOutput};
use mql_swarm::output::write_run;
use mql_swarm::presets::{preset, DEFAULT_PRESET_SEED};

#[derive(Parser)]
#[command(
    name = "mql-swarm",
    version,
    about = "Q-learning swarm vs. PSO simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        algo: Option<Algorithm>,
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named preset (fig3-compare, fig4-individuals).
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PRESET_SEED)]
        seed: u64,
    },
    /// Check a configuration file and print the effective configuration.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn echo(cfg: &SwarmConfig) -> Result<()> {
    print!("{}", cfg.to_toml_string()?);
    Ok(())
}

fn report(label: &str, out: &RunOutput, dir: &Path) {
    let s = &out.summary;
    eprintln!(
        "{label}: {} ticks, connected {:.3} -> {:.3}, dispersion {:.3} -> {:.3}, written to {}",
        s.config.iterations,
        s.initial_connected_fraction,
        s.final_connected_fraction,
        s.initial_dispersion,
        s.final_dispersion,
        dir.display()
    );
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            algo,
            iterations,
            out,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(algo) = algo {
                cfg.algorithm = algo;
            }
            if let Some(t) = iterations {
                cfg.iterations = t;
            }
            if let Some(dir) = out {
                cfg.output_dir = dir;
            }
            cfg.validate().context("effective configuration")?;
            echo(&cfg)?;
            let output = run_experiment(&cfg)?;
            write_run(&output, &cfg.output_dir)?;
            report(&cfg.algorithm.to_string(), &output, &cfg.output_dir);
        }
        Command::Preset { name, out, seed } => {
            for mut run in preset(&name, seed)? {
                let dir = out.join(run.label);
                run.config.output_dir = dir.clone();
                echo(&run.config)?;
                let output = run_experiment(&run.config)?;
                write_run(&output, &dir)?;
                report(run.label, &output, &dir);
            }
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            echo(&cfg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
