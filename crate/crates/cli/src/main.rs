use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use irscoop_cli::{parse_config, run_preset, run_spec, workers_from_env, ConfigError, Preset, RunError, RunSummary};

/// Simulate multi-operator IRS-assisted mmWave links and write CSV results.
#[derive(Parser)]
#[command(name = "irscoop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML file.
    Run { config: PathBuf },
    /// Reproduce a figure, or run the model self-checks.
    Preset {
        /// fig3, fig4, fig5, fig6 or validate
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = irscoop_cli::presets::PRESET_SEED)]
        seed: u64,
        /// Override every campaign's slot count.
        #[arg(long)]
        slots: Option<u64>,
    },
}

fn execute(cli: Cli) -> Result<RunSummary, RunError> {
    if let Some(n) = workers_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunError::Runtime(e.to_string()))?;
    }
    match cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| ConfigError::new("file", format!("{}: {e}", config.display())))?;
            run_spec(&parse_config(&text)?)
        }
        Command::Preset { name, out, seed, slots } => {
            let preset: Preset = name.parse()?;
            if slots == Some(0) {
                return Err(ConfigError::new("slots", "must be at least 1").into());
            }
            run_preset(preset, &out, seed, slots)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(summary) => {
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            for c in &summary.failed_checks {
                eprintln!("FAILED {c}");
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
