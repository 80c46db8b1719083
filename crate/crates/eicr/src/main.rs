use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eicr::cli;
use eicr::config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "eicr", about = "Environment-invariant curriculum relation learning, desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic dataset splits and stats
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's output_dir)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train one run per configured seed
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Run a single seed instead of the config's run_seeds
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on the test split
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the ablation grid and write long-format plus summary CSVs
    Ablate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the curriculum schedule as a t,lambda CSV
    ScheduleDump {
        #[arg(long, default_value_t = 30_000)]
        period: u64,
        #[arg(long, default_value_t = 0.9)]
        lambda_max: f64,
        #[arg(long, default_value_t = 70_000)]
        t_max: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run() -> eicr::Result<()> {
    let args = Cli::parse();
    match args.command {
        Command::Generate { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            cli::cmd_generate(&cfg, &out)
        }
        Command::Train { config, seed, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            cli::cmd_train(&cfg, &out, seed)
        }
        Command::Evaluate {
            config,
            checkpoint,
            out,
        } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            cli::cmd_evaluate(&cfg, &out, &checkpoint)
        }
        Command::Ablate { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            cli::cmd_ablate(&cfg, &out)
        }
        Command::ScheduleDump {
            period,
            lambda_max,
            t_max,
            out,
        } => cli::cmd_schedule_dump(period, lambda_max, t_max, &out),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
