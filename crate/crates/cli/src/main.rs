mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

/// Inertial Bregman proximal DC solvers for Rician denoising and phase retrieval.
///
/// Exit codes: 0 success, 1 runtime failure, 2 solve stopped at max_iter,
/// 3 configuration error.
#[derive(Parser)]
#[command(name = "bregdc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degrade a ground-truth image.
    Simulate(Common),
    /// Restore from simulated or recorded measurements.
    Solve(Common),
    /// Compare inertial and plain iterations over a directory of images.
    Bench(Common),
    /// PSNR and SSIM of `input` against `ground_truth`.
    Metrics(Common),
}

#[derive(Args)]
struct Common {
    /// JSON file with run settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one setting; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (run, common): (fn(&RunConfig) -> _, Common) = match cli.command {
        Command::Simulate(c) => (commands::cmd_simulate, c),
        Command::Solve(c) => (commands::cmd_solve, c),
        Command::Bench(c) => (commands::cmd_bench, c),
        Command::Metrics(c) => (commands::cmd_metrics, c),
    };
    let result = RunConfig::load(common.config.as_deref(), &common.set, common.seed).and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
