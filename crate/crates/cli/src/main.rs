mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use firefilter_core::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "firefilter", version, about = "Level-set fire-front simulation and data assimilation")]
struct Cli {
    /// Worker threads for the ensemble loops; 0 picks the number of cores.
    #[arg(long, global = true, env = "FIREFILTER_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub(crate) struct RunArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Wind series (CSV); defaults to the wind block of the configuration.
    #[arg(long)]
    wind: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct FilterArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Observed fronts (JSON).
    #[arg(long)]
    pub fronts: PathBuf,
    /// Wind series (CSV); defaults to the wind block of the configuration.
    #[arg(long)]
    pub wind: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the ignition with fixed parameters.
    Simulate(SimulateArgs),
    /// Particle filter over observed fronts.
    Pf(FilterArgs),
    /// Ensemble Kalman filter over the spread parameters.
    Enkf(FilterArgs),
    /// Write synthetic truth fronts, wind and parameters.
    Synth(RunArgs),
    /// Score predicted fronts against truth fronts, CSV on stdout.
    Score {
        /// Predicted fronts (JSON).
        #[arg(long)]
        pred: PathBuf,
        /// Truth fronts (JSON).
        #[arg(long)]
        truth: PathBuf,
        /// Configuration supplying the grid.
        #[arg(long)]
        config: PathBuf,
        /// Score only records with this tag; by default the first present of
        /// analysis, mean, forecast, truth, untagged.
        #[arg(long)]
        tag: Option<String>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Validation => 2,
        ErrorKind::Runtime => 3,
        ErrorKind::Io => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(3);
    }
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(&a.run, a.wind.as_deref(), cli.threads),
        Command::Pf(a) => commands::filter(commands::Filter::Particle, &a, cli.threads),
        Command::Enkf(a) => commands::filter(commands::Filter::Enkf, &a, cli.threads),
        Command::Synth(a) => commands::synth(&a),
        Command::Score {
            pred,
            truth,
            config,
            tag,
        } => commands::score(&pred, &truth, &config, tag.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
