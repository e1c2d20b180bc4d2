//! `cyclic-sparse`: runs the learning pipeline and its pieces from JSON configs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "cyclic-sparse", version, about = "Learn sparse cyclic dynamics from burst data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Replace the seed given in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Refit the selected support by least squares (the default).
    #[arg(long, global = true, overrides_with = "no_debias")]
    pub debias: bool,
    /// Report the basis pursuit solution without refitting.
    #[arg(long = "no-debias", global = true, overrides_with = "debias")]
    pub no_debias: bool,
    /// Concurrent sweep rows for `table`.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

impl Global {
    /// The debias choice made on the command line, if any.
    pub fn debias_override(&self) -> Option<bool> {
        match (self.debias, self.no_debias) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the bursts of an experiment and write snapshots and velocities.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Assemble the Legendre and monomial dictionaries of an experiment.
    BuildDict {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve the basis pursuit problem for a dictionary written by `build-dict`.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the full pipeline and score it against the exact system.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Also write exact, learned and difference fields at these times.
        #[arg(long, value_delimiter = ',')]
        fields: Option<Vec<f64>>,
        /// Integration step for the field output.
        #[arg(long)]
        fields_dt: Option<f64>,
    },
    /// Run a sweep of experiments and write the error table.
    Table {
        #[arg(long)]
        config: PathBuf,
    },
    /// Monte Carlo check of the dictionary coherence bounds.
    Coherence {
        /// JSON with `cases` (list of `[n, p]`), `trials` and `seed`.
        #[arg(long, conflicts_with_all = ["n", "p"])]
        config: Option<PathBuf>,
        #[arg(long, requires = "p")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        p: Option<u32>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let outcome = match cli.command {
        Command::Simulate { config } => commands::simulate(&config, g),
        Command::BuildDict { config } => commands::build_dict(&config, g),
        Command::Solve { config } => commands::solve(&config, g),
        Command::Experiment { config, fields, fields_dt } => {
            commands::experiment(&config, fields.as_deref(), fields_dt, g)
        }
        Command::Table { config } => commands::table(&config, g),
        Command::Coherence { config, n, p, trials } => commands::coherence(config.as_deref(), n.zip(p), trials, g),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
