use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vitals_cli::commands::{self, Overrides};

/// Robot telemetry vitals and health toolkit: simulate degradation trials,
/// replay logs offline, monitor a live frame stream, or run the full
/// level-matrix experiment.
#[derive(Parser)]
#[command(name = "vitals", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file through the simulator.
    ///
    /// Writes telemetry.jsonl and trial.csv into the output directory.
    Simulate {
        /// Scenario file (flat key = value format).
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Recompute vitals, health, and alerts for a recorded log.
    ///
    /// Writes vitals.csv, health.csv, and alerts.csv into the output
    /// directory.
    Replay {
        /// Telemetry log in JSONL format.
        #[arg(long)]
        log: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Stream frames from stdin and emit health and alert lines on stdout.
    Monitor {
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run the degradation-level experiment matrix.
    ///
    /// Writes summary.csv and report.txt into the output directory and
    /// prints the report.
    Experiment {
        /// Degradation levels to run (comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = (0..vitals_core::sim::NUM_LEVELS).collect::<Vec<_>>())]
        levels: Vec<u32>,
        /// Seeded trials per level.
        #[arg(long, default_value_t = 10)]
        trials: u32,
        /// Base seed; trial i uses seed base + i.
        #[arg(long, default_value_t = 1000)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
}

#[derive(clap::Args)]
struct OverrideArgs {
    /// Override an engine constant, e.g. --set loc.epsilon=0.05
    /// (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Shorthand for --set health.alert_threshold=<value>.
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
}

impl From<OverrideArgs> for Overrides {
    fn from(args: OverrideArgs) -> Self {
        Overrides {
            sets: args.set,
            threshold: args.threshold,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            scenario,
            seed,
            out,
            overrides,
        } => commands::cmd_simulate(&scenario, seed, &out, &overrides.into()),
        Command::Replay {
            log,
            out,
            overrides,
        } => commands::cmd_replay(&log, &out, &overrides.into()),
        Command::Monitor { overrides } => {
            let stdin = std::io::stdin().lock();
            let stdout = BufWriter::new(std::io::stdout().lock());
            commands::cmd_monitor(BufReader::new(stdin), stdout, &overrides.into())
        }
        Command::Experiment {
            levels,
            trials,
            seed,
            out,
            overrides,
        } => commands::cmd_experiment(&levels, trials, seed, &out, &overrides.into()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
