//! The four workflows behind the CLI subcommands.
//!
//! Config layering is the same everywhere: engine defaults, then the
//! scenario file or log header, then repeated `--set key=value` overrides,
//! then the `--threshold` shorthand.

use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use vitals_core::analysis::{
    correlate_health_tcomp, run_matrix, AnalysisError, DEFAULT_PERMUTATIONS,
};
use vitals_core::pipeline::{process_log, PipelineError, StreamEngine};
use vitals_core::sim::run_trial;
use vitals_core::telemetry::TelemetryError;

use crate::config::EngineConfig;
use crate::csvout;
use crate::error::CliError;
use crate::jsonl::{self, LogHeader};
use crate::scenario;

/// Raw override flags as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub sets: Vec<String>,
    pub threshold: Option<f64>,
}

impl Overrides {
    /// Layers these overrides onto a base configuration.
    fn onto(&self, base: EngineConfig) -> Result<EngineConfig, CliError> {
        let mut cfg = base;
        cfg.apply(&self.sets, self.threshold)?;
        Ok(cfg)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>, CliError> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(fs::File::create(dir.join(name))?))
}

fn pipeline_error(e: PipelineError) -> CliError {
    match e {
        PipelineError::Telemetry(TelemetryError::InsufficientDuration) => {
            CliError::insufficient(TelemetryError::InsufficientDuration)
        }
        other => CliError::internal(other),
    }
}

/// `simulate`: run one scenario and write its telemetry log plus the trial
/// summary.
pub fn cmd_simulate(
    scenario_path: &Path,
    seed: Option<u64>,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), CliError> {
    let text = fs::read_to_string(scenario_path)
        .map_err(|e| CliError::Input(format!("{}: {e}", scenario_path.display())))?;
    let mut scenario = scenario::parse_scenario(&text)?;
    let cfg = overrides.onto(EngineConfig {
        params: scenario.params,
        ..EngineConfig::default()
    })?;
    scenario.params = cfg.params;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    scenario.validate().map_err(CliError::input)?;
    let trial = run_trial(&scenario, &cfg.vitals, &cfg.health).map_err(CliError::internal)?;

    let mut log_file = create(out_dir, "telemetry.jsonl")?;
    jsonl::write_log(&trial.log, &mut log_file)?;
    log_file.flush()?;
    let mut trial_file = create(out_dir, "trial.csv")?;
    csvout::write_trial_csv(&mut trial_file, &trial)?;
    trial_file.flush()?;
    eprintln!(
        "trial {}: t_comp {} s, avg health {}",
        if trial.completed {
            "completed"
        } else {
            "failed"
        },
        trial.t_comp,
        trial.avg_health
    );
    Ok(())
}

/// `replay`: run the full offline pipeline over a recorded log and write
/// vitals, health, and alert CSVs.
pub fn cmd_replay(log_path: &Path, out_dir: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let file = fs::File::open(log_path)
        .map_err(|e| CliError::Input(format!("{}: {e}", log_path.display())))?;
    let mut log = jsonl::parse_log(std::io::BufReader::new(file))?;
    let cfg = overrides.onto(EngineConfig {
        params: log.params,
        ..EngineConfig::default()
    })?;
    log.params = cfg.params;
    let processed = process_log(&log, &cfg.vitals, &cfg.health).map_err(pipeline_error)?;

    let mut vitals_file = create(out_dir, "vitals.csv")?;
    csvout::write_vitals_csv(&mut vitals_file, &processed.vitals)?;
    vitals_file.flush()?;
    let mut health_file = create(out_dir, "health.csv")?;
    csvout::write_health_csv(&mut health_file, &processed.health)?;
    health_file.flush()?;
    let mut alerts_file = create(out_dir, "alerts.csv")?;
    csvout::write_alerts_csv(&mut alerts_file, &processed.alerts)?;
    alerts_file.flush()?;
    Ok(())
}

/// `monitor`: stream frames from stdin, emit one health line per 1 Hz tick
/// and an alert line whenever the debounced threshold condition first
/// holds. Malformed frames are skipped with a warning on stderr.
pub fn cmd_monitor(
    input: impl BufRead,
    mut output: impl Write,
    overrides: &Overrides,
) -> Result<(), CliError> {
    let mut engine: Option<StreamEngine> = None;
    let mut header = LogHeader::default();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if idx == 0 {
            if let Some(parsed) = jsonl::parse_header(&line) {
                match parsed {
                    Ok(h) => header = h,
                    Err(e) => eprintln!("warning: {e}"),
                }
                continue;
            }
        }
        let frame = match jsonl::parse_frame(&line, line_no, &header) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("warning: {e}");
                continue;
            }
        };
        let engine = match &mut engine {
            Some(e) => e,
            None => {
                let cfg = overrides.onto(EngineConfig {
                    params: header.params,
                    ..EngineConfig::default()
                })?;
                engine.insert(
                    StreamEngine::new(cfg.params, cfg.vitals, cfg.health)
                        .map_err(CliError::internal)?,
                )
            }
        };
        let updates = match engine.push_frame(frame) {
            Ok(u) => u,
            Err(e) => {
                eprintln!("warning: line {line_no}: {e}");
                continue;
            }
        };
        for update in updates {
            let s = update.sample;
            writeln!(
                output,
                "health t={} p_total={} health={} n_vitals={}",
                s.t, s.p_total, s.health, s.n_vitals
            )?;
            if let Some(trigger) = update.trigger {
                writeln!(
                    output,
                    "alert t_start={} t_fired={} min_health={}",
                    trigger.t_start, trigger.t_fired, trigger.min_health
                )?;
            }
        }
        output.flush()?;
    }
    Ok(())
}

/// `experiment`: run the level matrix, write the summary CSV, then the
/// correlation report. Summaries are written even when the correlation
/// cannot be computed.
pub fn cmd_experiment(
    levels: &[u32],
    trials: u32,
    base_seed: u64,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<(), CliError> {
    if levels.is_empty() {
        return Err(CliError::Input("no levels given".into()));
    }
    if trials == 0 {
        return Err(CliError::Input("--trials must be >= 1".into()));
    }
    let cfg = overrides.onto(EngineConfig::default())?;
    let summaries = run_matrix(
        levels,
        trials,
        base_seed,
        &cfg.params,
        &cfg.vitals,
        &cfg.health,
    )
    .map_err(|e| match e {
        AnalysisError::Sim(s) => CliError::Input(s.to_string()),
        other => CliError::internal(other),
    })?;
    let mut summary_file = create(out_dir, "summary.csv")?;
    csvout::write_summary_csv(&mut summary_file, &summaries)?;
    summary_file.flush()?;

    let corr = correlate_health_tcomp(&summaries).map_err(|e| match e {
        AnalysisError::InsufficientData { .. }
        | AnalysisError::TooFewSamples { .. }
        | AnalysisError::ZeroRankVariance => CliError::insufficient(e),
        other => CliError::internal(other),
    })?;
    let mut report = Vec::new();
    csvout::write_correlation_report(&mut report, &summaries, &corr, DEFAULT_PERMUTATIONS)?;
    let mut report_file = create(out_dir, "report.txt")?;
    report_file.write_all(&report)?;
    report_file.flush()?;
    std::io::stdout().write_all(&report)?;
    Ok(())
}
