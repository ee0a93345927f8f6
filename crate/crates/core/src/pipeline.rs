//! Composition of the full monitoring pipeline: 1 Hz resampling, vitals,
//! total suffering, windowed health, and alerts, either batch over a log or
//! incrementally over a frame stream.

use alloc::vec::Vec;
use core::fmt;

use crate::health::{
    detect_alerts, total_suffering, AlertEvent, AlertMonitor, AlertTrigger, HealthConfig,
    HealthError, HealthSample, HealthTracker,
};
use crate::telemetry::{
    resample_1hz, RobotParams, StreamingResampler, TelemetryError, TelemetryFrame, TelemetryLog,
};
use crate::vitals::{VitalConfig, VitalReading, VitalsEngine, VitalsError};

/// Everything the pipeline produces for one log.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedLog {
    /// Five readings per 1 Hz tick.
    pub vitals: Vec<[VitalReading; 5]>,
    pub health: Vec<HealthSample>,
    pub alerts: Vec<AlertEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineError {
    Telemetry(TelemetryError),
    Vitals(VitalsError),
    Health(HealthError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Telemetry(e) => write!(f, "{e}"),
            Self::Vitals(e) => write!(f, "{e}"),
            Self::Health(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PipelineError {}

impl From<TelemetryError> for PipelineError {
    fn from(e: TelemetryError) -> Self {
        Self::Telemetry(e)
    }
}

impl From<VitalsError> for PipelineError {
    fn from(e: VitalsError) -> Self {
        Self::Vitals(e)
    }
}

impl From<HealthError> for PipelineError {
    fn from(e: HealthError) -> Self {
        Self::Health(e)
    }
}

/// Runs the batch pipeline: resample to 1 Hz, compute vitals and health per
/// tick, then segment alerts.
pub fn process_log(
    log: &TelemetryLog,
    vital_cfg: &VitalConfig,
    health_cfg: &HealthConfig,
) -> Result<ProcessedLog, PipelineError> {
    let resampled = resample_1hz(log)?;
    let mut engine = VitalsEngine::new(resampled.params, *vital_cfg)?;
    if !resampled.has_accel() {
        engine.disable_accel();
    }
    let mut tracker = HealthTracker::new(*health_cfg)?;
    let mut vitals = Vec::with_capacity(resampled.len());
    let mut health = Vec::with_capacity(resampled.len());
    for frame in resampled.frames() {
        let readings = engine.push(frame)?;
        let p_total = total_suffering(&readings)?;
        let n_vitals = readings.iter().filter(|r| r.available).count();
        health.push(tracker.push(frame.t, p_total, n_vitals)?);
        vitals.push(readings);
    }
    let alerts = detect_alerts(&health, health_cfg);
    Ok(ProcessedLog {
        vitals,
        health,
        alerts,
    })
}

/// One emitted tick of the streaming pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct TickUpdate {
    pub readings: [VitalReading; 5],
    pub sample: HealthSample,
    /// Present on the tick an alert fires (debounced).
    pub trigger: Option<AlertTrigger>,
}

/// Incremental pipeline for live frame streams: bounded latency of one
/// tick, one [`TickUpdate`] per completed tick.
///
/// Unlike the batch path, a missing `accel_z` disables the jerk vital only
/// from the frame where the gap is first seen, since a stream cannot know its
/// future.
#[derive(Debug, Clone)]
pub struct StreamEngine {
    resampler: StreamingResampler,
    vitals: VitalsEngine,
    tracker: HealthTracker,
    monitor: AlertMonitor,
}

impl StreamEngine {
    pub fn new(
        params: RobotParams,
        vital_cfg: VitalConfig,
        health_cfg: HealthConfig,
    ) -> Result<Self, PipelineError> {
        Ok(Self {
            resampler: StreamingResampler::new(),
            vitals: VitalsEngine::new(params, vital_cfg)?,
            tracker: HealthTracker::new(health_cfg)?,
            monitor: AlertMonitor::new(health_cfg)?,
        })
    }

    /// Feeds one raw frame; returns an update per 1 Hz tick it completed.
    pub fn push_frame(&mut self, frame: TelemetryFrame) -> Result<Vec<TickUpdate>, PipelineError> {
        let ticks = self.resampler.push(frame)?;
        let mut out = Vec::with_capacity(ticks.len());
        for tick_frame in ticks {
            let readings = self.vitals.push(&tick_frame)?;
            let p_total = total_suffering(&readings)?;
            let n_vitals = readings.iter().filter(|r| r.available).count();
            let sample = self.tracker.push(tick_frame.t, p_total, n_vitals)?;
            let trigger = self.monitor.push(&sample);
            out.push(TickUpdate {
                readings,
                sample,
                trigger,
            });
        }
        Ok(out)
    }
}
