//! Newline-delimited JSON telemetry logs.
//!
//! One frame per line with the flat schema
//! `t, fx, fy, fh, ox, oy, oh, az, goal_x, goal_y, ranges[]`; `az` may be
//! null or absent. The first line may be a header object carrying the
//! robot params and the scanner's maximum range; absent fields take the
//! engine defaults.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use vitals_core::telemetry::{LaserScan, Pose2D, RobotParams, TelemetryFrame, TelemetryLog};

use crate::error::FormatError;

pub const DEFAULT_RANGE_MAX_M: f64 = 30.0;

/// Stream-level settings parsed from (or written to) the header line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogHeader {
    pub params: RobotParams,
    pub range_max: f64,
}

impl Default for LogHeader {
    fn default() -> Self {
        Self {
            params: RobotParams::default(),
            range_max: DEFAULT_RANGE_MAX_M,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HeaderRecord {
    params: ParamsRecord,
}

#[derive(Serialize, Deserialize)]
struct ParamsRecord {
    #[serde(default = "defaults::v_nominal")]
    v_nominal: f64,
    #[serde(default = "defaults::v_max")]
    v_max: f64,
    #[serde(default = "defaults::v_trivial")]
    v_trivial: f64,
    #[serde(default = "defaults::sample_rate")]
    sample_rate: f64,
    #[serde(default = "defaults::range_max")]
    range_max: f64,
}

mod defaults {
    use vitals_core::telemetry::RobotParams;

    pub fn v_nominal() -> f64 {
        RobotParams::default().v_nominal
    }
    pub fn v_max() -> f64 {
        RobotParams::default().v_max
    }
    pub fn v_trivial() -> f64 {
        RobotParams::default().v_trivial
    }
    pub fn sample_rate() -> f64 {
        RobotParams::default().sample_rate
    }
    pub fn range_max() -> f64 {
        super::DEFAULT_RANGE_MAX_M
    }
}

#[derive(Serialize, Deserialize)]
struct FrameRecord {
    t: f64,
    fx: f64,
    fy: f64,
    fh: f64,
    ox: f64,
    oy: f64,
    oh: f64,
    #[serde(default)]
    az: Option<f64>,
    goal_x: f64,
    goal_y: f64,
    ranges: Vec<f64>,
}

/// Returns the header settings if this line is a header record, `None` if
/// it looks like a frame.
pub fn parse_header(line: &str) -> Option<Result<LogHeader, FormatError>> {
    let value: serde_json::Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(_) => return None, // let the frame parser produce the error
    };
    value.get("params")?;
    Some(
        serde_json::from_value::<HeaderRecord>(value)
            .map_err(|e| FormatError::line(1, format!("bad header: {e}")))
            .and_then(|h| {
                let params = RobotParams {
                    v_nominal: h.params.v_nominal,
                    v_max: h.params.v_max,
                    v_trivial: h.params.v_trivial,
                    sample_rate: h.params.sample_rate,
                };
                params
                    .validate()
                    .map_err(|e| FormatError::line(1, e.to_string()))?;
                Ok(LogHeader {
                    params,
                    range_max: h.params.range_max,
                })
            }),
    )
}

/// Parses one frame line against the stream's header settings.
pub fn parse_frame(
    line: &str,
    line_no: usize,
    header: &LogHeader,
) -> Result<TelemetryFrame, FormatError> {
    let record: FrameRecord =
        serde_json::from_str(line).map_err(|e| FormatError::line(line_no, e.to_string()))?;
    let mk_pose = |x: f64, y: f64, h: f64, what: &str| {
        Pose2D::new(x, y, h).map_err(|e| FormatError::line(line_no, format!("{what}: {e}")))
    };
    let frame = TelemetryFrame {
        t: record.t,
        fused_pose: mk_pose(record.fx, record.fy, record.fh, "fused pose")?,
        raw_odom_pose: mk_pose(record.ox, record.oy, record.oh, "odom pose")?,
        accel_z: record.az,
        scan: LaserScan::new(record.ranges, header.range_max)
            .map_err(|e| FormatError::line(line_no, e.to_string()))?,
        goal: mk_pose(record.goal_x, record.goal_y, 0.0, "goal")?,
    };
    frame
        .validate()
        .map_err(|e| FormatError::line(line_no, e.to_string()))?;
    Ok(frame)
}

/// Parses a whole log. Errors name the offending 1-based line.
pub fn parse_log(reader: impl BufRead) -> Result<TelemetryLog, FormatError> {
    let mut header = LogHeader::default();
    let mut frames: Vec<TelemetryFrame> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if frames.is_empty() && idx == 0 {
            if let Some(parsed) = parse_header(&line) {
                header = parsed?;
                continue;
            }
        }
        let frame = parse_frame(&line, line_no, &header)?;
        if let Some(last) = frames.last() {
            if frame.t <= last.t {
                return Err(FormatError::line(
                    line_no,
                    format!("timestamp {} not after previous {}", frame.t, last.t),
                ));
            }
        }
        frames.push(frame);
    }
    if frames.is_empty() {
        return Err(FormatError::NoFrames);
    }
    TelemetryLog::new(frames, header.params).map_err(|e| FormatError::line(0, e.to_string()))
}

/// Writes a log with a leading header line. Output is byte-stable for a
/// given log.
pub fn write_log(log: &TelemetryLog, mut w: impl Write) -> std::io::Result<()> {
    let range_max = log
        .frames()
        .first()
        .map(|f| f.scan.range_max())
        .unwrap_or(DEFAULT_RANGE_MAX_M);
    let header = HeaderRecord {
        params: ParamsRecord {
            v_nominal: log.params.v_nominal,
            v_max: log.params.v_max,
            v_trivial: log.params.v_trivial,
            sample_rate: log.params.sample_rate,
            range_max,
        },
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for f in log.frames() {
        let record = FrameRecord {
            t: f.t,
            fx: f.fused_pose.x,
            fy: f.fused_pose.y,
            fh: f.fused_pose.heading,
            ox: f.raw_odom_pose.x,
            oy: f.raw_odom_pose.y,
            oh: f.raw_odom_pose.heading,
            az: f.accel_z,
            goal_x: f.goal.x,
            goal_y: f.goal.y,
            ranges: f.scan.ranges().to_vec(),
        };
        serde_json::to_writer(&mut w, &record)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
