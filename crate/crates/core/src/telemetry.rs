//! Telemetry data model and the preprocessing primitives every vital
//! consumes: 1 Hz resampling (zero-order hold), rolling means, and finite
//! differences.
//!
//! Timestamps are trial-relative seconds. All downstream math assumes the
//! canonical 1 Hz tick grid produced by [`resample_1hz`].

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Planar pose. Heading is normalized into `(-pi, pi]` at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, heading: f64) -> Result<Self, TelemetryError> {
        if !(x.is_finite() && y.is_finite() && heading.is_finite()) {
            return Err(TelemetryError::NonFinite("pose"));
        }
        Ok(Self {
            x,
            y,
            heading: math::normalize_angle(heading),
        })
    }
}

/// One laser sweep. Raw ranges may contain non-finite entries; they are
/// only cleaned up by [`LaserScan::sanitized_ranges`] before any image math.
#[derive(Debug, Clone, PartialEq)]
pub struct LaserScan {
    ranges: Vec<f64>,
    range_max: f64,
}

impl LaserScan {
    /// Minimum number of beams: the noise estimate needs a 3x3 image.
    pub const MIN_BEAMS: usize = 9;

    pub fn new(ranges: Vec<f64>, range_max: f64) -> Result<Self, TelemetryError> {
        if ranges.len() < Self::MIN_BEAMS {
            return Err(TelemetryError::ScanTooShort { len: ranges.len() });
        }
        if !range_max.is_finite() || range_max <= 0.0 {
            return Err(TelemetryError::NonFinite("range_max"));
        }
        Ok(Self { ranges, range_max })
    }

    pub fn ranges(&self) -> &[f64] {
        &self.ranges
    }

    pub fn range_max(&self) -> f64 {
        self.range_max
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Ranges with non-finite entries replaced by `range_max` (no-return
    /// convention) and everything clamped into `[0, range_max]`.
    pub fn sanitized_ranges(&self) -> Vec<f64> {
        self.ranges
            .iter()
            .map(|&r| {
                if r.is_finite() {
                    r.clamp(0.0, self.range_max)
                } else {
                    self.range_max
                }
            })
            .collect()
    }
}

/// One time-stamped telemetry sample.
///
/// `accel_z` is optional: platforms without an IMU simply never report it,
/// which disables the jerk vital for the whole log.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryFrame {
    /// Seconds since trial start; strictly increasing within a log.
    pub t: f64,
    /// Position estimate after sensor fusion.
    pub fused_pose: Pose2D,
    /// Raw wheel-odometry estimate (redundant with `fused_pose`).
    pub raw_odom_pose: Pose2D,
    /// Vertical acceleration in m/s^2, if an IMU is present.
    pub accel_z: Option<f64>,
    pub scan: LaserScan,
    /// Active navigational goal.
    pub goal: Pose2D,
}

impl TelemetryFrame {
    pub fn validate(&self) -> Result<(), TelemetryError> {
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(TelemetryError::NegativeTime);
        }
        if let Some(az) = self.accel_z {
            if !az.is_finite() {
                return Err(TelemetryError::NonFinite("accel_z"));
            }
        }
        Ok(())
    }
}

/// Per-robot motion constants used by the vitals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotParams {
    /// Preset cruising speed, m/s.
    pub v_nominal: f64,
    /// Speed the platform cannot legitimately exceed, m/s.
    pub v_max: f64,
    /// Speeds at or below this are treated as "not moving", m/s.
    pub v_trivial: f64,
    /// Nominal sample rate of the stream, Hz; 1.0 after resampling.
    pub sample_rate: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        Self {
            v_nominal: 0.5,
            v_max: 1.0,
            v_trivial: 0.01,
            sample_rate: 1.0,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<(), TelemetryError> {
        let ok = self.v_trivial > 0.0
            && self.v_trivial < self.v_nominal
            && self.v_nominal <= self.v_max
            && self.sample_rate > 0.0
            && [self.v_nominal, self.v_max, self.v_trivial, self.sample_rate]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(TelemetryError::InvalidParams(
                "require 0 < v_trivial < v_nominal <= v_max and sample_rate > 0",
            ))
        }
    }
}

/// A time-ordered, non-empty sequence of frames plus the robot constants.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryLog {
    frames: Vec<TelemetryFrame>,
    pub params: RobotParams,
}

impl TelemetryLog {
    pub fn new(frames: Vec<TelemetryFrame>, params: RobotParams) -> Result<Self, TelemetryError> {
        if frames.is_empty() {
            return Err(TelemetryError::NoFrames);
        }
        params.validate()?;
        for (i, f) in frames.iter().enumerate() {
            f.validate()?;
            if i > 0 && f.t <= frames[i - 1].t {
                return Err(TelemetryError::NonMonotonicTimestamps { index: i });
            }
        }
        Ok(Self { frames, params })
    }

    pub fn frames(&self) -> &[TelemetryFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Seconds covered by the log.
    pub fn span(&self) -> f64 {
        self.frames.last().unwrap().t - self.frames[0].t
    }

    /// True when every frame carries a vertical-acceleration sample.
    pub fn has_accel(&self) -> bool {
        self.frames.iter().all(|f| f.accel_z.is_some())
    }
}

/// Errors from telemetry construction and preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub enum TelemetryError {
    /// Log or stream contained no frames.
    NoFrames,
    /// Timestamps must be strictly increasing; `index` is the offender.
    NonMonotonicTimestamps {
        index: usize,
    },
    /// A field that must be finite was not.
    NonFinite(&'static str),
    /// Frame timestamp negative or non-finite.
    NegativeTime,
    /// Resampling needs at least one second of data.
    InsufficientDuration,
    /// Rolling mean window must be at least 1.
    ZeroWindow,
    /// Finite differences need two samples.
    NeedTwoSamples,
    /// Differentiation step must be positive.
    NonPositiveDt,
    /// Scan shorter than [`LaserScan::MIN_BEAMS`].
    ScanTooShort {
        len: usize,
    },
    InvalidParams(&'static str),
}

impl fmt::Display for TelemetryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoFrames => write!(f, "no frames"),
            Self::NonMonotonicTimestamps { index } => {
                write!(f, "timestamps not strictly increasing at frame {index}")
            }
            Self::NonFinite(what) => write!(f, "{what} must be finite"),
            Self::NegativeTime => write!(f, "frame time must be finite and >= 0"),
            Self::InsufficientDuration => write!(f, "insufficient duration: need >= 1 s of data"),
            Self::ZeroWindow => write!(f, "window must be >= 1"),
            Self::NeedTwoSamples => write!(f, "need two samples"),
            Self::NonPositiveDt => write!(f, "dt must be > 0"),
            Self::ScanTooShort { len } => {
                write!(f, "scan too short: {len} beams, need >= 9")
            }
            Self::InvalidParams(msg) => write!(f, "invalid robot params: {msg}"),
        }
    }
}

impl core::error::Error for TelemetryError {}

/// Rolling window average with left-truncated warm-up: `out[i]` is the mean
/// of the last `min(i + 1, window)` inputs. Output length equals input
/// length.
pub fn rolling_mean(series: &[f64], window: usize) -> Result<Vec<f64>, TelemetryError> {
    if window == 0 {
        return Err(TelemetryError::ZeroWindow);
    }
    let mut out = Vec::with_capacity(series.len());
    let mut acc = 0.0;
    for i in 0..series.len() {
        acc += series[i];
        if i >= window {
            acc -= series[i - window];
        }
        let n = usize::min(i + 1, window);
        out.push(acc / n as f64);
    }
    Ok(out)
}

/// Forward difference: `out[i] = (series[i+1] - series[i]) / dt`.
pub fn finite_difference(series: &[f64], dt: f64) -> Result<Vec<f64>, TelemetryError> {
    if series.len() < 2 {
        return Err(TelemetryError::NeedTwoSamples);
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(TelemetryError::NonPositiveDt);
    }
    Ok(series.windows(2).map(|w| (w[1] - w[0]) / dt).collect())
}

/// Incremental 1 Hz resampler.
///
/// Emits one frame per integer tick `t = ceil(t_first), ...` as soon as the
/// input stream reaches the tick. Every field is the last observation at or
/// before the tick (zero-order hold) except `accel_z`, which is the mean of
/// the raw samples in the preceding second `(tick-1, tick]`; IMU output is
/// noisy enough that a plain hold would alias.
///
/// A single frame without `accel_z` disables acceleration output for the
/// rest of the stream, mirroring how the jerk vital is dropped for logs
/// from IMU-less robots.
#[derive(Debug, Clone)]
pub struct StreamingResampler {
    next_tick: Option<u64>,
    last_t: f64,
    held: Option<TelemetryFrame>,
    accel_enabled: bool,
    accel_window: VecDeque<(f64, f64)>,
}

impl Default for StreamingResampler {
    fn default() -> Self {
        Self::new()
    }
}

impl StreamingResampler {
    pub fn new() -> Self {
        Self {
            next_tick: None,
            last_t: -1.0,
            held: None,
            accel_enabled: true,
            accel_window: VecDeque::new(),
        }
    }

    /// Drops acceleration from all further output. Used by the batch path,
    /// which knows up front that some frame lacks `accel_z`; the streaming
    /// path instead disables when the first such frame arrives.
    pub fn disable_accel(&mut self) {
        self.accel_enabled = false;
        self.accel_window.clear();
    }

    /// Feeds one raw frame, returning the 1 Hz frames it completes
    /// (possibly none, possibly several for sparse input).
    pub fn push(&mut self, frame: TelemetryFrame) -> Result<Vec<TelemetryFrame>, TelemetryError> {
        frame.validate()?;
        if self.next_tick.is_some() && frame.t <= self.last_t {
            return Err(TelemetryError::NonMonotonicTimestamps { index: 0 });
        }
        self.last_t = frame.t;
        if self.next_tick.is_none() {
            self.next_tick = Some(math::ceil(frame.t) as u64);
        }

        match frame.accel_z {
            Some(az) if self.accel_enabled => self.accel_window.push_back((frame.t, az)),
            _ => {
                self.accel_enabled = false;
                self.accel_window.clear();
            }
        }

        let mut out = Vec::new();
        let mut tick = self.next_tick.unwrap();
        while tick as f64 <= frame.t {
            let src = if frame.t == tick as f64 {
                &frame
            } else {
                self.held.as_ref().unwrap_or(&frame)
            };
            out.push(self.emit(tick, src));
            tick += 1;
        }
        self.next_tick = Some(tick);
        // keep only samples still needed by the next tick's window
        let horizon = tick as f64 - 1.0;
        while self
            .accel_window
            .front()
            .is_some_and(|&(t, _)| t <= horizon)
        {
            self.accel_window.pop_front();
        }
        self.held = Some(frame);
        Ok(out)
    }

    fn emit(&self, tick: u64, src: &TelemetryFrame) -> TelemetryFrame {
        let t = tick as f64;
        let accel_z = if self.accel_enabled {
            let (sum, n) = self
                .accel_window
                .iter()
                .filter(|&&(ts, _)| ts > t - 1.0 && ts <= t)
                .fold((0.0, 0u32), |(s, n), &(_, az)| (s + az, n + 1));
            if n > 0 {
                Some(sum / n as f64)
            } else {
                src.accel_z
            }
        } else {
            None
        };
        TelemetryFrame {
            t,
            fused_pose: src.fused_pose,
            raw_odom_pose: src.raw_odom_pose,
            accel_z,
            scan: src.scan.clone(),
            goal: src.goal,
        }
    }
}

/// Downsamples a log onto the canonical 1 Hz tick grid. Idempotent: a log
/// already on the grid passes through unchanged.
pub fn resample_1hz(log: &TelemetryLog) -> Result<TelemetryLog, TelemetryError> {
    if log.span() < 1.0 {
        return Err(TelemetryError::InsufficientDuration);
    }
    let mut resampler = StreamingResampler::new();
    if !log.has_accel() {
        resampler.disable_accel();
    }
    let mut frames = Vec::new();
    for frame in log.frames() {
        frames.extend(resampler.push(frame.clone())?);
    }
    let params = RobotParams {
        sample_rate: 1.0,
        ..log.params
    };
    TelemetryLog::new(frames, params)
}
