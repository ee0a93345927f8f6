//! The five robot vitals and their suffering probabilities.
//!
//! Each vital watches one aspect of degradation on the 1 Hz telemetry grid:
//!
//! * goal progress: matched-filter similarity between the observed rate of
//!   change of goal distance and an ideal constant-speed approach;
//! * jerk: rate of change of vertical acceleration (topple risk);
//! * localisation error: seconds of sustained disagreement drift between
//!   raw odometry and the fused pose estimate;
//! * velocity: seconds of trivial or excessive speed;
//! * laser noise: image-noise estimate of the scan arranged as a square
//!   grayscale image.
//!
//! A transfer function maps each vital onto a probability of "suffering" in
//! `[0, 1]`; higher means more degradation.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::math;
use crate::telemetry::{
    LaserScan, Pose2D, RobotParams, TelemetryError, TelemetryFrame, TelemetryLog,
};

/// Identifies one of the five vitals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VitalId {
    GoalProgress,
    Jerk,
    LocalisationError,
    Velocity,
    LaserNoise,
}

impl VitalId {
    pub const ALL: [VitalId; 5] = [
        VitalId::GoalProgress,
        VitalId::Jerk,
        VitalId::LocalisationError,
        VitalId::Velocity,
        VitalId::LaserNoise,
    ];

    /// Stable identifier used in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            VitalId::GoalProgress => "goal_progress",
            VitalId::Jerk => "jerk",
            VitalId::LocalisationError => "localisation_error",
            VitalId::Velocity => "velocity",
            VitalId::LaserNoise => "laser_noise",
        }
    }
}

impl fmt::Display for VitalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Goal-progress vital constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalVitalConfig {
    /// Sigmoid steepness (negative: suffering falls as similarity rises).
    pub a: f64,
    /// Sigmoid midpoint in d_event units.
    pub b: f64,
    /// Matched-filter template length in 1 Hz samples.
    pub window: usize,
    /// |d_event| above this indicates clear (dis)similarity.
    pub similarity_threshold: f64,
}

/// Jerk vital constants for the inverted bell curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JerkVitalConfig {
    pub sigma1: f64,
    pub sigma2: f64,
    /// Jerk magnitude considered likely to topple the platform.
    pub topple_threshold: f64,
}

/// Localisation vital constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocVitalConfig {
    /// Linear slope of suffering per event-second.
    pub k: f64,
    /// Event seconds at which suffering saturates to 1.
    pub saturation_s: f64,
    /// Localisation-error drift below this (m/s) counts as zero.
    pub epsilon: f64,
}

/// Velocity vital sigmoid constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelVitalConfig {
    pub a: f64,
    pub b: f64,
}

/// Laser-noise vital sigmoid constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVitalConfig {
    pub a: f64,
    pub b: f64,
}

/// Per-vital constants, tunable for other platforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VitalConfig {
    pub goal: GoalVitalConfig,
    pub jerk: JerkVitalConfig,
    pub loc: LocVitalConfig,
    pub vel: VelVitalConfig,
    pub noise: NoiseVitalConfig,
}

impl Default for VitalConfig {
    fn default() -> Self {
        Self {
            goal: GoalVitalConfig {
                a: -6.0,
                b: -0.15,
                window: 5,
                similarity_threshold: 0.3,
            },
            jerk: JerkVitalConfig {
                sigma1: 0.4,
                sigma2: -0.9,
                topple_threshold: 0.5,
            },
            loc: LocVitalConfig {
                k: 0.2,
                saturation_s: 5.0,
                epsilon: 0.02,
            },
            vel: VelVitalConfig { a: 1.5, b: 2.5 },
            noise: NoiseVitalConfig { a: 5.0, b: 1.0 },
        }
    }
}

impl VitalConfig {
    pub fn validate(&self) -> Result<(), VitalsError> {
        let finite = [
            self.goal.a,
            self.goal.b,
            self.goal.similarity_threshold,
            self.jerk.sigma1,
            self.jerk.sigma2,
            self.jerk.topple_threshold,
            self.loc.k,
            self.loc.saturation_s,
            self.loc.epsilon,
            self.vel.a,
            self.vel.b,
            self.noise.a,
            self.noise.b,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(VitalsError::InvalidConfig("constants must be finite"));
        }
        if self.goal.window < 2 {
            return Err(VitalsError::InvalidConfig("goal window must be >= 2"));
        }
        if self.loc.epsilon <= 0.0 {
            return Err(VitalsError::InvalidConfig("loc epsilon must be > 0"));
        }
        if self.jerk.sigma1 == 0.0 || self.jerk.sigma2 == 0.0 {
            return Err(VitalsError::InvalidConfig("jerk sigmas must be nonzero"));
        }
        Ok(())
    }
}

/// One vital's output at one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VitalReading {
    pub id: VitalId,
    pub t: f64,
    /// The vital's intermediate scalar: d_event, jerk, t_event seconds, or
    /// the noise score. Zero while unavailable.
    pub raw: f64,
    pub p_suffering: f64,
    /// Unavailable readings are excluded from health aggregation.
    pub available: bool,
}

impl VitalReading {
    fn unavailable(id: VitalId, t: f64) -> Self {
        Self {
            id,
            t,
            raw: 0.0,
            p_suffering: 0.0,
            available: false,
        }
    }
}

/// Errors from vital computation.
#[derive(Debug, Clone, PartialEq)]
pub enum VitalsError {
    WrongWindowLength { expected: usize, got: usize },
    NegativeEventTime,
    ImageTooSmall { width: usize, height: usize },
    ScanTooShort { len: usize },
    InvalidConfig(&'static str),
    Telemetry(TelemetryError),
}

impl fmt::Display for VitalsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::WrongWindowLength { expected, got } => {
                write!(
                    f,
                    "window length {got} does not match template length {expected}"
                )
            }
            Self::NegativeEventTime => write!(f, "event time must be >= 0"),
            Self::ImageTooSmall { width, height } => {
                write!(f, "image {width}x{height} too small, need >= 3x3")
            }
            Self::ScanTooShort { len } => write!(f, "scan too short: {len} beams, need >= 9"),
            Self::InvalidConfig(msg) => write!(f, "invalid vital config: {msg}"),
            Self::Telemetry(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for VitalsError {}

impl From<TelemetryError> for VitalsError {
    fn from(e: TelemetryError) -> Self {
        Self::Telemetry(e)
    }
}

/// Euclidean distance from a pose to the navigational goal.
pub fn distance_to_goal(pose: &Pose2D, goal: &Pose2D) -> f64 {
    math::hypot2(goal.x - pose.x, goal.y - pose.y)
}

/// Magnitude of disagreement between the raw odometry and fused position
/// estimates.
pub fn localisation_error(raw: &Pose2D, fused: &Pose2D) -> f64 {
    math::hypot2(raw.x - fused.x, raw.y - fused.y)
}

/// Matched-filter similarity between a window of goal-distance rates and
/// the ideal approach template (constant `-v_nominal`).
///
/// The correlation is normalised by the template energy and clamped, so a
/// steady approach at nominal speed scores +1, a steady retreat scores -1,
/// and a stationary robot scores 0.
pub fn matched_filter_event(
    dg_dot_window: &[f64],
    params: &RobotParams,
    cfg: &GoalVitalConfig,
) -> Result<f64, VitalsError> {
    if dg_dot_window.len() != cfg.window {
        return Err(VitalsError::WrongWindowLength {
            expected: cfg.window,
            got: dg_dot_window.len(),
        });
    }
    let template = -params.v_nominal;
    let num: f64 = dg_dot_window.iter().map(|&x| x * template).sum();
    let denom = template * template * cfg.window as f64;
    Ok((num / denom).clamp(-1.0, 1.0))
}

/// Suffering given goal-progress similarity `d_event` (sigmoid, strictly
/// decreasing: high similarity to an ideal approach means low suffering).
pub fn p_suffer_goal_progress(d_event: f64, cfg: &GoalVitalConfig) -> f64 {
    1.0 / (1.0 + math::exp(-cfg.a * d_event + cfg.a * cfg.b))
}

/// Rate of change of smoothed vertical acceleration at 1 Hz.
pub fn jerk_signal(accel_z_1hz: &[f64]) -> Result<Vec<f64>, TelemetryError> {
    crate::telemetry::finite_difference(accel_z_1hz, 1.0)
}

/// Suffering given vertical jerk: an inverted bell curve, even in `jerk`
/// with its minimum at zero.
pub fn p_suffer_jerk(jerk: f64, cfg: &JerkVitalConfig) -> f64 {
    let norm = 1.0 / (math::sqrt(2.0 * PI) * cfg.sigma1);
    let bell = norm * math::exp(-(0.5 / (cfg.sigma2 * cfg.sigma2)) * jerk * jerk);
    (1.0 - bell).clamp(0.0, 1.0)
}

/// Run length of consecutive `true` flags ending at each index; resets to
/// zero the first tick the flag is false.
pub fn consecutive_event_seconds(flags: &[bool]) -> Vec<u32> {
    let mut out = Vec::with_capacity(flags.len());
    let mut run = 0u32;
    for &f in flags {
        run = if f { run + 1 } else { 0 };
        out.push(run);
    }
    out
}

/// Suffering after `t_event` seconds of sustained localisation-error drift:
/// linear ramp `k * t` saturating to 1 at `saturation_s`.
pub fn p_suffer_localisation(t_event: f64, cfg: &LocVitalConfig) -> Result<f64, VitalsError> {
    if t_event.is_nan() || t_event < 0.0 {
        return Err(VitalsError::NegativeEventTime);
    }
    Ok(if t_event >= cfg.saturation_s {
        1.0
    } else {
        (cfg.k * t_event).clamp(0.0, 1.0)
    })
}

/// Speeds from successive 1 Hz fused poses.
pub fn speed_series(fused_poses: &[Pose2D]) -> Result<Vec<f64>, TelemetryError> {
    if fused_poses.len() < 2 {
        return Err(TelemetryError::NeedTwoSamples);
    }
    Ok(fused_poses
        .windows(2)
        .map(|w| math::hypot2(w[1].x - w[0].x, w[1].y - w[0].y))
        .collect())
}

/// Suffering after `t_event` seconds of trivial or excessive speed
/// (sigmoid, strictly increasing).
pub fn p_suffer_velocity(t_event: f64, cfg: &VelVitalConfig) -> f64 {
    1.0 / (1.0 + math::exp(-cfg.a * t_event + cfg.a * cfg.b))
}

/// Row-major grayscale image built from scan ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, VitalsError> {
        if width < 3 || height < 3 || data.len() != width * height {
            return Err(VitalsError::ImageTooSmall { width, height });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn transposed(&self) -> Self {
        let mut out = Vec::with_capacity(self.data.len());
        for x in 0..self.width {
            for y in 0..self.height {
                out.push(self.get(x, y));
            }
        }
        Self {
            width: self.height,
            height: self.width,
            data: out,
        }
    }
}

/// Rearranges sanitised scan ranges into a square grayscale image.
///
/// Side length is `ceil(sqrt(n))`; trailing cells are padded with the last
/// range so the padding never injects artificial edges.
pub fn scan_to_square_image(scan: &LaserScan) -> Result<GrayImage, VitalsError> {
    let ranges = scan.sanitized_ranges();
    let n = ranges.len();
    if n < LaserScan::MIN_BEAMS {
        return Err(VitalsError::ScanTooShort { len: n });
    }
    let side = math::ceil(math::sqrt(n as f64)) as usize;
    let fill = ranges[n - 1];
    let mut data = ranges;
    data.resize(side * side, fill);
    GrayImage::new(side, side, data)
}

/// Fast image-noise estimate: mean absolute response to the 3x3 mask
/// `[[1,-2,1],[-2,4,-2],[1,-2,1]]` over interior pixels, scaled by
/// `sqrt(pi/2) / 6`. The mask annihilates constant and planar images, so
/// smooth structure contributes nothing and white noise of standard
/// deviation sigma scores about sigma.
pub fn noise_variance(image: &GrayImage) -> Result<f64, VitalsError> {
    let (w, h) = (image.width(), image.height());
    if w < 3 || h < 3 {
        return Err(VitalsError::ImageTooSmall {
            width: w,
            height: h,
        });
    }
    let mut acc = 0.0;
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let response = image.get(x - 1, y - 1) - 2.0 * image.get(x, y - 1)
                + image.get(x + 1, y - 1)
                - 2.0 * image.get(x - 1, y)
                + 4.0 * image.get(x, y)
                - 2.0 * image.get(x + 1, y)
                + image.get(x - 1, y + 1)
                - 2.0 * image.get(x, y + 1)
                + image.get(x + 1, y + 1);
            acc += math::abs(response);
        }
    }
    let interior = ((w - 2) * (h - 2)) as f64;
    Ok(math::sqrt(PI / 2.0) * acc / (6.0 * interior))
}

/// Suffering given the scan noise score (sigmoid, strictly increasing).
pub fn p_suffer_noise(score: f64, cfg: &NoiseVitalConfig) -> f64 {
    1.0 / (1.0 + math::exp(-cfg.a * score + cfg.a * cfg.b))
}

/// Counts consecutive seconds for which a degradation predicate holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventCounter {
    /// Which vital's predicate this counter tracks.
    pub vital: VitalId,
    pub consecutive_seconds: u32,
}

impl EventCounter {
    pub fn new(vital: VitalId) -> Self {
        Self {
            vital,
            consecutive_seconds: 0,
        }
    }

    /// Advances one tick; resets to zero the first tick the flag is false.
    pub fn update(&mut self, flag: bool) -> u32 {
        self.consecutive_seconds = if flag {
            self.consecutive_seconds + 1
        } else {
            0
        };
        self.consecutive_seconds
    }
}

/// Streaming vitals computation over 1 Hz frames.
///
/// Holds the per-log state the vitals need: the trailing goal-distance-rate
/// window, previous samples for differencing, and the event counters. One
/// engine per log stream; distinct streams are independent.
#[derive(Debug, Clone)]
pub struct VitalsEngine {
    cfg: VitalConfig,
    params: RobotParams,
    accel_enabled: bool,
    tick: u64,
    prev_goal_dist: Option<f64>,
    dg_window: VecDeque<f64>,
    prev_accel: Option<f64>,
    prev_fused: Option<Pose2D>,
    prev_loc_err: Option<f64>,
    loc_counter: EventCounter,
    vel_counter: EventCounter,
}

impl VitalsEngine {
    pub fn new(params: RobotParams, cfg: VitalConfig) -> Result<Self, VitalsError> {
        cfg.validate()?;
        params.validate()?;
        Ok(Self {
            cfg,
            params,
            accel_enabled: true,
            tick: 0,
            prev_goal_dist: None,
            dg_window: VecDeque::new(),
            prev_accel: None,
            prev_fused: None,
            prev_loc_err: None,
            loc_counter: EventCounter::new(VitalId::LocalisationError),
            vel_counter: EventCounter::new(VitalId::Velocity),
        })
    }

    pub fn config(&self) -> &VitalConfig {
        &self.cfg
    }

    /// Marks the whole stream as IMU-less: the jerk vital stays unavailable.
    pub fn disable_accel(&mut self) {
        self.accel_enabled = false;
        self.prev_accel = None;
    }

    /// Consumes one 1 Hz frame and emits the five readings for its tick.
    pub fn push(&mut self, frame: &TelemetryFrame) -> Result<[VitalReading; 5], VitalsError> {
        let t = frame.t;

        // goal progress
        let goal_dist = distance_to_goal(&frame.fused_pose, &frame.goal);
        if let Some(prev) = self.prev_goal_dist {
            self.dg_window.push_back(goal_dist - prev);
            if self.dg_window.len() > self.cfg.goal.window {
                self.dg_window.pop_front();
            }
        }
        self.prev_goal_dist = Some(goal_dist);
        let goal = if self.dg_window.len() == self.cfg.goal.window {
            let window: Vec<f64> = self.dg_window.iter().copied().collect();
            let d_event = matched_filter_event(&window, &self.params, &self.cfg.goal)?;
            VitalReading {
                id: VitalId::GoalProgress,
                t,
                raw: d_event,
                p_suffering: p_suffer_goal_progress(d_event, &self.cfg.goal),
                available: true,
            }
        } else {
            VitalReading::unavailable(VitalId::GoalProgress, t)
        };

        // jerk
        if frame.accel_z.is_none() {
            self.accel_enabled = false;
            self.prev_accel = None;
        }
        let jerk = match (self.accel_enabled, self.prev_accel, frame.accel_z) {
            (true, Some(prev), Some(az)) => {
                let j = az - prev;
                VitalReading {
                    id: VitalId::Jerk,
                    t,
                    raw: j,
                    p_suffering: p_suffer_jerk(j, &self.cfg.jerk),
                    available: true,
                }
            }
            _ => VitalReading::unavailable(VitalId::Jerk, t),
        };
        if self.accel_enabled {
            self.prev_accel = frame.accel_z;
        }

        // localisation error drift
        let loc_err = localisation_error(&frame.raw_odom_pose, &frame.fused_pose);
        let loc_flag = match self.prev_loc_err {
            Some(prev) => math::abs(loc_err - prev) > self.cfg.loc.epsilon,
            None => false,
        };
        self.prev_loc_err = Some(loc_err);
        let loc_t = self.loc_counter.update(loc_flag) as f64;
        let loc = VitalReading {
            id: VitalId::LocalisationError,
            t,
            raw: loc_t,
            p_suffering: p_suffer_localisation(loc_t, &self.cfg.loc)?,
            available: true,
        };

        // velocity
        let vel_flag = match self.prev_fused {
            Some(prev) => {
                let speed = math::hypot2(frame.fused_pose.x - prev.x, frame.fused_pose.y - prev.y);
                speed <= self.params.v_trivial || speed >= self.params.v_max
            }
            None => false,
        };
        self.prev_fused = Some(frame.fused_pose);
        let vel_t = self.vel_counter.update(vel_flag) as f64;
        let vel = VitalReading {
            id: VitalId::Velocity,
            t,
            raw: vel_t,
            p_suffering: p_suffer_velocity(vel_t, &self.cfg.vel),
            available: true,
        };

        // laser noise
        let image = scan_to_square_image(&frame.scan)?;
        let score = noise_variance(&image)?;
        let noise = VitalReading {
            id: VitalId::LaserNoise,
            t,
            raw: score,
            p_suffering: p_suffer_noise(score, &self.cfg.noise),
            available: true,
        };

        self.tick += 1;
        Ok([goal, jerk, loc, vel, noise])
    }
}

/// Computes all five vitals for every tick of a 1 Hz log.
pub fn compute_vitals(
    log: &TelemetryLog,
    cfg: &VitalConfig,
) -> Result<Vec<[VitalReading; 5]>, VitalsError> {
    let mut engine = VitalsEngine::new(log.params, *cfg)?;
    if !log.has_accel() {
        engine.disable_accel();
    }
    log.frames().iter().map(|f| engine.push(f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telemetry::{resample_1hz, RobotParams};
    use alloc::vec;

    fn cfg() -> VitalConfig {
        VitalConfig::default()
    }

    // frozen transfer-function values, computed from the closed forms
    const P_GOAL_NEG1: f64 = 0.9939401985084159;
    const P_GOAL_03: f64 = 0.06297335605699649;
    const P_GOAL_0: f64 = 0.28905049737499604;
    const P_JERK_0: f64 = 0.002644298996418305;
    const P_JERK_05: f64 = 0.145269264584677;
    const P_JERK_2: f64 = 0.9155658724118234;
    const P_VEL_0: f64 = 0.022977369910025615;
    const P_VEL_6: f64 = 0.9947798743064416;
    const P_NOISE_0: f64 = 0.006692850924284856;
    const P_NOISE_07: f64 = 0.18242552380635634;
    const P_NOISE_14: f64 = 0.8807970779778824;

    #[test]
    fn distance_examples() {
        let p = |x, y| Pose2D::new(x, y, 0.0).unwrap();
        assert_eq!(distance_to_goal(&p(0.0, 0.0), &p(3.0, 4.0)), 5.0);
        assert_eq!(distance_to_goal(&p(1.0, 2.0), &p(1.0, 2.0)), 0.0);
        assert_eq!(distance_to_goal(&p(1.0, 1.0), &p(1.0, 2.0)), 1.0);
        assert_eq!(localisation_error(&p(1.0, 0.0), &p(0.0, 0.0)), 1.0);
        assert_eq!(localisation_error(&p(3.0, 4.0), &p(0.0, 0.0)), 5.0);
        assert_eq!(localisation_error(&p(2.0, 2.0), &p(2.0, 2.0)), 0.0);
    }

    #[test]
    fn matched_filter_anchors() {
        let params = RobotParams::default();
        let g = cfg().goal;
        let h = vec![-params.v_nominal; 5];
        let zeros = vec![0.0; 5];
        let anti: Vec<f64> = h.iter().map(|v| -v).collect();
        let half: Vec<f64> = h.iter().map(|v| 0.5 * v).collect();
        assert_eq!(matched_filter_event(&h, &params, &g).unwrap(), 1.0);
        assert_eq!(matched_filter_event(&zeros, &params, &g).unwrap(), 0.0);
        assert_eq!(matched_filter_event(&anti, &params, &g).unwrap(), -1.0);
        assert_eq!(matched_filter_event(&half, &params, &g).unwrap(), 0.5);
        assert!(matches!(
            matched_filter_event(&[0.0; 4], &params, &g),
            Err(VitalsError::WrongWindowLength {
                expected: 5,
                got: 4
            })
        ));
    }

    #[test]
    fn matched_filter_clamps() {
        let params = RobotParams::default();
        let g = cfg().goal;
        let fast = vec![-3.0 * params.v_nominal; 5];
        assert_eq!(matched_filter_event(&fast, &params, &g).unwrap(), 1.0);
    }

    #[test]
    fn goal_sigmoid_frozen_values() {
        let g = cfg().goal;
        assert!((p_suffer_goal_progress(-0.15, &g) - 0.5).abs() < 1e-12);
        assert!((p_suffer_goal_progress(-1.0, &g) - P_GOAL_NEG1).abs() < 1e-12);
        assert!((p_suffer_goal_progress(0.3, &g) - P_GOAL_03).abs() < 1e-12);
        assert!((p_suffer_goal_progress(0.0, &g) - P_GOAL_0).abs() < 1e-12);
    }

    #[test]
    fn jerk_signal_examples() {
        assert_eq!(jerk_signal(&[1.0, 1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(jerk_signal(&[0.0, 0.5]).unwrap(), vec![0.5]);
        assert_eq!(jerk_signal(&[0.2, -0.3]).unwrap(), vec![-0.5]);
        assert!(jerk_signal(&[0.0]).is_err());
    }

    #[test]
    fn jerk_curve_frozen_values() {
        let j = cfg().jerk;
        assert!((p_suffer_jerk(0.0, &j) - P_JERK_0).abs() < 1e-12);
        assert!((p_suffer_jerk(0.5, &j) - P_JERK_05).abs() < 1e-12);
        assert!((p_suffer_jerk(-0.5, &j) - P_JERK_05).abs() < 1e-12);
        assert!((p_suffer_jerk(2.0, &j) - P_JERK_2).abs() < 1e-12);
    }

    #[test]
    fn consecutive_seconds_examples() {
        assert_eq!(
            consecutive_event_seconds(&[false, true, true, true]),
            vec![0, 1, 2, 3]
        );
        assert_eq!(
            consecutive_event_seconds(&[true, true, false, true]),
            vec![1, 2, 0, 1]
        );
        assert_eq!(consecutive_event_seconds(&[false; 4]), vec![0; 4]);
    }

    #[test]
    fn localisation_ramp() {
        let l = cfg().loc;
        assert_eq!(p_suffer_localisation(0.0, &l).unwrap(), 0.0);
        assert!((p_suffer_localisation(3.0, &l).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(p_suffer_localisation(5.0, &l).unwrap(), 1.0);
        assert_eq!(p_suffer_localisation(7.0, &l).unwrap(), 1.0);
        assert!(matches!(
            p_suffer_localisation(-1.0, &l),
            Err(VitalsError::NegativeEventTime)
        ));
    }

    #[test]
    fn speed_series_examples() {
        let p = |x: f64, y: f64| Pose2D::new(x, y, 0.0).unwrap();
        let stationary = vec![p(1.0, 1.0); 4];
        assert_eq!(speed_series(&stationary).unwrap(), vec![0.0; 3]);
        let advancing: Vec<_> = (0..4).map(|i| p(0.5 * i as f64, 0.0)).collect();
        assert_eq!(speed_series(&advancing).unwrap(), vec![0.5; 3]);
        assert_eq!(
            speed_series(&[p(0.0, 0.0), p(3.0, 4.0)]).unwrap(),
            vec![5.0]
        );
        assert!(speed_series(&[p(0.0, 0.0)]).is_err());
    }

    #[test]
    fn velocity_sigmoid_frozen_values() {
        let v = cfg().vel;
        assert!((p_suffer_velocity(2.5, &v) - 0.5).abs() < 1e-12);
        assert!((p_suffer_velocity(0.0, &v) - P_VEL_0).abs() < 1e-12);
        assert!((p_suffer_velocity(6.0, &v) - P_VEL_6).abs() < 1e-12);
    }

    #[test]
    fn square_image_examples() {
        let scan9 = LaserScan::new((1..=9).map(f64::from).collect(), 100.0).unwrap();
        let img = scan_to_square_image(&scan9).unwrap();
        assert_eq!((img.width(), img.height()), (3, 3));
        assert_eq!(img.get(0, 0), 1.0);
        assert_eq!(img.get(2, 0), 3.0);
        assert_eq!(img.get(0, 1), 4.0);
        assert_eq!(img.get(2, 2), 9.0);

        let scan10 = LaserScan::new((1..=10).map(f64::from).collect(), 100.0).unwrap();
        let img = scan_to_square_image(&scan10).unwrap();
        assert_eq!((img.width(), img.height()), (4, 4));
        // 6 trailing cells padded with the last range
        for i in 10..16 {
            assert_eq!(img.get(i % 4, i / 4), 10.0);
        }

        let constant = LaserScan::new(vec![4.2; 12], 100.0).unwrap();
        let img = scan_to_square_image(&constant).unwrap();
        for y in 0..img.height() {
            for x in 0..img.width() {
                assert_eq!(img.get(x, y), 4.2);
            }
        }
    }

    #[test]
    fn noise_variance_annihilates_smooth_images() {
        let constant = GrayImage::new(5, 5, vec![3.25; 25]).unwrap();
        assert_eq!(noise_variance(&constant).unwrap(), 0.0);

        // dyadic affine plane: exactly representable, exact cancellation
        let mut data = Vec::new();
        for y in 0..6 {
            for x in 0..8 {
                data.push(1.0 + 0.5 * x as f64 + 0.25 * y as f64);
            }
        }
        let plane = GrayImage::new(8, 6, data).unwrap();
        assert_eq!(noise_variance(&plane).unwrap(), 0.0);
    }

    #[test]
    fn noise_variance_checkerboard() {
        let mut data = Vec::new();
        for y in 0..8 {
            for x in 0..8 {
                data.push(((x + y) % 2) as f64);
            }
        }
        let board = GrayImage::new(8, 8, data).unwrap();
        let score = noise_variance(&board).unwrap();
        assert!((score - 1.671085516420667).abs() < 1e-12);
    }

    #[test]
    fn noise_variance_shift_and_transpose_invariant() {
        let mut rng = crate::rng::SplitMix64::new(99);
        let data: Vec<f64> = (0..7 * 9).map(|_| rng.uniform()).collect();
        let img = GrayImage::new(9, 7, data.clone()).unwrap();
        let shifted = GrayImage::new(9, 7, data.iter().map(|v| v + 123.0).collect()).unwrap();
        let a = noise_variance(&img).unwrap();
        let b = noise_variance(&shifted).unwrap();
        assert!((a - b).abs() < 1e-9);

        let sq = GrayImage::new(8, 8, (0..64).map(|_| rng.uniform()).collect()).unwrap();
        let t = sq.transposed();
        assert!((noise_variance(&sq).unwrap() - noise_variance(&t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn noise_variance_recovers_gaussian_std() {
        // Monte-Carlo: mean estimate over 100 seeds within 15% of the
        // injected standard deviation
        let sigma = 0.3;
        let mut total = 0.0;
        for seed in 0..100u64 {
            let mut rng = crate::rng::SplitMix64::new(seed);
            let data: Vec<f64> = (0..64 * 64)
                .map(|_| {
                    let u1 = rng.uniform_open_low();
                    let u2 = rng.uniform();
                    5.0 + sigma * crate::sim::box_muller(u1, u2).unwrap()
                })
                .collect();
            let img = GrayImage::new(64, 64, data).unwrap();
            total += noise_variance(&img).unwrap();
        }
        let mean = total / 100.0;
        assert!((mean - sigma).abs() / sigma < 0.15, "mean estimate {mean}");
    }

    #[test]
    fn noise_sigmoid_frozen_values() {
        let n = cfg().noise;
        assert!((p_suffer_noise(1.0, &n) - 0.5).abs() < 1e-12);
        assert!((p_suffer_noise(0.0, &n) - P_NOISE_0).abs() < 1e-12);
        assert!((p_suffer_noise(0.7, &n) - P_NOISE_07).abs() < 1e-12);
        assert!((p_suffer_noise(1.4, &n) - P_NOISE_14).abs() < 1e-12);
    }

    fn stationary_log(ticks: usize) -> TelemetryLog {
        let frames: Vec<_> = (0..ticks)
            .map(|i| crate::telemetry::tests::frame(i as f64, 0.0))
            .collect();
        TelemetryLog::new(frames, RobotParams::default()).unwrap()
    }

    #[test]
    fn compute_vitals_stationary_robot() {
        let log = stationary_log(10);
        let out = compute_vitals(&log, &cfg()).unwrap();
        assert_eq!(out.len(), 10);

        // warm-up: goal progress needs a full window of rates
        for tick in out.iter().take(5) {
            assert!(!tick[0].available);
        }
        let goal = &out[9][0];
        assert!(goal.available);
        assert_eq!(goal.raw, 0.0);
        assert!((goal.p_suffering - P_GOAL_0).abs() < 1e-12);

        // velocity counter grows from the first measurable speed
        let vel = &out[9][3];
        assert_eq!(vel.raw, 9.0);
        assert!((vel.p_suffering - p_suffer_velocity(9.0, &cfg().vel)).abs() < 1e-15);

        // stationary, identical estimates: no localisation drift
        assert_eq!(out[9][2].p_suffering, 0.0);
        // clean constant scans
        assert_eq!(out[9][4].raw, 0.0);
        assert!((out[9][4].p_suffering - P_NOISE_0).abs() < 1e-12);
    }

    #[test]
    fn compute_vitals_ideal_approach() {
        let frames: Vec<_> = (0..20)
            .map(|i| crate::telemetry::tests::frame(i as f64, 0.5 * i as f64))
            .collect();
        let log = TelemetryLog::new(frames, RobotParams::default()).unwrap();
        let out = compute_vitals(&log, &cfg()).unwrap();
        let goal = &out[19][0];
        assert!(goal.available);
        assert!((goal.raw - 1.0).abs() < 1e-12);
        assert!((goal.p_suffering - p_suffer_goal_progress(1.0, &cfg().goal)).abs() < 1e-15);
        let vel = &out[19][3];
        assert_eq!(vel.raw, 0.0);
        assert!((vel.p_suffering - P_VEL_0).abs() < 1e-12);
    }

    #[test]
    fn compute_vitals_without_accel_has_four_available() {
        let frames: Vec<_> = (0..8)
            .map(|i| crate::telemetry::tests::frame_with_accel(i as f64, 0.5 * i as f64, None))
            .collect();
        let log = TelemetryLog::new(frames, RobotParams::default()).unwrap();
        let out = compute_vitals(&log, &cfg()).unwrap();
        for tick in &out {
            assert!(!tick[1].available);
        }
        // steady state: everything except jerk reports
        let last = &out[7];
        assert_eq!(last.iter().filter(|r| r.available).count(), 4);
    }

    #[test]
    fn compute_vitals_accepts_resampled_log() {
        let frames: Vec<_> = (0..=100)
            .map(|i| crate::telemetry::tests::frame(i as f64 * 0.1, 0.05 * i as f64))
            .collect();
        let log = TelemetryLog::new(frames, RobotParams::default()).unwrap();
        let out = compute_vitals(&resample_1hz(&log).unwrap(), &cfg()).unwrap();
        assert_eq!(out.len(), 11);
    }

    #[test]
    fn jerk_reading_tracks_accel_changes() {
        let az = [0.0, 0.0, 0.8, 0.8, 0.0];
        let frames: Vec<_> = az
            .iter()
            .enumerate()
            .map(|(i, &a)| crate::telemetry::tests::frame_with_accel(i as f64, 0.0, Some(a)))
            .collect();
        let log = TelemetryLog::new(frames, RobotParams::default()).unwrap();
        let out = compute_vitals(&log, &cfg()).unwrap();
        assert!(!out[0][1].available);
        assert_eq!(out[1][1].raw, 0.0);
        assert_eq!(out[2][1].raw, 0.8);
        assert_eq!(out[3][1].raw, 0.0);
        assert_eq!(out[4][1].raw, -0.8);
        assert!((out[2][1].p_suffering - p_suffer_jerk(0.8, &cfg().jerk)).abs() < 1e-15);
    }
}
