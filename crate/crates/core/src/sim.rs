//! Desk-scale 1 Hz kinematic simulator with degradation injectors.
//!
//! A unicycle robot seeks a fixed goal while injectors perturb its
//! telemetry: laser-noise bursts, stuck and wheel-slip episodes, vertical
//! jerk pulses, and high-friction zones that scale speed. The point is not
//! physics fidelity; it is producing telemetry whose signature matches
//! each degradation factor so the health metric can be validated against
//! task completion time.
//!
//! All randomness comes from one seeded generator per trial; identical
//! `(scenario, seed)` produce bit-identical logs and results.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use crate::health::{HealthConfig, HealthSample};
use crate::math;
use crate::pipeline::{PipelineError, StreamEngine};
use crate::rng::SplitMix64;
use crate::telemetry::{
    LaserScan, Pose2D, RobotParams, TelemetryError, TelemetryFrame, TelemetryLog,
};
use crate::vitals::{distance_to_goal, VitalConfig};

/// Trial completes when the true pose is within this range of the goal.
pub const GOAL_TOLERANCE_M: f64 = 0.3;
/// A stall of this many consecutive seconds triggers one goal reset.
pub const STALL_RESET_S: u32 = 10;
/// A stall of this many consecutive seconds after the reset terminates the
/// trial.
pub const STALL_TERMINATION_S: u32 = 30;
/// Marginal standard deviation of the fused-pose estimation jitter.
pub const FUSED_JITTER_STD_M: f64 = 0.005;
/// Tick-to-tick correlation of the jitter: fusion errors drift, they do
/// not resample independently every second.
const JITTER_PHI: f64 = 0.9;
/// Synthetic sweep geometry.
pub const SCAN_BEAMS: usize = 360;
pub const SCAN_RANGE_M: f64 = 5.0;
pub const SCAN_RANGE_MAX_M: f64 = 30.0;
/// Scan noise standard deviation is this base times the burst's noise
/// scale, so a scale near 3.5 reaches the harmful part of the noise band.
pub const NOISE_STD_BASE_M: f64 = 0.2;
/// Heading slew limit, rad/s.
pub const HEADING_RATE_LIMIT: f64 = 1.0;
/// Degradation levels understood by [`build_level`].
pub const NUM_LEVELS: u32 = 8;

/// Standard normal deviate from two uniforms via the Box-Muller transform.
///
/// `u1` must lie in `(0, 1]` (the log blows up at zero) and `u2` in
/// `[0, 1)`.
pub fn box_muller(u1: f64, u2: f64) -> Result<f64, SimError> {
    if !(u1 > 0.0 && u1 <= 1.0) {
        return Err(SimError::BadUniform("u1 must be in (0, 1]"));
    }
    if !(0.0..1.0).contains(&u2) {
        return Err(SimError::BadUniform("u2 must be in [0, 1)"));
    }
    Ok(math::sqrt(-2.0 * math::ln(u1)) * math::cos(TAU * u2))
}

/// One telemetry perturbation active during `[t_start, t_start + duration)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Injector {
    pub kind: InjectorKind,
    pub t_start: f64,
    pub duration: f64,
    /// Kind-specific scalar: noise scale, speed factor, drift rate in m/s,
    /// or jerk amplitude in m/s^2.
    pub intensity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectorKind {
    /// Additive white Gaussian scan noise of std `base * intensity`.
    NoiseBurst,
    /// Robot cannot move; wheels are blocked too, so odometry agrees.
    StuckEpisode,
    /// Wheels spin at `intensity` m/s while the robot holds still, so raw
    /// odometry drifts away from the fused estimate.
    SlipEpisode,
    /// Vertical acceleration offset of `intensity` while active.
    JerkPulse,
    /// Commanded speed is multiplied by `intensity`.
    HighFrictionZone,
}

impl InjectorKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NoiseBurst => "noise_burst",
            Self::StuckEpisode => "stuck",
            Self::SlipEpisode => "slip",
            Self::JerkPulse => "jerk_pulse",
            Self::HighFrictionZone => "high_friction",
        }
    }
}

impl Injector {
    pub fn active_at(&self, t: f64) -> bool {
        t >= self.t_start && t < self.t_start + self.duration
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.duration.is_nan() || self.duration <= 0.0 {
            return Err(SimError::InvalidScenario("injector duration must be > 0"));
        }
        if !self.intensity.is_finite() || self.intensity < 0.0 {
            return Err(SimError::InvalidScenario("injector intensity must be >= 0"));
        }
        if !self.t_start.is_finite() || self.t_start < 0.0 {
            return Err(SimError::InvalidScenario("injector t_start must be >= 0"));
        }
        Ok(())
    }
}

/// Declarative description of one simulated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub start: Pose2D,
    pub goal: Pose2D,
    pub params: RobotParams,
    pub seed: u64,
    pub max_duration: f64,
    pub injectors: Vec<Injector>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.params.validate().map_err(SimError::Telemetry)?;
        if self.start.x == self.goal.x && self.start.y == self.goal.y {
            return Err(SimError::InvalidScenario("start must differ from goal"));
        }
        if self.max_duration.is_nan() || self.max_duration <= 0.0 {
            return Err(SimError::InvalidScenario("max_duration must be > 0"));
        }
        for inj in &self.injectors {
            inj.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// `step` called past `max_duration`.
    TrialExhausted,
    InvalidScenario(&'static str),
    UnknownLevel(u32),
    BadUniform(&'static str),
    Telemetry(TelemetryError),
    Pipeline(PipelineError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TrialExhausted => write!(f, "trial exhausted: t reached max_duration"),
            Self::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
            Self::UnknownLevel(l) => write!(f, "unknown degradation level {l}"),
            Self::BadUniform(msg) => write!(f, "{msg}"),
            Self::Telemetry(e) => write!(f, "{e}"),
            Self::Pipeline(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SimError {}

impl From<PipelineError> for SimError {
    fn from(e: PipelineError) -> Self {
        Self::Pipeline(e)
    }
}

impl From<TelemetryError> for SimError {
    fn from(e: TelemetryError) -> Self {
        Self::Telemetry(e)
    }
}

/// Simulator state for one trial.
#[derive(Debug, Clone)]
pub struct SimState {
    pub true_pose: Pose2D,
    pub fused_pose: Pose2D,
    pub raw_odom_pose: Pose2D,
    pub accel_z: f64,
    /// Whole seconds since trial start.
    pub t: u64,
    pub goal_resets: u32,
    /// Consecutive seconds of trivial true speed.
    pub stall_clock: u32,
    rng: SplitMix64,
    jitter: (f64, f64),
    reset_armed: bool,
}

impl SimState {
    /// Initialises a trial and emits the frame observed at t = 0.
    pub fn new(scenario: &ScenarioConfig) -> Result<(Self, TelemetryFrame), SimError> {
        scenario.validate()?;
        let mut rng = SplitMix64::new(scenario.seed);
        let jx = FUSED_JITTER_STD_M * gauss(&mut rng)?;
        let jy = FUSED_JITTER_STD_M * gauss(&mut rng)?;
        let mut state = Self {
            true_pose: scenario.start,
            fused_pose: scenario.start,
            raw_odom_pose: scenario.start,
            accel_z: 0.0,
            t: 0,
            goal_resets: 0,
            stall_clock: 0,
            rng,
            jitter: (jx, jy),
            reset_armed: true,
        };
        state.fused_pose = offset(scenario.start, state.jitter);
        state.accel_z = jerk_offset(scenario, 0.0);
        let frame = state.observe(scenario)?;
        Ok((state, frame))
    }

    /// Advances one second of simulated time and emits the new frame.
    pub fn step(&mut self, scenario: &ScenarioConfig) -> Result<TelemetryFrame, SimError> {
        if (self.t as f64) >= scenario.max_duration {
            return Err(SimError::TrialExhausted);
        }
        let depart = self.t as f64;

        // heading slews toward the goal at a limited rate
        let desired = math::atan2(
            scenario.goal.y - self.true_pose.y,
            scenario.goal.x - self.true_pose.x,
        );
        let turn = math::normalize_angle(desired - self.true_pose.heading)
            .clamp(-HEADING_RATE_LIMIT, HEADING_RATE_LIMIT);
        let heading = math::normalize_angle(self.true_pose.heading + turn);

        // commanded speed after terrain effects
        let mut commanded = scenario.params.v_nominal;
        let mut stuck = false;
        let mut slip_rate = None;
        for inj in scenario.injectors.iter().filter(|i| i.active_at(depart)) {
            match inj.kind {
                InjectorKind::HighFrictionZone => commanded *= inj.intensity,
                InjectorKind::StuckEpisode => stuck = true,
                InjectorKind::SlipEpisode => slip_rate = Some(inj.intensity),
                _ => {}
            }
        }
        let remaining = distance_to_goal(&self.true_pose, &scenario.goal);
        let commanded = commanded.min(remaining);

        // true motion, and what the wheel encoders think happened
        let (true_move, odom_move) = if stuck {
            (0.0, 0.0)
        } else if let Some(rate) = slip_rate {
            (0.0, rate)
        } else {
            (commanded, commanded)
        };
        self.true_pose = advance(self.true_pose, heading, true_move);
        self.raw_odom_pose = advance(self.raw_odom_pose, heading, odom_move);

        // correlated estimation jitter on the fused pose
        let innovation = FUSED_JITTER_STD_M * math::sqrt(1.0 - JITTER_PHI * JITTER_PHI);
        self.jitter.0 = JITTER_PHI * self.jitter.0 + innovation * gauss(&mut self.rng)?;
        self.jitter.1 = JITTER_PHI * self.jitter.1 + innovation * gauss(&mut self.rng)?;
        self.fused_pose = offset(self.true_pose, self.jitter);

        self.t += 1;
        let arrive = self.t as f64;
        self.accel_z = jerk_offset(scenario, arrive);

        // stall bookkeeping: one goal reset per stall episode, then the
        // trial is allowed STALL_TERMINATION_S more seconds
        if true_move < scenario.params.v_trivial {
            self.stall_clock += 1;
            if self.stall_clock >= STALL_RESET_S && self.reset_armed {
                self.goal_resets += 1;
                self.reset_armed = false;
                self.stall_clock = 0;
            }
        } else {
            self.stall_clock = 0;
            self.reset_armed = true;
        }

        self.observe(scenario)
    }

    /// Builds the telemetry frame for the current instant.
    fn observe(&mut self, scenario: &ScenarioConfig) -> Result<TelemetryFrame, SimError> {
        let t = self.t as f64;
        let noise_std: f64 = scenario
            .injectors
            .iter()
            .filter(|i| i.kind == InjectorKind::NoiseBurst && i.active_at(t))
            .map(|i| NOISE_STD_BASE_M * i.intensity)
            .sum();
        let mut ranges = vec![SCAN_RANGE_M; SCAN_BEAMS];
        if noise_std > 0.0 {
            for r in &mut ranges {
                *r += noise_std * gauss(&mut self.rng)?;
            }
        }
        Ok(TelemetryFrame {
            t,
            fused_pose: self.fused_pose,
            raw_odom_pose: self.raw_odom_pose,
            accel_z: Some(self.accel_z),
            scan: LaserScan::new(ranges, SCAN_RANGE_MAX_M)?,
            goal: scenario.goal,
        })
    }
}

fn gauss(rng: &mut SplitMix64) -> Result<f64, SimError> {
    let u1 = rng.uniform_open_low();
    let u2 = rng.uniform();
    box_muller(u1, u2)
}

fn advance(pose: Pose2D, heading: f64, dist: f64) -> Pose2D {
    Pose2D {
        x: pose.x + dist * math::cos(heading),
        y: pose.y + dist * math::sin(heading),
        heading,
    }
}

fn offset(pose: Pose2D, jitter: (f64, f64)) -> Pose2D {
    Pose2D {
        x: pose.x + jitter.0,
        y: pose.y + jitter.1,
        heading: pose.heading,
    }
}

fn jerk_offset(scenario: &ScenarioConfig, t: f64) -> f64 {
    scenario
        .injectors
        .iter()
        .filter(|i| i.kind == InjectorKind::JerkPulse && i.active_at(t))
        .map(|i| i.intensity)
        .fold(0.0, |acc, a| acc + a)
}

/// Outcome of one simulated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    /// True when the robot reached the goal tolerance.
    pub completed: bool,
    /// Seconds until completion or termination.
    pub t_comp: f64,
    pub avg_health: f64,
    pub health_series: Vec<HealthSample>,
    pub log: TelemetryLog,
}

/// Runs one trial to completion or termination, computing vitals and
/// health online over the emitted frames.
///
/// Termination protocol: a stall (true speed continuously below
/// `v_trivial`) first triggers a goal reset after [`STALL_RESET_S`]; if the
/// robot then stays stalled for [`STALL_TERMINATION_S`] more, the trial
/// ends unsuccessfully. `max_duration` is the hard cap.
pub fn run_trial(
    scenario: &ScenarioConfig,
    vital_cfg: &VitalConfig,
    health_cfg: &HealthConfig,
) -> Result<TrialResult, SimError> {
    let (mut state, first) = SimState::new(scenario)?;
    let mut engine = StreamEngine::new(scenario.params, *vital_cfg, *health_cfg)?;
    let mut frames = Vec::new();
    let mut health_series = Vec::new();

    for update in engine.push_frame(first.clone())? {
        health_series.push(update.sample);
    }
    frames.push(first);

    let completed = loop {
        if distance_to_goal(&state.true_pose, &scenario.goal) <= GOAL_TOLERANCE_M {
            break true;
        }
        if state.stall_clock >= STALL_TERMINATION_S {
            break false;
        }
        if (state.t as f64) >= scenario.max_duration {
            break false;
        }
        let frame = state.step(scenario)?;
        for update in engine.push_frame(frame.clone())? {
            health_series.push(update.sample);
        }
        frames.push(frame);
    };

    let avg_health =
        crate::health::average_health(&health_series).map_err(PipelineError::Health)?;
    let log = TelemetryLog::new(frames, scenario.params)?;
    Ok(TrialResult {
        completed,
        t_comp: state.t as f64,
        avg_health,
        health_series,
        log,
    })
}

/// Noise scale and rough-terrain patch count per degradation level. Levels
/// combine {none, low, high} laser noise with a rising density of short
/// stuck-plus-jerk patches standing in for 0-40% uneven terrain coverage,
/// ordered by the combined load they put on the run.
const LEVELS: [(f64, usize); NUM_LEVELS as usize] = [
    (0.0, 0),
    (2.0, 0),
    (2.0, 2),
    (4.0, 0),
    (2.0, 4),
    (4.0, 2),
    (4.0, 4),
    (4.0, 8),
];

const LEVEL_NOISE_START_S: f64 = 7.0;
const LEVEL_NOISE_DURATION_S: f64 = 7.0;
const PATCH_STUCK_S: f64 = 2.0;
// patches must start before the clean completion time so every one of
// them actually perturbs the run
const PATCH_WINDOW: (f64, f64) = (5.0, 39.0);

/// Builds the deterministic scenario for one degradation level.
///
/// The seed drives both the trial's sensor randomness and the placement of
/// terrain patches, so two builds with the same level and seed are
/// identical and different seeds vary the patch layout.
pub fn build_level(level: u32, seed: u64) -> Result<ScenarioConfig, SimError> {
    if level >= NUM_LEVELS {
        return Err(SimError::UnknownLevel(level));
    }
    let (noise_scale, patches) = LEVELS[level as usize];
    let mut injectors = Vec::new();
    let mut occupied: Vec<(f64, f64)> = Vec::new();
    let mut placer = SplitMix64::new(seed ^ (level as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));

    if noise_scale > 0.0 {
        injectors.push(Injector {
            kind: InjectorKind::NoiseBurst,
            t_start: LEVEL_NOISE_START_S,
            duration: LEVEL_NOISE_DURATION_S,
            intensity: noise_scale,
        });
        // heavy noise degrades navigation: model the induced halt as a
        // short stuck episode inside the burst
        let stall = if noise_scale >= 3.5 { 5.0 } else { 1.0 };
        let at = LEVEL_NOISE_START_S + 2.0 + math::floor(placer.uniform() * 3.0);
        injectors.push(Injector {
            kind: InjectorKind::StuckEpisode,
            t_start: at,
            duration: stall,
            intensity: 0.0,
        });
        occupied.push((at, at + stall));
    }

    for _ in 0..patches {
        let at = place(
            &mut placer,
            PATCH_STUCK_S + 1.0,
            PATCH_WINDOW,
            &mut occupied,
        );
        injectors.push(Injector {
            kind: InjectorKind::StuckEpisode,
            t_start: at,
            duration: PATCH_STUCK_S,
            intensity: 0.0,
        });
        injectors.push(Injector {
            kind: InjectorKind::JerkPulse,
            t_start: at,
            duration: 1.0,
            intensity: 0.6 + 0.6 * placer.uniform(),
        });
    }

    Ok(ScenarioConfig {
        start: Pose2D::new(0.0, 0.0, 0.0).expect("finite"),
        goal: Pose2D::new(20.0, 0.0, 0.0).expect("finite"),
        params: RobotParams::default(),
        seed,
        max_duration: 240.0,
        injectors,
    })
}

/// Picks an integer start time in `window` whose `[at, at + span)` does not
/// intersect any occupied interval. Falls back to a linear scan if
/// rejection sampling runs out of attempts, so placement always succeeds
/// deterministically.
fn place(
    rng: &mut SplitMix64,
    span: f64,
    window: (f64, f64),
    occupied: &mut Vec<(f64, f64)>,
) -> f64 {
    let slots = (window.1 - window.0 - span) as u64 + 1;
    let free =
        |at: f64, occupied: &[(f64, f64)]| occupied.iter().all(|&(s, e)| at + span <= s || at >= e);
    for _ in 0..200 {
        let at = window.0 + (rng.next_u64() % slots) as f64;
        if free(at, occupied) {
            occupied.push((at, at + span));
            return at;
        }
    }
    let mut at = window.0;
    while !free(at, occupied) && at <= window.1 - span {
        at += 1.0;
    }
    occupied.push((at, at + span));
    at
}
