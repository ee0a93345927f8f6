//! Streaming engine for estimating runtime performance degradation of a
//! mobile robot from its telemetry.
//!
//! The pipeline is: resample telemetry to 1 Hz ([`telemetry`]), turn each
//! tick into five vital readings with per-vital suffering probabilities
//! ([`vitals`]), aggregate those into a total suffering probability and a
//! windowed entropy health score ([`health`]), and optionally raise alerts
//! when health stays below a threshold. A bundled kinematic simulator
//! ([`sim`]) produces degradation trials for validating the metric, and
//! [`analysis`] provides the trial matrix runner and Spearman rank
//! statistics used to compare average health against task completion time.
//!
//! The crate is `no_std`-compatible (allocation required). Enable the
//! `libm` feature instead of `std` to build without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("vitals-core requires either the `std` or the `libm` feature");

pub(crate) mod math;

pub mod analysis;
pub mod health;
pub mod pipeline;
pub mod rng;
pub mod sim;
pub mod telemetry;
pub mod vitals;

pub use health::{AlertEvent, HealthConfig, HealthSample};
pub use pipeline::{ProcessedLog, StreamEngine};
pub use sim::{ScenarioConfig, TrialResult};
pub use telemetry::{LaserScan, Pose2D, RobotParams, TelemetryFrame, TelemetryLog};
pub use vitals::{VitalConfig, VitalId, VitalReading};
