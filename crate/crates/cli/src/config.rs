//! Dotted-key config overrides (`--set key=value`) so every vital and
//! health constant can be tuned per platform without code edits.

use vitals_core::health::HealthConfig;
use vitals_core::telemetry::RobotParams;
use vitals_core::vitals::VitalConfig;

use crate::error::CliError;

/// The tunable engine configuration for one invocation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EngineConfig {
    pub vitals: VitalConfig,
    pub health: HealthConfig,
    pub params: RobotParams,
}

pub const KNOWN_KEYS: &[&str] = &[
    "goal.a",
    "goal.b",
    "goal.window",
    "goal.similarity_threshold",
    "jerk.sigma1",
    "jerk.sigma2",
    "jerk.topple_threshold",
    "loc.k",
    "loc.saturation",
    "loc.epsilon",
    "vel.a",
    "vel.b",
    "noise.a",
    "noise.b",
    "health.window",
    "health.alert_threshold",
    "health.alert_min_duration",
    "params.v_nominal",
    "params.v_max",
    "params.v_trivial",
    "params.sample_rate",
];

impl EngineConfig {
    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("--set {key}: `{value}` is not a number")))
        };
        let uint = || {
            value
                .parse::<u64>()
                .map_err(|_| CliError::Input(format!("--set {key}: `{value}` is not an integer")))
        };
        match key {
            "goal.a" => self.vitals.goal.a = float()?,
            "goal.b" => self.vitals.goal.b = float()?,
            "goal.window" => self.vitals.goal.window = uint()? as usize,
            "goal.similarity_threshold" => self.vitals.goal.similarity_threshold = float()?,
            "jerk.sigma1" => self.vitals.jerk.sigma1 = float()?,
            "jerk.sigma2" => self.vitals.jerk.sigma2 = float()?,
            "jerk.topple_threshold" => self.vitals.jerk.topple_threshold = float()?,
            "loc.k" => self.vitals.loc.k = float()?,
            "loc.saturation" => self.vitals.loc.saturation_s = float()?,
            "loc.epsilon" => self.vitals.loc.epsilon = float()?,
            "vel.a" => self.vitals.vel.a = float()?,
            "vel.b" => self.vitals.vel.b = float()?,
            "noise.a" => self.vitals.noise.a = float()?,
            "noise.b" => self.vitals.noise.b = float()?,
            "health.window" => self.health.window = uint()? as usize,
            "health.alert_threshold" => self.health.alert_threshold = float()?,
            "health.alert_min_duration" => self.health.alert_min_duration = uint()? as u32,
            "params.v_nominal" => self.params.v_nominal = float()?,
            "params.v_max" => self.params.v_max = float()?,
            "params.v_trivial" => self.params.v_trivial = float()?,
            "params.sample_rate" => self.params.sample_rate = float()?,
            _ => {
                return Err(CliError::Input(format!(
                    "--set {key}: unknown config key (known keys: {})",
                    KNOWN_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies every `key=value` pair from repeated `--set` flags, then an
    /// optional `--threshold` shorthand for `health.alert_threshold`.
    pub fn apply(&mut self, sets: &[String], threshold: Option<f64>) -> Result<(), CliError> {
        for pair in sets {
            let Some((key, value)) = pair.split_once('=') else {
                return Err(CliError::Input(format!(
                    "--set expects key=value, got `{pair}`"
                )));
            };
            self.set(key.trim(), value.trim())?;
        }
        if let Some(t) = threshold {
            self.health.alert_threshold = t;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.vitals.validate().map_err(CliError::input)?;
        self.health.validate().map_err(CliError::input)?;
        self.params.validate().map_err(CliError::input)?;
        Ok(())
    }
}
