//! Flat key-value scenario files.
//!
//! ```text
//! # one trial description
//! start.x = 0.0
//! start.y = 0.0
//! goal.x = 20.0
//! goal.y = 0.0
//! seed = 7
//! max_duration = 240
//! params.v_nominal = 0.5
//! injector.0.kind = noise_burst
//! injector.0.t_start = 7
//! injector.0.duration = 7
//! injector.0.intensity = 4.0
//! ```
//!
//! `start.*` and `goal.*` positions are required; everything else has
//! defaults. Injectors are grouped by index; `kind` is one of
//! `noise_burst`, `stuck`, `slip`, `jerk_pulse`, `high_friction`.

use std::collections::BTreeMap;

use vitals_core::sim::{Injector, InjectorKind, ScenarioConfig};
use vitals_core::telemetry::{Pose2D, RobotParams};

use crate::error::FormatError;

const DEFAULT_MAX_DURATION_S: f64 = 300.0;

#[derive(Default)]
struct InjectorDraft {
    kind: Option<InjectorKind>,
    t_start: Option<f64>,
    duration: Option<f64>,
    intensity: Option<f64>,
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, FormatError> {
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            FormatError::line(idx + 1, format!("expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim().to_string();
        if fields
            .insert(key.clone(), value.trim().to_string())
            .is_some()
        {
            return Err(FormatError::key(key, "duplicate key"));
        }
    }

    let mut start = (None, None, 0.0);
    let mut goal = (None, None, 0.0);
    let mut params = RobotParams::default();
    let mut seed = 0u64;
    let mut max_duration = DEFAULT_MAX_DURATION_S;
    let mut drafts: BTreeMap<u32, InjectorDraft> = BTreeMap::new();

    for (key, value) in &fields {
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| FormatError::key(key, format!("`{value}` is not a number")))
        };
        match key.as_str() {
            "start.x" => start.0 = Some(float()?),
            "start.y" => start.1 = Some(float()?),
            "start.heading" => start.2 = float()?,
            "goal.x" => goal.0 = Some(float()?),
            "goal.y" => goal.1 = Some(float()?),
            "goal.heading" => goal.2 = float()?,
            "seed" => {
                seed = value.parse::<u64>().map_err(|_| {
                    FormatError::key(key, format!("`{value}` is not an integer seed"))
                })?
            }
            "max_duration" => max_duration = float()?,
            "params.v_nominal" => params.v_nominal = float()?,
            "params.v_max" => params.v_max = float()?,
            "params.v_trivial" => params.v_trivial = float()?,
            "params.sample_rate" => params.sample_rate = float()?,
            _ => {
                let Some(rest) = key.strip_prefix("injector.") else {
                    return Err(FormatError::key(key, "unknown key"));
                };
                let Some((index, field)) = rest.split_once('.') else {
                    return Err(FormatError::key(key, "expected injector.<n>.<field>"));
                };
                let index: u32 = index
                    .parse()
                    .map_err(|_| FormatError::key(key, "injector index must be an integer"))?;
                let draft = drafts.entry(index).or_default();
                match field {
                    "kind" => draft.kind = Some(parse_kind(key, value)?),
                    "t_start" => draft.t_start = Some(float()?),
                    "duration" => draft.duration = Some(float()?),
                    "intensity" => draft.intensity = Some(float()?),
                    _ => return Err(FormatError::key(key, "unknown injector field")),
                }
            }
        }
    }

    let (Some(sx), Some(sy), sh) = start else {
        return Err(FormatError::key("start.x", "missing required key"));
    };
    let (Some(gx), Some(gy), gh) = goal else {
        return Err(FormatError::key("goal.x", "missing required key"));
    };
    let start = Pose2D::new(sx, sy, sh).map_err(|e| FormatError::key("start.x", e.to_string()))?;
    let goal = Pose2D::new(gx, gy, gh).map_err(|e| FormatError::key("goal.x", e.to_string()))?;

    let mut injectors = Vec::new();
    for (index, draft) in drafts {
        let need = |opt: Option<f64>, field: &str| {
            opt.ok_or_else(|| FormatError::key(format!("injector.{index}.{field}"), "missing"))
        };
        injectors.push(Injector {
            kind: draft
                .kind
                .ok_or_else(|| FormatError::key(format!("injector.{index}.kind"), "missing"))?,
            t_start: need(draft.t_start, "t_start")?,
            duration: need(draft.duration, "duration")?,
            intensity: draft.intensity.unwrap_or(0.0),
        });
    }

    let scenario = ScenarioConfig {
        start,
        goal,
        params,
        seed,
        max_duration,
        injectors,
    };
    scenario
        .validate()
        .map_err(|e| FormatError::key("scenario", e.to_string()))?;
    Ok(scenario)
}

fn parse_kind(key: &str, value: &str) -> Result<InjectorKind, FormatError> {
    match value {
        "noise_burst" => Ok(InjectorKind::NoiseBurst),
        "stuck" => Ok(InjectorKind::StuckEpisode),
        "slip" => Ok(InjectorKind::SlipEpisode),
        "jerk_pulse" => Ok(InjectorKind::JerkPulse),
        "high_friction" => Ok(InjectorKind::HighFrictionZone),
        other => Err(FormatError::key(
            key,
            format!("unknown kind `{other}` (noise_burst|stuck|slip|jerk_pulse|high_friction)"),
        )),
    }
}

/// Renders a scenario back to the key-value format (used to ship example
/// scenario files and by tests).
pub fn write_scenario(scenario: &ScenarioConfig) -> String {
    let mut out = String::new();
    let mut push = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    push("start.x", scenario.start.x.to_string());
    push("start.y", scenario.start.y.to_string());
    push("start.heading", scenario.start.heading.to_string());
    push("goal.x", scenario.goal.x.to_string());
    push("goal.y", scenario.goal.y.to_string());
    push("goal.heading", scenario.goal.heading.to_string());
    push("seed", scenario.seed.to_string());
    push("max_duration", scenario.max_duration.to_string());
    push("params.v_nominal", scenario.params.v_nominal.to_string());
    push("params.v_max", scenario.params.v_max.to_string());
    push("params.v_trivial", scenario.params.v_trivial.to_string());
    push(
        "params.sample_rate",
        scenario.params.sample_rate.to_string(),
    );
    for (i, inj) in scenario.injectors.iter().enumerate() {
        push(&format!("injector.{i}.kind"), inj.kind.name().to_string());
        push(&format!("injector.{i}.t_start"), inj.t_start.to_string());
        push(&format!("injector.{i}.duration"), inj.duration.to_string());
        push(
            &format!("injector.{i}.intensity"),
            inj.intensity.to_string(),
        );
    }
    out
}
