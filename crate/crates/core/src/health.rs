//! Robot health: entropy of the total suffering probability over a sliding
//! window, sign-flipped so that zero is perfect health and more negative is
//! worse.
//!
//! Per-vital suffering probabilities are averaged into a total suffering
//! probability per tick (equal weights, so dropping a vital keeps the total
//! a probability). The health over a window of ticks is the sum of
//! `p * ln(p)` terms, which is nonpositive and bounded below by
//! `-window / e`. Sustained mid-range suffering therefore drags health
//! down, while consistently tiny or saturated probabilities do not.

use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::vitals::VitalReading;

/// Health aggregation and alerting constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HealthConfig {
    /// Sliding window length in ticks for the instantaneous health curve.
    pub window: usize,
    /// Health below this raises a degradation alert.
    pub alert_threshold: f64,
    /// Health must stay below threshold this many consecutive ticks before
    /// an alert fires (debounce).
    pub alert_min_duration: u32,
}

impl Default for HealthConfig {
    fn default() -> Self {
        Self {
            window: 5,
            alert_threshold: -1.4,
            alert_min_duration: 3,
        }
    }
}

impl HealthConfig {
    pub fn validate(&self) -> Result<(), HealthError> {
        if self.window < 1 {
            return Err(HealthError::InvalidConfig("window must be >= 1"));
        }
        if self.alert_threshold.is_nan() || self.alert_threshold >= 0.0 {
            return Err(HealthError::InvalidConfig("alert threshold must be < 0"));
        }
        if self.alert_min_duration < 1 {
            return Err(HealthError::InvalidConfig("alert duration must be >= 1"));
        }
        Ok(())
    }
}

/// Health state at one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HealthSample {
    pub t: f64,
    /// Mean suffering probability over the available vitals.
    pub p_total: f64,
    /// Windowed entropy health; always <= 0.
    pub health: f64,
    /// Number of vitals that contributed at this tick.
    pub n_vitals: usize,
}

/// A maximal run of ticks with health below the alert threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlertEvent {
    pub t_start: f64,
    pub t_end: f64,
    pub min_health: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HealthError {
    /// No vital was available at a tick.
    NoVitals,
    /// A probability left `[0, 1]`.
    InvalidProbability(f64),
    EmptyWindow,
    EmptySeries,
    InvalidConfig(&'static str),
}

impl fmt::Display for HealthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoVitals => write!(f, "no vitals available"),
            Self::InvalidProbability(p) => write!(f, "probability {p} outside [0, 1]"),
            Self::EmptyWindow => write!(f, "empty window"),
            Self::EmptySeries => write!(f, "empty series"),
            Self::InvalidConfig(msg) => write!(f, "invalid health config: {msg}"),
        }
    }
}

impl core::error::Error for HealthError {}

/// Mean suffering probability over the available readings at one tick.
/// The equal-weight mean realises a perfect observation model: every
/// available vital counts the same and the result stays a probability.
pub fn total_suffering(readings: &[VitalReading]) -> Result<f64, HealthError> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for r in readings.iter().filter(|r| r.available) {
        if !(0.0..=1.0).contains(&r.p_suffering) {
            return Err(HealthError::InvalidProbability(r.p_suffering));
        }
        sum += r.p_suffering;
        n += 1;
    }
    if n == 0 {
        return Err(HealthError::NoVitals);
    }
    Ok(sum / n as f64)
}

/// One entropy summand `p * ln(p)`, with the limit convention
/// `0 * ln(0) = 0`. Range `[-1/e, 0]`.
pub fn entropy_term(p: f64) -> Result<f64, HealthError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HealthError::InvalidProbability(p));
    }
    if p == 0.0 {
        Ok(0.0)
    } else {
        Ok(p * math::ln(p))
    }
}

/// Health over a window of total-suffering probabilities: the sum of their
/// entropy terms. Nonpositive; zero iff every probability is 0 or 1.
pub fn health_over_window(p_totals: &[f64]) -> Result<f64, HealthError> {
    if p_totals.is_empty() {
        return Err(HealthError::EmptyWindow);
    }
    let mut acc = 0.0;
    for &p in p_totals {
        acc += entropy_term(p)?;
    }
    Ok(acc)
}

/// Instantaneous health curve: at tick `t` the health over the trailing
/// `min(t + 1, window)` probabilities (warm-up truncated).
pub fn instantaneous_health(p_totals: &[f64], cfg: &HealthConfig) -> Result<Vec<f64>, HealthError> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(p_totals.len());
    for i in 0..p_totals.len() {
        let lo = (i + 1).saturating_sub(cfg.window);
        out.push(health_over_window(&p_totals[lo..=i])?);
    }
    Ok(out)
}

/// Arithmetic mean of the health values over a trial.
pub fn average_health(series: &[HealthSample]) -> Result<f64, HealthError> {
    if series.is_empty() {
        return Err(HealthError::EmptySeries);
    }
    Ok(series.iter().map(|s| s.health).sum::<f64>() / series.len() as f64)
}

/// Finds every maximal run of at least `alert_min_duration` consecutive
/// ticks with health below the threshold. Events are disjoint and ordered.
pub fn detect_alerts(series: &[HealthSample], cfg: &HealthConfig) -> Vec<AlertEvent> {
    let mut events = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..=series.len() {
        let below = i < series.len() && series[i].health < cfg.alert_threshold;
        match (run_start, below) {
            (None, true) => run_start = Some(i),
            (Some(start), false) => {
                let len = i - start;
                if len >= cfg.alert_min_duration as usize {
                    let run = &series[start..i];
                    events.push(AlertEvent {
                        t_start: run[0].t,
                        t_end: run[run.len() - 1].t,
                        min_health: run.iter().map(|s| s.health).fold(f64::INFINITY, f64::min),
                    });
                }
                run_start = None;
            }
            _ => {}
        }
    }
    events
}

/// Streaming construction of [`HealthSample`]s from per-tick suffering.
#[derive(Debug, Clone)]
pub struct HealthTracker {
    cfg: HealthConfig,
    window: Vec<f64>,
}

impl HealthTracker {
    pub fn new(cfg: HealthConfig) -> Result<Self, HealthError> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            window: Vec::new(),
        })
    }

    pub fn push(
        &mut self,
        t: f64,
        p_total: f64,
        n_vitals: usize,
    ) -> Result<HealthSample, HealthError> {
        if self.window.len() == self.cfg.window {
            self.window.remove(0);
        }
        self.window.push(p_total);
        Ok(HealthSample {
            t,
            p_total,
            health: health_over_window(&self.window)?,
            n_vitals,
        })
    }
}

/// Streaming alert detection with the same debounce semantics as
/// [`detect_alerts`]: fires once per below-threshold episode, at the tick
/// the minimum duration is reached.
#[derive(Debug, Clone)]
pub struct AlertMonitor {
    cfg: HealthConfig,
    run_len: u32,
    run_start: f64,
    run_min: f64,
    fired: bool,
}

/// Emitted by [`AlertMonitor`] when an episode crosses the debounce length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlertTrigger {
    /// First tick of the below-threshold episode.
    pub t_start: f64,
    /// Tick at which the alert fired (debounce reached).
    pub t_fired: f64,
    /// Lowest health seen in the episode so far.
    pub min_health: f64,
}

impl AlertMonitor {
    pub fn new(cfg: HealthConfig) -> Result<Self, HealthError> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            run_len: 0,
            run_start: 0.0,
            run_min: f64::INFINITY,
            fired: false,
        })
    }

    pub fn push(&mut self, sample: &HealthSample) -> Option<AlertTrigger> {
        if sample.health < self.cfg.alert_threshold {
            if self.run_len == 0 {
                self.run_start = sample.t;
                self.run_min = f64::INFINITY;
            }
            self.run_len += 1;
            self.run_min = self.run_min.min(sample.health);
            if self.run_len == self.cfg.alert_min_duration && !self.fired {
                self.fired = true;
                return Some(AlertTrigger {
                    t_start: self.run_start,
                    t_fired: sample.t,
                    min_health: self.run_min,
                });
            }
        } else {
            self.run_len = 0;
            self.fired = false;
        }
        None
    }
}
