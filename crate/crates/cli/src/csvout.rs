//! CSV and report writers. Floats go through `Display`, which prints the
//! shortest round-trippable form, so repeated runs produce identical bytes.

use std::io::Write;

use vitals_core::analysis::{CorrelationResult, TrialSummary};
use vitals_core::health::{AlertEvent, HealthSample};
use vitals_core::sim::TrialResult;
use vitals_core::vitals::VitalReading;

pub fn write_vitals_csv(mut w: impl Write, ticks: &[[VitalReading; 5]]) -> std::io::Result<()> {
    writeln!(w, "t,vital_id,raw,p_suffering,available")?;
    for tick in ticks {
        for r in tick {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.t,
                r.id.name(),
                r.raw,
                r.p_suffering,
                r.available
            )?;
        }
    }
    Ok(())
}

pub fn write_health_csv(mut w: impl Write, series: &[HealthSample]) -> std::io::Result<()> {
    writeln!(w, "t,p_total,health,n_vitals")?;
    for s in series {
        writeln!(w, "{},{},{},{}", s.t, s.p_total, s.health, s.n_vitals)?;
    }
    Ok(())
}

pub fn write_alerts_csv(mut w: impl Write, alerts: &[AlertEvent]) -> std::io::Result<()> {
    writeln!(w, "t_start,t_end,min_health")?;
    for a in alerts {
        writeln!(w, "{},{},{}", a.t_start, a.t_end, a.min_health)?;
    }
    Ok(())
}

pub fn write_trial_csv(mut w: impl Write, trial: &TrialResult) -> std::io::Result<()> {
    writeln!(w, "completed,t_comp,avg_health")?;
    writeln!(
        w,
        "{},{},{}",
        trial.completed, trial.t_comp, trial.avg_health
    )
}

pub fn write_summary_csv(mut w: impl Write, summaries: &[TrialSummary]) -> std::io::Result<()> {
    writeln!(w, "level,seed,completed,t_comp,avg_health")?;
    for s in summaries {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.level, s.seed, s.completed, s.t_comp, s.avg_health
        )?;
    }
    Ok(())
}

/// Plain-text correlation report: rho, p-value, n, and per-level failure
/// counts.
pub fn write_correlation_report(
    mut w: impl Write,
    summaries: &[TrialSummary],
    corr: &CorrelationResult,
    permutations: u32,
) -> std::io::Result<()> {
    let completed = summaries.iter().filter(|s| s.completed).count();
    writeln!(w, "trials: {}", summaries.len())?;
    writeln!(w, "completed: {completed}")?;
    writeln!(w, "failed: {}", summaries.len() - completed)?;
    writeln!(w, "spearman rho (avg_health vs t_comp): {}", corr.rho)?;
    writeln!(
        w,
        "permutation p-value ({} permutations, two-sided): {}",
        permutations, corr.p_value
    )?;
    writeln!(w, "n (completed trials): {}", corr.n)?;
    writeln!(w, "failures per level:")?;
    let mut levels: Vec<u32> = summaries.iter().map(|s| s.level).collect();
    levels.dedup();
    for level in levels {
        let total = summaries.iter().filter(|s| s.level == level).count();
        let failed = summaries
            .iter()
            .filter(|s| s.level == level && !s.completed)
            .count();
        writeln!(w, "  level {level}: {failed}/{total}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use vitals_core::vitals::VitalId;

    #[test]
    fn vitals_csv_shape() {
        let tick = [VitalReading {
            id: VitalId::Velocity,
            t: 3.0,
            raw: 2.0,
            p_suffering: 0.25,
            available: true,
        }; 5];
        let mut buf = Vec::new();
        write_vitals_csv(&mut buf, &[tick]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,vital_id,raw,p_suffering,available"));
        assert_eq!(lines.next(), Some("3,velocity,2,0.25,true"));
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn summary_csv_shape() {
        let s = TrialSummary {
            level: 2,
            seed: 1001,
            completed: true,
            t_comp: 45.0,
            avg_health: -0.317,
        };
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &[s]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "level,seed,completed,t_comp,avg_health\n2,1001,true,45,-0.317\n"
        );
    }
}
