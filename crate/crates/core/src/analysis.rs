//! Experiment matrix runner and the rank statistics relating average
//! health to task completion time.

use alloc::vec::Vec;
use core::fmt;

use crate::health::HealthConfig;
use crate::rng::SplitMix64;
use crate::sim::{build_level, run_trial, SimError};
use crate::telemetry::RobotParams;
use crate::vitals::VitalConfig;

/// Permutations used by [`spearman`]'s significance test.
pub const DEFAULT_PERMUTATIONS: u32 = 10_000;
/// Fixed shuffle seed so repeated analyses agree byte for byte.
pub const DEFAULT_PERMUTATION_SEED: u64 = 0x5EA5_0000_0001;

/// One trial's outcome for the experiment matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub level: u32,
    pub seed: u64,
    pub completed: bool,
    pub t_comp: f64,
    pub avg_health: f64,
}

/// Spearman rank correlation with a permutation significance estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub rho: f64,
    /// Two-sided permutation p-value, `(count + 1) / (permutations + 1)`.
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    LengthMismatch {
        xs: usize,
        ys: usize,
    },
    TooFewSamples {
        n: usize,
    },
    /// All ranks identical on one side; the correlation is undefined.
    ZeroRankVariance,
    /// Fewer than three completed trials to correlate.
    InsufficientData {
        completed: usize,
    },
    Sim(SimError),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LengthMismatch { xs, ys } => {
                write!(f, "length mismatch: {xs} vs {ys}")
            }
            Self::TooFewSamples { n } => write!(f, "need at least 3 samples, got {n}"),
            Self::ZeroRankVariance => write!(f, "zero rank variance"),
            Self::InsufficientData { completed } => {
                write!(
                    f,
                    "insufficient data: {completed} completed trials, need >= 3"
                )
            }
            Self::Sim(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for AnalysisError {}

impl From<SimError> for AnalysisError {
    fn from(e: SimError) -> Self {
        Self::Sim(e)
    }
}

/// Fractional ranks (1-based) with ties sharing their average rank.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // indices i..=j tie: average of ranks i+1 ..= j+1
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, AnalysisError> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        let dx = x - mx;
        let dy = y - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(AnalysisError::ZeroRankVariance);
    }
    Ok(cov / crate::math::sqrt(vx * vy))
}

/// Spearman rank correlation with [`DEFAULT_PERMUTATIONS`] permutations and
/// the fixed default seed.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult, AnalysisError> {
    spearman_seeded(xs, ys, DEFAULT_PERMUTATIONS, DEFAULT_PERMUTATION_SEED)
}

/// Spearman rank correlation: Pearson correlation of fractional ranks,
/// with a two-sided seeded permutation test for significance.
pub fn spearman_seeded(
    xs: &[f64],
    ys: &[f64],
    permutations: u32,
    seed: u64,
) -> Result<CorrelationResult, AnalysisError> {
    if xs.len() != ys.len() {
        return Err(AnalysisError::LengthMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(AnalysisError::TooFewSamples { n: xs.len() });
    }
    let rx = fractional_ranks(xs);
    let ry = fractional_ranks(ys);
    let rho = pearson(&rx, &ry)?;

    let mut rng = SplitMix64::new(seed);
    let mut shuffled = ry.clone();
    let mut at_least_as_extreme = 0u32;
    for _ in 0..permutations {
        rng.shuffle(&mut shuffled);
        let r = pearson(&rx, &shuffled)?;
        if crate::math::abs(r) >= crate::math::abs(rho) {
            at_least_as_extreme += 1;
        }
    }
    Ok(CorrelationResult {
        rho,
        p_value: (at_least_as_extreme + 1) as f64 / (permutations + 1) as f64,
        n: xs.len(),
    })
}

/// Runs the full experiment matrix: every level, `trials_per_level` seeded
/// trials each, seeds `base_seed..base_seed + trials_per_level` shared
/// across levels. Summaries are in (level, seed) order.
pub fn run_matrix(
    levels: &[u32],
    trials_per_level: u32,
    base_seed: u64,
    params: &RobotParams,
    vital_cfg: &VitalConfig,
    health_cfg: &HealthConfig,
) -> Result<Vec<TrialSummary>, AnalysisError> {
    let mut out = Vec::with_capacity(levels.len() * trials_per_level as usize);
    for &level in levels {
        for i in 0..trials_per_level {
            let seed = base_seed + i as u64;
            let mut scenario = build_level(level, seed)?;
            scenario.params = *params;
            let trial = run_trial(&scenario, vital_cfg, health_cfg)?;
            out.push(TrialSummary {
                level,
                seed,
                completed: trial.completed,
                t_comp: trial.t_comp,
                avg_health: trial.avg_health,
            });
        }
    }
    Ok(out)
}

/// Correlates average health with completion time over the completed
/// trials of a matrix.
pub fn correlate_health_tcomp(
    summaries: &[TrialSummary],
) -> Result<CorrelationResult, AnalysisError> {
    let completed: Vec<&TrialSummary> = summaries.iter().filter(|s| s.completed).collect();
    if completed.len() < 3 {
        return Err(AnalysisError::InsufficientData {
            completed: completed.len(),
        });
    }
    let health: Vec<f64> = completed.iter().map(|s| s.avg_health).collect();
    let t_comp: Vec<f64> = completed.iter().map(|s| s.t_comp).collect();
    spearman(&health, &t_comp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(fractional_ranks(&[10.0, 20.0, 30.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(fractional_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        // ties share the average rank
        assert_eq!(
            fractional_ranks(&[1.0, 2.0, 2.0, 3.0]),
            vec![1.0, 2.5, 2.5, 4.0]
        );
        assert_eq!(fractional_ranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn spearman_anchors() {
        let r = spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-12);
        let r = spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert!((r.rho + 1.0).abs() < 1e-12);
        // hand check against 1 - 6 * sum(d^2) / (n (n^2 - 1)): d^2 sums to 4
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((r.rho - 0.6).abs() < 1e-12);
    }

    #[test]
    fn spearman_argument_errors() {
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(AnalysisError::LengthMismatch { .. })
        ));
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0, 2.0]),
            Err(AnalysisError::TooFewSamples { n: 2 })
        ));
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(AnalysisError::ZeroRankVariance)
        ));
    }

    #[test]
    fn spearman_rank_invariance_and_symmetry() {
        let xs = [3.0, 9.0, 1.0, 4.0, 7.0, 2.0];
        let ys = [5.0, 2.0, 8.0, 1.0, 9.0, 3.0];
        let base = spearman(&xs, &ys).unwrap();
        // strictly increasing transform preserves ranks
        let squashed: Vec<f64> = xs.iter().map(|x| (x * 0.1).exp()).collect();
        let r = spearman(&squashed, &ys).unwrap();
        assert!((r.rho - base.rho).abs() < 1e-12);
        assert_eq!(r.p_value, base.p_value);
        // symmetric in its arguments
        let sym = spearman(&ys, &xs).unwrap();
        assert!((sym.rho - base.rho).abs() < 1e-12);
    }

    #[test]
    fn permutation_p_is_seeded_and_deterministic() {
        let xs = [1.0, 5.0, 3.0, 4.0, 2.0, 6.0];
        let ys = [2.0, 6.0, 4.0, 3.0, 1.0, 5.0];
        let a = spearman_seeded(&xs, &ys, 2000, 9).unwrap();
        let b = spearman_seeded(&xs, &ys, 2000, 9).unwrap();
        assert_eq!(a, b);
        // perfect monotone data on 12 points: only a re-drawn monotone
        // permutation could tie, so p sits at the test's resolution floor
        let xs: Vec<f64> = (0..12).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let p = spearman_seeded(&xs, &ys, 999, 1).unwrap();
        assert!((p.p_value - 1.0 / 1000.0).abs() < 1e-12, "p {}", p.p_value);
    }

    #[test]
    fn matrix_counts_and_determinism() {
        let vcfg = VitalConfig::default();
        let hcfg = HealthConfig::default();
        let a = run_matrix(&[0, 1], 3, 100, &RobotParams::default(), &vcfg, &hcfg).unwrap();
        assert_eq!(a.len(), 6);
        let b = run_matrix(&[0, 1], 3, 100, &RobotParams::default(), &vcfg, &hcfg).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().filter(|s| s.level == 0).all(|s| s.completed));
    }

    #[test]
    fn correlate_requires_three_completed() {
        let s = |completed, t, h| TrialSummary {
            level: 0,
            seed: 0,
            completed,
            t_comp: t,
            avg_health: h,
        };
        let too_few = vec![
            s(true, 40.0, -0.2),
            s(true, 50.0, -0.5),
            s(false, 45.0, -0.9),
        ];
        assert!(matches!(
            correlate_health_tcomp(&too_few),
            Err(AnalysisError::InsufficientData { completed: 2 })
        ));

        // four hand-built summaries in perfectly inverse order
        let four = vec![
            s(true, 40.0, -0.1),
            s(true, 45.0, -0.4),
            s(true, 50.0, -0.7),
            s(true, 60.0, -1.1),
        ];
        let r = correlate_health_tcomp(&four).unwrap();
        assert!((r.rho + 1.0).abs() < 1e-12);
        assert_eq!(r.n, 4);
    }
}
