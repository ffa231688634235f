//! Aggregate statistics over result rows.

use bass_core::stats::{
    bootstrap_ci_gm, geometric_mean, multiplicative_standard_error, wilcoxon_signed_rank_onesided, wilson_interval,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::rows::{ResultRow, SCHEMA_VERSION};
use crate::seeds::{fnv1a, mix};

/// Fidelities below this are clamped before ratios and logarithms.
pub const FIDELITY_FLOOR: f64 = 1e-16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub arm: String,
    pub trials_ok: usize,
    pub trials_failed: usize,
    pub gm_fidelity: Option<f64>,
    pub fidelity_ci: Option<(f64, f64)>,
    pub gm_gamma2: Option<f64>,
    pub gm_calibrated_r: Option<f64>,
    pub violations: usize,
    pub violation_rate: Option<f64>,
    pub gm_total_s: Option<f64>,
    /// Reverted over attempted rotations, pooled over trials.
    pub revert_rate: Option<f64>,
    pub pr_increases: usize,
}

/// Paired comparison of one arm against the baseline arm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub arm: String,
    pub baseline: String,
    pub pairs: usize,
    /// GM of `F_arm / F_baseline`.
    pub gm_ratio: Option<f64>,
    pub ratio_mult_se: Option<f64>,
    pub ratio_ci: Option<(f64, f64)>,
    pub arm_wins: usize,
    pub baseline_wins: usize,
    pub ties: usize,
    /// Wilson interval of the arm's win fraction over all pairs.
    pub arm_win_ci: Option<(f64, f64)>,
    /// Wilson interval of the baseline's win fraction over all pairs.
    pub baseline_win_ci: Option<(f64, f64)>,
    /// One-sided Wilcoxon p for `F_arm > F_baseline`.
    pub p_arm_greater: Option<f64>,
    /// One-sided Wilcoxon p for `F_baseline > F_arm`.
    pub p_baseline_greater: Option<f64>,
    pub gm_time_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub n_qubits: usize,
    pub k: usize,
    pub gm_pr_z: Option<f64>,
    pub arms: Vec<ArmSummary>,
    pub comparisons: Vec<Comparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment_id: String,
    pub config: ExperimentConfig,
    pub rows: usize,
    pub failed_rows: usize,
    pub points: Vec<PointSummary>,
}

impl Summary {
    pub fn point(&self, n_qubits: usize, k: usize) -> Option<&PointSummary> {
        self.points.iter().find(|p| p.n_qubits == n_qubits && p.k == k)
    }
}

impl PointSummary {
    pub fn comparison(&self, arm: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.arm == arm)
    }

    pub fn arm(&self, arm: &str) -> Option<&ArmSummary> {
        self.arms.iter().find(|a| a.arm == arm)
    }
}

fn floored(f: f64) -> f64 {
    f.max(FIDELITY_FLOOR)
}

fn summarize_arm(config: &ExperimentConfig, rows: &[&ResultRow], arm: &str, salt: u64) -> ArmSummary {
    let mine: Vec<&ResultRow> = rows.iter().copied().filter(|r| r.arm == arm).collect();
    let ok: Vec<&ResultRow> = mine.iter().copied().filter(|r| r.succeeded()).collect();
    let fids: Vec<f64> = ok.iter().filter_map(|r| r.fidelity).map(floored).collect();
    let gm = |v: &[f64]| geometric_mean(v).ok();
    let mut rng = ChaCha8Rng::seed_from_u64(salt);
    let fidelity_ci = bootstrap_ci_gm(
        &fids,
        config.stats.bootstrap_resamples,
        config.stats.confidence_level,
        &mut rng,
    )
    .ok();
    let judged: Vec<bool> = ok.iter().filter_map(|r| r.violation).collect();
    let violations = judged.iter().filter(|&&v| v).count();
    let attempted: usize = ok.iter().map(|r| r.rotations_attempted).sum();
    let reverted: usize = ok.iter().map(|r| r.rotations_reverted).sum();
    ArmSummary {
        arm: arm.to_owned(),
        trials_ok: ok.len(),
        trials_failed: mine.len() - ok.len(),
        gm_fidelity: gm(&fids),
        fidelity_ci,
        gm_gamma2: gm(&ok.iter().map(|r| r.gamma2_tot).collect::<Vec<_>>()),
        gm_calibrated_r: gm(&ok.iter().map(|r| r.calibrated_r).collect::<Vec<_>>()),
        violations,
        violation_rate: (!judged.is_empty()).then(|| violations as f64 / judged.len() as f64),
        gm_total_s: gm(&ok.iter().map(|r| r.total_s).collect::<Vec<_>>()),
        revert_rate: (attempted > 0).then(|| reverted as f64 / attempted as f64),
        pr_increases: ok.iter().map(|r| r.pr_increases).sum(),
    }
}

fn compare(config: &ExperimentConfig, rows: &[&ResultRow], arm: &str, baseline: &str, salt: u64) -> Comparison {
    let find = |name: &str, trial: u64| {
        rows.iter()
            .find(|r| r.arm == name && r.trial == trial && r.succeeded())
            .and_then(|r| r.fidelity.map(|f| (floored(f), r.total_s)))
    };
    let mut trials: Vec<u64> = rows.iter().map(|r| r.trial).collect();
    trials.sort_unstable();
    trials.dedup();
    let pairs: Vec<((f64, f64), (f64, f64))> = trials
        .iter()
        .filter_map(|&t| Some((find(arm, t)?, find(baseline, t)?)))
        .collect();
    let a: Vec<f64> = pairs.iter().map(|p| p.0 .0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1 .0).collect();
    let ratios: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x / y).collect();
    let times: Vec<f64> = pairs.iter().map(|p| p.0 .1 / p.1 .1).collect();
    let arm_wins = a.iter().zip(&b).filter(|(x, y)| x > y).count();
    let baseline_wins = a.iter().zip(&b).filter(|(x, y)| x < y).count();
    let n = pairs.len() as u64;
    let level = config.stats.confidence_level;
    let mut rng = ChaCha8Rng::seed_from_u64(salt);
    Comparison {
        arm: arm.to_owned(),
        baseline: baseline.to_owned(),
        pairs: pairs.len(),
        gm_ratio: geometric_mean(&ratios).ok(),
        ratio_mult_se: multiplicative_standard_error(&ratios).ok(),
        ratio_ci: bootstrap_ci_gm(&ratios, config.stats.bootstrap_resamples, level, &mut rng).ok(),
        arm_wins,
        baseline_wins,
        ties: pairs.len() - arm_wins - baseline_wins,
        arm_win_ci: wilson_interval(arm_wins as u64, n, level).ok(),
        baseline_win_ci: wilson_interval(baseline_wins as u64, n, level).ok(),
        p_arm_greater: wilcoxon_signed_rank_onesided(&a, &b).ok(),
        p_baseline_greater: wilcoxon_signed_rank_onesided(&b, &a).ok(),
        gm_time_ratio: geometric_mean(&times).ok(),
    }
}

/// Pure function of the config and the raw rows; re-running it on parsed JSONL reproduces the summary.
pub fn summarize(config: &ExperimentConfig, rows: &[ResultRow]) -> Summary {
    let mut points = Vec::new();
    for &n in &config.n_qubits {
        for &k in &config.k {
            let here: Vec<&ResultRow> = rows.iter().filter(|r| r.n_qubits == n && r.k == k).collect();
            let point_salt = mix(&[config.seeds.base_seed, fnv1a(b"summary"), n as u64, k as u64]);
            let mut pr_z: Vec<f64> = Vec::new();
            let mut seen = Vec::new();
            for r in &here {
                if let Some(p) = r.pr_z_exact {
                    if !seen.contains(&r.trial) {
                        seen.push(r.trial);
                        pr_z.push(p);
                    }
                }
            }
            let baseline = &config.baseline().name;
            points.push(PointSummary {
                n_qubits: n,
                k,
                gm_pr_z: geometric_mean(&pr_z).ok(),
                arms: config
                    .arms
                    .iter()
                    .enumerate()
                    .map(|(i, a)| summarize_arm(config, &here, &a.name, mix(&[point_salt, i as u64])))
                    .collect(),
                comparisons: config
                    .arms
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, a)| compare(config, &here, &a.name, baseline, mix(&[point_salt, !(i as u64)])))
                    .collect(),
            });
        }
    }
    Summary {
        schema_version: SCHEMA_VERSION,
        experiment_id: config.experiment_id.clone(),
        config: config.clone(),
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| !r.succeeded()).count(),
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rows::sample_row;

    fn config() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{"experiment_id": "s", "family": "Brickwork1D", "n_qubits": [4], "k": [16], "trials": 12}"#,
        )
        .unwrap()
    }

    fn rows(ratio: impl Fn(u64) -> f64) -> Vec<ResultRow> {
        let mut out = Vec::new();
        for t in 0..12u64 {
            let base = 0.01 * (t + 1) as f64;
            for (arm, f) in [("fixed", base), ("adaptive", base * ratio(t))] {
                let mut r = sample_row();
                r.trial = t;
                r.arm = arm.into();
                r.fidelity = Some(f);
                r.violation = Some(t == 0 && arm == "fixed");
                r.rotations_attempted = 4;
                r.rotations_reverted = usize::from(arm == "adaptive");
                out.push(r);
            }
        }
        out
    }

    #[test]
    fn constant_ratio() {
        let s = summarize(&config(), &rows(|_| 4.0));
        let p = s.point(4, 16).unwrap();
        let c = p.comparison("adaptive").unwrap();
        assert_eq!(c.pairs, 12);
        assert!((c.gm_ratio.unwrap() - 4.0).abs() < 1e-12);
        let (lo, hi) = c.ratio_ci.unwrap();
        assert!((lo - 4.0).abs() < 1e-12 && (hi - 4.0).abs() < 1e-12);
        assert_eq!((c.arm_wins, c.baseline_wins, c.ties), (12, 0, 0));
        assert!(c.arm_win_ci.unwrap().0 > 0.5);
        assert!(c.p_arm_greater.unwrap() < 0.01);
        assert!(c.p_baseline_greater.unwrap() > 0.99);
        let fixed = p.arm("fixed").unwrap();
        assert_eq!(fixed.violations, 1);
        assert!((fixed.violation_rate.unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(fixed.revert_rate, Some(0.0));
        assert_eq!(p.arm("adaptive").unwrap().revert_rate, Some(0.25));
        assert!((p.gm_pr_z.unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn ties_and_failures() {
        let mut r = rows(|t| if t < 6 { 1.0 } else { 2.0 });
        r[1].error = Some("boom".into());
        let s = summarize(&config(), &r);
        assert_eq!(s.failed_rows, 1);
        let p = s.point(4, 16).unwrap();
        let c = p.comparison("adaptive").unwrap();
        assert_eq!(c.pairs, 11);
        assert_eq!((c.arm_wins, c.ties), (6, 5));
        // Fewer than 10 non-tied pairs.
        assert_eq!(c.p_arm_greater, None);
        assert_eq!(p.arm("adaptive").unwrap().trials_failed, 1);
    }

    #[test]
    fn summary_is_deterministic() {
        let r = rows(|t| 1.0 + t as f64);
        assert_eq!(summarize(&config(), &r), summarize(&config(), &r));
    }
}
