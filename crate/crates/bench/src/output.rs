//! Result files: raw JSONL rows, per-row CSV, summary JSON and aggregate CSV.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::rows::{to_jsonl, ResultRow};
use crate::summary::Summary;

#[derive(Clone, Debug)]
pub struct OutputPaths {
    pub rows_jsonl: PathBuf,
    pub rows_csv: PathBuf,
    pub summary_json: PathBuf,
    pub summary_csv: PathBuf,
}

impl OutputPaths {
    pub fn new(dir: &Path, experiment_id: &str) -> Self {
        Self {
            rows_jsonl: dir.join(format!("{experiment_id}.jsonl")),
            rows_csv: dir.join(format!("{experiment_id}_rows.csv")),
            summary_json: dir.join(format!("{experiment_id}_summary.json")),
            summary_csv: dir.join(format!("{experiment_id}_summary.csv")),
        }
    }
}

/// One CSV line per (N, k, arm); comparison columns are empty for the baseline.
#[derive(Serialize)]
struct AggregateLine<'a> {
    schema_version: u32,
    experiment_id: &'a str,
    n_qubits: usize,
    k: usize,
    arm: &'a str,
    trials_ok: usize,
    trials_failed: usize,
    gm_pr_z: Option<f64>,
    gm_fidelity: Option<f64>,
    fidelity_ci_lo: Option<f64>,
    fidelity_ci_hi: Option<f64>,
    gm_gamma2: Option<f64>,
    gm_calibrated_r: Option<f64>,
    violation_rate: Option<f64>,
    revert_rate: Option<f64>,
    pr_increases: usize,
    gm_total_s: Option<f64>,
    gm_ratio_vs_baseline: Option<f64>,
    ratio_ci_lo: Option<f64>,
    ratio_ci_hi: Option<f64>,
    arm_wins: Option<usize>,
    baseline_wins: Option<usize>,
    p_arm_greater: Option<f64>,
    p_baseline_greater: Option<f64>,
    gm_time_ratio: Option<f64>,
}

pub fn aggregate_csv(summary: &Summary) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in &summary.points {
        for a in &p.arms {
            let c = p.comparison(&a.arm);
            w.serialize(AggregateLine {
                schema_version: summary.schema_version,
                experiment_id: &summary.experiment_id,
                n_qubits: p.n_qubits,
                k: p.k,
                arm: &a.arm,
                trials_ok: a.trials_ok,
                trials_failed: a.trials_failed,
                gm_pr_z: p.gm_pr_z,
                gm_fidelity: a.gm_fidelity,
                fidelity_ci_lo: a.fidelity_ci.map(|c| c.0),
                fidelity_ci_hi: a.fidelity_ci.map(|c| c.1),
                gm_gamma2: a.gm_gamma2,
                gm_calibrated_r: a.gm_calibrated_r,
                violation_rate: a.violation_rate,
                revert_rate: a.revert_rate,
                pr_increases: a.pr_increases,
                gm_total_s: a.gm_total_s,
                gm_ratio_vs_baseline: c.and_then(|c| c.gm_ratio),
                ratio_ci_lo: c.and_then(|c| c.ratio_ci).map(|r| r.0),
                ratio_ci_hi: c.and_then(|c| c.ratio_ci).map(|r| r.1),
                arm_wins: c.map(|c| c.arm_wins),
                baseline_wins: c.map(|c| c.baseline_wins),
                p_arm_greater: c.and_then(|c| c.p_arm_greater),
                p_baseline_greater: c.and_then(|c| c.p_baseline_greater),
                gm_time_ratio: c.and_then(|c| c.gm_time_ratio),
            })?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn rows_csv(rows: &[ResultRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn write_all(dir: &Path, rows: &[ResultRow], summary: &Summary) -> anyhow::Result<OutputPaths> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let paths = OutputPaths::new(dir, &summary.experiment_id);
    let write = |path: &Path, text: String| fs::write(path, text).with_context(|| format!("writing {}", path.display()));
    write(&paths.rows_jsonl, to_jsonl(rows))?;
    write(&paths.rows_csv, rows_csv(rows)?)?;
    write(&paths.summary_json, serde_json::to_string_pretty(summary)? + "\n")?;
    write(&paths.summary_csv, aggregate_csv(summary)?)?;
    Ok(paths)
}
