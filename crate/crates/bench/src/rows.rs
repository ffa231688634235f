//! Per-run result rows and their JSONL encoding.

use bass_core::{Family, Mode, TruncationRule};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One (config point, trial, arm) run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRow {
    pub schema_version: u32,
    pub experiment_id: String,
    pub family: Family,
    pub n_qubits: usize,
    pub k: usize,
    pub depth: usize,
    pub arm: String,
    pub mode: Mode,
    pub truncation: TruncationRule,
    pub trial: u64,
    pub circuit_seed: u64,
    pub trial_seed: u64,
    /// FNV-1a of the circuit document, hex.
    pub circuit_hash: String,
    pub gate_count: usize,
    pub fidelity: Option<f64>,
    pub gamma2_tot: f64,
    pub calibrated_r: f64,
    pub violation: Option<bool>,
    /// PR of the retained support at circuit end.
    pub pr_sparse: f64,
    /// Largest PR logged after a truncation event.
    pub pr_sparse_peak: f64,
    pub pr_z_exact: Option<f64>,
    pub final_support: usize,
    pub truncation_events: usize,
    pub diagonal_gates: usize,
    pub optimizer_checks: usize,
    pub optimization_calls: usize,
    pub passes_run: usize,
    pub rotations_attempted: usize,
    pub rotations_accepted: usize,
    pub rotations_reverted: usize,
    pub pr_increases: usize,
    pub two_qubit_attempted: usize,
    pub two_qubit_accepted: usize,
    pub two_qubit_reverted: usize,
    pub propagation_s: f64,
    pub truncation_s: f64,
    pub optimization_s: f64,
    pub total_s: f64,
    pub error: Option<String>,
}

impl ResultRow {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }

    /// Copy with wall-clock fields zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        Self {
            propagation_s: 0.0,
            truncation_s: 0.0,
            optimization_s: 0.0,
            total_s: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RowError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: schema_version {found} is not {SCHEMA_VERSION}")]
    Schema { line: usize, found: u32 },
}

pub fn to_jsonl(rows: &[ResultRow]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(row).expect("rows contain only finite floats"));
        out.push('\n');
    }
    out
}

/// Parses newline-delimited rows; blank lines are skipped.
pub fn parse_jsonl(text: &str) -> Result<Vec<ResultRow>, RowError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: ResultRow = serde_json::from_str(line).map_err(|source| RowError::Json { line: i + 1, source })?;
        if row.schema_version != SCHEMA_VERSION {
            return Err(RowError::Schema {
                line: i + 1,
                found: row.schema_version,
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
pub(crate) fn sample_row() -> ResultRow {
    ResultRow {
        schema_version: SCHEMA_VERSION,
        experiment_id: "sample".into(),
        family: Family::Brickwork1D,
        n_qubits: 4,
        k: 16,
        depth: 2,
        arm: "fixed".into(),
        mode: Mode::Fixed,
        truncation: TruncationRule::TopK,
        trial: 0,
        circuit_seed: 7,
        trial_seed: 9,
        circuit_hash: "00000000000000ff".into(),
        gate_count: 3,
        fidelity: Some(0.1 + 0.2),
        gamma2_tot: 1.0,
        calibrated_r: 0.999,
        violation: Some(false),
        pr_sparse: 3.5,
        pr_sparse_peak: 3.5,
        pr_z_exact: Some(3.5),
        final_support: 8,
        truncation_events: 0,
        diagonal_gates: 1,
        optimizer_checks: 0,
        optimization_calls: 0,
        passes_run: 0,
        rotations_attempted: 0,
        rotations_accepted: 0,
        rotations_reverted: 0,
        pr_increases: 0,
        two_qubit_attempted: 0,
        two_qubit_accepted: 0,
        two_qubit_reverted: 0,
        propagation_s: 1e-4,
        truncation_s: 0.0,
        optimization_s: 0.0,
        total_s: 2e-4,
        error: None,
    }
}
