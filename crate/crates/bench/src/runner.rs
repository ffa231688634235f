//! Paired trial orchestration.

use bass_core::estimators::{calibrated_r, violation_check};
use bass_core::reference::{pr_z_exact, MAX_DENSE_QUBITS};
use bass_core::{dense_simulate, fidelity, generate_circuit, run, Circuit, DenseState, RunOutput, SimConfig};
use rayon::prelude::*;

use crate::config::{Arm, ExperimentConfig};
use crate::rows::{ResultRow, SCHEMA_VERSION};
use crate::seeds::{circuit_seed, fnv1a, trial_seed};

/// One (N, trial) work unit; covers every `k` and arm on a shared circuit.
#[derive(Clone, Copy, Debug)]
struct Unit {
    n_qubits: usize,
    trial: u64,
}

/// A circuit instance together with its exact reference, when small enough.
pub struct Instance {
    pub circuit: Circuit,
    pub hash: String,
    pub reference: Option<DenseState>,
    pub pr_z: Option<f64>,
}

impl Instance {
    pub fn build(config: &ExperimentConfig, n_qubits: usize, trial: u64) -> bass_core::Result<Self> {
        let seed = circuit_seed(config.seeds.base_seed, n_qubits, config.family, trial);
        Self::from_circuit(generate_circuit(config.family, n_qubits, &config.family_params, seed)?)
    }

    /// Wraps an existing circuit, simulating it densely when small enough.
    pub fn from_circuit(circuit: Circuit) -> bass_core::Result<Self> {
        let n_qubits = circuit.n_qubits;
        let hash = format!("{:016x}", fnv1a(circuit.to_json().as_bytes()));
        let reference = if n_qubits <= MAX_DENSE_QUBITS {
            Some(dense_simulate(&circuit)?)
        } else {
            None
        };
        let pr_z = reference.as_ref().map(pr_z_exact).transpose()?;
        Ok(Self {
            circuit,
            hash,
            reference,
            pr_z,
        })
    }
}

/// Simulator settings of one arm at budget `k`.
pub fn arm_config(config: &ExperimentConfig, arm: &Arm, n_qubits: usize, k: usize, trial: u64) -> SimConfig {
    SimConfig {
        k,
        mode: arm.mode,
        truncation: arm.truncation,
        seed: trial_seed(config.seeds.base_seed, n_qubits, k, config.family, trial),
        ..config.sim.clone()
    }
}

fn blank_row(config: &ExperimentConfig, arm: &Arm, n_qubits: usize, k: usize, trial: u64) -> ResultRow {
    ResultRow {
        schema_version: SCHEMA_VERSION,
        experiment_id: config.experiment_id.clone(),
        family: config.family,
        n_qubits,
        k,
        depth: config.family_params.depth_for(config.family),
        arm: arm.name.clone(),
        mode: arm.mode,
        truncation: arm.truncation,
        trial,
        circuit_seed: circuit_seed(config.seeds.base_seed, n_qubits, config.family, trial),
        trial_seed: trial_seed(config.seeds.base_seed, n_qubits, k, config.family, trial),
        circuit_hash: String::new(),
        gate_count: 0,
        fidelity: None,
        gamma2_tot: 0.0,
        calibrated_r: 0.0,
        violation: None,
        pr_sparse: 0.0,
        pr_sparse_peak: 0.0,
        pr_z_exact: None,
        final_support: 0,
        truncation_events: 0,
        diagonal_gates: 0,
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
        propagation_s: 0.0,
        truncation_s: 0.0,
        optimization_s: 0.0,
        total_s: 0.0,
        error: None,
    }
}

fn fill_row(row: &mut ResultRow, out: &RunOutput) {
    let r = &out.record;
    row.gamma2_tot = r.gamma2_tot;
    row.pr_sparse = r.final_pr;
    row.pr_sparse_peak = r.pr_trace.iter().copied().fold(r.final_pr, f64::max);
    row.final_support = r.final_support;
    row.truncation_events = r.truncation_events.len();
    row.diagonal_gates = r.diagonal_gates;
    row.optimizer_checks = r.optimizer_checks;
    row.optimization_calls = r.optimization_calls;
    row.passes_run = r.passes_run;
    row.rotations_attempted = r.rotations_attempted;
    row.rotations_accepted = r.rotations_accepted;
    row.rotations_reverted = r.rotations_reverted;
    row.pr_increases = r.pr_increases;
    row.two_qubit_attempted = r.two_qubit_attempted;
    row.two_qubit_accepted = r.two_qubit_accepted;
    row.two_qubit_reverted = r.two_qubit_reverted;
    row.propagation_s = r.timings.propagation_s;
    row.truncation_s = r.timings.truncation_s;
    row.optimization_s = r.timings.optimization_s;
    row.total_s = r.timings.total_s;
}

/// Runs one arm on a prepared instance and returns its row plus the raw output.
pub fn run_arm(
    config: &ExperimentConfig,
    arm: &Arm,
    instance: &Instance,
    k: usize,
    trial: u64,
) -> (ResultRow, Option<RunOutput>) {
    let n = instance.circuit.n_qubits;
    let mut row = blank_row(config, arm, n, k, trial);
    row.circuit_hash = instance.hash.clone();
    row.gate_count = instance.circuit.gates.len();
    row.pr_z_exact = instance.pr_z;
    let sim = arm_config(config, arm, n, k, trial);
    let out = match run(&instance.circuit, &sim) {
        Ok(out) => out,
        Err(failure) => {
            row.error = Some(failure.to_string());
            return (row, None);
        }
    };
    fill_row(&mut row, &out);
    row.calibrated_r = calibrated_r(row.gamma2_tot, row.gate_count, &config.stats.estimator);
    if let Some(reference) = &instance.reference {
        match fidelity(&out.state, &out.frame, reference) {
            Ok(f) => {
                row.fidelity = Some(f);
                row.violation = Some(violation_check(f, row.calibrated_r));
            }
            Err(e) => row.error = Some(format!("fidelity: {e}")),
        }
    }
    (row, Some(out))
}

fn run_unit(config: &ExperimentConfig, unit: Unit) -> Vec<ResultRow> {
    let instance = match Instance::build(config, unit.n_qubits, unit.trial) {
        Ok(instance) => instance,
        Err(e) => {
            let mut rows = Vec::new();
            for &k in &config.k {
                for arm in &config.arms {
                    let mut row = blank_row(config, arm, unit.n_qubits, k, unit.trial);
                    row.error = Some(format!("circuit: {e}"));
                    rows.push(row);
                }
            }
            return rows;
        }
    };
    let mut rows = Vec::new();
    for &k in &config.k {
        for arm in &config.arms {
            rows.push(run_arm(config, arm, &instance, k, unit.trial).0);
        }
    }
    rows
}

/// Every row of the experiment, ordered by (N, k, trial, arm) as listed in the config.
///
/// `threads = None` uses the global rayon pool.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> anyhow::Result<Vec<ResultRow>> {
    let units: Vec<Unit> = config
        .n_qubits
        .iter()
        .flat_map(|&n_qubits| {
            (0..config.trials as u64).map(move |t| Unit {
                n_qubits,
                trial: config.seeds.trial_offset + t,
            })
        })
        .collect();
    let work = || -> Vec<Vec<ResultRow>> { units.par_iter().map(|&u| run_unit(config, u)).collect() };
    let per_unit = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build()?.install(work),
        None => work(),
    };
    let mut rows: Vec<ResultRow> = per_unit.into_iter().flatten().collect();
    let n_pos = |n: usize| config.n_qubits.iter().position(|&x| x == n);
    let k_pos = |k: usize| config.k.iter().position(|&x| x == k);
    let arm_pos = |a: &str| config.arms.iter().position(|x| x.name == a);
    rows.sort_by_key(|r| (n_pos(r.n_qubits), k_pos(r.k), r.trial, arm_pos(&r.arm)));
    Ok(rows)
}
