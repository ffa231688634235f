//! Gate application in the rotated working frame and the main simulation loop.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis_opt::{basis_optimize, pr_trigger, two_qubit_optimize, OptimizeReport};
use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::hashtable::AmpTable;
use crate::heuristics::{truncate_random, truncate_schmidt1, truncate_schmidt3};
use crate::linalg::{Mat2, C64, ZERO};
use crate::state::{SparseState, TruncationEvent, DROP_THRESHOLD};

/// Per-qubit unitaries `U_j`; the lab state is `(⊗U_j) ψ̃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFrame {
    unitaries: Vec<Mat2>,
}

impl BasisFrame {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            unitaries: vec![Mat2::identity(); n_qubits],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitaries(&self) -> &[Mat2] {
        &self.unitaries
    }

    pub fn get(&self, j: usize) -> &Mat2 {
        &self.unitaries[j]
    }

    /// `U_j <- U_j V`.
    pub fn rotate(&mut self, j: usize, v: &Mat2) {
        self.unitaries[j] = self.unitaries[j] * *v;
    }

    pub fn is_identity(&self) -> bool {
        self.unitaries.iter().all(|u| *u == Mat2::identity())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Fixed,
    #[default]
    Adaptive,
}

/// Rule used for budget-enforcing truncations in the main loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationRule {
    #[default]
    TopK,
    Schmidt1,
    Schmidt3,
    /// Uniform without replacement, seeded from `SimConfig::seed`.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub k: usize,
    pub hard_cap_multiplier: usize,
    pub n_opt: usize,
    pub n_trunc: usize,
    pub trigger_ratio: f64,
    pub mode: Mode,
    pub max_passes: usize,
    pub two_qubit_pass: bool,
    pub diag_tol: f64,
    pub seed: u64,
    /// When false in adaptive mode, gates are still conjugated but the frame never changes.
    pub optimizer_enabled: bool,
    pub truncation: TruncationRule,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            k: 2048,
            hard_cap_multiplier: 8,
            n_opt: 5,
            n_trunc: 1,
            trigger_ratio: 0.9,
            mode: Mode::Adaptive,
            max_passes: 3,
            two_qubit_pass: false,
            diag_tol: 1e-12,
            seed: 0,
            optimizer_enabled: true,
            truncation: TruncationRule::TopK,
        }
    }
}

impl SimConfig {
    pub fn new(k: usize, mode: Mode) -> Self {
        Self {
            k,
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidBudget(self.k));
        }
        if !(self.trigger_ratio > 0.0 && self.trigger_ratio <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "trigger_ratio must lie in (0, 1], got {}",
                self.trigger_ratio
            )));
        }
        if self.hard_cap_multiplier < 1 || self.n_opt < 1 || self.n_trunc < 1 {
            return Err(Error::InvalidParams(
                "hard_cap_multiplier, n_opt and n_trunc must be at least 1".into(),
            ));
        }
        if !(self.diag_tol >= 0.0) {
            return Err(Error::InvalidParams("diag_tol must be non-negative".into()));
        }
        Ok(())
    }

    /// `min(c_hard * k, 2^N)`, never below `k`.
    pub fn hard_cap(&self, n_qubits: usize) -> usize {
        let full = 1usize.checked_shl(n_qubits as u32).unwrap_or(usize::MAX);
        self.k.saturating_mul(self.hard_cap_multiplier).min(full).max(self.k.min(full))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub propagation_s: f64,
    pub truncation_s: f64,
    pub optimization_s: f64,
    pub total_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub fidelity: Option<f64>,
    pub gamma2_tot: f64,
    pub final_pr: f64,
    pub final_support: usize,
    /// PR after every truncation event of the main loop.
    pub pr_trace: Vec<f64>,
    pub truncation_events: Vec<TruncationEvent>,
    pub gates_applied: usize,
    pub diagonal_gates: usize,
    pub optimizer_checks: usize,
    pub optimization_calls: usize,
    pub passes_run: usize,
    pub rotations_attempted: usize,
    pub rotations_accepted: usize,
    pub rotations_reverted: usize,
    /// Optimizer calls that ended with a higher PR than they started with.
    pub pr_increases: usize,
    pub two_qubit_attempted: usize,
    pub two_qubit_accepted: usize,
    pub two_qubit_reverted: usize,
    pub timings: PhaseTimings,
}

impl RunRecord {
    fn absorb(&mut self, report: &OptimizeReport, two_qubit: bool) {
        if two_qubit {
            self.two_qubit_attempted += report.rotations_attempted;
            self.two_qubit_accepted += report.rotations_accepted;
            self.two_qubit_reverted += report.rotations_reverted;
        } else {
            self.passes_run += report.passes_run;
            self.rotations_attempted += report.rotations_attempted;
            self.rotations_accepted += report.rotations_accepted;
            self.rotations_reverted += report.rotations_reverted;
        }
        self.pr_increases += report.pr_increases;
        self.truncation_events.extend_from_slice(&report.truncation_events);
    }

    /// Product of all recorded `step_gamma2`.
    pub fn gamma2_product(&self) -> f64 {
        self.truncation_events.iter().map(|e| e.step_gamma2).product()
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: SparseState,
    pub frame: BasisFrame,
    pub record: RunRecord,
}

/// A failed run together with everything recorded up to the failure.
#[derive(Clone, Debug)]
pub struct RunFailure {
    pub error: Error,
    pub record: RunRecord,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} gates)", self.error, self.record.gates_applied)
    }
}

impl std::error::Error for RunFailure {}

/// `(U_{q1} ⊗ U_{q2})† G (U_{q1} ⊗ U_{q2})`, or `U† G U` for one qubit.
pub fn conjugate_gate(gate: &Gate, frame: &BasisFrame) -> Gate {
    match *gate {
        Gate::One { target, matrix } => {
            let u = frame.get(target);
            Gate::One {
                target,
                matrix: u.dagger() * matrix * *u,
            }
        }
        Gate::Two { targets, matrix } => {
            let u = frame.get(targets[0]).kron(frame.get(targets[1]));
            Gate::Two {
                targets,
                matrix: u.dagger() * matrix * u,
            }
        }
    }
}

pub fn is_diagonal(gate: &Gate, tol: f64) -> bool {
    gate.max_off_diagonal() <= tol
}

#[inline]
fn local_index(x: u64, targets: &[usize]) -> usize {
    targets
        .iter()
        .fold(0usize, |acc, &q| (acc << 1) | ((x >> q) & 1) as usize)
}

#[inline]
fn with_local(x: u64, targets: &[usize], s: usize) -> u64 {
    let m = targets.len();
    targets.iter().enumerate().fold(x, |acc, (pos, &q)| {
        let bit = ((s >> (m - 1 - pos)) & 1) as u64;
        (acc & !(1u64 << q)) | (bit << q)
    })
}

/// Multiplies each amplitude by the gate's diagonal entry for its local bits.
pub fn apply_diagonal(state: &mut SparseState, gate: &Gate) {
    match gate {
        Gate::One { target, matrix } => {
            let d = [matrix[(0, 0)], matrix[(1, 1)]];
            for e in state.entries_mut() {
                e.1 *= d[((e.0 >> target) & 1) as usize];
            }
        }
        Gate::Two { targets, matrix } => {
            let d = [matrix[(0, 0)], matrix[(1, 1)], matrix[(2, 2)], matrix[(3, 3)]];
            for e in state.entries_mut() {
                e.1 *= d[local_index(e.0, targets)];
            }
        }
    }
}

/// Hash-table gate application; output support above `hard_cap` is cut to the top `hard_cap`.
pub fn apply_general(state: &mut SparseState, gate: &Gate, hard_cap: usize) -> Result<Option<TruncationEvent>> {
    let entries = match gate {
        Gate::One { target, matrix } => expand(state.entries(), &[*target], &matrix.0),
        Gate::Two { targets, matrix } => expand(state.entries(), targets, &matrix.0),
    };
    state.set_entries(entries);
    if state.support() > hard_cap {
        return state.truncate_topk(hard_cap).map(Some);
    }
    Ok(None)
}

fn expand<const D: usize>(entries: &[(u64, C64)], targets: &[usize], matrix: &[[C64; D]; D]) -> Vec<(u64, C64)> {
    let mut table = AmpTable::with_capacity(entries.len() * D);
    for &(x, amp) in entries {
        let s = local_index(x, targets);
        for (out, row) in matrix.iter().enumerate() {
            let g = row[s];
            if g != ZERO {
                table.add(with_local(x, targets, out), g * amp);
            }
        }
    }
    table.into_entries(DROP_THRESHOLD)
}

fn truncate_with(state: &mut SparseState, k: usize, rule: TruncationRule, rng: &mut ChaCha8Rng) -> Result<TruncationEvent> {
    match rule {
        TruncationRule::TopK => state.truncate_topk(k),
        TruncationRule::Schmidt1 => truncate_schmidt1(state, k),
        TruncationRule::Schmidt3 => truncate_schmidt3(state, k),
        TruncationRule::Random => truncate_random(state, k, rng),
    }
}

/// Simulates `circuit` from `|0…0>` under `config`.
pub fn run(circuit: &Circuit, config: &SimConfig) -> std::result::Result<RunOutput, RunFailure> {
    let mut record = RunRecord {
        gamma2_tot: 1.0,
        ..RunRecord::default()
    };
    match run_inner(circuit, config, &mut record) {
        Ok((state, frame)) => Ok(RunOutput { state, frame, record }),
        Err(error) => Err(RunFailure { error, record }),
    }
}

fn run_inner(circuit: &Circuit, config: &SimConfig, record: &mut RunRecord) -> Result<(SparseState, BasisFrame)> {
    let started = Instant::now();
    config.validate()?;
    circuit.validate()?;
    let n = circuit.n_qubits;
    let k = config.k;
    let hard_cap = config.hard_cap(n);
    let adaptive = config.mode == Mode::Adaptive;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = SparseState::zero(n)?;
    let mut frame = BasisFrame::identity(n);
    let mut pr_last = 0.0;
    let mut since_trunc = 0usize;
    let mut active_steps = 0usize;

    for gate in &circuit.gates {
        let t0 = Instant::now();
        let g = if adaptive { conjugate_gate(gate, &frame) } else { *gate };
        let mut events = Vec::new();
        if is_diagonal(&g, config.diag_tol) {
            apply_diagonal(&mut state, &g);
            record.diagonal_gates += 1;
        } else if let Some(ev) = apply_general(&mut state, &g, hard_cap)? {
            events.push(ev);
        }
        record.gates_applied += 1;
        let t1 = Instant::now();
        record.timings.propagation_s += (t1 - t0).as_secs_f64();

        since_trunc += 1;
        let overflowed = !events.is_empty();
        if state.support() > k && (overflowed || since_trunc >= config.n_trunc) {
            events.push(truncate_with(&mut state, k, config.truncation, &mut rng)?);
        }
        record.timings.truncation_s += t1.elapsed().as_secs_f64();
        if events.is_empty() {
            continue;
        }
        since_trunc = 0;
        let pr = state.participation_ratio()?;
        for ev in events {
            record.truncation_events.push(ev);
            record.pr_trace.push(pr);
        }

        active_steps += 1;
        if adaptive && config.optimizer_enabled && active_steps % config.n_opt == 0 {
            record.optimizer_checks += 1;
            if pr_trigger(pr, pr_last, config.trigger_ratio) {
                let t2 = Instant::now();
                let report = basis_optimize(&mut state, &mut frame, k, config.max_passes)?;
                record.optimization_calls += 1;
                record.absorb(&report, false);
                if config.two_qubit_pass {
                    let report = two_qubit_optimize(&mut state, k)?;
                    record.absorb(&report, true);
                }
                pr_last = state.participation_ratio()?;
                record.timings.optimization_s += t2.elapsed().as_secs_f64();
            }
        }
    }

    let ev = truncate_with(&mut state, k, config.truncation, &mut rng)?;
    if ev.discarded > 0 {
        record.truncation_events.push(ev);
        record.pr_trace.push(state.participation_ratio()?);
    }
    record.gamma2_tot = state.gamma2_tot();
    record.final_pr = state.participation_ratio()?;
    record.final_support = state.support();
    record.timings.total_s = started.elapsed().as_secs_f64();
    Ok((state, frame))
}
