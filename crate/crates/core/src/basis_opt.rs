//! Product-basis optimization guarded by the participation ratio.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gates::Gate;
use crate::linalg::Mat2;
use crate::propagation::{apply_general, BasisFrame};
use crate::rdm::{eig4_hermitian, eigenbasis_2x2, rdm1_all, rdm2};
use crate::state::{SparseState, TruncationEvent};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub passes_run: usize,
    pub rotations_attempted: usize,
    pub rotations_accepted: usize,
    pub rotations_reverted: usize,
    pub pr_before: f64,
    pub pr_after: f64,
    /// 1 when the PR measured after the call exceeds the PR measured before it.
    pub pr_increases: usize,
    /// Truncations kept by accepted rotations.
    pub truncation_events: Vec<TruncationEvent>,
}

/// `true` on the first check (`pr_last == 0`) or once PR has grown past `pr_last / tau`.
pub fn pr_trigger(pr_cur: f64, pr_last: f64, tau: f64) -> bool {
    pr_last == 0.0 || pr_cur > pr_last / tau
}

/// Mixes each bit-`j` partner pair by `V†`; missing partners count as zero.
pub fn apply_single_qubit_rotation(state: &mut SparseState, j: usize, v: &Mat2) -> Result<()> {
    apply_general(state, &Gate::one(j, v.dagger()), usize::MAX)?;
    Ok(())
}

/// Coordinate descent over per-qubit RDM eigenbases.
///
/// RDMs are computed once per pass. A rotation is kept only if the post-truncation
/// PR is strictly lower; otherwise the pre-trial state is restored exactly.
pub fn basis_optimize(
    state: &mut SparseState,
    frame: &mut BasisFrame,
    k: usize,
    max_passes: usize,
) -> Result<OptimizeReport> {
    let mut report = OptimizeReport {
        pr_before: state.participation_ratio()?,
        ..OptimizeReport::default()
    };
    let mut pr = report.pr_before;
    for _ in 0..max_passes {
        report.passes_run += 1;
        let rdms = rdm1_all(state);
        let mut accepted_any = false;
        for (j, rho) in rdms.iter().enumerate() {
            let v = eigenbasis_2x2(rho);
            if v.is_permutation() {
                continue;
            }
            report.rotations_attempted += 1;
            let snapshot = state.clone();
            apply_single_qubit_rotation(state, j, &v)?;
            let event = state.truncate_topk(k)?;
            let pr_new = state.participation_ratio()?;
            if pr_new < pr {
                frame.rotate(j, &v);
                report.rotations_accepted += 1;
                if event.discarded > 0 {
                    report.truncation_events.push(event);
                }
                pr = pr_new;
                accepted_any = true;
            } else {
                *state = snapshot;
                report.rotations_reverted += 1;
            }
        }
        if !accepted_any {
            break;
        }
    }
    report.pr_after = state.participation_ratio()?;
    report.pr_increases = usize::from(report.pr_after > report.pr_before);
    Ok(report)
}

fn pair_schedule(n: usize) -> Vec<(usize, usize)> {
    let even = (0..n.saturating_sub(1)).step_by(2).map(|q| (q, q + 1));
    let odd = (1..n.saturating_sub(1)).step_by(2).map(|q| (q, q + 1));
    even.chain(odd).collect()
}

/// Transient two-qubit rotate, truncate, undo pass over even then odd neighbour pairs.
///
/// The frame is never touched; a pair is kept only if PR strictly decreased.
pub fn two_qubit_optimize(state: &mut SparseState, k: usize) -> Result<OptimizeReport> {
    let mut report = OptimizeReport {
        pr_before: state.participation_ratio()?,
        passes_run: 1,
        ..OptimizeReport::default()
    };
    let mut pr = report.pr_before;
    for (q1, q2) in pair_schedule(state.n_qubits()) {
        let rho = rdm2(state, q1, q2)?;
        let (v, _) = eig4_hermitian(&rho)?;
        if v.is_permutation() {
            continue;
        }
        report.rotations_attempted += 1;
        let snapshot = state.clone();
        apply_general(state, &Gate::two(q1, q2, v.dagger()), usize::MAX)?;
        let first = state.truncate_topk(k)?;
        apply_general(state, &Gate::two(q1, q2, v), usize::MAX)?;
        let second = state.truncate_topk(k)?;
        let pr_new = state.participation_ratio()?;
        if pr_new < pr {
            report.rotations_accepted += 1;
            report
                .truncation_events
                .extend([first, second].into_iter().filter(|e| e.discarded > 0));
            pr = pr_new;
        } else {
            *state = snapshot;
            report.rotations_reverted += 1;
        }
    }
    report.pr_after = state.participation_ratio()?;
    report.pr_increases = usize::from(report.pr_after > report.pr_before);
    Ok(report)
}
