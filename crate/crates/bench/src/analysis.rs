//! Participation-ratio diagnostics and the computational-basis PR scaling fit.

use bass_core::reference::pr_z_exact;
use bass_core::stats::{geometric_mean, linear_fit};
use bass_core::{dense_simulate, generate_circuit, Family, FamilyParams, SparseState};
use serde::{Deserialize, Serialize};

use crate::seeds::circuit_seed;

/// PR of the retained support; `0` for an empty state.
pub fn sparse_support_pr(state: &SparseState) -> f64 {
    state.participation_ratio().unwrap_or(0.0)
}

pub const MIN_FIT_POINTS: usize = 3;
pub const MIN_FIT_TRIALS: usize = 10;
pub const MAX_FIT_QUBITS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrzFit {
    pub family: Family,
    pub n_qubits: Vec<usize>,
    pub gm_pr_z: Vec<f64>,
    /// Slope of `log2 GM(PR_Z)` against `N`.
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub intercept: f64,
}

/// Least-squares exponent from per-N geometric means.
pub fn fit_prz_points(family: Family, n_qubits: &[usize], gm_pr_z: &[f64]) -> anyhow::Result<PrzFit> {
    if n_qubits.len() < MIN_FIT_POINTS {
        anyhow::bail!("PR_Z fit needs at least {MIN_FIT_POINTS} values of N, got {}", n_qubits.len());
    }
    let x: Vec<f64> = n_qubits.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = gm_pr_z.iter().map(|p| p.log2()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(PrzFit {
        family,
        n_qubits: n_qubits.to_vec(),
        gm_pr_z: gm_pr_z.to_vec(),
        alpha: fit.slope,
        alpha_stderr: fit.slope_stderr,
        intercept: fit.intercept,
    })
}

/// Exact PR_Z over `trials` circuits per N, then the exponent fit.
pub fn fit_prz_scaling(
    family: Family,
    n_qubits: &[usize],
    trials: usize,
    params: &FamilyParams,
    base_seed: u64,
) -> anyhow::Result<PrzFit> {
    if trials < MIN_FIT_TRIALS {
        anyhow::bail!("PR_Z fit needs at least {MIN_FIT_TRIALS} trials per N, got {trials}");
    }
    if let Some(&n) = n_qubits.iter().find(|&&n| n > MAX_FIT_QUBITS) {
        anyhow::bail!("PR_Z fit is limited to N <= {MAX_FIT_QUBITS}, got {n}");
    }
    if n_qubits.len() < MIN_FIT_POINTS {
        anyhow::bail!("PR_Z fit needs at least {MIN_FIT_POINTS} values of N, got {}", n_qubits.len());
    }
    let mut gms = Vec::with_capacity(n_qubits.len());
    for &n in n_qubits {
        let prs = (0..trials as u64)
            .map(|t| {
                let c = generate_circuit(family, n, params, circuit_seed(base_seed, n, family, t))?;
                pr_z_exact(&dense_simulate(&c)?)
            })
            .collect::<bass_core::Result<Vec<f64>>>()?;
        gms.push(geometric_mean(&prs)?);
    }
    fit_prz_points(family, n_qubits, &gms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bass_core::C64;

    #[test]
    fn sparse_pr_examples() {
        let flat = SparseState::from_entries(6, (0..40).map(|x| (x, C64::new(1.0, 0.0))).collect()).unwrap();
        assert!((sparse_support_pr(&flat) - 40.0).abs() < 1e-12);
        let mut peaked: Vec<(u64, C64)> = (1..40).map(|x| (x, C64::new(1e-6, 0.0))).collect();
        peaked.push((0, C64::new(1.0, 0.0)));
        let peaked = SparseState::from_entries(6, peaked).unwrap();
        assert!((sparse_support_pr(&peaked) - 1.0).abs() < 1e-9);
        assert_eq!(sparse_support_pr(&peaked), peaked.participation_ratio().unwrap());
    }

    #[test]
    fn synthetic_fits() {
        let ns = [8, 10, 12, 14];
        let exact: Vec<f64> = ns.iter().map(|&n| 2f64.powf(0.7 * n as f64)).collect();
        let f = fit_prz_points(Family::Brickwork1D, &ns, &exact).unwrap();
        assert!((f.alpha - 0.7).abs() < 1e-12);
        assert!(f.alpha_stderr < 1e-12);
        let flat = fit_prz_points(Family::Brickwork1D, &ns, &[5.0; 4]).unwrap();
        assert!(flat.alpha.abs() < 1e-12);
        assert!(fit_prz_points(Family::Brickwork1D, &ns[..2], &exact[..2]).is_err());
    }

    #[test]
    fn preconditions() {
        let p = FamilyParams::default();
        assert!(fit_prz_scaling(Family::Brickwork1D, &[4, 6, 8], 9, &p, 0).is_err());
        assert!(fit_prz_scaling(Family::Brickwork1D, &[4, 6, 22], 10, &p, 0).is_err());
        assert!(fit_prz_scaling(Family::Brickwork1D, &[4, 6], 10, &p, 0).is_err());
        let f = fit_prz_scaling(Family::Brickwork1D, &[4, 6, 8], 10, &p, 0).unwrap();
        assert!(f.alpha > 0.0 && f.alpha <= 1.0);
    }
}
