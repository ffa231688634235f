//! Exact dense statevector reference.

use nalgebra::DMatrix;

use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::linalg::{Mat2, Mat4, C64, ZERO};
use crate::propagation::BasisFrame;
use crate::state::{check_qubits, participation_ratio_of, SparseState};

pub const MAX_DENSE_QUBITS: usize = 24;

/// Dense state, index bit `j` is qubit `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn check_dense(n_qubits: usize) -> Result<()> {
    check_qubits(n_qubits)?;
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            n: n_qubits,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

impl DenseState {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_dense(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_dense(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(amps.len(), 1 << n_qubits));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Dense copy of a sparse state in its stored (working) frame.
    pub fn from_sparse(state: &SparseState) -> Result<Self> {
        let mut out = Self::from_amplitudes(state.n_qubits(), vec![ZERO; 1 << state.n_qubits()])?;
        for &(x, a) in state.entries() {
            out.amps[x as usize] = a;
        }
        Ok(out)
    }

    /// Lab-frame dense vector `(⊗U_j) ψ̃` of a sparse state held in `frame`.
    pub fn from_sparse_in_frame(state: &SparseState, frame: &BasisFrame) -> Result<Self> {
        if frame.n_qubits() != state.n_qubits() {
            return Err(Error::DimensionMismatch(frame.n_qubits(), state.n_qubits()));
        }
        let mut out = Self::from_sparse(state)?;
        for (j, u) in frame.unitaries().iter().enumerate() {
            if *u != Mat2::identity() {
                out.apply_single(j, u);
            }
        }
        Ok(out)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) {
            return Err(Error::NullState);
        }
        let s = 1.0 / n2.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(n2)
    }

    pub fn apply_single(&mut self, q: usize, m: &Mat2) {
        let bit = 1usize << q;
        for x in 0..self.amps.len() {
            if x & bit == 0 {
                let (a0, a1) = (self.amps[x], self.amps[x | bit]);
                self.amps[x] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                self.amps[x | bit] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
            }
        }
    }

    /// Applies `m` with `q1` as the high bit of the block index.
    pub fn apply_pair(&mut self, q1: usize, q2: usize, m: &Mat4) {
        let (b1, b2) = (1usize << q1, 1usize << q2);
        for x in 0..self.amps.len() {
            if x & (b1 | b2) == 0 {
                let idx = [x, x | b2, x | b1, x | b1 | b2];
                let v = idx.map(|i| self.amps[i]);
                let w = m.apply(&v);
                for (i, val) in idx.into_iter().zip(w) {
                    self.amps[i] = val;
                }
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match gate {
            Gate::One { target, matrix } => self.apply_single(*target, matrix),
            Gate::Two { targets, matrix } => self.apply_pair(targets[0], targets[1], matrix),
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch(circuit.n_qubits, self.n_qubits));
        }
        for g in &circuit.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DenseState) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }
}

/// Exact lab-frame evolution of `|0…0>` through the circuit.
pub fn dense_simulate(circuit: &Circuit) -> Result<DenseState> {
    let mut psi = DenseState::zero(circuit.n_qubits)?;
    psi.apply_circuit(circuit)?;
    Ok(psi)
}

/// `|<ψ_exact|φ>|²` with both sides normalized, where `φ = (⊗U_j) ψ̃`.
///
/// Evaluated as `<(⊗U_j†) ψ_exact | ψ̃>` so that only retained keys are visited.
pub fn fidelity(state: &SparseState, frame: &BasisFrame, reference: &DenseState) -> Result<f64> {
    if state.n_qubits() != reference.n_qubits || frame.n_qubits() != reference.n_qubits {
        return Err(Error::DimensionMismatch(state.n_qubits(), reference.n_qubits));
    }
    let mut rotated = reference.clone();
    for (j, u) in frame.unitaries().iter().enumerate() {
        if *u != Mat2::identity() {
            rotated.apply_single(j, &u.dagger());
        }
    }
    let overlap: C64 = state
        .entries()
        .iter()
        .map(|&(x, a)| rotated.amps[x as usize].conj() * a)
        .sum();
    let norms = state.norm_sqr() * reference.norm_sqr();
    if !(norms > 0.0) {
        return Err(Error::NullState);
    }
    Ok(overlap.norm_sqr() / norms)
}

/// Computational-basis participation ratio of the exact state.
pub fn pr_z_exact(reference: &DenseState) -> Result<f64> {
    let entries: Vec<(u64, C64)> = reference
        .amps
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(x, a)| (x as u64, *a))
        .collect();
    participation_ratio_of(&entries)
}

/// Reduced density matrix on `kept`; `kept[0]` is the most significant bit of the row index.
pub fn partial_trace(reference: &DenseState, kept: &[usize]) -> Result<DMatrix<C64>> {
    let n = reference.n_qubits;
    let mut mask = 0usize;
    for &q in kept {
        if q >= n {
            return Err(Error::InvalidGate(format!("qubit {q} out of range for {n} qubits")));
        }
        if mask & (1 << q) != 0 {
            return Err(Error::SameQubit(q));
        }
        mask |= 1 << q;
    }
    let m = kept.len();
    let dim = 1usize << m;
    let spread = |i: usize| -> usize {
        kept.iter()
            .enumerate()
            .filter(|(pos, _)| (i >> (m - 1 - pos)) & 1 == 1)
            .map(|(_, &q)| 1usize << q)
            .sum()
    };
    let offsets: Vec<usize> = (0..dim).map(spread).collect();
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for rest in 0..reference.amps.len() {
        if rest & mask != 0 {
            continue;
        }
        for (i, &oi) in offsets.iter().enumerate() {
            let a = reference.amps[rest | oi];
            if a == ZERO {
                continue;
            }
            for (j, &oj) in offsets.iter().enumerate() {
                rho[(i, j)] += a * reference.amps[rest | oj].conj();
            }
        }
    }
    Ok(rho)
}

/// Entanglement entropy in bits between the low `floor(N/2)` qubits and the rest.
pub fn half_chain_entropy(reference: &DenseState) -> Result<f64> {
    let n = reference.n_qubits;
    let n_a = n / 2;
    let (dim_a, dim_b) = (1usize << n_a, 1usize << (n - n_a));
    // Column-major fill puts the low bits on the row index.
    let psi = DMatrix::from_column_slice(dim_a, dim_b, &reference.amps);
    let rho_a = &psi * psi.adjoint();
    let norm = rho_a.trace().re;
    if !(norm > 0.0) {
        return Err(Error::NullState);
    }
    let eig = rho_a.symmetric_eigen();
    Ok(eig
        .eigenvalues
        .iter()
        .map(|&l| l / norm)
        .filter(|&l| l > 1e-15)
        .map(|l| -l * l.log2())
        .sum())
}
