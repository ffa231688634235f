//! Reduced density matrices of the sparse state and their eigenbases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashtable::AmpTable;
use crate::linalg::{fix_phase, Mat2, Mat4, SquareMatrix, C64, ONE, ZERO};
use crate::state::SparseState;

/// `|b|² < EPS_MACH * max(|a|, |d|)` marks an RDM as effectively diagonal.
pub const EPS_MACH: f64 = 2.22e-16;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 50;
const HERMITIAN_TOL: f64 = 1e-10;

/// Single-qubit RDM `[[a, b], [conj(b), d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rdm1 {
    pub a: f64,
    pub d: f64,
    pub b: C64,
}

impl Rdm1 {
    pub fn matrix(&self) -> Mat2 {
        SquareMatrix([[C64::new(self.a, 0.0), self.b], [self.b.conj(), C64::new(self.d, 0.0)]])
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Eigenvalues, larger first.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.a + self.d);
        let tau = 0.5 * (self.d - self.a);
        let delta = (tau * tau + self.b.norm_sqr()).sqrt();
        [mean + delta, mean - delta]
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .filter(|&&l| l > 1e-300)
            .map(|&l| -l * l.log2())
            .sum()
    }

    /// `true` when the effectively-diagonal guard applies.
    pub fn is_effectively_diagonal(&self) -> bool {
        self.b.norm_sqr() < EPS_MACH * self.a.abs().max(self.d.abs())
    }
}

/// Two-qubit RDM indexed by `s = 2 * bit(q1) + bit(q2)`.
pub type Rdm2 = Mat4;

/// All single-qubit RDMs from one table build.
pub fn rdm1_all(state: &SparseState) -> Vec<Rdm1> {
    let n = state.n_qubits();
    let mut out = vec![
        Rdm1 {
            a: 0.0,
            d: 0.0,
            b: ZERO,
        };
        n
    ];
    let table = AmpTable::from_entries(state.entries());
    for &(x, amp) in state.entries() {
        let p = amp.norm_sqr();
        for (j, rho) in out.iter_mut().enumerate() {
            let bit = 1u64 << j;
            if x & bit == 0 {
                rho.a += p;
                if let Some(partner) = table.get(x | bit) {
                    rho.b += amp * partner.conj();
                }
            } else {
                rho.d += p;
            }
        }
    }
    out
}

/// Dominant eigenpair of a 2x2 Hermitian RDM, numerically stable for either sign of `d - a`.
pub fn dominant_eigvec_2x2(rho: &Rdm1) -> ([C64; 2], f64) {
    if rho.is_effectively_diagonal() {
        return if rho.a >= rho.d {
            ([ONE, ZERO], rho.a)
        } else {
            ([ZERO, ONE], rho.d)
        };
    }
    let tau = 0.5 * (rho.d - rho.a);
    let delta = (tau * tau + rho.b.norm_sqr()).sqrt();
    let lambda = 0.5 * (rho.a + rho.d) + delta;
    let mut v = if tau >= 0.0 {
        [rho.b, C64::new(tau + delta, 0.0)]
    } else {
        [C64::new(delta - tau, 0.0), rho.b.conj()]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    v[0] /= norm;
    v[1] /= norm;
    fix_phase(&mut v);
    (v, lambda)
}

/// Unitary whose first column is the dominant eigenvector of `rho`.
///
/// Returns the identity or the swap when the effectively-diagonal guard applies.
pub fn eigenbasis_2x2(rho: &Rdm1) -> Mat2 {
    let (v, _) = dominant_eigvec_2x2(rho);
    let mut w = [-v[1].conj(), v[0].conj()];
    fix_phase(&mut w);
    let mut m = Mat2::zeros();
    m.set_column(0, &v);
    m.set_column(1, &w);
    m
}

/// Two-qubit RDM of `(q1, q2)` by grouping keys on the remaining bits.
pub fn rdm2(state: &SparseState, q1: usize, q2: usize) -> Result<Rdm2> {
    let n = state.n_qubits();
    if q1 == q2 {
        return Err(Error::SameQubit(q1));
    }
    if q1 >= n || q2 >= n {
        return Err(Error::InvalidGate(format!("qubit pair ({q1}, {q2}) out of range for {n} qubits")));
    }
    let mask = (1u64 << q1) | (1u64 << q2);
    let block = |x: u64| (2 * ((x >> q1) & 1) + ((x >> q2) & 1)) as usize;
    let mut keyed: Vec<(u64, usize, C64)> = state
        .entries()
        .iter()
        .map(|&(x, a)| (x & !mask, block(x), a))
        .collect();
    keyed.sort_unstable_by_key(|e| (e.0, e.1));
    let mut rho = Mat4::zeros();
    for group in keyed.chunk_by(|l, r| l.0 == r.0) {
        for &(_, s, a) in group {
            for &(_, t, b) in group {
                rho[(s, t)] += a * b.conj();
            }
        }
    }
    Ok(rho)
}

/// Eigendecomposition of a 4x4 Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns `(V, λ)` with `λ` descending, `V†ρV ≈ diag(λ)`, and each column's first
/// non-negligible entry real positive.
pub fn eig4_hermitian(rho: &Mat4) -> Result<(Mat4, [f64; 4])> {
    let dev = rho.hermiticity_error();
    if !(dev <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(dev));
    }
    let mut a = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            a[(i, j)] = 0.5 * (rho[(i, j)] + rho[(j, i)].conj());
        }
    }
    let mut v = Mat4::identity();
    let scale = frobenius(&a).max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < JACOBI_TOL * scale {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                let g = a[(p, q)];
                let mag = g.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = g.conj() / mag;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut rot = Mat4::identity();
                rot[(p, p)] = C64::new(c, 0.0);
                rot[(p, q)] = C64::new(s, 0.0);
                rot[(q, p)] = phase * -s;
                rot[(q, q)] = phase * c;
                a = rot.dagger() * a * rot;
                v = v * rot;
            }
        }
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let mut sorted = Mat4::zeros();
    let mut evals = [0.0; 4];
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_phase(&mut col);
        sorted.set_column(dst, &col);
        evals[dst] = a[(src, src)].re;
    }
    Ok((sorted, evals))
}

fn frobenius(m: &Mat4) -> f64 {
    m.0.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(m: &Mat4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}
