//! One- and two-qubit gates and Haar-random unitaries.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Mat4, SquareMatrix, C64, I, ONE, ZERO};

/// Maximum tolerated `max |U†U - I|` for a gate to validate.
pub const UNITARY_TOL: f64 = 1e-12;

/// A unitary acting on one qubit or on an ordered pair of qubits.
///
/// For `Two`, the first target is the high bit of the 4x4 block index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateDoc", into = "GateDoc")]
pub enum Gate {
    One { target: usize, matrix: Mat2 },
    Two { targets: [usize; 2], matrix: Mat4 },
}

/// Wire form: `{"targets": [..], "matrix": [[re, im], ..]}` with the matrix row-major.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    targets: Vec<usize>,
    matrix: Vec<[f64; 2]>,
}

impl TryFrom<GateDoc> for Gate {
    type Error = String;

    fn try_from(doc: GateDoc) -> std::result::Result<Self, String> {
        match doc.targets.as_slice() {
            [t] => Ok(Gate::One {
                target: *t,
                matrix: SquareMatrix::try_from(doc.matrix)?,
            }),
            [a, b] => Ok(Gate::Two {
                targets: [*a, *b],
                matrix: SquareMatrix::try_from(doc.matrix)?,
            }),
            other => Err(format!("a gate acts on 1 or 2 qubits, got {}", other.len())),
        }
    }
}

impl From<Gate> for GateDoc {
    fn from(g: Gate) -> Self {
        match g {
            Gate::One { target, matrix } => GateDoc {
                targets: vec![target],
                matrix: matrix.to_pairs(),
            },
            Gate::Two { targets, matrix } => GateDoc {
                targets: targets.to_vec(),
                matrix: matrix.to_pairs(),
            },
        }
    }
}

impl Gate {
    pub fn one(target: usize, matrix: Mat2) -> Self {
        Gate::One { target, matrix }
    }

    pub fn two(q1: usize, q2: usize, matrix: Mat4) -> Self {
        Gate::Two {
            targets: [q1, q2],
            matrix,
        }
    }

    pub fn targets(&self) -> &[usize] {
        match self {
            Gate::One { target, .. } => std::slice::from_ref(target),
            Gate::Two { targets, .. } => targets,
        }
    }

    pub fn unitarity_error(&self) -> f64 {
        match self {
            Gate::One { matrix, .. } => matrix.unitarity_error(),
            Gate::Two { matrix, .. } => matrix.unitarity_error(),
        }
    }

    /// Largest off-diagonal magnitude of the matrix.
    pub fn max_off_diagonal(&self) -> f64 {
        match self {
            Gate::One { matrix, .. } => matrix.max_off_diagonal(),
            Gate::Two { matrix, .. } => matrix.max_off_diagonal(),
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            Gate::One { target, matrix } => Gate::One {
                target,
                matrix: matrix.dagger(),
            },
            Gate::Two { targets, matrix } => Gate::Two {
                targets,
                matrix: matrix.dagger(),
            },
        }
    }

    /// Checks targets against `n_qubits` and the matrix against [`UNITARY_TOL`].
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for &t in self.targets() {
            if t >= n_qubits {
                return Err(Error::InvalidGate(format!(
                    "target {t} out of range for {n_qubits} qubits"
                )));
            }
        }
        if let Gate::Two { targets: [a, b], .. } = self {
            if a == b {
                return Err(Error::SameQubit(*a));
            }
        }
        let err = self.unitarity_error();
        if !(err <= UNITARY_TOL) {
            return Err(Error::InvalidGate(format!("not unitary (deviation {err:e})")));
        }
        Ok(())
    }
}

pub fn hadamard() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::from_real([[h, h], [h, -h]])
}

pub fn pauli_x() -> Mat2 {
    Mat2::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> Mat2 {
    SquareMatrix([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> Mat2 {
    Mat2::from_real([[1.0, 0.0], [0.0, -1.0]])
}

pub fn s_gate() -> Mat2 {
    Mat2::from_diagonal([ONE, I])
}

/// `diag(1, e^{iθ})`.
pub fn phase(theta: f64) -> Mat2 {
    Mat2::from_diagonal([ONE, C64::from_polar(1.0, theta)])
}

/// `e^{iφZ} = diag(e^{iφ}, e^{-iφ})`.
pub fn exp_iz(phi: f64) -> Mat2 {
    Mat2::from_diagonal([C64::from_polar(1.0, phi), C64::from_polar(1.0, -phi)])
}

/// `e^{iφX}`.
pub fn exp_ix(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    SquareMatrix([[C64::new(c, 0.0), C64::new(0.0, s)], [C64::new(0.0, s), C64::new(c, 0.0)]])
}

/// `e^{iφ Z⊗Z}`.
pub fn exp_izz(phi: f64) -> Mat4 {
    let p = C64::from_polar(1.0, phi);
    let m = C64::from_polar(1.0, -phi);
    Mat4::from_diagonal([p, m, m, p])
}

/// CNOT with the first target as control.
pub fn cnot() -> Mat4 {
    Mat4::from_real([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn cz() -> Mat4 {
    Mat4::from_real([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ])
}

/// Haar-random `D x D` unitary: QR of a complex Ginibre matrix with `diag(R) > 0`.
///
/// Modified Gram-Schmidt on the columns yields exactly that QR factor.
pub fn haar_unitary<const D: usize, R: Rng + ?Sized>(rng: &mut R) -> SquareMatrix<D> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    loop {
        let mut cols: [[C64; D]; D] = [[ZERO; D]; D];
        for col in cols.iter_mut() {
            for v in col.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *v = C64::new(re * scale, im * scale);
            }
        }
        if let Some(q) = gram_schmidt(cols) {
            return q;
        }
    }
}

/// Orthonormalizes columns in order; `None` when a column is numerically dependent.
fn gram_schmidt<const D: usize>(mut cols: [[C64; D]; D]) -> Option<SquareMatrix<D>> {
    for j in 0..D {
        for i in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let qi = &done[i];
            let proj: C64 = qi.iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
            for (v, q) in rest[0].iter_mut().zip(qi.iter()) {
                *v -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return None;
        }
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut m = SquareMatrix::<D>::zeros();
    for (j, col) in cols.iter().enumerate() {
        m.set_column(j, col);
    }
    Some(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn standard_gates_are_unitary() {
        for m in [hadamard(), pauli_x(), pauli_y(), pauli_z(), s_gate(), phase(0.3), exp_iz(0.7), exp_ix(-1.1)] {
            assert!(m.unitarity_error() < 1e-15);
        }
        for m in [cnot(), cz(), exp_izz(0.4)] {
            assert!(m.unitarity_error() < 1e-15);
        }
    }

    #[test]
    fn haar_is_unitary_and_deterministic() {
        let a: Mat4 = haar_unitary(&mut ChaCha8Rng::seed_from_u64(11));
        let b: Mat4 = haar_unitary(&mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
        assert!(a.unitarity_error() <= 1e-12);
        let c: Mat2 = haar_unitary(&mut ChaCha8Rng::seed_from_u64(12));
        assert!(c.unitarity_error() <= 1e-12);
    }

    #[test]
    fn haar_first_moment() {
        // Oracle: E|U00|² = 1/dim by unitary invariance.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| haar_unitary::<2, _>(&mut rng)[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
        let mean4: f64 = (0..n)
            .map(|_| haar_unitary::<4, _>(&mut rng)[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean4 - 0.25).abs() < 0.02, "mean {mean4}");
    }

    #[test]
    fn gate_json_roundtrip_and_validation() {
        let g = Gate::two(3, 1, haar_unitary(&mut ChaCha8Rng::seed_from_u64(5)));
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.starts_with("{\"targets\":[3,1],\"matrix\":[["));
        let back: Gate = serde_json::from_str(&text).unwrap();
        assert_eq!(g, back);
        assert!(g.validate(4).is_ok());
        assert!(g.validate(3).is_err());
        assert_eq!(Gate::two(1, 1, cz()).validate(4), Err(Error::SameQubit(1)));
        let bad = Gate::one(0, Mat2::from_real([[1.0, 1.0], [0.0, 1.0]]));
        assert!(bad.validate(1).is_err());
        let three: std::result::Result<Gate, _> =
            serde_json::from_str("{\"targets\":[0,1,2],\"matrix\":[]}");
        assert!(three.is_err());
    }
}
