//! Fixed-size complex matrices for one- and two-qubit operators.
//!
//! Two-qubit operators on an ordered target pair `(q1, q2)` use the block
//! index `s = 2 * bit(q1) + bit(q2)`, so `a.kron(&b)` places `a` on `q1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut, Mul};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense `D x D` complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<[f64; 2]>", try_from = "Vec<[f64; 2]>")]
pub struct SquareMatrix<const D: usize>(pub [[C64; D]; D]);

pub type Mat2 = SquareMatrix<2>;
pub type Mat4 = SquareMatrix<4>;

impl<const D: usize> SquareMatrix<D> {
    pub fn zeros() -> Self {
        Self([[ZERO; D]; D])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: [C64; D]) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            m.0[i][i] = diag[i];
        }
        m
    }

    pub fn from_real(rows: [[f64; D]; D]) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            for j in 0..D {
                m.0[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            for j in 0..D {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> [C64; D] {
        std::array::from_fn(|i| self.0[i][j])
    }

    pub fn set_column(&mut self, j: usize, col: &[C64; D]) {
        for i in 0..D {
            self.0[i][j] = col[i];
        }
    }

    /// Largest entrywise magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..D {
            for j in 0..D {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// `max |U†U - I|` over entries.
    pub fn unitarity_error(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Self::identity())
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..D {
            for j in 0..D {
                if i != j {
                    worst = worst.max(self.0[i][j].norm());
                }
            }
        }
        worst
    }

    pub fn trace(&self) -> C64 {
        (0..D).map(|i| self.0[i][i]).sum()
    }

    pub fn apply(&self, v: &[C64; D]) -> [C64; D] {
        std::array::from_fn(|i| (0..D).map(|j| self.0[i][j] * v[j]).sum())
    }

    /// `true` when every entry is 0 or 1 and each row and column has a single 1.
    pub fn is_permutation(&self) -> bool {
        for i in 0..D {
            let mut ones_row = 0;
            let mut ones_col = 0;
            for j in 0..D {
                for (v, count) in [(self.0[i][j], &mut ones_row), (self.0[j][i], &mut ones_col)] {
                    if v == ONE {
                        *count += 1;
                    } else if v != ZERO {
                        return false;
                    }
                }
            }
            if ones_row != 1 || ones_col != 1 {
                return false;
            }
        }
        true
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.0
            .iter()
            .flat_map(|row| row.iter().map(|v| [v.re, v.im]))
            .collect()
    }
}

impl Mat2 {
    /// Kronecker product `self ⊗ rhs`; `self` acts on the high bit of the block index.
    pub fn kron(&self, rhs: &Mat2) -> Mat4 {
        let mut m = Mat4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        m.0[2 * a + c][2 * b + d] = self.0[a][b] * rhs.0[c][d];
                    }
                }
            }
        }
        m
    }
}

impl<const D: usize> Mul for SquareMatrix<D> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            for k in 0..D {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..D {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const D: usize> Index<(usize, usize)> for SquareMatrix<D> {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const D: usize> IndexMut<(usize, usize)> for SquareMatrix<D> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const D: usize> From<SquareMatrix<D>> for Vec<[f64; 2]> {
    fn from(m: SquareMatrix<D>) -> Self {
        m.to_pairs()
    }
}

impl<const D: usize> TryFrom<Vec<[f64; 2]>> for SquareMatrix<D> {
    type Error = String;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self, String> {
        if pairs.len() != D * D {
            return Err(format!(
                "expected {} matrix entries, found {}",
                D * D,
                pairs.len()
            ));
        }
        let mut m = Self::zeros();
        for (idx, [re, im]) in pairs.into_iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err("non-finite matrix entry".to_string());
            }
            m.0[idx / D][idx % D] = C64::new(re, im);
        }
        Ok(m)
    }
}

/// Multiplies `col` by the phase that makes its first non-negligible entry real positive.
pub(crate) fn fix_phase<const D: usize>(col: &mut [C64; D]) {
    let scale = col.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(lead) = col.iter().copied().find(|v| v.norm() > 1e-14 * scale) {
        let phase = lead.conj() / lead.norm();
        for v in col.iter_mut() {
            *v *= phase;
        }
        // The leading entry is real by construction; strip the rounding residue.
        if let Some(v) = col.iter_mut().find(|v| v.norm() > 1e-14 * scale) {
            *v = C64::new(v.norm(), 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_block_order_puts_first_factor_on_high_bit() {
        let x = Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]);
        let id = Mat2::identity();
        let m = x.kron(&id);
        // X on the first target maps s=0 (00) to s=2 (10).
        assert_eq!(m[(2, 0)], ONE);
        assert_eq!(m[(0, 0)], ZERO);
    }

    #[test]
    fn serde_pairs_roundtrip_exact() {
        let m: Mat2 = SquareMatrix([[C64::new(0.1, -0.3), C64::new(1.0 / 3.0, 0.0)], [ZERO, C64::new(-2.5e-17, 7.0)]]);
        let text = serde_json::to_string(&m).unwrap();
        let back: Mat2 = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn wrong_entry_count_rejected() {
        let r: Result<Mat2, _> = serde_json::from_str("[[1.0,0.0],[0.0,0.0]]");
        assert!(r.is_err());
    }

    #[test]
    fn permutation_detection() {
        assert!(Mat2::identity().is_permutation());
        assert!(Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]).is_permutation());
        assert!(!Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]).is_permutation());
    }
}
