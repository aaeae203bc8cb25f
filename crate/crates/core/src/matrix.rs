//! Fixed-size 4×4 complex matrices.
//!
//! Only what the phase-space transformations need: products, transpose,
//! determinant and a cofactor inverse.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix4(pub [[Complex64; 4]; 4]);

impl ComplexMatrix4 {
    pub fn zeros() -> Self {
        Self([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        let mut m = Self::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.0[i][j] = Complex64::new(*v, 0.0);
            }
        }
        m
    }

    /// The canonical symplectic form with identity blocks off the diagonal.
    pub fn omega() -> Self {
        Self::from_real([
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ])
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v *= s);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] -= other.0[i][j];
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += other.0[i][j];
            }
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn mul_vec(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    fn minor3(&self, skip_row: usize, skip_col: usize) -> Complex64 {
        let mut m = [[ZERO; 3]; 3];
        for (r, i) in (0..4).filter(|&i| i != skip_row).enumerate() {
            for (c, j) in (0..4).filter(|&j| j != skip_col).enumerate() {
                m[r][c] = self.0[i][j];
            }
        }
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    fn cofactor(&self, i: usize, j: usize) -> Complex64 {
        let sign = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
        self.minor3(i, j) * sign
    }

    /// Laplace expansion along the first row.
    pub fn det(&self) -> Complex64 {
        (0..4).map(|j| self.0[0][j] * self.cofactor(0, j)).sum()
    }

    /// Adjugate over determinant; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let mut inv = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                inv.0[j][i] = self.cofactor(i, j) / det;
            }
        }
        Some(inv)
    }

    pub fn to_nalgebra(&self) -> nalgebra::Matrix4<Complex64> {
        nalgebra::Matrix4::from_fn(|i, j| self.0[i][j])
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Mul for ComplexMatrix4 {
    type Output = ComplexMatrix4;
    fn mul(self, rhs: Self) -> Self {
        (&self).mul(&rhs)
    }
}

impl Mul for &ComplexMatrix4 {
    type Output = ComplexMatrix4;
    fn mul(self, rhs: Self) -> ComplexMatrix4 {
        let mut out = ComplexMatrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_is_antisymmetric_and_squares_to_minus_identity() {
        let om = ComplexMatrix4::omega();
        assert_eq!(om.transpose(), om.scale(Complex64::new(-1.0, 0.0)));
        let sq = om * om;
        assert_eq!(
            sq,
            ComplexMatrix4::identity().scale(Complex64::new(-1.0, 0.0))
        );
    }

    #[test]
    fn cofactor_inverse_matches_product() {
        let mut m = ComplexMatrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = Complex64::new(
                    (i * 4 + j) as f64 * 0.37 - 1.1,
                    ((i + 2 * j) % 5) as f64 * 0.5,
                );
            }
            m[(i, i)] += Complex64::new(3.0, 0.0);
        }
        let inv = m.inverse().expect("invertible");
        assert!((m * inv).max_abs_diff(&ComplexMatrix4::identity()) < 1e-13);
        assert!((inv * m).max_abs_diff(&ComplexMatrix4::identity()) < 1e-13);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        assert!(ComplexMatrix4::zeros().inverse().is_none());
    }
}
