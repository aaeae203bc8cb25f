//! Reference computations that share no code path with the closed forms
//! they check: dense diagonalization, truncated spectral sums and direct
//! linear solves of the mode expansion.

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix4;
use crate::quadrature::hermite_functions;
use crate::transform::Frequencies;

/// Default number of unit-frequency Hermite functions per oscillator.
pub const DEFAULT_BASIS: usize = 30;

/// `(P² + ω²ξ²)/2` in the unit-frequency Hermite basis, with `ξ²` from the
/// ladder formula (exact, no truncation of intermediate sums).
pub fn oscillator_block(omega: f64, basis: usize) -> DMatrix<f64> {
    let shift = (omega * omega - 1.0) / 2.0;
    DMatrix::from_fn(basis, basis, |i, j| {
        let (lo, hi) = (i.min(j), i.max(j));
        let xi_sq = if i == j {
            i as f64 + 0.5
        } else if hi == lo + 2 {
            (((lo + 1) * (lo + 2)) as f64).sqrt() / 2.0
        } else {
            0.0
        };
        let h0 = if i == j { i as f64 + 0.5 } else { 0.0 };
        h0 + shift * xi_sq
    })
}

/// `H_ξ` on the product basis, `basis²` dimensional.
pub fn product_hamiltonian(freqs: Frequencies, basis: usize) -> DMatrix<f64> {
    let h1 = oscillator_block(freqs.omega1, basis);
    let h2 = oscillator_block(freqs.omega2, basis);
    let id = DMatrix::<f64>::identity(basis, basis);
    h1.kronecker(&id) + id.kronecker(&h2)
}

/// Lowest `count` eigenvalues of [`product_hamiltonian`].
pub fn lowest_levels(freqs: Frequencies, basis: usize, count: usize) -> Result<Vec<f64>> {
    if count > basis * basis {
        return Err(Error::InvalidConfig(format!(
            "{count} levels requested from a {}-dimensional basis",
            basis * basis
        )));
    }
    let mut ev: Vec<f64> = product_hamiltonian(freqs, basis)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev.truncate(count);
    Ok(ev)
}

/// `Σ_{n<terms} φ_n(q₂) φ_n(q₁) e^{−(n+½)τ}`.
pub fn euclidean_spectral_sum(q2: f64, q1: f64, tau: f64, terms: usize) -> f64 {
    if terms == 0 {
        return 0.0;
    }
    let a = hermite_functions(terms - 1, q2);
    let b = hermite_functions(terms - 1, q1);
    (0..terms)
        .map(|n| a[n] * b[n] * (-(n as f64 + 0.5) * tau).exp())
        .sum()
}

/// Mode rows at time `t`: the `C`-coefficients of `x`, `Πz`, `z`, `Πx`
/// split into their `ω1` and `ω2` parts.
struct ModeRows {
    s1: Vector4<Complex64>,
    s2: Vector4<Complex64>,
    z1: Vector4<Complex64>,
    z2: Vector4<Complex64>,
}

fn mode_rows(t: f64, freqs: Frequencies) -> ModeRows {
    let (w1, w2) = (freqs.omega1, freqs.omega2);
    let e = |w: f64| Complex64::from_polar(1.0, w * t);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let (e1p, e1m, e2p, e2m) = (e(w1), e(-w1), e(w2), e(-w2));
    ModeRows {
        s1: Vector4::new(e1p, e1m, zero, zero),
        s2: Vector4::new(zero, zero, e2p, e2m),
        z1: Vector4::new(i * w1 * e1p, -i * w1 * e1m, zero, zero),
        z2: Vector4::new(zero, zero, i * w2 * e2p, -i * w2 * e2m),
    }
}

/// Rows mapping mode amplitudes to `(x(t₁), Πz(t₁), x†(t₂), Πz†(t₂))` and to
/// `(z(t₁), Πx(t₁), z†(t₂), Πx†(t₂))`. The adjoint flips the sign of the
/// `ω1` part, since `x = ibξ₁ + bξ₂` with Hermitian `ξ`.
fn boundary_systems(
    t1: f64,
    t: f64,
    freqs: Frequencies,
) -> (Matrix4<Complex64>, Matrix4<Complex64>) {
    let w1s = Complex64::new(freqs.omega1 * freqs.omega1, 0.0);
    let w2s = Complex64::new(freqs.omega2 * freqs.omega2, 0.0);
    let a = mode_rows(t1, freqs);
    let b = mode_rows(t1 + t, freqs);
    let inputs = Matrix4::from_rows(&[
        (a.s1 + a.s2).transpose(),
        (a.s1 * w1s + a.s2 * w2s).transpose(),
        (b.s2 - b.s1).transpose(),
        (b.s2 * w2s - b.s1 * w1s).transpose(),
    ]);
    let outputs = Matrix4::from_rows(&[
        (a.z1 + a.z2).transpose(),
        (a.z1 * w2s + a.z2 * w1s).transpose(),
        (b.z2 - b.z1).transpose(),
        (b.z2 * w1s - b.z1 * w2s).transpose(),
    ]);
    (inputs, outputs)
}

/// Closure map obtained by solving the boundary system for the mode
/// amplitudes numerically.
pub fn closure_by_linear_solve(t1: f64, t: f64, freqs: Frequencies) -> Result<ComplexMatrix4> {
    let (inputs, outputs) = boundary_systems(t1, t, freqs);
    let inv = inputs
        .try_inverse()
        .ok_or_else(|| Error::InvalidConfig(format!("boundary system singular at T = {t}")))?;
    let m = outputs * inv;
    let mut out = ComplexMatrix4::zeros();
    for r in 0..4 {
        for c in 0..4 {
            out[(r, c)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Boundary data and the dependent quantities for given mode amplitudes.
pub fn boundary_data(
    amps: [Complex64; 4],
    t1: f64,
    t: f64,
    freqs: Frequencies,
) -> ([Complex64; 4], [Complex64; 4]) {
    let (inputs, outputs) = boundary_systems(t1, t, freqs);
    let c = Vector4::from(amps);
    let (i, o) = (inputs * c, outputs * c);
    ([i[0], i[1], i[2], i[3]], [o[0], o[1], o[2], o[3]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn block_is_exact_for_unit_frequency() {
        let h = oscillator_block(1.0, 6);
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { i as f64 + 0.5 } else { 0.0 };
                assert_eq!(h[(i, j)], want);
            }
        }
    }

    #[test]
    fn spectral_sum_matches_mehler_kernel() {
        let (q2, q1, tau): (f64, f64, f64) = (0.4, -0.9, 1.0);
        let s = tau.sinh();
        let want = (-((q2 * q2 + q1 * q1) * tau.cosh() - 2.0 * q2 * q1) / (2.0 * s)).exp()
            / (2.0 * PI * s).sqrt();
        assert!((euclidean_spectral_sum(q2, q1, tau, 200) - want).abs() < 1e-13);
        assert_eq!(euclidean_spectral_sum(q2, q1, tau, 0), 0.0);
    }

    #[test]
    fn linear_solve_reproduces_boundary_data() {
        let f = Frequencies::new(2f64.sqrt(), 1.0).unwrap();
        let amps = [
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.4),
            Complex64::new(0.5, -0.3),
            Complex64::new(0.1, 0.2),
        ];
        let (inp, out) = boundary_data(amps, 0.2, 0.9, f);
        let h = closure_by_linear_solve(0.2, 0.9, f).unwrap();
        let got = h.mul_vec(&inp);
        for k in 0..4 {
            assert!((got[k] - out[k]).norm() < 1e-12);
        }
    }
}
