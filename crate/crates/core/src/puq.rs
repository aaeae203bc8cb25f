//! Quantum PU oscillator: spectrum, ground states, the two-point kernel in
//! the `(x, Πz)` representation and its verification against composition,
//! the Schrödinger equation and the Heisenberg boundary solution.
//!
//! Kernel arguments `(x₂*, Πz₂*)` label the bra and `(x₁, Πz₁)` the ket;
//! all four are treated as independent complex inputs.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::cosc::KernelValue;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix4;
use crate::quadrature::GaussHermite;
use crate::transform::{Frequencies, PUCoefficients};

/// `|sin(ωT)|` below this is treated as a caustic.
pub const CAUSTIC_TOLERANCE: f64 = 1e-6;
/// Finite-difference step for kernel residuals.
pub const FD_STEP: f64 = 1e-4;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `E_{m,n} = ω1(m + ½) + ω2(n + ½)`.
pub fn spectrum(m: usize, n: usize, freqs: Frequencies) -> f64 {
    freqs.omega1 * (m as f64 + 0.5) + freqs.omega2 * (n as f64 + 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "E")]
    pub energy: f64,
}

/// The lowest `count` levels, ordered by energy then by `m`.
pub fn spectrum_table(freqs: Frequencies, count: usize) -> Vec<Level> {
    let mut out = Vec::with_capacity(count * count);
    for m in 0..count {
        for n in 0..count {
            out.push(Level {
                m,
                n,
                energy: spectrum(m, n, freqs),
            });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.m.cmp(&b.m)));
    out.truncate(count);
    out
}

pub fn spectrum_csv(levels: &[Level]) -> String {
    let mut out = String::from("m,n,E\n");
    for l in levels {
        out.push_str(&format!("{},{},{}\n", l.m, l.n, l.energy));
    }
    out
}

/// `exp{−(ω1ξ1² + ω2ξ2²)/2}`, unnormalized.
pub fn ground_state_xi(xi1: f64, xi2: f64, freqs: Frequencies) -> f64 {
    (-(freqs.omega1 * xi1 * xi1 + freqs.omega2 * xi2 * xi2) / 2.0).exp()
}

/// Ground state on the reality surface in terms of `x = x_R + i x_I`.
pub fn ground_state_constrained(x_re: f64, x_im: f64, freqs: Frequencies) -> f64 {
    let d = freqs.diff_sq();
    (-freqs.omega2 * d * x_re * x_re / 2.0).exp() * (-freqs.omega1 * d * x_im * x_im / 2.0).exp()
}

/// `max |H_ξψ − E₀₀ψ| / max |ψ|` over a square grid, fourth-order stencils.
pub fn ground_state_residual(freqs: Frequencies, half_width: f64, spacing: f64) -> Result<f64> {
    let steps = (2.0 * half_width / spacing).round() as usize;
    if steps < 4 || spacing > 0.05 {
        return Err(Error::GridTooCoarse(format!(
            "{} steps at spacing {spacing}",
            steps
        )));
    }
    let e00 = spectrum(0, 0, freqs);
    let (w1, w2) = (freqs.omega1, freqs.omega2);
    let h = spacing;
    let lap = |f: &dyn Fn(f64) -> f64, u: f64| {
        (-f(u - 2.0 * h) + 16.0 * f(u - h) - 30.0 * f(u) + 16.0 * f(u + h) - f(u + 2.0 * h))
            / (12.0 * h * h)
    };
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for i in 0..=steps {
        let x1 = -half_width + i as f64 * h;
        for j in 0..=steps {
            let x2 = -half_width + j as f64 * h;
            let psi = ground_state_xi(x1, x2, freqs);
            let d11 = lap(&|u| ground_state_xi(u, x2, freqs), x1);
            let d22 = lap(&|u| ground_state_xi(x1, u, freqs), x2);
            let hpsi = -0.5 * (d11 + d22) + 0.5 * (w1 * w1 * x1 * x1 + w2 * w2 * x2 * x2) * psi;
            worst = worst.max((hpsi - e00 * psi).abs());
            peak = peak.max(psi.abs());
        }
    }
    Ok(worst / peak)
}

/// The eight time functions of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelCoeffs {
    pub d: Complex64,
    pub f: Complex64,
    pub g: Complex64,
    pub j: Complex64,
    pub k: Complex64,
    pub m: Complex64,
    pub n: Complex64,
    pub q: Complex64,
}

fn check_caustic(freqs: Frequencies, t: f64) -> Result<(f64, f64)> {
    let s1 = (freqs.omega1 * t).sin();
    let s2 = (freqs.omega2 * t).sin();
    for (name, omega, s) in [("ω1", freqs.omega1, s1), ("ω2", freqs.omega2, s2)] {
        if s.abs() < CAUSTIC_TOLERANCE {
            return Err(Error::Caustic {
                frequency: name,
                omega,
                t,
                sine: s.abs(),
            });
        }
    }
    Ok((s1, s2))
}

pub fn kernel_coeffs(t: f64, freqs: Frequencies) -> Result<KernelCoeffs> {
    let (s1, s2) = check_caustic(freqs, t)?;
    let (c1, c2) = ((freqs.omega1 * t).cos(), (freqs.omega2 * t).cos());
    let (w1, w2) = (freqs.omega1, freqs.omega2);
    let (w1s, w2s) = (w1 * w1, w2 * w2);
    Ok(KernelCoeffs {
        d: c((w1s - w2s) * s1 * s2),
        f: c(w1s * w2 * s1 + w1 * w2s * s2),
        g: c(-w2 * s1 - w1 * s2),
        j: c(-w1s * w2 * s1 * c2 + w1 * w2s * s2 * c1),
        k: c(w2 * s1 * c2 - w1 * s2 * c1),
        m: c(-w1s * w1s * w2 * s1 - w1 * w2s * w2s * s2),
        n: c(w1s * w1s * w2 * s1 * c2 - w1 * w2s * w2s * s2 * c1),
        q: c(1.0 / (s1 * s2)).sqrt(),
    })
}

/// Global kernel normalization `𝒩 = −2πi·√(ω1ω2)`, fixed by the
/// composition property under [`PuMeasure`].
pub fn kernel_normalization(freqs: Frequencies) -> Complex64 {
    Complex64::new(0.0, -2.0 * PI * (freqs.omega1 * freqs.omega2).sqrt())
}

/// Bra and ket arguments of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelArgs {
    pub x2c: Complex64,
    pub piz2c: Complex64,
    pub x1: Complex64,
    pub piz1: Complex64,
}

impl KernelArgs {
    pub fn new(x2c: Complex64, piz2c: Complex64, x1: Complex64, piz1: Complex64) -> Self {
        Self {
            x2c,
            piz2c,
            x1,
            piz1,
        }
    }

    fn to_array(self) -> [Complex64; 4] {
        [self.x2c, self.piz2c, self.x1, self.piz1]
    }

    fn from_array(v: [Complex64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    fn shifted(self, idx: usize, by: Complex64) -> Self {
        let mut v = self.to_array();
        v[idx] += by;
        Self::from_array(v)
    }
}

/// The quadratic form in the kernel exponent, without the `i/D` factor.
fn kernel_form(k: &KernelCoeffs, a: &KernelArgs) -> Complex64 {
    let (x2, p2, x1, p1) = (a.x2c, a.piz2c, a.x1, a.piz1);
    k.f * (x2 * p1 + x1 * p2)
        + k.g * p1 * p2
        + k.j * (x2 * p2 + x1 * p1)
        + k.k * (p2 * p2 + p1 * p1) * 0.5
        + k.m * x1 * x2
        + k.n * (x2 * x2 + x1 * x1) * 0.5
}

fn kernel_exponent(k: &KernelCoeffs, a: &KernelArgs) -> Complex64 {
    I / k.d * kernel_form(k, a)
}

/// The exponent of [`propagator_pu`].
pub fn kernel_exponent_at(args: &KernelArgs, t: f64, freqs: Frequencies) -> Result<Complex64> {
    Ok(kernel_exponent(&kernel_coeffs(t, freqs)?, args))
}

fn kernel_raw(args: &KernelArgs, t: f64, freqs: Frequencies, norm: Complex64) -> Result<Complex64> {
    let k = kernel_coeffs(t, freqs)?;
    Ok(norm * k.q * kernel_exponent(&k, args).exp())
}

/// `⟨x₂*, Πz₂*; t₂ | x₁, Πz₁; t₁⟩` with `T = t₂ − t₁`.
pub fn propagator_pu(args: &KernelArgs, t: f64, freqs: Frequencies) -> Result<KernelValue> {
    let k = kernel_coeffs(t, freqs)?;
    let value = kernel_normalization(freqs) * k.q * kernel_exponent(&k, args).exp();
    Ok(KernelValue {
        value,
        branch_note: format!(
            "principal sqrt of 1/(sin(ω1·T)·sin(ω2·T)), arg = {:.12}",
            c(1.0 / (k.d.re / freqs.diff_sq())).arg()
        ),
    })
}

/// The measure `(2π)^{−2} d⁴ δ(bΠzR − a x_R) δ(bΠzI − c x_I)` reduced to
/// `(2π)^{−2}|b|^{−2} dx_R dx_I` on the constraint surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuMeasure {
    coeffs: PUCoefficients,
}

/// The surface point over `(x_R, x_I)` with its conjugate, continued
/// holomorphically in both coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub x: Complex64,
    pub piz: Complex64,
    pub x_conj: Complex64,
    pub piz_conj: Complex64,
}

impl PuMeasure {
    pub fn new(coeffs: PUCoefficients) -> Self {
        Self { coeffs }
    }

    /// `(2π)^{−2}|b|^{−2}`.
    pub fn jacobian(&self) -> f64 {
        1.0 / (4.0 * PI * PI * self.coeffs.b * self.coeffs.b)
    }

    pub fn surface(&self, x_re: Complex64, x_im: Complex64) -> SurfacePoint {
        let PUCoefficients { a, b, c: cc, .. } = self.coeffs;
        SurfacePoint {
            x: x_re + I * x_im,
            piz: (x_re * a + I * x_im * cc) / b,
            x_conj: x_re - I * x_im,
            piz_conj: (x_re * a - I * x_im * cc) / b,
        }
    }

    /// `∫ dμ f` for an entire `f` of `(x_R, x_I)` whose Gaussian part is
    /// `exponent`.
    pub fn integrate<F, E>(&self, f: F, exponent: E, quad: &GaussHermite) -> Result<Complex64>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
        E: Fn(Complex64, Complex64) -> Complex64,
    {
        Ok(quad.integrate_contour_2d(f, exponent)? * self.jacobian())
    }
}

/// Reduced density of the measure at a point of the 4-dimensional space:
/// `(2π)^{−2}|b|^{−2}` on the constraint surface, zero off it.
pub fn pu_measure_weight(
    x_re: f64,
    x_im: f64,
    piz_re: f64,
    piz_im: f64,
    coeffs: &PUCoefficients,
) -> f64 {
    let r1 = coeffs.b * piz_re - coeffs.a * x_re;
    let r2 = coeffs.b * piz_im - coeffs.c * x_im;
    let scale = 1.0
        + x_re
            .abs()
            .max(x_im.abs())
            .max(piz_re.abs())
            .max(piz_im.abs());
    if r1.abs().max(r2.abs()) <= 1e-12 * scale * (coeffs.b.abs() + coeffs.c.abs()) {
        PuMeasure::new(*coeffs).jacobian()
    } else {
        0.0
    }
}

/// `∫ dμ K(3;2) K(2;1)` with the given kernel normalization.
pub fn compose_pu_with(
    x3c: Complex64,
    piz3c: Complex64,
    x1: Complex64,
    piz1: Complex64,
    t1: f64,
    t2: f64,
    freqs: Frequencies,
    coeffs: &PUCoefficients,
    norm: Complex64,
    quad: &GaussHermite,
) -> Result<Complex64> {
    let k1 = kernel_coeffs(t1, freqs)?;
    let k2 = kernel_coeffs(t2, freqs)?;
    let measure = PuMeasure::new(*coeffs);
    let exponent = |u: Complex64, v: Complex64| {
        let s = measure.surface(u, v);
        kernel_exponent(&k2, &KernelArgs::new(x3c, piz3c, s.x, s.piz))
            + kernel_exponent(&k1, &KernelArgs::new(s.x_conj, s.piz_conj, x1, piz1))
    };
    let pre = norm * norm * k1.q * k2.q;
    measure.integrate(|u, v| pre * exponent(u, v).exp(), exponent, quad)
}

pub fn compose_pu(
    x3c: Complex64,
    piz3c: Complex64,
    x1: Complex64,
    piz1: Complex64,
    t1: f64,
    t2: f64,
    freqs: Frequencies,
    coeffs: &PUCoefficients,
    quad: &GaussHermite,
) -> Result<Complex64> {
    let norm = kernel_normalization(freqs);
    compose_pu_with(x3c, piz3c, x1, piz1, t1, t2, freqs, coeffs, norm, quad)
}

/// Solves `𝒩 K̂(3;1) = 𝒩² ∫ dμ K̂(3;2) K̂(2;1)` for `𝒩`, where `K̂` is the
/// kernel with unit normalization.
pub fn fit_normalization(
    args: &KernelArgs,
    t1: f64,
    t2: f64,
    freqs: Frequencies,
    coeffs: &PUCoefficients,
    quad: &GaussHermite,
) -> Result<Complex64> {
    let one = c(1.0);
    let composed = compose_pu_with(
        args.x2c, args.piz2c, args.x1, args.piz1, t1, t2, freqs, coeffs, one, quad,
    )?;
    let direct = kernel_raw(args, t1 + t2, freqs, one)?;
    Ok(direct / composed)
}

/// Relative residuals of `i∂_T K = H K` with `H` realized on the ket
/// variables and on the bra variables (`Π̂x = −i∂_x`, `ẑ = i∂_{Πz}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchrodingerResidual {
    pub ket: f64,
    pub bra: f64,
}

fn d1(f: &dyn Fn(Complex64) -> Complex64, h: f64) -> Complex64 {
    let h = c(h);
    (f(-h * 2.0) - f(-h) * 8.0 + f(h) * 8.0 - f(h * 2.0)) / (h * 12.0)
}

fn d2(f: &dyn Fn(Complex64) -> Complex64, h: f64) -> Complex64 {
    let hc = c(h);
    (-f(-hc * 2.0) + f(-hc) * 16.0 - f(c(0.0)) * 30.0 + f(hc) * 16.0 - f(hc * 2.0)) / (12.0 * h * h)
}

pub fn schrodinger_residual_pu(
    args: &KernelArgs,
    t: f64,
    freqs: Frequencies,
) -> Result<SchrodingerResidual> {
    kernel_coeffs(t - 2.0 * FD_STEP, freqs)?;
    kernel_coeffs(t + 2.0 * FD_STEP, freqs)?;
    let k = |a: &KernelArgs, tt: f64| {
        propagator_pu(a, tt, freqs)
            .map(|v| v.value)
            .unwrap_or_default()
    };
    let k0 = k(args, t);
    let dt = d1(&|s| k(args, t + s.re), FD_STEP);
    let lhs = I * dt;
    let side = |xi: usize, pi: usize| {
        let x = args.to_array()[xi];
        let p = args.to_array()[pi];
        let dpp = d2(&|s| k(&args.shifted(pi, s), t), FD_STEP);
        let dxp = d1(
            &|s| d1(&|r| k(&args.shifted(xi, s).shifted(pi, r), t), FD_STEP),
            FD_STEP,
        );
        // H = −Πz²/2 − (ω1²+ω2²) z²/2 + zΠx + ω1²ω2² x²/2 with z² → −∂²_Π and zΠx → ∂_Π∂_x
        let hk = -p * p * 0.5 * k0
            + dpp * (0.5 * freqs.sum_sq())
            + dxp
            + x * x * (0.5 * freqs.prod_sq()) * k0;
        (lhs - hk).norm() / lhs.norm().max(hk.norm())
    };
    Ok(SchrodingerResidual {
        ket: side(2, 3),
        bra: side(0, 1),
    })
}

/// `exp{(ax − bΠz)P₁ + (−icx + ibΠz)P₂}`.
pub fn change_of_basis_pu(
    p1: f64,
    p2: f64,
    x: Complex64,
    piz: Complex64,
    coeffs: &PUCoefficients,
) -> Complex64 {
    let PUCoefficients { a, b, c: cc, .. } = *coeffs;
    ((x * a - piz * b) * p1 + (-I * x * cc + I * piz * b) * p2).exp()
}

/// `∫ dμ ⟨P|x, Πz⟩ ψ₀(x)` for the constrained ground state.
pub fn ground_state_momentum_transform(
    p1: f64,
    p2: f64,
    freqs: Frequencies,
    coeffs: &PUCoefficients,
    quad: &GaussHermite,
) -> Result<Complex64> {
    let measure = PuMeasure::new(*coeffs);
    let d = freqs.diff_sq();
    let gauss = |u: Complex64, v: Complex64| {
        -(u * u) * (freqs.omega2 * d / 2.0) - v * v * (freqs.omega1 * d / 2.0)
    };
    let f = |u: Complex64, v: Complex64| {
        let s = measure.surface(u, v);
        change_of_basis_pu(p1, p2, s.x, s.piz, coeffs) * gauss(u, v).exp()
    };
    let exponent = |u: Complex64, v: Complex64| {
        let s = measure.surface(u, v);
        gauss(u, v)
            + (s.x * coeffs.a - s.piz * coeffs.b) * p1
            + (-I * s.x * coeffs.c + I * s.piz * coeffs.b) * p2
    };
    measure.integrate(f, exponent, quad)
}

/// Closed form of [`ground_state_momentum_transform`]:
/// `(2π)^{−1}(ω1ω2)^{−1/2} exp{−P₁²/(2ω1) − P₂²/(2ω2)}`.
pub fn ground_state_momentum(p1: f64, p2: f64, freqs: Frequencies) -> f64 {
    (-(p1 * p1) / (2.0 * freqs.omega1) - p2 * p2 / (2.0 * freqs.omega2)).exp()
        / (2.0 * PI * (freqs.omega1 * freqs.omega2).sqrt())
}

/// Linear map from `(x(t₁), Πz(t₁), x†(t₂), Πz†(t₂))` to
/// `(z(t₁), Πx(t₁), z†(t₂), Πx†(t₂))`.
pub fn heisenberg_closure(t: f64, freqs: Frequencies) -> Result<ComplexMatrix4> {
    let (s1, s2) = check_caustic(freqs, t)?;
    let (c1, c2) = ((freqs.omega1 * t).cos(), (freqs.omega2 * t).cos());
    let (w1, w2) = (freqs.omega1, freqs.omega2);
    let (w1s, w2s) = (w1 * w1, w2 * w2);
    let d = (w1s - w2s) * s1 * s2;
    // recurring combinations
    let sc = w2 * s1 * c2 - w1 * c1 * s2;
    let ss = w2 * s1 + w1 * s2;
    let sc2 = w1s * w2 * s1 * c2 - w1 * w2s * c1 * s2;
    let ss2 = w1s * w2 * s1 + w1 * w2s * s2;
    let sc4 = w1s * w1s * w2 * s1 * c2 - w1 * w2s * w2s * c1 * s2;
    let ss4 = w1s * w1s * w2 * s1 + w1 * w2s * w2s * s2;
    let rows = [
        [-sc2, sc, ss2, -ss],
        [-sc4, sc2, ss4, -ss2],
        [-ss2, ss, sc2, -sc],
        [-ss4, ss2, sc4, -sc2],
    ];
    Ok(ComplexMatrix4::from_real(rows.map(|r| r.map(|v| v / d))))
}

/// Export record for the kernel coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffRecord {
    #[serde(rename = "T")]
    pub t: f64,
    pub w1: f64,
    pub w2: f64,
    #[serde(rename = "D")]
    pub d: [f64; 2],
    #[serde(rename = "F")]
    pub f: [f64; 2],
    #[serde(rename = "G")]
    pub g: [f64; 2],
    #[serde(rename = "J")]
    pub j: [f64; 2],
    #[serde(rename = "K")]
    pub k: [f64; 2],
    #[serde(rename = "M")]
    pub m: [f64; 2],
    #[serde(rename = "N")]
    pub n: [f64; 2],
    #[serde(rename = "Q")]
    pub q: [f64; 2],
}

impl CoeffRecord {
    pub fn new(t: f64, freqs: Frequencies, k: &KernelCoeffs) -> Self {
        let p = |z: Complex64| [z.re, z.im];
        Self {
            t,
            w1: freqs.omega1,
            w2: freqs.omega2,
            d: p(k.d),
            f: p(k.f),
            g: p(k.g),
            j: p(k.j),
            k: p(k.k),
            m: p(k.m),
            n: p(k.n),
            q: p(k.q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{compute_coefficients, reality_residual, ComplexPhasePoint, Sign};

    fn sqrt2() -> Frequencies {
        Frequencies::new(2f64.sqrt(), 1.0).unwrap()
    }

    #[test]
    fn spectrum_values() {
        let f = sqrt2();
        assert!((spectrum(0, 0, f) - (2f64.sqrt() + 1.0) / 2.0).abs() < 1e-15);
        assert!((spectrum(1, 0, f) - spectrum(0, 0, f) - 2f64.sqrt()).abs() < 1e-14);
        let t = spectrum_table(f, 10);
        assert!(t.windows(2).all(|w| w[0].energy <= w[1].energy));
        assert_eq!((t[1].m, t[1].n), (0, 1));
        assert!(spectrum_csv(&t).starts_with("m,n,E\n0,0,"));
    }

    #[test]
    fn ground_states() {
        let f = sqrt2();
        assert_eq!(ground_state_xi(0.0, 0.0, f), 1.0);
        assert_eq!(ground_state_constrained(0.0, 0.0, f), 1.0);
        let r = ground_state_residual(f, 5.0, 0.01).unwrap();
        assert!(r < 1e-6, "{r}");
        let k = compute_coefficients(f, Sign::Plus).unwrap();
        for (xr, xi) in [(0.3, -0.7), (1.2, 0.4), (-2.0, 1.5)] {
            let p = PuMeasure::new(k).surface(c(xr), c(xi));
            let xi1 = I * (p.x * k.a - p.piz * k.b);
            let xi2 = p.x * k.c - p.piz * k.b;
            assert!(xi1.im.abs() < 1e-15 && xi2.im.abs() < 1e-15);
            let want = ground_state_xi(xi1.re, xi2.re, f);
            assert!((ground_state_constrained(xr, xi, f) - want).abs() < 1e-12);
        }
        assert!(ground_state_constrained(30.0, 30.0, f) < 1e-100);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn coefficient_values_and_caustics() {
        let f = Frequencies::new(2.0, 1.0).unwrap();
        let k = kernel_coeffs(PI / 3.0, f).unwrap();
        assert!((k.d.re - 9.0 / 4.0).abs() < 1e-14);
        assert!((k.f.re - 3.0 * 3f64.sqrt()).abs() < 1e-14);
        assert!((k.q * k.q * (2.0 * PI / 3.0).sin() * (PI / 3.0).sin() - 1.0).norm() < 1e-14);
        match kernel_coeffs(PI / 2.0, f) {
            Err(Error::Caustic { frequency, .. }) => assert_eq!(frequency, "ω1"),
            other => panic!("{other:?}"),
        }
        match kernel_coeffs(1.5707963, f) {
            Err(Error::Caustic { frequency, .. }) => assert_eq!(frequency, "ω1"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(kernel_coeffs(PI, f), Err(Error::Caustic { .. })));
        // sin(ω1T) sin(ω2T) < 0 gives an imaginary Q
        let k = kernel_coeffs(2.0, f).unwrap();
        assert!(k.q.re.abs() < 1e-15 && k.q.im > 0.0);
    }

    #[test]
    fn kernel_at_origin() {
        let f = sqrt2();
        let zero = c(0.0);
        let t = 0.9;
        let k = propagator_pu(&KernelArgs::new(zero, zero, zero, zero), t, f).unwrap();
        let q = kernel_coeffs(t, f).unwrap().q;
        assert!((k.value - kernel_normalization(f) * q).norm() < 1e-15);
    }

    #[test]
    fn composition_and_normalization() {
        let f = sqrt2();
        let k = compute_coefficients(f, Sign::Plus).unwrap();
        let quad = GaussHermite::new(80).unwrap();
        let args = KernelArgs::new(
            Complex64::new(0.2, -0.1),
            Complex64::new(0.5, 0.1),
            Complex64::new(0.3, 0.2),
            Complex64::new(-0.1, 0.4),
        );
        let got = compose_pu(
            args.x2c, args.piz2c, args.x1, args.piz1, 0.4, 0.7, f, &k, &quad,
        )
        .unwrap();
        let want = propagator_pu(&args, 1.1, f).unwrap().value;
        assert!((got - want).norm() < 1e-10 * want.norm(), "{got} {want}");
        let n = fit_normalization(&args, 0.4, 0.7, f, &k, &quad).unwrap();
        assert!((n - kernel_normalization(f)).norm() < 1e-9);
    }

    #[test]
    fn schrodinger_equation_both_sides() {
        let f = sqrt2();
        let args = KernelArgs::new(
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.3),
            Complex64::new(0.4, -0.2),
            Complex64::new(0.1, 0.5),
        );
        let r = schrodinger_residual_pu(&args, 1.0, f).unwrap();
        assert!(r.ket < 1e-5 && r.bra < 1e-5, "{r:?}");
    }

    #[test]
    fn measure_weight() {
        let k = compute_coefficients(sqrt2(), Sign::Plus).unwrap();
        let m = PuMeasure::new(k);
        let s = m.surface(c(0.4), c(-0.3));
        let w = pu_measure_weight(0.4, -0.3, s.piz.re, s.piz.im, &k);
        assert!((w - m.jacobian()).abs() < 1e-15);
        assert_eq!(
            pu_measure_weight(0.4, -0.3, s.piz.re + 0.1, s.piz.im, &k),
            0.0
        );
        let point = ComplexPhasePoint::new(s.x, c(0.0), c(0.0), s.piz);
        let r = reality_residual(&point, &k);
        // the x and Πz conditions are the ones the surface enforces
        assert!(r.components[0] < 1e-12 && r.components[2] < 1e-12);
    }

    #[test]
    fn ground_state_in_momentum_space() {
        let f = sqrt2();
        let k = compute_coefficients(f, Sign::Plus).unwrap();
        let quad = GaussHermite::new(60).unwrap();
        for (p1, p2) in [(0.0, 0.0), (0.7, -0.4), (-1.3, 1.1)] {
            let got = ground_state_momentum_transform(p1, p2, f, &k, &quad).unwrap();
            let want = ground_state_momentum(p1, p2, f);
            assert!((got - want).norm() < 1e-12, "{got} {want}");
        }
        assert_eq!(change_of_basis_pu(0.0, 0.0, I, c(2.0), &k), c(1.0));
    }

    #[test]
    fn closure_entry() {
        let f = sqrt2();
        let t = 0.83;
        let h = heisenberg_closure(t, f).unwrap();
        let (w1, w2) = (f.omega1, f.omega2);
        let d = (w1 * w1 - w2 * w2) * (w1 * t).sin() * (w2 * t).sin();
        let want =
            (w2 * (w1 * t).sin() * (w2 * t).cos() - w1 * (w1 * t).cos() * (w2 * t).sin()) / d;
        assert!((h[(0, 1)].re - want).abs() < 1e-14);
        assert!(heisenberg_closure(PI / w1, f).is_err());
    }

    #[test]
    fn coefficient_record_json() {
        let f = Frequencies::new(2.0, 1.0).unwrap();
        let r = CoeffRecord::new(1.0, f, &kernel_coeffs(1.0, f).unwrap());
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"D\":[") && s.contains("\"T\":1.0"));
    }
}
