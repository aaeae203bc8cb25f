//! The complexified harmonic oscillator `H = p²/2 + (1 − ε²)q²/2 + iε{p, q}/2`.
//!
//! Eigenfunctions are `ψ_n = e^{εq²/2} φ_n` with `φ_n` the normalized
//! Hermite functions, orthonormal under `dμ = e^{−εq²} dq`. Kernels are
//! closed forms with principal square-root branches; caustics are errors.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{fit_quadratic, hermite_functions, GaussHermite};

/// Highest supported eigenfunction index.
pub const MAX_ORDER: usize = 60;
/// `|sin T|` below this is treated as a caustic.
pub const CAUSTIC_TOLERANCE: f64 = 1e-8;
/// Largest spacing accepted by the finite-difference residual.
pub const MAX_GRID_SPACING: f64 = 0.05;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Deformation parameter, `|ε| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.abs() < 1.0) {
            return Err(Error::InvalidEpsilon(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn positive(self) -> Result<f64> {
        if self.0 > 0.0 {
            Ok(self.0)
        } else {
            Err(Error::NonpositiveEpsilon(self.0))
        }
    }
}

pub fn energy(n: usize) -> f64 {
    n as f64 + 0.5
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge { n, max: MAX_ORDER });
    }
    Ok(())
}

/// `ψ_n(q) = e^{εq²/2} φ_n(q)`.
pub fn psi_n(n: usize, eps: Epsilon, q: f64) -> Result<f64> {
    check_order(n)?;
    Ok(hermite_functions(n, q)[n] * (0.5 * eps.0 * q * q).exp())
}

/// A wave function together with the Gaussian decay rate `κ` of `|f| ~ e^{−κq²}`,
/// which fixes the quadrature scaling.
#[derive(Clone)]
pub struct WaveFn {
    decay: f64,
    eval: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for WaveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveFn")
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

impl WaveFn {
    pub fn new<F: Fn(f64) -> Complex64 + Send + Sync + 'static>(decay: f64, eval: F) -> Self {
        Self {
            decay,
            eval: Arc::new(eval),
        }
    }

    pub fn eigen(n: usize, eps: Epsilon) -> Result<Self> {
        check_order(n)?;
        let e = eps.0;
        Ok(Self::new(0.5 * (1.0 - e), move |q| {
            c(hermite_functions(n, q)[n] * (0.5 * e * q * q).exp())
        }))
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        (self.eval)(q)
    }
}

/// `⟨f|g⟩_μ = ∫ e^{−εq²} f*(q) g(q) dq`.
pub fn inner_product_mu(
    f: &WaveFn,
    g: &WaveFn,
    eps: Epsilon,
    quad: &GaussHermite,
) -> Result<Complex64> {
    let alpha = f.decay + g.decay + eps.0;
    if !(alpha > 0.0) {
        return Err(Error::QuadratureDivergence { exponent: -alpha });
    }
    quad.integrate_gaussian(
        |q| f.eval(q).conj() * g.eval(q) * (-eps.0 * q * q).exp(),
        alpha,
        0.0,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridKind {
    Uniform {
        spacing: f64,
    },
    /// Weights integrate `∫ h(q) dq` directly.
    GaussHermite {
        weights: Vec<f64>,
    },
}

/// Samples of a function on a fixed grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<Complex64>,
    kind: GridKind,
}

/// Uniform grid `lo, lo + h, …, hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub lo: f64,
    pub hi: f64,
    pub spacing: f64,
}

impl UniformGrid {
    pub fn new(lo: f64, hi: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) || !(hi > lo) {
            return Err(Error::InvalidConfig(format!(
                "grid [{lo}, {hi}] with spacing {spacing}"
            )));
        }
        Ok(Self { lo, hi, spacing })
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.spacing + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.lo + k as f64 * self.spacing)
            .collect()
    }

    fn require_fine(&self) -> Result<()> {
        if self.len() < 5 || self.spacing > MAX_GRID_SPACING {
            return Err(Error::GridTooCoarse(format!(
                "{} nodes at spacing {} (need ≥ 5 nodes and spacing ≤ {MAX_GRID_SPACING})",
                self.len(),
                self.spacing
            )));
        }
        Ok(())
    }
}

impl GridFunction {
    pub fn sample_uniform<F: Fn(f64) -> Complex64>(grid: UniformGrid, f: F) -> Self {
        let nodes = grid.nodes();
        let values = nodes.iter().map(|&q| f(q)).collect();
        Self {
            nodes,
            values,
            kind: GridKind::Uniform {
                spacing: grid.spacing,
            },
        }
    }

    /// Samples at Gauss-Hermite nodes scaled for decay `e^{−αq²}`.
    pub fn sample_gauss_hermite<F: Fn(f64) -> Complex64>(
        quad: &GaussHermite,
        alpha: f64,
        f: F,
    ) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::QuadratureDivergence { exponent: -alpha });
        }
        let s = alpha.sqrt();
        let nodes: Vec<f64> = quad.nodes().iter().map(|u| u / s).collect();
        let weights = quad.scaled_weights().iter().map(|w| w / s).collect();
        let values = nodes.iter().map(|&q| f(q)).collect();
        Ok(Self {
            nodes,
            values,
            kind: GridKind::GaussHermite { weights },
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn kind(&self) -> &GridKind {
        &self.kind
    }

    fn weights(&self) -> Vec<f64> {
        match &self.kind {
            GridKind::GaussHermite { weights } => weights.clone(),
            GridKind::Uniform { spacing } => {
                let n = self.nodes.len();
                (0..n)
                    .map(|k| {
                        if k == 0 || k + 1 == n {
                            0.5 * spacing
                        } else {
                            *spacing
                        }
                    })
                    .collect()
            }
        }
    }

    /// `⟨self|other⟩_μ` on a shared grid.
    pub fn inner_product_mu(&self, other: &Self, eps: Epsilon) -> Result<Complex64> {
        if self.nodes != other.nodes || self.kind != other.kind {
            return Err(Error::DimensionMismatch {
                expected: self.nodes.len(),
                found: other.nodes.len(),
            });
        }
        Ok(self
            .weights()
            .iter()
            .zip(&self.nodes)
            .zip(self.values.iter().zip(&other.values))
            .map(|((w, q), (f, g))| f.conj() * g * (w * (-eps.0 * q * q).exp()))
            .sum())
    }

    /// `q,re,im` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,re,im\n");
        for (q, v) in self.nodes.iter().zip(&self.values) {
            out.push_str(&format!("{q},{},{}\n", v.re, v.im));
        }
        out
    }
}

/// Fourth-order central first and second derivatives of `f` at `q`.
pub(crate) fn derivatives4<F: Fn(f64) -> f64>(f: &F, q: f64, h: f64) -> (f64, f64, f64) {
    let (m2, m1, z, p1, p2) = (f(q - 2.0 * h), f(q - h), f(q), f(q + h), f(q + 2.0 * h));
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
    (z, d1, d2)
}

/// Max over the grid of `|ψ'' − 2εqψ' − ((1 − ε²)q² + ε − 2E_n)ψ|`.
pub fn schrodinger_residual_c(n: usize, eps: Epsilon, grid: UniformGrid) -> Result<f64> {
    check_order(n)?;
    grid.require_fine()?;
    let e = eps.0;
    let psi = |q: f64| hermite_functions(n, q)[n] * (0.5 * e * q * q).exp();
    let en = energy(n);
    Ok(grid
        .nodes()
        .into_iter()
        .map(|q| {
            let (v, d1, d2) = derivatives4(&psi, q, grid.spacing);
            (d2 - 2.0 * e * q * d1 - ((1.0 - e * e) * q * q + e - 2.0 * en) * v).abs()
        })
        .fold(0.0, f64::max))
}

/// A kernel value and the square-root branch used for its prefactor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub branch_note: String,
}

fn principal_note(label: &str, z: Complex64) -> String {
    format!("principal sqrt of {label}, arg = {:.12}", z.arg())
}

fn caustic_check(sin_t: Complex64, t: f64) -> Result<()> {
    if sin_t.norm() < CAUSTIC_TOLERANCE {
        return Err(Error::Caustic {
            frequency: "ω",
            omega: 1.0,
            t,
            sine: sin_t.norm(),
        });
    }
    Ok(())
}

fn mehler(q2: Complex64, q1: Complex64, t: Complex64) -> Result<(Complex64, Complex64)> {
    let s = t.sin();
    caustic_check(s, t.re)?;
    let pre_arg = I * s * (2.0 * PI);
    let pre = pre_arg.sqrt().inv();
    let exponent = I * ((q2 * q2 + q1 * q1) * t.cos() - q2 * q1 * 2.0) / (s * 2.0);
    Ok((pre * exponent.exp(), pre_arg))
}

/// `e^{ε(q₂² − q₁²)/2}`.
pub fn boundary_factor(q2: Complex64, q1: Complex64, eps: Epsilon) -> Complex64 {
    ((q2 * q2 - q1 * q1) * (0.5 * eps.0)).exp()
}

/// `⟨q₂, t₂|q₁, t₁⟩` for real `T = t₂ − t₁`.
pub fn propagator_q(q2: f64, q1: f64, t: f64, eps: Epsilon) -> Result<KernelValue> {
    let (base, arg) = mehler(c(q2), c(q1), c(t))?;
    Ok(KernelValue {
        value: base * boundary_factor(c(q2), c(q1), eps),
        branch_note: principal_note("2πi·sin T", arg),
    })
}

/// Analytic continuation of [`propagator_q`] to complex endpoints and
/// complex time; `T = −iτ` gives the Euclidean kernel.
pub fn propagator_q_complex(
    q2: Complex64,
    q1: Complex64,
    t: Complex64,
    eps: Epsilon,
) -> Result<Complex64> {
    Ok(mehler(q2, q1, t)?.0 * boundary_factor(q2, q1, eps))
}

/// `∫ dq K(q₂, q; T₂) K(q, q₁; T₁)` along a rotated contour.
pub fn compose_q(
    q2: f64,
    q1: f64,
    t1: f64,
    t2: f64,
    eps: Epsilon,
    quad: &GaussHermite,
) -> Result<Complex64> {
    let k = |a: Complex64, b: Complex64, t: f64| propagator_q_complex(a, b, c(t), eps);
    // both factors are caustic-free iff these are
    k(c(0.0), c(0.0), t1)?;
    k(c(0.0), c(0.0), t2)?;
    let exponent = |q: Complex64| {
        let e2 = I * ((c(q2 * q2) + q * q) * t2.cos() - q * (2.0 * q2)) / (2.0 * t2.sin());
        let e1 = I * ((q * q + c(q1 * q1)) * t1.cos() - q * (2.0 * q1)) / (2.0 * t1.sin());
        e2 + e1
    };
    let (a, center) = fit_quadratic(exponent);
    quad.integrate_contour(
        |q| k(c(q2), q, t2).unwrap_or_default() * k(q, c(q1), t1).unwrap_or_default(),
        a,
        center,
    )
}

/// `(ε² + 1) sin T − 2iε cos T`.
pub fn momentum_denominator(t: f64, eps: Epsilon) -> Complex64 {
    let e = eps.0;
    Complex64::new((e * e + 1.0) * t.sin(), -2.0 * e * t.cos())
}

/// `⟨p₂*, t₂|p₁, t₁⟩`.
pub fn propagator_p(p2c: Complex64, p1: Complex64, t: f64, eps: Epsilon) -> Result<KernelValue> {
    let den = momentum_denominator(t, eps);
    if den.norm() < CAUSTIC_TOLERANCE {
        return Err(Error::SingularDenominator { t });
    }
    let e = eps.0;
    let pre = (I * (2.0 * PI)).sqrt().inv() * den.sqrt().inv();
    let tw = Complex64::new(t.cos(), e * t.sin());
    let exponent = I * 0.5 * (tw * (p2c * p2c + p1 * p1) - p2c * p1 * 2.0) / den;
    Ok(KernelValue {
        value: pre * exponent.exp(),
        branch_note: principal_note("(ε²+1)·sin T − 2iε·cos T", den),
    })
}

/// `⟨P|p⟩ = (2πε)^{−1/2} e^{−(p − P)²/(2ε)}`.
pub fn basis_bracket_pp(big_p: f64, p: Complex64, eps: Epsilon) -> Result<Complex64> {
    let e = eps.positive()?;
    let d = p - big_p;
    Ok((-(d * d) / (2.0 * e)).exp() / (2.0 * PI * e).sqrt())
}

/// Momentum kernel rebuilt from the Hermitian-variable oscillator kernel:
/// `∫∫ dP dP' ⟨p₂*|P'⟩ K_HO(P', P) ⟨P|p₁⟩`.
pub fn propagator_p_via_transform(
    p2c: Complex64,
    p1: Complex64,
    t: f64,
    eps: Epsilon,
    quad: &GaussHermite,
) -> Result<Complex64> {
    let e = eps.positive()?;
    let alpha = 1.0 / (2.0 * e);
    let zero = Epsilon(0.0);
    propagator_q(0.0, 0.0, t, zero)?;
    quad.integrate_gaussian(
        |pp| {
            let left = basis_bracket_pp(pp, p2c, eps).unwrap_or_default();
            let inner = quad
                .integrate_gaussian(
                    |pq| {
                        let k = propagator_q(pp, pq, t, zero)
                            .map(|v| v.value)
                            .unwrap_or_default();
                        k * basis_bracket_pp(pq, p1, eps).unwrap_or_default()
                    },
                    alpha,
                    p1.re,
                )
                .unwrap_or_default();
            left * inner
        },
        alpha,
        p2c.re,
    )
}

/// `μ(p, p*) = (πε)^{−1/2} e^{(p − p*)²/(4ε)} = (πε)^{−1/2} e^{−(Im p)²/ε}`.
pub fn completeness_measure_p(p: Complex64, eps: Epsilon) -> Result<f64> {
    let e = eps.positive()?;
    Ok((-(p.im * p.im) / e).exp() / (PI * e).sqrt())
}

/// Gaussian test state `e^{−(P − center)²/(2σ²)}` in the Hermitian momentum
/// representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub center: f64,
    pub width: f64,
}

impl GaussianState {
    pub fn eval(&self, p: Complex64) -> Complex64 {
        let d = p - self.center;
        (-(d * d) / (2.0 * self.width * self.width)).exp()
    }

    /// `∫ f̄(P) ⟨P|p⟩ dP`, with `f̄` continued holomorphically.
    fn overlap(&self, p: Complex64, eps: Epsilon, quad: &GaussHermite) -> Result<Complex64> {
        let e = eps.positive()?;
        let s2 = self.width * self.width;
        let quadc = c(-0.5 / s2 - 0.5 / e);
        let center = (c(self.center / s2) + p / e) / (1.0 / s2 + 1.0 / e);
        quad.integrate_contour(
            |big_p| self.eval(big_p) * basis_bracket_pp_c(big_p, p, e),
            quadc,
            center,
        )
    }
}

fn basis_bracket_pp_c(big_p: Complex64, p: Complex64, e: f64) -> Complex64 {
    let d = p - big_p;
    (-(d * d) / (2.0 * e)).exp() / (2.0 * PI * e).sqrt()
}

/// Both sides of `∫ d²p μ ⟨f|p⟩⟨p*|g⟩ = ⟨f|g⟩` for real-centred Gaussian
/// test states.
pub fn completeness_check(
    f: GaussianState,
    g: GaussianState,
    eps: Epsilon,
    quad: &GaussHermite,
) -> Result<(Complex64, Complex64)> {
    let e = eps.positive()?;
    let s2 = f.width.max(g.width).powi(2);
    let alpha_u = 1.0 / (s2 + e);
    let alpha_v = 1.0 / e - 1.0 / (f.width.min(g.width).powi(2) + e);
    if !(alpha_v > 0.0) {
        return Err(Error::QuadratureDivergence { exponent: -alpha_v });
    }
    let mid = 0.5 * (f.center + g.center);
    let lhs = quad.integrate_gaussian(
        |u| {
            quad.integrate_gaussian(
                |v| {
                    let p = Complex64::new(u, v);
                    let mu = completeness_measure_p(p, eps).unwrap_or_default();
                    let left = f.overlap(p, eps, quad).unwrap_or_default();
                    // ⟨p*|g⟩ = conj of ⟨g|p⟩ for the real-centred g
                    let right = g.overlap(p, eps, quad).unwrap_or_default().conj();
                    left * right * mu
                },
                alpha_v,
                0.0,
            )
            .unwrap_or_default()
        },
        alpha_u,
        mid,
    )?;
    let rhs = quad.integrate_contour(
        |big_p| f.eval(big_p) * g.eval(big_p),
        c(-0.5 / f.width.powi(2) - 0.5 / g.width.powi(2)),
        c((f.center / f.width.powi(2) + g.center / g.width.powi(2))
            / (1.0 / f.width.powi(2) + 1.0 / g.width.powi(2))),
    )?;
    Ok((lhs, rhs))
}

/// Time-sliced Gaussian path integral of the reduced oscillator action, with
/// the potential averaged over the two ends of each slice, times the
/// boundary factor from the `−iεqq̇` term. Converges as `O(1/N²)`.
pub fn path_integral_kernel(
    q2: f64,
    q1: f64,
    t: f64,
    eps: Epsilon,
    slices: usize,
) -> Result<Complex64> {
    if slices < 2 {
        return Err(Error::InvalidConfig(format!(
            "path integral needs at least 2 slices, got {slices}"
        )));
    }
    caustic_check(c(t.sin()), t)?;
    let n = slices;
    let d = t / n as f64;
    let diag = 2.0 / d - d;
    let off = -1.0 / d;
    // LDLᵀ of the (n−1)×(n−1) tridiagonal action matrix
    let mut log_det = 0.0;
    let (mut pos, mut neg) = (0i64, 0i64);
    let mut quad_form = 0.0;
    let mut prev_d = 0.0;
    let mut prev_y = 0.0;
    for k in 1..n {
        let dk = if k == 1 {
            diag
        } else {
            diag - off * off / prev_d
        };
        let mut jk = 0.0;
        if k == 1 {
            jk += off * q1;
        }
        if k == n - 1 {
            jk += off * q2;
        }
        let yk = if k == 1 {
            jk
        } else {
            jk - off / prev_d * prev_y
        };
        if dk == 0.0 {
            return Err(Error::Caustic {
                frequency: "ω",
                omega: 1.0,
                t,
                sine: t.sin().abs(),
            });
        }
        quad_form += yk * yk / dk;
        log_det += dk.abs().ln();
        if dk > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
        prev_d = dk;
        prev_y = yk;
    }
    let nf = n as f64;
    let c0 = (q1 * q1 + q2 * q2) * (1.0 / (2.0 * d) - d / 4.0);
    let log_mag =
        -0.5 * nf * (2.0 * PI * d).ln() + 0.5 * (nf - 1.0) * (2.0 * PI).ln() - 0.5 * log_det;
    let phase = -PI * nf / 4.0 + PI * (pos - neg) as f64 / 4.0 + c0 - 0.5 * quad_form;
    Ok(Complex64::from_polar(log_mag.exp(), phase) * boundary_factor(c(q2), c(q1), eps))
}

/// Heisenberg flow `(q, p)(t₁ + T) = U(T)·(q, p)(t₁)`; `U = cos T + sin T·A`
/// since `A² = −1`.
pub fn heisenberg_flow(t: f64, eps: Epsilon) -> [[Complex64; 2]; 2] {
    let e = eps.0;
    let (s, co) = (t.sin(), t.cos());
    [
        [Complex64::new(co, e * s), c(s)],
        [c(-(1.0 - e * e) * s), Complex64::new(co, -e * s)],
    ]
}

/// `[q(t₁), q(t₂)]` from the flow and `[q, p] = i`.
pub fn commutator_qq(t1: f64, t2: f64) -> Complex64 {
    // the p-coefficient of q(t₂) does not depend on ε
    I * heisenberg_flow(t2 - t1, Epsilon(0.0))[0][1]
}

/// Export record for a coordinate-kernel evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelRecord {
    pub q1: f64,
    pub q2: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub eps: f64,
    pub re: f64,
    pub im: f64,
    pub branch_note: String,
}

impl KernelRecord {
    pub fn new(q2: f64, q1: f64, t: f64, eps: Epsilon, k: &KernelValue) -> Self {
        Self {
            q1,
            q2,
            t,
            eps: eps.0,
            re: k.value.re,
            im: k.value.im,
            branch_note: k.branch_note.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    #[test]
    fn epsilon_domain() {
        assert!(Epsilon::new(0.99).is_ok());
        assert!(matches!(Epsilon::new(1.0), Err(Error::InvalidEpsilon(_))));
        assert!(Epsilon::new(f64::NAN).is_err());
    }

    #[test]
    fn eigenfunction_values() {
        assert!((psi_n(0, eps(0.0), 0.0).unwrap() - PI.powf(-0.25)).abs() < 1e-15);
        assert_eq!(psi_n(1, eps(0.4), 0.0).unwrap(), 0.0);
        let want = PI.powf(-0.25) * 0.15f64.exp() * (-0.5f64).exp();
        assert!((psi_n(0, eps(0.3), 1.0).unwrap() - want).abs() < 1e-15);
        assert!(matches!(
            psi_n(61, eps(0.0), 0.0),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn orthonormal_under_modified_measure() {
        let quad = GaussHermite::new(200).unwrap();
        for e in [0.0, 0.4, -0.3] {
            for (n, m) in [(0, 0), (0, 1), (3, 3), (2, 4), (10, 10)] {
                let ip = inner_product_mu(
                    &WaveFn::eigen(n, eps(e)).unwrap(),
                    &WaveFn::eigen(m, eps(e)).unwrap(),
                    eps(e),
                    &quad,
                )
                .unwrap();
                let want = if n == m { 1.0 } else { 0.0 };
                assert!((ip - want).norm() < 1e-12, "ε={e} ({n},{m}) {ip}");
            }
        }
    }

    #[test]
    fn divergent_inner_product_is_rejected() {
        let quad = GaussHermite::new(20).unwrap();
        let grow = WaveFn::new(-0.5, |q| c((0.5 * q * q).exp()));
        assert!(matches!(
            inner_product_mu(&grow, &grow, eps(0.1), &quad),
            Err(Error::QuadratureDivergence { .. })
        ));
    }

    #[test]
    fn grid_functions_agree_with_callables() {
        let quad = GaussHermite::new(80).unwrap();
        let e = eps(0.3);
        let psi = |n: usize| move |q: f64| c(psi_n(n, Epsilon(0.3), q).unwrap());
        let f = GridFunction::sample_gauss_hermite(&quad, 0.5 * (1.0 - 0.3), psi(2)).unwrap();
        let g = GridFunction::sample_gauss_hermite(&quad, 0.5 * (1.0 - 0.3), psi(2)).unwrap();
        assert!((f.inner_product_mu(&g, e).unwrap() - 1.0).norm() < 1e-10);
        let grid = UniformGrid::new(-8.0, 8.0, 0.01).unwrap();
        let u = GridFunction::sample_uniform(grid, psi(1));
        assert!((u.inner_product_mu(&u, e).unwrap() - 1.0).norm() < 1e-10);
        assert!(u.to_csv().starts_with("q,re,im\n-8,"));
        assert!(f.inner_product_mu(&u, e).is_err());
    }

    #[test]
    fn schrodinger_residuals() {
        let grid = UniformGrid::new(-6.0, 6.0, 0.01).unwrap();
        for (n, e) in [(0, 0.0), (0, 0.3), (2, 0.5), (5, -0.4)] {
            let r = schrodinger_residual_c(n, eps(e), grid).unwrap();
            assert!(r < 1e-6, "n={n} ε={e} {r}");
        }
        let coarse = UniformGrid::new(-6.0, 6.0, 0.1).unwrap();
        assert!(matches!(
            schrodinger_residual_c(0, eps(0.0), coarse),
            Err(Error::GridTooCoarse(_))
        ));
        let short = UniformGrid::new(0.0, 0.03, 0.01).unwrap();
        assert!(matches!(
            schrodinger_residual_c(0, eps(0.0), short),
            Err(Error::GridTooCoarse(_))
        ));
    }

    #[test]
    fn coordinate_kernel_values() {
        let k = propagator_q(0.0, 0.0, PI / 2.0, eps(0.0)).unwrap();
        let want = (I * 2.0 * PI).sqrt().inv();
        assert!((k.value - want).norm() < 1e-15);
        assert!(k.branch_note.contains("principal"));
        assert!(matches!(
            propagator_q(0.1, 0.2, PI, eps(0.0)),
            Err(Error::Caustic { .. })
        ));
        let (q2, q1, t) = (0.7, -0.4, 1.1);
        let a = propagator_q(q2, q1, t, eps(0.3)).unwrap().value;
        let b =
            propagator_q(q2, q1, t, eps(0.0)).unwrap().value * (0.15 * (q2 * q2 - q1 * q1)).exp();
        assert!((a - b).norm() <= 1e-15 * a.norm());
    }

    #[test]
    fn coordinate_kernel_composes() {
        let quad = GaussHermite::new(120).unwrap();
        for (t1, t2, e) in [(0.4, 0.7, 0.0), (0.9, 1.3, 0.3), (0.5, 2.2, -0.2)] {
            let got = compose_q(0.6, -0.3, t1, t2, eps(e), &quad).unwrap();
            let want = propagator_q(0.6, -0.3, t1 + t2, eps(e)).unwrap().value;
            assert!((got - want).norm() < 1e-10 * want.norm(), "{got} {want}");
        }
    }

    #[test]
    fn momentum_kernel_closed_form() {
        let k = propagator_p(c(0.0), c(0.0), PI / 2.0, eps(0.3))
            .unwrap()
            .value;
        let want = (I * 2.0 * PI).sqrt().inv() / (1.09f64).sqrt();
        assert!((k - want).norm() < 1e-15);
        let quad = GaussHermite::new(120).unwrap();
        for (p2, p1, t, e) in [
            (c(0.4), c(-0.2), 1.0, 0.3),
            (
                Complex64::new(0.1, 0.2),
                Complex64::new(0.3, -0.1),
                0.6,
                0.5,
            ),
        ] {
            let direct = propagator_p(p2, p1, t, eps(e)).unwrap().value;
            let via = propagator_p_via_transform(p2, p1, t, eps(e), &quad).unwrap();
            assert!((direct - via).norm() < 1e-10, "{direct} {via}");
        }
    }

    #[test]
    fn momentum_kernel_short_time_smooths() {
        // at T → 0 the kernel is a normalized Gaussian of variance 2ε
        let quad = GaussHermite::new(60).unwrap();
        let (e, t, p2) = (0.2, 1e-7, 0.7);
        let got = quad
            .integrate_gaussian(
                |p1| propagator_p(c(p2), c(p1), t, eps(e)).unwrap().value * (p1 * p1),
                1.0 / (4.0 * e),
                p2,
            )
            .unwrap();
        assert!((got - (p2 * p2 + 2.0 * e)).norm() < 1e-6, "{got}");
    }

    #[test]
    fn brackets_and_measure() {
        assert!(
            (basis_bracket_pp(1.0, c(1.0), eps(0.5)).unwrap() - 1.0 / PI.sqrt()).norm() < 1e-15
        );
        let want = (-1.0f64).exp() / PI.sqrt();
        assert!((basis_bracket_pp(0.0, c(1.0), eps(0.5)).unwrap() - want).norm() < 1e-15);
        assert!(matches!(
            basis_bracket_pp(0.0, c(0.0), eps(0.0)),
            Err(Error::NonpositiveEpsilon(_))
        ));
        assert!(
            (completeness_measure_p(c(2.0), eps(0.4)).unwrap() - (PI * 0.4).sqrt().recip()).abs()
                < 1e-15
        );
        let mu = completeness_measure_p(I, Epsilon(0.99)).unwrap();
        assert!((mu - (-1.0 / 0.99f64).exp() / (PI * 0.99).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn completeness_by_quadrature() {
        let quad = GaussHermite::new(60).unwrap();
        let f = GaussianState {
            center: 0.3,
            width: 0.8,
        };
        let g = GaussianState {
            center: -0.2,
            width: 0.8,
        };
        let (lhs, rhs) = completeness_check(f, g, eps(0.4), &quad).unwrap();
        assert!((lhs - rhs).norm() < 1e-8 * rhs.norm(), "{lhs} {rhs}");
    }

    #[test]
    fn path_integral_converges() {
        let exact = propagator_q(1.0, 0.0, 1.0, eps(0.0)).unwrap().value;
        let errs: Vec<f64> = [2, 4, 8, 16, 1000]
            .iter()
            .map(|&n| (path_integral_kernel(1.0, 0.0, 1.0, eps(0.0), n).unwrap() - exact).norm())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(errs[4] < 1e-4);
        let ratio = errs[2] / errs[3];
        assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
        for n in [2, 7, 50] {
            let a = path_integral_kernel(0.8, -0.5, 1.3, eps(0.3), n).unwrap();
            let b = path_integral_kernel(0.8, -0.5, 1.3, eps(0.0), n).unwrap();
            assert!((a / b - (0.15 * (0.64 - 0.25f64)).exp()).norm() < 1e-13);
        }
        assert!(path_integral_kernel(1.0, 0.0, 1.0, eps(0.0), 1).is_err());
    }

    #[test]
    fn path_integral_past_first_caustic() {
        // the sliced integral keeps the Maslov phase that the principal
        // branch of the closed form drops: one caustic flips the sign
        let exact = propagator_q(0.3, 0.2, 4.0, eps(0.0)).unwrap().value;
        let got = path_integral_kernel(0.3, 0.2, 4.0, eps(0.0), 2000).unwrap();
        assert!((got + exact).norm() < 1e-4, "{got} {exact}");
    }

    #[test]
    fn commutator() {
        assert_eq!(commutator_qq(0.3, 0.3), Complex64::new(0.0, 0.0));
        assert!((commutator_qq(0.0, PI / 2.0) - I).norm() < 1e-15);
        assert!((commutator_qq(1.0, 1.0 + PI / 6.0) - I * 0.5).norm() < 1e-15);
    }

    #[test]
    fn flow_matches_heisenberg_equations() {
        let e = eps(0.35);
        let t = 0.8;
        let h = 1e-5;
        let u = heisenberg_flow(t, e);
        let up = heisenberg_flow(t + h, e);
        let um = heisenberg_flow(t - h, e);
        let a = [
            [Complex64::new(0.0, 0.35), c(1.0)],
            [c(-(1.0 - 0.35 * 0.35)), Complex64::new(0.0, -0.35)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                let d = (up[i][j] - um[i][j]) / (2.0 * h);
                let au = a[i][0] * u[0][j] + a[i][1] * u[1][j];
                assert!((d - au).norm() < 1e-9);
            }
        }
    }
}
