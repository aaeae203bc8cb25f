//! Classical PU dynamics.
//!
//! The first-order system is
//!
//! ```text
//! ẋ = z,  ż = −Πz,  Π̇x = −ω1²ω2² x,  Π̇z = (ω1² + ω2²) z − Πx
//! ```
//!
//! and `x(t)` is a superposition of `e^{±iω1 t}` and `e^{±iω2 t}`.

use std::fmt::Write as _;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix4;
use crate::transform::{to_real, ComplexPhasePoint, Frequencies, PUCoefficients, RealPhasePoint};

/// Stability guard on `dt · max(ω)`.
pub const STEP_GUARD: f64 = 0.5;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Mode amplitudes of `x(t) = C1 e^{iω1t} + C2 e^{−iω1t} + C3 e^{iω2t} + C4 e^{−iω2t}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneralSolutionCoeffs {
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
    pub c4: Complex64,
}

impl GeneralSolutionCoeffs {
    pub fn new(c1: Complex64, c2: Complex64, c3: Complex64, c4: Complex64) -> Self {
        Self { c1, c2, c3, c4 }
    }

    /// Fit the amplitudes to the phase point `x0` at time zero.
    pub fn from_initial(x0: &ComplexPhasePoint, freqs: Frequencies) -> Result<Self> {
        if freqs.is_degenerate() {
            return Err(Error::DegenerateFrequencies {
                gap: (freqs.omega1 - freqs.omega2).abs(),
            });
        }
        let (w1, w2) = (freqs.omega1, freqs.omega2);
        let gap = freqs.diff_sq();
        // x = S1 + S2, Πz = ω1² S1 + ω2² S2, z = Z1 + Z2, Πx = ω2² Z1 + ω1² Z2
        let s1 = (x0.piz - x0.x * (w2 * w2)) / gap;
        let s2 = x0.x - s1;
        let z1 = (x0.z * (w1 * w1) - x0.pix) / gap;
        let z2 = x0.z - z1;
        let d1 = z1 / (I * w1);
        let d2 = z2 / (I * w2);
        Ok(Self {
            c1: (s1 + d1) * 0.5,
            c2: (s1 - d1) * 0.5,
            c3: (s2 + d2) * 0.5,
            c4: (s2 - d2) * 0.5,
        })
    }

    /// `k`-th time derivative of `x` at `t`.
    pub fn derivative(&self, freqs: Frequencies, t: f64, k: u32) -> Complex64 {
        let mode = |c: Complex64, w: f64| {
            let lam = I * w;
            c * lam.powu(k) * (lam * t).exp()
        };
        mode(self.c1, freqs.omega1)
            + mode(self.c2, -freqs.omega1)
            + mode(self.c3, freqs.omega2)
            + mode(self.c4, -freqs.omega2)
    }

    /// The full phase point at time `t`.
    pub fn state_at(&self, freqs: Frequencies, t: f64) -> ComplexPhasePoint {
        let x = self.derivative(freqs, t, 0);
        let xd = self.derivative(freqs, t, 1);
        let xdd = self.derivative(freqs, t, 2);
        let xddd = self.derivative(freqs, t, 3);
        ComplexPhasePoint {
            x,
            z: xd,
            pix: xd * freqs.sum_sq() + xddd,
            piz: -xdd,
        }
    }
}

pub fn general_solution(coeffs: &GeneralSolutionCoeffs, freqs: Frequencies, t: f64) -> Complex64 {
    coeffs.derivative(freqs, t, 0)
}

/// `x⁗ + (ω1²+ω2²)ẍ + ω1²ω2² x` for the closed-form solution.
pub fn ode_residual(coeffs: &GeneralSolutionCoeffs, freqs: Frequencies, t: f64) -> f64 {
    (coeffs.derivative(freqs, t, 4)
        + coeffs.derivative(freqs, t, 2) * freqs.sum_sq()
        + coeffs.derivative(freqs, t, 0) * freqs.prod_sq())
    .norm()
}

/// Fixed-step one-step method for the linear flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// Two-stage Gauss-Legendre (implicit, order 4, symplectic).
    #[default]
    GaussLegendre4,
    /// Classical explicit Runge-Kutta of order 4.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps: usize,
    pub scheme: Scheme,
}

impl IntegratorConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self {
            dt,
            steps,
            scheme: Scheme::default(),
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// `dt = T_min / per_period`, run for `periods` periods of the fast mode.
    pub fn periods(freqs: Frequencies, per_period: usize, periods: usize) -> Self {
        let t_min = 2.0 * std::f64::consts::PI / freqs.max();
        Self::new(t_min / per_period as f64, per_period * periods)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexPhasePoint>,
    pub config: IntegratorConfig,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Oscillator coordinates `M⁻¹X` of every sample (real parts).
    pub fn xi_projection(&self, coeffs: &PUCoefficients) -> Vec<RealPhasePoint> {
        self.states
            .iter()
            .map(|s| to_real(s, coeffs).point)
            .collect()
    }

    /// Largest `|H_PU(X(t)) − H_PU(X(0))|`.
    pub fn energy_drift(&self, freqs: Frequencies) -> f64 {
        let Some(first) = self.states.first() else {
            return 0.0;
        };
        let h0 = hamiltonian_pu(first, freqs);
        self.states
            .iter()
            .map(|s| (hamiltonian_pu(s, freqs) - h0).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the oscillator image from the exact decoupled
    /// solutions `ξ̈_k = −ω_k² ξ_k` started at `xi0`.
    pub fn decoupled_deviation(
        &self,
        xi0: &RealPhasePoint,
        freqs: Frequencies,
        coeffs: &PUCoefficients,
    ) -> f64 {
        let exact = |w: f64, q: f64, p: f64, t: f64| {
            let (s, c) = ((w * t).sin(), (w * t).cos());
            (q * c + p / w * s, -w * q * s + p * c)
        };
        self.times
            .iter()
            .zip(self.xi_projection(coeffs))
            .map(|(&t, xi)| {
                let (q1, p1) = exact(freqs.omega1, xi0.xi1, xi0.p1, t);
                let (q2, p2) = exact(freqs.omega2, xi0.xi2, xi0.p2, t);
                xi.max_abs_diff(&RealPhasePoint::new(q1, q2, p1, p2))
            })
            .fold(0.0, f64::max)
    }

    /// CSV with the complex phase point, its oscillator image and `H_PU`.
    pub fn to_csv(&self, freqs: Frequencies, coeffs: &PUCoefficients) -> String {
        let mut out = String::from(
            "t,x_re,x_im,z_re,z_im,pix_re,pix_im,piz_re,piz_im,xi1,xi2,p1,p2,h_re,h_im\n",
        );
        for (t, s) in self.times.iter().zip(&self.states) {
            let xi = to_real(s, coeffs).point;
            let h = hamiltonian_pu(s, freqs);
            let _ = writeln!(
                out,
                "{t:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                s.x.re, s.x.im, s.z.re, s.z.im, s.pix.re, s.pix.im, s.piz.re, s.piz.im,
                xi.xi1, xi.xi2, xi.p1, xi.p2, h.re, h.im
            );
        }
        out
    }
}

/// Generator of the linear flow on `(x, z, Πx, Πz)`.
pub fn system_matrix(freqs: Frequencies) -> Matrix4<f64> {
    Matrix4::new(
        0.0,
        1.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        -1.0,
        -freqs.prod_sq(),
        0.0,
        0.0,
        0.0,
        0.0,
        freqs.sum_sq(),
        -1.0,
        0.0,
    )
}

fn step_matrix(freqs: Frequencies, dt: f64, scheme: Scheme) -> Matrix4<f64> {
    let h = system_matrix(freqs) * dt;
    let h2 = h * h;
    let id = Matrix4::identity();
    match scheme {
        Scheme::Rk4 => id + h + h2 / 2.0 + h2 * h / 6.0 + h2 * h2 / 24.0,
        Scheme::GaussLegendre4 => {
            let lhs = id - h / 2.0 + h2 / 12.0;
            let rhs = id + h / 2.0 + h2 / 12.0;
            lhs.try_inverse()
                .expect("implicit stage matrix is invertible for small steps")
                * rhs
        }
    }
}

pub fn integrate(
    x0: &ComplexPhasePoint,
    freqs: Frequencies,
    config: IntegratorConfig,
) -> Result<Trajectory> {
    if !(config.dt.is_finite() && config.dt > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "dt must be positive, got {}",
            config.dt
        )));
    }
    let product = config.dt * freqs.max();
    if product >= STEP_GUARD {
        return Err(Error::StepTooLarge {
            product,
            limit: STEP_GUARD,
        });
    }
    let step = step_matrix(freqs, config.dt, config.scheme);
    let arr = x0.to_array();
    let mut re = Vector4::from_fn(|i, _| arr[i].re);
    let mut im = Vector4::from_fn(|i, _| arr[i].im);
    let mut times = Vec::with_capacity(config.steps + 1);
    let mut states = Vec::with_capacity(config.steps + 1);
    times.push(0.0);
    states.push(*x0);
    for k in 1..=config.steps {
        re = step * re;
        im = step * im;
        times.push(k as f64 * config.dt);
        states.push(ComplexPhasePoint::from_array(std::array::from_fn(|i| {
            Complex64::new(re[i], im[i])
        })));
    }
    Ok(Trajectory {
        times,
        states,
        config,
    })
}

pub fn hamiltonian_pu(x: &ComplexPhasePoint, freqs: Frequencies) -> Complex64 {
    -x.piz * x.piz * 0.5 - x.z * x.z * (freqs.sum_sq() * 0.5)
        + x.z * x.pix
        + x.x * x.x * (freqs.prod_sq() * 0.5)
}

pub fn hamiltonian_xi(xi: &RealPhasePoint, freqs: Frequencies) -> f64 {
    let (w1, w2) = (freqs.omega1, freqs.omega2);
    0.5 * (xi.p1 * xi.p1 + w1 * w1 * xi.xi1 * xi.xi1 + xi.p2 * xi.p2 + w2 * w2 * xi.xi2 * xi.xi2)
}

/// `|L_PU + d(ẋẍ)/dt − L_ξ|` at a single phase point, with the jet
/// `(x, ẋ, ẍ, x⃛)` read off the flow.
pub fn lagrangian_identity_point(
    x: &ComplexPhasePoint,
    freqs: Frequencies,
    coeffs: &PUCoefficients,
) -> f64 {
    let (a, b, c) = (coeffs.a, coeffs.b, coeffs.c);
    let (w1, w2) = (freqs.omega1, freqs.omega2);
    let x0 = x.x;
    let x1 = x.z;
    let x2 = -x.piz;
    let x3 = x.pix - x.z * freqs.sum_sq();
    let l_pu =
        -x2 * x2 * 0.5 + x1 * x1 * (freqs.sum_sq() * 0.5) - x0 * x0 * (freqs.prod_sq() * 0.5);
    let total = x2 * x2 + x1 * x3;
    let xi1 = I * (x0 * a + x2 * b);
    let xi2 = x0 * c + x2 * b;
    let dxi1 = I * (x1 * a + x3 * b);
    let dxi2 = x1 * c + x3 * b;
    let l_xi = dxi1 * dxi1 * 0.5 - xi1 * xi1 * (w1 * w1 * 0.5) + dxi2 * dxi2 * 0.5
        - xi2 * xi2 * (w2 * w2 * 0.5);
    (l_pu + total - l_xi).norm()
}

/// Maximum of [`lagrangian_identity_point`] over interior samples.
pub fn lagrangian_identity_residual(
    traj: &Trajectory,
    freqs: Frequencies,
    coeffs: &PUCoefficients,
) -> Result<f64> {
    let n = traj.len();
    if n < 5 {
        return Err(Error::InsufficientSamples { needed: 5, got: n });
    }
    Ok(traj.states[2..n - 2]
        .iter()
        .map(|s| lagrangian_identity_point(s, freqs, coeffs))
        .fold(0.0, f64::max))
}

/// Companion matrix of `x⁗ + s ẍ + p x = 0` on `(x, ẋ, ẍ, x⃛)`.
pub fn companion_matrix(sum_sq: f64, prod_sq: f64) -> Matrix4<Complex64> {
    let r = |v: f64| Complex64::new(v, 0.0);
    Matrix4::new(
        r(0.0),
        r(1.0),
        r(0.0),
        r(0.0),
        r(0.0),
        r(0.0),
        r(1.0),
        r(0.0),
        r(0.0),
        r(0.0),
        r(0.0),
        r(1.0),
        r(-prod_sq),
        r(0.0),
        r(-sum_sq),
        r(0.0),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenStructure {
    /// Distinct eigenvalues, ordered by imaginary part descending.
    pub eigenvalues: Vec<Complex64>,
    pub algebraic_mult: Vec<usize>,
    pub geometric_mult: Vec<usize>,
    pub defective: bool,
}

const CLUSTER_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-8;

/// Eigenstructure of the companion matrix of `x⁗ + s ẍ + p x = 0`.
///
/// Roots come from the biquadratic formula; geometric multiplicity is
/// `4 − rank(A − λI)` with singular values below `1e−8·‖A‖₂` treated as zero.
pub fn companion_eigenstructure(sum_sq: f64, prod_sq: f64) -> EigenStructure {
    let disc = Complex64::new(sum_sq * sum_sq - 4.0 * prod_sq, 0.0).sqrt();
    let mut roots = Vec::with_capacity(4);
    for mu in [(-sum_sq + disc) * 0.5, (-sum_sq - disc) * 0.5] {
        let r = mu.sqrt();
        roots.push(r);
        roots.push(-r);
    }
    let mut eigenvalues: Vec<Complex64> = Vec::new();
    let mut algebraic_mult = Vec::new();
    for r in roots {
        match eigenvalues
            .iter()
            .position(|e| (e - r).norm() < CLUSTER_TOL)
        {
            Some(k) => algebraic_mult[k] += 1,
            None => {
                eigenvalues.push(r);
                algebraic_mult.push(1);
            }
        }
    }
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eigenvalues[j]
            .im
            .total_cmp(&eigenvalues[i].im)
            .then(eigenvalues[j].re.total_cmp(&eigenvalues[i].re))
    });
    let eigenvalues: Vec<Complex64> = order.iter().map(|&k| eigenvalues[k]).collect();
    let algebraic_mult: Vec<usize> = order.iter().map(|&k| algebraic_mult[k]).collect();

    let a = companion_matrix(sum_sq, prod_sq);
    let norm = a.svd(false, false).singular_values.max();
    let geometric_mult: Vec<usize> = eigenvalues
        .iter()
        .map(|&lam| {
            let shifted = a - Matrix4::identity() * lam;
            let sv = shifted.svd(false, false).singular_values;
            sv.iter().filter(|&&s| s <= RANK_TOL * norm).count()
        })
        .collect();
    let defective = algebraic_mult
        .iter()
        .zip(&geometric_mult)
        .any(|(a, g)| g < a);
    EigenStructure {
        eigenvalues,
        algebraic_mult,
        geometric_mult,
        defective,
    }
}

/// The equal-frequency case `ω1 = ω2 = ω`.
pub fn equal_freq_evolution_defect(omega: f64) -> Result<EigenStructure> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidFrequencies(format!(
            "need ω > 0, got {omega}"
        )));
    }
    let w2 = omega * omega;
    Ok(companion_eigenstructure(2.0 * w2, w2 * w2))
}

/// Equal-frequency map `ξ1 = i(ax + bẍ)`, `ξ2 = cx + dẍ` with `d = b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualFreqTransform {
    pub omega: f64,
    pub b: f64,
    pub d: f64,
    pub a: f64,
    pub c: f64,
}

impl EqualFreqTransform {
    pub fn new(omega: f64, b: f64) -> Result<Self> {
        if b == 0.0 {
            return Err(Error::ZeroParameter);
        }
        if !(omega.is_finite() && omega > 0.0 && b.is_finite()) {
            return Err(Error::InvalidFrequencies(format!(
                "need ω > 0 and finite b, got ({omega}, {b})"
            )));
        }
        let w2 = omega * omega;
        Ok(Self {
            omega,
            b,
            d: b,
            a: w2 * b - 1.0 / (4.0 * b),
            c: w2 * b + 1.0 / (4.0 * b),
        })
    }

    /// `[cd − ab − 1/2, c² − a² − ω², b² − d²]`.
    pub fn invariant_residuals(&self) -> [f64; 3] {
        [
            self.c * self.d - self.a * self.b - 0.5,
            self.c * self.c - self.a * self.a - self.omega * self.omega,
            self.b * self.b - self.d * self.d,
        ]
    }

    /// `(x, z, Πx, Πz) = F (ξ1, ξ2, P1, P2)`.
    pub fn forward(&self) -> ComplexMatrix4 {
        let (b, d, w2) = (self.b, self.d, self.omega * self.omega);
        let s = (1.0 / w2 + b * b).sqrt();
        let r = |v: f64| Complex64::new(v, 0.0);
        let z = r(0.0);
        ComplexMatrix4([
            [I * b, r(s), z, z],
            [z, z, I * d, r(d)],
            [
                z,
                z,
                I * (d * w2 - 1.0 / (2.0 * d)),
                r(d * w2 + 1.0 / (2.0 * d)),
            ],
            [I * (w2 * s), r(b * w2), z, z],
        ])
    }

    /// `(ξ1, ξ2, P1, P2) = B (x, z, Πx, Πz)`.
    pub fn backward(&self) -> ComplexMatrix4 {
        let (b, d, w2) = (self.b, self.d, self.omega * self.omega);
        let s = (1.0 / w2 + b * b).sqrt();
        let r = |v: f64| Complex64::new(v, 0.0);
        let z = r(0.0);
        ComplexMatrix4([
            [I * (b * w2), z, z, -I * s],
            [r(w2 * s), z, z, r(-b)],
            [z, -I * (d * w2 + 1.0 / (2.0 * d)), I * d, z],
            [z, r(-(d * w2 - 1.0 / (2.0 * d))), r(d), z],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{compute_coefficients, symplectic_residual, to_complex, Sign};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    fn freqs() -> Frequencies {
        Frequencies::new(SQRT_2, 1.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_amplitudes_give_zero() {
        let g = GeneralSolutionCoeffs::default();
        for t in [0.0, 0.3, 7.0] {
            assert_eq!(general_solution(&g, freqs(), t), c(0.0, 0.0));
        }
    }

    #[test]
    fn cosine_mode_solves_the_ode() {
        let g = GeneralSolutionCoeffs::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        for t in [0.0, 0.4, 2.5, 10.0] {
            assert!(
                (general_solution(&g, freqs(), t) - c(2.0 * (SQRT_2 * t).cos(), 0.0)).norm()
                    < 1e-12
            );
            assert!(ode_residual(&g, freqs(), t) < 1e-10);
        }
    }

    #[test]
    fn initial_value_is_sum_of_amplitudes() {
        let g = GeneralSolutionCoeffs::new(c(0.1, 0.2), c(-0.3, 0.5), c(1.1, 0.0), c(0.0, -0.7));
        assert!((general_solution(&g, freqs(), 0.0) - (g.c1 + g.c2 + g.c3 + g.c4)).norm() < 1e-15);
    }

    #[test]
    fn amplitude_fit_reproduces_initial_point() {
        let x0 = ComplexPhasePoint::new(c(0.3, -0.1), c(0.7, 0.2), c(-0.4, 0.9), c(1.2, -0.6));
        let g = GeneralSolutionCoeffs::from_initial(&x0, freqs()).unwrap();
        assert!(g.state_at(freqs(), 0.0).max_abs_diff(&x0) < 1e-13);
    }

    #[test]
    fn closed_form_state_obeys_hamilton_equations() {
        let f = freqs();
        let x0 = ComplexPhasePoint::new(c(0.3, -0.1), c(0.7, 0.2), c(-0.4, 0.9), c(1.2, -0.6));
        let g = GeneralSolutionCoeffs::from_initial(&x0, f).unwrap();
        let h = 1e-5;
        let t = 0.8;
        let s = g.state_at(f, t);
        let sp = g.state_at(f, t + h);
        let sm = g.state_at(f, t - h);
        let d = |a: Complex64, b: Complex64| (a - b) / (2.0 * h);
        assert!((d(sp.x, sm.x) - s.z).norm() < 1e-8);
        assert!((d(sp.z, sm.z) + s.piz).norm() < 1e-8);
        assert!((d(sp.pix, sm.pix) + s.x * f.prod_sq()).norm() < 1e-8);
        assert!((d(sp.piz, sm.piz) - (s.z * f.sum_sq() - s.pix)).norm() < 1e-8);
    }

    #[test]
    fn zero_initial_state_stays_zero() {
        let traj = integrate(
            &ComplexPhasePoint::default(),
            freqs(),
            IntegratorConfig::new(0.01, 100),
        )
        .unwrap();
        assert!(traj
            .states
            .iter()
            .all(|s| *s == ComplexPhasePoint::default()));
        assert_eq!(traj.len(), 101);
    }

    #[test]
    fn step_guard_and_config_errors() {
        let x0 = ComplexPhasePoint::default();
        assert!(matches!(
            integrate(&x0, freqs(), IntegratorConfig::new(0.4, 10)),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(matches!(
            integrate(&x0, freqs(), IntegratorConfig::new(-0.1, 10)),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn xi1_projection_follows_cosine() {
        let f = freqs();
        let k = compute_coefficients(f, Sign::Plus).unwrap();
        let x0 = to_complex(&RealPhasePoint::new(1.0, 0.0, 0.0, 0.0), &k);
        let traj = integrate(&x0, f, IntegratorConfig::periods(f, 200, 10)).unwrap();
        let err = traj
            .xi_projection(&k)
            .iter()
            .zip(&traj.times)
            .map(|(xi, t)| (xi.xi1 - (SQRT_2 * t).cos()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        assert!(traj.energy_drift(f) < 1e-8);
    }

    #[test]
    fn rk4_drift_is_larger_than_gauss_legendre() {
        let f = freqs();
        let k = compute_coefficients(f, Sign::Plus).unwrap();
        let x0 = to_complex(&RealPhasePoint::new(1.0, 0.0, 0.0, 0.0), &k);
        let cfg = IntegratorConfig::periods(f, 200, 10);
        let rk = integrate(&x0, f, cfg.with_scheme(Scheme::Rk4))
            .unwrap()
            .energy_drift(f);
        let gl = integrate(&x0, f, cfg).unwrap().energy_drift(f);
        assert!(rk > 1e-8 && rk < 1e-7, "{rk}");
        assert!(gl < 1e-11, "{gl}");
    }

    #[test]
    fn hamiltonian_hand_values() {
        let f = freqs();
        assert_eq!(
            hamiltonian_pu(&ComplexPhasePoint::default(), f),
            c(0.0, 0.0)
        );
        let h = hamiltonian_pu(
            &ComplexPhasePoint::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            f,
        );
        assert!((h - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(hamiltonian_xi(&RealPhasePoint::default(), f), 0.0);
        assert!((hamiltonian_xi(&RealPhasePoint::new(1.0, 0.0, 0.0, 0.0), f) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hamiltonians_agree_on_the_reality_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = freqs();
        for sign in [Sign::Plus, Sign::Minus] {
            let k = compute_coefficients(f, sign).unwrap();
            for _ in 0..200 {
                let xi = RealPhasePoint::new(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                );
                let h = hamiltonian_pu(&to_complex(&xi, &k), f);
                assert!(h.im.abs() < 1e-12);
                assert!((h.re - hamiltonian_xi(&xi, f)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lagrangian_identity() {
        let f = freqs();
        let k = compute_coefficients(f, Sign::Plus).unwrap();
        let zero = integrate(
            &ComplexPhasePoint::default(),
            f,
            IntegratorConfig::new(0.01, 10),
        )
        .unwrap();
        assert_eq!(lagrangian_identity_residual(&zero, f, &k).unwrap(), 0.0);
        let x0 = ComplexPhasePoint::new(c(0.3, -0.1), c(0.7, 0.2), c(-0.4, 0.9), c(1.2, -0.6));
        let traj = integrate(&x0, f, IntegratorConfig::periods(f, 200, 1)).unwrap();
        assert!(lagrangian_identity_residual(&traj, f, &k).unwrap() < 1e-8);
        let short = integrate(&x0, f, IntegratorConfig::new(0.01, 3)).unwrap();
        assert!(matches!(
            lagrangian_identity_residual(&short, f, &k),
            Err(Error::InsufficientSamples { needed: 5, got: 4 })
        ));
    }

    #[test]
    fn equal_frequency_companion_is_defective() {
        for w in [1.0, 2.0] {
            let e = equal_freq_evolution_defect(w).unwrap();
            assert_eq!(e.eigenvalues.len(), 2);
            assert!((e.eigenvalues[0] - c(0.0, w)).norm() < 1e-12);
            assert!((e.eigenvalues[1] - c(0.0, -w)).norm() < 1e-12);
            assert_eq!(e.algebraic_mult, vec![2, 2]);
            assert_eq!(e.geometric_mult, vec![1, 1]);
            assert!(e.defective);
        }
        let f = freqs();
        let e = companion_eigenstructure(f.sum_sq(), f.prod_sq());
        assert_eq!(e.eigenvalues.len(), 4);
        assert_eq!(e.geometric_mult, vec![1, 1, 1, 1]);
        assert!(!e.defective);
    }

    #[test]
    fn equal_frequency_transform_values() {
        let t = EqualFreqTransform::new(1.0, 0.5).unwrap();
        assert!(t.a.abs() < 1e-15 && (t.c - 1.0).abs() < 1e-15);
        let t = EqualFreqTransform::new(1.0, 1.0).unwrap();
        assert!((t.a - 0.75).abs() < 1e-15 && (t.c - 1.25).abs() < 1e-15);
        assert!(t.invariant_residuals().iter().all(|r| r.abs() < 1e-12));
        assert!(symplectic_residual(&t.forward()) > 0.1);
        assert!((t.forward() * t.backward()).max_abs_diff(&ComplexMatrix4::identity()) < 1e-12);
        assert_eq!(EqualFreqTransform::new(1.0, 0.0), Err(Error::ZeroParameter));
    }

    #[test]
    fn equal_frequency_inverse_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let w = rng.gen_range(0.2..3.0);
            let mut b: f64 = rng.gen_range(0.1..2.0);
            if rng.gen_bool(0.5) {
                b = -b;
            }
            let t = EqualFreqTransform::new(w, b).unwrap();
            assert!((t.forward() * t.backward()).max_abs_diff(&ComplexMatrix4::identity()) < 1e-12);
            assert!(t.invariant_residuals().iter().all(|r| r.abs() < 1e-12));
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let f = freqs();
        let k = compute_coefficients(f, Sign::Plus).unwrap();
        let traj = integrate(
            &ComplexPhasePoint::default(),
            f,
            IntegratorConfig::new(0.1, 3),
        )
        .unwrap();
        let csv = traj.to_csv(f, &k);
        assert!(csv.starts_with("t,x_re,"));
        assert_eq!(csv.lines().count(), 5);
    }
}
