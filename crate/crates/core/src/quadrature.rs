//! Gauss-Hermite quadrature and Gaussian integrals along rotated contours.
//!
//! Nodes are the zeros of the orthonormal Hermite function of order `n`,
//! taken from the Jacobi matrix spectrum and polished by Newton iteration. Weights are stored pre-multiplied by `e^{x²}`
//! through the Christoffel sum `1 / Σ_{k<n} φ_k(x)²`, which stays accurate
//! in the tails where the raw weights underflow.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 200;
const MAX_NODES: usize = 2000;

/// Orthonormal Hermite functions `φ_0(x) … φ_n(x)`, each including the
/// factor `e^{−x²/2}`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(p0);
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * p0);
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(next);
    }
    out
}

/// Complex-argument version of [`hermite_functions`].
pub fn hermite_functions_complex(n: usize, x: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let p0 = (x * x * -0.5).exp() * std::f64::consts::PI.powf(-0.25);
    out.push(p0);
    if n == 0 {
        return out;
    }
    out.push(x * p0 * std::f64::consts::SQRT_2);
    for k in 2..=n {
        let kf = k as f64;
        let next = x * out[k - 1] * (2.0 / kf).sqrt() - out[k - 2] * ((kf - 1.0) / kf).sqrt();
        out.push(next);
    }
    out
}

/// Runs the orthonormal recurrence to order `n` with rescaling so that
/// large `|x|` neither underflows nor overflows. Returns `φ_n/φ_{n−1}` and
/// `Σ_{k<n} φ_k(x)²`.
fn scaled_recurrence(n: usize, x: f64) -> (f64, f64) {
    const BIG: f64 = 1e150;
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    let mut sum = 0.0;
    for k in 1..=n {
        sum += cur * cur;
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            sum /= BIG * BIG;
            log_scale += BIG.ln();
        }
    }
    let ratio = cur / prev;
    let total = if sum == 0.0 {
        0.0
    } else {
        (sum.ln() + 2.0 * log_scale).exp()
    };
    (ratio, total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    /// `w_i · e^{x_i²}`.
    scaled_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_NODES {
            return Err(Error::InvalidConfig(format!(
                "Gauss-Hermite order must be in 1..={MAX_NODES}, got {n}"
            )));
        }
        // eigenvalues of the Jacobi matrix give the nodes to near machine
        // precision; a few Newton steps on the recurrence polish them
        let jacobi = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut guess: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        guess.sort_by(|a, b| b.total_cmp(a));
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut pos: Vec<f64> = Vec::with_capacity(m);
        for &g in &guess[..m] {
            let mut z = g;
            for _ in 0..8 {
                let dz = scaled_recurrence(n, z).0 / (2.0 * nf).sqrt();
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            pos.push(z);
        }
        // roots are largest first; for odd n the last one is the centre
        if n % 2 == 1 {
            pos[m - 1] = 0.0;
        }
        let mut nodes: Vec<f64> = pos.iter().map(|p| -p).collect();
        let upper = if n % 2 == 1 { m - 1 } else { m };
        nodes.extend(pos[..upper].iter().rev());
        let scaled_weights = nodes
            .iter()
            .map(|&x| 1.0 / scaled_recurrence(n, x).1)
            .collect();
        Ok(Self {
            nodes,
            scaled_weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// Raw weights `w_i` for the weight function `e^{−x²}`.
    pub fn weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(x, w)| w * (-x * x).exp())
            .collect()
    }

    /// `∫ e^{−x²} f(x) dx`.
    pub fn integrate_weighted<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| f(x) * (w * (-x * x).exp()))
            .sum()
    }

    /// `∫ f(x) dx` for `f` decaying like `e^{−α(x − center)²}`.
    pub fn integrate_gaussian<F: Fn(f64) -> Complex64>(
        &self,
        f: F,
        alpha: f64,
        center: f64,
    ) -> Result<Complex64> {
        if !(alpha > 0.0) {
            return Err(Error::QuadratureDivergence { exponent: -alpha });
        }
        let s = alpha.sqrt();
        Ok(self
            .nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&u, &w)| f(center + u / s) * w)
            .sum::<Complex64>()
            / s)
    }

    /// `∫_ℝ f(q) dq` for an entire `f` behaving like `exp(quad·(q − center)²)`.
    ///
    /// The contour is shifted through `center` and rotated by
    /// `θ = (π − arg quad)/2` so the integrand becomes a decaying real
    /// Gaussian. Requires `Re quad ≤ 0` (otherwise the real-line integral
    /// diverges) and that `f` has no competing growth in the swept sector.
    pub fn integrate_contour<F: Fn(Complex64) -> Complex64>(
        &self,
        f: F,
        quad: Complex64,
        center: Complex64,
    ) -> Result<Complex64> {
        let (rot, scale) = contour_rotation(quad)?;
        let step = rot / scale;
        Ok(self
            .nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&u, &w)| f(center + step * u) * w)
            .sum::<Complex64>()
            * step)
    }
}

/// Rotation `e^{iθ}` and scale `√|quad|` for a complex Gaussian exponent.
pub fn contour_rotation(quad: Complex64) -> Result<(Complex64, f64)> {
    let mag = quad.norm();
    if mag == 0.0 || !mag.is_finite() || quad.re > 1e-14 * mag {
        return Err(Error::QuadratureDivergence { exponent: quad.re });
    }
    let pi = std::f64::consts::PI;
    let mut theta = (pi - quad.arg()) / 2.0;
    while theta > pi / 2.0 {
        theta -= pi;
    }
    while theta <= -pi / 2.0 {
        theta += pi;
    }
    Ok((Complex64::from_polar(1.0, theta), mag.sqrt()))
}

/// Quadratic and linear coefficients of an exponent `E(q) = A q² + B q + C`
/// read off by exact second differences at `q = −1, 0, 1`. Returns `(A, center)`
/// with `center = −B/(2A)`.
pub fn fit_quadratic<F: Fn(Complex64) -> Complex64>(exponent: F) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let e0 = exponent(Complex64::new(0.0, 0.0));
    let ep = exponent(one);
    let em = exponent(-one);
    let a = (ep + em - e0 * 2.0) * 0.5;
    let b = (ep - em) * 0.5;
    (a, -b / (a * 2.0))
}

/// Taylor data of a two-variable exponent
/// `E(u, v) = uu·u² + uv·uv + vv·v² + u·u + v·v + const`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic2 {
    pub uu: Complex64,
    pub uv: Complex64,
    pub vv: Complex64,
    pub u: Complex64,
    pub v: Complex64,
}

/// Reads off a quadratic exponent from six samples around the origin.
pub fn fit_quadratic_2d<F: Fn(Complex64, Complex64) -> Complex64>(exponent: F) -> Quadratic2 {
    let (z, o) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let e00 = exponent(z, z);
    let (e10, em0) = (exponent(o, z), exponent(-o, z));
    let (e01, e0m) = (exponent(z, o), exponent(z, -o));
    let e11 = exponent(o, o);
    Quadratic2 {
        uu: (e10 + em0 - e00 * 2.0) * 0.5,
        vv: (e01 + e0m - e00 * 2.0) * 0.5,
        uv: e11 - e10 - e01 + e00,
        u: (e10 - em0) * 0.5,
        v: (e01 - e0m) * 0.5,
    }
}

impl GaussHermite {
    /// `∫∫_ℝ² f(u, v) du dv` for an entire `f` whose Gaussian part is the
    /// quadratic `exponent`. The inner `v` contour is re-centred at every
    /// outer node; the outer one uses the exponent left after the `v`
    /// integration.
    pub fn integrate_contour_2d<F, E>(&self, f: F, exponent: E) -> Result<Complex64>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
        E: Fn(Complex64, Complex64) -> Complex64,
    {
        let q = fit_quadratic_2d(exponent);
        let (rv, sv) = contour_rotation(q.vv)?;
        let outer_quad = q.uu - q.uv * q.uv / (q.vv * 4.0);
        let outer_lin = q.u - q.uv * q.v / (q.vv * 2.0);
        let outer_center = -outer_lin / (outer_quad * 2.0);
        let step_v = rv / sv;
        let inner = |u: Complex64| -> Complex64 {
            let center = -(q.uv * u + q.v) / (q.vv * 2.0);
            self.nodes
                .iter()
                .zip(&self.scaled_weights)
                .map(|(&t, &w)| f(u, center + step_v * t) * w)
                .sum::<Complex64>()
                * step_v
        };
        self.integrate_contour(inner, outer_quad, outer_center)
    }
}
