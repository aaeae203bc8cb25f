//! The complex canonical transformation between the Pais-Uhlenbeck phase
//! space `(x, z, Πx, Πz)` and two real oscillators `(ξ1, ξ2, P1, P2)`.
//!
//! With `b = ±1/√(ω1² − ω2²)`, `a = ω2² b` and `c = ω1² b`, the map
//!
//! ```text
//! x  = i b ξ1 + b ξ2        Πx = i a P1 + c P2
//! z  = i b P1 + b P2        Πz = i c ξ1 + a ξ2
//! ```
//!
//! is a complex symplectic matrix of unit determinant. Real `ξ` lands on a
//! four-real-dimensional surface in `C⁴` described by the reality residuals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix4;

/// Frequencies below this separation are treated as equal.
pub const DEGENERACY_GAP: f64 = 1e-12;

/// Imaginary parts of `M⁻¹X` above this count as off-surface.
pub const REALITY_TOLERANCE: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The ordered pair `(ω1, ω2)` with `ω1 ≥ ω2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub omega1: f64,
    pub omega2: f64,
}

impl Frequencies {
    pub fn new(omega1: f64, omega2: f64) -> Result<Self> {
        if !(omega1.is_finite() && omega2.is_finite()) || omega2 <= 0.0 {
            return Err(Error::InvalidFrequencies(format!(
                "need finite ω1 ≥ ω2 > 0, got ({omega1}, {omega2})"
            )));
        }
        if omega1 < omega2 {
            return Err(Error::InvalidFrequencies(format!(
                "frequencies must be ordered ω1 ≥ ω2, got ({omega1}, {omega2})"
            )));
        }
        Ok(Self { omega1, omega2 })
    }

    pub fn is_degenerate(&self) -> bool {
        (self.omega1 - self.omega2).abs() < DEGENERACY_GAP
    }

    pub fn sum_sq(&self) -> f64 {
        self.omega1 * self.omega1 + self.omega2 * self.omega2
    }

    pub fn prod_sq(&self) -> f64 {
        self.omega1 * self.omega1 * self.omega2 * self.omega2
    }

    pub fn diff_sq(&self) -> f64 {
        self.omega1 * self.omega1 - self.omega2 * self.omega2
    }

    pub fn max(&self) -> f64 {
        self.omega1.max(self.omega2)
    }
}

/// Branch of the square root in `b = ±1/√(ω1² − ω2²)`. One sign is shared by
/// all three coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_f64(v: f64) -> Option<Self> {
        if v == 1.0 {
            Some(Sign::Plus)
        } else if v == -1.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

/// Transformation constants `a`, `b`, `c` with their sign branch.
///
/// Fields are public so that off-model coefficient sets can be built for
/// scaling experiments; [`compute_coefficients`] is the only constructor
/// that guarantees the identities `b(c − a) = 1` and `ac = ω1²ω2²b²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PUCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub sign: Sign,
}

impl PUCoefficients {
    /// `b(c − a)`, equal to one for a valid set.
    pub fn unimodularity(&self) -> f64 {
        self.b * (self.c - self.a)
    }
}

pub fn compute_coefficients(freqs: Frequencies, sign: Sign) -> Result<PUCoefficients> {
    if freqs.is_degenerate() {
        return Err(Error::DegenerateFrequencies {
            gap: (freqs.omega1 - freqs.omega2).abs(),
        });
    }
    let b = sign.value() / freqs.diff_sq().sqrt();
    Ok(PUCoefficients {
        a: freqs.omega2 * freqs.omega2 * b,
        b,
        c: freqs.omega1 * freqs.omega1 * b,
        sign,
    })
}

/// Complex PU phase point `(x, z, Πx, Πz)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexPhasePoint {
    pub x: Complex64,
    pub z: Complex64,
    pub pix: Complex64,
    pub piz: Complex64,
}

impl ComplexPhasePoint {
    pub fn new(x: Complex64, z: Complex64, pix: Complex64, piz: Complex64) -> Self {
        Self { x, z, pix, piz }
    }

    pub fn to_array(&self) -> [Complex64; 4] {
        [self.x, self.z, self.pix, self.piz]
    }

    pub fn from_array(v: [Complex64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Real oscillator phase point `(ξ1, ξ2, P1, P2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RealPhasePoint {
    pub xi1: f64,
    pub xi2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl RealPhasePoint {
    pub fn new(xi1: f64, xi2: f64, p1: f64, p2: f64) -> Self {
        Self { xi1, xi2, p1, p2 }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.xi1, self.xi2, self.p1, self.p2]
    }

    pub fn to_complex_array(&self) -> [Complex64; 4] {
        self.to_array().map(|v| Complex64::new(v, 0.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The matrix `M` with `X = M ξ`.
pub fn build_m(coeffs: &PUCoefficients) -> ComplexMatrix4 {
    let (a, b, c) = (coeffs.a, coeffs.b, coeffs.c);
    let r = |v: f64| Complex64::new(v, 0.0);
    let z = r(0.0);
    ComplexMatrix4([
        [I * b, r(b), z, z],
        [z, z, I * b, r(b)],
        [z, z, I * a, r(c)],
        [I * c, r(a), z, z],
    ])
}

/// `max |MᵀΩM − Ω|`.
pub fn symplectic_residual(m: &ComplexMatrix4) -> f64 {
    let omega = ComplexMatrix4::omega();
    (m.transpose() * omega * *m).max_abs_diff(&omega)
}

pub fn to_complex(xi: &RealPhasePoint, coeffs: &PUCoefficients) -> ComplexPhasePoint {
    ComplexPhasePoint::from_array(build_m(coeffs).mul_vec(&xi.to_complex_array()))
}

/// Result of pulling a complex phase point back through `M⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealPullback {
    /// Full complex preimage `M⁻¹X`.
    pub complex: [Complex64; 4],
    /// Real parts of the preimage.
    pub point: RealPhasePoint,
    /// Largest imaginary part in the preimage.
    pub max_imag: f64,
}

impl RealPullback {
    pub fn on_surface(&self) -> bool {
        self.max_imag <= REALITY_TOLERANCE
    }

    /// The real point, or [`Error::NotOnRealitySurface`] when the preimage
    /// carries imaginary parts.
    pub fn require_real(&self) -> Result<RealPhasePoint> {
        if self.on_surface() {
            Ok(self.point)
        } else {
            Err(Error::NotOnRealitySurface {
                max_imag: self.max_imag,
            })
        }
    }
}

pub fn to_real(x: &ComplexPhasePoint, coeffs: &PUCoefficients) -> RealPullback {
    let inv = build_m(coeffs)
        .inverse()
        .expect("M has unit determinant for valid coefficients");
    let complex = inv.mul_vec(&x.to_array());
    let max_imag = complex.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    RealPullback {
        complex,
        point: RealPhasePoint::new(complex[0].re, complex[1].re, complex[2].re, complex[3].re),
        max_imag,
    }
}

/// The four reality residuals, dagger read as complex conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealityResidual {
    /// `[x̄ − (b(a+c)x − 2b²Πz), z̄ − (−b(a+c)z + 2b²Πx),
    ///   Π̄z − (2ac x − b(a+c)Πz), Π̄x − (−2ac z + b(a+c)Πx)]` in modulus.
    pub components: [f64; 4],
    pub max: f64,
}

pub fn reality_residual(x: &ComplexPhasePoint, coeffs: &PUCoefficients) -> RealityResidual {
    let (a, b, c) = (coeffs.a, coeffs.b, coeffs.c);
    let s = b * (a + c);
    let components = [
        (x.x.conj() - (x.x * s - x.piz * (2.0 * b * b))).norm(),
        (x.z.conj() - (-x.z * s + x.pix * (2.0 * b * b))).norm(),
        (x.piz.conj() - (x.x * (2.0 * a * c) - x.piz * s)).norm(),
        (x.pix.conj() - (-x.z * (2.0 * a * c) + x.pix * s)).norm(),
    ];
    RealityResidual {
        components,
        max: components.iter().copied().fold(0.0, f64::max),
    }
}

/// Component form of the `(x, Πz)` reality conditions:
/// `[|a·x_R − b·Πz_R|, |c·x_I − b·Πz_I|]`.
pub fn constraint_components(x: &ComplexPhasePoint, coeffs: &PUCoefficients) -> [f64; 2] {
    [
        (coeffs.a * x.x.re - coeffs.b * x.piz.re).abs(),
        (coeffs.c * x.x.im - coeffs.b * x.piz.im).abs(),
    ]
}

/// The point `(x, Πz)` on the reality surface above `(x_R, x_I)`.
pub fn surface_point(x_re: f64, x_im: f64, coeffs: &PUCoefficients) -> (Complex64, Complex64) {
    (
        Complex64::new(x_re, x_im),
        Complex64::new(coeffs.a * x_re / coeffs.b, coeffs.c * x_im / coeffs.b),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_coeffs() -> PUCoefficients {
        compute_coefficients(Frequencies::new(2f64.sqrt(), 1.0).unwrap(), Sign::Plus).unwrap()
    }

    #[test]
    fn coefficients_for_sqrt2_and_1() {
        let k = unit_coeffs();
        assert!((k.a - 1.0).abs() < 1e-15);
        assert!((k.b - 1.0).abs() < 1e-15);
        assert!((k.c - 2.0).abs() < 1e-15);
        let f = Frequencies::new(2f64.sqrt(), 1.0).unwrap();
        let m = compute_coefficients(f, Sign::Minus).unwrap();
        assert!(
            (m.a + 1.0).abs() < 1e-15 && (m.b + 1.0).abs() < 1e-15 && (m.c + 2.0).abs() < 1e-15
        );
        assert!((m.unimodularity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_frequencies_are_degenerate() {
        let f = Frequencies::new(1.0, 1.0).unwrap();
        assert!(matches!(
            compute_coefficients(f, Sign::Plus),
            Err(Error::DegenerateFrequencies { .. })
        ));
    }

    #[test]
    fn misordered_frequencies_rejected() {
        assert!(Frequencies::new(1.0, 2.0).is_err());
        assert!(Frequencies::new(1.0, 0.0).is_err());
        assert!(Frequencies::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn m_entries_and_determinant() {
        let m = build_m(&unit_coeffs());
        for (ij, want) in [
            ((0, 0), c(0.0, 1.0)),
            ((0, 1), c(1.0, 0.0)),
            ((3, 0), c(0.0, 2.0)),
            ((3, 1), c(1.0, 0.0)),
        ] {
            assert!((m[ij] - want).norm() < 1e-14);
        }
        assert!((m.det() - c(1.0, 0.0)).norm() < 1e-12);
        assert!(symplectic_residual(&m) < 1e-12);
    }

    #[test]
    fn identity_is_symplectic() {
        assert_eq!(symplectic_residual(&ComplexMatrix4::identity()), 0.0);
    }

    #[test]
    fn random_frequency_sweep_is_symplectic_and_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let w2 = rng.gen_range(0.1..3.0);
            let w1 = w2 + rng.gen_range(0.05..3.0);
            for sign in [Sign::Plus, Sign::Minus] {
                let k = compute_coefficients(Frequencies::new(w1, w2).unwrap(), sign).unwrap();
                let m = build_m(&k);
                assert!(symplectic_residual(&m) < 1e-12);
                assert!((m.det() - c(1.0, 0.0)).norm() < 1e-12);
                assert!((k.unimodularity() - 1.0).abs() < 1e-12);
                assert!(
                    (k.a * k.c - w1 * w1 * w2 * w2 * k.b * k.b).abs()
                        < 1e-12 * (1.0 + k.a * k.c).abs()
                );
            }
        }
    }

    #[test]
    fn unit_xi1_maps_to_expected_point_and_back() {
        let k = unit_coeffs();
        let x = to_complex(&RealPhasePoint::new(1.0, 0.0, 0.0, 0.0), &k);
        assert!(
            x.max_abs_diff(&ComplexPhasePoint::new(
                c(0.0, 1.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 2.0)
            )) < 1e-15
        );
        let back = to_real(&x, &k).require_real().unwrap();
        assert!(back.max_abs_diff(&RealPhasePoint::new(1.0, 0.0, 0.0, 0.0)) < 1e-12);
        assert_eq!(
            to_complex(&RealPhasePoint::default(), &k),
            ComplexPhasePoint::default()
        );
    }

    #[test]
    fn pullback_matches_printed_inverse_relations() {
        let k = unit_coeffs();
        let x = ComplexPhasePoint::new(c(0.3, -0.2), c(1.1, 0.4), c(-0.7, 0.25), c(0.05, 0.9));
        let pb = to_real(&x, &k);
        let (a, b, cc) = (k.a, k.b, k.c);
        let xi1 = I * a * x.x - I * b * x.piz;
        let xi2 = x.x * cc - x.piz * b;
        let p1 = -I * cc * x.z + I * b * x.pix;
        let p2 = -x.z * a + x.pix * b;
        for (got, want) in pb.complex.iter().zip([xi1, xi2, p1, p2]) {
            assert!((got - want).norm() < 1e-13);
        }
        assert!(!pb.on_surface());
        assert!(matches!(
            pb.require_real(),
            Err(Error::NotOnRealitySurface { .. })
        ));
    }

    #[test]
    fn reality_residual_hand_values() {
        let k = unit_coeffs();
        let r = reality_residual(
            &ComplexPhasePoint::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            &k,
        );
        assert!((r.components[0] - 2.0).abs() < 1e-15);
        assert!((r.components[2] - 4.0).abs() < 1e-15);
        assert_eq!(r.components[1], 0.0);
        assert_eq!(r.components[3], 0.0);
        assert!((r.max - 4.0).abs() < 1e-15);
        assert_eq!(reality_residual(&ComplexPhasePoint::default(), &k).max, 0.0);
    }

    #[test]
    fn surface_point_satisfies_component_conditions() {
        let k = unit_coeffs();
        let (x, piz) = surface_point(0.7, -1.3, &k);
        let p = ComplexPhasePoint::new(x, c(0.0, 0.0), c(0.0, 0.0), piz);
        let [r1, r2] = constraint_components(&p, &k);
        assert!(r1 < 1e-15 && r2 < 1e-15);
    }
}
