use num_complex::Complex64;
use proptest::prelude::*;
use puosc::cosc::{energy, propagator_p, propagator_q, psi_n, Epsilon, KernelRecord, UniformGrid};
use puosc::Error;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_factorizes(q2 in -3.0f64..3.0, q1 in -3.0f64..3.0, t in 0.1f64..3.0, e in -0.9f64..0.9) {
        let eps = Epsilon::new(e).unwrap();
        let full = propagator_q(q2, q1, t, eps).unwrap().value;
        let base = propagator_q(q2, q1, t, Epsilon::new(0.0).unwrap()).unwrap().value;
        let want = base * (0.5 * e * (q2 * q2 - q1 * q1)).exp();
        prop_assert!((full - want).norm() <= 1e-14 * want.norm());
    }

    #[test]
    fn base_kernel_is_symmetric(q2 in -3.0f64..3.0, q1 in -3.0f64..3.0, t in 0.1f64..3.0) {
        let eps = Epsilon::new(0.0).unwrap();
        let a = propagator_q(q2, q1, t, eps).unwrap().value;
        let b = propagator_q(q1, q2, t, eps).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-14 * a.norm());
    }

    #[test]
    fn momentum_kernel_is_symmetric(p2 in -2.0f64..2.0, p1 in -2.0f64..2.0, t in 0.1f64..3.0, e in 0.05f64..0.9) {
        let eps = Epsilon::new(e).unwrap();
        let a = propagator_p(Complex64::new(p2, 0.0), Complex64::new(p1, 0.0), t, eps).unwrap().value;
        let b = propagator_p(Complex64::new(p1, 0.0), Complex64::new(p2, 0.0), t, eps).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-14 * a.norm());
    }
}

#[test]
fn energies_and_parity() {
    assert_eq!(energy(0), 0.5);
    assert_eq!(energy(7), 7.5);
    let eps = Epsilon::new(0.3).unwrap();
    for n in 0..6 {
        let (a, b) = (psi_n(n, eps, 0.8).unwrap(), psi_n(n, eps, -0.8).unwrap());
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!((a - sign * b).abs() < 1e-15);
    }
}

#[test]
fn epsilon_domain() {
    assert!(matches!(Epsilon::new(1.0), Err(Error::InvalidEpsilon(_))));
    assert!(Epsilon::new(-1.2).is_err());
    assert!(Epsilon::new(f64::NAN).is_err());
    assert!(UniformGrid::new(1.0, -1.0, 0.01).is_err());
}

#[test]
fn kernel_record_serializes() {
    let eps = Epsilon::new(0.2).unwrap();
    let k = propagator_q(0.1, 0.2, 1.0, eps).unwrap();
    let r = KernelRecord::new(0.1, 0.2, 1.0, eps, &k);
    let s = serde_json::to_string(&r).unwrap();
    assert!(s.contains("branch_note"));
}
