use num_complex::Complex64;
use proptest::prelude::*;
use puosc::puq::{
    kernel_coeffs, propagator_pu, spectrum, spectrum_csv, spectrum_table, CoeffRecord, KernelArgs,
};
use puosc::{Error, Frequencies};

fn z(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_symmetric_under_bra_ket_swap(
        a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0, t in 0.2f64..2.0,
    ) {
        let f = Frequencies::new(2f64.sqrt(), 1.0).unwrap();
        let k1 = propagator_pu(&KernelArgs::new(z(a, b), z(c, d), z(d, a), z(b, c)), t, f).unwrap().value;
        let k2 = propagator_pu(&KernelArgs::new(z(d, a), z(b, c), z(a, b), z(c, d)), t, f).unwrap().value;
        prop_assert!((k1 - k2).norm() <= 1e-13 * k1.norm());
    }

    #[test]
    fn spectrum_is_sorted_and_additive(w2 in 0.2f64..2.0, gap in 0.01f64..2.0) {
        let f = Frequencies::new(w2 + gap, w2).unwrap();
        let levels = spectrum_table(f, 12);
        prop_assert_eq!(levels.len(), 12);
        prop_assert!(levels.windows(2).all(|w| w[0].energy <= w[1].energy));
        prop_assert!((levels[0].energy - 0.5 * (f.omega1 + f.omega2)).abs() < 1e-15);
        for l in &levels {
            prop_assert_eq!(l.energy, spectrum(l.m, l.n, f));
        }
    }
}

#[test]
fn caustics_name_the_vanishing_sine() {
    let f = Frequencies::new(2.0, 1.0).unwrap();
    match kernel_coeffs(std::f64::consts::FRAC_PI_2, f) {
        Err(Error::Caustic { frequency, .. }) => assert_eq!(frequency, "ω1"),
        other => panic!("{other:?}"),
    }
    let f = Frequencies::new(2.5, 1.0).unwrap();
    match kernel_coeffs(std::f64::consts::PI, f) {
        Err(Error::Caustic { frequency, .. }) => assert_eq!(frequency, "ω2"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn spectrum_csv_header() {
    let f = Frequencies::new(2f64.sqrt(), 1.0).unwrap();
    let csv = spectrum_csv(&spectrum_table(f, 3));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,n,E"));
    assert!(lines.next().unwrap().starts_with("0,0,"));
}

#[test]
fn coefficient_record_fields() {
    let f = Frequencies::new(2f64.sqrt(), 1.0).unwrap();
    let r = CoeffRecord::new(0.7, f, &kernel_coeffs(0.7, f).unwrap());
    let v = serde_json::to_value(&r).unwrap();
    for key in ["T", "D", "F", "G", "J", "K", "M", "N", "Q"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
