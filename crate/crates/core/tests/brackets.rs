use proptest::prelude::*;
use puosc::brackets::models::{equal_extended, pu_lagrangian, unequal_extended};
use puosc::brackets::{
    dirac_bracket, ostrogradsky_momenta, parse_poly, poisson_bracket, PhasePoly, PhaseSpace,
};

fn entry(table: &[Vec<PhasePoly>], i: usize, j: usize) -> String {
    table[i][j].to_string()
}

#[test]
fn ostrogradsky_momenta_of_the_pu_lagrangian() {
    let (l, jets) = pu_lagrangian().unwrap();
    let p: Vec<String> = ostrogradsky_momenta(&l, &jets)
        .unwrap()
        .iter()
        .map(|p| p.to_string())
        .collect();
    assert_eq!(p, ["w1^2*xd + w2^2*xd + xddd", "-xdd"]);
}

#[test]
fn extended_lagrangian_momenta() {
    let m = unequal_extended().unwrap();
    let p: Vec<String> = m.momenta.iter().map(|p| p.to_string()).collect();
    assert_eq!(p, ["w1^2*xd + w2^2*xd + xddd", "0", "xd"]);
    let m = equal_extended().unwrap();
    let p: Vec<String> = m.momenta.iter().map(|p| p.to_string()).collect();
    assert_eq!(p, ["3/2*w^2*xd + xddd", "-1/2*w^2*x - 1/2*xdd", "1/2*xd"]);
}

#[test]
fn unequal_dirac_table() {
    let m = unequal_extended().unwrap();
    let t = m.dirac_table(&m.reduced).unwrap();
    // order x, xdd, p0, p2
    assert_eq!(entry(&t, 0, 2), "1");
    assert_eq!(entry(&t, 1, 3), "1");
    assert_eq!(entry(&t, 2, 0), "-1");
    for (i, j) in [(0, 1), (0, 3), (1, 2), (2, 3), (0, 0)] {
        assert_eq!(entry(&t, i, j), "0", "({i}, {j})");
    }
    assert_eq!(
        m.reduced_hamiltonian().unwrap().to_string(),
        "1/2*w1^2*w2^2*x^2 - 1/2*w1^2*p2^2 - 1/2*w2^2*p2^2 - 1/2*xdd^2 + p0*p2"
    );
    assert!(m
        .pu_hamiltonian()
        .unwrap()
        .try_sub(&m.expected_hamiltonian)
        .unwrap()
        .is_zero());
}

#[test]
fn equal_dirac_table() {
    let m = equal_extended().unwrap();
    let t = m.dirac_table(&m.reduced).unwrap();
    assert_eq!(entry(&t, 0, 2), "1");
    assert_eq!(entry(&t, 1, 2), "-1/2*w^2");
    assert_eq!(entry(&t, 1, 3), "1/2");
    assert_eq!(entry(&t, 0, 3), "0");
    let c = m.dirac_table(&m.canonical).unwrap();
    assert_eq!(entry(&c, 0, 2), "1");
    assert_eq!(entry(&c, 1, 3), "1");
    assert_eq!(entry(&c, 2, 3), "0");
    assert_eq!(
        m.pu_hamiltonian().unwrap().to_string(),
        "1/2*w^4*x^2 - w^2*z^2 + z*Px - 1/2*Pz^2"
    );
}

#[test]
fn dirac_bracket_with_constraint_vanishes() {
    let m = unequal_extended().unwrap();
    let x = parse_poly(&m.space, "x*xdd + p0^2").unwrap();
    for phi in m.constraints.constraints() {
        assert!(dirac_bracket(&x, phi, &m.constraints).unwrap().is_zero());
    }
}

fn small_space() -> std::sync::Arc<PhaseSpace> {
    PhaseSpace::new(
        &["q1", "q2", "p1", "p2", "k"],
        &[("q1", "p1"), ("q2", "p2")],
        None,
    )
    .unwrap()
}

const MONOMIALS: [&str; 10] = [
    "1", "q1", "q2", "p1", "p2", "q1*p1", "q2^2", "p1*p2", "k*q1", "q1*q2*p2",
];

fn poly() -> impl Strategy<Value = String> {
    prop::collection::vec(-5i64..=5, MONOMIALS.len()).prop_map(|cs| {
        cs.iter()
            .zip(MONOMIALS)
            .map(|(c, m)| format!("({c})*{m}"))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poisson_bracket_axioms(a in poly(), b in poly(), c in poly()) {
        let s = small_space();
        let (a, b, c) = (parse_poly(&s, &a).unwrap(), parse_poly(&s, &b).unwrap(), parse_poly(&s, &c).unwrap());
        let pb = |x: &PhasePoly, y: &PhasePoly| poisson_bracket(x, y).unwrap();
        prop_assert!((pb(&a, &b) + pb(&b, &a)).is_zero());
        let jacobi = pb(&a, &pb(&b, &c)) + pb(&b, &pb(&c, &a)) + pb(&c, &pb(&a, &b));
        prop_assert!(jacobi.is_zero());
        let leibniz = pb(&a, &(&b * &c)) - (&pb(&a, &b) * &c) - (&b * &pb(&a, &c));
        prop_assert!(leibniz.is_zero());
    }

    #[test]
    fn display_round_trips(a in poly()) {
        let s = small_space();
        let p = parse_poly(&s, &a).unwrap();
        let again = parse_poly(&s, &p.to_string()).unwrap();
        prop_assert_eq!(again.to_string(), p.to_string());
        prop_assert!(again.try_sub(&p).unwrap().is_zero());
    }

    #[test]
    fn dirac_bracket_is_antisymmetric(a in 0usize..4, b in 0usize..4) {
        let m = equal_extended().unwrap();
        let (x, y) = (&m.reduced[a].1, &m.reduced[b].1);
        let s = dirac_bracket(x, y, &m.constraints).unwrap() + dirac_bracket(y, x, &m.constraints).unwrap();
        prop_assert!(s.is_zero());
    }
}
