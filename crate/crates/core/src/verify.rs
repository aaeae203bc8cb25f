//! Verification suites. Every group draws from its own ChaCha stream derived
//! from the seed, so results do not depend on execution order and the
//! parallel and sequential runs agree record for record.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::brackets::models::{
    equal_extended, generating_data, unequal_extended, ExactCoeffs, ExtendedModel, GF_COORDS,
    GF_DCOORDS, GF_DMOMENTA, GF_MOMENTA,
};
use crate::brackets::{
    boundary_term_residual, generating_function_check, parse_poly, rat, PhasePoly,
};
use crate::classical::{
    companion_eigenstructure, equal_freq_evolution_defect, integrate, lagrangian_identity_residual,
    ode_residual, EqualFreqTransform, GeneralSolutionCoeffs, IntegratorConfig,
};
use crate::cosc::{
    commutator_qq, completeness_check, compose_q, heisenberg_flow, inner_product_mu,
    path_integral_kernel, propagator_p, propagator_p_via_transform, propagator_q,
    propagator_q_complex, schrodinger_residual_c, Epsilon, GaussianState, UniformGrid, WaveFn,
};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix4;
use crate::oracle;
use crate::puq;
use crate::quadrature::GaussHermite;
use crate::report::CheckRecord;
use crate::transform::{
    build_m, compute_coefficients, reality_residual, symplectic_residual, to_complex, to_real,
    ComplexPhasePoint, Frequencies, PUCoefficients, RealPhasePoint, Sign,
};

pub mod anchor {
    pub const SYMPLECTIC: &str = "belongs to the complex symplectic group";
    pub const COEFFICIENTS: &str = "transformation coefficients a, b, c";
    pub const REALITY: &str = "reality conditions";
    pub const CLASSICAL: &str = "classical equivalence with two oscillators";
    pub const EQUAL_FREQUENCY: &str = "is not diagonalizable";
    pub const DIRAC: &str = "Dirac brackets of the extended Lagrangian";
    pub const DIRAC_EQUAL: &str = "a free parameter in the transformation";
    pub const GENERATING: &str = "generating function f = -z Pz";
    pub const COSC_STATES: &str = "complexified oscillator eigenstates";
    pub const COSC_KERNEL: &str = "complexified oscillator propagator";
    pub const PATH_INTEGRAL: &str = "path integral of the complexified oscillator";
    pub const PU_SPECTRUM: &str = "PU energy spectrum";
    pub const PU_KERNEL: &str = "PU propagator";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Core,
    Classical,
    Brackets,
    Cosc,
    Puq,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["core", "classical", "brackets", "cosc", "puq", "all"];

    fn covers(self, owner: Suite) -> bool {
        self == Suite::All || self == owner
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "core" => Suite::Core,
            "classical" => Suite::Classical,
            "brackets" => Suite::Brackets,
            "cosc" => Suite::Cosc,
            "puq" => Suite::Puq,
            "all" => Suite::All,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown suite `{s}`, expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Suite::Core,
            Suite::Classical,
            Suite::Brackets,
            Suite::Cosc,
            Suite::Puq,
            Suite::All,
        ]
        .iter()
        .position(|s| s == self)
        .unwrap_or(0);
        f.write_str(Suite::NAMES[i])
    }
}

type GroupFn = fn(&mut ChaCha8Rng) -> Result<Vec<CheckRecord>>;

/// A named batch of related checks.
#[derive(Clone, Copy)]
pub struct Group {
    pub name: &'static str,
    pub owner: Suite,
    /// Acceptance criterion this group belongs to, if any.
    pub criterion: Option<u8>,
    run: GroupFn,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.name)
            .field("owner", &self.owner)
            .field("criterion", &self.criterion)
            .finish()
    }
}

const fn group(name: &'static str, owner: Suite, criterion: Option<u8>, run: GroupFn) -> Group {
    Group {
        name,
        owner,
        criterion,
        run,
    }
}

pub const GROUPS: [Group; 24] = [
    group("symplectic", Suite::Core, Some(1), symplectic),
    group(
        "coefficient_identities",
        Suite::Core,
        Some(2),
        coefficient_identities,
    ),
    group("round_trip", Suite::Core, None, round_trip),
    group("classical_flow", Suite::Classical, Some(5), classical_flow),
    group("general_solution", Suite::Classical, None, general_solution),
    group(
        "equal_frequency",
        Suite::Classical,
        Some(11),
        equal_frequency,
    ),
    group("dirac_unequal", Suite::Brackets, Some(3), dirac_unequal),
    group("dirac_equal", Suite::Brackets, Some(3), dirac_equal),
    group(
        "generating_function",
        Suite::Brackets,
        Some(4),
        generating_function,
    ),
    group(
        "cosc_orthonormality",
        Suite::Cosc,
        Some(6),
        cosc_orthonormality,
    ),
    group("cosc_schrodinger", Suite::Cosc, Some(6), cosc_schrodinger),
    group("euclidean_kernel", Suite::Cosc, Some(7), euclidean_kernel),
    group(
        "kernel_factorization",
        Suite::Cosc,
        Some(7),
        kernel_factorization,
    ),
    group("cosc_semigroup", Suite::Cosc, Some(7), cosc_semigroup),
    group("momentum_kernel", Suite::Cosc, Some(7), momentum_kernel),
    group("cosc_operators", Suite::Cosc, None, cosc_operators),
    group("path_integral", Suite::Cosc, Some(8), path_integral),
    group("pu_spectrum", Suite::Puq, Some(9), pu_spectrum),
    group("pu_coefficients", Suite::Puq, Some(10), pu_coefficients),
    group("pu_schrodinger", Suite::Puq, Some(10), pu_schrodinger),
    group("pu_semigroup", Suite::Puq, Some(10), pu_semigroup),
    group("pu_closure", Suite::Puq, Some(10), pu_closure),
    group("pu_ground_state", Suite::Puq, None, pu_ground_state),
    group("pu_caustic", Suite::Puq, None, pu_caustic),
];

impl Group {
    /// Runs the group on its own stream of the seeded generator.
    pub fn run(&self, seed: u64) -> Vec<CheckRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stream = GROUPS.iter().position(|g| g.name == self.name).unwrap_or(0);
        rng.set_stream(stream as u64 + 1);
        match (self.run)(&mut rng) {
            Ok(records) => records,
            Err(e) => vec![CheckRecord::errored(self.name, self.default_anchor(), e)],
        }
    }

    fn default_anchor(&self) -> &'static str {
        match self.owner {
            Suite::Core => anchor::SYMPLECTIC,
            Suite::Classical => anchor::CLASSICAL,
            Suite::Brackets => anchor::DIRAC,
            Suite::Cosc => anchor::COSC_KERNEL,
            Suite::Puq | Suite::All => anchor::PU_KERNEL,
        }
    }
}

pub fn groups(suite: Suite) -> Vec<Group> {
    GROUPS
        .iter()
        .copied()
        .filter(|g| suite.covers(g.owner))
        .collect()
}

pub fn group_by_name(name: &str) -> Option<Group> {
    GROUPS.iter().copied().find(|g| g.name == name)
}

/// Groups that make up acceptance criterion `k` (1 to 11).
pub fn criterion_groups(k: u8) -> Vec<Group> {
    GROUPS
        .iter()
        .copied()
        .filter(|g| g.criterion == Some(k))
        .collect()
}

pub fn run_groups(groups: &[Group], seed: u64, parallel: bool) -> Vec<CheckRecord> {
    if parallel {
        let results: Vec<Vec<CheckRecord>> = std::thread::scope(|s| {
            let handles: Vec<_> = groups
                .iter()
                .map(|g| s.spawn(move || g.run(seed)))
                .collect();
            handles
                .into_iter()
                .zip(groups)
                .map(|(h, g)| {
                    h.join().unwrap_or_else(|_| {
                        vec![CheckRecord::errored(
                            g.name,
                            g.default_anchor(),
                            "check panicked",
                        )]
                    })
                })
                .collect()
        });
        results.into_iter().flatten().collect()
    } else {
        groups.iter().flat_map(|g| g.run(seed)).collect()
    }
}

pub fn run_suite(suite: Suite, seed: u64, parallel: bool) -> Vec<CheckRecord> {
    run_groups(&groups(suite), seed, parallel)
}

fn sqrt2() -> Result<Frequencies> {
    Frequencies::new(2f64.sqrt(), 1.0)
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn eps(v: f64) -> Result<Epsilon> {
    Epsilon::new(v)
}

/// Frequencies with `0.2 ≤ ω2 ≤ 2` and a gap of at least `0.1`.
fn random_frequencies(rng: &mut ChaCha8Rng) -> Result<Frequencies> {
    let w2 = rng.gen_range(0.2..2.0);
    let w1 = w2 + rng.gen_range(0.1..2.0);
    Frequencies::new(w1, w2)
}

fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> RealPhasePoint {
    RealPhasePoint::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

fn symplectic(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let (mut res, mut det) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let f = random_frequencies(rng)?;
        let m = build_m(&compute_coefficients(f, random_sign(rng))?);
        res = res.max(symplectic_residual(&m));
        det = det.max((m.det() - 1.0).norm());
    }
    Ok(vec![
        CheckRecord::at_most(
            "M^T Omega M = Omega over 50 frequency pairs",
            anchor::SYMPLECTIC,
            res,
            1e-12,
        ),
        CheckRecord::at_most(
            "det M = 1 over 50 frequency pairs",
            anchor::SYMPLECTIC,
            det,
            1e-12,
        ),
    ])
}

fn coefficient_identities(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let (mut uni, mut prod) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let f = random_frequencies(rng)?;
        let k = compute_coefficients(f, random_sign(rng))?;
        uni = uni.max((k.unimodularity() - 1.0).abs());
        let want = f.prod_sq() * k.b * k.b;
        prod = prod.max((k.a * k.c - want).abs() / want.abs().max(1.0));
    }
    let k = compute_coefficients(Frequencies::new(2f64.sqrt(), 1.0)?, Sign::Plus)?;
    let example = (k.a - 1.0)
        .abs()
        .max((k.b - 1.0).abs())
        .max((k.c - 2.0).abs());
    Ok(vec![
        CheckRecord::at_most("b(c - a) = 1", anchor::COEFFICIENTS, uni, 1e-12),
        CheckRecord::at_most("ac = w1^2 w2^2 b^2", anchor::COEFFICIENTS, prod, 1e-12),
        CheckRecord::at_most(
            "(a, b, c) = (1, 1, 2) at w = (sqrt 2, 1)",
            anchor::COEFFICIENTS,
            example,
            1e-12,
        ),
    ])
}

fn round_trip(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let (mut back, mut real) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let f = random_frequencies(rng)?;
        let k = compute_coefficients(f, random_sign(rng))?;
        let xi = random_point(rng);
        let x = to_complex(&xi, &k);
        let scale = 1.0 + k.a.abs().max(k.b.abs()).max(k.c.abs());
        let pull = to_real(&x, &k);
        back = back.max(pull.point.max_abs_diff(&xi).max(pull.max_imag) / scale);
        real = real.max(reality_residual(&x, &k).max / (scale * scale * scale));
    }
    let off = reality_residual(
        &ComplexPhasePoint::new(cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)),
        &PUCoefficients {
            a: 1.0,
            b: 1.0,
            c: 2.0,
            sign: Sign::Plus,
        },
    );
    Ok(vec![
        CheckRecord::at_most(
            "M^-1 M xi = xi for 1000 real points",
            anchor::REALITY,
            back,
            1e-12,
        ),
        CheckRecord::at_most(
            "images of real points satisfy the reality conditions",
            anchor::REALITY,
            real,
            1e-12,
        ),
        CheckRecord::exceeds(
            "point (1, 0, 0, 0) violates the reality conditions",
            anchor::REALITY,
            off.max,
            1.0,
        ),
    ])
}

fn classical_flow(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let f = sqrt2()?;
    let k = compute_coefficients(f, Sign::Plus)?;
    let xi0 = random_point(rng);
    let traj = integrate(
        &to_complex(&xi0, &k),
        f,
        IntegratorConfig::periods(f, 200, 10),
    )?;
    let drift = traj.energy_drift(f);
    let lag = lagrangian_identity_residual(&traj, f, &k)?;
    let dev = traj.decoupled_deviation(&xi0, f, &k);
    Ok(vec![
        CheckRecord::at_most("H_PU drift over 10 periods", anchor::CLASSICAL, drift, 1e-8),
        CheckRecord::at_most(
            "L_PU = L_xi + total derivative along the flow",
            anchor::CLASSICAL,
            lag,
            1e-8,
        ),
        CheckRecord::at_most(
            "xi projection solves two decoupled oscillators",
            anchor::CLASSICAL,
            dev,
            1e-6,
        ),
    ])
}

fn general_solution(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let f = random_frequencies(rng)?;
    let k = compute_coefficients(f, Sign::Plus)?;
    let x0 = to_complex(&random_point(rng), &k);
    let gs = GeneralSolutionCoeffs::from_initial(&x0, f)?;
    let traj = integrate(&x0, f, IntegratorConfig::periods(f, 400, 3))?;
    let (mut ode, mut dev) = (0.0f64, 0.0f64);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        ode = ode.max(ode_residual(&gs, f, *t));
        dev = dev.max(gs.state_at(f, *t).max_abs_diff(s));
    }
    let scale = 1.0 + f.prod_sq();
    Ok(vec![
        CheckRecord::at_most(
            "general solution satisfies the fourth-order equation",
            anchor::CLASSICAL,
            ode / scale,
            1e-10,
        ),
        CheckRecord::at_most(
            "integrated flow matches the general solution",
            anchor::CLASSICAL,
            dev,
            1e-8,
        ),
    ])
}

fn equal_frequency(_: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let mut violations = 0;
    for omega in [1.0, 0.5, 2.0] {
        let e = equal_freq_evolution_defect(omega)?;
        let ok = e.eigenvalues.len() == 2
            && e.defective
            && (e.eigenvalues[0] - cx(0.0, omega)).norm() < 1e-12
            && (e.eigenvalues[1] - cx(0.0, -omega)).norm() < 1e-12
            && e.algebraic_mult == [2, 2]
            && e.geometric_mult == [1, 1];
        violations += usize::from(!ok);
    }
    let f = sqrt2()?;
    let unequal = companion_eigenstructure(f.sum_sq(), f.prod_sq());
    let t = EqualFreqTransform::new(1.0, 1.0)?;
    let forward = symplectic_residual(&t.forward());
    let fb = (t.forward() * t.backward()).max_abs_diff(&ComplexMatrix4::identity());
    let inv = t
        .invariant_residuals()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(vec![
        CheckRecord::holds(
            "eigenvalues +-iw with algebraic multiplicity 2 and geometric 1",
            anchor::EQUAL_FREQUENCY,
            violations,
        ),
        CheckRecord::holds(
            "unequal frequencies are diagonalizable",
            anchor::EQUAL_FREQUENCY,
            usize::from(unequal.defective),
        ),
        CheckRecord::exceeds(
            "equal-frequency map is not symplectic",
            anchor::EQUAL_FREQUENCY,
            forward,
            0.1,
        ),
        CheckRecord::at_most(
            "forward times backward map is the identity",
            anchor::EQUAL_FREQUENCY,
            fb,
            1e-12,
        ),
        CheckRecord::at_most(
            "equal-frequency coefficient relations",
            anchor::EQUAL_FREQUENCY,
            inv,
            1e-12,
        ),
    ])
}

/// Number of entries of `table` that differ from the expected constants.
fn table_mismatches(
    model: &ExtendedModel,
    vars: &[(String, PhasePoly)],
    expected: &[(usize, usize, &str)],
) -> Result<usize> {
    let table = model.dirac_table(vars)?;
    let n = vars.len();
    let mut bad = 0;
    for i in 0..n {
        for j in 0..n {
            let want = match expected.iter().find(|e| (e.0, e.1) == (i, j)) {
                Some(e) => parse_poly(&model.space, e.2)?,
                None => match expected.iter().find(|e| (e.1, e.0) == (i, j)) {
                    Some(e) => -parse_poly(&model.space, e.2)?,
                    None => PhasePoly::zero(&model.space),
                },
            };
            bad += usize::from(!table[i][j].try_sub(&want)?.is_zero());
        }
    }
    Ok(bad)
}

/// `(x, z, Πx, Πz)` with `{x, Πx} = {z, Πz} = 1`.
const CANONICAL: [(usize, usize, &str); 2] = [(0, 2, "1"), (1, 3, "1")];

fn hamiltonian_mismatch(model: &ExtendedModel) -> Result<usize> {
    Ok(usize::from(
        !model
            .pu_hamiltonian()?
            .try_sub(&model.expected_hamiltonian)?
            .is_zero(),
    ))
}

fn dirac_unequal(_: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let m = unequal_extended()?;
    let reduced = table_mismatches(&m, &m.reduced, &[(0, 2, "1"), (1, 3, "1")])?;
    let canonical = table_mismatches(&m, &m.canonical, &CANONICAL)?;
    let want = [[rat(0, 1), rat(-1, 1)], [rat(1, 1), rat(0, 1)]];
    let inv = m.constraints.inverse();
    let c_bad = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .filter(|&(i, j)| inv[i][j] != want[i][j])
        .count();
    Ok(vec![
        CheckRecord::holds(
            "Dirac table {x,p0} = {xdd,p2} = 1, others 0",
            anchor::DIRAC,
            reduced,
        ),
        CheckRecord::holds(
            "inverse constraint matrix [[0,-1],[1,0]]",
            anchor::DIRAC,
            c_bad,
        ),
        CheckRecord::holds(
            "(x, z, Px, Pz) canonical under Dirac brackets",
            anchor::DIRAC,
            canonical,
        ),
        CheckRecord::holds(
            "reduced Hamiltonian equals H_PU",
            anchor::DIRAC,
            hamiltonian_mismatch(&m)?,
        ),
    ])
}

fn dirac_equal(_: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let m = equal_extended()?;
    let reduced = table_mismatches(
        &m,
        &m.reduced,
        &[(0, 2, "1"), (1, 2, "-1/2*w^2"), (1, 3, "1/2")],
    )?;
    let canonical = table_mismatches(&m, &m.canonical, &CANONICAL)?;
    Ok(vec![
        CheckRecord::holds("equal-frequency Dirac table", anchor::DIRAC_EQUAL, reduced),
        CheckRecord::holds(
            "equal-frequency canonical variables",
            anchor::DIRAC_EQUAL,
            canonical,
        ),
        CheckRecord::holds(
            "equal-frequency reduced Hamiltonian",
            anchor::DIRAC_EQUAL,
            hamiltonian_mismatch(&m)?,
        ),
    ])
}

fn generating_function(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let (mut residual, mut boundary, mut trivial) = (0usize, 0usize, 0usize);
    for _ in 0..4 {
        let w2sq = rat(rng.gen_range(1..20), rng.gen_range(1..10));
        let num = rng.gen_range(1..12) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let b = rat(num, rng.gen_range(1..12));
        let g = generating_data(&ExactCoeffs::from_b(w2sq, b)?)?;
        let r = generating_function_check(&g.f, &GF_COORDS, &GF_MOMENTA, &g.xi, &g.p)?;
        residual += usize::from(!r.all_zero());
        let bt = boundary_term_residual(
            &g.f,
            &GF_COORDS,
            &GF_MOMENTA,
            &g.xi,
            &g.p,
            &GF_DCOORDS,
            &GF_DMOMENTA,
        )?;
        boundary += usize::from(!bt.is_zero());
        let zero = generating_function_check(
            &PhasePoly::zero(&g.space),
            &GF_COORDS,
            &GF_MOMENTA,
            &g.xi,
            &g.p,
        )?;
        trivial += usize::from(zero.all_zero());
    }
    Ok(vec![
        CheckRecord::holds(
            "generating relations vanish identically",
            anchor::GENERATING,
            residual,
        ),
        CheckRecord::holds(
            "boundary term vanishes identically",
            anchor::GENERATING,
            boundary,
        ),
        CheckRecord::holds(
            "f = 0 does not generate the map",
            anchor::GENERATING,
            trivial,
        ),
    ])
}

const EPSILONS: [f64; 3] = [0.1, 0.3, 0.5];

fn cosc_orthonormality(_: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let quad = GaussHermite::new(200)?;
    let mut worst = 0.0f64;
    for e in EPSILONS {
        let e = eps(e)?;
        let states: Vec<WaveFn> = (0..=10)
            .map(|n| WaveFn::eigen(n, e))
            .collect::<Result<_>>()?;
        for (n, f) in states.iter().enumerate() {
            for (m, g) in states.iter().enumerate() {
                let want = if n == m { 1.0 } else { 0.0 };
                worst = worst.max((inner_product_mu(f, g, e, &quad)? - want).norm());
            }
        }
    }
    Ok(vec![CheckRecord::at_most(
        "<psi_n|psi_m>_mu = delta_nm for n, m <= 10",
        anchor::COSC_STATES,
        worst,
        1e-10,
    )])
}

fn cosc_schrodinger(_: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let grid = UniformGrid::new(-6.0, 6.0, 0.01)?;
    let mut worst = 0.0f64;
    for e in EPSILONS {
        for n in 0..=5 {
            worst = worst.max(schrodinger_residual_c(n, eps(e)?, grid)?);
        }
    }
    Ok(vec![CheckRecord::at_most(
        "psi_n solve the complexified eigenvalue equation, n <= 5",
        anchor::COSC_STATES,
        worst,
        1e-6,
    )])
}

fn euclidean_kernel(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let zero = eps(0.0)?;
    let mut worst = 0.0f64;
    for tau in [0.5, 1.0, 1.7, 3.0] {
        for _ in 0..5 {
            let (q2, q1) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let closed = propagator_q_complex(cx(q2, 0.0), cx(q1, 0.0), cx(0.0, -tau), zero)?;
            worst = worst.max((closed - oracle::euclidean_spectral_sum(q2, q1, tau, 200)).norm());
        }
    }
    Ok(vec![CheckRecord::at_most(
        "Euclidean kernel equals the 200-term spectral sum",
        anchor::COSC_KERNEL,
        worst,
        1e-8,
    )])
}

fn kernel_factorization(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let mut worst = 0.0f64;
    for e in EPSILONS {
        for _ in 0..5 {
            let (q2, q1, t) = (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.2..3.0),
            );
            let full = propagator_q(q2, q1, t, eps(e)?)?.value;
            let base = propagator_q(q2, q1, t, eps(0.0)?)?.value;
            let factor = (0.5 * e * (q2 * q2 - q1 * q1)).exp();
            worst = worst.max((full - base * factor).norm() / full.norm());
        }
    }
    Ok(vec![CheckRecord::at_most(
        "K_eps = exp(eps(q2^2 - q1^2)/2) K_0",
        anchor::COSC_KERNEL,
        worst,
        1e-15,
    )])
}

fn cosc_semigroup(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let quad = GaussHermite::new(120)?;
    let mut worst = 0.0f64;
    for e in EPSILONS {
        let (q2, q1) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (t1, t2) = (rng.gen_range(0.3..1.2), rng.gen_range(0.3..1.2));
        let got = compose_q(q2, q1, t1, t2, eps(e)?, &quad)?;
        let want = propagator_q(q2, q1, t1 + t2, eps(e)?)?.value;
        worst = worst.max((got - want).norm() / want.norm());
    }
    Ok(vec![CheckRecord::at_most(
        "coordinate kernel composes over intermediate times",
        anchor::COSC_KERNEL,
        worst,
        1e-6,
    )])
}

fn momentum_kernel(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let quad = GaussHermite::new(120)?;
    let mut worst = 0.0f64;
    for e in EPSILONS {
        let p2 = cx(rng.gen_range(-0.5..0.5), rng.gen_range(-0.2..0.2));
        let p1 = cx(rng.gen_range(-0.5..0.5), rng.gen_range(-0.2..0.2));
        let t = rng.gen_range(0.4..1.4);
        let direct = propagator_p(p2, p1, t, eps(e)?)?.value;
        let via = propagator_p_via_transform(p2, p1, t, eps(e)?, &quad)?;
        worst = worst.max((direct - via).norm());
    }
    Ok(vec![CheckRecord::at_most(
        "momentum kernel equals the double transform of the oscillator kernel",
        anchor::COSC_KERNEL,
        worst,
        1e-6,
    )])
}

fn cosc_operators(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let quad = GaussHermite::new(60)?;
    let f = GaussianState {
        center: rng.gen_range(-0.5..0.5),
        width: 0.8,
    };
    let g = GaussianState {
        center: rng.gen_range(-0.5..0.5),
        width: 0.8,
    };
    let (lhs, rhs) = completeness_check(f, g, eps(0.4)?, &quad)?;
    let mut comm = 0.0f64;
    for _ in 0..10 {
        let (t1, t2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        comm = comm.max((commutator_qq(t1, t2) - cx(0.0, (t2 - t1).sin())).norm());
        let e = eps(rng.gen_range(-0.9..0.9))?;
        let u = heisenberg_flow(t2 - t1, e);
        comm = comm.max((u[0][0] * u[1][1] - u[0][1] * u[1][0] - 1.0).norm());
    }
    Ok(vec![
        CheckRecord::at_most(
            "momentum completeness relation",
            anchor::COSC_KERNEL,
            (lhs - rhs).norm() / rhs.norm(),
            1e-8,
        ),
        CheckRecord::at_most(
            "[q(t1), q(t2)] = i sin(t2 - t1) and unimodular flow",
            anchor::COSC_KERNEL,
            comm,
            1e-14,
        ),
    ])
}

fn path_integral(_: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let (q2, q1, t) = (1.0, 0.0, 1.0);
    let e = eps(0.3)?;
    let exact = propagator_q(q2, q1, t, e)?.value;
    let err = |n: usize| -> Result<f64> {
        Ok((path_integral_kernel(q2, q1, t, e, n)? - exact).norm() / exact.norm())
    };
    let e1000 = err(1000)?;
    let order = (err(250)? / err(500)?).log2();
    Ok(vec![
        CheckRecord::at_most(
            "time-sliced kernel at N = 1000",
            anchor::PATH_INTEGRAL,
            e1000,
            1e-4,
        ),
        CheckRecord::at_least(
            "observed convergence order",
            anchor::PATH_INTEGRAL,
            order,
            1.9,
        ),
    ])
}

fn pu_spectrum(_: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let f = sqrt2()?;
    let levels = oracle::lowest_levels(f, oracle::DEFAULT_BASIS, 10)?;
    let table = puq::spectrum_table(f, 10);
    let worst = levels
        .iter()
        .zip(&table)
        .map(|(a, b)| (a - b.energy).abs())
        .fold(0.0f64, f64::max);
    let ground = puq::ground_state_residual(f, 6.0, 0.02)?;
    Ok(vec![
        CheckRecord::at_most(
            "lowest 10 levels of the 900-dimensional diagonalization",
            anchor::PU_SPECTRUM,
            worst,
            1e-8,
        ),
        CheckRecord::at_most(
            "ground state solves the oscillator equation",
            anchor::PU_SPECTRUM,
            ground,
            1e-6,
        ),
    ])
}

/// Kernel arguments over the real oscillator points `ξ` (ket) and `ξ'` (bra).
fn surface_args(ket: (f64, f64), bra: (f64, f64), k: &PUCoefficients) -> puq::KernelArgs {
    let (a, b, c) = (k.a, k.b, k.c);
    puq::KernelArgs::new(
        cx(b * bra.1, -b * bra.0),
        cx(a * bra.1, -c * bra.0),
        cx(b * ket.1, b * ket.0),
        cx(a * ket.1, c * ket.0),
    )
}

fn pu_coefficients(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let mut worst = 0.0f64;
    let mut q = 0.0f64;
    for _ in 0..100 {
        let f = random_frequencies(rng)?;
        let t = rng.gen_range(0.05..6.0);
        let (s1, s2) = ((f.omega1 * t).sin(), (f.omega2 * t).sin());
        if s1.abs().min(s2.abs()) < 1e-3 {
            continue;
        }
        let k = compute_coefficients(f, random_sign(rng))?;
        let ket = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let bra = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mehler = |w: f64, y: f64, x: f64| {
            cx(
                0.0,
                w * ((y * y + x * x) * (w * t).cos() - 2.0 * x * y) / (2.0 * (w * t).sin()),
            )
        };
        let want = mehler(f.omega1, bra.0, ket.0) + mehler(f.omega2, bra.1, ket.1);
        let got = puq::kernel_exponent_at(&surface_args(ket, bra, &k), t, f)?;
        worst = worst.max((got - want).norm() / want.norm().max(1.0));
        let kc = puq::kernel_coeffs(t, f)?;
        q = q.max((kc.q * kc.q * s1 * s2 - 1.0).norm());
    }
    Ok(vec![
        CheckRecord::at_most(
            "kernel exponent on the reality surface equals two oscillator exponents",
            anchor::PU_KERNEL,
            worst,
            1e-12,
        ),
        CheckRecord::at_most("Q^2 sin(w1 T) sin(w2 T) = 1", anchor::PU_KERNEL, q, 1e-12),
    ])
}

fn random_args(rng: &mut ChaCha8Rng, scale: f64) -> puq::KernelArgs {
    let mut z = || cx(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
    puq::KernelArgs::new(z(), z(), z(), z())
}

fn pu_schrodinger(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let f = sqrt2()?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let r = puq::schrodinger_residual_pu(&random_args(rng, 0.5), 1.0, f)?;
        worst = worst.max(r.ket).max(r.bra);
    }
    Ok(vec![CheckRecord::at_most(
        "kernel solves the Schrodinger equation in bra and ket variables",
        anchor::PU_KERNEL,
        worst,
        1e-5,
    )])
}

fn pu_semigroup(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let f = sqrt2()?;
    let k = compute_coefficients(f, Sign::Plus)?;
    let quad = GaussHermite::new(80)?;
    let (mut worst, mut norm) = (0.0f64, 0.0f64);
    for (t1, t2) in [(0.4, 0.7), (0.3, 0.5), (0.6, 0.9)] {
        let args = random_args(rng, 0.4);
        let got = puq::compose_pu(
            args.x2c, args.piz2c, args.x1, args.piz1, t1, t2, f, &k, &quad,
        )?;
        let want = puq::propagator_pu(&args, t1 + t2, f)?.value;
        worst = worst.max((got - want).norm() / want.norm());
        let fitted = puq::fit_normalization(&args, t1, t2, f, &k, &quad)?;
        let n = puq::kernel_normalization(f);
        norm = norm.max((fitted - n).norm() / n.norm());
    }
    Ok(vec![
        CheckRecord::at_most(
            "PU kernel composes under the reality-surface measure",
            anchor::PU_KERNEL,
            worst,
            1e-6,
        ),
        CheckRecord::at_most(
            "normalization fixed by composition",
            anchor::PU_KERNEL,
            norm,
            1e-6,
        ),
    ])
}

fn pu_closure(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let f = sqrt2()?;
    let mut worst = 0.0f64;
    let mut data = 0.0f64;
    for _ in 0..50 {
        let t = rng.gen_range(0.2..2.0);
        let t1 = rng.gen_range(-1.0..1.0);
        let closed = puq::heisenberg_closure(t, f)?;
        let solved = oracle::closure_by_linear_solve(t1, t, f)?;
        worst = worst.max(closed.max_abs_diff(&solved) / solved.max_abs().max(1.0));
        let amps = [0; 4].map(|_| cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let (inp, out) = oracle::boundary_data(amps, t1, t, f);
        let got = closed.mul_vec(&inp);
        let scale = out.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
        data = data.max((0..4).map(|i| (got[i] - out[i]).norm()).fold(0.0, f64::max) / scale);
    }
    Ok(vec![
        CheckRecord::at_most(
            "closed-form closure equals the linear solve",
            anchor::PU_KERNEL,
            worst,
            1e-10,
        ),
        CheckRecord::at_most(
            "closure maps boundary data of mode solutions",
            anchor::PU_KERNEL,
            data,
            1e-10,
        ),
    ])
}

fn pu_ground_state(rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let f = sqrt2()?;
    let k = compute_coefficients(f, Sign::Plus)?;
    let quad = GaussHermite::new(60)?;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let (p1, p2) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let got = puq::ground_state_momentum_transform(p1, p2, f, &k, &quad)?;
        worst = worst.max((got - puq::ground_state_momentum(p1, p2, f)).norm());
    }
    Ok(vec![CheckRecord::at_most(
        "ground state in the oscillator momentum basis",
        anchor::PU_SPECTRUM,
        worst,
        1e-10,
    )])
}

fn pu_caustic(_: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let f = Frequencies::new(2.0, 1.0)?;
    let named = match puq::kernel_coeffs(PI / 2.0, f) {
        Err(Error::Caustic { frequency, .. }) => frequency == "ω1",
        _ => false,
    };
    Ok(vec![CheckRecord::holds(
        "caustic at sin(w1 T) = 0 is reported",
        anchor::PU_KERNEL,
        usize::from(!named),
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn every_criterion_has_groups() {
        for k in 1..=11 {
            assert!(!criterion_groups(k).is_empty(), "criterion {k}");
        }
        let names: std::collections::HashSet<_> = GROUPS.iter().map(|g| g.name).collect();
        assert_eq!(names.len(), GROUPS.len());
    }

    #[test]
    fn core_suite_passes() {
        let records = run_suite(Suite::Core, 7, false);
        for r in &records {
            assert!(r.passed(), "{r:?}");
        }
    }
}
