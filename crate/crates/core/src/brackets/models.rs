//! Ready-made phase spaces for the PU constructions: the second-order jet
//! Lagrangian, the third-order extended Lagrangians for unequal and equal
//! frequencies, and the generating-function data.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::dirac::{dirac_bracket, ConstraintSet};
use super::mechanics::{canonical_hamiltonian, ostrogradsky_momenta};
use super::parse::parse_poly;
use super::poly::{Jets, PhasePoly, PhaseSpace};
use crate::error::{Error, Result};

const JETS: [&str; 7] = ["x", "xd", "xdd", "xddd", "x4", "x5", "x6"];

/// `L_PU = −ẍ²/2 + (ω1²+ω2²)ẋ²/2 − ω1²ω2² x²/2` on a bare jet space.
pub fn pu_lagrangian() -> Result<(PhasePoly, Jets)> {
    let mut vars = vec!["w1", "w2"];
    vars.extend(JETS);
    let space = PhaseSpace::new(&vars, &[], None)?;
    let jets = Jets::new(&space, &JETS)?;
    let l = parse_poly(
        &space,
        "-1/2*xdd^2 + 1/2*(w1^2 + w2^2)*xd^2 - 1/2*w1^2*w2^2*x^2",
    )?;
    Ok((l, jets))
}

/// A third-order Lagrangian on the extended phase space
/// `(x, ẋ, ẍ; p0, p1, p2)` together with its reduction data.
#[derive(Debug, Clone)]
pub struct ExtendedModel {
    pub space: Arc<PhaseSpace>,
    pub jets: Jets,
    pub lagrangian: PhasePoly,
    /// Momenta `p0, p1, p2` as jet polynomials.
    pub momenta: Vec<PhasePoly>,
    /// `p_i − Π_i` for the momenta free of `x⃛`.
    pub constraints: ConstraintSet,
    /// Coordinates of the reduced space.
    pub reduced: Vec<(String, PhasePoly)>,
    /// Canonical variables `(x, z, Πx, Πz)` in extended-space terms.
    pub canonical: Vec<(String, PhasePoly)>,
    /// Solutions of the constraints used to eliminate `ẋ` and `p1`.
    pub eliminations: Vec<(String, PhasePoly)>,
    /// The PU phase space `(x, z, Px, Pz)`.
    pub pu_space: Arc<PhaseSpace>,
    /// Images of the reduced coordinates in the PU space.
    pub to_pu: Vec<(String, PhasePoly)>,
    /// The PU Hamiltonian this reduction must reproduce.
    pub expected_hamiltonian: PhasePoly,
}

fn named(space: &Arc<PhaseSpace>, items: &[(&str, &str)]) -> Result<Vec<(String, PhasePoly)>> {
    items
        .iter()
        .map(|(n, e)| Ok((n.to_string(), parse_poly(space, e)?)))
        .collect()
}

fn build(
    params: &[&str],
    lagrangian: &str,
    canonical: &[(&str, &str)],
    eliminations: &[(&str, &str)],
    to_pu: &[(&str, &str)],
    expected: &str,
) -> Result<ExtendedModel> {
    let mut vars: Vec<&str> = params.to_vec();
    vars.extend(JETS);
    vars.extend(["p0", "p1", "p2"]);
    let space = PhaseSpace::new(&vars, &[("x", "p0"), ("xd", "p1"), ("xdd", "p2")], None)?;
    let jets = Jets::new(&space, &JETS)?;
    let l = parse_poly(&space, lagrangian)?;
    let momenta = ostrogradsky_momenta(&l, &jets)?;
    let xddd = space.index("xddd")?;
    let mut constraints = Vec::new();
    for (i, m) in momenta.iter().enumerate() {
        let higher = (3..JETS.len()).any(|k| m.depends_on(space.index(JETS[k]).unwrap_or(xddd)));
        if !higher {
            constraints.push(PhasePoly::var(&space, &format!("p{i}"))? - m);
        }
    }
    let constraints = ConstraintSet::new(constraints)?;
    let mut pu_vars: Vec<&str> = params.to_vec();
    pu_vars.extend(["x", "z", "Px", "Pz"]);
    let pu_space = PhaseSpace::new(&pu_vars, &[("x", "Px"), ("z", "Pz")], None)?;
    Ok(ExtendedModel {
        reduced: named(
            &space,
            &[("x", "x"), ("xdd", "xdd"), ("p0", "p0"), ("p2", "p2")],
        )?,
        canonical: named(&space, canonical)?,
        eliminations: named(&space, eliminations)?,
        to_pu: named(&pu_space, to_pu)?,
        expected_hamiltonian: parse_poly(&pu_space, expected)?,
        space,
        jets,
        lagrangian: l,
        momenta,
        constraints,
        pu_space,
    })
}

/// Unequal frequencies: `L_T = L_PU + d(ẋẍ)/dt`.
pub fn unequal_extended() -> Result<ExtendedModel> {
    build(
        &["w1", "w2"],
        "1/2*xdd^2 + 1/2*(w1^2 + w2^2)*xd^2 - 1/2*w1^2*w2^2*x^2 + xd*xddd",
        &[("x", "x"), ("z", "p2"), ("Px", "p0"), ("Pz", "-xdd")],
        &[("xd", "p2"), ("p1", "0")],
        &[("x", "x"), ("xdd", "-Pz"), ("p0", "Px"), ("p2", "z")],
        "-1/2*Pz^2 - 1/2*(w1^2 + w2^2)*z^2 + z*Px + 1/2*w1^2*w2^2*x^2",
    )
}

/// Equal frequencies: `L̃_T = L̃_PU + d((ẍ − ω²x)ẋ/2)/dt`.
pub fn equal_extended() -> Result<ExtendedModel> {
    build(
        &["w"],
        "1/2*w^2*xd^2 - 1/2*w^4*x^2 + 1/2*xddd*xd - 1/2*w^2*x*xdd",
        &[
            ("x", "x"),
            ("z", "2*p2"),
            ("Px", "p0 + w^2*p2"),
            ("Pz", "-xdd"),
        ],
        &[("xd", "2*p2"), ("p1", "-1/2*(w^2*x + xdd)")],
        &[
            ("x", "x"),
            ("xdd", "-Pz"),
            ("p0", "Px - 1/2*w^2*z"),
            ("p2", "1/2*z"),
        ],
        "-1/2*Pz^2 - w^2*z^2 + Px*z + 1/2*w^4*x^2",
    )
}

impl ExtendedModel {
    /// Dirac brackets among the given named quantities.
    pub fn dirac_table(&self, vars: &[(String, PhasePoly)]) -> Result<Vec<Vec<PhasePoly>>> {
        vars.iter()
            .map(|(_, a)| {
                vars.iter()
                    .map(|(_, b)| dirac_bracket(a, b, &self.constraints))
                    .collect()
            })
            .collect()
    }

    /// Canonical Hamiltonian with the constraints imposed strongly, in the
    /// reduced coordinates.
    pub fn reduced_hamiltonian(&self) -> Result<PhasePoly> {
        let h = canonical_hamiltonian(&self.lagrangian, &self.jets, &["p0", "p1", "p2"])?;
        let subs: Vec<(&str, PhasePoly)> = self
            .eliminations
            .iter()
            .map(|(n, p)| (n.as_str(), p.clone()))
            .collect();
        h.substitute(&subs)
    }

    /// The reduced Hamiltonian rewritten in the PU variables.
    pub fn pu_hamiltonian(&self) -> Result<PhasePoly> {
        let subs: Vec<(&str, PhasePoly)> = self
            .to_pu
            .iter()
            .map(|(n, p)| (n.as_str(), p.clone()))
            .collect();
        self.reduced_hamiltonian()?
            .substitute_into(&self.pu_space, &subs)
    }
}

/// Rational transformation constants with `b(c − a) = 1` built in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCoeffs {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

impl ExactCoeffs {
    /// `a = ω2² b`, `c = a + 1/b`.
    pub fn from_b(w2sq: BigRational, b: BigRational) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::ZeroParameter);
        }
        let a = &w2sq * &b;
        let c = &a + BigRational::one() / &b;
        Ok(Self { a, b, c })
    }

    pub fn w1_sq(&self) -> BigRational {
        &self.c / &self.b
    }

    pub fn w2_sq(&self) -> BigRational {
        &self.a / &self.b
    }
}

/// Extended phase space `(x, z; Px, Pz)` with variation symbols and the
/// oscillator maps `ξ(Q, Π)`, `P(Q, Π)`.
#[derive(Debug, Clone)]
pub struct GeneratingData {
    pub space: Arc<PhaseSpace>,
    pub f: PhasePoly,
    pub xi: Vec<PhasePoly>,
    pub p: Vec<PhasePoly>,
}

pub const GF_COORDS: [&str; 2] = ["x", "z"];
pub const GF_MOMENTA: [&str; 2] = ["Px", "Pz"];
pub const GF_DCOORDS: [&str; 2] = ["dx", "dz"];
pub const GF_DMOMENTA: [&str; 2] = ["dPx", "dPz"];

pub fn generating_data(k: &ExactCoeffs) -> Result<GeneratingData> {
    let space = PhaseSpace::new(
        &["x", "z", "Px", "Pz", "dx", "dz", "dPx", "dPz"],
        &[("x", "Px"), ("z", "Pz")],
        Some("I"),
    )?;
    let c = |r: &BigRational| PhasePoly::constant(&space, r.clone());
    let v = |n: &str| PhasePoly::var(&space, n);
    let i = PhasePoly::imag(&space)?;
    let (x, z, px, pz) = (v("x")?, v("z")?, v("Px")?, v("Pz")?);
    let xi1 = &i * &c(&k.a) * &x - &i * &c(&k.b) * &pz;
    let xi2 = &c(&k.c) * &x - &c(&k.b) * &pz;
    let p1 = -(&i * &c(&k.c) * &z) + &i * &c(&k.b) * &px;
    let p2 = -(&c(&k.a) * &z) + &c(&k.b) * &px;
    let f = -(&z * &pz);
    Ok(GeneratingData {
        space,
        f,
        xi: vec![xi1, xi2],
        p: vec![p1, p2],
    })
}
