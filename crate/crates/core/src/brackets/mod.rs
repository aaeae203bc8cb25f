//! Exact polynomial phase-space algebra.
//!
//! Polynomials carry `BigRational` coefficients over an explicitly declared
//! list of variables. Frequencies are symbols without a conjugate partner,
//! so brackets depending on them stay exact. Printing uses a fixed
//! graded-lex order, largest monomial first.

mod dirac;
mod mechanics;
pub mod models;
mod parse;
mod poly;

pub use dirac::{constraint_matrix, dirac_bracket, ConstraintSet};
pub use mechanics::{
    boundary_term_residual, canonical_hamiltonian, generating_function_check, ostrogradsky_momenta,
    GeneratingResiduals,
};
pub use parse::parse_poly;
pub use poly::{poisson_bracket, rat, Jets, Monomial, PhasePoly, PhaseSpace};
