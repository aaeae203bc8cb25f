//! Numerical and exact-algebra toolkit for the Pais-Uhlenbeck oscillator
//! and its complex canonical map onto two ordinary oscillators.
//!
//! Modules:
//! - [`transform`]: coefficients, the symplectic matrix `M`, reality conditions.
//! - [`classical`]: closed-form and integrated classical flow, Hamiltonian
//!   and Lagrangian identities, the equal-frequency degeneracy.
//! - [`brackets`]: exact polynomial phase-space algebra with Poisson and
//!   Dirac brackets.
//! - [`cosc`]: the complexified harmonic oscillator and its kernels.
//! - [`puq`]: the quantum PU sector.
//! - [`oracle`], [`verify`], [`report`]: independent reference computations
//!   and the check suites built on them.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::too_many_arguments,
    clippy::needless_range_loop
)]

pub mod brackets;
pub mod classical;
pub mod cosc;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod puq;
pub mod quadrature;
pub mod report;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix4;
pub use transform::{
    build_m, compute_coefficients, reality_residual, symplectic_residual, to_complex, to_real,
    ComplexPhasePoint, Frequencies, PUCoefficients, RealPhasePoint, Sign,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
