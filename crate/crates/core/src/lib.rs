//! Simulation of adiabatic quantum evolution through the Pechukas gas picture.
//!
//! A parametrized Hamiltonian `H(lambda) = H0 + lambda * Z * Hb` is mapped onto
//! the classical dynamics of a 1D gas of level "particles" with inverse-cube
//! repulsion mediated by relative angular momenta. The crate provides:
//!
//! - [`hamiltonian`]: Hermitian matrix builders (random ensembles, the CNOT
//!   gate Hamiltonian, file input) and gas initial conditions at `lambda = 1`.
//! - [`pechukas`]: the gas equations of motion and an adaptive embedded
//!   Runge-Kutta integrator with dense output, plus a direct-diagonalization
//!   oracle for validation.
//! - [`transitions`]: avoided-crossing detection, Landau-Zener probabilities,
//!   and occupation-matrix transport.
//! - [`ensemble`]: random-matrix campaigns over realizations and sweep times,
//!   with power-law scaling fits.
//! - [`kinetic`]: an experimental mean-field phase-space solver for the
//!   truncated kinetic description of large gases.

pub mod ensemble;
pub mod hamiltonian;
pub mod kinetic;
pub mod pechukas;
pub mod transitions;

pub use num_complex::Complex64;
