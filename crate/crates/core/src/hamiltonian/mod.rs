//! Hermitian Hamiltonian construction, diagonalization, and Pechukas-gas
//! initial conditions.

mod cnot;
mod diag;
mod init;
mod matrix;
mod sample;

pub use cnot::{build_cnot, cnot_bias_hb, cnot_problem, CnotConfig, CNOT_DIM};
pub use diag::{diagonalize, Spectrum};
pub use init::{
    initial_conditions_exact, initial_conditions_perturbative, DEGENERACY_TOL, MOMENTUM_SNAP_TOL,
};
pub use matrix::{HermitianMatrix, ProblemDefinition};
pub use sample::{sample_ensemble, EnsembleKind, EnsembleSpec, HbKind};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension {dim} is below the minimum of 2")]
    DimensionTooSmall { dim: usize },
    #[error("H0 and Hb dimensions differ: {h0} vs {hb}")]
    DimensionMismatch { h0: usize, hb: usize },
    #[error("bias scale Z must be positive, got {z}")]
    InvalidScale { z: f64 },
    #[error("hbar must be positive, got {hbar}")]
    InvalidHbar { hbar: f64 },
    #[error("sigma_h0 must be positive, got {sigma}")]
    InvalidSigma { sigma: f64 },
    #[error("matrix file is not Hermitian: max|M - M^dagger| = {violation:e} > 1e-12")]
    NotHermitian { violation: f64 },
    #[error("failed to parse matrix file: {0}")]
    Parse(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("eigensolver did not converge for a {dim}x{dim} matrix after {max_iter} iterations")]
    EigenNonConvergence { dim: usize, max_iter: usize },
    #[error(
        "H(1) is degenerate: levels {lower} and {} are separated by {gap:e} (tolerance {tol:e})",
        lower + 1
    )]
    DegenerateAtStart { lower: usize, gap: f64, tol: f64 },
    #[error(
        "Hb is degenerate: levels {lower} and {} are separated by {gap:e} (tolerance {tol:e}); \
         first-order nondegenerate perturbation theory does not apply",
        lower + 1
    )]
    DegenerateBias { lower: usize, gap: f64, tol: f64 },
    #[error("perturbative initial conditions support only order 1, got {order}")]
    UnsupportedOrder { order: usize },
}
