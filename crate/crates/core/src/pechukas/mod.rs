//! The level gas: equations of motion, adaptive integration with dense
//! output, conserved-quantity monitors, and the diagonalization oracle.

mod integrator;
mod oracle;
mod rhs;
mod state;
mod trajectory;

pub use integrator::{integrate, IntegratorConfig};
pub use oracle::{track_spectrum_oracle, ORACLE_DIM_LIMIT};
pub use rhs::{derivatives, Derivatives};
pub use state::{conserved, ConservedQuantities, PechukasState};
pub use trajectory::{StepNode, StepStats, Trajectory, TrajectoryMetadata, TrajectorySample};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegrationError {
    #[error("levels {lower} and {upper} have coincident positions at lambda = {lambda}")]
    CoincidentPositions {
        lower: usize,
        upper: usize,
        lambda: f64,
    },
    #[error(
        "step size underflow at lambda = {lambda}: required step below {min_step:e}; \
         the closest coupled pair is ({lower}, {upper}) with gap {gap:e}"
    )]
    StepUnderflow {
        lambda: f64,
        min_step: f64,
        lower: usize,
        upper: usize,
        gap: f64,
    },
    #[error("non-finite state encountered at lambda = {lambda}")]
    NonFinite { lambda: f64 },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("oracle limited to dimension {limit}, got {dim}")]
    OracleDimension { dim: usize, limit: usize },
    #[error(transparent)]
    Hamiltonian(#[from] crate::hamiltonian::HamiltonianError),
}
