//! Experimental mean-field solver for the truncated kinetic description of
//! the level gas: free streaming plus a principal-value cubic-kernel force,
//! with an optional pairwise exchange collision term. Validated against
//! binned direct gas simulations; the collision constant and exchange kernel
//! are phenomenological knobs, not fitted to any published number.

mod grid;
mod solver;

pub use grid::{Axis, PhaseSpaceDistribution};
pub use solver::{estimate_gamma, evolve_kinetic, mean_field_force, step_kinetic, KineticConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KineticError {
    #[error("invalid axis: min {min}, max {max}, cells {cells}")]
    InvalidAxis { min: f64, max: f64, cells: usize },
    #[error("distribution needs at least one label")]
    NoLabels,
    #[error("invalid kinetic configuration: {0}")]
    InvalidConfig(String),
    #[error("step {dlambda:e} violates the CFL bound; largest admissible is {admissible:e}")]
    CflViolation { dlambda: f64, admissible: f64 },
    #[error(
        "collision step {dlambda:e} drove the distribution negative ({undershoot:e}); reduce the step"
    )]
    CollisionStepTooLarge { dlambda: f64, undershoot: f64 },
    #[error("kinetic march exceeded {steps} steps")]
    StepBudgetExceeded { steps: usize },
    #[error("gamma estimate needs at least one sample")]
    NoSamples,
}
