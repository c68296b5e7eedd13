//! Avoided-crossing detection, Landau-Zener exchange probabilities, and
//! occupation-matrix transport along a trajectory.

mod events;
mod lz;
mod occupation;

pub use events::{detect_anticrossings, write_events_csv, AnticrossingEvent};
pub use lz::{lz_probability, SweepSpec};
pub use occupation::{monte_carlo_occupations, propagate_occupations, OccupationMatrix};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransitionError {
    #[error("sweep must have positive total time and hbar, got T = {total_time}, hbar = {hbar}")]
    InvalidSweep { total_time: f64, hbar: f64 },
    #[error("Landau-Zener inputs must be nonnegative, got delta_min = {delta_min}, coupling = {coupling}")]
    InvalidLzInput { delta_min: f64, coupling: f64 },
    #[error("trajectory has only {nodes} nodes; event detection needs at least 3")]
    TrajectoryTooShort { nodes: usize },
    #[error("events are not ordered by decreasing lambda: {first} before {second}")]
    UnorderedEvents { first: f64, second: f64 },
    #[error("event pair {pair} out of range for {n_levels} levels")]
    EventOutOfRange { pair: usize, n_levels: usize },
}
