//! Random-matrix campaigns: realizations x sweep times, aggregated
//! occupation statistics, and power-law scaling fits.

mod campaign;
mod fit;
mod normalize;
mod stats;

pub use campaign::{
    default_sweep_times, derive_seed, run_campaign, run_realization, CampaignOptions,
    CampaignSpec, NormalizationMode, RealizationRecord, DEFAULT_Z,
};
pub use fit::{fit_power_law, ScalingFit};
pub use normalize::apply_fig1b_normalization;
pub use stats::{
    EnsembleStatistics, FitsReport, MeanStderr, FIT_MIN_POINTS, FIT_SATURATION_CUTOFF,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid campaign specification: {0}")]
    InvalidSpec(String),
    #[error("power-law fit needs at least 4 in-window points, got {points}")]
    FitTooFewPoints { points: usize },
    #[error("power-law fit requires positive values, got {value} at T = {t}")]
    FitNonPositive { t: f64, value: f64 },
    #[error("power-law fit is degenerate (all T equal)")]
    FitDegenerate,
    #[error("level {level} is not tracked by this campaign")]
    LevelNotTracked { level: usize },
    #[error("spectrum has zero mean spacing ({mean_spacing}); cannot normalize")]
    DegenerateSpectrum { mean_spacing: f64 },
    #[error("{failed} of {total} realizations failed (more than 5%)")]
    TooManyFailures { failed: usize, total: usize },
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Hamiltonian(#[from] crate::hamiltonian::HamiltonianError),
    #[error(transparent)]
    Integration(#[from] crate::pechukas::IntegrationError),
    #[error(transparent)]
    Transition(#[from] crate::transitions::TransitionError),
}
