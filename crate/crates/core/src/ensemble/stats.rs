use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fit::{fit_power_law, ScalingFit};
use super::CampaignError;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
}

/// Aggregated campaign output across realizations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleStatistics {
    pub n_levels: usize,
    /// 1-based tracked levels, aligned with the outer axis of the maps.
    pub tracked_levels: Vec<usize>,
    pub sweep_times: Vec<f64>,
    /// `[tracked][sweep]` mean survival `P(n|n)` with standard error.
    pub survival: Vec<Vec<MeanStderr>>,
    /// `[tracked][sweep]` mean squared displacement from the start level.
    pub deviation: Vec<Vec<f64>>,
    /// `[tracked][sweep][level]` mean final distribution `P(.|n0)`.
    pub final_distribution: Vec<Vec<Vec<f64>>>,
    /// Per-level mean number of counted avoided crossings (all levels).
    pub crossing_counts: Vec<f64>,
    pub mean_total_events: f64,
    pub realizations_completed: usize,
    pub failed_realizations: Vec<(usize, String)>,
}

/// Fraction of the survival curve treated as saturated by the fit window.
pub const FIT_SATURATION_CUTOFF: f64 = 0.9;
/// A scaling fit never uses fewer sweeps than this; if the cutoff leaves too
/// few points the fastest sweeps are kept regardless.
pub const FIT_MIN_POINTS: usize = 4;

impl EnsembleStatistics {
    fn tracked_index(&self, level: usize) -> Option<usize> {
        self.tracked_levels.iter().position(|&n| n == level)
    }

    pub fn survival_points(&self, level: usize) -> Option<Vec<(f64, f64)>> {
        let ti = self.tracked_index(level)?;
        Some(
            self.sweep_times
                .iter()
                .zip(self.survival[ti].iter())
                .map(|(&t, ms)| (t, ms.mean))
                .collect(),
        )
    }

    pub fn deviation_points(&self, level: usize) -> Option<Vec<(f64, f64)>> {
        let ti = self.tracked_index(level)?;
        Some(
            self.sweep_times
                .iter()
                .zip(self.deviation[ti].iter())
                .map(|(&t, &d)| (t, d))
                .collect(),
        )
    }

    /// Sweeps a level's fit uses: everything below the saturation cutoff,
    /// topped up with the fastest sweeps to reach the minimum point count.
    fn fit_selection(&self, points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut sorted: Vec<(f64, f64)> = points.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut selected: Vec<(f64, f64)> = sorted
            .iter()
            .copied()
            .filter(|&(_, v)| v <= FIT_SATURATION_CUTOFF)
            .collect();
        if selected.len() < FIT_MIN_POINTS {
            selected = sorted.into_iter().take(FIT_MIN_POINTS).collect();
        }
        selected
    }

    /// Power-law fit of the survival curve of one tracked level.
    pub fn fit_survival(&self, level: usize) -> Result<ScalingFit, CampaignError> {
        let points = self
            .survival_points(level)
            .ok_or(CampaignError::LevelNotTracked { level })?;
        let selected = self.fit_selection(&points);
        fit_power_law(&selected, (0.0, f64::INFINITY), level)
    }

    /// Power-law fit of the deviation curve over the same sweep selection as
    /// the survival fit of that level.
    pub fn fit_deviation(&self, level: usize) -> Result<ScalingFit, CampaignError> {
        let survival = self
            .survival_points(level)
            .ok_or(CampaignError::LevelNotTracked { level })?;
        let deviation = self
            .deviation_points(level)
            .ok_or(CampaignError::LevelNotTracked { level })?;
        let window: Vec<f64> = self.fit_selection(&survival).iter().map(|p| p.0).collect();
        let selected: Vec<(f64, f64)> = deviation
            .into_iter()
            .filter(|(t, _)| window.contains(t))
            .collect();
        fit_power_law(&selected, (0.0, f64::INFINITY), level)
    }

    pub fn write_survival_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "level,inv_T,mean,stderr")?;
        for (ti, &level) in self.tracked_levels.iter().enumerate() {
            for (t, ms) in self.sweep_times.iter().zip(self.survival[ti].iter()) {
                writeln!(f, "{level},{},{},{}", 1.0 / t, ms.mean, ms.stderr)?;
            }
        }
        Ok(())
    }

    pub fn write_deviation_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "n0,inv_T,msd")?;
        for (ti, &level) in self.tracked_levels.iter().enumerate() {
            for (t, d) in self.sweep_times.iter().zip(self.deviation[ti].iter()) {
                writeln!(f, "{level},{},{}", 1.0 / t, d)?;
            }
        }
        Ok(())
    }

    pub fn write_crossings_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "level,mean_count")?;
        for (m, c) in self.crossing_counts.iter().enumerate() {
            writeln!(f, "{},{}", m + 1, c)?;
        }
        Ok(())
    }

    pub fn write_distribution_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "n0,inv_T,level,p")?;
        for (ti, &n0) in self.tracked_levels.iter().enumerate() {
            for (t, col) in self.sweep_times.iter().zip(self.final_distribution[ti].iter()) {
                for (m, p) in col.iter().enumerate() {
                    writeln!(f, "{n0},{},{},{}", 1.0 / t, m + 1, p)?;
                }
            }
        }
        Ok(())
    }

    /// Survival and deviation fits for every tracked level, serialized as
    /// the `fits.json` artifact. Levels whose deviation never leaves zero
    /// are reported without a deviation fit.
    pub fn fits_report(&self) -> FitsReport {
        let mut survival = Vec::new();
        let mut deviation = Vec::new();
        let mut errors = Vec::new();
        for &level in &self.tracked_levels {
            match self.fit_survival(level) {
                Ok(fit) => survival.push(fit),
                Err(e) => errors.push(format!("survival level {level}: {e}")),
            }
            match self.fit_deviation(level) {
                Ok(fit) => deviation.push(fit),
                Err(e) => errors.push(format!("deviation level {level}: {e}")),
            }
        }
        FitsReport {
            survival,
            deviation,
            errors,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitsReport {
    pub survival: Vec<ScalingFit>,
    pub deviation: Vec<ScalingFit>,
    pub errors: Vec<String>,
}

impl FitsReport {
    pub fn survival_gamma(&self, level: usize) -> Option<f64> {
        self.survival.iter().find(|f| f.level == level).map(|f| f.gamma)
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self).expect("report serializes"))
    }
}
