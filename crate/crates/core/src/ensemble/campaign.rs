use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::{initial_conditions_exact, sample_ensemble, EnsembleKind, EnsembleSpec, HbKind};
use crate::pechukas::{integrate, IntegratorConfig};
use crate::transitions::{detect_anticrossings, propagate_occupations, AnticrossingEvent, SweepSpec};

use super::normalize::apply_fig1b_normalization;
use super::stats::{EnsembleStatistics, MeanStderr};
use super::CampaignError;

/// How the sampled problem's energy scale is fixed before the sweep study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalizationMode {
    /// Use the sampled energies as drawn (scale set by `z` and `sigma_h0`).
    Raw,
    /// Rescale once so the mean spacing of `H0` is `hbar / T_reference`.
    Fig1b,
}

/// Default inverse sweep times: `1/T in {1, 2.5, 5, 10, 25, 50, 75} x 1e-3`.
pub fn default_sweep_times() -> Vec<f64> {
    [1e-3, 2.5e-3, 5e-3, 1e-2, 2.5e-2, 5e-2, 7.5e-2]
        .iter()
        .map(|inv| 1.0 / inv)
        .collect()
}

/// Full specification of an ensemble campaign over realizations and sweeps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub ensemble: EnsembleSpec,
    pub realizations: usize,
    /// Sweep durations T; the trajectory is integrated once per realization
    /// and reused for every T (the gas flow does not see the sweep speed).
    pub sweep_times: Vec<f64>,
    pub z: f64,
    pub normalization: NormalizationMode,
    /// 1-based level indices whose occupation statistics are tracked.
    pub tracked_levels: Vec<usize>,
    pub seed: u64,
    pub integrator: IntegratorConfig,
    pub hbar: f64,
    /// An avoided crossing is counted when its exchange probability at the
    /// reference sweep exceeds this threshold.
    pub count_threshold: f64,
    /// Index into `sweep_times` of the reference sweep; defaults to the
    /// middle of the grid.
    pub count_reference_index: usize,
}

/// Default bias scale. Both `H0` fluctuations (through the `0.1 Z` rule) and
/// the bias spacing scale with `Z`, so this sets the absolute energy scale;
/// the default places the Landau-Zener crossover of a 50-level gas inside
/// the default `1/T` grid, with saturation below `1/T = 0.01`.
pub const DEFAULT_Z: f64 = 7500.0;

impl CampaignSpec {
    /// Campaign with the default grid, tracking the standard level set.
    pub fn new(dim: usize, realizations: usize, seed: u64) -> Self {
        let z = DEFAULT_Z;
        let sweep_times = default_sweep_times();
        let tracked: Vec<usize> = [1usize, 2, 5, 10, 25, 40, 45, 49, 50]
            .iter()
            .copied()
            .filter(|&n| n <= dim)
            .collect();
        let mut tracked = tracked;
        if !tracked.contains(&dim) {
            tracked.push(dim);
        }
        Self {
            ensemble: EnsembleSpec {
                dim,
                ensemble_kind: EnsembleKind::Gue,
                // r.m.s. fluctuation = 0.1 x mean spacing of Z Hb (the bias
                // is normalized to unit spacing before the Z multiplier)
                sigma_h0: 0.1 * z,
                hb_kind: HbKind::RandomSameEnsemble,
                seed,
            },
            realizations,
            count_reference_index: sweep_times.len() / 2,
            sweep_times,
            z,
            normalization: NormalizationMode::Raw,
            tracked_levels: tracked,
            seed,
            integrator: IntegratorConfig::default(),
            hbar: 1.0,
            count_threshold: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.realizations < 1 {
            return Err(CampaignError::InvalidSpec("realizations must be >= 1".into()));
        }
        if self.sweep_times.is_empty() || self.sweep_times.iter().any(|&t| !(t > 0.0)) {
            return Err(CampaignError::InvalidSpec(
                "sweep_times must be nonempty and positive".into(),
            ));
        }
        if self.count_reference_index >= self.sweep_times.len() {
            return Err(CampaignError::InvalidSpec(format!(
                "count_reference_index {} out of range",
                self.count_reference_index
            )));
        }
        for &n in &self.tracked_levels {
            if n == 0 || n > self.ensemble.dim {
                return Err(CampaignError::InvalidSpec(format!(
                    "tracked level {n} out of range for {} levels",
                    self.ensemble.dim
                )));
            }
        }
        self.ensemble.validate()?;
        Ok(())
    }

    /// Stable fingerprint of everything that affects a single realization,
    /// used to guard checkpoint reuse.
    pub fn digest(&self) -> u64 {
        let mut probe = self.clone();
        probe.realizations = 0; // extending a campaign may reuse checkpoints
        let json = serde_json::to_string(&probe).expect("spec serializes");
        fnv1a64(json.as_bytes())
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-realization seed; independent of worker scheduling.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ (index + 1).wrapping_mul(0x9e3779b97f4a7c15))
}

/// Everything retained from one realization; serialized for crash resume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub index: usize,
    pub seed: u64,
    pub spec_digest: u64,
    /// `P(n|n)` for each tracked level and sweep time.
    pub survival: Vec<Vec<f64>>,
    /// Mean squared displacement for each tracked level and sweep time.
    pub msd: Vec<Vec<f64>>,
    /// Full final distribution columns `P(.|n0)` per tracked level and T.
    pub columns: Vec<Vec<Vec<f64>>>,
    /// Per-level counted avoided crossings at the reference sweep.
    pub counts: Vec<f64>,
    pub total_events: usize,
    pub normalization_factor: f64,
}

/// Run one realization: sample, normalize, integrate once, then apply every
/// sweep time to the same trajectory.
pub fn run_realization(
    spec: &CampaignSpec,
    index: usize,
) -> Result<RealizationRecord, CampaignError> {
    let seed = derive_seed(spec.seed, index as u64);
    let ens = EnsembleSpec {
        seed,
        ..spec.ensemble.clone()
    };
    let problem = sample_ensemble(&ens, spec.z)?;
    let reference_sweep =
        SweepSpec::with_hbar(spec.sweep_times[spec.count_reference_index], spec.hbar)?;
    let (problem, normalization_factor) = match spec.normalization {
        NormalizationMode::Raw => (problem, 1.0),
        NormalizationMode::Fig1b => apply_fig1b_normalization(&problem, &reference_sweep)?,
    };
    let s0 = initial_conditions_exact(&problem)?;
    let traj = integrate(&problem, &s0, &spec.integrator)?;
    let events = detect_anticrossings(&traj, &reference_sweep)?;

    let n = spec.ensemble.dim;
    let mut survival = vec![Vec::with_capacity(spec.sweep_times.len()); spec.tracked_levels.len()];
    let mut msd = vec![Vec::with_capacity(spec.sweep_times.len()); spec.tracked_levels.len()];
    let mut columns =
        vec![Vec::with_capacity(spec.sweep_times.len()); spec.tracked_levels.len()];
    for &t_total in &spec.sweep_times {
        let sweep = SweepSpec::with_hbar(t_total, spec.hbar)?;
        let at_sweep: Vec<AnticrossingEvent> = events
            .iter()
            .map(|e| {
                let mut e2 = e.clone();
                e2.p_lz = e.probability_at(&sweep);
                e2
            })
            .collect();
        let occ = propagate_occupations(&at_sweep, n)?;
        for (ti, &level) in spec.tracked_levels.iter().enumerate() {
            let idx = level - 1;
            survival[ti].push(occ.entry(idx, idx));
            msd[ti].push(occ.mean_square_displacement(idx));
            columns[ti].push(occ.column(idx));
        }
    }

    let mut counts = vec![0.0f64; n];
    for e in &events {
        if e.probability_at(&reference_sweep) > spec.count_threshold {
            counts[e.lower_level] += 1.0;
            counts[e.lower_level + 1] += 1.0;
        }
    }

    Ok(RealizationRecord {
        index,
        seed,
        spec_digest: spec.digest(),
        survival,
        msd,
        columns,
        counts,
        total_events: events.len(),
        normalization_factor,
    })
}

fn checkpoint_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("realization_{index:05}.json"))
}

fn load_checkpoint(dir: &Path, index: usize, digest: u64) -> Option<RealizationRecord> {
    let path = checkpoint_path(dir, index);
    let text = std::fs::read_to_string(&path).ok()?;
    match serde_json::from_str::<RealizationRecord>(&text) {
        Ok(rec) if rec.spec_digest == digest && rec.index == index => Some(rec),
        Ok(_) => {
            log::warn!(
                "checkpoint {} belongs to a different campaign spec; recomputing",
                path.display()
            );
            None
        }
        Err(e) => {
            log::warn!("checkpoint {} unreadable ({e}); recomputing", path.display());
            None
        }
    }
}

fn store_checkpoint(dir: &Path, rec: &RealizationRecord) {
    let path = checkpoint_path(dir, rec.index);
    let tmp = path.with_extension("json.tmp");
    let write = || -> std::io::Result<()> {
        std::fs::write(&tmp, serde_json::to_string(rec).expect("record serializes"))?;
        std::fs::rename(&tmp, &path)
    };
    if let Err(e) = write() {
        log::warn!("could not persist checkpoint {}: {e}", path.display());
    }
}

/// Execution knobs that do not affect the results.
#[derive(Debug, Clone, Default)]
pub struct CampaignOptions {
    /// Directory for per-realization resume checkpoints.
    pub checkpoint_dir: Option<PathBuf>,
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
}

/// Run the campaign: realizations fan out over a worker pool, each one is
/// deterministic in `(seed, index)`, and aggregation runs in index order so
/// the statistics are bit-identical for any worker count. A realization that
/// fails to integrate is skipped with a warning; the campaign errors out if
/// more than 5% fail.
pub fn run_campaign(
    spec: &CampaignSpec,
    opts: &CampaignOptions,
) -> Result<EnsembleStatistics, CampaignError> {
    spec.validate()?;
    if let Some(dir) = &opts.checkpoint_dir {
        std::fs::create_dir_all(dir).map_err(|e| {
            CampaignError::Checkpoint(format!("cannot create {}: {e}", dir.display()))
        })?;
    }
    let digest = spec.digest();

    let run_one = |index: usize| -> (usize, Result<RealizationRecord, CampaignError>) {
        if let Some(dir) = &opts.checkpoint_dir {
            if let Some(rec) = load_checkpoint(dir, index, digest) {
                return (index, Ok(rec));
            }
        }
        let result = run_realization(spec, index);
        if let (Some(dir), Ok(rec)) = (&opts.checkpoint_dir, &result) {
            store_checkpoint(dir, rec);
        }
        (index, result)
    };

    let run_all = || -> Vec<(usize, Result<RealizationRecord, CampaignError>)> {
        (0..spec.realizations).into_par_iter().map(run_one).collect()
    };
    let mut outcomes = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CampaignError::InvalidSpec(format!("worker pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };
    outcomes.sort_by_key(|(i, _)| *i);

    let mut records = Vec::with_capacity(spec.realizations);
    let mut failures = Vec::new();
    for (index, outcome) in outcomes {
        match outcome {
            Ok(rec) => records.push(rec),
            Err(e) => {
                log::warn!("realization {index} failed: {e}");
                failures.push((index, e.to_string()));
            }
        }
    }
    if failures.len() * 20 > spec.realizations {
        return Err(CampaignError::TooManyFailures {
            failed: failures.len(),
            total: spec.realizations,
        });
    }

    Ok(aggregate(spec, records, failures))
}

fn aggregate(
    spec: &CampaignSpec,
    records: Vec<RealizationRecord>,
    failures: Vec<(usize, String)>,
) -> EnsembleStatistics {
    let n = spec.ensemble.dim;
    let n_tracked = spec.tracked_levels.len();
    let n_t = spec.sweep_times.len();
    let r = records.len();

    let mean_stderr = |values: &[f64]| -> MeanStderr {
        let count = values.len() as f64;
        let mean = values.iter().sum::<f64>() / count;
        let stderr = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (count - 1.0);
            (var / count).sqrt()
        } else {
            0.0
        };
        MeanStderr { mean, stderr }
    };

    let mut survival = vec![Vec::with_capacity(n_t); n_tracked];
    let mut deviation = vec![Vec::with_capacity(n_t); n_tracked];
    let mut final_distribution = vec![Vec::with_capacity(n_t); n_tracked];
    for ti in 0..n_tracked {
        for t in 0..n_t {
            let vals: Vec<f64> = records.iter().map(|rec| rec.survival[ti][t]).collect();
            survival[ti].push(mean_stderr(&vals));
            let msds: Vec<f64> = records.iter().map(|rec| rec.msd[ti][t]).collect();
            deviation[ti].push(msds.iter().sum::<f64>() / r.max(1) as f64);
            let mut col = vec![0.0f64; n];
            for rec in &records {
                for (m, v) in rec.columns[ti][t].iter().enumerate() {
                    col[m] += v;
                }
            }
            for v in &mut col {
                *v /= r.max(1) as f64;
            }
            final_distribution[ti].push(col);
        }
    }
    let mut crossing_counts = vec![0.0f64; n];
    for rec in &records {
        for (m, c) in rec.counts.iter().enumerate() {
            crossing_counts[m] += c;
        }
    }
    for c in &mut crossing_counts {
        *c /= r.max(1) as f64;
    }
    let mean_events =
        records.iter().map(|rec| rec.total_events as f64).sum::<f64>() / r.max(1) as f64;

    EnsembleStatistics {
        n_levels: n,
        tracked_levels: spec.tracked_levels.clone(),
        sweep_times: spec.sweep_times.clone(),
        survival,
        deviation,
        final_distribution,
        crossing_counts,
        mean_total_events: mean_events,
        realizations_completed: r,
        failed_realizations: failures,
    }
}
