use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{IntegratorConfig, PechukasState};

/// One accepted integration node (or one oracle grid point).
///
/// Positions follow the adiabatic continuation of the starting order, so the
/// array may become unsorted after symmetry-allowed crossings; `order` then
/// lists the particle indices in ascending-position order. The angular
/// momenta of the sorted-adjacent pairs are kept for coupling readout at
/// detected anticrossings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepNode {
    pub lambda: f64,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    /// `l` between the sorted-rank-k and rank-(k+1) particles.
    pub adjacent_momenta: Vec<Complex64>,
    /// Ascending-position particle order; `None` when already ascending.
    pub order: Option<Vec<u32>>,
}

impl StepNode {
    /// Particle index at ascending-position rank `r`.
    pub fn particle_at_rank(&self, r: usize) -> usize {
        match &self.order {
            Some(o) => o[r] as usize,
            None => r,
        }
    }

    pub fn sorted_positions(&self) -> Vec<f64> {
        match &self.order {
            Some(o) => o.iter().map(|&i| self.positions[i as usize]).collect(),
            None => self.positions.clone(),
        }
    }
}

/// Dense equally spaced snapshot of positions and velocities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub lambda: f64,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub config: IntegratorConfig,
    pub stats: StepStats,
    /// Max relative drift of the total momentum over the run.
    pub momentum_drift: f64,
    /// Max relative drift of the gas energy over the run.
    pub energy_drift: f64,
    /// Max violation of the anti-Hermitian structure of `l`, relative to
    /// the largest momentum magnitude.
    pub max_antisymmetry_defect: f64,
    /// Smallest sorted-adjacent gap seen at any node.
    pub min_adjacent_gap: f64,
}

/// Result of one integration (or of the diagonalization oracle): ordered
/// nodes from `lambda = 1` down to `lambda = 0`, a dense sample grid, and the
/// full endpoint states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub n_levels: usize,
    pub nodes: Vec<StepNode>,
    pub samples: Vec<TrajectorySample>,
    pub initial: PechukasState,
    pub final_state: PechukasState,
    pub metadata: TrajectoryMetadata,
}

impl Trajectory {
    /// Index of the node interval containing `lambda` (nodes are ordered by
    /// decreasing lambda). Returns `i` with `nodes[i].lambda >= lambda >=
    /// nodes[i+1].lambda`.
    pub fn interval_index(&self, lambda: f64) -> usize {
        let nodes = &self.nodes;
        let mut lo = 0usize;
        let mut hi = nodes.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if nodes[mid].lambda >= lambda {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Cubic-Hermite position of one particle (velocity is the exact slope).
    pub fn position_of(&self, particle: usize, lambda: f64) -> f64 {
        let i = self.interval_index(lambda);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        hermite(
            a.lambda,
            b.lambda,
            a.positions[particle],
            b.positions[particle],
            a.velocities[particle],
            b.velocities[particle],
            lambda,
        )
    }

    /// All particle positions at `lambda` via cubic Hermite interpolation.
    pub fn positions_at(&self, lambda: f64) -> Vec<f64> {
        let i = self.interval_index(lambda);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        (0..self.n_levels)
            .map(|p| {
                hermite(
                    a.lambda,
                    b.lambda,
                    a.positions[p],
                    b.positions[p],
                    a.velocities[p],
                    b.velocities[p],
                    lambda,
                )
            })
            .collect()
    }

    /// Velocities at `lambda`, linearly interpolated between nodes.
    pub fn velocities_at(&self, lambda: f64) -> Vec<f64> {
        let i = self.interval_index(lambda);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let t = if a.lambda == b.lambda {
            0.0
        } else {
            (lambda - a.lambda) / (b.lambda - a.lambda)
        };
        (0..self.n_levels)
            .map(|p| a.velocities[p] + t * (b.velocities[p] - a.velocities[p]))
            .collect()
    }

    /// Build the dense equally spaced sample grid from the nodes.
    pub(crate) fn build_samples(&mut self, points: usize) {
        let points = points.max(2);
        let mut samples = Vec::with_capacity(points);
        for i in 0..points {
            let lambda = 1.0 - i as f64 / (points - 1) as f64;
            let lambda = lambda.clamp(0.0, 1.0);
            samples.push(TrajectorySample {
                lambda,
                positions: self.positions_at(lambda),
                velocities: self.velocities_at(lambda),
            });
        }
        self.samples = samples;
    }

    /// Write the dense samples as CSV: `lambda,x_1,...,x_N`.
    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(f, "lambda")?;
        for i in 1..=self.n_levels {
            write!(f, ",x_{i}")?;
        }
        writeln!(f)?;
        for s in &self.samples {
            write!(f, "{}", s.lambda)?;
            for x in &s.positions {
                write!(f, ",{x}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Cubic Hermite interpolation on `[t0, t1]` with values `p` and slopes `m`.
pub(crate) fn hermite(t0: f64, t1: f64, p0: f64, p1: f64, m0: f64, m1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    if h == 0.0 {
        return p0;
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * p0 + h10 * (h * m0) + h01 * p1 + h11 * (h * m1)
}

/// Ascending-position order of a position array, or `None` if it is already
/// ascending.
pub(crate) fn position_order(x: &[f64]) -> Option<Vec<u32>> {
    if x.windows(2).all(|w| w[0] <= w[1]) {
        return None;
    }
    let mut order: Vec<u32> = (0..x.len() as u32).collect();
    order.sort_by(|&a, &b| x[a as usize].total_cmp(&x[b as usize]));
    Some(order)
}
