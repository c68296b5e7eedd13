use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lz::{lz_probability, SweepSpec};
use super::TransitionError;
use crate::pechukas::Trajectory;

/// Lambda tolerance of the golden-section gap-minimum refinement.
const LAMBDA_TOL: f64 = 1e-9;

/// Gaps below this fraction of the spectral range count as degenerate.
const NEAR_DEGENERATE_FRACTION: f64 = 1e-13;

/// One detected avoided crossing (or symmetry-allowed exact crossing) of two
/// adjacent levels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnticrossingEvent {
    /// Sorted rank of the lower level at the event, 0-based.
    pub lower_level: usize,
    /// The gas particles involved (adiabatic continuations).
    pub particles: (usize, usize),
    pub lambda_star: f64,
    /// Minimum gap; exactly zero for a symmetry-allowed crossing.
    pub delta_min: f64,
    /// `|<m|Z Hb|m+1>|` at the closest approach, read as `|l|/delta_min`.
    pub coupling: f64,
    /// Exchange probability at the sweep the events were detected with.
    pub p_lz: f64,
    /// Gap below resolution with a nonzero coupling; `p_lz` clamped to 1.
    pub near_degenerate: bool,
}

impl AnticrossingEvent {
    /// Exchange probability at a different sweep speed. Crossings and
    /// near-degenerate events stay at `p = 1` for every sweep.
    pub fn probability_at(&self, sweep: &SweepSpec) -> f64 {
        if self.near_degenerate {
            return 1.0;
        }
        lz_probability(self.delta_min, self.coupling, sweep).unwrap_or(1.0)
    }
}

/// Signed position difference `x_j - x_i` of two particles, interpolated.
fn pair_gap(traj: &Trajectory, i: usize, j: usize, lambda: f64) -> f64 {
    traj.position_of(j, lambda) - traj.position_of(i, lambda)
}

/// `l_ij` at a node, looked up through the sorted-adjacent storage.
fn node_pair_momentum(traj: &Trajectory, node_idx: usize, i: usize, j: usize) -> Option<Complex64> {
    let node = &traj.nodes[node_idx];
    let n = traj.n_levels;
    for r in 0..n - 1 {
        let a = node.particle_at_rank(r);
        let b = node.particle_at_rank(r + 1);
        if (a == i && b == j) || (a == j && b == i) {
            return Some(node.adjacent_momenta[r]);
        }
    }
    None
}

/// |l_ij| at `lambda`, linearly interpolated between the bracketing nodes.
fn momentum_abs_at(traj: &Trajectory, i: usize, j: usize, lambda: f64) -> f64 {
    let idx = traj.interval_index(lambda);
    let la = traj.nodes[idx].lambda;
    let lb = traj.nodes[idx + 1].lambda;
    let va = node_pair_momentum(traj, idx, i, j);
    let vb = node_pair_momentum(traj, idx + 1, i, j);
    match (va, vb) {
        (Some(a), Some(b)) => {
            let t = if la == lb { 0.0 } else { (lambda - la) / (lb - la) };
            (a + (b - a) * Complex64::new(t, 0.0)).norm()
        }
        (Some(a), None) => a.norm(),
        (None, Some(b)) => b.norm(),
        (None, None) => 0.0,
    }
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}

fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    while (b - a).abs() > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Rank of the lower of the two particles among all positions at `lambda`.
fn lower_rank(traj: &Trajectory, i: usize, j: usize, lambda: f64) -> usize {
    let xs = traj.positions_at(lambda);
    let lo = xs[i].min(xs[j]);
    xs.iter().filter(|&&x| x < lo).count()
}

/// Scan a trajectory for every closest approach of sorted-adjacent levels.
///
/// Particle pairs are tracked over the maximal node ranges where they are
/// adjacent in sorted order. Within a range, a sign change of the position
/// difference is a symmetry-allowed exact crossing (`delta_min = 0`, full
/// exchange), while a strict interior local minimum of the gap is an avoided
/// crossing, refined by golden section to a lambda tolerance of 1e-9. Events
/// are returned in evolution order: decreasing lambda, ties broken by
/// ascending level rank.
pub fn detect_anticrossings(
    traj: &Trajectory,
    sweep: &SweepSpec,
) -> Result<Vec<AnticrossingEvent>, TransitionError> {
    let n = traj.n_levels;
    if traj.nodes.len() < 3 {
        return Err(TransitionError::TrajectoryTooShort {
            nodes: traj.nodes.len(),
        });
    }
    let spectral_range = {
        let last = traj.nodes.last().expect("nonempty");
        let lo = last.positions.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = last
            .positions
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        (hi - lo).max(f64::MIN_POSITIVE)
    };

    // Maximal runs of node indices over which each particle pair is adjacent.
    let mut active: HashMap<(u32, u32), usize> = HashMap::new();
    let mut runs: Vec<(usize, usize, usize, usize)> = Vec::new(); // (i, j, start, end)
    let mut current: Vec<(u32, u32)> = Vec::with_capacity(n - 1);
    for t in 0..traj.nodes.len() {
        let node = &traj.nodes[t];
        current.clear();
        for r in 0..n - 1 {
            let a = node.particle_at_rank(r) as u32;
            let b = node.particle_at_rank(r + 1) as u32;
            current.push((a.min(b), a.max(b)));
        }
        active.retain(|pair, start| {
            if current.contains(pair) {
                true
            } else {
                runs.push((pair.0 as usize, pair.1 as usize, *start, t - 1));
                false
            }
        });
        for pair in &current {
            active.entry(*pair).or_insert(t);
        }
    }
    let last = traj.nodes.len() - 1;
    for (pair, start) in active {
        runs.push((pair.0 as usize, pair.1 as usize, start, last));
    }

    let mut events = Vec::new();
    for (i, j, start, end) in runs {
        if end - start < 1 {
            continue;
        }
        let d_at = |t: usize| {
            traj.nodes[t].positions[j] - traj.nodes[t].positions[i]
        };
        // Exact crossings: sign changes between consecutive nodes.
        for t in start..end {
            let (da, db) = (d_at(t), d_at(t + 1));
            if da == 0.0 || da.signum() == db.signum() {
                continue;
            }
            let f = |lambda: f64| pair_gap(traj, i, j, lambda);
            let lambda_star = bisect_root(
                f,
                traj.nodes[t].lambda,
                traj.nodes[t + 1].lambda,
                LAMBDA_TOL * 1e-3,
            );
            let l_abs = momentum_abs_at(traj, i, j, lambda_star);
            let near_degenerate = l_abs > 0.0;
            if near_degenerate {
                log::warn!(
                    "crossing of particles ({i}, {j}) at lambda = {lambda_star} carries \
                     |l| = {l_abs:e}; treating as full exchange"
                );
            }
            events.push(AnticrossingEvent {
                lower_level: lower_rank(traj, i, j, lambda_star),
                particles: (i, j),
                lambda_star,
                delta_min: 0.0,
                coupling: 0.0,
                p_lz: 1.0,
                near_degenerate,
            });
        }
        // Avoided crossings: strict interior local minima of |d|.
        for t in (start + 1)..end {
            let (gp, gc, gn) = (d_at(t - 1).abs(), d_at(t).abs(), d_at(t + 1).abs());
            if !(gc < gp && gc <= gn) {
                continue;
            }
            // skip brackets that contain a sign change (handled above)
            if d_at(t - 1).signum() != d_at(t + 1).signum()
                || d_at(t - 1).signum() != d_at(t).signum()
            {
                continue;
            }
            let g = |lambda: f64| pair_gap(traj, i, j, lambda).abs();
            let lambda_star = golden_section_min(
                g,
                traj.nodes[t + 1].lambda,
                traj.nodes[t - 1].lambda,
                LAMBDA_TOL,
            );
            let delta_min = g(lambda_star);
            let l_abs = momentum_abs_at(traj, i, j, lambda_star);
            let near_degenerate = delta_min < NEAR_DEGENERATE_FRACTION * spectral_range
                && l_abs > 0.0;
            let coupling = if delta_min > 0.0 { l_abs / delta_min } else { 0.0 };
            let p_lz = if near_degenerate {
                log::warn!(
                    "near-degenerate gap {delta_min:e} for particles ({i}, {j}) at \
                     lambda = {lambda_star}; clamping exchange probability to 1"
                );
                1.0
            } else {
                lz_probability(delta_min, coupling, sweep)?
            };
            events.push(AnticrossingEvent {
                lower_level: lower_rank(traj, i, j, lambda_star),
                particles: (i, j),
                lambda_star,
                delta_min,
                coupling,
                p_lz,
                near_degenerate,
            });
        }
    }

    events.sort_by(|a, b| {
        b.lambda_star
            .total_cmp(&a.lambda_star)
            .then(a.lower_level.cmp(&b.lower_level))
    });
    Ok(events)
}

/// Write events as CSV: `pair,lambda_star,delta_min,coupling,p_lz` with the
/// pair reported as the 1-based rank of the lower level.
pub fn write_events_csv(events: &[AnticrossingEvent], path: &std::path::Path) -> std::io::Result<()> {
    use std::io::Write;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "pair,lambda_star,delta_min,coupling,p_lz")?;
    for e in events {
        writeln!(
            f,
            "{},{},{},{},{}",
            e.lower_level + 1,
            e.lambda_star,
            e.delta_min,
            e.coupling,
            e.p_lz
        )?;
    }
    Ok(())
}
