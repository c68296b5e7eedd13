use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rhs::{flat_len, flat_to_state, state_to_flat, RhsWorkspace};
use super::trajectory::{position_order, StepNode, StepStats, Trajectory, TrajectoryMetadata};
use super::{IntegrationError, PechukasState};
use crate::hamiltonian::ProblemDefinition;

/// Error control and output settings of the gas integrator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step in lambda.
    pub max_step: f64,
    /// Below this step the run aborts: a coupled pair is collapsing.
    pub min_step: f64,
    /// Number of equally spaced samples kept in `Trajectory::samples`.
    pub dense_output_points: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: 1e-3,
            min_step: 1e-14,
            dense_output_points: 2000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), IntegrationError> {
        let ok = self.min_step > 0.0
            && self.min_step < self.max_step
            && self.max_step <= 1.0
            && self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.dense_output_points >= 2;
        if ok {
            Ok(())
        } else {
            Err(IntegrationError::InvalidConfig(format!("{self:?}")))
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// b - b_hat, including the FSAL stage.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const MAX_SCALE: f64 = 5.0;
const MIN_SCALE: f64 = 0.2;

struct Monitors {
    momentum0: f64,
    energy0: f64,
    momentum_scale: f64,
    energy_scale: f64,
    momentum_drift: f64,
    energy_drift: f64,
    antisymmetry: f64,
    min_gap: f64,
}

/// Total momentum and gas energy straight from the flat layout.
fn conserved_flat(y: &[f64], n: usize) -> (f64, f64) {
    let x = &y[..n];
    let v = &y[n..2 * n];
    let l = &y[2 * n..];
    let momentum: f64 = v.iter().sum();
    let mut energy: f64 = v.iter().map(|v| 0.5 * v * v).sum();
    for m in 0..n {
        for k in 0..n {
            if m == k {
                continue;
            }
            let lr = l[2 * (m * n + k)];
            let li = l[2 * (m * n + k) + 1];
            if lr == 0.0 && li == 0.0 {
                continue;
            }
            let gap = x[m] - x[k];
            energy += 0.5 * (lr * lr + li * li) / (gap * gap);
        }
    }
    (momentum, energy)
}

fn antisymmetry_defect_flat(y: &[f64], n: usize) -> (f64, f64) {
    let l = &y[2 * n..];
    let mut defect = 0.0f64;
    let mut max_abs = 0.0f64;
    for m in 0..n {
        for k in m..n {
            let a_re = l[2 * (m * n + k)];
            let a_im = l[2 * (m * n + k) + 1];
            let b_re = l[2 * (k * n + m)];
            let b_im = l[2 * (k * n + m) + 1];
            let d = ((a_re + b_re).powi(2) + (a_im - b_im).powi(2)).sqrt();
            defect = defect.max(d);
            max_abs = max_abs.max((a_re * a_re + a_im * a_im).sqrt());
        }
    }
    (defect, max_abs)
}

/// Closest coupled pair of a state, for step-underflow diagnostics.
fn closest_coupled_pair(y: &[f64], n: usize) -> (usize, usize, f64) {
    let x = &y[..n];
    let l = &y[2 * n..];
    let mut best = (0usize, 1usize, f64::INFINITY);
    for m in 0..n {
        for k in (m + 1)..n {
            let lr = l[2 * (m * n + k)];
            let li = l[2 * (m * n + k) + 1];
            if lr == 0.0 && li == 0.0 {
                continue;
            }
            let gap = (x[m] - x[k]).abs();
            if gap < best.2 {
                best = (m, k, gap);
            }
        }
    }
    best
}

fn make_node(lambda: f64, y: &[f64], n: usize, monitors: &mut Monitors) -> StepNode {
    let x = &y[..n];
    let v = &y[n..2 * n];
    let l = &y[2 * n..];
    let order = position_order(x);
    let mut adjacent = Vec::with_capacity(n - 1);
    for r in 0..n - 1 {
        let (i, j) = match &order {
            Some(o) => (o[r] as usize, o[r + 1] as usize),
            None => (r, r + 1),
        };
        adjacent.push(Complex64::new(l[2 * (i * n + j)], l[2 * (i * n + j) + 1]));
        let gap = (x[j] - x[i]).abs();
        if gap < monitors.min_gap {
            monitors.min_gap = gap;
        }
    }
    let (momentum, energy) = conserved_flat(y, n);
    let p_drift = (momentum - monitors.momentum0).abs() / monitors.momentum_scale;
    let e_drift = (energy - monitors.energy0).abs() / monitors.energy_scale;
    monitors.momentum_drift = monitors.momentum_drift.max(p_drift);
    monitors.energy_drift = monitors.energy_drift.max(e_drift);
    let (defect, max_abs) = antisymmetry_defect_flat(y, n);
    if max_abs > 0.0 {
        monitors.antisymmetry = monitors.antisymmetry.max(defect / max_abs);
    }
    StepNode {
        lambda,
        positions: x.to_vec(),
        velocities: v.to_vec(),
        adjacent_momenta: adjacent,
        order,
    }
}

/// Integrate the gas from `lambda = 1` to exactly `lambda = 0` with an
/// adaptive embedded Dormand-Prince 5(4) pair and PI step control.
///
/// The inverse-cube forces make the dynamics stiff-like near gap minima; the
/// controller cuts the step there and the run aborts with a diagnostic when
/// a coupled pair collapses below `min_step` resolution. The final step is
/// clamped to land on `lambda = 0` exactly.
pub fn integrate(
    p: &ProblemDefinition,
    s0: &PechukasState,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrationError> {
    cfg.validate()?;
    let n = s0.n_levels();
    if n != p.dim() {
        return Err(IntegrationError::InvalidConfig(format!(
            "state has {n} levels but the problem dimension is {}",
            p.dim()
        )));
    }
    if (s0.lambda - 1.0).abs() > 1e-12 {
        return Err(IntegrationError::InvalidConfig(format!(
            "initial state must be at lambda = 1, got {}",
            s0.lambda
        )));
    }

    let len = flat_len(n);
    let mut y = vec![0.0; len];
    state_to_flat(s0, &mut y);
    let mut ws = RhsWorkspace::new(n);
    let mut stats = StepStats::default();

    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; len]).collect();
    let mut y_stage = vec![0.0; len];
    let mut y_new = vec![0.0; len];

    let mut lambda = 1.0f64;
    ws.eval(lambda, &y, &mut k[0])?;
    stats.rhs_evals += 1;

    let (momentum0, energy0) = conserved_flat(&y, n);
    let momentum_scale = {
        let v = &y[n..2 * n];
        let rms: f64 = v.iter().map(|v| v * v).sum::<f64>().sqrt();
        momentum0.abs().max(rms).max(f64::MIN_POSITIVE)
    };
    let mut monitors = Monitors {
        momentum0,
        energy0,
        momentum_scale,
        energy_scale: energy0.abs().max(f64::MIN_POSITIVE),
        momentum_drift: 0.0,
        energy_drift: 0.0,
        antisymmetry: 0.0,
        min_gap: f64::INFINITY,
    };

    let mut nodes = Vec::new();
    nodes.push(make_node(lambda, &y, n, &mut monitors));

    // Initial step size from the standard two-evaluation heuristic.
    let mut h = -initial_step(&mut ws, &y, &k[0], lambda, cfg, &mut stats)?;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    while lambda > 0.0 {
        if -h >= lambda {
            h = -lambda; // clamp the final step onto lambda = 0
        } else if -h < cfg.min_step {
            let (lo, hi, gap) = closest_coupled_pair(&y, n);
            return Err(IntegrationError::StepUnderflow {
                lambda,
                min_step: cfg.min_step,
                lower: lo,
                upper: hi,
                gap,
            });
        }

        // Stages 2..6 plus the new-point stage (FSAL).
        let mut stage_failed = false;
        let a_rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, a_row) in a_rows.iter().enumerate() {
            for i in 0..len {
                let mut acc = 0.0;
                for (j, &a) in a_row.iter().enumerate() {
                    acc += a * k[j][i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            match ws.eval(lambda + C[s + 1] * h, &y_stage, &mut k[s + 1]) {
                Ok(()) => stats.rhs_evals += 1,
                Err(IntegrationError::CoincidentPositions { .. }) => {
                    stage_failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }

        let mut err = f64::INFINITY;
        if !stage_failed {
            for i in 0..len {
                let mut acc = 0.0;
                for j in 0..6 {
                    acc += B[j] * k[j][i];
                }
                y_new[i] = y[i] + h * acc;
            }
            match ws.eval(lambda + h, &y_new, &mut k[6]) {
                Ok(()) => stats.rhs_evals += 1,
                Err(IntegrationError::CoincidentPositions { .. }) => stage_failed = true,
                Err(e) => return Err(e),
            }
            if !stage_failed {
                let mut acc = 0.0f64;
                for i in 0..len {
                    let mut e = 0.0;
                    for j in 0..7 {
                        e += E[j] * k[j][i];
                    }
                    let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
                    let r = h * e / sc;
                    acc += r * r;
                }
                err = (acc / len as f64).sqrt();
                if !err.is_finite() {
                    err = f64::INFINITY;
                }
            }
        }

        if err <= 1.0 {
            // accept
            lambda += h;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6); // FSAL
            stats.accepted += 1;
            nodes.push(make_node(lambda, &y, n, &mut monitors));

            let fac11 = err.powf(EXPO1);
            let mut scale = SAFETY * facold.powf(BETA) / fac11;
            scale = scale.clamp(MIN_SCALE, MAX_SCALE);
            if last_rejected {
                scale = scale.min(1.0);
            }
            facold = err.max(1e-4);
            last_rejected = false;
            h = (h * scale).max(-cfg.max_step);
            if !y.iter().all(|v| v.is_finite()) {
                return Err(IntegrationError::NonFinite { lambda });
            }
        } else {
            stats.rejected += 1;
            last_rejected = true;
            let scale = if err.is_finite() {
                (SAFETY / err.powf(EXPO1)).clamp(MIN_SCALE, 1.0)
            } else {
                MIN_SCALE
            };
            h *= scale;
        }
    }

    let final_state = flat_to_state(&y, n, 0.0);
    let metadata = TrajectoryMetadata {
        config: *cfg,
        stats,
        momentum_drift: monitors.momentum_drift,
        energy_drift: monitors.energy_drift,
        max_antisymmetry_defect: monitors.antisymmetry,
        min_adjacent_gap: monitors.min_gap,
    };
    let mut traj = Trajectory {
        n_levels: n,
        nodes,
        samples: Vec::new(),
        initial: s0.clone(),
        final_state,
        metadata,
    };
    traj.build_samples(cfg.dense_output_points);
    Ok(traj)
}

/// Hairer-style initial step size (two extra evaluations).
fn initial_step(
    ws: &mut RhsWorkspace,
    y: &[f64],
    f0: &[f64],
    lambda: f64,
    cfg: &IntegratorConfig,
    stats: &mut StepStats,
) -> Result<f64, IntegrationError> {
    let len = y.len();
    let sc = |yi: f64| cfg.abs_tol + cfg.rel_tol * yi.abs();
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..len {
        let s = sc(y[i]);
        d0 += (y[i] / s).powi(2);
        d1 += (f0[i] / s).powi(2);
    }
    d0 = (d0 / len as f64).sqrt();
    d1 = (d1 / len as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(cfg.max_step);

    let mut y1 = vec![0.0; len];
    for i in 0..len {
        y1[i] = y[i] - h0 * f0[i];
    }
    let mut f1 = vec![0.0; len];
    match ws.eval(lambda - h0, &y1, &mut f1) {
        Ok(()) => stats.rhs_evals += 1,
        Err(_) => return Ok((h0 * 1e-2).max(cfg.min_step * 10.0)),
    }
    let mut d2 = 0.0;
    for i in 0..len {
        let s = sc(y[i]);
        d2 += ((f1[i] - f0[i]) / s).powi(2);
    }
    d2 = (d2 / len as f64).sqrt() / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    Ok(h1.min(100.0 * h0).min(cfg.max_step).max(cfg.min_step * 10.0))
}
