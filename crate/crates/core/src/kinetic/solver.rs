use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::PhaseSpaceDistribution;
use super::KineticError;

/// Parameters of the truncated kinetic equation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KineticConfig {
    /// Effective mean-field repulsion `Gamma = <|l|^2>`.
    pub gamma_mf: f64,
    /// Collision constant; zero disables the collision integral.
    pub gamma_st: f64,
    /// Principal-value cutoff radius around `y = x`, in grid cells.
    pub pv_cutoff: usize,
    /// CFL number for the operator-split step.
    pub cfl: f64,
    /// Constant of the phenomenological exchange kernel
    /// `p(w) = exp(-kappa/|w|)` inside the collision integral.
    pub kappa: f64,
}

impl Default for KineticConfig {
    fn default() -> Self {
        Self {
            gamma_mf: 0.0,
            gamma_st: 0.0,
            pv_cutoff: 2,
            cfl: 0.4,
            kappa: 1.0,
        }
    }
}

impl KineticConfig {
    pub fn validate(&self) -> Result<(), KineticError> {
        if self.gamma_mf < 0.0 || self.gamma_st < 0.0 || self.pv_cutoff < 1 || !(self.cfl > 0.0)
        {
            return Err(KineticError::InvalidConfig(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Mean-field acceleration on each position cell: the principal-value
/// convolution `2 Gamma sum_j rho(y_j) dx / (x_i - y_j)^3`, with a symmetric
/// cutoff of `pv_cutoff` cells around the singularity.
pub fn mean_field_force(
    f: &PhaseSpaceDistribution,
    cfg: &KineticConfig,
) -> Result<Vec<f64>, KineticError> {
    cfg.validate()?;
    let nx = f.grid_x.cells;
    let dx = f.grid_x.step();
    let rho = f.x_marginal();
    let mut force = vec![0.0; nx];
    if cfg.gamma_mf == 0.0 {
        return Ok(force);
    }
    for i in 0..nx {
        let mut acc = 0.0;
        for (j, &r) in rho.iter().enumerate() {
            let d = i as isize - j as isize;
            if (d.unsigned_abs()) < cfg.pv_cutoff {
                continue;
            }
            let sep = d as f64 * dx;
            acc += r / (sep * sep * sep);
        }
        force[i] = 2.0 * cfg.gamma_mf * acc * dx;
    }
    Ok(force)
}

/// Monotonized-central slope limiter.
fn mc_slope(left: f64, center: f64, right: f64) -> f64 {
    let d_central = 0.5 * (right - left);
    let d_left = 2.0 * (center - left);
    let d_right = 2.0 * (right - center);
    if d_left * d_right <= 0.0 {
        0.0
    } else {
        d_central
            .abs()
            .min(d_left.abs())
            .min(d_right.abs())
            .copysign(d_central)
    }
}

/// Shift a uniformly sampled row by `offset` cells (semi-Lagrangian gather
/// with monotone cubic Hermite reconstruction); values outside the domain
/// are zero.
fn shift_row(src: &[f64], dst: &mut [f64], offset: f64) {
    let n = src.len() as isize;
    let get = |i: isize| -> f64 {
        if i < 0 || i >= n {
            0.0
        } else {
            src[i as usize]
        }
    };
    for (i, out) in dst.iter_mut().enumerate() {
        let pos = i as f64 - offset;
        let k = pos.floor();
        let t = pos - k;
        let k = k as isize;
        let fm1 = get(k - 1);
        let f0 = get(k);
        let f1 = get(k + 1);
        let f2 = get(k + 2);
        let m0 = mc_slope(fm1, f0, f1);
        let m1 = mc_slope(f0, f1, f2);
        let t2 = t * t;
        let t3 = t2 * t;
        *out = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * m1;
    }
}

fn advect_x(f: &mut PhaseSpaceDistribution, dlambda: f64, scratch: &mut Vec<f64>) {
    let nx = f.grid_x.cells;
    let dx = f.grid_x.step();
    scratch.resize(nx, 0.0);
    for n in 0..f.labels {
        for iv in 0..f.grid_v.cells {
            let v = f.grid_v.center(iv);
            let offset = v * dlambda / dx;
            if offset == 0.0 {
                continue;
            }
            let row = f.idx(n, 0, iv);
            scratch.copy_from_slice(&f.f[row..row + nx]);
            shift_row(scratch, &mut f.f[row..row + nx], offset);
        }
    }
}

fn kick_v(f: &mut PhaseSpaceDistribution, force: &[f64], dlambda: f64, scratch: &mut Vec<f64>) {
    let nx = f.grid_x.cells;
    let nv = f.grid_v.cells;
    let dv = f.grid_v.step();
    scratch.resize(2 * nv, 0.0);
    for n in 0..f.labels {
        for ix in 0..nx {
            let offset = force[ix] * dlambda / dv;
            if offset == 0.0 {
                continue;
            }
            let (src, dst) = scratch.split_at_mut(nv);
            for iv in 0..nv {
                src[iv] = f.f[f.idx(n, ix, iv)];
            }
            shift_row(src, dst, offset);
            for iv in 0..nv {
                let k = f.idx(n, ix, iv);
                f.f[k] = dst[iv];
            }
        }
    }
}

/// Collision integral of the pairwise exchange form, discretized on the
/// velocity grid with the phenomenological kernel `p(w) = exp(-kappa/|w|)`.
fn collision_update(f: &mut PhaseSpaceDistribution, cfg: &KineticConfig, dlambda: f64) {
    let nx = f.grid_x.cells;
    let nv = f.grid_v.cells;
    let labels = f.labels;
    let dv = f.grid_v.step();
    let measure = dv;
    let mut delta = vec![0.0f64; f.f.len()];
    for ix in 0..nx {
        for n in 0..labels {
            for iv in 0..nv {
                let v = f.grid_v.center(iv);
                let f_vn = f.value(n, ix, iv);
                let mut acc = 0.0;
                for m in 0..labels {
                    if m == n {
                        continue;
                    }
                    let f_vm = f.value(m, ix, iv);
                    for iu in 0..nv {
                        let u = f.grid_v.center(iu);
                        let w = u - v;
                        if w == 0.0 {
                            continue;
                        }
                        let kernel = (-cfg.kappa / w.abs()).exp();
                        let f_un = f.value(n, ix, iu);
                        let f_um = f.value(m, ix, iu);
                        acc += w * kernel * (f_vm * f_un - f_vn * f_um);
                    }
                }
                delta[f.idx(n, ix, iv)] = 2.0 * cfg.gamma_st * acc * measure;
            }
        }
    }
    for (fv, d) in f.f.iter_mut().zip(delta.iter()) {
        *fv += dlambda * d;
    }
}

/// One operator-split step of the kinetic equation: half free streaming,
/// a full velocity kick by the mean-field force, half streaming, then the
/// optional collision exchange. `dlambda` is signed; negative steps march
/// the contraction direction (`lambda` decreasing).
pub fn step_kinetic(
    f: &PhaseSpaceDistribution,
    cfg: &KineticConfig,
    dlambda: f64,
) -> Result<PhaseSpaceDistribution, KineticError> {
    cfg.validate()?;
    let force = mean_field_force(f, cfg)?;
    let vmax = f.grid_v.min.abs().max(f.grid_v.max.abs());
    let amax = force.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut admissible = cfg.cfl * f.grid_x.step() / vmax.max(1e-300);
    if amax > 0.0 {
        admissible = admissible.min(cfg.cfl * f.grid_v.step() / amax);
    }
    if dlambda.abs() > admissible {
        return Err(KineticError::CflViolation {
            dlambda,
            admissible,
        });
    }

    let mut out = f.clone();
    let mut scratch = Vec::new();
    advect_x(&mut out, 0.5 * dlambda, &mut scratch);
    let force = mean_field_force(&out, cfg)?;
    kick_v(&mut out, &force, dlambda, &mut scratch);
    advect_x(&mut out, 0.5 * dlambda, &mut scratch);
    if cfg.gamma_st > 0.0 && out.labels > 1 {
        collision_update(&mut out, cfg, dlambda);
        // explicit Euler may undershoot in sparse cells; zeroing genuine
        // roundoff keeps f nonnegative, anything larger means the step was
        // too big for the exchange rate
        let peak = out.f.iter().cloned().fold(0.0f64, f64::max);
        let floor = -1e-12 * peak;
        let mut worst = 0.0f64;
        for v in &mut out.f {
            if *v < 0.0 {
                worst = worst.min(*v);
                if *v >= floor {
                    *v = 0.0;
                }
            }
        }
        if worst < floor {
            return Err(KineticError::CollisionStepTooLarge {
                dlambda,
                undershoot: worst,
            });
        }
    }
    Ok(out)
}

/// March the kinetic equation from `lambda_start` to `lambda_end` with steps
/// bounded by the CFL condition. Returns the final distribution and the
/// number of steps taken.
pub fn evolve_kinetic(
    f: &PhaseSpaceDistribution,
    cfg: &KineticConfig,
    lambda_start: f64,
    lambda_end: f64,
) -> Result<(PhaseSpaceDistribution, usize), KineticError> {
    cfg.validate()?;
    let mut current = f.clone();
    let mut lambda = lambda_start;
    let mut steps = 0usize;
    let direction = if lambda_end >= lambda_start { 1.0 } else { -1.0 };
    while (lambda_end - lambda) * direction > 1e-14 {
        let force = mean_field_force(&current, cfg)?;
        let vmax = current.grid_v.min.abs().max(current.grid_v.max.abs());
        let amax = force.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let mut h = cfg.cfl * current.grid_x.step() / vmax.max(1e-300);
        if amax > 0.0 {
            h = h.min(cfg.cfl * current.grid_v.step() / amax);
        }
        let remaining = (lambda_end - lambda).abs();
        let h = h.min(remaining).max(1e-14);
        current = step_kinetic(&current, cfg, h * direction)?;
        lambda += h * direction;
        steps += 1;
        if steps > 2_000_000 {
            return Err(KineticError::StepBudgetExceeded { steps });
        }
    }
    Ok((current, steps))
}

/// Effective repulsion from sampled angular-momentum matrices: the mean of
/// `|l_jk|^2` over all off-diagonal pairs and samples.
pub fn estimate_gamma(n: usize, samples: &[Vec<Complex64>]) -> Result<f64, KineticError> {
    if samples.is_empty() {
        return Err(KineticError::NoSamples);
    }
    let mut acc = 0.0;
    let mut count = 0usize;
    for s in samples {
        assert_eq!(s.len(), n * n, "sample is not an n x n matrix");
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    acc += s[j * n + k].norm_sqr();
                    count += 1;
                }
            }
        }
    }
    Ok(acc / count as f64)
}
