use serde::{Deserialize, Serialize};

use super::KineticError;

/// Uniform cell-centered 1D grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub cells: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, cells: usize) -> Result<Self, KineticError> {
        if !(max > min) || cells < 4 {
            return Err(KineticError::InvalidAxis { min, max, cells });
        }
        Ok(Self { min, max, cells })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.min + (i as f64 + 0.5) * self.step()
    }
}

/// Discretized one-particle distribution `f(x, v, n)` over occupation labels
/// `n`, stored row-major as `[label][iv][ix]` so streaming in `x` runs over
/// contiguous memory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseSpaceDistribution {
    pub labels: usize,
    pub grid_x: Axis,
    pub grid_v: Axis,
    pub f: Vec<f64>,
}

impl PhaseSpaceDistribution {
    pub fn zeros(labels: usize, grid_x: Axis, grid_v: Axis) -> Result<Self, KineticError> {
        if labels == 0 {
            return Err(KineticError::NoLabels);
        }
        Ok(Self {
            labels,
            grid_x,
            grid_v,
            f: vec![0.0; labels * grid_x.cells * grid_v.cells],
        })
    }

    #[inline]
    pub fn idx(&self, label: usize, ix: usize, iv: usize) -> usize {
        (label * self.grid_v.cells + iv) * self.grid_x.cells + ix
    }

    pub fn value(&self, label: usize, ix: usize, iv: usize) -> f64 {
        self.f[self.idx(label, ix, iv)]
    }

    pub fn cell_measure(&self) -> f64 {
        self.grid_x.step() * self.grid_v.step()
    }

    /// `int f dx dv` of one label.
    pub fn mass(&self, label: usize) -> f64 {
        let per = self.grid_x.cells * self.grid_v.cells;
        self.f[label * per..(label + 1) * per].iter().sum::<f64>() * self.cell_measure()
    }

    pub fn total_mass(&self) -> f64 {
        (0..self.labels).map(|n| self.mass(n)).sum()
    }

    /// `int v f dx dv` summed over labels.
    pub fn total_momentum(&self) -> f64 {
        let mut acc = 0.0;
        for n in 0..self.labels {
            for iv in 0..self.grid_v.cells {
                let v = self.grid_v.center(iv);
                let row = self.idx(n, 0, iv);
                let sum: f64 = self.f[row..row + self.grid_x.cells].iter().sum();
                acc += v * sum;
            }
        }
        acc * self.cell_measure()
    }

    /// Number density per unit `x`, summed over labels and velocities.
    pub fn x_marginal(&self) -> Vec<f64> {
        let mut rho = vec![0.0; self.grid_x.cells];
        for n in 0..self.labels {
            for iv in 0..self.grid_v.cells {
                let row = self.idx(n, 0, iv);
                for ix in 0..self.grid_x.cells {
                    rho[ix] += self.f[row + ix];
                }
            }
        }
        let dv = self.grid_v.step();
        for r in &mut rho {
            *r *= dv;
        }
        rho
    }

    /// r.m.s. spread of the `x` marginal about its mean.
    pub fn x_spread(&self) -> f64 {
        let rho = self.x_marginal();
        let dx = self.grid_x.step();
        let mass: f64 = rho.iter().sum::<f64>() * dx;
        if mass <= 0.0 {
            return 0.0;
        }
        let mean: f64 = rho
            .iter()
            .enumerate()
            .map(|(i, r)| self.grid_x.center(i) * r)
            .sum::<f64>()
            * dx
            / mass;
        let var: f64 = rho
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let d = self.grid_x.center(i) - mean;
                d * d * r
            })
            .sum::<f64>()
            * dx
            / mass;
        var.sqrt()
    }

    pub fn min_value(&self) -> f64 {
        self.f.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Gaussian bump `exp(-(x-x0)^2/2sx^2 - (v-v0)^2/2sv^2)`, normalized to
    /// unit mass, on one label.
    pub fn gaussian_bump(
        &mut self,
        label: usize,
        x0: f64,
        sx: f64,
        v0: f64,
        sv: f64,
    ) {
        let mut total = 0.0;
        for iv in 0..self.grid_v.cells {
            let v = self.grid_v.center(iv);
            for ix in 0..self.grid_x.cells {
                let x = self.grid_x.center(ix);
                let g = (-0.5 * ((x - x0) / sx).powi(2) - 0.5 * ((v - v0) / sv).powi(2)).exp();
                let k = self.idx(label, ix, iv);
                self.f[k] += g;
                total += g;
            }
        }
        let norm = total * self.cell_measure();
        if norm > 0.0 {
            let per = self.grid_x.cells * self.grid_v.cells;
            for v in &mut self.f[label * per..(label + 1) * per] {
                *v /= norm;
            }
        }
    }

    /// Cloud-in-cell deposit of point particles, each with unit mass.
    pub fn deposit_particles(&mut self, label: usize, xs: &[f64], vs: &[f64]) {
        let dx = self.grid_x.step();
        let dv = self.grid_v.step();
        let weight = 1.0 / self.cell_measure();
        for (&x, &v) in xs.iter().zip(vs.iter()) {
            let fx = (x - self.grid_x.min) / dx - 0.5;
            let fv = (v - self.grid_v.min) / dv - 0.5;
            let ix0 = fx.floor();
            let iv0 = fv.floor();
            let wx1 = fx - ix0;
            let wv1 = fv - iv0;
            for (di, wx) in [(0isize, 1.0 - wx1), (1, wx1)] {
                for (dj, wv) in [(0isize, 1.0 - wv1), (1, wv1)] {
                    let ix = ix0 as isize + di;
                    let iv = iv0 as isize + dj;
                    if ix >= 0
                        && (ix as usize) < self.grid_x.cells
                        && iv >= 0
                        && (iv as usize) < self.grid_v.cells
                    {
                        let k = self.idx(label, ix as usize, iv as usize);
                        self.f[k] += weight * wx * wv;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deposit_conserves_mass_and_momentum() {
        let gx = Axis::new(-10.0, 10.0, 64).unwrap();
        let gv = Axis::new(-5.0, 5.0, 32).unwrap();
        let mut f = PhaseSpaceDistribution::zeros(1, gx, gv).unwrap();
        let xs = [0.3, -2.4, 5.5, 1.1];
        let vs = [1.0, -0.5, 2.2, 0.0];
        f.deposit_particles(0, &xs, &vs);
        assert!((f.total_mass() - 4.0).abs() < 1e-12);
        let p_expect: f64 = vs.iter().sum();
        assert!((f.total_momentum() - p_expect).abs() < 0.5 * gv.step() * 4.0);
        assert!(f.min_value() >= 0.0);
    }

    #[test]
    fn gaussian_bump_is_normalized() {
        let gx = Axis::new(-8.0, 8.0, 128).unwrap();
        let gv = Axis::new(-4.0, 4.0, 64).unwrap();
        let mut f = PhaseSpaceDistribution::zeros(2, gx, gv).unwrap();
        f.gaussian_bump(1, 0.0, 1.0, 0.5, 0.8);
        assert!((f.mass(1) - 1.0).abs() < 1e-12);
        assert_eq!(f.mass(0), 0.0);
    }
}
