use num_complex::Complex64;

use super::{IntegrationError, PechukasState};

/// Right-hand side of the gas equations of motion, allocated form.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub dx: Vec<f64>,
    pub dv: Vec<f64>,
    pub dl: Vec<Complex64>,
}

/// Flat state layout used by the integrator: `[x | v | re/im l row-major]`.
pub(crate) fn flat_len(n: usize) -> usize {
    2 * n + 2 * n * n
}

pub(crate) fn state_to_flat(s: &PechukasState, out: &mut [f64]) {
    let n = s.n_levels();
    out[..n].copy_from_slice(&s.positions);
    out[n..2 * n].copy_from_slice(&s.velocities);
    for (i, z) in s.angular_momenta.iter().enumerate() {
        out[2 * n + 2 * i] = z.re;
        out[2 * n + 2 * i + 1] = z.im;
    }
}

pub(crate) fn flat_to_state(y: &[f64], n: usize, lambda: f64) -> PechukasState {
    let mut momenta = Vec::with_capacity(n * n);
    for i in 0..n * n {
        momenta.push(Complex64::new(y[2 * n + 2 * i], y[2 * n + 2 * i + 1]));
    }
    PechukasState {
        lambda,
        positions: y[..n].to_vec(),
        velocities: y[n..2 * n].to_vec(),
        angular_momenta: momenta,
    }
}

/// Scratch buffers for repeated right-hand-side evaluations.
pub(crate) struct RhsWorkspace {
    n: usize,
    /// `A = l .* W` with `W_mk = 1/(x_m - x_k)^2`, interleaved complex.
    a: Vec<f64>,
    /// `C = A * l`, interleaved complex.
    c: Vec<f64>,
}

impl RhsWorkspace {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            a: vec![0.0; 2 * n * n],
            c: vec![0.0; 2 * n * n],
        }
    }

    /// Evaluate the equations of motion on the flat layout.
    ///
    /// `dv_m = 2 sum_k |l_mk|^2 / (x_m - x_k)^3` and `dl = [A, l]` with
    /// `A = l .* W`; the commutator is computed as `C - C^dagger` from the
    /// single product `C = A l`, which keeps `l` anti-Hermitian bit-exactly.
    /// Entries with `l_mk == 0` are skipped: decoupled level pairs exert no
    /// force even when they cross, and the skip preserves their exact zeros.
    pub fn eval(&mut self, lambda: f64, y: &[f64], dy: &mut [f64]) -> Result<(), IntegrationError> {
        let n = self.n;
        let x = &y[..n];
        let (lre_im, _) = y[2 * n..].split_at(2 * n * n);
        // dx = v
        dy[..n].copy_from_slice(&y[n..2 * n]);
        let (dv, dl) = dy[n..].split_at_mut(n);
        dv.fill(0.0);
        self.a.fill(0.0);
        self.c.fill(0.0);

        for m in 0..n {
            let mut acc = 0.0;
            let row = 2 * m * n;
            for k in 0..n {
                if k == m {
                    continue;
                }
                let lr = lre_im[row + 2 * k];
                let li = lre_im[row + 2 * k + 1];
                if lr == 0.0 && li == 0.0 {
                    continue;
                }
                let gap = x[m] - x[k];
                if gap == 0.0 {
                    return Err(IntegrationError::CoincidentPositions {
                        lower: m.min(k),
                        upper: m.max(k),
                        lambda,
                    });
                }
                let w = 1.0 / (gap * gap);
                self.a[row + 2 * k] = lr * w;
                self.a[row + 2 * k + 1] = li * w;
                acc += (lr * lr + li * li) * w / gap;
            }
            dv[m] = 2.0 * acc;
        }

        // C = A * l, row-major ikj with zero-row skipping.
        for i in 0..n {
            let arow = &self.a[2 * i * n..2 * (i + 1) * n];
            for k in 0..n {
                let ar = arow[2 * k];
                let ai = arow[2 * k + 1];
                if ar == 0.0 && ai == 0.0 {
                    continue;
                }
                let lrow = &lre_im[2 * k * n..2 * (k + 1) * n];
                let crow = &mut self.c[2 * i * n..2 * (i + 1) * n];
                for j in 0..n {
                    let lr = lrow[2 * j];
                    let li = lrow[2 * j + 1];
                    crow[2 * j] += ar * lr - ai * li;
                    crow[2 * j + 1] += ar * li + ai * lr;
                }
            }
        }

        // dl = C - C^dagger; the diagonal is zero in exact arithmetic and is
        // pinned there so decoupled blocks stay exactly decoupled.
        for m in 0..n {
            for k in 0..n {
                if k == m {
                    dl[2 * (m * n + k)] = 0.0;
                    dl[2 * (m * n + k) + 1] = 0.0;
                    continue;
                }
                let c_mk_re = self.c[2 * (m * n + k)];
                let c_mk_im = self.c[2 * (m * n + k) + 1];
                let c_km_re = self.c[2 * (k * n + m)];
                let c_km_im = self.c[2 * (k * n + m) + 1];
                dl[2 * (m * n + k)] = c_mk_re - c_km_re;
                dl[2 * (m * n + k) + 1] = c_mk_im + c_km_im;
            }
        }
        Ok(())
    }
}

/// The equations of motion of the level gas:
/// `dx/dlambda = v`, `dv_m/dlambda = 2 sum |l_mk|^2/(x_m - x_k)^3`, and
/// `dl_mn/dlambda = sum_k l_mk l_kn (1/(x_m - x_k)^2 - 1/(x_k - x_n)^2)`.
pub fn derivatives(state: &PechukasState) -> Result<Derivatives, IntegrationError> {
    let n = state.n_levels();
    let mut y = vec![0.0; flat_len(n)];
    state_to_flat(state, &mut y);
    let mut dy = vec![0.0; flat_len(n)];
    let mut ws = RhsWorkspace::new(n);
    ws.eval(state.lambda, &y, &mut dy)?;
    let mut dl = Vec::with_capacity(n * n);
    for i in 0..n * n {
        dl.push(Complex64::new(dy[2 * n + 2 * i], dy[2 * n + 2 * i + 1]));
    }
    Ok(Derivatives {
        dx: dy[..n].to_vec(),
        dv: dy[n..2 * n].to_vec(),
        dl,
    })
}
