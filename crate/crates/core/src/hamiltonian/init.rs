use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{diagonalize, HamiltonianError, ProblemDefinition};
use crate::pechukas::PechukasState;

/// Relative tolerance below which adjacent levels of `H(1)` count as
/// degenerate and initial conditions are refused.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Relative threshold below which an initial angular momentum is snapped to
/// exactly zero. Matrix elements at this level are eigensolver roundoff, and
/// exact zeros are what keep symmetry-decoupled level groups decoupled along
/// the flow (their forced crossings stay singularity-free).
pub const MOMENTUM_SNAP_TOL: f64 = 1e-12;

fn assemble_state(
    positions: Vec<f64>,
    bias_elements: &DMatrix<Complex64>,
) -> PechukasState {
    let n = positions.len();
    let mut velocities = Vec::with_capacity(n);
    for m in 0..n {
        velocities.push(bias_elements[(m, m)].re);
    }
    let mut momenta = vec![Complex64::new(0.0, 0.0); n * n];
    let mut max_abs = 0.0f64;
    for m in 0..n {
        for k in 0..n {
            if m == k {
                continue;
            }
            let l = (positions[m] - positions[k]) * bias_elements[(m, k)];
            momenta[m * n + k] = l;
            max_abs = max_abs.max(l.norm());
        }
    }
    // Snap eigensolver noise to exact zero; re-enforce antisymmetry exactly.
    let snap = MOMENTUM_SNAP_TOL * max_abs;
    for m in 0..n {
        for k in (m + 1)..n {
            let l = momenta[m * n + k];
            if l.norm() <= snap {
                momenta[m * n + k] = Complex64::new(0.0, 0.0);
                momenta[k * n + m] = Complex64::new(0.0, 0.0);
            } else {
                momenta[k * n + m] = -l.conj();
            }
        }
    }
    PechukasState {
        lambda: 1.0,
        positions,
        velocities,
        angular_momenta: momenta,
    }
}

/// Gas initial conditions from the exact spectrum of `H(1) = H0 + Z Hb`:
/// positions are the eigenvalues, velocities the diagonal and angular
/// momenta the gap-weighted off-diagonal matrix elements of `Z Hb` in the
/// instantaneous eigenbasis.
pub fn initial_conditions_exact(p: &ProblemDefinition) -> Result<PechukasState, HamiltonianError> {
    let h1 = p.hamiltonian_at(1.0);
    let spectrum = diagonalize(&h1)?;
    let (pair, gap) = spectrum.min_adjacent_gap();
    let range = spectrum.spectral_range();
    if gap <= DEGENERACY_TOL * range {
        return Err(HamiltonianError::DegenerateAtStart {
            lower: pair,
            gap,
            tol: DEGENERACY_TOL * range,
        });
    }
    let bias_elements = spectrum.transform(&p.bias());
    Ok(assemble_state(spectrum.eigenvalues, &bias_elements))
}

/// Gas initial conditions from first-order perturbation theory in `1/Z`,
/// expanding `H(1) = Z (Hb + Hb^-1-scale H0)` around the `Hb` eigenbasis.
///
/// Only `order = 1` is implemented. Positions pick up the diagonal
/// first-order shift; the eigenbasis is corrected to first order, which
/// converts the off-diagonal elements of `H0` into the angular momenta.
pub fn initial_conditions_perturbative(
    p: &ProblemDefinition,
    order: usize,
) -> Result<PechukasState, HamiltonianError> {
    if order != 1 {
        return Err(HamiltonianError::UnsupportedOrder { order });
    }
    let hb_spectrum = diagonalize(&p.hb)?;
    let (pair, gap) = hb_spectrum.min_adjacent_gap();
    let range = hb_spectrum.spectral_range();
    if gap <= DEGENERACY_TOL * range {
        return Err(HamiltonianError::DegenerateBias {
            lower: pair,
            gap,
            tol: DEGENERACY_TOL * range,
        });
    }
    let n = p.dim();
    let b = &hb_spectrum.eigenvalues;
    // H0 in the Hb eigenbasis.
    let h0_b = hb_spectrum.transform(&p.h0);

    // First-order positions. The basis correction leaves the diagonal of
    // Z Hb untouched, so velocities are exactly Z b_m at this order, and
    // <m|Z Hb|n> = -(H0)_mn in the corrected basis for m != n: the zeroth
    // order vanishes off the diagonal and Z cancels against the 1/Z mixing.
    let mut positions = Vec::with_capacity(n);
    for m in 0..n {
        positions.push(p.z * b[m] + h0_b[(m, m)].re);
    }
    let mut bias_elements = DMatrix::<Complex64>::zeros(n, n);
    for m in 0..n {
        for k in 0..n {
            bias_elements[(m, k)] = if m == k {
                Complex64::new(p.z * b[m], 0.0)
            } else {
                -h0_b[(m, k)]
            };
        }
    }

    // Perturbation theory orders by the Hb eigenvalues; keep positions
    // ascending for the gas convention.
    let mut order_idx: Vec<usize> = (0..n).collect();
    order_idx.sort_by(|&a, &c| positions[a].total_cmp(&positions[c]));
    let sorted_positions: Vec<f64> = order_idx.iter().map(|&i| positions[i]).collect();
    let mut sorted_bias = DMatrix::<Complex64>::zeros(n, n);
    for (mi, &si) in order_idx.iter().enumerate() {
        for (mj, &sj) in order_idx.iter().enumerate() {
            sorted_bias[(mi, mj)] = bias_elements[(si, sj)];
        }
    }

    Ok(assemble_state(sorted_positions, &sorted_bias))
}
