use num_complex::Complex64;

use super::trajectory::{StepNode, StepStats, Trajectory, TrajectoryMetadata};
use super::{IntegrationError, IntegratorConfig, PechukasState};
use crate::hamiltonian::{diagonalize, ProblemDefinition};

/// Largest dimension accepted for the diagonalization-grid oracle.
pub const ORACLE_DIM_LIMIT: usize = 64;

/// Independent reference trajectory: diagonalize `H(lambda)` on a uniform
/// lambda grid and read positions, velocities and adjacent angular momenta
/// off the spectra directly. Used to validate the gas integration.
pub fn track_spectrum_oracle(
    p: &ProblemDefinition,
    grid_points: usize,
) -> Result<Trajectory, IntegrationError> {
    if p.dim() > ORACLE_DIM_LIMIT {
        return Err(IntegrationError::OracleDimension {
            dim: p.dim(),
            limit: ORACLE_DIM_LIMIT,
        });
    }
    let grid_points = grid_points.max(2);
    let n = p.dim();
    let bias = p.bias();

    let mut nodes = Vec::with_capacity(grid_points);
    let mut endpoint_states = Vec::with_capacity(2);
    for g in 0..grid_points {
        let lambda = 1.0 - g as f64 / (grid_points - 1) as f64;
        let spectrum =
            diagonalize(&p.hamiltonian_at(lambda)).map_err(IntegrationError::Hamiltonian)?;
        let elements = spectrum.transform(&bias);
        let positions = spectrum.eigenvalues.clone();
        let velocities: Vec<f64> = (0..n).map(|m| elements[(m, m)].re).collect();
        let adjacent: Vec<Complex64> = (0..n - 1)
            .map(|m| (positions[m] - positions[m + 1]) * elements[(m, m + 1)])
            .collect();
        if g == 0 || g == grid_points - 1 {
            let mut momenta = vec![Complex64::new(0.0, 0.0); n * n];
            for m in 0..n {
                for k in 0..n {
                    if m != k {
                        momenta[m * n + k] = (positions[m] - positions[k]) * elements[(m, k)];
                    }
                }
            }
            endpoint_states.push(PechukasState {
                lambda,
                positions: positions.clone(),
                velocities: velocities.clone(),
                angular_momenta: momenta,
            });
        }
        nodes.push(StepNode {
            lambda,
            positions,
            velocities,
            adjacent_momenta: adjacent,
            order: None,
        });
    }

    let final_state = endpoint_states.pop().expect("two endpoints recorded");
    let initial = endpoint_states.pop().expect("two endpoints recorded");
    let min_gap = nodes
        .iter()
        .flat_map(|nd| nd.positions.windows(2).map(|w| w[1] - w[0]))
        .fold(f64::INFINITY, f64::min);
    let metadata = TrajectoryMetadata {
        config: IntegratorConfig::default(),
        stats: StepStats::default(),
        momentum_drift: 0.0,
        energy_drift: 0.0,
        max_antisymmetry_defect: 0.0,
        min_adjacent_gap: min_gap,
    };
    let mut traj = Trajectory {
        n_levels: n,
        nodes,
        samples: Vec::new(),
        initial,
        final_state,
        metadata,
    };
    traj.build_samples(grid_points.min(2000));
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{initial_conditions_exact, sample_ensemble, EnsembleKind, EnsembleSpec, HbKind};

    #[test]
    fn endpoints_match_direct_diagonalization() {
        let spec = EnsembleSpec {
            dim: 5,
            ensemble_kind: EnsembleKind::Gue,
            sigma_h0: 1.0,
            hb_kind: HbKind::DiagonalPicketFence,
            seed: 5,
        };
        let p = sample_ensemble(&spec, 6.0).unwrap();
        let traj = track_spectrum_oracle(&p, 11).unwrap();

        let h0_spectrum = diagonalize(&p.h0).unwrap();
        let last = traj.nodes.last().unwrap();
        assert_eq!(last.lambda, 0.0);
        for (a, b) in last.positions.iter().zip(h0_spectrum.eigenvalues.iter()) {
            assert!((a - b).abs() < 1e-12);
        }

        let ic = initial_conditions_exact(&p).unwrap();
        let first = &traj.nodes[0];
        assert_eq!(first.lambda, 1.0);
        for (a, b) in first.positions.iter().zip(ic.positions.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_guard() {
        let spec = EnsembleSpec {
            dim: 80,
            ensemble_kind: EnsembleKind::Goe,
            sigma_h0: 1.0,
            hb_kind: HbKind::DiagonalPicketFence,
            seed: 1,
        };
        let p = sample_ensemble(&spec, 2.0).unwrap();
        assert!(matches!(
            track_spectrum_oracle(&p, 5),
            Err(IntegrationError::OracleDimension { dim: 80, .. })
        ));
    }
}
