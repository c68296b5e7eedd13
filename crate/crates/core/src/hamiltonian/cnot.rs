use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{HamiltonianError, HermitianMatrix, ProblemDefinition};

/// Configuration of the CNOT test Hamiltonian.
///
/// `epsilon` is the bias added to the initial-state dots of both qubits; it
/// selects the computation input (the default -0.1 selects `|00>`).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CnotConfig {
    pub epsilon: f64,
}

impl Default for CnotConfig {
    fn default() -> Self {
        Self { epsilon: -0.1 }
    }
}

/// Number of basis states: two qubits, each an electron on one of
/// 2 columns x 2 dots.
pub const CNOT_DIM: usize = 16;

// Single-qubit dot index: d = 2*column + dot, so d in {0,1} is column 0
// (the input column) and d in {2,3} is column 1 (the output column).
const fn dot(column: usize, state: usize) -> usize {
    2 * column + state
}

// Two-qubit occupation basis index, qubit 0 major.
const fn basis(d0: usize, d1: usize) -> usize {
    4 * d0 + d1
}

/// The ground-state-quantum-computing CNOT Hamiltonian on the 16-state
/// occupation basis, plus the input-selection bias `epsilon` on the dot-0
/// input dots of both qubits.
///
/// Each qubit row holds exactly one electron and every operator conserves the
/// per-row electron number, so fermionic signs cancel and the second-quantized
/// form reduces to projectors and occupation counts on the 16 basis states:
///
/// - two projector pairs enforcing that the output column carries the input
///   column's state through the gate (identity on the control, controlled-X
///   on the target),
/// - diagonal penalties on the column-mismatched configurations,
/// - the diagonal `epsilon` bias.
///
/// For `epsilon = 0` the result is positive semidefinite with a fourfold
/// degenerate zero ground state (one valid history per computational input).
pub fn build_cnot(cfg: &CnotConfig) -> HermitianMatrix {
    let mut h = DMatrix::<Complex64>::zeros(CNOT_DIM, CNOT_DIM);

    let mut add_projector = |plus: usize, minus: usize| {
        // |plus> - |minus>, un-normalized, as in the operator product.
        let pairs = [(plus, 1.0), (minus, -1.0)];
        for &(a, wa) in &pairs {
            for &(b, wb) in &pairs {
                h[(a, b)] += Complex64::new(wa * wb, 0.0);
            }
        }
    };

    // Control qubit in state 0 (dots 0 and 2): target carries j unchanged.
    for j in 0..2 {
        add_projector(basis(dot(1, 0), dot(1, j)), basis(dot(0, 0), dot(0, j)));
    }
    // Control in state 1 (dots 1 and 3): target state flips.
    for j in 0..2 {
        add_projector(basis(dot(1, 1), dot(1, j)), basis(dot(0, 1), dot(0, 1 - j)));
    }

    for d0 in 0..4 {
        for d1 in 0..4 {
            let k = basis(d0, d1);
            let q0_col = d0 / 2;
            let q1_col = d1 / 2;
            let mut e = 0.0;
            // Penalties on mixed-column configurations.
            if q0_col == 0 && q1_col == 1 {
                e += 1.0;
            }
            if q0_col == 1 && q1_col == 0 {
                e += 1.0;
            }
            // Input-selection bias on the (column 0, dot 0) dots.
            if d0 == dot(0, 0) {
                e += cfg.epsilon;
            }
            if d1 == dot(0, 0) {
                e += cfg.epsilon;
            }
            h[(k, k)] += Complex64::new(e, 0.0);
        }
    }

    HermitianMatrix::from_dense(h).expect("16x16 is square")
}

/// Default bias Hamiltonian for the CNOT evolution: a picket-fence diagonal
/// `k + 1e-3 k^2` in the occupation basis. The quadratic dither keeps the
/// spacings of `H(1)` pairwise distinct so no level pair starts degenerate.
pub fn cnot_bias_hb() -> HermitianMatrix {
    let diag: Vec<f64> = (0..CNOT_DIM)
        .map(|k| k as f64 + 1e-3 * (k * k) as f64)
        .collect();
    HermitianMatrix::from_diagonal(&diag).expect("diagonal builder")
}

/// Complete CNOT evolution problem with the default bias and scale `z`.
pub fn cnot_problem(cfg: &CnotConfig, z: f64) -> Result<ProblemDefinition, HamiltonianError> {
    ProblemDefinition::new(build_cnot(cfg), cnot_bias_hb(), z)
}
