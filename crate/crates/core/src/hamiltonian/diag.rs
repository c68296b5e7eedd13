use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{HamiltonianError, HermitianMatrix};

/// Maximum QR sweeps before `diagonalize` gives up.
const EIGEN_MAX_ITER: usize = 4096;

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and an
/// orthonormal set of eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max - min` of the eigenvalues.
    pub fn spectral_range(&self) -> f64 {
        self.eigenvalues[self.dim() - 1] - self.eigenvalues[0]
    }

    /// Smallest adjacent gap together with the index of its lower level.
    pub fn min_adjacent_gap(&self) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for i in 0..self.dim() - 1 {
            let gap = self.eigenvalues[i + 1] - self.eigenvalues[i];
            if gap < best.1 {
                best = (i, gap);
            }
        }
        best
    }

    /// Matrix elements `V^dagger A V` of an operator in this eigenbasis.
    pub fn transform(&self, a: &HermitianMatrix) -> DMatrix<Complex64> {
        self.eigenvectors.adjoint() * a.as_dense() * &self.eigenvectors
    }

    /// Max deviation of `V^dagger V` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let g = self.eigenvectors.adjoint() * &self.eigenvectors;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// Group eigenvalues into degenerate clusters: adjacent values closer
    /// than `gap_tol` share a cluster. Returns the multiplicity of each
    /// cluster in ascending energy order.
    pub fn degeneracy_multiplicities(&self, gap_tol: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut count = 1usize;
        for i in 1..self.dim() {
            if self.eigenvalues[i] - self.eigenvalues[i - 1] <= gap_tol {
                count += 1;
            } else {
                out.push(count);
                count = 1;
            }
        }
        out.push(count);
        out
    }
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The reconstruction residual `max|V L V^dagger - M|` stays below
/// `1e-10 * spectral_range` for dense matrices in the supported size range.
pub fn diagonalize(m: &HermitianMatrix) -> Result<Spectrum, HamiltonianError> {
    let eig = SymmetricEigen::try_new(m.as_dense().clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(HamiltonianError::EigenNonConvergence {
            dim: m.dim(),
            max_iter: EIGEN_MAX_ITER,
        })?;
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}
