use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::HamiltonianError;

/// Dense Hermitian matrix in dimensionless energy units.
///
/// Hermiticity is enforced exactly on construction: every builder averages
/// `M` with its adjoint, so `entries[m][n] == conj(entries[n][m])` holds
/// bit-exactly and diagonal entries are real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Symmetrize an arbitrary square complex matrix into a Hermitian one.
    pub fn from_dense(m: DMatrix<Complex64>) -> Result<Self, HamiltonianError> {
        if m.nrows() != m.ncols() {
            return Err(HamiltonianError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() < 2 {
            return Err(HamiltonianError::DimensionTooSmall { dim: m.nrows() });
        }
        let n = m.nrows();
        let mut data = m;
        for i in 0..n {
            data[(i, i)] = Complex64::new(data[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = 0.5 * (data[(i, j)] + data[(j, i)].conj());
                data[(i, j)] = avg;
                data[(j, i)] = avg.conj();
            }
        }
        Ok(Self { data })
    }

    /// Build from an element function; the result is symmetrized.
    pub fn from_fn(
        dim: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self, HamiltonianError> {
        Self::from_dense(DMatrix::from_fn(dim, dim, |i, j| f(i, j)))
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self, HamiltonianError> {
        let n = diag.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn zeros(dim: usize) -> Result<Self, HamiltonianError> {
        Self::from_dense(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn as_dense(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// Largest |M - M^dagger| entry; zero for every constructed matrix.
    pub fn hermiticity_violation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.data[(i, j)] - self.data[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// True when every entry is real (GOE samples, the CNOT Hamiltonian).
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// `self + scale * other`, symmetrized.
    pub fn add_scaled(&self, other: &HermitianMatrix, scale: f64) -> HermitianMatrix {
        let data = &self.data + &other.data * Complex64::new(scale, 0.0);
        HermitianMatrix::from_dense(data).expect("sum of Hermitian matrices is square")
    }

    /// Uniform rescale of all entries.
    pub fn scaled(&self, factor: f64) -> HermitianMatrix {
        HermitianMatrix::from_dense(&self.data * Complex64::new(factor, 0.0))
            .expect("rescale preserves shape")
    }

    /// Parse the text matrix format: first line the dimension, then `dim`
    /// lines of `dim` whitespace-separated `re,im` pairs. Input whose
    /// Hermiticity violation exceeds 1e-12 is rejected; accepted input is
    /// symmetrized exactly.
    pub fn parse_text(text: &str) -> Result<Self, HamiltonianError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let dim_line = lines
            .next()
            .ok_or_else(|| HamiltonianError::Parse("empty matrix file".into()))?;
        let dim: usize = dim_line
            .trim()
            .parse()
            .map_err(|_| HamiltonianError::Parse(format!("bad dimension line {dim_line:?}")))?;
        if dim < 2 {
            return Err(HamiltonianError::DimensionTooSmall { dim });
        }
        let mut data = DMatrix::<Complex64>::zeros(dim, dim);
        for row in 0..dim {
            let line = lines.next().ok_or_else(|| {
                HamiltonianError::Parse(format!("expected {dim} rows, found {row}"))
            })?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != dim {
                return Err(HamiltonianError::Parse(format!(
                    "row {row} has {} entries, expected {dim}",
                    entries.len()
                )));
            }
            for (col, tok) in entries.iter().enumerate() {
                let (re, im) = tok.split_once(',').ok_or_else(|| {
                    HamiltonianError::Parse(format!("entry {tok:?} is not a re,im pair"))
                })?;
                let re: f64 = re
                    .parse()
                    .map_err(|_| HamiltonianError::Parse(format!("bad real part {re:?}")))?;
                let im: f64 = im
                    .parse()
                    .map_err(|_| HamiltonianError::Parse(format!("bad imaginary part {im:?}")))?;
                data[(row, col)] = Complex64::new(re, im);
            }
        }
        let mut violation = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                violation = violation.max((data[(i, j)] - data[(j, i)].conj()).norm());
            }
        }
        if violation > 1e-12 {
            return Err(HamiltonianError::NotHermitian { violation });
        }
        Self::from_dense(data)
    }

    pub fn read_file(path: &Path) -> Result<Self, HamiltonianError> {
        let text = std::fs::read_to_string(path).map_err(|e| HamiltonianError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse_text(&text)
    }

    /// Serialize in the text matrix format with round-trip-exact floats.
    pub fn to_text(&self) -> String {
        let n = self.dim();
        let mut out = String::new();
        let _ = writeln!(out, "{n}");
        for i in 0..n {
            for j in 0..n {
                if j > 0 {
                    out.push(' ');
                }
                let z = self.data[(i, j)];
                let _ = write!(out, "{},{}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_file(&self, path: &Path) -> Result<(), HamiltonianError> {
        std::fs::write(path, self.to_text()).map_err(|e| HamiltonianError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}

/// The full input of the evolution: the pair `(H0, Hb)` with bias scale `Z`.
///
/// The instantaneous Hamiltonian is `H(lambda) = H0 + lambda * Z * Hb`.
#[derive(Debug, Clone)]
pub struct ProblemDefinition {
    pub h0: HermitianMatrix,
    pub hb: HermitianMatrix,
    pub z: f64,
    pub hbar: f64,
}

impl ProblemDefinition {
    pub fn new(
        h0: HermitianMatrix,
        hb: HermitianMatrix,
        z: f64,
    ) -> Result<Self, HamiltonianError> {
        Self::with_hbar(h0, hb, z, 1.0)
    }

    pub fn with_hbar(
        h0: HermitianMatrix,
        hb: HermitianMatrix,
        z: f64,
        hbar: f64,
    ) -> Result<Self, HamiltonianError> {
        if h0.dim() != hb.dim() {
            return Err(HamiltonianError::DimensionMismatch {
                h0: h0.dim(),
                hb: hb.dim(),
            });
        }
        if !(z > 0.0) {
            return Err(HamiltonianError::InvalidScale { z });
        }
        if !(hbar > 0.0) {
            return Err(HamiltonianError::InvalidHbar { hbar });
        }
        Ok(Self { h0, hb, z, hbar })
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    /// `H(lambda) = H0 + lambda * Z * Hb`.
    pub fn hamiltonian_at(&self, lambda: f64) -> HermitianMatrix {
        self.h0.add_scaled(&self.hb, lambda * self.z)
    }

    /// The bias term `Z * Hb` whose matrix elements drive the gas.
    pub fn bias(&self) -> HermitianMatrix {
        self.hb.scaled(self.z)
    }

    /// Rescale every energy in the problem by `factor`.
    pub fn rescaled(&self, factor: f64) -> ProblemDefinition {
        ProblemDefinition {
            h0: self.h0.scaled(factor),
            hb: self.hb.scaled(factor),
            z: self.z,
            hbar: self.hbar,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrization_is_exact() {
        let m = DMatrix::from_fn(4, 4, |i, j| Complex64::new(i as f64, j as f64 + 0.5));
        let h = HermitianMatrix::from_dense(m).unwrap();
        assert_eq!(h.hermiticity_violation(), 0.0);
        for i in 0..4 {
            assert_eq!(h.entry(i, i).im, 0.0);
        }
    }

    #[test]
    fn rejects_dim_one() {
        let m = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        assert!(matches!(
            HermitianMatrix::from_dense(m),
            Err(HamiltonianError::DimensionTooSmall { dim: 1 })
        ));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let h = HermitianMatrix::from_fn(3, |i, j| {
            Complex64::new(
                (i * 3 + j) as f64 / 7.0,
                if i == j { 0.0 } else { 0.125 * (i as f64 - j as f64) },
            )
        })
        .unwrap();
        let parsed = HermitianMatrix::parse_text(&h.to_text()).unwrap();
        assert_eq!(h, parsed);
    }

    #[test]
    fn parser_rejects_non_hermitian() {
        let text = "2\n0,0 1,0\n0.5,0 0,0\n";
        match HermitianMatrix::parse_text(text) {
            Err(HamiltonianError::NotHermitian { violation }) => {
                assert!(violation > 1e-12);
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn parser_accepts_roundoff_asymmetry() {
        // 5e-13 asymmetry is inside the 1e-12 gate and gets symmetrized away.
        let text = "2\n0,0 1,0\n0.9999999999995,0 0,0\n";
        let h = HermitianMatrix::parse_text(text).unwrap();
        assert_eq!(h.hermiticity_violation(), 0.0);
    }

    #[test]
    fn problem_validation() {
        let h0 = HermitianMatrix::zeros(3).unwrap();
        let hb = HermitianMatrix::zeros(4).unwrap();
        assert!(matches!(
            ProblemDefinition::new(h0.clone(), hb, 1.0),
            Err(HamiltonianError::DimensionMismatch { .. })
        ));
        let hb3 = HermitianMatrix::zeros(3).unwrap();
        assert!(matches!(
            ProblemDefinition::new(h0, hb3, -2.0),
            Err(HamiltonianError::InvalidScale { .. })
        ));
    }
}
