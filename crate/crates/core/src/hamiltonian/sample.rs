use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{diagonalize, HamiltonianError, HermitianMatrix, ProblemDefinition};

/// Which Gaussian ensemble the fluctuating part is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnsembleKind {
    /// Complex Hermitian matrices (no time-reversal symmetry).
    Gue,
    /// Real symmetric matrices (time-reversal symmetric).
    Goe,
}

/// Shape of the bias Hamiltonian `Hb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HbKind {
    /// `Hb = diag(0, 1, ..., N-1)`: unit level spacing, trivial eigenbasis.
    DiagonalPicketFence,
    /// An independent draw from the same Gaussian ensemble, rescaled so its
    /// mean adjacent level spacing is 1 before the `Z` multiplier.
    RandomSameEnsemble,
}

/// Specification of one random problem draw.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub ensemble_kind: EnsembleKind,
    /// r.m.s. of the off-diagonal entries of `H0`. Diagonal entries get
    /// r.m.s. `sigma_h0 * sqrt(2)` (standard Gaussian-ensemble convention).
    pub sigma_h0: f64,
    pub hb_kind: HbKind,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), HamiltonianError> {
        if self.dim < 2 {
            return Err(HamiltonianError::DimensionTooSmall { dim: self.dim });
        }
        if !(self.sigma_h0 > 0.0) {
            return Err(HamiltonianError::InvalidSigma {
                sigma: self.sigma_h0,
            });
        }
        Ok(())
    }
}

/// Draw a Gaussian random Hermitian matrix with off-diagonal r.m.s. `sigma`.
fn gaussian_matrix(dim: usize, kind: EnsembleKind, sigma: f64, rng: &mut ChaCha12Rng) -> HermitianMatrix {
    let mut data = DMatrix::<Complex64>::zeros(dim, dim);
    let normal = StandardNormal;
    for i in 0..dim {
        let g: f64 = normal.sample(rng);
        data[(i, i)] = Complex64::new(sigma * std::f64::consts::SQRT_2 * g, 0.0);
        for j in (i + 1)..dim {
            let entry = match kind {
                EnsembleKind::Gue => {
                    let re: f64 = normal.sample(rng);
                    let im: f64 = normal.sample(rng);
                    Complex64::new(sigma * re / std::f64::consts::SQRT_2, sigma * im / std::f64::consts::SQRT_2)
                }
                EnsembleKind::Goe => {
                    let re: f64 = normal.sample(rng);
                    Complex64::new(sigma * re, 0.0)
                }
            };
            data[(i, j)] = entry;
            data[(j, i)] = entry.conj();
        }
    }
    HermitianMatrix::from_dense(data).expect("dim checked by caller")
}

/// Sample a `(H0, Hb)` problem. `H0` is drawn first, then `Hb`, from a single
/// ChaCha stream seeded by `spec.seed`, so draws are reproducible bit for bit.
pub fn sample_ensemble(spec: &EnsembleSpec, z: f64) -> Result<ProblemDefinition, HamiltonianError> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let h0 = gaussian_matrix(spec.dim, spec.ensemble_kind, spec.sigma_h0, &mut rng);
    let hb = match spec.hb_kind {
        HbKind::DiagonalPicketFence => {
            let diag: Vec<f64> = (0..spec.dim).map(|k| k as f64).collect();
            HermitianMatrix::from_diagonal(&diag)?
        }
        HbKind::RandomSameEnsemble => {
            let raw = gaussian_matrix(spec.dim, spec.ensemble_kind, 1.0, &mut rng);
            let s = diagonalize(&raw)?;
            let mean_spacing = s.spectral_range() / (spec.dim as f64 - 1.0);
            raw.scaled(1.0 / mean_spacing)
        }
    };
    ProblemDefinition::new(h0, hb, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64) -> EnsembleSpec {
        EnsembleSpec {
            dim: 8,
            ensemble_kind: EnsembleKind::Gue,
            sigma_h0: 0.7,
            hb_kind: HbKind::DiagonalPicketFence,
            seed,
        }
    }

    #[test]
    fn samples_are_hermitian_and_deterministic() {
        let a = sample_ensemble(&spec(42), 5.0).unwrap();
        let b = sample_ensemble(&spec(42), 5.0).unwrap();
        assert_eq!(a.h0.hermiticity_violation(), 0.0);
        assert_eq!(a.h0, b.h0);
        assert_eq!(a.hb, b.hb);
        let c = sample_ensemble(&spec(43), 5.0).unwrap();
        assert_ne!(a.h0, c.h0);
    }

    #[test]
    fn goe_samples_are_real() {
        let mut s = spec(7);
        s.ensemble_kind = EnsembleKind::Goe;
        s.hb_kind = HbKind::RandomSameEnsemble;
        let p = sample_ensemble(&s, 1.0).unwrap();
        assert!(p.h0.is_real());
        assert!(p.hb.is_real());
    }

    #[test]
    fn gue_off_diagonal_moments() {
        // Law-of-large-numbers check on the sampler's own output:
        // mean within 4 standard errors of zero, r.m.s. within 5% of sigma.
        let n_samples = 10_000usize;
        let sigma = 0.7;
        let dim = 8usize;
        let n_offdiag = dim * (dim - 1) / 2;
        let mut sum_re = 0.0;
        let mut sum_sq = 0.0;
        let count = (n_samples * n_offdiag) as f64;
        for s in 0..n_samples {
            let p = sample_ensemble(&spec(1000 + s as u64), 1.0).unwrap();
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let z = p.h0.entry(i, j);
                    sum_re += z.re + z.im;
                    sum_sq += z.norm_sqr();
                }
            }
        }
        // each of re and im has variance sigma^2/2
        let mean = sum_re / (2.0 * count);
        let stderr = (sigma * sigma / 2.0 / (2.0 * count)).sqrt();
        assert!(
            mean.abs() < 4.0 * stderr,
            "off-diagonal mean {mean} exceeds 4 x stderr {stderr}"
        );
        let rms = (sum_sq / count).sqrt();
        assert!(
            (rms - sigma).abs() < 0.05 * sigma,
            "off-diagonal rms {rms} differs from sigma {sigma} by more than 5%"
        );
    }

    #[test]
    fn random_hb_has_unit_mean_spacing() {
        let mut s = spec(11);
        s.hb_kind = HbKind::RandomSameEnsemble;
        let p = sample_ensemble(&s, 1.0).unwrap();
        let spectrum = diagonalize(&p.hb).unwrap();
        let mean_spacing = spectrum.spectral_range() / (s.dim as f64 - 1.0);
        assert!((mean_spacing - 1.0).abs() < 1e-12);
    }
}
