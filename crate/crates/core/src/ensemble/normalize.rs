use crate::hamiltonian::{diagonalize, ProblemDefinition};
use crate::transitions::SweepSpec;

use super::CampaignError;

/// Rescale every energy of the problem by one factor so that the mean
/// adjacent level spacing of `H0` equals `hbar * |lambda_dot|`, the figure
/// normalization of the single-realization evolution plots. Returns the
/// rescaled problem together with the factor applied.
pub fn apply_fig1b_normalization(
    p: &ProblemDefinition,
    sweep: &SweepSpec,
) -> Result<(ProblemDefinition, f64), CampaignError> {
    let spectrum = diagonalize(&p.h0)?;
    let mean_spacing = spectrum.spectral_range() / (p.dim() as f64 - 1.0);
    if !(mean_spacing > 0.0) {
        return Err(CampaignError::DegenerateSpectrum { mean_spacing });
    }
    let target = sweep.hbar * sweep.lambda_dot();
    let factor = target / mean_spacing;
    Ok((p.rescaled(factor), factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::HermitianMatrix;

    fn problem(diag: &[f64]) -> ProblemDefinition {
        let h0 = HermitianMatrix::from_diagonal(diag).unwrap();
        let hb = HermitianMatrix::from_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        ProblemDefinition::new(h0, hb, 5.0).unwrap()
    }

    #[test]
    fn already_normalized_is_identity() {
        let sweep = SweepSpec::new(2.0).unwrap(); // target spacing 1/2
        let p = problem(&[0.0, 0.5, 1.0]);
        let (_, factor) = apply_fig1b_normalization(&p, &sweep).unwrap();
        assert!((factor - 1.0).abs() < 1e-15);
    }

    #[test]
    fn double_spacing_halves_energies() {
        let sweep = SweepSpec::new(2.0).unwrap();
        let p = problem(&[0.0, 1.0, 2.0]); // spacing 1 = 2 * hbar/T
        let (scaled, factor) = apply_fig1b_normalization(&p, &sweep).unwrap();
        assert!((factor - 0.5).abs() < 1e-15);
        assert!((scaled.h0.entry(2, 2).re - 1.0).abs() < 1e-15);
        assert!((scaled.hb.entry(2, 2).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rediagonalized_spacing_matches_target() {
        let sweep = SweepSpec::with_hbar(7.0, 1.3).unwrap();
        let p = problem(&[-0.7, 0.9, 1.4]);
        let (scaled, _) = apply_fig1b_normalization(&p, &sweep).unwrap();
        let s = diagonalize(&scaled.h0).unwrap();
        let spacing = s.spectral_range() / 2.0;
        let target = sweep.hbar / sweep.total_time;
        assert!((spacing - target).abs() < 1e-12 * target.max(1.0));
    }

    #[test]
    fn degenerate_spectrum_is_an_error() {
        let sweep = SweepSpec::new(1.0).unwrap();
        let p = problem(&[2.0, 2.0, 2.0]);
        assert!(matches!(
            apply_fig1b_normalization(&p, &sweep),
            Err(CampaignError::DegenerateSpectrum { .. })
        ));
    }
}
