use serde::{Deserialize, Serialize};

use super::TransitionError;

/// Uniform sweep: the control parameter moves at `|lambda_dot| = 1/T`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepSpec {
    pub total_time: f64,
    pub hbar: f64,
}

impl SweepSpec {
    pub fn new(total_time: f64) -> Result<Self, TransitionError> {
        Self::with_hbar(total_time, 1.0)
    }

    pub fn with_hbar(total_time: f64, hbar: f64) -> Result<Self, TransitionError> {
        if !(total_time > 0.0) || !(hbar > 0.0) {
            return Err(TransitionError::InvalidSweep {
                total_time,
                hbar,
            });
        }
        Ok(Self { total_time, hbar })
    }

    pub fn lambda_dot(&self) -> f64 {
        1.0 / self.total_time
    }
}

/// Landau-Zener exchange probability at an avoided crossing:
/// `exp(-delta_min^2 / (4 pi hbar |<m|Z Hb|m+1>| |lambda_dot|))`.
///
/// A vanishing gap is a full diabatic passage (`p = 1`); a vanishing
/// coupling with a finite gap never exchanges (`p = 0`).
pub fn lz_probability(
    delta_min: f64,
    coupling: f64,
    sweep: &SweepSpec,
) -> Result<f64, TransitionError> {
    if delta_min < 0.0 || coupling < 0.0 {
        return Err(TransitionError::InvalidLzInput {
            delta_min,
            coupling,
        });
    }
    if delta_min == 0.0 {
        return Ok(1.0);
    }
    if coupling == 0.0 {
        return Ok(0.0);
    }
    let exponent =
        delta_min * delta_min / (4.0 * std::f64::consts::PI * sweep.hbar * coupling * sweep.lambda_dot());
    Ok((-exponent).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_crossing_is_diabatic() {
        let sweep = SweepSpec::new(10.0).unwrap();
        assert_eq!(lz_probability(0.0, 0.0, &sweep).unwrap(), 1.0);
        assert_eq!(lz_probability(0.0, 5.0, &sweep).unwrap(), 1.0);
    }

    #[test]
    fn zero_coupling_never_exchanges() {
        let sweep = SweepSpec::new(10.0).unwrap();
        assert_eq!(lz_probability(0.5, 0.0, &sweep).unwrap(), 0.0);
    }

    #[test]
    fn unit_exponent_gives_inverse_e() {
        // delta^2 = 4 pi hbar c |lambda_dot| forces p = 1/e
        let sweep = SweepSpec::with_hbar(7.0, 2.0).unwrap();
        let coupling = 0.3;
        let delta =
            (4.0 * std::f64::consts::PI * sweep.hbar * coupling * sweep.lambda_dot()).sqrt();
        let p = lz_probability(delta, coupling, &sweep).unwrap();
        assert!((p - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn doubling_time_squares_probability() {
        let delta = 0.2;
        let coupling = 0.4;
        let p1 = lz_probability(delta, coupling, &SweepSpec::new(50.0).unwrap()).unwrap();
        let p2 = lz_probability(delta, coupling, &SweepSpec::new(100.0).unwrap()).unwrap();
        assert!((p2 - p1 * p1).abs() < 1e-15);
        assert!(p2 < p1 && p1 < 1.0);
    }

    #[test]
    fn monotonicity() {
        let sweep = SweepSpec::new(20.0).unwrap();
        let base = lz_probability(0.3, 0.5, &sweep).unwrap();
        assert!(lz_probability(0.3, 0.8, &sweep).unwrap() > base);
        assert!(lz_probability(0.4, 0.5, &sweep).unwrap() < base);
        let faster = SweepSpec::new(10.0).unwrap();
        assert!(lz_probability(0.3, 0.5, &faster).unwrap() > base);
    }

    #[test]
    fn negative_inputs_are_rejected() {
        let sweep = SweepSpec::new(1.0).unwrap();
        assert!(lz_probability(-0.1, 0.5, &sweep).is_err());
        assert!(lz_probability(0.1, -0.5, &sweep).is_err());
    }
}
