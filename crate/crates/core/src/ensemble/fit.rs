use serde::{Deserialize, Serialize};

use super::CampaignError;

/// Least-squares power-law fit `value = amplitude * T^gamma` on log-log axes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    /// 1-based level this fit belongs to (0 for synthetic data).
    pub level: usize,
    pub gamma: f64,
    pub amplitude: f64,
    /// Inclusive T range the fit used.
    pub fit_window: (f64, f64),
    /// r.m.s. of the log residuals.
    pub residual: f64,
    pub points: usize,
}

/// Fit `log value` against `log T` over the points inside `window`.
/// Requires at least four in-window points, all with positive values.
pub fn fit_power_law(
    points: &[(f64, f64)],
    window: (f64, f64),
    level: usize,
) -> Result<ScalingFit, CampaignError> {
    let selected: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .collect();
    if selected.len() < 4 {
        return Err(CampaignError::FitTooFewPoints {
            points: selected.len(),
        });
    }
    if let Some(&(t, v)) = selected.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(CampaignError::FitNonPositive { t, value: v });
    }
    let n = selected.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, v) in &selected {
        let x = t.ln();
        let y = v.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(CampaignError::FitDegenerate);
    }
    let gamma = (n * sxy - sx * sy) / denom;
    let intercept = (sy - gamma * sx) / n;
    let mut ss = 0.0;
    for &(t, v) in &selected {
        let r = v.ln() - (intercept + gamma * t.ln());
        ss += r * r;
    }
    let t_lo = selected.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t_hi = selected.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(ScalingFit {
        level,
        gamma,
        amplitude: intercept.exp(),
        fit_window: (t_lo, t_hi),
        residual: (ss / n).sqrt(),
        points: selected.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_square_root_law() {
        let points: Vec<(f64, f64)> = (1..=8).map(|i| {
            let t = 10.0 * i as f64;
            (t, t.sqrt())
        })
        .collect();
        let fit = fit_power_law(&points, (0.0, f64::INFINITY), 7).unwrap();
        assert!((fit.gamma - 0.5).abs() < 1e-12);
        assert!((fit.amplitude - 1.0).abs() < 1e-12);
        assert!(fit.residual < 1e-13);
        assert_eq!(fit.level, 7);
    }

    #[test]
    fn recovers_amplitude_and_quarter_exponent() {
        let points: Vec<(f64, f64)> = (1..=6)
            .map(|i| {
                let t = 3.0f64.powi(i);
                (t, 3.0 * t.powf(0.25))
            })
            .collect();
        let fit = fit_power_law(&points, (0.0, f64::INFINITY), 1).unwrap();
        assert!((fit.gamma - 0.25).abs() < 1e-12);
        assert!((fit.amplitude - 3.0).abs() < 1e-11);
    }

    #[test]
    fn window_excludes_points() {
        let points: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, i as f64)).collect();
        let fit = fit_power_law(&points, (3.0, 8.0), 0).unwrap();
        assert_eq!(fit.points, 6);
        assert_eq!(fit.fit_window, (3.0, 8.0));
    }

    #[test]
    fn too_few_points_is_an_error() {
        let points = vec![(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)];
        assert!(matches!(
            fit_power_law(&points, (0.0, 10.0), 0),
            Err(CampaignError::FitTooFewPoints { points: 3 })
        ));
    }

    #[test]
    fn nonpositive_values_are_rejected() {
        let points = vec![(1.0, 1.0), (2.0, 0.0), (3.0, 3.0), (4.0, 4.0)];
        assert!(matches!(
            fit_power_law(&points, (0.0, 10.0), 0),
            Err(CampaignError::FitNonPositive { .. })
        ));
    }
}
