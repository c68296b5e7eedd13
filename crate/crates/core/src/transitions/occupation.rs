use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use super::events::AnticrossingEvent;
use super::TransitionError;

/// `p[m][n]`: probability to occupy level `m` at the end of the sweep having
/// started in level `n`. Built from the identity by a sequence of pairwise
/// doubly stochastic exchanges, so rows and columns both sum to one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OccupationMatrix {
    n: usize,
    p: Vec<f64>,
}

impl OccupationMatrix {
    pub fn identity(n: usize) -> Self {
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            p[i * n + i] = 1.0;
        }
        Self { n, p }
    }

    pub fn n_levels(&self) -> usize {
        self.n
    }

    /// `P(m|n)`.
    pub fn entry(&self, m: usize, n0: usize) -> f64 {
        self.p[m * self.n + n0]
    }

    /// The distribution over final levels for starting level `n0`.
    pub fn column(&self, n0: usize) -> Vec<f64> {
        (0..self.n).map(|m| self.entry(m, n0)).collect()
    }

    /// Mix rows `m` and `m+1` with exchange probability `prob`.
    pub fn apply_exchange(&mut self, m: usize, prob: f64) {
        let n = self.n;
        for col in 0..n {
            let a = self.p[m * n + col];
            let b = self.p[(m + 1) * n + col];
            self.p[m * n + col] = (1.0 - prob) * a + prob * b;
            self.p[(m + 1) * n + col] = prob * a + (1.0 - prob) * b;
        }
    }

    /// Largest deviation of any row or column sum from one, and the largest
    /// excursion of any entry outside `[0, 1]`.
    pub fn stochasticity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| self.p[i * n + j]).sum();
            let col: f64 = (0..n).map(|j| self.p[j * n + i]).sum();
            worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        for &v in &self.p {
            worst = worst.max((-v).max(v - 1.0).max(0.0));
        }
        worst
    }

    /// Mean squared level displacement `sum_m (m - n0)^2 P(m|n0)`.
    pub fn mean_square_displacement(&self, n0: usize) -> f64 {
        (0..self.n)
            .map(|m| {
                let d = m as f64 - n0 as f64;
                d * d * self.entry(m, n0)
            })
            .sum()
    }

    /// CSV dump: header `n_1..n_N`, one row per final level `m` ascending.
    pub fn write_csv(&self, path: &std::path::Path) -> std::io::Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        let header: Vec<String> = (1..=self.n).map(|j| format!("n_{j}")).collect();
        writeln!(f, "{}", header.join(","))?;
        for m in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.entry(m, j))).collect();
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn validate_order(events: &[AnticrossingEvent]) -> Result<(), TransitionError> {
    for w in events.windows(2) {
        if w[1].lambda_star > w[0].lambda_star {
            return Err(TransitionError::UnorderedEvents {
                first: w[0].lambda_star,
                second: w[1].lambda_star,
            });
        }
    }
    Ok(())
}

/// Deterministic probability-flow transport: start from the identity and
/// apply the doubly stochastic pairwise exchange of each event in evolution
/// order (decreasing lambda; simultaneous events by ascending pair rank).
pub fn propagate_occupations(
    events: &[AnticrossingEvent],
    n_levels: usize,
) -> Result<OccupationMatrix, TransitionError> {
    validate_order(events)?;
    let mut occ = OccupationMatrix::identity(n_levels);
    for e in events {
        if e.lower_level + 1 >= n_levels {
            return Err(TransitionError::EventOutOfRange {
                pair: e.lower_level,
                n_levels,
            });
        }
        occ.apply_exchange(e.lower_level, e.p_lz);
    }
    Ok(occ)
}

/// Stochastic cross-check of [`propagate_occupations`]: simulate `samples`
/// single-trajectory hops per starting level and histogram the outcomes.
pub fn monte_carlo_occupations(
    events: &[AnticrossingEvent],
    n_levels: usize,
    samples: usize,
    seed: u64,
) -> Result<OccupationMatrix, TransitionError> {
    validate_order(events)?;
    let mut counts = vec![0u64; n_levels * n_levels];
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for start in 0..n_levels {
        for _ in 0..samples {
            let mut level = start;
            for e in events {
                let m = e.lower_level;
                if level == m || level == m + 1 {
                    if rng.gen::<f64>() < e.p_lz {
                        level = if level == m { m + 1 } else { m };
                    }
                }
            }
            counts[level * n_levels + start] += 1;
        }
    }
    let p = counts
        .iter()
        .map(|&c| c as f64 / samples as f64)
        .collect();
    Ok(OccupationMatrix { n: n_levels, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(m: usize, lambda: f64, p: f64) -> AnticrossingEvent {
        AnticrossingEvent {
            lower_level: m,
            particles: (m, m + 1),
            lambda_star: lambda,
            delta_min: 0.1,
            coupling: 1.0,
            p_lz: p,
            near_degenerate: false,
        }
    }

    #[test]
    fn no_events_is_identity() {
        let occ = propagate_occupations(&[], 4).unwrap();
        for m in 0..4 {
            for n in 0..4 {
                assert_eq!(occ.entry(m, n), if m == n { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn full_exchange_swaps_rows() {
        let occ = propagate_occupations(&[event(1, 0.5, 1.0)], 3).unwrap();
        assert_eq!(occ.entry(1, 2), 1.0);
        assert_eq!(occ.entry(2, 1), 1.0);
        assert_eq!(occ.entry(0, 0), 1.0);
        assert_eq!(occ.entry(1, 1), 0.0);
    }

    #[test]
    fn two_half_exchanges_match_hand_enumeration() {
        // start in level 0; exchange (0,1) at p=1/2 then (1,2) at p=1/2:
        // stay 1/2; move to 1 then stay 1/4; move to 1 then to 2: 1/4.
        let events = vec![event(0, 0.8, 0.5), event(1, 0.4, 0.5)];
        let occ = propagate_occupations(&events, 3).unwrap();
        let col = occ.column(0);
        assert!((col[0] - 0.5).abs() < 1e-15);
        assert!((col[1] - 0.25).abs() < 1e-15);
        assert!((col[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn stays_doubly_stochastic() {
        let events = vec![
            event(0, 0.9, 0.3),
            event(3, 0.8, 0.99),
            event(1, 0.7, 0.5),
            event(2, 0.42, 0.11),
            event(1, 0.1, 0.77),
        ];
        let occ = propagate_occupations(&events, 5).unwrap();
        assert!(occ.stochasticity_defect() < 1e-14);
    }

    #[test]
    fn rejects_misordered_events() {
        let events = vec![event(0, 0.2, 0.5), event(1, 0.6, 0.5)];
        assert!(matches!(
            propagate_occupations(&events, 3),
            Err(TransitionError::UnorderedEvents { .. })
        ));
    }

    #[test]
    fn monte_carlo_matches_transfer_matrices() {
        let events = vec![
            event(0, 0.9, 0.25),
            event(1, 0.7, 0.6),
            event(2, 0.5, 0.9),
            event(0, 0.3, 0.45),
            event(3, 0.2, 0.08),
        ];
        let n = 5;
        let samples = 100_000usize;
        let det = propagate_occupations(&events, n).unwrap();
        let mc = monte_carlo_occupations(&events, n, samples, 2024).unwrap();
        for start in 0..n {
            for m in 0..n {
                let p = det.entry(m, start);
                let q = mc.entry(m, start);
                let sigma = (p * (1.0 - p) / samples as f64).sqrt();
                assert!(
                    (p - q).abs() <= 3.0 * sigma + 1e-9,
                    "P({m}|{start}): deterministic {p} vs MC {q}, sigma {sigma}"
                );
            }
        }
    }
}
