use pechukas_core::hamiltonian::*;
use pechukas_core::pechukas::*;
use pechukas_core::transitions::*;
use std::time::Instant;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let z: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(250.0);
    let spec = EnsembleSpec {
        dim: n,
        ensemble_kind: EnsembleKind::Gue,
        sigma_h0: 0.1 * z,
        hb_kind: HbKind::RandomSameEnsemble,
        seed: 12345,
    };
    let t0 = Instant::now();
    let p = sample_ensemble(&spec, z).unwrap();
    let s0 = initial_conditions_exact(&p).unwrap();
    println!("setup: {:?}", t0.elapsed());
    let t1 = Instant::now();
    let cfg = IntegratorConfig::default();
    let traj = integrate(&p, &s0, &cfg).unwrap();
    println!(
        "integrate: {:?}  accepted {} rejected {} evals {}",
        t1.elapsed(),
        traj.metadata.stats.accepted,
        traj.metadata.stats.rejected,
        traj.metadata.stats.rhs_evals
    );
    println!(
        "momentum drift {:e} energy drift {:e} antisym {:e} min gap {:e}",
        traj.metadata.momentum_drift,
        traj.metadata.energy_drift,
        traj.metadata.max_antisymmetry_defect,
        traj.metadata.min_adjacent_gap
    );
    let t2 = Instant::now();
    let sweep = SweepSpec::new(100.0).unwrap();
    let events = detect_anticrossings(&traj, &sweep).unwrap();
    println!("detect: {:?}  events {}", t2.elapsed(), events.len());
    let mut per_level = vec![0usize; n];
    for e in &events {
        per_level[e.lower_level] += 1;
        per_level[e.lower_level + 1] += 1;
    }
    println!("per-level event participation: {:?}", per_level);
    let lambda_min = events.iter().map(|e| e.lambda_star).fold(f64::INFINITY, f64::min);
    let lambda_max = events.iter().map(|e| e.lambda_star).fold(0.0f64, f64::max);
    println!("event lambda range: [{lambda_min:.4}, {lambda_max:.4}]");
    // survival at a few T for scale calibration
    for t_total in [13.333, 40.0, 100.0, 200.0, 400.0, 1000.0] {
        let sweep = SweepSpec::new(t_total).unwrap();
        let evs: Vec<AnticrossingEvent> = events
            .iter()
            .map(|e| {
                let mut e2 = e.clone();
                e2.p_lz = e.probability_at(&sweep);
                e2
            })
            .collect();
        let occ = propagate_occupations(&evs, n).unwrap();
        println!(
            "1/T={:<9.5} P(1|1)={:.4} P(13|13)={:.4} P(25|25)={:.4} P(38|38)={:.4} P(50|50)={:.4}",
            1.0 / t_total,
            occ.entry(0, 0),
            occ.entry(12, 12),
            occ.entry(24, 24),
            occ.entry(37, 37),
            occ.entry(49, 49)
        );
    }
}
