//! Kinetic-solver checks: force kernel against the direct two-particle
//! formula, exact free streaming, collision-term structure, and the
//! effective-repulsion estimator.

use num_complex::Complex64;
use pechukas_core::hamiltonian::{
    initial_conditions_exact, sample_ensemble, EnsembleKind, EnsembleSpec, HbKind,
};
use pechukas_core::kinetic::{
    estimate_gamma, evolve_kinetic, mean_field_force, step_kinetic, Axis, KineticConfig,
    PhaseSpaceDistribution,
};

fn grids(nx: usize, nv: usize) -> (Axis, Axis) {
    (
        Axis::new(-10.0, 10.0, nx).unwrap(),
        Axis::new(-5.0, 5.0, nv).unwrap(),
    )
}

#[test]
fn symmetric_density_has_zero_central_force() {
    let (gx, gv) = grids(256, 32);
    let mut f = PhaseSpaceDistribution::zeros(1, gx, gv).unwrap();
    f.gaussian_bump(0, 0.0, 1.5, 0.0, 1.0);
    let cfg = KineticConfig {
        gamma_mf: 0.7,
        ..Default::default()
    };
    let force = mean_field_force(&f, &cfg).unwrap();
    // the two central cells straddle x = 0; antisymmetry pins them near zero
    let nx = gx.cells;
    let f_center = 0.5 * (force[nx / 2 - 1] + force[nx / 2]);
    let f_scale = force.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    assert!(f_scale > 0.0);
    assert!(
        f_center.abs() < 1e-10 * f_scale,
        "central force {f_center:e} vs scale {f_scale:e}"
    );
    // and the force is antisymmetric about the center
    for k in 0..nx / 2 {
        let a = force[k];
        let b = force[nx - 1 - k];
        assert!((a + b).abs() < 1e-10 * f_scale);
    }
}

#[test]
fn zero_gamma_means_zero_force() {
    let (gx, gv) = grids(64, 16);
    let mut f = PhaseSpaceDistribution::zeros(1, gx, gv).unwrap();
    f.gaussian_bump(0, 1.0, 0.5, 0.0, 1.0);
    let force = mean_field_force(&f, &KineticConfig::default()).unwrap();
    assert!(force.iter().all(|&x| x == 0.0));
}

#[test]
fn two_bumps_feel_the_two_particle_force() {
    // narrow unit-mass bumps at +/- a: the mean-field force at each bump
    // must approach the direct pair force 2 Gamma / (2a)^3
    let gx = Axis::new(-8.0, 8.0, 1024).unwrap();
    let gv = Axis::new(-1.0, 1.0, 8).unwrap();
    let mut f = PhaseSpaceDistribution::zeros(1, gx, gv).unwrap();
    let a = 2.0;
    let width = 0.05;
    f.gaussian_bump(0, a, width, 0.0, 0.3);
    f.gaussian_bump(0, -a, width, 0.0, 0.3);
    let gamma = 1.3;
    let cfg = KineticConfig {
        gamma_mf: gamma,
        ..Default::default()
    };
    let force = mean_field_force(&f, &cfg).unwrap();
    // the self-force of a bump cancels in its mass-weighted average (the
    // kernel is odd), leaving the direct two-particle force 2 Gamma / (2a)^3
    let rho = f.x_marginal();
    let dx = gx.step();
    let weighted = |positive_side: bool| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..gx.cells {
            let x = gx.center(i);
            if (x > 0.0) == positive_side {
                num += rho[i] * force[i] * dx;
                den += rho[i] * dx;
            }
        }
        num / den
    };
    let expect = 2.0 * gamma / (2.0 * a).powi(3);
    let got_right = weighted(true);
    let got_left = weighted(false);
    assert!(
        (got_right - expect).abs() < 0.02 * expect,
        "right bump force {got_right:e} vs pair formula {expect:e}"
    );
    assert!(
        (got_left + expect).abs() < 0.02 * expect,
        "left bump force {got_left:e} vs pair formula {expect:e}"
    );
}

#[test]
fn free_streaming_step_is_exact_translation() {
    // one operator-split step against the translated analytic bump
    let gx = Axis::new(-10.0, 10.0, 256).unwrap();
    let gv = Axis::new(-5.0, 5.0, 256).unwrap();
    let mut f = PhaseSpaceDistribution::zeros(1, gx, gv).unwrap();
    let (x0, sx, v0, sv) = (-1.0, 1.2, 1.5, 0.8);
    f.gaussian_bump(0, x0, sx, v0, sv);
    let cfg = KineticConfig::default();

    let dl = cfg.cfl * gx.step() / 5.0; // largest CFL-admissible step
    let stepped = step_kinetic(&f, &cfg, dl).unwrap();

    // amplitude fixed by the unit-mass normalization of the initial bump
    let amplitude = f.f.iter().cloned().fold(0.0f64, f64::max);
    let mut worst = 0.0f64;
    for iv in 0..gv.cells {
        let v = gv.center(iv);
        for ix in 0..gx.cells {
            let x = gx.center(ix);
            let xs = x - v * dl;
            let expect = amplitude
                * (-0.5 * ((xs - x0) / sx).powi(2) - 0.5 * ((v - v0) / sv).powi(2)).exp();
            let got = stepped.value(0, ix, iv);
            worst = worst.max((got - expect).abs() / amplitude);
        }
    }
    assert!(
        worst < 1e-3,
        "free-streaming interpolation error {worst:e} exceeds 1e-3"
    );
    assert!(stepped.min_value() >= 0.0);
}

#[test]
fn free_streaming_conserves_mass_over_unit_lambda() {
    let gx = Axis::new(-14.0, 14.0, 256).unwrap();
    let gv = Axis::new(-5.0, 5.0, 128).unwrap();
    let mut f = PhaseSpaceDistribution::zeros(1, gx, gv).unwrap();
    f.gaussian_bump(0, -1.0, 1.2, 1.5, 0.8);
    let mass0 = f.total_mass();
    let (evolved, steps) = evolve_kinetic(&f, &KineticConfig::default(), 0.0, 1.0).unwrap();
    assert!(steps > 1);
    let drift = (evolved.total_mass() - mass0).abs() / mass0;
    assert!(drift < 1e-6, "mass drift {drift:e} over one lambda unit");
}

#[test]
fn label_uniform_distribution_has_zero_collision_term() {
    let (gx, gv) = grids(64, 48);
    let mut f = PhaseSpaceDistribution::zeros(2, gx, gv).unwrap();
    f.gaussian_bump(0, 0.0, 1.0, 0.5, 0.7);
    f.gaussian_bump(1, 0.0, 1.0, 0.5, 0.7);
    let without = KineticConfig {
        gamma_mf: 0.2,
        gamma_st: 0.0,
        ..Default::default()
    };
    let with = KineticConfig {
        gamma_st: 5.0,
        ..without
    };
    let dl = 1e-3;
    let a = step_kinetic(&f, &without, dl).unwrap();
    let b = step_kinetic(&f, &with, dl).unwrap();
    let diff = a
        .f
        .iter()
        .zip(b.f.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    assert!(
        diff < 1e-14,
        "collision term acted on a label-uniform distribution: {diff:e}"
    );
}

#[test]
fn collision_exchanges_labels_but_conserves_cellwise_mass() {
    let (gx, gv) = grids(48, 64);
    let mut f = PhaseSpaceDistribution::zeros(2, gx, gv).unwrap();
    f.gaussian_bump(0, 0.0, 1.2, 1.0, 0.5);
    f.gaussian_bump(1, 0.0, 1.2, -1.0, 0.5);
    let cfg = KineticConfig {
        gamma_st: 2.0,
        kappa: 0.5,
        ..Default::default()
    };
    let dl = 1e-3;
    let stepped = step_kinetic(&f, &cfg, dl).unwrap();
    // labels exchanged something
    let moved: f64 = (0..2)
        .map(|n| (stepped.mass(n) - f.mass(n)).abs())
        .sum();
    assert!(moved > 1e-8, "collision term did nothing");
    // but the label-summed density per position cell is untouched by the
    // exchange (streaming moved it slightly; compare against gamma_st = 0)
    let reference = step_kinetic(
        &f,
        &KineticConfig {
            gamma_st: 0.0,
            ..cfg
        },
        dl,
    )
    .unwrap();
    let cell_mass = |f: &pechukas_core::kinetic::PhaseSpaceDistribution, ix: usize| -> f64 {
        (0..2)
            .map(|n| (0..gv.cells).map(|iv| f.value(n, ix, iv)).sum::<f64>())
            .sum()
    };
    for ix in 0..gx.cells {
        let with = cell_mass(&stepped, ix);
        let without = cell_mass(&reference, ix);
        assert!(
            (with - without).abs() < 1e-10 * without.max(1.0),
            "cell {ix}: label-summed mass changed by the exchange"
        );
    }
}

#[test]
fn repulsive_gas_expands() {
    let gx = Axis::new(-10.0, 10.0, 256).unwrap();
    let gv = Axis::new(-3.0, 3.0, 64).unwrap();
    let mut f = PhaseSpaceDistribution::zeros(1, gx, gv).unwrap();
    f.gaussian_bump(0, 0.0, 0.7, 0.0, 0.2);
    let cfg = KineticConfig {
        gamma_mf: 1.0,
        ..Default::default()
    };
    let mut spread = f.x_spread();
    let mut current = f;
    for _ in 0..5 {
        let (next, _) = evolve_kinetic(&current, &cfg, 0.0, 0.05).unwrap();
        let s = next.x_spread();
        assert!(s >= spread - 1e-12, "spread shrank: {s} < {spread}");
        spread = s;
        current = next;
    }
}

#[test]
fn gamma_estimator_trivial_and_stable() {
    // constant momenta
    let n = 4;
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            if j != k {
                l[j * n + k] = Complex64::new(0.6, -0.8); // |l| = 1
            }
        }
    }
    assert!((estimate_gamma(n, &[l]).unwrap() - 1.0).abs() < 1e-14);
    let zeros = vec![Complex64::new(0.0, 0.0); n * n];
    assert_eq!(estimate_gamma(n, &[zeros]).unwrap(), 0.0);
    assert!(estimate_gamma(n, &[]).is_err());

    // split-sample stability over sampled initial conditions
    let dim = 20;
    let collect = |seeds: std::ops::Range<u64>| -> Vec<Vec<Complex64>> {
        seeds
            .map(|seed| {
                let spec = EnsembleSpec {
                    dim,
                    ensemble_kind: EnsembleKind::Gue,
                    sigma_h0: 1.0,
                    hb_kind: HbKind::RandomSameEnsemble,
                    seed,
                };
                let p = sample_ensemble(&spec, 10.0).unwrap();
                initial_conditions_exact(&p).unwrap().angular_momenta
            })
            .collect()
    };
    let first = collect(0..50);
    let second = collect(50..100);
    let g1 = estimate_gamma(dim, &first).unwrap();
    let g2 = estimate_gamma(dim, &second).unwrap();
    assert!(
        (g1 - g2).abs() < 0.1 * g1.max(g2),
        "disjoint halves disagree: {g1} vs {g2}"
    );
}
