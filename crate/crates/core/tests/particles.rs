use std::f64::consts::PI;
use std::io::BufReader;

use ksfluid::grid::make_grid;
use ksfluid::harness::check::{momentum_decay_error, two_body_acceleration_error};
use ksfluid::particles::{
    default_regularization, deposit_density, empirical_moments, ensemble_step, nbody_virial_check, pair_force,
    read_csv, sample_ensemble, write_csv, EnsembleSpec, ParticleEnsemble,
};
use proptest::prelude::*;

fn plain(n: usize, m: f64, seed: u64) -> ParticleEnsemble {
    sample_ensemble(&EnsembleSpec::gaussian_at_rest(n, m, 1.0, 8.0, seed)).unwrap()
}

#[test]
fn virial_identity_holds_along_trajectories() {
    let mut e = plain(1000, 8.0 * PI, 3);
    let res = nbody_virial_check(&mut e, 0.01, 100).unwrap();
    assert!(res.relative() < 1e-2, "{res:?}");
    let mut e = plain(400, 16.0 * PI, 4);
    e.vel.iter_mut().enumerate().for_each(|(i, v)| *v = [0.1 * (i % 7) as f64, -0.05]);
    let res = nbody_virial_check(&mut e, 0.01, 100).unwrap();
    assert!(res.relative() < 1e-2, "{res:?}");
}

#[test]
fn virial_check_refuses_bath() {
    let mut e = plain(100, 1.0, 1);
    e.bath_temperature = 1.0;
    assert!(nbody_virial_check(&mut e, 0.01, 1).is_err());
}

#[test]
fn momentum_decays_with_and_without_forces() {
    for interacting in [true, false] {
        let err = momentum_decay_error(9, interacting).unwrap();
        assert!(err < 1e-10, "interacting {interacting}: {err}");
    }
}

#[test]
fn two_particles_attract_by_the_kernel_gradient() {
    assert!(two_body_acceleration_error().unwrap() < 1e-6);
}

#[test]
fn sampled_second_moment_has_expected_spread() {
    // X₂ = (M/N) Σ|X|², mean 2Mσ², standard deviation M·2σ²/√N
    let (n, m) = (1000, 4.0 * PI);
    let sd = m * 2.0 / (n as f64).sqrt();
    let mut mean = 0.0;
    for seed in 0..20 {
        let x2 = empirical_moments(&plain(n, m, seed)).second_moment;
        assert!((x2 - 2.0 * m).abs() < 4.0 * sd, "seed {seed}: {x2}");
        mean += x2 / 20.0;
    }
    assert!((mean - 2.0 * m).abs() < 4.0 * sd / 20f64.sqrt(), "{mean}");
}

#[test]
fn moment_matching_is_exact() {
    let spec = EnsembleSpec {
        velocity_temperature: 1.0,
        moment_match: true,
        antithetic: true,
        ..EnsembleSpec::gaussian_at_rest(1000, 4.0 * PI, 1.5, 8.0, 2)
    };
    let e = sample_ensemble(&spec).unwrap();
    let m = empirical_moments(&e);
    assert!((m.second_moment - 2.0 * spec.mass * 1.5 * 1.5).abs() < 1e-10 * m.second_moment);
    assert!((m.kinetic - 2.0 * spec.mass).abs() < 1e-10 * m.kinetic);
    assert!(m.cross_moment.abs() < 1e-10);
    let p = e.total_momentum();
    assert!(p[0].abs() < 1e-12 && p[1].abs() < 1e-12);
    assert!(sample_ensemble(&EnsembleSpec { n: 1001, ..spec }).is_err());
}

#[test]
fn same_seed_same_trajectory() {
    let spec = EnsembleSpec { bath_temperature: 1.0, ..EnsembleSpec::gaussian_at_rest(200, 8.0, 1.0, 4.0, 17) };
    let run = || {
        let mut e = sample_ensemble(&spec).unwrap();
        for _ in 0..10 {
            ensemble_step(&mut e, 0.05).unwrap();
        }
        (e.pos, e.vel)
    };
    assert_eq!(run(), run());
    let mut other = sample_ensemble(&EnsembleSpec { seed: 18, ..spec }).unwrap();
    ensemble_step(&mut other, 0.05).unwrap();
    assert_ne!(other.pos, run().0);
}

#[test]
fn step_size_is_limited_by_friction_time() {
    let mut e = plain(10, 1.0, 0);
    assert!(ensemble_step(&mut e, 0.2).is_err());
    assert!(ensemble_step(&mut e, 0.0).is_err());
    assert!(ensemble_step(&mut e, 0.1).is_ok());
}

#[test]
fn deposit_conserves_mass_and_tracks_second_moment() {
    let m = 4.0 * PI;
    let e = plain(5000, m, 5);
    let grid = make_grid(6.0, 96).unwrap();
    let d = deposit_density(&e, &grid);
    assert!(d.warning.is_none());
    assert!((d.rho.integral() + d.mass_outside - m).abs() < 1e-10);
    // bilinear sharing widens each particle by dx²/6 per axis
    let x2_grid = d.rho.integral_with(|p| p[0] * p[0] + p[1] * p[1]);
    let x2 = empirical_moments(&e).second_moment;
    let dx = grid.dx();
    assert!((x2_grid - x2).abs() < m * dx * dx / 2.0, "{x2_grid} vs {x2}");
}

#[test]
fn deposit_warns_when_particles_leave_the_grid() {
    let e = plain(1000, 1.0, 6);
    let d = deposit_density(&e, &make_grid(0.5, 16).unwrap());
    assert!(d.warning.is_some());
    assert!((d.rho.integral() + d.mass_outside - 1.0).abs() < 1e-12);
}

#[test]
fn csv_round_trip() {
    let mut e = plain(50, 2.0, 8);
    e.vel[3] = [1e-300, -7.25];
    let mut buf = Vec::new();
    write_csv(&e, &mut buf).unwrap();
    assert!(buf.starts_with(b"id,x,y,vx,vy\n"));
    let (pos, vel) = read_csv(BufReader::new(&buf[..])).unwrap();
    assert_eq!(pos, e.pos);
    assert_eq!(vel, e.vel);
    assert!(read_csv(BufReader::new(&b"id,x,y\n0,1,2\n"[..])).is_err());
    assert!(read_csv(BufReader::new(&b"id,x,y,vx,vy\n1,0,0,0,0\n"[..])).is_err());
}

#[test]
fn regularization_scales_with_box_and_count() {
    assert!((default_regularization(10_000, 8.0) - 8e-4).abs() < 1e-15);
}

proptest! {
    #[test]
    fn pair_force_is_odd_and_attractive(x in -5.0f64..5.0, y in -5.0f64..5.0, eps in 1e-6f64..0.5) {
        let f = pair_force([x, y], eps);
        let g = pair_force([-x, -y], eps);
        prop_assert_eq!(f[0], -g[0]);
        prop_assert_eq!(f[1], -g[1]);
        prop_assert!(f[0] * x + f[1] * y <= 0.0);
        let r2 = x * x + y * y;
        let mag = (f[0] * f[0] + f[1] * f[1]).sqrt();
        prop_assert!((mag - r2.sqrt() / (2.0 * PI * (r2 + eps * eps))).abs() <= 1e-12 * (1.0 + mag));
    }

    #[test]
    fn total_momentum_decays_exactly(seed in 0u64..1000, steps in 1usize..20) {
        let mut e = sample_ensemble(&EnsembleSpec { velocity_temperature: 1.0, ..EnsembleSpec::gaussian_at_rest(64, 3.0, 1.0, 4.0, seed) }).unwrap();
        let p0 = e.total_momentum();
        for _ in 0..steps {
            ensemble_step(&mut e, 0.05).unwrap();
        }
        let decay = (-e.t / e.tau).exp();
        let p = e.total_momentum();
        for k in 0..2 {
            prop_assert!((p[k] - p0[k] * decay).abs() < 1e-12 * (1.0 + p0[k].abs()));
        }
    }
}
