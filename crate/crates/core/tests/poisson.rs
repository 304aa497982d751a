use std::f64::consts::PI;

use ksfluid::grid::{make_grid, ScalarField};
use ksfluid::harness::check::{gaussian_far_field_error, poisson_oracle_gap};
use ksfluid::poisson::{interaction_energy, laplacian_residual, solve_direct, solve_fft, DirectSolver, FftSolver, PoissonSolver};
use ksfluid::state::GaussianSpec;
use proptest::prelude::*;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[test]
fn fft_matches_direct_on_random_densities() {
    let gap = poisson_oracle_gap(7, 20, 32).unwrap();
    assert!(gap < 1e-8, "{gap}");
}

#[test]
fn gaussian_gradient_matches_enclosed_mass() {
    let err = gaussian_far_field_error(16.0, 128, 1.0, 1.0, 4.0).unwrap();
    assert!(err < 1e-2, "{err}");
    let fine = gaussian_far_field_error(16.0, 256, 1.0, 1.0, 4.0).unwrap();
    assert!(fine < err, "{fine} vs {err}");
}

#[test]
fn gaussian_interaction_energy_closed_form() {
    // x − y has variance 2σ² per axis, so E log|x−y| = (log 4σ² − γ)/2
    let (m, sigma) = (2.0, 1.0);
    let grid = make_grid(8.0, 128).unwrap();
    let spec = GaussianSpec::centered(m, sigma);
    let rho = ScalarField::from_fn(grid, |p| spec.density_at(p));
    let sol = solve_fft(&rho).unwrap();
    let w = interaction_energy(&rho, &sol);
    let exact = -m * m / (2.0 * PI) * 0.5 * ((4.0 * sigma * sigma).ln() - EULER_GAMMA);
    assert!((w - exact).abs() < 2e-3 * exact.abs(), "{w} vs {exact}");
}

#[test]
fn potential_solves_poisson_away_from_edges() {
    let grid = make_grid(6.0, 96).unwrap();
    let spec = GaussianSpec::centered(1.0, 1.0);
    let rho = ScalarField::from_fn(grid, |p| spec.density_at(p));
    let sol = solve_fft(&rho).unwrap();
    let peak = rho.max();
    let res = laplacian_residual(&rho, &sol.phi, 2);
    assert!(res < 2e-2 * peak, "{res} vs peak {peak}");
}

#[test]
fn solver_objects_agree_with_free_functions() {
    let grid = make_grid(1.5, 16).unwrap();
    let rho = ScalarField::from_fn(grid, |p| (1.0 + p[0] * p[1]).abs());
    let a = FftSolver::new(grid).solve(&rho).unwrap();
    let b = DirectSolver::new(grid).solve(&rho).unwrap();
    assert_eq!(a.phi, solve_fft(&rho).unwrap().phi);
    assert_eq!(b.phi, solve_direct(&rho).unwrap().phi);
}

fn field(n: usize, l: f64, vals: &[f64]) -> ScalarField {
    let grid = make_grid(l, n).unwrap();
    ScalarField::from_vec(grid, vals[..n * n].to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fft_equals_direct(k in 4usize..9, l in 0.3f64..5.0, vals in prop::collection::vec(0.0f64..3.0, 256)) {
        let n = 2 * k;
        let rho = field(n, l, &vals);
        let a = solve_fft(&rho).unwrap();
        let b = solve_direct(&rho).unwrap();
        let scale = b.phi.values().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for (x, y) in a.phi.values().iter().zip(b.phi.values()) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn potential_is_linear(k in 4usize..8, a in -2.0f64..2.0, vals in prop::collection::vec(0.0f64..1.0, 512)) {
        let n = 2 * k;
        let r1 = field(n, 1.0, &vals[..256]);
        let r2 = field(n, 1.0, &vals[256..]);
        let sum = ScalarField::from_vec(*r1.grid(), r1.values().iter().zip(r2.values()).map(|(p, q)| a * p + q).collect()).unwrap();
        let (s1, s2, s) = (solve_fft(&r1).unwrap(), solve_fft(&r2).unwrap(), solve_fft(&sum).unwrap());
        for i in 0..n * n {
            let expect = a * s1.phi.values()[i] + s2.phi.values()[i];
            prop_assert!((s.phi.values()[i] - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn rotation_by_quarter_turn_commutes(k in 4usize..8, vals in prop::collection::vec(0.0f64..1.0, 256)) {
        let n = 2 * k;
        let rho = field(n, 2.0, &vals);
        let g = *rho.grid();
        // (i, j) -> (n-1-j, i) is a 90 degree rotation of cell centres
        let rot = ScalarField::from_vec(g, (0..n * n).map(|k| {
            let (i, j) = (k % n, k / n);
            rho.at(j, n - 1 - i)
        }).collect()).unwrap();
        let a = solve_fft(&rho).unwrap();
        let b = solve_fft(&rot).unwrap();
        for j in 0..n {
            for i in 0..n {
                let p = a.phi.at(j, n - 1 - i);
                prop_assert!((b.phi.at(i, j) - p).abs() <= 1e-10 * (1.0 + p.abs()));
            }
        }
    }
}
