//! Oracle and property checks that run in seconds. `ksfluid check` prints them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{detect_blowup, BlowupSignal, ScenarioConfig};
use crate::error::Result;
use crate::functionals::{loghls_constant, loghls_functional, loghls_tolerance, DiagnosticsRecord, Regime};
use crate::grid::{make_grid, ScalarField, VectorField};
use crate::hydro::{physical_flux, rusanov_flux, step, Conserved, Direction, StepOptions};
use crate::particles::{ensemble_step, pair_force, ParticleEnsemble};
use crate::poisson::{interaction_energy, solve_direct, solve_fft, FftSolver, PoissonSolver};
use crate::snapshot::Snapshot;
use crate::state::{gaussian_state, FluidState, GaussianSpec, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl CheckResult {
    /// Passes when `value <= limit`.
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.to_string(), value, limit, pass: value <= limit }
    }
}

fn max_abs<'a>(v: impl IntoIterator<Item = &'a f64>) -> f64 {
    v.into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Largest relative difference between the FFT and direct solvers, potential and
/// gradient, over `count` random densities on an `n²` grid.
pub fn poisson_oracle_gap(seed: u64, count: usize, n: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let l = rng.random_range(0.5..4.0);
        let grid = make_grid(l, n)?;
        let rho = ScalarField::from_fn(grid, |_| rng.random_range(0.0..1.0));
        let a = solve_fft(&rho)?;
        let b = solve_direct(&rho)?;
        let rel = |x: &[f64], y: &[f64]| {
            let diff = x.iter().zip(y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            diff / max_abs(y).max(f64::MIN_POSITIVE)
        };
        worst = worst
            .max(rel(a.phi.values(), b.phi.values()))
            .max(rel(a.grad_phi.x(), b.grad_phi.x()))
            .max(rel(a.grad_phi.y(), b.grad_phi.y()));
    }
    Ok(worst)
}

/// Largest relative error of `|∇Φ|` against `M(1 − e^{−r²/2σ²})/(2πr)` for a Gaussian,
/// over cells with `r_min ≤ r ≤ r_max`; an outward-pointing gradient counts as error 1.
pub fn gaussian_far_field_error(half_width: f64, n: usize, sigma: f64, r_min: f64, r_max: f64) -> Result<f64> {
    let grid = make_grid(half_width, n)?;
    let spec = GaussianSpec::centered(1.0, sigma);
    let rho = ScalarField::from_fn(grid, |p| spec.density_at(p));
    let sol = solve_fft(&rho)?;
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let p = grid.center(i, j);
            let r = p[0].hypot(p[1]);
            if r < r_min || r > r_max {
                continue;
            }
            let g = sol.grad_phi.at(i, j);
            let exact = (1.0 - (-r * r / (2.0 * sigma * sigma)).exp()) / (2.0 * PI * r);
            let inward = -(g[0] * p[0] + g[1] * p[1]) / r;
            let err = if inward <= 0.0 { 1.0 } else { (g[0].hypot(g[1]) - exact).abs() / exact };
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

/// Worst `−C(M) − F` over Gaussians of the given widths (negative means the bound holds).
pub fn loghls_gaussian_margin(mass: f64, sigmas: &[f64], half_width: f64, n: usize) -> Result<f64> {
    let grid = make_grid(half_width, n)?;
    let params = ModelParams::for_mass(mass, half_width);
    let mut worst = f64::NEG_INFINITY;
    for &s in sigmas {
        let state = gaussian_state(&grid, &GaussianSpec::centered(mass, s), &params)?.state;
        let sol = solve_fft(&state.rho)?;
        let f = loghls_functional(&state.rho, interaction_energy(&state.rho, &sol), params.rho_floor);
        worst = worst.max(-loghls_constant(mass) - f);
    }
    Ok(worst)
}

/// Relative error of `K(t) = K(0) e^{−2t}` with transport and gravity switched off.
pub fn friction_decay_error(seed: u64) -> Result<f64> {
    let grid = make_grid(1.0, 16)?;
    let params = ModelParams::for_mass(1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = ScalarField::from_fn(grid, |_| rng.random_range(0.5..2.0));
    let mx: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let my: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut state = FluidState::new(rho, VectorField::from_components(grid, mx, my)?, 0.0)?;
    let k0 = state.kinetic();
    let solver = FftSolver::new(grid);
    let sol = solver.solve(&state.rho)?;
    let opts = StepOptions { transport: false, gravity: false, ..Default::default() };
    let mut worst = 0.0f64;
    for _ in 0..100 {
        state = step(&state, &sol, &params, &solver, 0.01, &opts)?.state;
        let exact = k0 * (-2.0 * state.t).exp();
        worst = worst.max((state.kinetic() - exact).abs() / exact);
    }
    Ok(worst)
}

/// Per-step mass balance before the final floor, relative to `M`, over `steps` steps of
/// the full model from a Gaussian.
pub fn mass_balance_error(mass: f64, steps: usize) -> Result<f64> {
    let grid = make_grid(6.0, 64)?;
    let params = ModelParams::for_mass(mass, 6.0);
    let mut state = gaussian_state(&grid, &GaussianSpec::centered(mass, 1.0), &params)?.state;
    let solver = FftSolver::new(grid);
    let mut sol = solver.solve(&state.rho)?;
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let before = state.mass();
        let dt = crate::hydro::cfl_dt(&state, &params, 0.4, 1e-10)?;
        let out = step(&state, &sol, &params, &solver, dt, &StepOptions::default())?;
        let r = out.report;
        let err = (r.mass_before_clamp - r.stage_clamped_mass - (before - r.boundary_outflow)).abs() / mass;
        worst = worst.max(err);
        state = out.state;
        sol = out.solution;
    }
    Ok(worst)
}

/// Largest `|F_rus(u, u) − F(u)|` over random states; consistency makes it exactly 0.
pub fn rusanov_consistency_error(seed: u64, count: usize) -> f64 {
    let params = ModelParams::for_mass(1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let u = Conserved::new(rng.random_range(1e-6..10.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        for dir in [Direction::X, Direction::Y] {
            let a = rusanov_flux(u, u, dir, &params);
            let b = physical_flux(u, dir, &params);
            worst = worst.max((a.rho - b.rho).abs()).max((a.mx - b.mx).abs()).max((a.my - b.my).abs());
        }
    }
    worst
}

/// Relative error of `P(t) = P(0) e^{−t/τ}`; pair forces cancel, so this holds
/// with and without interaction.
pub fn momentum_decay_error(seed: u64, interacting: bool) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos: Vec<[f64; 2]> = (0..64).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
    let vel: Vec<[f64; 2]> = (0..64).map(|_| [rng.random_range(0.0..1.0), rng.random_range(-1.0..0.5)]).collect();
    let tau = 1.0;
    let mut e = ParticleEnsemble::new(pos, vel, 1.0, tau, 0.01, seed)?;
    e.interacting = interacting;
    let p0 = e.total_momentum();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        ensemble_step(&mut e, 0.05)?;
        let p = e.total_momentum();
        let decay = (-e.t / tau).exp();
        let norm = p0[0].hypot(p0[1]) * decay;
        worst = worst.max((p[0] - p0[0] * decay).hypot(p[1] - p0[1] * decay) / norm);
    }
    Ok(worst)
}

/// Largest relative error of the two initial accelerations against `1/(4π)` for
/// `M = 1` particles at `(0,0)` and `(1,0)`.
pub fn two_body_acceleration_error() -> Result<f64> {
    let e = ParticleEnsemble::new(vec![[0.0, 0.0], [1.0, 0.0]], vec![[0.0; 2]; 2], 1.0, 1.0, 1e-9, 0)?;
    let a = e.accelerations();
    let exact = 1.0 / (4.0 * PI);
    let e0 = (a[0][0] - exact).abs().max(a[0][1].abs());
    let e1 = (a[1][0] + exact).abs().max(a[1][1].abs());
    Ok(e0.max(e1) / exact)
}

/// The whole quick suite.
pub fn run_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    out.push(CheckResult::at_most("poisson_fft_vs_direct", poisson_oracle_gap(seed, 20, 32)?, 1e-8));
    out.push(CheckResult::at_most("poisson_gaussian_far_field", gaussian_far_field_error(16.0, 128, 1.0, 1.0, 4.0)?, 1e-2));
    let c8 = loghls_constant(8.0 * PI);
    let exact = 8.0 * PI * (1.0 - 3.0 * 2f64.ln());
    out.push(CheckResult::at_most("loghls_constant_8pi", (c8 - exact).abs() / exact.abs(), 1e-12));
    for m in [4.0 * PI, 8.0 * PI] {
        let margin = loghls_gaussian_margin(m, &[0.5, 1.0, 2.0], 10.0, 128)?;
        out.push(CheckResult::at_most(&format!("loghls_gaussians_M={:.0}pi", m / PI), margin, loghls_tolerance(m)));
    }
    out.push(CheckResult::at_most("hydro_friction_decay", friction_decay_error(seed)?, 1e-8));
    out.push(CheckResult::at_most("hydro_mass_balance", mass_balance_error(4.0 * PI, 20)?, 1e-12));
    out.push(CheckResult::at_most("hydro_rusanov_consistency", rusanov_consistency_error(seed, 1000), 0.0));
    let f = pair_force([-1.0, 0.0], 1e-12);
    out.push(CheckResult::at_most("particles_pair_force", (f[0] - 1.0 / (2.0 * PI)).abs().max(f[1].abs()), 1e-12));
    out.push(CheckResult::at_most("particles_two_body_acceleration", two_body_acceleration_error()?, 1e-6));
    out.push(CheckResult::at_most("particles_momentum_decay_free", momentum_decay_error(seed, false)?, 1e-10));
    out.push(CheckResult::at_most("particles_momentum_decay_interacting", momentum_decay_error(seed, true)?, 1e-10));
    let synthetic: Vec<DiagnosticsRecord> = (0..6)
        .map(|k| DiagnosticsRecord { t: k as f64, second_moment: 6.0 - k as f64, rho_max: 1e4, dt: 1e-12, ..Default::default() })
        .collect();
    let fires = matches!(detect_blowup(&synthetic, 1.0, 1e-10), BlowupSignal::Suspected { .. });
    let mut flat = synthetic.clone();
    flat.iter_mut().for_each(|r| r.rho_max = 1.0);
    let quiet = detect_blowup(&flat, 1.0, 1e-10) == BlowupSignal::NoSignal;
    out.push(CheckResult::at_most("blowup_rule", if fires && quiet { 0.0 } else { 1.0 }, 0.0));
    let grid = make_grid(3.0, 24)?;
    let state = gaussian_state(&grid, &GaussianSpec::centered(1.0, 0.5), &ModelParams::for_mass(1.0, 3.0))?.state;
    let mut buf = Vec::new();
    Snapshot::from_state(&state).write(&mut buf)?;
    let back = Snapshot::read(&buf[..])?.into_state()?;
    out.push(CheckResult::at_most("snapshot_round_trip", if back == state { 0.0 } else { 1.0 }, 0.0));
    let cfg = ScenarioConfig::for_regime(Regime::Critical);
    let same = ScenarioConfig::parse(&cfg.to_config_text())? == cfg;
    out.push(CheckResult::at_most("config_round_trip", if same { 0.0 } else { 1.0 }, 0.0));
    Ok(out)
}
