//! Browser bindings: evolve a Gaussian bump, test the log-HLS bound on Gaussians and
//! read off the virial slope. Everything here also builds natively so it can be tested.

use std::f64::consts::PI;

use ksfluid::functionals::{diagnostics, loghls_constant, virial_rhs, DiagnosticsRecord, CRITICAL_MASS};
use ksfluid::grid::make_grid;
use ksfluid::hydro::{cfl_dt, step, StepOptions};
use ksfluid::poisson::{FftSolver, PoissonSolution, PoissonSolver};
use ksfluid::state::{gaussian_state, FluidState, GaussianSpec, ModelParams};
use wasm_bindgen::prelude::*;

const CFL: f64 = 0.4;
const DT_MIN: f64 = 1e-10;

fn text(e: ksfluid::Error) -> String {
    e.to_string()
}

/// A rest Gaussian of unit width and mass `k · 8π` on `[-L, L]²`.
#[wasm_bindgen]
pub struct Simulation {
    state: FluidState,
    solution: PoissonSolution,
    solver: FftSolver,
    params: ModelParams,
    dissipation: f64,
    history: Vec<DiagnosticsRecord>,
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(mass_over_critical: f64, n: usize, half_width: f64) -> Result<Simulation, String> {
        if !(mass_over_critical > 0.0 && mass_over_critical.is_finite()) {
            return Err(format!("mass ratio must be positive, got {mass_over_critical}"));
        }
        let mass = mass_over_critical * CRITICAL_MASS;
        let grid = make_grid(half_width, n).map_err(text)?;
        let params = ModelParams::for_mass(mass, half_width);
        let state = gaussian_state(&grid, &GaussianSpec::centered(mass, 1.0), &params).map_err(text)?.state;
        let solver = FftSolver::new(grid);
        let solution = solver.solve(&state.rho).map_err(text)?;
        let first = diagnostics(&state, &solution, 0.0, &params);
        Ok(Simulation { state, solution, solver, params, dissipation: 0.0, history: vec![first] })
    }

    /// Advances by `duration` and records one diagnostics sample; returns the new time.
    pub fn advance(&mut self, duration: f64) -> Result<f64, String> {
        let end = self.state.t + duration;
        while self.state.t < end - 1e-12 {
            let dt = cfl_dt(&self.state, &self.params, CFL, DT_MIN).map_err(text)?.min(end - self.state.t);
            let k0 = self.state.kinetic();
            let out = step(&self.state, &self.solution, &self.params, &self.solver, dt, &StepOptions::default())
                .map_err(text)?;
            self.dissipation += dt * (k0 + out.state.kinetic());
            self.state = out.state;
            self.solution = out.solution;
        }
        let mut r = diagnostics(&self.state, &self.solution, self.dissipation, &self.params);
        r.dt = duration;
        self.history.push(r);
        Ok(self.state.t)
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn n(&self) -> usize {
        self.state.grid().n()
    }

    /// Cell densities, `x` fastest.
    pub fn density(&self) -> Vec<f64> {
        self.state.rho.values().to_vec()
    }

    pub fn rho_max_ratio(&self) -> f64 {
        self.state.rho.max() / self.history[0].rho_max
    }

    /// Samples so far as a JSON array of diagnostics records.
    pub fn history_json(&self) -> String {
        serde_json::to_string(&self.history).unwrap_or_default()
    }
}

/// `[F, −C(M)]` for a Gaussian of mass `M` and width `σ`, sampled on a grid wide
/// enough to hold it; the bound says `F ≥ −C(M)`.
#[wasm_bindgen]
pub fn loghls_gaussian(mass: f64, sigma: f64) -> Result<Vec<f64>, String> {
    let half_width = 6.0 * sigma;
    let grid = make_grid(half_width, 128).map_err(text)?;
    let params = ModelParams::for_mass(mass, half_width);
    let state = gaussian_state(&grid, &GaussianSpec::centered(mass, sigma), &params).map_err(text)?.state;
    let sol = FftSolver::new(grid).solve(&state.rho).map_err(text)?;
    let r = diagnostics(&state, &sol, 0.0, &params);
    Ok(vec![r.loghls, -loghls_constant(mass)])
}

/// `d/dt (X₂ + Xₘ)` at rest: `4M(1 − M/8π)`.
#[wasm_bindgen]
pub fn virial_slope(mass_over_critical: f64) -> f64 {
    virial_rhs(mass_over_critical * CRITICAL_MASS, 0.0)
}

#[wasm_bindgen]
pub fn critical_mass() -> f64 {
    8.0 * PI
}
