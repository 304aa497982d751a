//! Conserved fluid state, model parameters and Gaussian initial data.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, Sum, VectorField};

/// Model constants. `friction = 1` and `sound_speed = 1` give the unit-temperature
/// isothermal system with unit relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub friction: f64,
    pub sound_speed: f64,
    /// Density floor enforced after every step.
    pub rho_floor: f64,
    /// Desingularisation scale in `u = m ρ / (ρ² + ε²)`.
    pub eps_u: f64,
}

impl ModelParams {
    pub const DEFAULT_EPS_U: f64 = 1e-10;

    /// Parameters for total mass `mass` on the box `[-L, L]²`: floor `1e-12 M / L²`.
    pub fn for_mass(mass: f64, half_width: f64) -> Self {
        Self {
            friction: 1.0,
            sound_speed: 1.0,
            rho_floor: 1e-12 * mass / (half_width * half_width),
            eps_u: Self::DEFAULT_EPS_U,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rho_floor) || !positive(self.eps_u) {
            return Err(Error::InvalidParameter(format!(
                "rho_floor and eps_u must be positive, got {} and {}",
                self.rho_floor, self.eps_u
            )));
        }
        if !(self.friction.is_finite() && self.friction >= 0.0) || !positive(self.sound_speed) {
            return Err(Error::InvalidParameter(format!(
                "friction must be >= 0 and sound speed > 0, got {} and {}",
                self.friction, self.sound_speed
            )));
        }
        Ok(())
    }

    /// Desingularised velocity for one cell.
    #[inline]
    pub fn velocity(&self, rho: f64, m: [f64; 2]) -> [f64; 2] {
        let w = rho / (rho * rho + self.eps_u * self.eps_u);
        [m[0] * w, m[1] * w]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub rho: ScalarField,
    pub m: VectorField,
    pub t: f64,
}

impl FluidState {
    pub fn new(rho: ScalarField, m: VectorField, t: f64) -> Result<Self> {
        if !rho.grid().same_as(m.grid()) {
            return Err(Error::GridMismatch("density and momentum grids differ".into()));
        }
        Ok(Self { rho, m, t })
    }

    pub fn grid(&self) -> &GridSpec {
        self.rho.grid()
    }

    pub fn mass(&self) -> f64 {
        self.rho.integral()
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        self.rho.check_finite("rho")?;
        self.m.check_finite("momentum")?;
        if let Some(index) = self.rho.values().iter().position(|&r| r < params.rho_floor) {
            return Err(Error::InvalidParameter(format!(
                "density {} below floor {} at cell {index}",
                self.rho.values()[index],
                params.rho_floor
            )));
        }
        Ok(())
    }

    /// `u = m ρ / (ρ² + ε_u²)` at cell `k`.
    #[inline]
    pub fn velocity(&self, params: &ModelParams, k: usize) -> [f64; 2] {
        params.velocity(self.rho.values()[k], [self.m.x()[k], self.m.y()[k]])
    }

    /// `∫ |m|²/ρ`. The density floor keeps the quotient finite.
    pub fn kinetic(&self) -> f64 {
        let (rho, mx, my) = (self.rho.values(), self.m.x(), self.m.y());
        let mut acc = Sum::default();
        for k in 0..rho.len() {
            acc.add((mx[k] * mx[k] + my[k] * my[k]) / rho[k]);
        }
        acc.value() * self.grid().cell_area()
    }
}

/// Free function form of [`FluidState::velocity`].
pub fn velocity(state: &FluidState, params: &ModelParams, cell: (usize, usize)) -> [f64; 2] {
    state.velocity(params, state.grid().index(cell.0, cell.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mass: f64,
    pub sigma: f64,
    pub center: [f64; 2],
    pub velocity: [f64; 2],
}

impl GaussianSpec {
    pub fn centered(mass: f64, sigma: f64) -> Self {
        Self { mass, sigma, center: [0.0, 0.0], velocity: [0.0, 0.0] }
    }

    pub fn density_at(&self, p: [f64; 2]) -> f64 {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let s2 = self.sigma * self.sigma;
        self.mass / (2.0 * PI * s2) * (-(dx * dx + dy * dy) / (2.0 * s2)).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub state: FluidState,
    /// Mass added by raising sub-floor cells to the floor.
    pub clamped_mass: f64,
}

/// Sample a Gaussian bump at cell centres, renormalise to the exact requested mass
/// and floor the far tail.
pub fn gaussian_state(grid: &GridSpec, spec: &GaussianSpec, params: &ModelParams) -> Result<InitialData> {
    if !(spec.mass.is_finite() && spec.mass > 0.0) || !(spec.sigma.is_finite() && spec.sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Gaussian needs M > 0 and sigma > 0, got M = {} sigma = {}",
            spec.mass, spec.sigma
        )));
    }
    let dx = grid.dx();
    if spec.sigma < 2.0 * dx {
        return Err(Error::UnderResolved(format!(
            "sigma/dx = {:.3} < 2 (sigma = {}, dx = {})",
            spec.sigma / dx,
            spec.sigma,
            dx
        )));
    }
    let reach = spec.center[0].abs().max(spec.center[1].abs()) + 5.0 * spec.sigma;
    if grid.half_width() < reach {
        return Err(Error::UnderResolved(format!(
            "(L - |x0|)/sigma = {:.3} < 5",
            (grid.half_width() - reach + 5.0 * spec.sigma) / spec.sigma
        )));
    }
    params.validate()?;

    let raw = ScalarField::from_fn(*grid, |p| spec.density_at(p));
    let floor = params.rho_floor;
    let area = grid.cell_area();
    // first pass: which cells end up at the floor once the bulk is scaled to M
    let total = raw.integral();
    let guess = spec.mass / total;
    let mut bulk = Sum::default();
    let mut floored = 0usize;
    for &v in raw.values() {
        if v * guess < floor {
            floored += 1;
        } else {
            bulk.add(v);
        }
    }
    let floor_mass = floored as f64 * floor * area;
    let scale = (spec.mass - floor_mass) / (bulk.value() * area);
    let mut clamped = Sum::default();
    let values: Vec<f64> = raw
        .values()
        .iter()
        .map(|&v| {
            if v * guess < floor {
                clamped.add((floor - v * scale) * area);
                floor
            } else {
                v * scale
            }
        })
        .collect();
    let rho = ScalarField::from_vec(*grid, values)?;
    let mx: Vec<f64> = rho.values().iter().map(|r| r * spec.velocity[0]).collect();
    let my: Vec<f64> = rho.values().iter().map(|r| r * spec.velocity[1]).collect();
    let m = VectorField::from_components(*grid, mx, my)?;
    Ok(InitialData { state: FluidState::new(rho, m, 0.0)?, clamped_mass: clamped.value() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn params() -> ModelParams {
        ModelParams { friction: 1.0, sound_speed: 1.0, rho_floor: 1e-12, eps_u: 1e-10 }
    }

    #[test]
    fn velocity_examples() {
        let p = params();
        let u = p.velocity(1.0, [2.0, 0.0]);
        assert!((u[0] - 2.0).abs() <= 2.0 * 1e-15 && u[1] == 0.0);
        assert_eq!(p.velocity(1e-12, [0.0, 0.0]), [0.0, 0.0]);
        let e = p.eps_u;
        let u = p.velocity(e, [e, 0.0]);
        assert!((u[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn velocity_matches_ratio_away_from_vacuum_and_is_bounded() {
        let p = params();
        for &rho in &[2e-6, 1e-3, 1.0, 1e4] {
            let m = [0.7 * rho, -3.0 * rho];
            let u = p.velocity(rho, m);
            if rho >= 1e4 * p.eps_u {
                assert!((u[0] - 0.7).abs() / 0.7 < 1e-8);
                assert!((u[1] + 3.0).abs() / 3.0 < 1e-8);
            }
        }
        for &rho in &[1e-14, 1e-12, 1e-10, 1e-8] {
            let m = [1.0, 2.0];
            let u = p.velocity(rho, m);
            let bound = (5.0f64).sqrt() / (2.0 * p.eps_u);
            assert!((u[0] * u[0] + u[1] * u[1]).sqrt() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gaussian_rejects_bad_resolution() {
        let g = make_grid(10.0, 32).unwrap();
        let e = gaussian_state(&g, &GaussianSpec::centered(1.0, 1.0), &params()).unwrap_err();
        assert!(matches!(e, Error::UnderResolved(ref s) if s.contains("sigma/dx")));
        let g = make_grid(4.0, 64).unwrap();
        let e = gaussian_state(&g, &GaussianSpec::centered(1.0, 1.0), &params()).unwrap_err();
        assert!(matches!(e, Error::UnderResolved(ref s) if s.contains("/sigma")));
    }

    #[test]
    fn uniform_velocity_kinetic_energy() {
        let g = make_grid(8.0, 64).unwrap();
        let p = ModelParams::for_mass(1.0, 8.0);
        let spec = GaussianSpec { velocity: [1.0, 0.0], ..GaussianSpec::centered(1.0, 1.0) };
        let init = gaussian_state(&g, &spec, &p).unwrap();
        assert!((init.state.kinetic() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_is_even() {
        let g = make_grid(8.0, 64).unwrap();
        let p = ModelParams::for_mass(4.0 * PI, 8.0);
        let s = gaussian_state(&g, &GaussianSpec::centered(4.0 * PI, 1.0), &p).unwrap().state;
        let n = g.n();
        for j in 0..n {
            for i in 0..n {
                assert_eq!(s.rho.at(i, j), s.rho.at(n - 1 - i, j));
                assert_eq!(s.rho.at(i, j), s.rho.at(i, n - 1 - j));
            }
        }
    }
}
