//! Finite-volume update for the isothermal Euler system with self-attraction and friction.
//!
//! Conservative MUSCL-Rusanov fluxes, gravity `ρ∇Φ` as a cell-centred source, and the
//! friction `-m` folded into an integrating factor so that a source-free momentum
//! decays exactly as `e^{-t}`. Time stepping is two-stage SSP Runge-Kutta (Heun).
//! The boundary is one ghost ring with zero-gradient extrapolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, Sum, VectorField};
use crate::poisson::{interaction_energy, PoissonSolution, PoissonSolver};
use crate::state::{FluidState, ModelParams};

/// Conserved triple `(ρ, m₁, m₂)`; also used for fluxes of the same.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved {
    pub rho: f64,
    pub mx: f64,
    pub my: f64,
}

pub type FluxTriple = Conserved;

impl Conserved {
    pub fn new(rho: f64, mx: f64, my: f64) -> Self {
        Self { rho, mx, my }
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.mx.is_finite() && self.my.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

/// Exact flux of the hyperbolic part in direction `dir`, pressure `p = c²ρ`.
#[inline]
pub fn physical_flux(u: Conserved, dir: Direction, params: &ModelParams) -> FluxTriple {
    let v = params.velocity(u.rho, [u.mx, u.my]);
    let p = params.sound_speed * params.sound_speed * u.rho;
    match dir {
        Direction::X => Conserved::new(u.mx, u.mx * v[0] + p, u.my * v[0]),
        Direction::Y => Conserved::new(u.my, u.mx * v[1], u.my * v[1] + p),
    }
}

#[inline]
fn normal_speed(u: Conserved, dir: Direction, params: &ModelParams) -> f64 {
    let v = params.velocity(u.rho, [u.mx, u.my]);
    match dir {
        Direction::X => v[0].abs(),
        Direction::Y => v[1].abs(),
    }
}

/// Local Lax-Friedrichs flux with wave-speed bound `max|uₙ| + c`.
#[inline]
pub fn rusanov_flux(left: Conserved, right: Conserved, dir: Direction, params: &ModelParams) -> FluxTriple {
    let fl = physical_flux(left, dir, params);
    let fr = physical_flux(right, dir, params);
    let s = normal_speed(left, dir, params).max(normal_speed(right, dir, params)) + params.sound_speed;
    Conserved::new(
        0.5 * (fl.rho + fr.rho) - 0.5 * s * (right.rho - left.rho),
        0.5 * (fl.mx + fr.mx) - 0.5 * s * (right.mx - left.mx),
        0.5 * (fl.my + fr.my) - 0.5 * s * (right.my - left.my),
    )
}

/// Largest stable step `cfl · dx / max(|u₁| + c, |u₂| + c)`.
pub fn cfl_dt(state: &FluidState, params: &ModelParams, cfl: f64, dt_min: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 0.9) {
        return Err(Error::InvalidParameter(format!("cfl must lie in (0, 0.9], got {cfl}")));
    }
    let speed = max_wave_speed(state, params)?;
    let dt = cfl * state.grid().dx() / speed;
    if dt < dt_min {
        return Err(Error::BlowupSuspected { dt, dt_min, max_speed: speed });
    }
    Ok(dt)
}

pub fn max_wave_speed(state: &FluidState, params: &ModelParams) -> Result<f64> {
    let mut speed = 0.0f64;
    for k in 0..state.grid().len() {
        let u = state.velocity(params, k);
        if !(u[0].is_finite() && u[1].is_finite()) {
            return Err(Error::NonFinite { what: "velocity", index: k });
        }
        speed = speed.max(u[0].abs()).max(u[1].abs());
    }
    Ok(speed + params.sound_speed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limiter {
    /// Piecewise-constant reconstruction (first-order Rusanov).
    None,
    Minmod,
    VanLeer,
    /// Monotonised central.
    Mc,
}

impl Limiter {
    #[inline]
    fn slope(self, back: f64, fwd: f64) -> f64 {
        match self {
            Limiter::None => 0.0,
            Limiter::Minmod => {
                if back * fwd <= 0.0 {
                    0.0
                } else if back.abs() < fwd.abs() {
                    back
                } else {
                    fwd
                }
            }
            Limiter::VanLeer => {
                let p = back * fwd;
                if p <= 0.0 {
                    0.0
                } else {
                    2.0 * p / (back + fwd)
                }
            }
            Limiter::Mc => {
                if back * fwd <= 0.0 {
                    0.0
                } else {
                    let c = 0.5 * (back + fwd);
                    let lim = 2.0 * back.abs().min(fwd.abs());
                    c.signum() * c.abs().min(lim)
                }
            }
        }
    }
}

impl std::fmt::Display for Limiter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Limiter::None => "none",
            Limiter::Minmod => "minmod",
            Limiter::VanLeer => "vanleer",
            Limiter::Mc => "mc",
        })
    }
}

impl std::str::FromStr for Limiter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Limiter::None),
            "minmod" => Ok(Limiter::Minmod),
            "vanleer" => Ok(Limiter::VanLeer),
            "mc" => Ok(Limiter::Mc),
            other => Err(Error::Config(format!("unknown limiter '{other}'"))),
        }
    }
}

/// Switches for the individual operator pieces. Everything on is the full model;
/// the others exist for isolating terms in tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    pub transport: bool,
    pub gravity: bool,
    pub limiter: Limiter,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { transport: true, gravity: true, limiter: Limiter::Mc }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepReport {
    pub dt: f64,
    pub max_speed: f64,
    pub clamped_cells: usize,
    pub clamped_mass: f64,
    /// Net mass that left through the box edges during the step.
    pub boundary_outflow: f64,
    /// Change of `∫η` over the step.
    pub entropy_change: f64,
    /// Mass after the update, before the final floor is applied.
    pub mass_before_clamp: f64,
    /// Part of `clamped_mass` that entered through the stage-1 floor (already in
    /// `mass_before_clamp`).
    pub stage_clamped_mass: f64,
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub state: FluidState,
    pub report: StepReport,
    /// Potential of the new density.
    pub solution: PoissonSolution,
}

/// Flat working copy of the conserved variables.
#[derive(Clone)]
struct Fields {
    rho: Vec<f64>,
    mx: Vec<f64>,
    my: Vec<f64>,
}

impl Fields {
    fn from_state(s: &FluidState) -> Self {
        Self { rho: s.rho.values().to_vec(), mx: s.m.x().to_vec(), my: s.m.y().to_vec() }
    }

    #[inline]
    fn get(&self, k: usize) -> Conserved {
        Conserved::new(self.rho[k], self.mx[k], self.my[k])
    }
}

/// Spatial operator `-∇·F + (0, ρ∇Φ)`; also returns the mass flux out of the box.
fn rhs(
    u: &Fields,
    grad: Option<&VectorField>,
    grid: &GridSpec,
    params: &ModelParams,
    opts: &StepOptions,
) -> (Fields, f64) {
    let n = grid.n();
    let len = n * n;
    let mut out = Fields { rho: vec![0.0; len], mx: vec![0.0; len], my: vec![0.0; len] };
    let mut outflow = 0.0;
    if opts.transport {
        let inv_dx = 1.0 / grid.dx();
        let mut line = vec![Conserved::default(); n];
        let mut lo = vec![Conserved::default(); n];
        let mut hi = vec![Conserved::default(); n];
        let mut faces = vec![Conserved::default(); n + 1];
        for dir in [Direction::X, Direction::Y] {
            for row in 0..n {
                let index = |c: usize| match dir {
                    Direction::X => row * n + c,
                    Direction::Y => c * n + row,
                };
                for (c, slot) in line.iter_mut().enumerate() {
                    *slot = u.get(index(c));
                }
                reconstruct(&line, &mut lo, &mut hi, opts.limiter, params);
                // zero-gradient ghosts: the outer face sees the edge cell on both sides
                faces[0] = rusanov_flux(line[0], lo[0], dir, params);
                for c in 1..n {
                    faces[c] = rusanov_flux(hi[c - 1], lo[c], dir, params);
                }
                faces[n] = rusanov_flux(hi[n - 1], line[n - 1], dir, params);
                outflow += (faces[n].rho - faces[0].rho) * grid.dx();
                for c in 0..n {
                    let k = index(c);
                    out.rho[k] -= (faces[c + 1].rho - faces[c].rho) * inv_dx;
                    out.mx[k] -= (faces[c + 1].mx - faces[c].mx) * inv_dx;
                    out.my[k] -= (faces[c + 1].my - faces[c].my) * inv_dx;
                }
            }
        }
    }
    if let Some(g) = grad {
        for k in 0..len {
            out.mx[k] += u.rho[k] * g.x()[k];
            out.my[k] += u.rho[k] * g.y()[k];
        }
    }
    (out, outflow)
}

/// Limited linear reconstruction of density and velocity: `lo[c]`/`hi[c]` are the
/// conserved values at the low and high faces of cell `c`. Edge cells get zero slope.
fn reconstruct(line: &[Conserved], lo: &mut [Conserved], hi: &mut [Conserved], limiter: Limiter, params: &ModelParams) {
    let n = line.len();
    let vel = |u: Conserved| params.velocity(u.rho, [u.mx, u.my]);
    for c in 0..n {
        let u = line[c];
        if c == 0 || c == n - 1 || limiter == Limiter::None {
            lo[c] = u;
            hi[c] = u;
            continue;
        }
        let (a, b) = (line[c - 1], line[c + 1]);
        let (va, vu, vb) = (vel(a), vel(u), vel(b));
        let sr = limiter.slope(u.rho - a.rho, b.rho - u.rho);
        let sx = limiter.slope(vu[0] - va[0], vb[0] - vu[0]);
        let sy = limiter.slope(vu[1] - va[1], vb[1] - vu[1]);
        let face = |h: f64| {
            let r = u.rho + h * sr;
            Conserved::new(r, r * (vu[0] + h * sx), r * (vu[1] + h * sy))
        };
        lo[c] = face(-0.5);
        hi[c] = face(0.5);
    }
}

fn fields_to_state(f: Fields, grid: &GridSpec, t: f64) -> Result<FluidState> {
    FluidState::new(
        ScalarField::from_vec(*grid, f.rho)?,
        VectorField::from_components(*grid, f.mx, f.my)?,
        t,
    )
}

fn first_non_finite(f: &Fields) -> Option<usize> {
    (0..f.rho.len()).find(|&k| !f.get(k).is_finite())
}

/// One SSP-RK2 step of size `dt`. `current` must be the potential of `state.rho`.
pub fn step(
    state: &FluidState,
    current: &PoissonSolution,
    params: &ModelParams,
    solver: &dyn PoissonSolver,
    dt: f64,
    opts: &StepOptions,
) -> Result<StepOutput> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let grid = *state.grid();
    let len = grid.len();
    let decay = (-params.friction * dt).exp();
    let u0 = Fields::from_state(state);
    let max_speed = max_wave_speed(state, params)?;

    let grad0 = opts.gravity.then_some(&current.grad_phi);
    let (l0, out0) = rhs(&u0, grad0, &grid, params, opts);
    let mut u1 = u0.clone();
    for k in 0..len {
        u1.rho[k] = u0.rho[k] + dt * l0.rho[k];
        u1.mx[k] = decay * (u0.mx[k] + dt * l0.mx[k]);
        u1.my[k] = decay * (u0.my[k] + dt * l0.my[k]);
    }
    // keep the stage admissible; the stage floor is accounted like the final one
    let mut stage_clamp = Sum::default();
    let mut clamped_cells = 0;
    for r in u1.rho.iter_mut() {
        if *r < params.rho_floor {
            stage_clamp.add(0.5 * (params.rho_floor - *r) * grid.cell_area());
            *r = params.rho_floor;
        }
    }
    if let Some(k) = first_non_finite(&u1) {
        return Err(Error::StepFailed { t: state.t, detail: format!("stage 1 non-finite at cell {k}") });
    }

    let stage_rho = ScalarField::from_vec(grid, u1.rho.clone())?;
    let stage_sol = if opts.gravity { Some(solver.solve(&stage_rho)?) } else { None };
    let (l1, out1) = rhs(&u1, stage_sol.as_ref().map(|s| &s.grad_phi), &grid, params, opts);
    let mut u2 = u1.clone();
    for k in 0..len {
        u2.rho[k] = 0.5 * u0.rho[k] + 0.5 * (u1.rho[k] + dt * l1.rho[k]);
        u2.mx[k] = 0.5 * decay * u0.mx[k] + 0.5 * (u1.mx[k] + dt * l1.mx[k]);
        u2.my[k] = 0.5 * decay * u0.my[k] + 0.5 * (u1.my[k] + dt * l1.my[k]);
    }
    if let Some(k) = first_non_finite(&u2) {
        return Err(Error::StepFailed { t: state.t, detail: format!("non-finite at cell {k}") });
    }
    let mass_before_clamp = crate::grid::sum(u2.rho.iter().copied()) * grid.cell_area();
    let mut clamped = stage_clamp;
    for r in u2.rho.iter_mut() {
        if *r < params.rho_floor {
            clamped.add((params.rho_floor - *r) * grid.cell_area());
            clamped_cells += 1;
            *r = params.rho_floor;
        }
    }

    let eta_before = entropy_integral(state);
    let next = fields_to_state(u2, &grid, state.t + dt)?;
    let solution = if opts.gravity {
        solver.solve(&next.rho)?
    } else {
        PoissonSolution {
            phi: ScalarField::zeros(grid),
            grad_phi: VectorField::zeros(grid),
            method: current.method,
        }
    };
    let report = StepReport {
        dt,
        max_speed,
        clamped_cells,
        clamped_mass: clamped.value(),
        boundary_outflow: 0.5 * dt * (out0 + out1),
        entropy_change: entropy_integral(&next) - eta_before,
        mass_before_clamp,
        stage_clamped_mass: stage_clamp.value(),
    };
    Ok(StepOutput { state: next, report, solution })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyPair {
    pub eta: ScalarField,
    pub q: VectorField,
}

/// `η = |m|²/ρ + 2ρ log ρ`, `q = |m|² m/ρ² + 2m log ρ + 2m`, with the logarithm floored.
pub fn entropy_pair(state: &FluidState, params: &ModelParams) -> EntropyPair {
    let grid = *state.grid();
    let (rho, mx, my) = (state.rho.values(), state.m.x(), state.m.y());
    let len = grid.len();
    let mut eta = vec![0.0; len];
    let mut qx = vec![0.0; len];
    let mut qy = vec![0.0; len];
    for k in 0..len {
        let r = rho[k];
        let lr = r.max(params.rho_floor).ln();
        let m2 = mx[k] * mx[k] + my[k] * my[k];
        eta[k] = m2 / r + 2.0 * r * lr;
        let c = m2 / (r * r) + 2.0 * lr + 2.0;
        qx[k] = c * mx[k];
        qy[k] = c * my[k];
    }
    EntropyPair {
        eta: ScalarField::from_vec(grid, eta).expect("sizes match"),
        q: VectorField::from_components(grid, qx, qy).expect("sizes match"),
    }
}

/// `∫η` with `ρ log ρ` evaluated on the state's own values (which respect the floor).
pub fn entropy_integral(state: &FluidState) -> f64 {
    let (rho, mx, my) = (state.rho.values(), state.m.x(), state.m.y());
    let mut acc = Sum::default();
    for k in 0..rho.len() {
        let r = rho[k];
        acc.add((mx[k] * mx[k] + my[k] * my[k]) / r + 2.0 * r * r.ln());
    }
    acc.value() * state.grid().cell_area()
}

/// Integrated entropy balance over one step:
/// `R = Δ∫η/dt − ΔW/dt + ∫2|m|²/ρ` at the start of the step. The continuum
/// inequality says `R ≤ 0`; the discrete value is `O(dx)`.
pub fn entropy_inequality_residual(
    before: &FluidState,
    before_solution: &PoissonSolution,
    after: &FluidState,
    after_solution: &PoissonSolution,
    dt: f64,
) -> f64 {
    let d_eta = entropy_integral(after) - entropy_integral(before);
    let d_w = interaction_energy(&after.rho, after_solution) - interaction_energy(&before.rho, before_solution);
    d_eta / dt - d_w / dt + 2.0 * before.kinetic()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams { friction: 1.0, sound_speed: 1.0, rho_floor: 1e-12, eps_u: 1e-10 }
    }

    #[test]
    fn physical_flux_examples() {
        let p = params();
        assert_eq!(physical_flux(Conserved::new(1.0, 0.0, 0.0), Direction::X, &p), Conserved::new(0.0, 1.0, 0.0));
        assert_eq!(physical_flux(Conserved::new(2.0, 2.0, 0.0), Direction::X, &p), Conserved::new(2.0, 4.0, 0.0));
        assert_eq!(physical_flux(Conserved::new(1.0, 0.0, 3.0), Direction::X, &p), Conserved::new(0.0, 1.0, 0.0));
        let fy = physical_flux(Conserved::new(2.0, 1.0, 2.0), Direction::Y, &p);
        assert_eq!(fy, Conserved::new(2.0, 1.0, 4.0));
    }

    #[test]
    fn rusanov_examples() {
        let p = params();
        let f = rusanov_flux(Conserved::new(1.0, 0.0, 0.0), Conserved::new(p.rho_floor, 0.0, 0.0), Direction::X, &p);
        assert!((f.rho - 0.5 * (1.0 - p.rho_floor)).abs() < 1e-15);
        assert!(f.rho > 0.0);
        let f = rusanov_flux(Conserved::new(2.0, 0.0, 0.0), Conserved::new(1.0, 0.0, 0.0), Direction::X, &p);
        assert_eq!(f.rho, 0.5);
    }

    #[test]
    fn cfl_examples() {
        let g = crate::grid::make_grid(0.8, 16).unwrap();
        let p = params();
        let rest = FluidState::new(ScalarField::constant(g, 1.0), VectorField::zeros(g), 0.0).unwrap();
        assert!((cfl_dt(&rest, &p, 0.4, 1e-10).unwrap() - 0.04).abs() < 1e-15);
        let mut mx = vec![0.0; g.len()];
        mx[7] = 3.0;
        let moving =
            FluidState::new(ScalarField::constant(g, 1.0), VectorField::from_components(g, mx, vec![0.0; g.len()]).unwrap(), 0.0).unwrap();
        assert!((cfl_dt(&moving, &p, 0.4, 1e-10).unwrap() - 0.01).abs() < 1e-15);
        let mut bad = moving.clone();
        bad.m.components_mut().0[3] = f64::NAN;
        assert!(matches!(cfl_dt(&bad, &p, 0.4, 1e-10), Err(Error::NonFinite { .. })));
        assert!(cfl_dt(&rest, &p, 0.95, 1e-10).is_err());
        assert!(matches!(cfl_dt(&rest, &p, 0.4, 1.0), Err(Error::BlowupSuspected { .. })));
    }

    #[test]
    fn entropy_pair_examples() {
        let g = crate::grid::make_grid(1.0, 8).unwrap();
        let p = params();
        let e = std::f64::consts::E;
        let mut rho = vec![1.0; g.len()];
        let mut mx = vec![0.0; g.len()];
        rho[1] = e;
        mx[2] = 1.0;
        let s = FluidState::new(
            ScalarField::from_vec(g, rho).unwrap(),
            VectorField::from_components(g, mx, vec![0.0; g.len()]).unwrap(),
            0.0,
        )
        .unwrap();
        let pair = entropy_pair(&s, &p);
        assert_eq!(pair.eta.values()[0], 0.0);
        assert_eq!(pair.q.at(0, 0), [0.0, 0.0]);
        assert!((pair.eta.values()[1] - 2.0 * e).abs() < 1e-14);
        assert_eq!(pair.eta.values()[2], 1.0);
        assert_eq!(pair.q.at(2, 0), [3.0, 0.0]);
    }

    #[test]
    fn limiters_vanish_at_extrema_and_agree_on_linear_data() {
        for l in [Limiter::Minmod, Limiter::VanLeer, Limiter::Mc] {
            assert_eq!(l.slope(1.0, -1.0), 0.0);
            assert_eq!(l.slope(0.0, 2.0), 0.0);
            assert!((l.slope(0.5, 0.5) - 0.5).abs() < 1e-15);
        }
        assert_eq!(Limiter::None.slope(1.0, 1.0), 0.0);
    }
}
