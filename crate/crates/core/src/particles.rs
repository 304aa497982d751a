//! Mean-field particle system with friction
//!
//! ```text
//! dXᵢ/dt = Vᵢ
//! dVᵢ/dt = (M/N) Σⱼ ∇Ψ(Xᵢ − Xⱼ) − Vᵢ/τ      (+ optional Ornstein-Uhlenbeck bath)
//! ```
//!
//! with the regularised Coulomb kernel `∇Ψ(x) = −x / (2π(|x|² + ε²))`.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, Sum};

/// `−x / (2π(|x|² + ε²))`; the force on `i` from `j` is `pair_force(Xᵢ − Xⱼ)`.
#[inline]
pub fn pair_force(x: [f64; 2], eps: f64) -> [f64; 2] {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let d = r2 + eps * eps;
    if d == 0.0 {
        return [0.0, 0.0];
    }
    let s = -1.0 / (2.0 * PI * d);
    [s * x[0], s * x[1]]
}

/// `ε_N = 0.01 · box / √N`.
pub fn default_regularization(n: usize, box_scale: f64) -> f64 {
    0.01 * box_scale / (n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n: usize,
    pub mass: f64,
    /// Standard deviation of each position coordinate.
    pub sigma: f64,
    /// Variance of each initial velocity component (0 for particles at rest).
    pub velocity_temperature: f64,
    pub tau: f64,
    pub eps: f64,
    /// Temperature of the Ornstein-Uhlenbeck bath; 0 switches it off.
    pub bath_temperature: f64,
    /// Shift and rescale the sample so that its mean, `X₂`, `X_m` and `K` equal the
    /// values of the sampled distribution.
    pub moment_match: bool,
    /// Sample `N/4` particles and add their rotations by 90°, 180° and 270°; the bath
    /// kicks the four copies with the same increment.
    pub antithetic: bool,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn gaussian_at_rest(n: usize, mass: f64, sigma: f64, box_scale: f64, seed: u64) -> Self {
        Self {
            n,
            mass,
            sigma,
            velocity_temperature: 0.0,
            tau: 1.0,
            eps: default_regularization(n, box_scale),
            bath_temperature: 0.0,
            moment_match: false,
            antithetic: false,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 {
            return bad(format!("need at least 2 particles, got {}", self.n));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return bad(format!("mass must be positive, got {}", self.mass));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("regularization must be positive, got {}", self.eps));
        }
        if self.antithetic && !self.n.is_multiple_of(4) {
            return bad(format!("antithetic sampling needs N divisible by 4, got {}", self.n));
        }
        if !(self.velocity_temperature >= 0.0 && self.bath_temperature >= 0.0) {
            return bad("temperatures must be nonnegative".into());
        }
        Ok(())
    }
}

/// Positions and velocities, indexed by particle id.
pub type PhaseSpace = (Vec<[f64; 2]>, Vec<[f64; 2]>);

#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    pub pos: Vec<[f64; 2]>,
    pub vel: Vec<[f64; 2]>,
    pub mass: f64,
    pub tau: f64,
    pub eps: f64,
    pub bath_temperature: f64,
    pub t: f64,
    /// Consecutive particles sharing one bath increment.
    pub noise_group: usize,
    /// `false` switches the pair forces off.
    pub interacting: bool,
    rng: ChaCha8Rng,
    cache: Option<PhaseSpace>,
}

impl ParticleEnsemble {
    pub fn new(pos: Vec<[f64; 2]>, vel: Vec<[f64; 2]>, mass: f64, tau: f64, eps: f64, seed: u64) -> Result<Self> {
        if pos.len() != vel.len() {
            return Err(Error::InvalidParameter(format!(
                "{} positions but {} velocities",
                pos.len(),
                vel.len()
            )));
        }
        let e = Self {
            pos,
            vel,
            mass,
            tau,
            eps,
            bath_temperature: 0.0,
            t: 0.0,
            noise_group: 1,
            interacting: true,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cache: None,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pos.len() < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 particles, got {}", self.pos.len())));
        }
        if !(self.eps > 0.0 && self.tau > 0.0 && self.mass > 0.0) {
            return Err(Error::InvalidParameter("mass, tau and eps must be positive".into()));
        }
        self.check_finite()
    }

    fn check_finite(&self) -> Result<()> {
        for (i, (p, v)) in self.pos.iter().zip(&self.vel).enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::NonFinite { what: "particle position", index: i });
            }
            if !(v[0].is_finite() && v[1].is_finite()) {
                return Err(Error::NonFinite { what: "particle velocity", index: i });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    /// Mass carried by each particle.
    pub fn weight(&self) -> f64 {
        self.mass / self.len() as f64
    }

    /// `(M/N) Σ_{j≠i} pair_force(Xᵢ − Xⱼ)` for every particle. Each sum runs over `j` in
    /// index order, so the result does not depend on the thread count. The `j = i` term
    /// is exactly zero because `ε > 0`.
    pub fn accelerations(&self) -> Vec<[f64; 2]> {
        if !self.interacting {
            return vec![[0.0; 2]; self.len()];
        }
        let w = self.weight();
        let eps2 = self.eps * self.eps;
        let xs: Vec<f64> = self.pos.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = self.pos.iter().map(|p| p[1]).collect();
        let c = -w / (2.0 * PI);
        self.pos
            .par_iter()
            .map(|xi| {
                // four independent partial sums so the loop vectorises; the combination
                // order is fixed
                let mut ax = [0.0f64; 4];
                let mut ay = [0.0f64; 4];
                let (xc, xr) = (xs.chunks_exact(4), xs.chunks_exact(4).remainder());
                let (yc, yr) = (ys.chunks_exact(4), ys.chunks_exact(4).remainder());
                for (xj, yj) in xc.zip(yc) {
                    for l in 0..4 {
                        let dx = xi[0] - xj[l];
                        let dy = xi[1] - yj[l];
                        let inv = 1.0 / (dx * dx + dy * dy + eps2);
                        ax[l] += dx * inv;
                        ay[l] += dy * inv;
                    }
                }
                for (xj, yj) in xr.iter().zip(yr) {
                    let dx = xi[0] - xj;
                    let dy = xi[1] - yj;
                    let inv = 1.0 / (dx * dx + dy * dy + eps2);
                    ax[0] += dx * inv;
                    ay[0] += dy * inv;
                }
                [c * ((ax[0] + ax[1]) + (ax[2] + ax[3])), c * ((ay[0] + ay[1]) + (ay[2] + ay[3]))]
            })
            .collect()
    }

    fn cached_accelerations(&mut self) -> Vec<[f64; 2]> {
        match self.cache.take() {
            Some((pos, acc)) if pos == self.pos => acc,
            _ => self.accelerations(),
        }
    }

    fn half_kick(&mut self, acc: &[[f64; 2]], h: f64) {
        let decay = (-h / self.tau).exp();
        let kick = -self.tau * (-h / self.tau).exp_m1();
        let noise = (self.bath_temperature * -(-2.0 * h / self.tau).exp_m1()).sqrt();
        for (v, a) in self.vel.iter_mut().zip(acc) {
            v[0] = decay * v[0] + kick * a[0];
            v[1] = decay * v[1] + kick * a[1];
        }
        if noise > 0.0 {
            for group in self.vel.chunks_mut(self.noise_group.max(1)) {
                let (a, b): (f64, f64) = (self.rng.sample(StandardNormal), self.rng.sample(StandardNormal));
                for v in group {
                    v[0] += noise * a;
                    v[1] += noise * b;
                }
            }
        }
    }

    /// `Σ_{i≠j} r²/(r² + ε²)` over ordered pairs.
    pub fn pair_sum(&self) -> f64 {
        let eps2 = self.eps * self.eps;
        let pos = &self.pos;
        let partial: Vec<f64> = pos
            .par_iter()
            .enumerate()
            .map(|(i, xi)| {
                let mut s = 0.0;
                for xj in &pos[i + 1..] {
                    let r2 = (xi[0] - xj[0]).powi(2) + (xi[1] - xj[1]).powi(2);
                    s += r2 / (r2 + eps2);
                }
                s
            })
            .collect();
        2.0 * crate::grid::sum(partial)
    }

    pub fn total_momentum(&self) -> [f64; 2] {
        let w = self.weight();
        let mut px = Sum::default();
        let mut py = Sum::default();
        for v in &self.vel {
            px.add(v[0]);
            py.add(v[1]);
        }
        [w * px.value(), w * py.value()]
    }
}

/// Draws `N` positions from an isotropic Gaussian and, if requested, Maxwellian velocities.
pub fn sample_ensemble(spec: &EnsembleSpec) -> Result<ParticleEnsemble> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let vt = spec.velocity_temperature.sqrt();
    let base = if spec.antithetic { spec.n / 4 } else { spec.n };
    let mut pos = Vec::with_capacity(spec.n);
    let mut vel = Vec::with_capacity(spec.n);
    for _ in 0..base {
        let x = [spec.sigma * normal(), spec.sigma * normal()];
        let v = [vt * normal(), vt * normal()];
        if spec.antithetic {
            let rot = |p: [f64; 2]| [-p[1], p[0]];
            let (mut x, mut v) = (x, v);
            for _ in 0..4 {
                pos.push(x);
                vel.push(v);
                (x, v) = (rot(x), rot(v));
            }
        } else {
            pos.push(x);
            vel.push(v);
        }
    }
    if spec.moment_match {
        match_moments(&mut pos, 2.0 * spec.sigma * spec.sigma);
        match_moments(&mut vel, 2.0 * spec.velocity_temperature);
        // remove the radial correlation so that X_m(0) = 0
        let xv: f64 = crate::grid::sum(pos.iter().zip(&vel).map(|(x, v)| x[0] * v[0] + x[1] * v[1]));
        let xx: f64 = crate::grid::sum(pos.iter().map(|x| x[0] * x[0] + x[1] * x[1]));
        if xx > 0.0 {
            for (v, x) in vel.iter_mut().zip(&pos) {
                v[0] -= xv / xx * x[0];
                v[1] -= xv / xx * x[1];
            }
            match_moments(&mut vel, 2.0 * spec.velocity_temperature);
        }
    }
    let mut e = ParticleEnsemble::new(pos, vel, spec.mass, spec.tau, spec.eps, spec.seed.wrapping_add(1))?;
    e.bath_temperature = spec.bath_temperature;
    e.noise_group = if spec.antithetic { 4 } else { 1 };
    Ok(e)
}

/// Zero mean and `(1/N) Σ|pᵢ|² = target`.
fn match_moments(points: &mut [[f64; 2]], target: f64) {
    let n = points.len() as f64;
    let mx = crate::grid::sum(points.iter().map(|p| p[0])) / n;
    let my = crate::grid::sum(points.iter().map(|p| p[1])) / n;
    for p in points.iter_mut() {
        p[0] -= mx;
        p[1] -= my;
    }
    let m2 = crate::grid::sum(points.iter().map(|p| p[0] * p[0] + p[1] * p[1])) / n;
    if m2 > 0.0 {
        let s = (target / m2).sqrt();
        for p in points.iter_mut() {
            p[0] *= s;
            p[1] *= s;
        }
    }
}

/// Advances by `dt ≤ 0.1τ` with a kick-drift-kick splitting, `h = dt/2`:
///
/// ```text
/// V½ = e^{−h/τ} V + τ(1 − e^{−h/τ}) A(X) + √(T(1 − e^{−2h/τ})) ξ
/// X' = X + dt V½
/// V' = e^{−h/τ} V½ + τ(1 − e^{−h/τ}) A(X') + √(T(1 − e^{−2h/τ})) ξ'
/// ```
///
/// The friction factor is exact, so with forces and bath off `V(t) = V(0) e^{−t/τ}`.
/// `A(X')` is kept for the next step.
pub fn ensemble_step(ensemble: &mut ParticleEnsemble, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt <= 0.1 * ensemble.tau) {
        return Err(Error::InvalidParameter(format!(
            "dt must lie in (0, 0.1·tau = {}], got {dt}",
            0.1 * ensemble.tau
        )));
    }
    let acc = ensemble.cached_accelerations();
    ensemble.half_kick(&acc, 0.5 * dt);
    for (x, v) in ensemble.pos.iter_mut().zip(&ensemble.vel) {
        x[0] += dt * v[0];
        x[1] += dt * v[1];
    }
    ensemble.check_finite()?;
    let acc = ensemble.accelerations();
    ensemble.half_kick(&acc, 0.5 * dt);
    ensemble.cache = Some((ensemble.pos.clone(), acc));
    ensemble.t += dt;
    ensemble.check_finite()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleMoments {
    pub t: f64,
    pub mass: f64,
    pub second_moment: f64,
    pub cross_moment: f64,
    pub kinetic: f64,
}

impl ParticleMoments {
    pub fn virial_moment(&self) -> f64 {
        self.second_moment + self.cross_moment
    }
}

/// `X₂ = w Σ|Xᵢ|²`, `X_m = w Σ 2Xᵢ·Vᵢ`, `K = w Σ|Vᵢ|²` with `w = M/N`.
pub fn empirical_moments(ensemble: &ParticleEnsemble) -> ParticleMoments {
    let w = ensemble.weight();
    let x2 = crate::grid::sum(ensemble.pos.iter().map(|x| x[0] * x[0] + x[1] * x[1]));
    let xm = crate::grid::sum(ensemble.pos.iter().zip(&ensemble.vel).map(|(x, v)| 2.0 * (x[0] * v[0] + x[1] * v[1])));
    let k = crate::grid::sum(ensemble.vel.iter().map(|v| v[0] * v[0] + v[1] * v[1]));
    ParticleMoments {
        t: ensemble.t,
        mass: w * ensemble.len() as f64,
        second_moment: w * x2,
        cross_moment: w * xm,
        kinetic: w * k,
    }
}

/// Right side of the N-body virial identity
///
/// ```text
/// d/dt (X₂ + X_m) = 2K + (1 − 1/τ) X_m − (M/N)² (1/2π) Σ_{i≠j} r²/(r² + ε²)
/// ```
///
/// The bath only adds a zero-mean martingale to this balance.
pub fn nbody_virial_rhs(ensemble: &ParticleEnsemble) -> f64 {
    let m = empirical_moments(ensemble);
    let w = ensemble.weight();
    2.0 * m.kinetic + (1.0 - 1.0 / ensemble.tau) * m.cross_moment - w * w / (2.0 * PI) * ensemble.pair_sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NBodyVirialResidual {
    /// `Δ(X₂ + X_m) − ∫ rhs dt`.
    pub integrated: f64,
    /// `∫ (M/N)² (1/2π) Σ r²/(r² + ε²) dt`, the scale the residual is compared to.
    pub pair_term: f64,
}

impl NBodyVirialResidual {
    pub fn relative(&self) -> f64 {
        (self.integrated / self.pair_term).abs()
    }
}

/// Integrates the virial identity along a deterministic trajectory of `steps` steps.
pub fn nbody_virial_check(ensemble: &mut ParticleEnsemble, dt: f64, steps: usize) -> Result<NBodyVirialResidual> {
    if ensemble.bath_temperature > 0.0 {
        return Err(Error::InvalidParameter("the virial check needs the bath switched off".into()));
    }
    let w = ensemble.weight();
    let start = empirical_moments(ensemble).virial_moment();
    let mut rhs_prev = nbody_virial_rhs(ensemble);
    let mut pair_prev = w * w / (2.0 * PI) * ensemble.pair_sum();
    let mut rhs_int = Sum::default();
    let mut pair_int = Sum::default();
    for _ in 0..steps {
        ensemble_step(ensemble, dt)?;
        let rhs = nbody_virial_rhs(ensemble);
        let pair = w * w / (2.0 * PI) * ensemble.pair_sum();
        rhs_int.add(0.5 * dt * (rhs + rhs_prev));
        pair_int.add(0.5 * dt * (pair + pair_prev));
        rhs_prev = rhs;
        pair_prev = pair;
    }
    let end = empirical_moments(ensemble).virial_moment();
    Ok(NBodyVirialResidual { integrated: end - start - rhs_int.value(), pair_term: pair_int.value() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deposit {
    pub rho: ScalarField,
    /// Mass of particles whose cloud falls partly or wholly outside the grid.
    pub mass_outside: f64,
    /// Set when more than 1% of the mass is outside.
    pub warning: Option<String>,
}

/// Cloud-in-cell deposition: each particle is a square of side `dx` and its mass is
/// shared bilinearly between the four nearest cell centres.
pub fn deposit_density(ensemble: &ParticleEnsemble, grid: &GridSpec) -> Deposit {
    let n = grid.n();
    let dx = grid.dx();
    let l = grid.half_width();
    let w = ensemble.weight();
    let area = grid.cell_area();
    let mut rho = vec![0.0; grid.len()];
    let mut outside = Sum::default();
    for x in &ensemble.pos {
        // position in units of cells, measured from the first centre
        let gx = (x[0] + l) / dx - 0.5;
        let gy = (x[1] + l) / dx - 0.5;
        let (i0, j0) = (gx.floor(), gy.floor());
        let (fx, fy) = (gx - i0, gy - j0);
        let weights = [
            (0, 0, (1.0 - fx) * (1.0 - fy)),
            (1, 0, fx * (1.0 - fy)),
            (0, 1, (1.0 - fx) * fy),
            (1, 1, fx * fy),
        ];
        for (di, dj, c) in weights {
            if c == 0.0 {
                continue;
            }
            let (i, j) = (i0 as i64 + di, j0 as i64 + dj);
            if i >= 0 && j >= 0 && (i as usize) < n && (j as usize) < n {
                rho[grid.index(i as usize, j as usize)] += w * c / area;
            } else {
                outside.add(w * c);
            }
        }
    }
    let mass_outside = outside.value();
    let warning = (mass_outside > 0.01 * ensemble.mass).then(|| {
        format!("{:.3}% of the particle mass lies outside the grid", 100.0 * mass_outside / ensemble.mass)
    });
    Deposit {
        rho: ScalarField::from_vec(*grid, rho).expect("length matches grid"),
        mass_outside,
        warning,
    }
}

pub const CSV_HEADER: &str = "id,x,y,vx,vy";

/// Writes `id,x,y,vx,vy` rows; floats use the shortest representation that round-trips.
pub fn write_csv(ensemble: &ParticleEnsemble, mut out: impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (i, (x, v)) in ensemble.pos.iter().zip(&ensemble.vel).enumerate() {
        writeln!(out, "{i},{:?},{:?},{:?},{:?}", x[0], x[1], v[0], v[1])?;
    }
    Ok(())
}

/// Reads positions and velocities written by [`write_csv`], ordered by id.
pub fn read_csv(input: impl BufRead) -> Result<PhaseSpace> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty particle file".into()))??;
    if header.trim() != CSV_HEADER {
        return Err(Error::Format(format!("expected header `{CSV_HEADER}`, got `{header}`")));
    }
    let mut rows: Vec<(usize, [f64; 2], [f64; 2])> = Vec::new();
    for (ln, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Format(format!("line {}: expected 5 fields in `{line}`", ln + 2));
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(bad());
        }
        let id: usize = f[0].parse().map_err(|_| bad())?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        rows.push((id, [num(f[1])?, num(f[2])?], [num(f[3])?, num(f[4])?]));
    }
    rows.sort_by_key(|r| r.0);
    if rows.iter().enumerate().any(|(k, r)| r.0 != k) {
        return Err(Error::Format("particle ids must be 0..N without gaps".into()));
    }
    Ok(rows.into_iter().map(|r| (r.1, r.2)).unzip())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_force_examples() {
        let f = pair_force([-1.0, 0.0], 1e-12);
        assert!((f[0] - 1.0 / (2.0 * PI)).abs() < 1e-12 && f[1] == 0.0);
        assert_eq!(pair_force([0.0, 0.0], 0.1), [0.0, 0.0]);
        let x = [0.3, -1.7];
        let (a, b) = (pair_force(x, 0.01), pair_force([-x[0], -x[1]], 0.01));
        assert_eq!(a, [-b[0], -b[1]]);
    }

    #[test]
    fn two_particles_attract() {
        let e = ParticleEnsemble::new(vec![[0.0, 0.0], [1.0, 0.0]], vec![[0.0; 2]; 2], 1.0, 1.0, 1e-9, 0).unwrap();
        let a = e.accelerations();
        assert!((a[0][0] - 1.0 / (4.0 * PI)).abs() < 1e-12);
        assert!((a[1][0] + 1.0 / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn moments_at_origin_vanish() {
        let e = ParticleEnsemble::new(vec![[0.0; 2]; 5], vec![[0.0; 2]; 5], 2.0, 1.0, 0.1, 0).unwrap();
        let m = empirical_moments(&e);
        assert_eq!((m.second_moment, m.cross_moment, m.kinetic), (0.0, 0.0, 0.0));
        assert!((m.mass - 2.0).abs() < 1e-15);
    }

    #[test]
    fn deposit_centre_and_corner() {
        let grid = GridSpec::new(1.0, 8).unwrap();
        let c = grid.center(3, 4);
        let e = ParticleEnsemble::new(vec![c, c], vec![[0.0; 2]; 2], 1.0, 1.0, 0.1, 0).unwrap();
        let d = deposit_density(&e, &grid);
        assert!((d.rho.at(3, 4) * grid.cell_area() - 1.0).abs() < 1e-14);
        let corner = [c[0] + 0.5 * grid.dx(), c[1] + 0.5 * grid.dx()];
        let e = ParticleEnsemble::new(vec![corner, corner], vec![[0.0; 2]; 2], 1.0, 1.0, 0.1, 0).unwrap();
        let d = deposit_density(&e, &grid);
        for (i, j) in [(3, 4), (4, 4), (3, 5), (4, 5)] {
            assert!((d.rho.at(i, j) * grid.cell_area() - 0.25).abs() < 1e-14);
        }
        assert!(d.warning.is_none());
    }

    #[test]
    fn moment_matching_is_exact() {
        let mut spec = EnsembleSpec::gaussian_at_rest(500, 4.0 * PI, 1.0, 8.0, 3);
        spec.velocity_temperature = 1.0;
        spec.moment_match = true;
        let e = sample_ensemble(&spec).unwrap();
        let m = empirical_moments(&e);
        assert!((m.second_moment - 2.0 * spec.mass).abs() < 1e-10);
        assert!((m.kinetic - 2.0 * spec.mass).abs() < 1e-10);
        assert!(m.cross_moment.abs() < 1e-10);
        let p = e.total_momentum();
        assert!(p[0].abs() < 1e-12 && p[1].abs() < 1e-12);
    }

    #[test]
    fn rejects_large_steps() {
        let mut e = ParticleEnsemble::new(vec![[0.0; 2], [1.0, 0.0]], vec![[0.0; 2]; 2], 1.0, 1.0, 0.1, 0).unwrap();
        assert!(ensemble_step(&mut e, 0.2).is_err());
        assert!(ensemble_step(&mut e, 0.0).is_err());
    }
}
