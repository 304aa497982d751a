//! Fluid against particles from matched initial data.
//!
//! The fluid is the isothermal model at unit temperature, so its particle
//! counterpart carries Maxwellian velocities and a heat bath at the same temperature.
//! Moments then compare as
//!
//! ```text
//! X₂ ↔ X₂,   Xₘ ↔ Xₘ,   K_particles ↔ K_fluid + 2MT
//! ```
//!
//! where `2MT` is the thermal part of the particle kinetic energy.

use std::fs;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{io_context, num, write_json};
use super::{advance_ensemble, matched_ensemble, run, ScenarioConfig};
use crate::error::{Error, Result};
use crate::functionals::{DiagnosticsRecord, Regime};
use crate::particles::{empirical_moments, ParticleMoments};

pub const COMPARE_SCHEMA: &str = "ksfluid-compare/1";

/// Relative differences of one particle trajectory against the fluid, per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryGaps {
    pub t: Vec<f64>,
    /// `(X₂ᵖ − X₂ᶠ)/X₂ᶠ`
    pub second_moment: Vec<f64>,
    /// `(Xₘᵖ − Xₘᶠ)/max|Xₘᶠ|`
    pub cross_moment: Vec<f64>,
    /// `(Kᵖ − Kᶠ − 2MT)/(Kᶠ + 2MT)`
    pub kinetic: Vec<f64>,
}

/// Pairs samples by time (initial sample excluded) and forms relative gaps.
/// Errors when the two systems do not carry the same mass.
pub fn relative_gaps(
    fluid: &[DiagnosticsRecord],
    particles: &[ParticleMoments],
    temperature: f64,
) -> Result<TrajectoryGaps> {
    let (f0, p0) = match (fluid.first(), particles.first()) {
        (Some(f), Some(p)) => (f, p),
        _ => return Err(Error::DegenerateWindow("empty trajectory".into())),
    };
    if (f0.mass - p0.mass).abs() > 1e-6 * f0.mass.abs().max(p0.mass.abs()) {
        return Err(Error::InvalidParameter(format!(
            "fluid mass {} and particle mass {} differ",
            f0.mass, p0.mass
        )));
    }
    let xm_scale = fluid.iter().map(|r| r.cross_moment.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut g = TrajectoryGaps { t: vec![], second_moment: vec![], cross_moment: vec![], kinetic: vec![] };
    for p in particles.iter().filter(|p| p.t > f0.t) {
        let f = fluid
            .iter()
            .find(|f| (f.t - p.t).abs() <= 1e-9 * p.t.max(1.0))
            .ok_or_else(|| Error::DegenerateWindow(format!("no fluid sample at t = {}", p.t)))?;
        let k_f = f.kinetic + 2.0 * f.mass * temperature;
        g.t.push(p.t);
        g.second_moment.push((p.second_moment - f.second_moment) / f.second_moment);
        g.cross_moment.push((p.cross_moment - f.cross_moment) / xm_scale);
        g.kinetic.push((p.kinetic - k_f) / k_f);
    }
    if g.t.is_empty() {
        return Err(Error::DegenerateWindow("no samples after t = 0".into()));
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NComparison {
    pub n: usize,
    pub replicas: usize,
    /// RMS of the relative `X₂` gap over replicas and sample times.
    pub second_moment_rms: f64,
    pub second_moment_mean: f64,
    pub second_moment_sd: f64,
    pub cross_moment_rms: f64,
    pub kinetic_rms: f64,
    /// Replica mean of `[X₂+Xₘ](T) − [X₂+Xₘ](0)`.
    pub virial_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema: String,
    pub regime: Regime,
    pub mass: f64,
    pub sigma: f64,
    pub t_end: f64,
    pub temperature: f64,
    pub fluid: Vec<DiagnosticsRecord>,
    pub by_n: Vec<NComparison>,
    /// `X₂` RMS gap strictly decreasing along `compare_n`.
    pub second_moment_gap_decreasing: bool,
    pub fluid_virial_change: f64,
    /// Fluid and every particle count change `X₂ + Xₘ` with the same sign.
    pub virial_sign_agrees: bool,
}

fn rms(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    (s / n.max(1) as f64).sqrt()
}

/// Runs the fluid once and `replicas` ensembles for every `N` in `compare_n`. Replica
/// `r` uses seed `seed + r` for every `N`.
pub fn compare_fluid_particles(cfg: &ScenarioConfig) -> Result<CompareReport> {
    cfg.validate()?;
    if !cfg.particles {
        return Err(Error::Config("compare needs particles = on".into()));
    }
    let mut fcfg = cfg.clone();
    fcfg.particles = false;
    fcfg.out_dir = None;
    let fluid_run = run(&fcfg)?;
    let fluid = fluid_run.records;
    let times: Vec<f64> = fluid.iter().skip(1).map(|r| r.t).collect();
    let jobs: Vec<(usize, usize)> =
        cfg.compare_n.iter().flat_map(|&n| (0..cfg.replicas).map(move |r| (n, r))).collect();
    let trajectories: Vec<Result<(usize, Vec<ParticleMoments>)>> = jobs
        .par_iter()
        .map(|&(n, r)| {
            let mut e = matched_ensemble(cfg, n, cfg.seed.wrapping_add(r as u64))?;
            let mut out = vec![empirical_moments(&e)];
            for &t in &times {
                advance_ensemble(&mut e, t, cfg.particle_dt)?;
                out.push(empirical_moments(&e));
            }
            Ok((n, out))
        })
        .collect();
    let trajectories = trajectories.into_iter().collect::<Result<Vec<_>>>()?;

    let fluid_change = fluid.last().unwrap().virial_moment() - fluid[0].virial_moment();
    let mut by_n = Vec::new();
    for &n in &cfg.compare_n {
        let mut gaps = Vec::new();
        let mut change = 0.0;
        for (_, traj) in trajectories.iter().filter(|(m, _)| *m == n) {
            gaps.push(relative_gaps(&fluid, traj, cfg.bath_temperature)?);
            change += traj.last().unwrap().virial_moment() - traj[0].virial_moment();
        }
        let x2: Vec<f64> = gaps.iter().flat_map(|g| g.second_moment.iter().copied()).collect();
        let mean = x2.iter().sum::<f64>() / x2.len() as f64;
        let var = x2.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (x2.len().max(2) - 1) as f64;
        by_n.push(NComparison {
            n,
            replicas: gaps.len(),
            second_moment_rms: rms(x2.iter().copied()),
            second_moment_mean: mean,
            second_moment_sd: var.sqrt(),
            cross_moment_rms: rms(gaps.iter().flat_map(|g| g.cross_moment.iter().copied())),
            kinetic_rms: rms(gaps.iter().flat_map(|g| g.kinetic.iter().copied())),
            virial_change: change / gaps.len() as f64,
        });
    }
    let decreasing = by_n.windows(2).all(|w| w[1].second_moment_rms < w[0].second_moment_rms);
    let signs = by_n.iter().all(|c| c.virial_change.signum() == fluid_change.signum());
    let report = CompareReport {
        schema: COMPARE_SCHEMA.to_string(),
        regime: cfg.regime,
        mass: cfg.mass,
        sigma: cfg.sigma,
        t_end: cfg.t_end,
        temperature: cfg.bath_temperature,
        fluid,
        by_n,
        second_moment_gap_decreasing: decreasing,
        fluid_virial_change: fluid_change,
        virial_sign_agrees: signs,
    };
    if let Some(d) = &cfg.out_dir {
        fs::create_dir_all(d).map_err(|e| io_context(d, e))?;
        write_json(&d.join("compare.json"), &report)?;
        let mut text = format!("# schema={COMPARE_SCHEMA}\n");
        text += "n,replicas,second_moment_rms,second_moment_mean,second_moment_sd,cross_moment_rms,kinetic_rms,virial_change\n";
        for c in &report.by_n {
            text += &format!(
                "{},{},{},{},{},{},{},{}\n",
                c.n,
                c.replicas,
                num(c.second_moment_rms),
                num(c.second_moment_mean),
                num(c.second_moment_sd),
                num(c.cross_moment_rms),
                num(c.kinetic_rms),
                num(c.virial_change)
            );
        }
        let path = d.join("compare.csv");
        fs::write(&path, text).map_err(|e| io_context(&path, e))?;
    }
    Ok(report)
}
