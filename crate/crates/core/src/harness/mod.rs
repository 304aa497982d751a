//! Scenario runs: the time loop, monitors at sample times, blow-up detection, output
//! files, mass sweeps and the fluid/particle comparison.

pub mod check;
pub mod compare;
pub mod config;
pub mod output;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use compare::{compare_fluid_particles, CompareReport};
pub use config::ScenarioConfig;

use crate::error::{Error, Result};
use crate::functionals::{
    blowup_bound, blowup_time, diagnostics, entropy_growth_fit, jensen_monitor, lemma22_monitors, loghls_monitor,
    theorem_bound_monitors, virial_residual, DiagnosticsRecord, EntropyFit, MonitorSlack, Regime,
};
use crate::grid::make_grid;
use crate::hydro::{cfl_dt, entropy_inequality_residual, step, StepOptions};
use crate::particles::{
    default_regularization, deposit_density, empirical_moments, ensemble_step, sample_ensemble, write_csv,
    EnsembleSpec, ParticleEnsemble, ParticleMoments,
};
use crate::poisson::{AnySolver, PoissonSolver};
use crate::snapshot::Snapshot;
use crate::state::{gaussian_state, FluidState, GaussianSpec, ModelParams};
use output::{io_context, write_json, DiagnosticsWriter, ParticleMomentsWriter, SUMMARY_SCHEMA};

/// Every monitor a run reports, in table order.
pub const MONITORS: &[&str] = &[
    "lemma22_moment",
    "lemma22_energy",
    "loghls",
    "jensen_floor",
    "entropy_inequality",
    "critical_moment_energy",
    "subcritical_kinetic_dissipation",
    "subcritical_entropy_upper",
    "subcritical_entropy_lower",
    "subcritical_second_moment",
    "supercritical_blowup_bound",
];

/// Samples examined by [`detect_blowup`].
pub const BLOWUP_WINDOW: usize = 5;
/// `ρ_max` growth over its initial value required by [`detect_blowup`].
pub const BLOWUP_DENSITY_RATIO: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TEnd,
    BlowupSuspected,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "signal", rename_all = "snake_case")]
pub enum BlowupSignal {
    NoSignal,
    Suspected { t: f64, rho_max_ratio: f64, dt: f64 },
}

/// Concentration proxy for finite-time blow-up. Fires on the last [`BLOWUP_WINDOW`]
/// samples when `X₂ + Xₘ` decreases strictly from sample to sample, `ρ_max` exceeds
/// `10³` times its initial value and the time step has fallen below `10·dt_min`.
/// All three are required; fewer than five samples never fire.
pub fn detect_blowup(tail: &[DiagnosticsRecord], initial_rho_max: f64, dt_min: f64) -> BlowupSignal {
    if tail.len() < BLOWUP_WINDOW {
        return BlowupSignal::NoSignal;
    }
    let w = &tail[tail.len() - BLOWUP_WINDOW..];
    let decreasing = w.windows(2).all(|p| p[1].virial_moment() < p[0].virial_moment());
    let last = w[BLOWUP_WINDOW - 1];
    let ratio = last.rho_max / initial_rho_max;
    if decreasing && ratio > BLOWUP_DENSITY_RATIO && last.dt < 10.0 * dt_min {
        BlowupSignal::Suspected { t: last.t, rho_max_ratio: ratio, dt: last.dt }
    } else {
        BlowupSignal::NoSignal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// One line of the monitor table: the worst sample and how many samples failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub name: String,
    pub status: MonitorStatus,
    pub samples: usize,
    pub failures: usize,
    pub worst_slack: Option<f64>,
    pub worst_t: Option<f64>,
    pub worst_lhs: Option<f64>,
    pub worst_rhs: Option<f64>,
    pub worst_tolerance: Option<f64>,
    pub note: Option<String>,
}

impl MonitorReport {
    fn empty(name: &str) -> Self {
        Self {
            name: name.to_string(),
            status: MonitorStatus::NotApplicable,
            samples: 0,
            failures: 0,
            worst_slack: None,
            worst_t: None,
            worst_lhs: None,
            worst_rhs: None,
            worst_tolerance: None,
            note: None,
        }
    }

    fn add(&mut self, t: f64, s: &MonitorSlack) {
        self.samples += 1;
        if !s.pass {
            self.failures += 1;
        }
        // rank by slack relative to tolerance so that a tight tolerance is not hidden
        let score = |slack: f64, tol: f64| slack + tol;
        if self.worst_slack.is_none_or(|w| score(s.slack, s.tolerance) < score(w, self.worst_tolerance.unwrap_or(0.0))) {
            self.worst_slack = Some(s.slack);
            self.worst_t = Some(t);
            self.worst_lhs = Some(s.lhs);
            self.worst_rhs = Some(s.rhs);
            self.worst_tolerance = Some(s.tolerance);
        }
        self.status = if self.failures > 0 { MonitorStatus::Fail } else { MonitorStatus::Pass };
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirialSummary {
    /// `[X₂+Xₘ](T) − [X₂+Xₘ](0) − 4M(1−M/8π)T − D(T)`
    pub integrated: f64,
    /// `4M(1−M/8π)T`
    pub mass_term: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MassBudget {
    /// Mass added when the initial Gaussian tail was raised to the floor.
    pub initial_clamp: f64,
    /// Mass added by the density floor during the run.
    pub clamped: f64,
    /// Net mass that left through the box edges.
    pub outflow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub t: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSummary {
    pub n: usize,
    pub eps: f64,
    pub initial: ParticleMoments,
    pub last: ParticleMoments,
    pub mass_outside_grid: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema: String,
    pub regime: Regime,
    pub mass: f64,
    pub half_width: f64,
    pub n: usize,
    pub seed: u64,
    pub termination: Termination,
    pub detail: Option<String>,
    pub t_final: f64,
    pub steps: usize,
    pub samples: usize,
    pub min_dt: f64,
    pub rho_max_ratio: f64,
    pub initial: DiagnosticsRecord,
    pub final_record: DiagnosticsRecord,
    pub monitors: Vec<MonitorReport>,
    pub blowup: BlowupSignal,
    /// Latest blow-up time allowed by the supercritical bound with the fitted entropy growth.
    pub predicted_blowup_time: Option<f64>,
    pub entropy_fit: Option<EntropyFit>,
    pub virial: Option<VirialSummary>,
    pub mass_budget: MassBudget,
    pub snapshots: Vec<SnapshotEntry>,
    pub particles: Option<ParticleSummary>,
    pub notes: Vec<String>,
}

impl RunSummary {
    pub fn monitor(&self, name: &str) -> Option<&MonitorReport> {
        self.monitors.iter().find(|m| m.name == name)
    }

    /// Names of monitors that failed at some sample.
    pub fn failed_monitors(&self) -> Vec<String> {
        self.monitors.iter().filter(|m| m.status == MonitorStatus::Fail).map(|m| m.name.clone()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    /// One record per sample, starting at `t = 0`.
    pub records: Vec<DiagnosticsRecord>,
    /// Monitor values at each sample, parallel to `records`.
    pub slacks: Vec<Vec<MonitorSlack>>,
    pub particle_moments: Vec<ParticleMoments>,
    pub state: FluidState,
}

/// Model parameters of a scenario: friction `1/τ`, floor from the mass.
pub fn model_params(cfg: &ScenarioConfig) -> ModelParams {
    let mut p = ModelParams::for_mass(cfg.mass, cfg.half_width);
    p.friction = 1.0 / cfg.tau;
    p
}

/// Initial Gaussian of a scenario and the mass added by flooring its tail.
pub fn initial_state(cfg: &ScenarioConfig) -> Result<(FluidState, f64)> {
    let grid = make_grid(cfg.half_width, cfg.n)?;
    let spec = GaussianSpec { mass: cfg.mass, sigma: cfg.sigma, center: cfg.center, velocity: cfg.velocity };
    let init = gaussian_state(&grid, &spec, &model_params(cfg))?;
    Ok((init.state, init.clamped_mass))
}

/// Ensemble matched to the scenario's Gaussian: moment-matched, antithetic when `N`
/// allows it, Maxwellian velocities at `particle_temperature`, and the bath on.
pub fn particle_spec(cfg: &ScenarioConfig, n: usize, seed: u64) -> EnsembleSpec {
    EnsembleSpec {
        n,
        mass: cfg.mass,
        sigma: cfg.sigma,
        velocity_temperature: cfg.particle_temperature,
        tau: cfg.tau,
        eps: default_regularization(n, cfg.half_width),
        bath_temperature: cfg.bath_temperature,
        moment_match: true,
        antithetic: n.is_multiple_of(4),
        seed,
    }
}

pub fn matched_ensemble(cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<ParticleEnsemble> {
    let mut e = sample_ensemble(&particle_spec(cfg, n, seed))?;
    for (x, v) in e.pos.iter_mut().zip(e.vel.iter_mut()) {
        x[0] += cfg.center[0];
        x[1] += cfg.center[1];
        v[0] += cfg.velocity[0];
        v[1] += cfg.velocity[1];
    }
    Ok(e)
}

/// Steps the ensemble to exactly `target` with steps no longer than `max_dt`.
pub fn advance_ensemble(e: &mut ParticleEnsemble, target: f64, max_dt: f64) -> Result<()> {
    let span = target - e.t;
    if span <= 0.0 {
        return Ok(());
    }
    let steps = (span / max_dt - 1e-9).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    for _ in 0..steps {
        ensemble_step(e, dt)?;
    }
    e.t = target;
    Ok(())
}

/// Sample and snapshot times in increasing order, always ending with `t_end`.
fn event_times(cfg: &ScenarioConfig) -> Vec<(f64, bool, bool)> {
    let eps = 1e-9 * cfg.t_end.max(1.0);
    let mut ev: Vec<(f64, bool, bool)> = Vec::new();
    let count = (cfg.t_end / cfg.sample_interval + 1e-9).floor() as usize;
    for k in 1..=count {
        ev.push((k as f64 * cfg.sample_interval, true, false));
    }
    ev.push((cfg.t_end, true, false));
    for &t in &cfg.snapshot_times {
        if t > 0.0 && t <= cfg.t_end + eps {
            ev.push((t.min(cfg.t_end), false, true));
        }
    }
    ev.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, bool, bool)> = Vec::new();
    for e in ev {
        match merged.last_mut() {
            Some(last) if (e.0 - last.0).abs() <= eps => {
                last.1 |= e.1;
                last.2 |= e.2;
            }
            _ => merged.push(e),
        }
    }
    merged
}

fn sample_monitors(
    cfg: &ScenarioConfig,
    record: &DiagnosticsRecord,
    initial: &DiagnosticsRecord,
    tau: f64,
) -> Result<Vec<MonitorSlack>> {
    let mut out = lemma22_monitors(record, initial, tau);
    out.push(loghls_monitor(record));
    let t = record.t - initial.t;
    match cfg.regime {
        Regime::Supercritical => out.push(jensen_monitor(record, t, tau)),
        r => out.extend(theorem_bound_monitors(record, initial, t, r, tau)?),
    }
    Ok(out)
}

fn snapshot_name(t: f64) -> String {
    format!("snapshot_t{t:010.5}.ksf")
}

fn write_snapshot(dir: &Path, snap: &Snapshot, name: &str) -> Result<()> {
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|e| io_context(&path, e))?;
    snap.write(std::io::BufWriter::new(file))
}

/// Runs one scenario. Module errors during the time loop end the run with
/// [`Termination::Error`] and are reported in the summary; everything written up to
/// that point stays on disk. Configuration and I/O errors are returned.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let params = model_params(cfg);
    let (mut state, initial_clamp) = initial_state(cfg)?;
    let grid = *state.grid();
    let solver = AnySolver::new(cfg.solver, grid);
    let opts = StepOptions { limiter: cfg.limiter, ..Default::default() };

    let dir = cfg.out_dir.clone();
    if let Some(d) = &dir {
        fs::create_dir_all(d).map_err(|e| io_context(d, e))?;
        fs::write(d.join("config.txt"), cfg.to_config_text()).map_err(|e| io_context(d, e))?;
    }
    let mut writer = match &dir {
        Some(d) => Some(DiagnosticsWriter::create(&d.join("diagnostics.csv"), MONITORS)?),
        None => None,
    };
    let mut pwriter = match (&dir, cfg.particles) {
        (Some(d), true) => Some(ParticleMomentsWriter::create(&d.join("particle_moments.csv"))?),
        _ => None,
    };

    let mut sol = solver.solve(&state.rho)?;
    let initial = diagnostics(&state, &sol, 0.0, &params);
    let mut table: Vec<MonitorReport> = MONITORS.iter().map(|m| MonitorReport::empty(m)).collect();
    let mut records = vec![initial];
    let mut slacks = vec![sample_monitors(cfg, &initial, &initial, 0.0)?];
    for s in &slacks[0] {
        record_slack(&mut table, 0.0, s);
    }
    if let Some(w) = writer.as_mut() {
        w.row(&initial, &slacks[0])?;
    }
    let mut snapshots = Vec::new();
    let write_snap = |snap: Snapshot, t: f64, snapshots: &mut Vec<SnapshotEntry>| -> Result<()> {
        if let Some(d) = &dir {
            let name = snapshot_name(t);
            write_snapshot(d, &snap, &name)?;
            snapshots.push(SnapshotEntry { t, file: name });
        }
        Ok(())
    };
    if cfg.snapshot_times.contains(&0.0) {
        write_snap(Snapshot::from_state(&state), 0.0, &mut snapshots)?;
    }

    let mut ensemble = if cfg.particles { Some(matched_ensemble(cfg, cfg.particles_n, cfg.seed)?) } else { None };
    let mut particle_moments = Vec::new();
    if let Some(e) = &ensemble {
        let m = empirical_moments(e);
        if let Some(w) = pwriter.as_mut() {
            w.row(&m)?;
        }
        particle_moments.push(m);
    }

    let mut dissipation = 0.0;
    let mut budget = MassBudget { initial_clamp, ..Default::default() };
    let mut steps = 0usize;
    let mut last_dt = 0.0;
    let mut min_dt = f64::INFINITY;
    let mut entropy_worst = f64::NEG_INFINITY;
    let mut termination = Termination::TEnd;
    let mut detail = None;
    let mut blowup = BlowupSignal::NoSignal;
    let mut collapse: Option<f64> = None;
    let tol = |dt: f64| cfg.monitor.tau(grid.dx(), dt, cfg.mass);

    'events: for (te, is_sample, is_snapshot) in event_times(cfg) {
        while state.t < te - 1e-12 * te.max(1.0) {
            let dt = match cfl_dt(&state, &params, cfg.cfl, cfg.dt_min) {
                Ok(v) => {
                    // the stable step is what the blow-up rule and tolerances look at,
                    // not the remainder used to land on a sample time
                    last_dt = v;
                    min_dt = min_dt.min(v);
                    v.min(te - state.t)
                }
                Err(Error::BlowupSuspected { dt, .. }) => {
                    collapse = Some(dt);
                    break 'events;
                }
                Err(e) => {
                    termination = Termination::Error;
                    detail = Some(format!("at t = {}: {e}", state.t));
                    break 'events;
                }
            };
            let k0 = state.kinetic();
            let next = match step(&state, &sol, &params, &solver, dt, &opts) {
                Ok(o) => o,
                Err(e) => {
                    termination = Termination::Error;
                    detail = Some(format!("at t = {}: {e}", state.t));
                    break 'events;
                }
            };
            if dt >= 0.5 * last_dt {
                // a rate over a sliver of a step is dominated by round-off
                let r = entropy_inequality_residual(&state, &sol, &next.state, &next.solution, dt);
                entropy_worst = entropy_worst.max(r);
            }
            dissipation += dt * (k0 + next.state.kinetic());
            budget.clamped += next.report.clamped_mass;
            budget.outflow += next.report.boundary_outflow;
            state = next.state;
            sol = next.solution;
            steps += 1;
        }
        if let Some(e) = ensemble.as_mut() {
            if let Err(err) = advance_ensemble(e, te, cfg.particle_dt) {
                termination = Termination::Error;
                detail = Some(format!("particles at t = {}: {err}", e.t));
                break 'events;
            }
        }
        if is_sample {
            let mut r = diagnostics(&state, &sol, dissipation, &params);
            r.dt = last_dt;
            let mut s = sample_monitors(cfg, &r, &initial, tol(last_dt))?;
            if entropy_worst.is_finite() {
                s.push(MonitorSlack::new("entropy_inequality", entropy_worst, 0.0, tol(last_dt)));
                entropy_worst = f64::NEG_INFINITY;
            }
            for m in &s {
                record_slack(&mut table, r.t, m);
            }
            if let Some(w) = writer.as_mut() {
                w.row(&r, &s)?;
            }
            records.push(r);
            slacks.push(s);
            if let Some(e) = &ensemble {
                let m = empirical_moments(e);
                if let Some(w) = pwriter.as_mut() {
                    w.row(&m)?;
                }
                particle_moments.push(m);
            }
            blowup = detect_blowup(&records, initial.rho_max, cfg.dt_min);
            if matches!(blowup, BlowupSignal::Suspected { .. }) {
                termination = Termination::BlowupSuspected;
                break 'events;
            }
        }
        if is_snapshot {
            write_snap(Snapshot::from_state(&state), te, &mut snapshots)?;
        }
    }

    if let Some(dt) = collapse {
        let mut r = diagnostics(&state, &sol, dissipation, &params);
        r.dt = dt;
        if records.last().is_some_and(|l| l.t == r.t) {
            records.last_mut().unwrap().dt = dt;
        } else {
            let s = sample_monitors(cfg, &r, &initial, tol(last_dt))?;
            for m in &s {
                record_slack(&mut table, r.t, m);
            }
            if let Some(w) = writer.as_mut() {
                w.row(&r, &s)?;
            }
            records.push(r);
            slacks.push(s);
        }
        min_dt = min_dt.min(dt);
        blowup = detect_blowup(&records, initial.rho_max, cfg.dt_min);
        termination = match blowup {
            BlowupSignal::Suspected { .. } => Termination::BlowupSuspected,
            BlowupSignal::NoSignal => {
                detail = Some(format!(
                    "time step {dt:e} fell below dt_min = {:e} at t = {} without the full concentration signature",
                    cfg.dt_min, state.t
                ));
                Termination::Error
            }
        };
    }

    let mut notes = Vec::new();
    let trajectory: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.entropy)).collect();
    let entropy_fit = match entropy_growth_fit(&trajectory) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("entropy growth fit unavailable: {e}"));
            None
        }
    };
    let mut predicted_blowup_time = None;
    if cfg.regime == Regime::Supercritical {
        supercritical_bound(cfg, &records, &initial, entropy_fit, &mut table, &mut predicted_blowup_time, &mut notes);
    }
    annotate_inapplicable(cfg.regime, &mut table);

    let virial = virial_residual(&records)
        .ok()
        .map(|v| VirialSummary { integrated: v.integrated, mass_term: v.mass_term });

    let mut particles = None;
    if let Some(e) = &ensemble {
        let dep = deposit_density(e, &grid);
        if let Some(w) = dep.warning.clone() {
            notes.push(format!("particle deposit: {w}"));
        }
        if let Some(d) = &dir {
            let path = d.join("particles.csv");
            let file = fs::File::create(&path).map_err(|err| io_context(&path, err))?;
            write_csv(e, std::io::BufWriter::new(file))?;
            write_snapshot(d, &Snapshot::from_scalar(&dep.rho, e.t), "particles_density.ksf")?;
        }
        particles = Some(ParticleSummary {
            n: e.len(),
            eps: e.eps,
            initial: particle_moments[0],
            last: *particle_moments.last().unwrap(),
            mass_outside_grid: dep.mass_outside,
        });
    }

    let last = *records.last().unwrap();
    let summary = RunSummary {
        schema: SUMMARY_SCHEMA.to_string(),
        regime: cfg.regime,
        mass: cfg.mass,
        half_width: cfg.half_width,
        n: cfg.n,
        seed: cfg.seed,
        termination,
        detail,
        t_final: state.t,
        steps,
        samples: records.len(),
        min_dt: if min_dt.is_finite() { min_dt } else { 0.0 },
        rho_max_ratio: records.iter().map(|r| r.rho_max).fold(0.0, f64::max) / initial.rho_max,
        initial,
        final_record: last,
        monitors: table,
        blowup,
        predicted_blowup_time,
        entropy_fit,
        virial,
        mass_budget: budget,
        snapshots,
        particles,
        notes,
    };
    if let Some(d) = &dir {
        write_json(&d.join("summary.json"), &summary)?;
    }
    Ok(RunOutput { summary, records, slacks, particle_moments, state })
}

fn record_slack(table: &mut [MonitorReport], t: f64, s: &MonitorSlack) {
    if let Some(row) = table.iter_mut().find(|r| r.name == s.name) {
        row.add(t, s);
    }
}

fn supercritical_bound(
    cfg: &ScenarioConfig,
    records: &[DiagnosticsRecord],
    initial: &DiagnosticsRecord,
    fit: Option<EntropyFit>,
    table: &mut [MonitorReport],
    predicted: &mut Option<f64>,
    notes: &mut Vec<String>,
) {
    let row = table.iter_mut().find(|r| r.name == "supercritical_blowup_bound").unwrap();
    let Some(fit) = fit else {
        row.note = Some("no entropy growth fit".into());
        return;
    };
    if !fit.within_assumption {
        let msg = format!(
            "fitted entropy growth exponent {:.3} is not inside (0, 1); the blow-up bound does not apply",
            fit.alpha
        );
        row.note = Some(msg.clone());
        notes.push(msg);
        return;
    }
    match blowup_time(initial, fit.alpha, fit.coeff, cfg.mass) {
        Ok(t) => *predicted = Some(t),
        Err(e) => notes.push(format!("blow-up time: {e}")),
    }
    for r in records {
        let t = r.t - initial.t;
        if let Ok(rhs) = blowup_bound(initial, t, fit.alpha, fit.coeff, cfg.mass) {
            let tol = cfg.monitor.tau(make_grid(cfg.half_width, cfg.n).map(|g| g.dx()).unwrap_or(0.0), r.dt, cfg.mass);
            row.add(r.t, &MonitorSlack::new("supercritical_blowup_bound", 0.5 * r.second_moment, rhs, tol));
        }
    }
}

fn annotate_inapplicable(regime: Regime, table: &mut [MonitorReport]) {
    for row in table.iter_mut().filter(|r| r.status == MonitorStatus::NotApplicable && r.note.is_none()) {
        row.note = Some(match row.name.as_str() {
            "critical_moment_energy" => format!("only for M = 8π; this run is {regime}"),
            n if n.starts_with("subcritical") => format!("only for M < 8π; this run is {regime}"),
            "supercritical_blowup_bound" => format!("only for M > 8π; this run is {regime}"),
            "entropy_inequality" => "no step was taken".into(),
            _ => "no samples".into(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mass: f64,
    pub mass_over_critical: f64,
    pub regime: Regime,
    pub termination: Termination,
    /// `(V(t₁) − V(0))/t₁` with `V = X₂ + Xₘ` over the first sample interval.
    pub initial_virial_slope: f64,
    /// `4M(1 − M/8π) + 2K(0)`
    pub predicted_slope: f64,
    pub final_second_moment: f64,
    pub rho_max_ratio: f64,
    pub failed_monitors: Vec<String>,
}

/// Runs the base scenario once per mass in `sweep_masses`, each in `out/mass_<M/π>pi`.
/// The regime of each run follows from its mass.
pub fn sweep(base: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let rows: Vec<Result<SweepRow>> = base
        .sweep_masses
        .par_iter()
        .map(|&m| {
            let mut cfg = base.clone();
            cfg.mass = m;
            cfg.regime = Regime::of_mass(m);
            cfg.particles = false;
            cfg.out_dir = base.out_dir.as_ref().map(|d| d.join(format!("mass_{:.4}pi", m / PI)));
            let out = run(&cfg)?;
            let r = &out.records;
            let slope = if r.len() > 1 { (r[1].virial_moment() - r[0].virial_moment()) / (r[1].t - r[0].t) } else { f64::NAN };
            Ok(SweepRow {
                mass: m,
                mass_over_critical: m / (8.0 * PI),
                regime: cfg.regime,
                termination: out.summary.termination,
                initial_virial_slope: slope,
                predicted_slope: crate::functionals::virial_rhs(m, r[0].kinetic),
                final_second_moment: out.summary.final_record.second_moment,
                rho_max_ratio: out.summary.rho_max_ratio,
                failed_monitors: out.summary.failed_monitors(),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(d) = &base.out_dir {
        write_sweep_csv(d, &rows)?;
    }
    Ok(rows)
}

fn write_sweep_csv(dir: &Path, rows: &[SweepRow]) -> Result<PathBuf> {
    use output::num;
    fs::create_dir_all(dir).map_err(|e| io_context(dir, e))?;
    let mut text = String::from("# schema=ksfluid-sweep/1\n");
    text += "mass,mass_over_critical,regime,termination,initial_virial_slope,predicted_slope,final_second_moment,rho_max_ratio,failed_monitors\n";
    for r in rows {
        let term = serde_json::to_value(r.termination).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        text += &format!(
            "{},{},{},{},{},{},{},{},{}\n",
            num(r.mass),
            num(r.mass_over_critical),
            r.regime,
            term,
            num(r.initial_virial_slope),
            num(r.predicted_slope),
            num(r.final_second_moment),
            num(r.rho_max_ratio),
            r.failed_monitors.join(";")
        );
    }
    let path = dir.join("sweep.csv");
    fs::write(&path, text).map_err(|e| io_context(&path, e))?;
    Ok(path)
}
