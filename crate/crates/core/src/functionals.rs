//! Moments, energies and the inequality monitors built on them.
//!
//! Notation used throughout: `M` mass, `X₂ = ∫|x|²ρ`, `Xₘ = ∫2x·m`, `K = ∫|m|²/ρ`,
//! `S = ∫ρ log ρ`, `W = ∫ρΦ`, `D(T) = ∫₀ᵀ∫2|m|²/ρ`, `θ = 1 − M/8π`,
//! `A = K + 2S − W` (the free energy) and `E = 3A + X₂ + Xₘ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ScalarField, Sum};
use crate::poisson::{interaction_energy, PoissonSolution};
use crate::state::{FluidState, ModelParams};

pub const CRITICAL_MASS: f64 = 8.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub second_moment: f64,
    pub cross_moment: f64,
    pub kinetic: f64,
    pub entropy: f64,
    pub interaction: f64,
    pub dissipation: f64,
    pub loghls: f64,
    pub rho_max: f64,
    /// Time step in use when the sample was taken (0 before the first step).
    pub dt: f64,
}

impl DiagnosticsRecord {
    /// `X₂ + Xₘ`, the quantity governed by the virial identity.
    pub fn virial_moment(&self) -> f64 {
        self.second_moment + self.cross_moment
    }

    /// Free energy `K + 2S − W`.
    pub fn free_energy(&self) -> f64 {
        self.kinetic + 2.0 * self.entropy - self.interaction
    }

    /// Total energy `3(K + 2S − W) + X₂ + Xₘ`; at `t = 0` this is `E₀`.
    pub fn total_energy(&self) -> f64 {
        3.0 * self.free_energy() + self.virial_moment()
    }
}

/// `∫ρ log ρ` with the logarithm evaluated at `max(ρ, floor)`.
pub fn entropy(rho: &ScalarField, floor: f64) -> f64 {
    let mut acc = Sum::default();
    for &r in rho.values() {
        acc.add(r * r.max(floor).ln());
    }
    acc.value() * rho.grid().cell_area()
}

pub fn second_moment(rho: &ScalarField) -> f64 {
    rho.integral_with(|p| p[0] * p[0] + p[1] * p[1])
}

/// Evaluate every functional on one state. `accumulated_dissipation` is `D(t)`.
pub fn diagnostics(
    state: &FluidState,
    solution: &PoissonSolution,
    accumulated_dissipation: f64,
    params: &ModelParams,
) -> DiagnosticsRecord {
    let g = *state.grid();
    let mass = state.mass();
    let mut cross = Sum::default();
    for j in 0..g.n() {
        for i in 0..g.n() {
            let k = g.index(i, j);
            let x = g.center(i, j);
            cross.add(2.0 * (x[0] * state.m.x()[k] + x[1] * state.m.y()[k]));
        }
    }
    let s = entropy(&state.rho, params.rho_floor);
    let w = interaction_energy(&state.rho, solution);
    DiagnosticsRecord {
        t: state.t,
        mass,
        second_moment: second_moment(&state.rho),
        cross_moment: cross.value() * g.cell_area(),
        kinetic: state.kinetic(),
        entropy: s,
        interaction: w,
        dissipation: accumulated_dissipation,
        loghls: loghls_value(mass, s, w),
        rho_max: state.rho.max(),
        dt: 0.0,
    }
}

/// `C(M) = M(1 + log π − log M)`.
pub fn loghls_constant(mass: f64) -> f64 {
    mass * (1.0 + PI.ln() - mass.ln())
}

/// `S − (4π/M) W`, i.e. `∫ρ log ρ + (2/M)∬ρρ log|x−y|` with `∬ρρ log|x−y| = −2πW`.
pub fn loghls_value(mass: f64, entropy: f64, interaction: f64) -> f64 {
    entropy - 4.0 * PI / mass * interaction
}

/// log-HLS functional of a density whose interaction energy `W` is already known.
pub fn loghls_functional(rho: &ScalarField, interaction: f64, floor: f64) -> f64 {
    loghls_value(rho.integral(), entropy(rho, floor), interaction)
}

/// Slack allowed below `−C(M)` before the log-HLS check fails.
pub fn loghls_tolerance(mass: f64) -> f64 {
    1e-2 * loghls_constant(mass).abs() + 1e-2
}

/// `4M(1 − M/8π) + 2K`.
pub fn virial_rhs(mass: f64, kinetic: f64) -> f64 {
    4.0 * mass * (1.0 - mass / CRITICAL_MASS) + 2.0 * kinetic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirialResidual {
    /// `(t, d/dt[X₂+Xₘ] − virial_rhs)` at interior samples, centred differences.
    pub pointwise: Vec<(f64, f64)>,
    /// `[X₂+Xₘ](T) − [X₂+Xₘ](0) − 4M(1−M/8π)T − D(T)` at the last sample.
    pub integrated: f64,
    /// `4M(1−M/8π)T` at the last sample, the natural scale of `integrated`.
    pub mass_term: f64,
}

pub fn virial_residual(window: &[DiagnosticsRecord]) -> Result<VirialResidual> {
    if window.len() < 2 {
        return Err(Error::DegenerateWindow("virial residual needs two samples".into()));
    }
    let first = &window[0];
    let last = &window[window.len() - 1];
    let pointwise = if window.len() >= 3 {
        window
            .windows(3)
            .map(|w| {
                let slope = (w[2].virial_moment() - w[0].virial_moment()) / (w[2].t - w[0].t);
                (w[1].t, slope - virial_rhs(w[1].mass, w[1].kinetic))
            })
            .collect()
    } else {
        let slope = (last.virial_moment() - first.virial_moment()) / (last.t - first.t);
        vec![(first.t, slope - virial_rhs(first.mass, first.kinetic))]
    };
    let span = last.t - first.t;
    let mass_term = 4.0 * first.mass * (1.0 - first.mass / CRITICAL_MASS) * span;
    let integrated = last.virial_moment()
        - first.virial_moment()
        - mass_term
        - (last.dissipation - first.dissipation);
    Ok(VirialResidual { pointwise, integrated, mass_term })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorSlack {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl MonitorSlack {
    pub fn new(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        Self { name: name.to_string(), lhs, rhs, slack, tolerance, pass: slack >= -tolerance }
    }
}

/// Monitor tolerance `τ = (a·dx + b·dt)·M`. Slacks are always reported raw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorTolerance {
    pub a: f64,
    pub b: f64,
}

impl Default for MonitorTolerance {
    fn default() -> Self {
        Self { a: 0.05, b: 0.5 }
    }
}

impl MonitorTolerance {
    pub fn tau(&self, dx: f64, dt: f64, mass: f64) -> f64 {
        (self.a * dx + self.b * dt) * mass
    }
}

/// The two inequalities obtained from the virial identity and the entropy inequality.
pub fn lemma22_monitors(record: &DiagnosticsRecord, initial: &DiagnosticsRecord, tau: f64) -> Vec<MonitorSlack> {
    let m = initial.mass;
    let theta = 1.0 - m / CRITICAL_MASS;
    let t = record.t - initial.t;
    vec![
        MonitorSlack::new(
            "lemma22_moment",
            0.5 * record.second_moment,
            4.0 * m * theta * t + 2.0 * record.kinetic + record.dissipation + initial.virial_moment(),
            tau,
        ),
        MonitorSlack::new(
            "lemma22_energy",
            record.kinetic + record.dissipation + 2.0 * theta * record.entropy,
            m / (4.0 * PI) * loghls_constant(m) + initial.free_energy(),
            tau,
        ),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Regime {
    /// Relative width of the band around `8π` treated as critical.
    pub const CRITICAL_BAND: f64 = 1e-9;

    pub fn of_mass(mass: f64) -> Self {
        if (mass - CRITICAL_MASS).abs() <= Self::CRITICAL_BAND * CRITICAL_MASS {
            Regime::Critical
        } else if mass < CRITICAL_MASS {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        }
    }

    pub fn default_mass(self) -> f64 {
        match self {
            Regime::Subcritical => 4.0 * PI,
            Regime::Critical => 8.0 * PI,
            Regime::Supercritical => 16.0 * PI,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subcritical" => Ok(Regime::Subcritical),
            "critical" => Ok(Regime::Critical),
            "supercritical" => Ok(Regime::Supercritical),
            other => Err(Error::Config(format!("unknown regime '{other}'"))),
        }
    }
}

/// Constants and envelopes of the a priori bounds, recombined from the two
/// monitor inequalities and the Jensen floor. See `docs/derivation.md`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub mass: f64,
    pub theta: f64,
    /// `E₀`
    pub total_energy: f64,
    /// `[X₂+Xₘ](0)`
    pub initial_moment: f64,
    /// `A₀ = [K + 2S − W](0)`
    pub initial_free_energy: f64,
    /// `C₁ = (3M/4π) C(M)`: `½X₂ + K + D ≤ C₁ + E₀` at `M = 8π`.
    pub c1: f64,
    /// `B = (M/4π) C(M) + A₀`, right side of the energy monitor.
    pub energy_bound: f64,
    /// `C̃₂ = B − 2θ M log(M/π)`.
    pub c2_tilde: f64,
    /// `C₅ = B / 2θ`, upper bound of `S` (subcritical only; infinite otherwise).
    pub c5: f64,
}

impl BoundConstants {
    pub fn new(initial: &DiagnosticsRecord) -> Self {
        let m = initial.mass;
        let theta = 1.0 - m / CRITICAL_MASS;
        let energy_bound = m / (4.0 * PI) * loghls_constant(m) + initial.free_energy();
        Self {
            mass: m,
            theta,
            total_energy: initial.total_energy(),
            initial_moment: initial.virial_moment(),
            initial_free_energy: initial.free_energy(),
            c1: 3.0 * m / (4.0 * PI) * loghls_constant(m),
            energy_bound,
            c2_tilde: energy_bound - 2.0 * theta * m * (m / PI).ln(),
            c5: if theta > 0.0 { energy_bound / (2.0 * theta) } else { f64::INFINITY },
        }
    }

    fn log_growth(&self, t: f64) -> f64 {
        self.c2_tilde + 2.0 * self.theta * self.mass * (10.0 + t).ln()
    }

    /// Upper envelope for `X₂(T)` (subcritical).
    pub fn second_moment_envelope(&self, t: f64) -> f64 {
        let num = 4.0 * self.mass * self.theta * t + self.initial_moment + 2.0 * self.log_growth(t);
        num / (0.5 - 4.0 * self.theta / (10.0 + t))
    }

    /// Upper envelope for `K(T) + D(T)` (subcritical).
    pub fn kinetic_dissipation_envelope(&self, t: f64) -> f64 {
        self.log_growth(t) + 2.0 * self.theta * self.second_moment_envelope(t) / (10.0 + t)
    }

    /// Lower envelope for `S(T)` (subcritical): Jensen floor with the `X₂` envelope.
    pub fn entropy_lower_envelope(&self, t: f64) -> f64 {
        jensen_floor(self.mass, t, self.second_moment_envelope(t))
    }
}

/// `M log M − M log(π(10+T)) − X₂/(10+T)`.
pub fn jensen_floor(mass: f64, t: f64, second_moment: f64) -> f64 {
    mass * mass.ln() - mass * (PI * (10.0 + t)).ln() - second_moment / (10.0 + t)
}

pub fn jensen_monitor(record: &DiagnosticsRecord, t: f64, tau: f64) -> MonitorSlack {
    MonitorSlack::new("jensen_floor", jensen_floor(record.mass, t, record.second_moment), record.entropy, tau)
}

/// A priori bounds for the critical or subcritical regime at elapsed time `t`.
pub fn theorem_bound_monitors(
    record: &DiagnosticsRecord,
    initial: &DiagnosticsRecord,
    t: f64,
    regime: Regime,
    tau: f64,
) -> Result<Vec<MonitorSlack>> {
    let actual = Regime::of_mass(initial.mass);
    if actual != regime || regime == Regime::Supercritical {
        return Err(Error::RegimeMismatch(format!(
            "a priori bounds requested for {regime} but M = {} is {actual}",
            initial.mass
        )));
    }
    let c = BoundConstants::new(initial);
    let mut out = Vec::new();
    match regime {
        Regime::Critical => {
            out.push(MonitorSlack::new(
                "critical_moment_energy",
                0.5 * record.second_moment + record.kinetic + record.dissipation,
                c.c1 + c.total_energy,
                tau,
            ));
        }
        Regime::Subcritical => {
            out.push(MonitorSlack::new(
                "subcritical_kinetic_dissipation",
                record.kinetic + record.dissipation,
                c.kinetic_dissipation_envelope(t),
                tau,
            ));
            out.push(MonitorSlack::new("subcritical_entropy_upper", record.entropy, c.c5, tau));
            out.push(MonitorSlack::new(
                "subcritical_entropy_lower",
                c.entropy_lower_envelope(t),
                record.entropy,
                tau,
            ));
            out.push(MonitorSlack::new(
                "subcritical_second_moment",
                record.second_moment,
                c.second_moment_envelope(t),
                tau,
            ));
        }
        Regime::Supercritical => unreachable!(),
    }
    out.push(jensen_monitor(record, t, tau));
    Ok(out)
}

/// log-HLS check of one record.
pub fn loghls_monitor(record: &DiagnosticsRecord) -> MonitorSlack {
    MonitorSlack::new(
        "loghls",
        -loghls_constant(record.mass),
        record.loghls,
        loghls_tolerance(record.mass),
    )
}

/// Combination constant of the supercritical bound:
/// `C̃₁ = (M/2π) C(M) − A₀ + 4(M/8π − 1) S₀`, so that `C̃₁ + E₀` is exactly the
/// constant left after adding the moment inequality to twice the energy inequality
/// and replacing `S(T)` by the envelope `S₀ + C_α T^α`.
pub fn supercritical_constant(initial: &DiagnosticsRecord) -> f64 {
    let m = initial.mass;
    m / (2.0 * PI) * loghls_constant(m) - initial.free_energy() + 4.0 * (m / CRITICAL_MASS - 1.0) * initial.entropy
}

/// Right side of `½X₂(T) ≤ 4M(1−M/8π)T + 4(M/8π−1)C_α T^α + C̃₁ + E₀`.
pub fn blowup_bound(initial: &DiagnosticsRecord, t: f64, alpha: f64, c_alpha: f64, mass: f64) -> Result<f64> {
    check_blowup_args(alpha, c_alpha, mass)?;
    let excess = mass / CRITICAL_MASS - 1.0;
    Ok(-4.0 * mass * excess * t
        + 4.0 * excess * c_alpha * t.powf(alpha)
        + supercritical_constant(initial)
        + initial.total_energy())
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_blowup_args(alpha: f64, c_alpha: f64, mass: f64) -> Result<()> {
    if !(mass > CRITICAL_MASS) {
        return Err(Error::RegimeMismatch(format!("blow-up bound needs M > 8π, got M = {mass}")));
    }
    if !(0.0..1.0).contains(&alpha) || !(c_alpha >= 0.0 && c_alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= alpha < 1 and C_alpha >= 0, got {alpha} and {c_alpha}"
        )));
    }
    Ok(())
}

/// Latest time at which `½X₂` may still be positive according to [`blowup_bound`].
pub fn blowup_time(initial: &DiagnosticsRecord, alpha: f64, c_alpha: f64, mass: f64) -> Result<f64> {
    let f = |t: f64| blowup_bound(initial, t, alpha, c_alpha, mass);
    if f(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while f(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::DegenerateWindow("blow-up bound has no root".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyFit {
    pub alpha: f64,
    pub coeff: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub samples: usize,
    /// `false` when the exponent is not resolvably inside `(0, 1)`.
    pub within_assumption: bool,
}

/// Exponents within this distance of 1 are treated as linear growth.
pub const FIT_RESOLUTION: f64 = 0.05;

/// Least-squares fit of `log(S(t) − S(0) + 1)` against `log t`.
pub fn entropy_growth_fit(trajectory: &[(f64, f64)]) -> Result<EntropyFit> {
    let (t0, s0) = *trajectory
        .first()
        .ok_or_else(|| Error::DegenerateWindow("empty trajectory".into()))?;
    let pts: Vec<(f64, f64)> = trajectory
        .iter()
        .filter(|(t, s)| *t > t0 && *t > 0.0 && s - s0 + 1.0 > 0.0)
        .map(|(t, s)| (t.ln(), (s - s0 + 1.0).ln()))
        .collect();
    if pts.len() < 10 {
        return Err(Error::DegenerateWindow(format!("need 10 usable samples, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(Error::DegenerateWindow("all sample times coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - alpha * p.0).powi(2)).sum();
    Ok(EntropyFit {
        alpha,
        coeff: intercept.exp(),
        residual: (rss / n).sqrt(),
        samples: pts.len(),
        within_assumption: alpha > 0.0 && alpha < 1.0 - FIT_RESOLUTION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loghls_constant_values() {
        assert!((loghls_constant(PI) - PI).abs() < 1e-14);
        let c8 = loghls_constant(8.0 * PI);
        assert!((c8 - 8.0 * PI * (1.0 - 3.0 * 2f64.ln())).abs() <= 1e-12 * c8.abs());
        assert!((c8 + 27.13).abs() < 0.01);
        assert!(loghls_constant(PI * std::f64::consts::E).abs() < 1e-13);
    }

    #[test]
    fn virial_rhs_values() {
        assert_eq!(virial_rhs(8.0 * PI, 0.0), 0.0);
        assert!((virial_rhs(4.0 * PI, 0.0) - 8.0 * PI).abs() < 1e-13);
        // 4M(1 - M/8π) at M = 16π is 64π·(−1)
        assert!((virial_rhs(16.0 * PI, 0.0) + 64.0 * PI).abs() < 1e-12);
        assert!((virial_rhs(4.0 * PI, 1.5) - 8.0 * PI - 3.0).abs() < 1e-13);
    }

    #[test]
    fn regime_classification() {
        assert_eq!(Regime::of_mass(4.0 * PI), Regime::Subcritical);
        assert_eq!(Regime::of_mass(8.0 * PI), Regime::Critical);
        assert_eq!(Regime::of_mass(16.0 * PI), Regime::Supercritical);
    }

    #[allow(clippy::too_many_arguments)]
    fn record(t: f64, mass: f64, x2: f64, xm: f64, k: f64, s: f64, w: f64, d: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            mass,
            second_moment: x2,
            cross_moment: xm,
            kinetic: k,
            entropy: s,
            interaction: w,
            dissipation: d,
            loghls: loghls_value(mass, s, w),
            ..Default::default()
        }
    }

    #[test]
    fn lemma22_at_time_zero_rest_state() {
        let r0 = record(0.0, 4.0 * PI, 8.0 * PI, 0.0, 0.0, -3.86, -10.17, 0.0);
        let mons = lemma22_monitors(&r0, &r0, 0.0);
        assert!((mons[0].slack - 0.5 * r0.second_moment).abs() < 1e-12);
        assert!(mons.iter().all(|m| m.pass));
    }

    #[test]
    fn theorem_monitors_reject_wrong_regime() {
        let r0 = record(0.0, 4.0 * PI, 8.0 * PI, 0.0, 0.0, -3.86, -10.17, 0.0);
        assert!(theorem_bound_monitors(&r0, &r0, 0.0, Regime::Critical, 0.0).is_err());
        assert!(theorem_bound_monitors(&r0, &r0, 0.0, Regime::Supercritical, 0.0).is_err());
        let ok = theorem_bound_monitors(&r0, &r0, 0.0, Regime::Subcritical, 0.0).unwrap();
        assert_eq!(ok.len(), 5);
    }

    #[test]
    fn blowup_bound_linear_root() {
        let m = 16.0 * PI;
        let r0 = record(0.0, m, 32.0 * PI, 0.0, 0.0, 54.3, -162.7, 0.0);
        let t_star = blowup_time(&r0, 0.0, 0.0, m).unwrap();
        let closed = (supercritical_constant(&r0) + r0.total_energy()) / (4.0 * m * (m / CRITICAL_MASS - 1.0));
        assert!(closed > 0.0);
        assert!((t_star - closed).abs() < 1e-9 * closed);
        assert!(blowup_bound(&r0, 1.0, 0.5, 0.0, 4.0 * PI).is_err());
        assert!(blowup_bound(&r0, 1.0, 1.5, 0.0, m).is_err());
        // slope vanishes as M -> 8π from above
        let mut prev = 0.0;
        for eps in [1.0, 0.1, 0.01, 0.001] {
            let mm = CRITICAL_MASS + eps;
            let r = DiagnosticsRecord { mass: mm, ..r0 };
            let ts = blowup_time(&r, 0.0, 0.0, mm).unwrap();
            assert!(ts > prev);
            prev = ts;
        }
    }

    #[test]
    fn entropy_fit_synthetic() {
        let mut traj = vec![(0.0, 0.0)];
        for k in 0..=40 {
            let t = 10f64.powf(1.0 + 3.0 * k as f64 / 40.0);
            traj.push((t, 5.0 * t.sqrt()));
        }
        let fit = entropy_growth_fit(&traj).unwrap();
        assert!((fit.alpha - 0.5).abs() < 0.05, "{fit:?}");
        assert!(fit.within_assumption);

        let flat: Vec<(f64, f64)> = traj.iter().map(|(t, _)| (*t, 2.0)).collect();
        let fit = entropy_growth_fit(&flat).unwrap();
        assert!(fit.alpha.abs() < 1e-12);

        let linear: Vec<(f64, f64)> = traj.iter().map(|(t, _)| (*t, *t)).collect();
        let fit = entropy_growth_fit(&linear).unwrap();
        assert!((fit.alpha - 1.0).abs() < 0.05, "{fit:?}");
        assert!(!fit.within_assumption);

        assert!(entropy_growth_fit(&traj[..5]).is_err());
        let same_t: Vec<(f64, f64)> = (0..20).map(|k| (if k == 0 { 0.0 } else { 1.0 }, k as f64)).collect();
        assert!(entropy_growth_fit(&same_t).is_err());
    }
}
