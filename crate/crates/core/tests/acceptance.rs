//! One line per acceptance criterion. Runs the default scenarios once and reuses them.
//!
//! `cargo test --release -p ksfluid-core --test acceptance`

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use ksfluid::functionals::{loghls_constant, loghls_monitor, loghls_tolerance, virial_residual, Regime};
use ksfluid::harness::check::{
    friction_decay_error, gaussian_far_field_error, loghls_gaussian_margin, mass_balance_error, momentum_decay_error,
    poisson_oracle_gap, rusanov_consistency_error, two_body_acceleration_error,
};
use ksfluid::harness::{compare_fluid_particles, run, MonitorStatus, RunOutput, ScenarioConfig, Termination};
use ksfluid::particles::{nbody_virial_check, sample_ensemble, EnsembleSpec};

/// Criteria that fail at desk resolution; see the README.
const KNOWN_UNATTAINABLE: &[u32] = &[7];

const SEED: u64 = 1;

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: u32, name: &'static str, pass: bool, detail: String) -> Line {
    Line { id, name, pass, detail }
}

fn scenario(regime: Regime) -> RunOutput {
    let t0 = Instant::now();
    let out = run(&ScenarioConfig::for_regime(regime)).expect("scenario run");
    eprintln!("  {regime} default run: {:.1} s", t0.elapsed().as_secs_f64());
    out
}

fn monitors_pass(out: &RunOutput, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in names {
        let m = out.summary.monitor(n).expect("monitor exists");
        ok &= m.status == MonitorStatus::Pass;
        parts.push(format!(
            "{n} {:?} worst slack {:.3e} (tol {:.1e})",
            m.status,
            m.worst_slack.unwrap_or(f64::NAN),
            m.worst_tolerance.unwrap_or(f64::NAN)
        ));
    }
    (ok, parts.join("; "))
}

fn poisson() -> Line {
    let t0 = Instant::now();
    let gap = poisson_oracle_gap(SEED, 20, 32).unwrap();
    let far = gaussian_far_field_error(16.0, 128, 1.0, 1.0, 4.0).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    line(
        1,
        "poisson fft = direct, far field",
        gap <= 1e-8 && far <= 1e-2 && secs < 60.0,
        format!("fft/direct {gap:.2e} (<= 1e-8), far-field {far:.2e} (<= 1e-2), {secs:.1} s (< 60)"),
    )
}

fn virial_convergence() -> Line {
    let residual = |n: usize| {
        let mut cfg = ScenarioConfig::for_regime(Regime::Subcritical);
        cfg.half_width = 8.0;
        cfg.n = n;
        cfg.t_end = 1.0;
        let out = run(&cfg).unwrap();
        assert_eq!(out.summary.termination, Termination::TEnd);
        let v = virial_residual(&out.records).unwrap();
        (v.integrated / v.mass_term).abs()
    };
    let (coarse, fine) = (residual(128), residual(256));
    let ratio = coarse / fine;
    line(
        2,
        "virial residual and refinement",
        coarse <= 0.02 && ratio >= 1.8,
        format!("n=128 {:.3}% (<= 2%), n=256 {:.4}%, decrease {ratio:.2}x (>= 1.8)", 100.0 * coarse, 100.0 * fine),
    )
}

fn critical_slope(crit: &RunOutput) -> Line {
    let r = &crit.records;
    assert_eq!(r[0].kinetic, 0.0);
    let slope = (r[1].virial_moment() - r[0].virial_moment()) / (r[1].t - r[0].t);
    let limit = 1e-2 * 8.0 * PI;
    line(
        3,
        "zero virial slope at 8pi",
        slope.abs() <= limit,
        format!("slope {slope:.3e} over [0, {}] (|.| <= {limit:.3e})", r[1].t),
    )
}

fn loghls(runs: &[&RunOutput], compare_fluid: &[ksfluid::functionals::DiagnosticsRecord]) -> Line {
    let mut bad = 0usize;
    let mut samples = 0usize;
    let mut worst = f64::INFINITY;
    let all = runs.iter().flat_map(|o| o.records.iter()).chain(compare_fluid);
    for r in all {
        let m = loghls_monitor(r);
        samples += 1;
        worst = worst.min(m.slack + m.tolerance);
        if !m.pass {
            bad += 1;
        }
    }
    let mut sweep_ok = true;
    let mut sweep = Vec::new();
    for m in [4.0 * PI, 8.0 * PI] {
        let margin = loghls_gaussian_margin(m, &[0.5, 1.0, 2.0, 3.0], 16.0, 256).unwrap();
        sweep_ok &= margin <= loghls_tolerance(m);
        sweep.push(format!("{:.0}pi {margin:.3}", m / PI));
    }
    let c8 = loghls_constant(8.0 * PI);
    let exact = 8.0 * PI * (1.0 - 3.0 * 2f64.ln());
    let c_err = (c8 - exact).abs() / exact.abs();
    line(
        4,
        "log-HLS lower bound",
        bad == 0 && sweep_ok && c_err <= 1e-12,
        format!(
            "{bad}/{samples} scenario samples below -C(M)-tol (closest {worst:.3}); Gaussian sweep -C-F: {} (<= tol); C(8pi) rel err {c_err:.1e}",
            sweep.join(", ")
        ),
    )
}

fn lemma22(sub: &RunOutput, crit: &RunOutput) -> Line {
    let names = ["lemma22_moment", "lemma22_energy"];
    let (a, da) = monitors_pass(sub, &names);
    let (b, db) = monitors_pass(crit, &names);
    let reached = sub.summary.t_final >= 5.0 - 1e-9 && crit.summary.t_final >= 5.0 - 1e-9;
    line(5, "moment and energy inequalities", a && b && reached, format!("subcritical: {da} | critical: {db}"))
}

fn envelopes(sub: &RunOutput) -> Line {
    let (ok, d) = monitors_pass(
        sub,
        &[
            "subcritical_kinetic_dissipation",
            "subcritical_second_moment",
            "subcritical_entropy_upper",
            "subcritical_entropy_lower",
        ],
    );
    line(6, "subcritical envelopes to T=5", ok && sub.summary.t_final >= 5.0 - 1e-9, d)
}

fn supercritical(sup: &RunOutput) -> Line {
    let s = &sup.summary;
    let fired = s.termination == Termination::BlowupSuspected;
    let before = match (s.predicted_blowup_time, fired) {
        (Some(t_star), true) => s.t_final <= t_star,
        _ => false,
    };
    // consecutive samples at which 2K < 16π
    let mut pairs = 0;
    let mut rising = 0;
    for w in sup.records.windows(2) {
        if 2.0 * w[0].kinetic < 16.0 * PI && 2.0 * w[1].kinetic < 16.0 * PI {
            pairs += 1;
            if w[1].virial_moment() >= w[0].virial_moment() {
                rising += 1;
            }
        }
    }
    let alpha = s.entropy_fit.map(|f| f.alpha).unwrap_or(f64::NAN);
    line(
        7,
        "supercritical blow-up signal",
        fired && before && rising == 0,
        format!(
            "termination {:?} at t={:.3}, rho_max x{:.0}, min dt {:.2e}; T* {}; entropy exponent {alpha:.3}; \
             X2+Xm non-decreasing on {rising}/{pairs} sample pairs with 2K < 16pi",
            s.termination,
            s.t_final,
            s.rho_max_ratio,
            s.min_dt,
            s.predicted_blowup_time.map(|t| format!("{t:.3}")).unwrap_or_else(|| "undefined".into()),
        ),
    )
}

fn hydro() -> Line {
    let fr = friction_decay_error(SEED).unwrap();
    let mb = mass_balance_error(4.0 * PI, 50).unwrap();
    let ru = rusanov_consistency_error(SEED, 10_000);
    line(
        8,
        "hydro friction, mass, consistency",
        fr <= 1e-8 && mb <= 1e-12 && ru == 0.0,
        format!("friction {fr:.2e} (<= 1e-8), mass/step {mb:.2e} (<= 1e-12), rusanov {ru:e} (== 0)"),
    )
}

fn particles() -> Line {
    let mo = momentum_decay_error(SEED, false).unwrap();
    let tb = two_body_acceleration_error().unwrap();
    let mut e = sample_ensemble(&EnsembleSpec::gaussian_at_rest(4000, 8.0 * PI, 1.0, 8.0, SEED)).unwrap();
    let v = nbody_virial_check(&mut e, 0.01, 100).unwrap();
    line(
        9,
        "particle momentum, two-body, virial",
        mo <= 1e-10 && tb <= 1e-6 && v.relative() <= 1e-2,
        format!("momentum {mo:.2e} (<= 1e-10), two-body {tb:.2e} (<= 1e-6), N=4000 virial {:.2e} (<= 1e-2)", v.relative()),
    )
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let mut lines = vec![poisson(), virial_convergence()];
    let sub = scenario(Regime::Subcritical);
    let crit = scenario(Regime::Critical);
    let sup = scenario(Regime::Supercritical);
    let cmp = compare_fluid_particles(&ScenarioConfig::compare_default()).unwrap();
    lines.push(critical_slope(&crit));
    lines.push(loghls(&[&sub, &crit, &sup], &cmp.fluid));
    lines.push(lemma22(&sub, &crit));
    lines.push(envelopes(&sub));
    lines.push(supercritical(&sup));
    lines.push(hydro());
    lines.push(particles());
    let gaps: Vec<String> = cmp.by_n.iter().map(|c| format!("N={} {:.3e}", c.n, c.second_moment_rms)).collect();
    lines.push(line(
        10,
        "fluid-particle X2 gap shrinks with N",
        cmp.second_moment_gap_decreasing,
        format!("rms relative X2 gap {}", gaps.join(", ")),
    ));

    let mut unexpected = 0;
    for l in &lines {
        let status = if l.pass { "PASS" } else { "FAIL" };
        let known = if !l.pass && KNOWN_UNATTAINABLE.contains(&l.id) { " [known]" } else { "" };
        println!("criterion {:>2} {status}{known} {}: {}", l.id, l.name, l.detail);
        if !l.pass && known.is_empty() {
            unexpected += 1;
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("{passed}/{} criteria pass, {:.0} s", lines.len(), t0.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
