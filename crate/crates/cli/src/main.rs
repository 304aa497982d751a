use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ksfluid::functionals::Regime;
use ksfluid::harness::check::run_checks;
use ksfluid::harness::config::parse_number;
use ksfluid::harness::{compare_fluid_particles, run, sweep, MonitorStatus, ScenarioConfig, Termination};
use ksfluid::{Error, Result};

#[derive(Parser)]
#[command(name = "ksfluid", version, about = "Euler-Poisson fluid and particle experiments around the critical mass 8π")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write diagnostics, snapshots and a summary.
    Run(Overrides),
    /// Run the scenario once per mass in `sweep_masses`.
    Sweep(Overrides),
    /// Compare the fluid against particle ensembles of several sizes.
    Compare(Overrides),
    /// Run the quick oracle and property suite.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct Overrides {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Total mass; accepts forms like `8pi`. Also selects the regime.
    #[arg(long)]
    mass: Option<String>,
    /// Regime whose defaults are used when no config file is given.
    #[arg(long)]
    regime: Option<Regime>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    #[arg(long = "grid-L")]
    grid_l: Option<f64>,
    /// Any other config key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Overrides {
    /// `base` is the command's default scenario; `None` means the defaults of the
    /// selected regime, which is what `run` uses.
    fn resolve(&self, base: Option<ScenarioConfig>) -> Result<ScenarioConfig> {
        let mass = self.mass.as_deref().map(parse_number).transpose()?;
        let text = match &self.config {
            Some(path) => {
                Some(std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)
            }
            None => None,
        };
        let mut cfg = match (base, self.regime, &text) {
            (Some(b), None, Some(t)) => ScenarioConfig::parse_over(&b, t)?,
            (Some(b), None, None) => b,
            (_, Some(r), Some(t)) => ScenarioConfig::parse_over(&ScenarioConfig::for_regime(r), t)?,
            (_, Some(r), None) => ScenarioConfig::for_regime(r),
            (None, None, Some(t)) => ScenarioConfig::parse(t)?,
            (None, None, None) => ScenarioConfig::for_regime(mass.map(Regime::of_mass).unwrap_or(Regime::Subcritical)),
        };
        if let Some(m) = mass {
            cfg = cfg.with_mass(m);
        }
        if let Some(v) = self.t_end {
            cfg.t_end = v;
        }
        if let Some(v) = self.grid_n {
            cfg.n = v;
        }
        if let Some(v) = self.grid_l {
            cfg.half_width = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.out_dir = Some(v.clone());
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{kv}'")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run(o) => {
            let cfg = o.resolve(None)?;
            let out = run(&cfg)?;
            let s = &out.summary;
            println!(
                "{} M = {:.6} ({:.4}·8π) on n = {}, L = {}",
                s.regime,
                s.mass,
                s.mass / (8.0 * std::f64::consts::PI),
                s.n,
                s.half_width
            );
            println!("termination: {:?} at t = {:.6} after {} steps", s.termination, s.t_final, s.steps);
            if let Some(d) = &s.detail {
                println!("  {d}");
            }
            println!("rho_max growth {:.3e}, min dt {:.3e}", s.rho_max_ratio, s.min_dt);
            if let Some(v) = &s.virial {
                println!("virial residual {:.4e} (mass term {:.4e})", v.integrated, v.mass_term);
            }
            if let Some(f) = &s.entropy_fit {
                println!("entropy growth fit: alpha = {:.4}, C = {:.4e}", f.alpha, f.coeff);
            }
            if let Some(t) = s.predicted_blowup_time {
                println!("latest blow-up time from the bound: {t:.6}");
            }
            for m in &s.monitors {
                let slack = m.worst_slack.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into());
                let tol = m.worst_tolerance.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "-".into());
                let status = match m.status {
                    MonitorStatus::Pass => "pass",
                    MonitorStatus::Fail => "FAIL",
                    MonitorStatus::NotApplicable => "n/a",
                };
                print!("  {:<34} {status:<5} worst slack {slack:>12} tol {tol:>9}", m.name);
                match &m.note {
                    Some(n) => println!("  ({n})"),
                    None => println!(),
                }
            }
            for n in &s.notes {
                println!("note: {n}");
            }
            if let Some(d) = &cfg.out_dir {
                println!("wrote {}", d.display());
            }
            Ok(if s.termination == Termination::Error { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Sweep(o) => {
            let cfg = o.resolve(Some(ScenarioConfig::sweep_default()))?;
            let rows = sweep(&cfg)?;
            println!("{:>10} {:>8} {:>14} {:>16} {:>12} {:>12}  failed", "M/8π", "regime", "termination", "slope(V)", "predicted", "rho growth");
            for r in &rows {
                println!(
                    "{:>10.4} {:>8.8} {:>14} {:>16.6} {:>12.6} {:>12.3e}  {}",
                    r.mass_over_critical,
                    r.regime.to_string(),
                    format!("{:?}", r.termination),
                    r.initial_virial_slope,
                    r.predicted_slope,
                    r.rho_max_ratio,
                    r.failed_monitors.join(",")
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(o) => {
            let cfg = o.resolve(Some(ScenarioConfig::compare_default()))?;
            let rep = compare_fluid_particles(&cfg)?;
            println!("{} M = {:.6}, sigma = {}, t_end = {}", rep.regime, rep.mass, rep.sigma, rep.t_end);
            println!("{:>8} {:>9} {:>14} {:>14} {:>12} {:>12} {:>14}", "N", "replicas", "X2 gap rms", "X2 gap mean", "Xm gap rms", "K gap rms", "d(X2+Xm)");
            for c in &rep.by_n {
                println!(
                    "{:>8} {:>9} {:>14.4e} {:>14.4e} {:>12.4e} {:>12.4e} {:>14.6}",
                    c.n, c.replicas, c.second_moment_rms, c.second_moment_mean, c.cross_moment_rms, c.kinetic_rms, c.virial_change
                );
            }
            println!("fluid d(X2+Xm) = {:.6}", rep.fluid_virial_change);
            println!("X2 gap decreasing in N: {}", rep.second_moment_gap_decreasing);
            println!("virial trend sign agrees: {}", rep.virial_sign_agrees);
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { seed } => {
            let results = run_checks(seed)?;
            let mut ok = true;
            for r in &results {
                ok &= r.pass;
                println!("{} {:<36} {:.3e} (limit {:.1e})", if r.pass { "PASS" } else { "FAIL" }, r.name, r.value, r.limit);
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
