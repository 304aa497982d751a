//! Scenario configuration and its flat `key = value` file format.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' anything
//! entry   := key '=' value [comment]
//! value   := number | number 'pi' | word | list
//! list    := value (',' value)*
//! ```
//!
//! Keys are case-sensitive; unknown or repeated keys are errors. `mass = 4pi` means
//! `4π`. See [`ScenarioConfig::KEYS`] for the accepted keys.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{MonitorTolerance, Regime};
use crate::hydro::Limiter;
use crate::poisson::Method;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub regime: Regime,
    pub mass: f64,
    pub half_width: f64,
    pub n: usize,
    pub sigma: f64,
    pub center: [f64; 2],
    pub velocity: [f64; 2],
    pub cfl: f64,
    pub t_end: f64,
    pub sample_interval: f64,
    pub dt_min: f64,
    pub limiter: Limiter,
    pub solver: Method,
    pub snapshot_times: Vec<f64>,
    pub monitor: MonitorTolerance,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
    pub particles: bool,
    pub particles_n: usize,
    pub particle_dt: f64,
    pub tau: f64,
    /// Variance of each initial particle velocity component.
    pub particle_temperature: f64,
    /// Temperature of the particle heat bath (0 = plain friction).
    pub bath_temperature: f64,
    pub replicas: usize,
    /// Particle counts for `compare`.
    pub compare_n: Vec<usize>,
    /// Masses for `sweep`.
    pub sweep_masses: Vec<f64>,
}

impl ScenarioConfig {
    pub const KEYS: &'static [&'static str] = &[
        "regime",
        "mass",
        "L",
        "n",
        "sigma",
        "center",
        "velocity",
        "cfl",
        "t_end",
        "sample_interval",
        "dt_min",
        "limiter",
        "solver",
        "snapshot_times",
        "monitor_a",
        "monitor_b",
        "out",
        "seed",
        "particles",
        "particles_n",
        "particle_dt",
        "tau",
        "particle_temperature",
        "bath_temperature",
        "replicas",
        "compare_n",
        "sweep_masses",
    ];

    /// Defaults for one regime: rest Gaussian with `σ = 1` and the regime's mass.
    pub fn for_regime(regime: Regime) -> Self {
        let (half_width, n, t_end) = match regime {
            Regime::Subcritical => (12.0, 192, 5.0),
            Regime::Critical => (8.0, 128, 5.0),
            Regime::Supercritical => (5.0, 256, 3.0),
        };
        Self {
            regime,
            mass: regime.default_mass(),
            half_width,
            n,
            sigma: 1.0,
            center: [0.0, 0.0],
            velocity: [0.0, 0.0],
            cfl: 0.4,
            t_end,
            sample_interval: 0.05,
            dt_min: 1e-10,
            limiter: Limiter::Mc,
            solver: Method::Fft,
            snapshot_times: Vec::new(),
            monitor: MonitorTolerance::default(),
            out_dir: None,
            seed: 0,
            particles: false,
            particles_n: 4000,
            particle_dt: 0.05,
            tau: 1.0,
            particle_temperature: 1.0,
            bath_temperature: 1.0,
            replicas: 16,
            compare_n: vec![1000, 4000, 16000],
            sweep_masses: [4.0, 6.0, 8.0, 10.0, 12.0].iter().map(|k| k * PI).collect(),
        }
    }

    /// The matched fluid/particle scenario: subcritical rest Gaussian, `σ = 2`, `t = 0.5`.
    pub fn compare_default() -> Self {
        Self {
            half_width: 12.0,
            n: 256,
            sigma: 2.0,
            t_end: 0.5,
            sample_interval: 0.1,
            particles: true,
            ..Self::for_regime(Regime::Subcritical)
        }
    }

    /// Defaults for `sweep`: a short run on a moderate grid for each mass.
    pub fn sweep_default() -> Self {
        Self { half_width: 8.0, n: 128, t_end: 1.0, ..Self::for_regime(Regime::Subcritical) }
    }

    /// Applies a config file on top of `base`. A `mass` without `regime` moves the
    /// regime to the one of the new mass.
    pub fn parse_over(base: &Self, text: &str) -> Result<Self> {
        let entries = parse_entries(text)?;
        let mut cfg = base.clone();
        let has = |k: &str| entries.iter().any(|(key, _, _)| key == k);
        for (key, value, line) in &entries {
            cfg.set(key, value).map_err(|e| at(*line, e))?;
        }
        if has("mass") && !has("regime") {
            cfg.regime = Regime::of_mass(cfg.mass);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets the mass and the matching regime.
    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self.regime = Regime::of_mass(mass);
        self
    }

    /// Reads a config file starting from the defaults of its regime (or of the regime
    /// of its mass, or subcritical).
    pub fn parse(text: &str) -> Result<Self> {
        let entries = parse_entries(text)?;
        let get = |k: &str| entries.iter().find(|(key, _, _)| key == k);
        let regime = match get("regime") {
            Some((_, v, line)) => Some(v.parse::<Regime>().map_err(|e| at(*line, e))?),
            None => None,
        };
        let mass = match get("mass") {
            Some((_, v, line)) => Some(parse_number(v).map_err(|e| at(*line, e))?),
            None => None,
        };
        let regime = match (regime, mass) {
            (Some(r), _) => r,
            (None, Some(m)) => Regime::of_mass(m),
            (None, None) => Regime::Subcritical,
        };
        let mut cfg = Self::for_regime(regime);
        if let Some(m) = mass {
            cfg.mass = m;
        }
        for (key, value, line) in &entries {
            cfg.set(key, value).map_err(|e| at(*line, e))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "regime" => self.regime = v.parse()?,
            "mass" => self.mass = parse_number(v)?,
            "L" => self.half_width = parse_number(v)?,
            "n" => self.n = parse_count(v)?,
            "sigma" => self.sigma = parse_number(v)?,
            "center" => self.center = parse_pair(v)?,
            "velocity" => self.velocity = parse_pair(v)?,
            "cfl" => self.cfl = parse_number(v)?,
            "t_end" => self.t_end = parse_number(v)?,
            "sample_interval" => self.sample_interval = parse_number(v)?,
            "dt_min" => self.dt_min = parse_number(v)?,
            "limiter" => self.limiter = v.parse()?,
            "solver" => self.solver = v.parse()?,
            "snapshot_times" => self.snapshot_times = parse_list(v, parse_number)?,
            "monitor_a" => self.monitor.a = parse_number(v)?,
            "monitor_b" => self.monitor.b = parse_number(v)?,
            "out" => self.out_dir = Some(PathBuf::from(v)),
            "seed" => self.seed = v.parse().map_err(|_| Error::Config(format!("bad seed '{v}'")))?,
            "particles" => self.particles = parse_bool(v)?,
            "particles_n" => self.particles_n = parse_count(v)?,
            "particle_dt" => self.particle_dt = parse_number(v)?,
            "tau" => self.tau = parse_number(v)?,
            "particle_temperature" => self.particle_temperature = parse_number(v)?,
            "bath_temperature" => self.bath_temperature = parse_number(v)?,
            "replicas" => self.replicas = parse_count(v)?,
            "compare_n" => self.compare_n = parse_list(v, parse_count)?,
            "sweep_masses" => self.sweep_masses = parse_list(v, parse_number)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.mass) {
            return bad(format!("mass must be positive, got {}", self.mass));
        }
        if Regime::of_mass(self.mass) != self.regime {
            return bad(format!(
                "regime {} is inconsistent with M = {} (M/8π = {})",
                self.regime,
                self.mass,
                self.mass / (8.0 * PI)
            ));
        }
        for (name, v) in [
            ("L", self.half_width),
            ("sigma", self.sigma),
            ("t_end", self.t_end),
            ("sample_interval", self.sample_interval),
            ("dt_min", self.dt_min),
            ("particle_dt", self.particle_dt),
            ("tau", self.tau),
        ] {
            if !positive(v) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return bad(format!("cfl must lie in (0, 0.9], got {}", self.cfl));
        }
        if self.n < 8 || !self.n.is_multiple_of(2) {
            return bad(format!("n must be even and at least 8, got {}", self.n));
        }
        if !(self.center.iter().chain(&self.velocity).all(|v| v.is_finite())) {
            return bad("center and velocity must be finite".into());
        }
        if !(self.monitor.a >= 0.0 && self.monitor.b >= 0.0) {
            return bad("monitor tolerances must be nonnegative".into());
        }
        if !(self.particle_temperature >= 0.0 && self.bath_temperature >= 0.0) {
            return bad("temperatures must be nonnegative".into());
        }
        if self.particle_dt > 0.1 * self.tau {
            return bad(format!("particle_dt must not exceed 0.1·tau = {}", 0.1 * self.tau));
        }
        if self.particles_n < 2 || self.compare_n.iter().any(|&n| n < 4 || n % 4 != 0) {
            return bad("particle counts must be at least 4 and divisible by 4".into());
        }
        if !self.particles_n.is_multiple_of(4) {
            return bad(format!("particles_n must be divisible by 4, got {}", self.particles_n));
        }
        if self.replicas == 0 {
            return bad("replicas must be at least 1".into());
        }
        if self.snapshot_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return bad("snapshot times must be nonnegative".into());
        }
        if self.sweep_masses.iter().any(|m| !positive(*m)) {
            return bad("sweep masses must be positive".into());
        }
        Ok(())
    }

    /// The configuration as a `key = value` file that [`ScenarioConfig::parse`] reads back.
    pub fn to_config_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let mut put = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        put("regime", self.regime.to_string());
        put("mass", format!("{:?}", self.mass));
        put("L", format!("{:?}", self.half_width));
        put("n", self.n.to_string());
        put("sigma", format!("{:?}", self.sigma));
        put("center", list(&self.center));
        put("velocity", list(&self.velocity));
        put("cfl", format!("{:?}", self.cfl));
        put("t_end", format!("{:?}", self.t_end));
        put("sample_interval", format!("{:?}", self.sample_interval));
        put("dt_min", format!("{:?}", self.dt_min));
        put("limiter", self.limiter.to_string());
        put("solver", self.solver.to_string());
        if !self.snapshot_times.is_empty() {
            put("snapshot_times", list(&self.snapshot_times));
        }
        put("monitor_a", format!("{:?}", self.monitor.a));
        put("monitor_b", format!("{:?}", self.monitor.b));
        if let Some(o) = &self.out_dir {
            put("out", o.display().to_string());
        }
        put("seed", self.seed.to_string());
        put("particles", self.particles.to_string());
        put("particles_n", self.particles_n.to_string());
        put("particle_dt", format!("{:?}", self.particle_dt));
        put("tau", format!("{:?}", self.tau));
        put("particle_temperature", format!("{:?}", self.particle_temperature));
        put("bath_temperature", format!("{:?}", self.bath_temperature));
        put("replicas", self.replicas.to_string());
        put("compare_n", self.compare_n.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "));
        put("sweep_masses", list(&self.sweep_masses));
        s
    }
}

fn at(line: usize, e: Error) -> Error {
    Error::Config(format!("line {line}: {}", e.to_string().trim_start_matches("configuration error: ")))
}

/// `(key, value, line number)` triples in file order.
fn parse_entries(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut out: Vec<(String, String, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line}: expected 'key = value', got '{body}'")))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config(format!("line {line}: empty key or value")));
        }
        if !ScenarioConfig::KEYS.contains(&key) {
            return Err(Error::Config(format!("line {line}: unknown key '{key}'")));
        }
        if let Some((_, _, first)) = out.iter().find(|(k2, _, _)| k2 == key) {
            return Err(Error::Config(format!("line {line}: key '{key}' already set on line {first}")));
        }
        out.push((key.to_string(), value.to_string(), line));
    }
    Ok(out)
}

/// A float, optionally followed by `pi` (`8pi`, `0.5 pi`, `pi`).
pub fn parse_number(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::Config(format!("expected a number, got '{s}'"));
    let v = if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let k = if head.is_empty() { 1.0 } else { head.parse::<f64>().map_err(|_| bad())? };
        k * PI
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_count(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("expected a nonnegative integer, got '{s}'")))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!("expected on/off, got '{other}'"))),
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(item).collect()
}

fn parse_pair(s: &str) -> Result<[f64; 2]> {
    let v = parse_list(s, parse_number)?;
    v.try_into().map_err(|_| Error::Config(format!("expected two numbers, got '{s}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_pi() {
        let cfg = ScenarioConfig::parse("# header\nmass = 8pi  # critical\n\nn = 64\nL=6\n").unwrap();
        assert_eq!(cfg.regime, Regime::Critical);
        assert!((cfg.mass - 8.0 * PI).abs() < 1e-15);
        assert_eq!((cfg.n, cfg.half_width), (64, 6.0));
    }

    #[test]
    fn rejects_unknown_duplicate_and_inconsistent() {
        assert!(ScenarioConfig::parse("colour = red").is_err());
        assert!(ScenarioConfig::parse("n = 64\nn = 32").is_err());
        assert!(ScenarioConfig::parse("regime = subcritical\nmass = 16pi").is_err());
        assert!(ScenarioConfig::parse("n = 63").is_err());
        assert!(ScenarioConfig::parse("just words").is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ScenarioConfig::for_regime(Regime::Supercritical);
        cfg.snapshot_times = vec![0.5, 1.0];
        cfg.out_dir = Some("runs/a".into());
        assert_eq!(ScenarioConfig::parse(&cfg.to_config_text()).unwrap(), cfg);
    }

    #[test]
    fn parse_over_keeps_base() {
        let base = ScenarioConfig::compare_default();
        let cfg = ScenarioConfig::parse_over(&base, "replicas = 2\nmass = 16pi\n").unwrap();
        assert_eq!((cfg.sigma, cfg.replicas, cfg.regime), (2.0, 2, Regime::Supercritical));
    }

    #[test]
    fn number_forms() {
        assert_eq!(parse_number("pi").unwrap(), PI);
        assert_eq!(parse_number("0.5 pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_number("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_number("1e-3").unwrap(), 1e-3);
        assert!(parse_number("nan").is_err());
    }
}
