//! Files written by a run.
//!
//! `diagnostics.csv` starts with one schema line and a header:
//!
//! ```text
//! # schema=ksfluid-diagnostics/1
//! t,dt,mass,second_moment,...,slack_lemma22_moment,...
//! ```
//!
//! followed by one row per sample. Floats use the shortest representation that reads
//! back to the same `f64`. A slack column is empty where its monitor does not apply.
//! `summary.json` is a pretty-printed [`RunSummary`](super::RunSummary) whose
//! `schema` field is `ksfluid-summary/1`; non-finite numbers appear as `null`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{virial_rhs, DiagnosticsRecord, MonitorSlack};
use crate::particles::ParticleMoments;

pub const DIAGNOSTICS_SCHEMA: &str = "ksfluid-diagnostics/1";
pub const PARTICLE_SCHEMA: &str = "ksfluid-particle-moments/1";
pub const SUMMARY_SCHEMA: &str = "ksfluid-summary/1";

pub const DIAGNOSTICS_COLUMNS: &[&str] = &[
    "t",
    "dt",
    "mass",
    "second_moment",
    "cross_moment",
    "kinetic",
    "entropy",
    "interaction",
    "dissipation",
    "loghls",
    "rho_max",
    "free_energy",
    "total_energy",
    "virial_moment",
    "virial_rhs",
];

/// Row writer that flushes after every sample, so a failed run leaves a readable prefix.
pub struct DiagnosticsWriter {
    out: BufWriter<File>,
    monitors: Vec<&'static str>,
}

impl DiagnosticsWriter {
    pub fn create(path: &Path, monitors: &[&'static str]) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path).map_err(|e| io_context(path, e))?);
        writeln!(out, "# schema={DIAGNOSTICS_SCHEMA}")?;
        let mut header: Vec<String> = DIAGNOSTICS_COLUMNS.iter().map(|c| c.to_string()).collect();
        header.extend(monitors.iter().map(|m| format!("slack_{m}")));
        writeln!(out, "{}", header.join(","))?;
        out.flush()?;
        Ok(Self { out, monitors: monitors.to_vec() })
    }

    pub fn row(&mut self, r: &DiagnosticsRecord, slacks: &[MonitorSlack]) -> Result<()> {
        let mut cells: Vec<String> = [
            r.t,
            r.dt,
            r.mass,
            r.second_moment,
            r.cross_moment,
            r.kinetic,
            r.entropy,
            r.interaction,
            r.dissipation,
            r.loghls,
            r.rho_max,
            r.free_energy(),
            r.total_energy(),
            r.virial_moment(),
            virial_rhs(r.mass, r.kinetic),
        ]
        .iter()
        .map(|v| num(*v))
        .collect();
        for name in &self.monitors {
            cells.push(slacks.iter().find(|s| s.name == *name).map(|s| num(s.slack)).unwrap_or_default());
        }
        writeln!(self.out, "{}", cells.join(","))?;
        self.out.flush()?;
        Ok(())
    }
}

pub struct ParticleMomentsWriter {
    out: BufWriter<File>,
}

impl ParticleMomentsWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path).map_err(|e| io_context(path, e))?);
        writeln!(out, "# schema={PARTICLE_SCHEMA}")?;
        writeln!(out, "t,mass,second_moment,cross_moment,kinetic,virial_moment")?;
        out.flush()?;
        Ok(Self { out })
    }

    pub fn row(&mut self, m: &ParticleMoments) -> Result<()> {
        let cells = [m.t, m.mass, m.second_moment, m.cross_moment, m.kinetic, m.virial_moment()];
        writeln!(self.out, "{}", cells.map(num).join(","))?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| io_context(path, e))
}

pub fn io_context(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Reads a diagnostics file back as `(header, rows)`; empty cells become NaN.
pub fn read_diagnostics(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l == format!("# schema={DIAGNOSTICS_SCHEMA}") => {}
        other => return Err(Error::Format(format!("missing diagnostics schema line, found {other:?}"))),
    }
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Format("missing header".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|c| if c.is_empty() { Ok(f64::NAN) } else { c.parse::<f64>() })
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("row {}: {e}", k + 1)))?;
        if row.len() != header.len() {
            return Err(Error::Format(format!("row {} has {} cells, header has {}", k + 1, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
