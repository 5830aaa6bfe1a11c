//! Run reports: JSON is canonical, CSV is a flat projection of the
//! quantity table.

use std::collections::BTreeMap;
use std::io::Write;

use holonomy_core::{canonicalize_phase, phase_distance, GeometricPhase};
use serde::Serialize;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One computed number. `canonical` is set only for phases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    pub raw: f64,
    pub canonical: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl Quantity {
    pub fn phase(name: &str, raw: f64, canonical: GeometricPhase) -> Self {
        Self {
            name: name.to_owned(),
            raw,
            canonical: Some(canonical.value()),
            tolerance: None,
            pass: None,
        }
    }

    pub fn scalar(name: &str, raw: f64) -> Self {
        Self {
            name: name.to_owned(),
            raw,
            canonical: None,
            tolerance: None,
            pass: None,
        }
    }

    /// Attaches a check `|value − expected| ≤ tolerance`, where `value` is the
    /// canonical phase (distance taken mod 2π) or the raw scalar.
    pub fn expect(mut self, expected: f64, tolerance: f64) -> Self {
        let error = match self.canonical {
            Some(c) => {
                let to_phase = |x: f64| canonicalize_phase(x).unwrap_or(GeometricPhase::ZERO);
                phase_distance(to_phase(c), to_phase(expected))
            }
            None => (self.raw - expected).abs(),
        };
        self.tolerance = Some(tolerance);
        self.pass = Some(error <= tolerance);
        self
    }

    /// Attaches a one-sided check `raw ≤ bound`.
    pub fn at_most(mut self, bound: f64) -> Self {
        self.tolerance = Some(bound);
        self.pass = Some(self.raw.abs() <= bound);
        self
    }
}

/// Closure behavior of a section carried once around its circuit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub name: String,
    pub closure_phase: f64,
    pub single_valued: bool,
    pub sign_flip: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub statistics: String,
    pub theta: f64,
    pub circulation_phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Topology {
    pub winding_number: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub phase: f64,
    pub abs_error: f64,
}

/// Field order here is the key order of the JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub toolkit_version: String,
    pub inputs: BTreeMap<String, String>,
    pub quantities: Vec<Quantity>,
    pub audits: Vec<AuditEntry>,
    pub topology: Option<Topology>,
    pub classification: Option<Classification>,
    pub convergence: Vec<ConvergenceRow>,
    pub wall_time_seconds: f64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            toolkit_version: TOOLKIT_VERSION.to_owned(),
            inputs: BTreeMap::new(),
            quantities: Vec::new(),
            audits: Vec::new(),
            topology: None,
            classification: None,
            convergence: Vec::new(),
            wall_time_seconds: 0.0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.to_owned(), value.to_string());
    }

    pub fn quantity(&self, name: &str) -> Option<&Quantity> {
        self.quantities.iter().find(|q| q.name == name)
    }

    pub fn audit(&self, name: &str) -> Option<&AuditEntry> {
        self.audits.iter().find(|a| a.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are always serializable")
    }

    pub fn write_json(&self, mut out: impl Write) -> std::io::Result<()> {
        out.write_all(self.to_json().as_bytes())?;
        out.write_all(b"\n")
    }

    /// Columns `quantity, raw, canonical, tolerance, pass`; absent values are
    /// empty cells.
    pub fn write_csv(&self, out: impl Write) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["quantity", "raw", "canonical", "tolerance", "pass"])?;
        for q in &self.quantities {
            w.serialize((&q.name, q.raw, q.canonical, q.tolerance, q.pass))?;
        }
        w.flush()?;
        Ok(())
    }
}
