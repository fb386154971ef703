use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of one named check. `pass` holds exactly when
/// `max_residual ≤ tolerance`; a check whose evaluation errored reports an
/// infinite residual and the error text.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub anchor: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Not serialized, so that reports are reproducible byte for byte.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl CheckReport {
    pub fn new(name: &str, anchor: &str, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            anchor: anchor.to_string(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            values: BTreeMap::new(),
            error: None,
            wall_time_s: 0.0,
        }
    }

    pub fn failed(name: &str, anchor: &str, tolerance: f64, err: &Error) -> Self {
        let mut r = Self::new(name, anchor, 0, f64::INFINITY, tolerance);
        r.error = Some(err.to_string());
        r
    }

    pub fn with_value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }
}

/// A plot-ready table written as `convergence_<name>.csv`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// All reports and tables of one run, in a fixed order.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub reports: Vec<CheckReport>,
    pub tables: Vec<Table>,
}

impl RunOutput {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn report(&self, name: &str) -> Option<&CheckReport> {
        self.reports.iter().find(|r| r.name == name)
    }

    pub fn jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.reports {
            let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
            out.push_str(&line);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            let _ = writeln!(
                out,
                "{} {:<36} residual {:>10.3e}  tol {:>8.1e}  n={:<4} {:>7.2}s  [{}]",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.max_residual,
                r.tolerance,
                r.samples,
                r.wall_time_s,
                r.anchor
            );
            for (k, v) in &r.values {
                let _ = writeln!(out, "     {k} = {v:.15e}");
            }
            if let Some(e) = &r.error {
                let _ = writeln!(out, "     error: {e}");
            }
        }
        let passed = self.reports.iter().filter(|r| r.pass).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.reports.len());
        out
    }

    /// Writes `report.jsonl`, `summary.txt` and one CSV per table.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("report.jsonl"), self.jsonl()?).map_err(io)?;
        fs::write(dir.join("summary.txt"), self.summary()).map_err(io)?;
        for t in &self.tables {
            let path = dir.join(format!("convergence_{}.csv", t.name));
            let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Io(e.to_string()))?;
            w.write_record(&t.header).map_err(|e| Error::Io(e.to_string()))?;
            for row in &t.rows {
                w.write_record(row).map_err(|e| Error::Io(e.to_string()))?;
            }
            w.flush().map_err(io)?;
        }
        Ok(())
    }
}
