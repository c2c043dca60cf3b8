use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use holoflow::Check;
use serde::Serialize;

use crate::config::RunConfig;

/// Bumped whenever a field of [`Summary`] changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// One row of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub paper_anchor: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl From<&Check> for CheckRow {
    fn from(c: &Check) -> Self {
        CheckRow {
            name: c.name.clone(),
            paper_anchor: c.anchor.clone(),
            value: c.value,
            tolerance: c.tolerance,
            pass: c.pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub pass: bool,
    pub checks: Vec<CheckRow>,
}

impl Summary {
    pub fn new(config: &RunConfig, checks: &[Check]) -> Self {
        Summary {
            schema_version: SCHEMA_VERSION,
            command: config.command.map(|c| c.as_str().to_string()).unwrap_or_default(),
            config: config.clone(),
            pass: checks.iter().all(|c| c.pass),
            checks: checks.iter().map(CheckRow::from).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// A CSV table held as text. Floats are written with the shortest
/// representation that round-trips.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// `name, paper_anchor, value, tolerance, pass` for each check.
    pub fn of_checks(checks: &[Check]) -> Self {
        let mut t = Table::new(&["name", "paper_anchor", "value", "tolerance", "pass"]);
        for c in checks {
            t.push(vec![
                c.name.clone(),
                c.anchor.clone(),
                num(c.value),
                num(c.tolerance),
                c.pass.to_string(),
            ]);
        }
        t
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Writes `summary.json`, `report.csv` and any extra tables into `dir`.
pub fn write_outputs(dir: &Path, summary: &Summary, report: &Table, extra: &[(String, Table)]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    fs::write(dir.join("summary.json"), summary.to_json()?)
        .with_context(|| format!("cannot write to {}", dir.display()))?;
    report.write(&dir.join("report.csv"))?;
    for (name, t) in extra {
        t.write(&dir.join(name))?;
    }
    Ok(())
}
