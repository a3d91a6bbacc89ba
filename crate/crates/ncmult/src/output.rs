//! Result tables, checks and the on-disk layout of a run.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Fixed float formatting so reruns are byte-identical.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        format!("{x}")
    }
}

pub fn mark(ok: bool) -> String {
    if ok { "pass" } else { "FAIL" }.to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    /// Values of one column, by header name.
    pub fn column(&self, header: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| h == header)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }
}

/// A named acceptance condition. Soft checks are reported but never fail a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub hard: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    /// Extra text files (name, contents), such as polygons and rectangle lists.
    pub artifacts: Vec<(String, String)>,
}

impl Outcome {
    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), pass, hard: true, detail });
    }

    pub fn soft(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), pass, hard: false, detail });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.hard)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.hard && !c.pass).collect()
    }

    pub fn find(&self, table: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == table)
    }
}

/// Writes every table as `<name>.csv` and a `manifest.txt` with the resolved
/// configuration and check results. Returns the written paths.
pub fn write_run(dir: &Path, manifest: &str, outcome: &Outcome) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in &outcome.tables {
        let p = dir.join(format!("{}.csv", t.name));
        t.write_csv(&p)?;
        written.push(p);
    }
    for (name, text) in &outcome.artifacts {
        let p = dir.join(name);
        fs::write(&p, text)?;
        written.push(p);
    }
    let p = dir.join("manifest.txt");
    fs::write(&p, manifest)?;
    written.push(p);
    Ok(written)
}
