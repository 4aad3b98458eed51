// Copyright 2026 The Bunching Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Run reports: quantity rows with expectations, JSON and CSV output.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Match,
    Mismatch,
    /// No expected value was given.
    Unchecked,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Match => "MATCH",
            Status::Mismatch => "MISMATCH",
            Status::Unchecked => "-",
        }
    }
}

/// One reported quantity. Booleans are reported as `1` / `0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub quantity: String,
    pub value: f64,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    /// Where the expected value comes from: `claim` (a stated result being
    /// reproduced), `derived` (an independent computation), `definition`
    /// (immediate from a definition) or `scenario` (the scenario file).
    pub provenance: String,
    pub status: Status,
}

impl Row {
    fn check(&mut self) {
        self.status = match (self.expected, self.tolerance) {
            (Some(e), Some(t)) if (self.value - e).abs() <= t => Status::Match,
            (Some(_), _) => Status::Mismatch,
            (None, _) => Status::Unchecked,
        };
    }
}

/// Ordered list of rows plus the set of engine operations that produced them.
#[derive(Debug, Default, Clone)]
pub struct Rows {
    rows: Vec<Row>,
    operations: BTreeSet<&'static str>,
}

impl Rows {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn op(&mut self, name: &'static str) {
        self.operations.insert(name);
    }

    pub fn push(&mut self, quantity: impl Into<String>, value: f64) {
        self.rows.push(Row {
            quantity: quantity.into(),
            value,
            expected: None,
            tolerance: None,
            provenance: String::new(),
            status: Status::Unchecked,
        });
    }

    pub fn push_flag(&mut self, quantity: impl Into<String>, flag: bool) {
        self.push(quantity, if flag { 1.0 } else { 0.0 });
    }

    /// Pushes a row with an expected value and checks it.
    pub fn expect(&mut self, quantity: impl Into<String>, value: f64, expected: f64, tolerance: f64, provenance: &str) {
        let mut row = Row {
            quantity: quantity.into(),
            value,
            expected: Some(expected),
            tolerance: Some(tolerance),
            provenance: provenance.to_string(),
            status: Status::Unchecked,
        };
        row.check();
        self.rows.push(row);
    }

    /// Attaches an expectation to an existing row.
    pub fn set_expected(&mut self, quantity: &str, expected: f64, tolerance: f64, provenance: &str) -> Result<()> {
        let row = self
            .rows
            .iter_mut()
            .find(|r| r.quantity == quantity)
            .ok_or_else(|| Error::validation(format!("expectation names unknown quantity `{quantity}`")))?;
        row.expected = Some(expected);
        row.tolerance = Some(tolerance);
        row.provenance = provenance.to_string();
        row.check();
        Ok(())
    }

    /// Adds `delta` to a row's value and rechecks it. Used to inject faults.
    pub fn perturb(&mut self, quantity: &str, delta: f64) -> Result<()> {
        let row = self
            .rows
            .iter_mut()
            .find(|r| r.quantity == quantity)
            .ok_or_else(|| Error::validation(format!("no row named `{quantity}`")))?;
        row.value += delta;
        row.check();
        Ok(())
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn into_parts(self) -> (Vec<Row>, Vec<String>) {
        (self.rows, self.operations.into_iter().map(String::from).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunProvenance {
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: String,
    pub inputs: Value,
    pub results: Value,
    pub rows: Vec<Row>,
    /// Engine operations exercised by the run.
    pub operations: Vec<String>,
    pub provenance: RunProvenance,
}

impl RunReport {
    pub fn new(kind: &str, inputs: Value, results: Value, rows: Rows, seed: Option<u64>) -> Self {
        let (rows, operations) = rows.into_parts();
        Self {
            kind: kind.to_string(),
            inputs,
            results,
            rows,
            operations,
            provenance: RunProvenance {
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: chrono::Utc::now().to_rfc3339(),
            },
        }
    }

    /// No row failed its expectation.
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.status != Status::Mismatch)
    }

    pub fn row(&self, quantity: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One line per row: `quantity,value,expected,provenance,status`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["quantity", "value", "expected", "provenance", "status"]).map_err(io)?;
        for r in &self.rows {
            let expected = r.expected.map(|e| e.to_string()).unwrap_or_default();
            w.write_record([
                r.quantity.as_str(),
                &r.value.to_string(),
                &expected,
                &r.provenance,
                r.status.as_str(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl RunReport {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
