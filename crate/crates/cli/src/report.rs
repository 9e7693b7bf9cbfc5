//! Report rows and the CSV writer.
//!
//! A report file is one `#`-prefixed JSON provenance line followed by a CSV
//! body. The body never contains the timestamp, so identical inputs give
//! byte-identical bodies; `body_sha256` in the header covers exactly the
//! body bytes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Columns that lead every row, before the experiment-specific ones.
pub const LEADING_COLUMNS: [&str; 4] = ["experiment", "field", "kappa", "extra_decay"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest round-trip representation; plain decimals in `[1e-4, 1e15)`,
/// scientific notation outside.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (a >= 1e-4 && a < 1e15) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    cells: BTreeMap<&'static str, Cell>,
    pub flag: Option<String>,
}

impl Row {
    pub fn new() -> Self {
        Row::default()
    }

    pub fn set(mut self, column: &'static str, value: impl Into<Cell>) -> Self {
        self.cells.insert(column, value.into());
        self
    }

    pub fn maybe(self, column: &'static str, value: Option<f64>) -> Self {
        match value {
            Some(v) => self.set(column, v),
            None => self,
        }
    }

    pub fn flagged(mut self, flag: impl Into<String>) -> Self {
        self.add_flag(flag);
        self
    }

    /// Appends to the flag, `;`-separated.
    pub fn add_flag(&mut self, flag: impl Into<String>) {
        let flag = flag.into();
        self.flag = Some(match self.flag.take() {
            Some(f) => format!("{f};{flag}"),
            None => flag,
        });
    }

    pub fn get(&self, column: &str) -> Option<&Cell> {
        self.cells.get(column)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: &'static str,
    pub field: String,
    pub kappa: Option<f64>,
    pub extra_decay: Option<f64>,
    /// Experiment columns, in output order.
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

impl Report {
    pub fn new(experiment: &'static str, columns: &[&'static str]) -> Self {
        Report {
            experiment,
            field: String::new(),
            kappa: None,
            extra_decay: None,
            columns: columns.to_vec(),
            rows: Vec::new(),
            assertions: Vec::new(),
            notes: Vec::new(),
            error: None,
        }
    }

    pub fn assert(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn flagged_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.flag.is_some()).count()
    }

    pub fn assertions_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    /// The CSV body: header row, then one line per row.
    pub fn body(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = LEADING_COLUMNS
            .iter()
            .chain(&self.columns)
            .copied()
            .chain(["flag"])
            .collect();
        w.write_record(&header).expect("in-memory write");
        let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
        for row in &self.rows {
            debug_assert!(row.cells.keys().all(|k| self.columns.contains(k)), "{:?}", row.cells.keys());
            let mut rec = vec![
                self.experiment.to_string(),
                self.field.clone(),
                opt(self.kappa),
                opt(self.extra_decay),
            ];
            rec.extend(self.columns.iter().map(|c| row.cells.get(c).map(Cell::render).unwrap_or_default()));
            rec.push(row.flag.clone().unwrap_or_default());
            w.write_record(&rec).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Everything in the header line besides the report itself.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub timestamp: String,
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'a str,
    field: &'a str,
    config_hash: &'a str,
    seed: u64,
    timestamp: &'a str,
    body_sha256: String,
    rows: usize,
    flagged: usize,
    assertions: &'a [Assertion],
    notes: &'a [String],
    error: Option<&'a str>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Renders the full file: provenance line and body.
pub fn render(report: &Report, prov: &Provenance) -> Vec<u8> {
    let body = report.body();
    let header = Header {
        tool: "gaugelab",
        version: env!("CARGO_PKG_VERSION"),
        experiment: report.experiment,
        field: &report.field,
        config_hash: &prov.config_hash,
        seed: prov.seed,
        timestamp: &prov.timestamp,
        body_sha256: sha256_hex(&body),
        rows: report.rows.len(),
        flagged: report.flagged_rows(),
        assertions: &report.assertions,
        notes: &report.notes,
        error: report.error.as_deref(),
    };
    let mut out = Vec::with_capacity(body.len() + 512);
    out.extend_from_slice(b"# ");
    serde_json::to_writer(&mut out, &header).expect("header serializes");
    out.push(b'\n');
    out.extend_from_slice(&body);
    out
}

pub fn write_report(path: &Path, report: &Report, prov: &Provenance) -> std::io::Result<()> {
    let bytes = render(report, prov);
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    f.sync_all()
}

/// Splits a report file into its parsed header and the body bytes.
pub fn split_report(bytes: &[u8]) -> Option<(serde_json::Value, &[u8])> {
    let nl = bytes.iter().position(|&b| b == b'\n')?;
    let line = bytes[..nl].strip_prefix(b"# ")?;
    let header = serde_json::from_slice(line).ok()?;
    Some((header, &bytes[nl + 1..]))
}
