use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::Command;

/// Bumped whenever a report field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to re-run a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub command: Command,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// Name of the violated inequality or check, e.g. `sandwich-lower`.
    pub tag: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub run_config: RunConfig,
    /// Seconds since the Unix epoch; the only field a replay may change.
    pub timestamp: u64,
    pub verification: Verification,
    pub result: Value,
}

/// A tabular section mirrored to CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// What a command produced, before it is wrapped into a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn new(run_config: RunConfig, outcome: &Outcome) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Report {
            schema_version: SCHEMA_VERSION,
            run_config,
            timestamp,
            verification: Verification { passed: outcome.failures.is_empty(), failures: outcome.failures.clone() },
            result: outcome.result.clone(),
        }
    }
}

pub fn csv_path(json: &Path) -> PathBuf {
    json.with_extension("csv")
}

/// Writes the report to `out` (and its CSV mirror), or to stdout.
pub fn emit(report: &Report, table: Option<&Table>, out: Option<&Path>) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    text.push('\n');
    match out {
        Some(path) => {
            fs::write(path, text)?;
            if let Some(t) = table {
                let mut w = csv::Writer::from_path(csv_path(path))?;
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
                w.flush()?;
            }
            Ok(())
        }
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
