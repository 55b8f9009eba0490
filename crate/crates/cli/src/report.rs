use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// What every subcommand emits: a table plus free-form details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    #[serde(default)]
    pub details: Value,
    #[serde(default)]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            passed: true,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            details: Value::Null,
            error: None,
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Marks the report failed; the first message wins.
    pub fn fail(&mut self, msg: impl Into<String>) {
        self.passed = false;
        if self.error.is_none() {
            self.error = Some(msg.into());
        }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self).map_err(|e| CliError::Config(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(|e| CliError::Config(e.to_string()))?;
                for row in &self.rows {
                    w.write_record(row).map_err(|e| CliError::Config(e.to_string()))?;
                }
                w.into_inner().map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let bytes = self.render(format)?;
        match out {
            Some(p) => fs::write(p, bytes).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
            None => io::stdout().write_all(&bytes).map_err(|e| CliError::Config(e.to_string())),
        }
    }
}

/// Failures before a report could be produced.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, files or parameters; exit code 2.
    Config(String),
    /// A check ran and did not hold, or a search ran out of budget; exit code 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

pub fn config_err(e: impl fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}
