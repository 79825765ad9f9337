//! Run manifest and the CSV / JSON renderings of a result table.

use std::collections::BTreeMap;

use fracsub_core::problem::ProblemSpec;
use fracsub_core::QuadratureConfig;
use serde::{Deserialize, Serialize};

use crate::config::{Grid, SolverSection, SCHEMA_VERSION};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Propagation,
    Pdf,
    Fundamental,
    Eigenmodes,
    SolveLine,
    SolveInterval,
    Verify,
    Figure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemEntry {
    pub label: String,
    #[serde(flatten)]
    pub spec: ProblemSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputTarget {
    /// `None` for standard output.
    pub path: Option<String>,
    pub format: Format,
}

/// Everything needed to reproduce a run; embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub schema_version: u32,
    pub command: CommandName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<u8>,
    pub problems: Vec<ProblemEntry>,
    pub unsafe_allow_spread: bool,
    pub grids: BTreeMap<String, Grid>,
    pub quadrature: QuadratureConfig,
    pub solver: SolverSection,
    /// Command-specific settings (kernel kind, initial data, modes, …).
    pub parameters: BTreeMap<String, String>,
    pub output: OutputTarget,
}

impl RunManifest {
    pub fn new(command: CommandName, output: OutputTarget) -> Self {
        RunManifest {
            tool: format!("fracsub {}", env!("CARGO_PKG_VERSION")),
            schema_version: SCHEMA_VERSION,
            command,
            figure: None,
            problems: Vec::new(),
            unsafe_allow_spread: false,
            grids: BTreeMap::new(),
            quadrature: QuadratureConfig::default(),
            solver: SolverSection::default(),
            parameters: BTreeMap::new(),
            output,
        }
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Flag(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Number(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
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

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Number(v) if v.is_nan() => "nan".into(),
            Cell::Number(v) => format!("{v:.16e}"),
            Cell::Flag(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }
}

/// The payload of a run: a manifest, free-form notes and one table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub manifest: RunManifest,
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(manifest: RunManifest, columns: Vec<String>) -> Self {
        Document {
            manifest,
            notes: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.to_csv(),
        }
    }

    /// `#` comment lines (the manifest as one JSON line, then the notes),
    /// a header row and numbers with 17 significant digits.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let manifest = serde_json::to_string(&self.manifest).map_err(|e| CliError::Io(e.to_string()))?;
        let mut out = format!("# {}\n# manifest: {manifest}\n", self.manifest.tool);
        for note in &self.notes {
            out.push_str(&format!("# {note}\n"));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        writer.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let body = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| CliError::Io(e.to_string()))?);
        Ok(out)
    }
}
