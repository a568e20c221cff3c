//! Run artefacts: `energy_curve.csv`, `bounds.csv` and `summary.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

/// One row of `energy_curve.csv`. `stderr` is the standard error of
/// `log_energy`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub lambda: f64,
    pub t: f64,
    pub p: f64,
    pub log_energy: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// One row of `bounds.csv`; `measured`, `bound` and `slack` are natural
/// logs of second moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub lambda: f64,
    pub t: f64,
    pub check_name: String,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub log_energy: f64,
    pub log_stderr: f64,
    /// `log E F` of the moment behind the energy
    pub log_moment: f64,
    /// standard error of the moment over the moment
    pub rel_stderr: f64,
    pub samples: usize,
    /// closed-form value where one exists
    pub reference_log_energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSummary {
    pub slopes: Vec<f64>,
    pub window_start: usize,
    pub window_end: usize,
    pub lower: f64,
    pub upper: f64,
    pub increasing: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketPoint {
    pub lambda: f64,
    pub log_energy_lower: f64,
    pub log_energy_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub anchor: String,
    pub version: String,
    pub config: RunConfig,
    pub curve: Vec<CurvePoint>,
    pub index: Option<IndexSummary>,
    pub notes: Vec<String>,
    pub bounds: BoundSummary,
    pub bracket: Option<Vec<BracketPoint>>,
    pub diagnostics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub curve_rows: Vec<CurveRow>,
    pub bound_rows: Vec<BoundRow>,
}

impl RunOutput {
    pub fn all_bounds_pass(&self) -> bool {
        self.bound_rows.iter().all(|r| r.pass)
    }

    /// Writes the three artefacts into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        write_csv(&dir.join("energy_curve.csv"), &self.curve_rows, CURVE_HEADER)?;
        write_csv(&dir.join("bounds.csv"), &self.bound_rows, BOUNDS_HEADER)?;
        let mut json = serde_json::to_string_pretty(&self.summary)?;
        json.push('\n');
        fs::write(dir.join("summary.json"), json)?;
        Ok(())
    }
}

pub const CURVE_HEADER: &[&str] = &["lambda", "t", "p", "log_energy", "stderr", "samples"];
pub const BOUNDS_HEADER: &[&str] = &["lambda", "t", "check_name", "measured", "bound", "slack", "pass"];

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    // explicit header so empty files still carry it
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
