//! Experiment reports and their CSV and JSON files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::autogrid::GridChoice;
use crate::config::SPEC_VERSION;
use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub spec_version: &'static str,
    pub experiment: String,
    pub model: String,
    pub seed: u64,
    pub samples: u64,
    pub grid: Option<GridChoice>,
}

impl Provenance {
    pub fn new(experiment: &str, model: String, seed: u64, samples: u64) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            spec_version: SPEC_VERSION,
            experiment: experiment.to_string(),
            model,
            seed,
            samples,
            grid: None,
        }
    }
}

/// Result of one experiment. The JSON summary carries every field; the CSV
/// carries `rows`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report<R> {
    #[serde(rename = "fitted_C")]
    pub fitted_c: Option<f64>,
    pub pass: bool,
    pub ceiling: f64,
    pub rows: Vec<R>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl<R: Serialize> Report<R> {
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.into_inner()
            .map_err(|e| HarnessError::io("csv buffer", std::io::Error::other(e.to_string())))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        fs::write(&csv_path, self.to_csv()?).map_err(|e| HarnessError::io(&csv_path, e))?;
        fs::write(&json_path, self.to_json()?).map_err(|e| HarnessError::io(&json_path, e))?;
        Ok(vec![csv_path, json_path])
    }
}
