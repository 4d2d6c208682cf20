use std::fs;
use std::path::Path;

use serde::Serialize;

use super::ExperimentConfig;
use crate::error::{Error, Result};

/// Tabular result of an experiment plus its JSON summary.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub columns: Vec<String>,
    /// Units of the columns, written into the CSV preamble.
    pub units: String,
    pub rows: Vec<Vec<String>>,
    pub summary: serde_json::Value,
    /// Whether the run met its acceptance threshold; `None` if it has none.
    pub passed: Option<bool>,
    pub warnings: Vec<String>,
}

impl ExperimentOutput {
    /// CSV text: a `#` line with the config hash and units, then the header
    /// and one row per record.
    pub fn to_csv(&self, config_hash: &str) -> Result<String> {
        let mut out = format!("# config_hash={config_hash}; units: {}\n", self.units);
        let mut writer = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::invalid(format!("csv: {e}"));
        writer.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            writer.write_record(row).map_err(csv_err)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    experiment: String,
    config_hash: String,
    params: &'a ExperimentConfig,
    passed: Option<bool>,
    warnings: &'a [String],
    results: &'a serde_json::Value,
}

/// Writes `config.json`, `results.csv` and `summary.json` into `dir`.
pub fn write_run(dir: &Path, config: &ExperimentConfig, output: &ExperimentOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    let hash = config.hash();
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(config)? + "\n")?;
    fs::write(dir.join("results.csv"), output.to_csv(&hash)?)?;
    let summary = SummaryFile {
        experiment: config.experiment.to_string(),
        config_hash: hash,
        params: config,
        passed: output.passed,
        warnings: &output.warnings,
        results: &output.summary,
    };
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(())
}

/// Reads a `config.json` written by [`write_run`].
pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
