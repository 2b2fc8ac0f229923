use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{CampaignConfig, Format};
use crate::error::HarnessError;

/// Trial that produced a property's worst statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

/// `worst` is `None` when no trial evaluated the property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub pass: bool,
    pub worst: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub properties: Vec<PropertyResult>,
    pub runtime_s: f64,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    pass: bool,
    worst: Option<f64>,
    witness_trial: Option<u64>,
    witness_seed: Option<u64>,
    witness_detail: Option<String>,
}

impl CampaignReport {
    pub fn all_pass(&self) -> bool {
        self.properties.iter().all(|p| p.pass)
    }

    /// Pretty-printed JSON followed by a newline.
    pub fn to_json(&self) -> Result<String, HarnessError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per property; the witness detail is embedded as compact JSON.
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.properties {
            let detail = match p.witness.as_ref().and_then(|w| w.detail.as_ref()) {
                Some(d) => Some(serde_json::to_string(d)?),
                None => None,
            };
            w.serialize(CsvRow {
                name: &p.name,
                pass: p.pass,
                worst: p.worst,
                witness_trial: p.witness.as_ref().map(|w| w.trial),
                witness_seed: p.witness.as_ref().map(|w| w.seed),
                witness_detail: detail,
            })?;
        }
        if self.properties.is_empty() {
            w.write_record(["name", "pass", "worst", "witness_trial", "witness_seed", "witness_detail"])?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String, HarnessError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write(&self, path: Option<&Path>, format: Format) -> Result<(), HarnessError> {
        let text = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}
