use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use loewner_core::witness::Witness;

use crate::jobs::{Report, RunConfig};

pub const SCHEMA: u64 = 1;
const CONFIG_PREFIX: &str = "# config=";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Human,
}

pub fn csv_table<S: AsRef<str>>(header: &[S], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|h| h.as_ref()))?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// The report text; JSON embeds the config as an object, CSV and human
/// output carry it on a leading comment line.
pub fn render(config: &RunConfig, report: &Report) -> Result<String> {
    Ok(match config.format {
        Format::Json => {
            let doc = json!({ "schema": SCHEMA, "config": config, "result": report.result });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
        Format::Csv => format!("{CONFIG_PREFIX}{}\n{}", serde_json::to_string(config)?, report.csv),
        Format::Human => format!("{CONFIG_PREFIX}{}\n{}", serde_json::to_string(config)?, report.human),
    })
}

pub fn extract_config(text: &str) -> Result<RunConfig> {
    if text.trim_start().starts_with('{') {
        let doc: Value = serde_json::from_str(text).context("parsing JSON report")?;
        match doc.get("schema").and_then(Value::as_u64) {
            Some(SCHEMA) => {}
            other => bail!("unsupported report schema {other:?}"),
        }
        let config = doc.get("config").ok_or_else(|| anyhow!("report has no config"))?;
        return Ok(serde_json::from_value(config.clone())?);
    }
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix(CONFIG_PREFIX))
        .ok_or_else(|| anyhow!("no `{CONFIG_PREFIX}` line found"))?;
    serde_json::from_str(line).context("parsing embedded config")
}

/// A witness file, or the first witness found anywhere inside a JSON report.
pub fn extract_witness(text: &str) -> Result<Witness> {
    if let Ok(w) = serde_json::from_str::<Witness>(text) {
        return Ok(w);
    }
    let doc: Value = serde_json::from_str(text).context("witness files must be JSON")?;
    find_witness(&doc).ok_or_else(|| anyhow!("no witness in the file"))
}

fn find_witness(v: &Value) -> Option<Witness> {
    match v {
        Value::Object(map) => {
            if let Some(w) = map.get("witness").and_then(|w| serde_json::from_value(w.clone()).ok()) {
                return Some(w);
            }
            map.values().find_map(find_witness)
        }
        Value::Array(items) => items.iter().find_map(find_witness),
        _ => None,
    }
}
