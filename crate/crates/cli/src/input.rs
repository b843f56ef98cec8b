//! Reading systems and string configurations from JSON files.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use lqrdecay::linalg::ComplexMatrix;
use lqrdecay::riccati::{RiccatiError, SystemSpec};
use lqrdecay::string_model::StringConfig;
use serde::Deserialize;

/// `{"A": …, "B": …, "Q"?: …, "R"?: …, "label"?: …}`; complex entries are
/// `[re, im]` pairs.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    #[serde(rename = "A")]
    a: ComplexMatrix,
    #[serde(rename = "B")]
    b: ComplexMatrix,
    #[serde(rename = "Q")]
    q: Option<ComplexMatrix>,
    #[serde(rename = "R")]
    r: Option<ComplexMatrix>,
    label: Option<String>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("input: cannot read {}", path.display()))
}

pub fn system(path: &Path) -> Result<SystemSpec> {
    let file: SystemFile = serde_json::from_str(&read(path)?)
        .map_err(|e| anyhow!("input: malformed system JSON in {}: {e}", path.display()))?;
    let label = file.label.unwrap_or_else(|| path.display().to_string());
    let q = file.q.unwrap_or_else(|| ComplexMatrix::identity(file.a.rows()));
    let r = file.r.unwrap_or_else(|| ComplexMatrix::identity(file.b.cols()));
    SystemSpec::with_weights(file.a, file.b, q, r, label).map_err(|e| match e {
        RiccatiError::DimensionMismatch(msg) => anyhow!("dimension: {msg}"),
        other => anyhow!("precondition: {other}"),
    })
}

pub fn string_config(path: &Path) -> Result<StringConfig> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| anyhow!("input: malformed string configuration in {}: {e}", path.display()))
}
