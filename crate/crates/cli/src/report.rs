//! Output records and their CSV / markdown writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::market::Month;

/// Marker written in place of a price that does not exist.
pub const DIVERGENT: &str = "divergent";

/// `Option<f64>` as a number or [`DIVERGENT`].
mod divergent {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::DIVERGENT;

    pub fn serialize<S: Serializer>(value: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_f64(*v),
            None => s.serialize_str(DIVERGENT),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let raw = String::deserialize(d)?;
        if raw == DIVERGENT {
            return Ok(None);
        }
        raw.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Record {
    pub p: f64,
    pub xi: f64,
    #[serde(with = "divergent")]
    pub pd_ai: Option<f64>,
    #[serde(with = "divergent")]
    pub pd_n: Option<f64>,
    #[serde(with = "divergent")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub scenario: String,
    pub tau: f64,
    #[serde(with = "divergent")]
    pub pd_ai: Option<f64>,
    pub multiple: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VetoRecord {
    pub gamma: f64,
    pub v_veto: f64,
    pub v_develop_im: f64,
    pub v_develop_cm: f64,
    pub vetoes_im: bool,
    pub vetoes_cm: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VetoSweepRecord {
    pub gamma: f64,
    pub vetoes_im: bool,
}

/// Risk-aversion threshold located by one method; empty when none is found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub method: String,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCheckRecord {
    pub cell: String,
    pub asset: String,
    pub closed_form: Option<f64>,
    pub recursion: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_se: Option<f64>,
    pub tail_bound: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdRecord {
    pub month: Month,
    pub pd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub month: Month,
    pub ratio_rebased: f64,
}

fn csv_bytes<T: Serialize>(records: &[T], path: &Path) -> Result<Vec<u8>, CliError> {
    let csv_error = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_writer(Vec::new());
    for record in records {
        writer.serialize(record).map_err(csv_error)?;
    }
    writer
        .into_inner()
        .map_err(|e| csv_error(csv::Error::from(e.into_error())))
}

/// Renders CSV text as a pipe-delimited markdown table.
pub fn csv_to_markdown(csv_text: &[u8]) -> Result<String, csv::Error> {
    let mut reader = csv::Reader::from_reader(csv_text);
    let row = |fields: &csv::StringRecord| {
        let cells: Vec<&str> = fields.iter().collect();
        format!("| {} |\n", cells.join(" | "))
    };
    let headers = reader.headers()?.clone();
    let mut out = row(&headers);
    out.push_str(&format!("|{}\n", "---|".repeat(headers.len())));
    for record in reader.records() {
        out.push_str(&row(&record?));
    }
    Ok(out)
}

/// Writes `records` to `dir/stem.<ext>` in the requested format.
pub fn write_records<T: Serialize>(
    dir: &Path,
    stem: &str,
    format: OutputFormat,
    records: &[T],
) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let csv_text = csv_bytes(records, &path)?;
    let bytes = match format {
        OutputFormat::Csv => csv_text,
        OutputFormat::Markdown => csv_to_markdown(&csv_text)
            .map_err(|source| CliError::Csv {
                path: path.clone(),
                source,
            })?
            .into_bytes(),
    };
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    fs::write(&path, bytes).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Reads records back from a CSV file.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let csv_error = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    csv::Reader::from_path(path)
        .map_err(csv_error)?
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(csv_error)
}
