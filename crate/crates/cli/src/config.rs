//! Run configuration read from flat `key = value` files.
//!
//! Model fields are bare (`beta = 0.96`); the other sections use a prefix:
//! `veto.alpha`, `transfer.delta`, `mc.n_paths`. Veto keys may also override
//! any model field for the veto calculation only, e.g. `veto.gamma = 10`.
//! Lines starting with `#` are comments.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use singularity_core::{ModelParams, VetoParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "md",
        }
    }
}

/// Transfer settings; each scenario supplies its own model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSettings {
    pub alpha: f64,
    pub delta: f64,
}

impl Default for TransferSettings {
    fn default() -> Self {
        Self {
            alpha: 0.7,
            delta: singularity_core::transfer::FIGURE2_DELTA,
        }
    }
}

/// Monte Carlo settings; the horizon is derived per cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub seed: u64,
    pub n_paths: usize,
    pub target_tolerance: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            seed: 20_240_917,
            n_paths: 100_000,
            target_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub veto: Option<VetoParams>,
    pub transfer: Option<TransferSettings>,
    pub mc: Option<McSettings>,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::table1_baseline(),
            veto: Some(VetoParams::reference_example()),
            transfer: Some(TransferSettings::default()),
            mc: Some(McSettings::default()),
            output_dir: PathBuf::from("output"),
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| CliError::Config {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|message| CliError::Config { line, message })?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key.split_once('.') {
            None => match key {
                "output_dir" => self.output_dir = PathBuf::from(value),
                "format" => {
                    self.format = OutputFormat::from_str(value, true)
                        .map_err(|_| format!("unknown format `{value}`"))?
                }
                _ => set_model_field(&mut self.model, key, value)?,
            },
            Some(("veto", field)) => {
                let veto = self.veto.get_or_insert_with(VetoParams::reference_example);
                match field {
                    "alpha" => veto.alpha = number(key, value)?,
                    "q" => veto.q = number(key, value)?,
                    "kappa" => veto.kappa = number(key, value)?,
                    _ => set_model_field(&mut veto.base, field, value)
                        .map_err(|_| format!("unknown key `{key}`"))?,
                }
            }
            Some(("transfer", field)) => {
                let transfer = self.transfer.get_or_insert_with(TransferSettings::default);
                match field {
                    "alpha" => transfer.alpha = number(key, value)?,
                    "delta" => transfer.delta = number(key, value)?,
                    _ => return Err(format!("unknown key `{key}`")),
                }
            }
            Some(("mc", field)) => {
                let mc = self.mc.get_or_insert_with(McSettings::default);
                match field {
                    "seed" => mc.seed = integer(key, value)?,
                    "n_paths" => mc.n_paths = integer(key, value)?,
                    "target_tolerance" => mc.target_tolerance = number(key, value)?,
                    _ => return Err(format!("unknown key `{key}`")),
                }
            }
            Some(_) => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }
}

fn set_model_field(model: &mut ModelParams, key: &str, value: &str) -> Result<(), String> {
    let slot = match key {
        "beta" => &mut model.beta,
        "g" => &mut model.g,
        "gamma" => &mut model.gamma,
        "p" => &mut model.p,
        "xi" => &mut model.xi,
        "eta" => &mut model.eta,
        "phi" => &mut model.phi,
        "theta" => &mut model.theta,
        "delta_theta" => &mut model.delta_theta,
        _ => return Err(format!("unknown key `{key}`")),
    };
    *slot = number(key, value)?;
    Ok(())
}

fn number(key: &str, value: &str) -> Result<f64, String> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{key}` expects a finite number, found `{value}`"))
}

fn integer<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .replace('_', "")
        .parse()
        .map_err(|_| format!("`{key}` expects a non-negative integer, found `{value}`"))
}
