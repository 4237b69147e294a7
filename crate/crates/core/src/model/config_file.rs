//! Versioned TOML configuration files.
//!
//! ```toml
//! schema_version = 1
//!
//! [model]
//! n_sites = 4096
//! dimension = 1            # optional, 1 or 2
//! boundary = "periodic"    # optional, "periodic" | "open"
//! mean_splitting = 1.0     # any energy unit; everything is rescaled by it
//! disorder_width = 0.01
//! coupling = 0.04
//! temperature = 0.1
//! lattice_spacing = 1.0    # optional
//!
//! [mcmc]                   # optional
//! burn_in_sweeps = 2000
//! sweeps = 20000
//! thin = 10
//!
//! [spectrum]               # optional
//! alpha_over_gamma_sq = 0.05
//! gamma_over_disorder = 0.1
//! depth_threshold = 3.0    # in units of α/γ²
//! ```
//!
//! Unknown keys anywhere in the file are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{make_config, ModelConfig, RawParams};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcSection {
    pub burn_in_sweeps: usize,
    pub sweeps: usize,
    pub thin: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    #[serde(default = "default_alpha_ratio")]
    pub alpha_over_gamma_sq: f64,
    #[serde(default = "default_gamma_ratio")]
    pub gamma_over_disorder: f64,
    #[serde(default = "default_threshold")]
    pub depth_threshold: f64,
}

fn default_alpha_ratio() -> f64 {
    0.05
}

fn default_gamma_ratio() -> f64 {
    0.1
}

fn default_threshold() -> f64 {
    3.0
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            alpha_over_gamma_sq: default_alpha_ratio(),
            gamma_over_disorder: default_gamma_ratio(),
            depth_threshold: default_threshold(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub model: RawParams,
    pub mcmc: Option<McmcSection>,
    pub spectrum: Option<SpectrumSection>,
}

impl ConfigFile {
    pub fn model_config(&self) -> Result<ModelConfig> {
        make_config(&self.model)
    }
}

pub fn parse_config_str(text: &str, origin: &Path) -> Result<ConfigFile> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    Ok(file)
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, path)
}
