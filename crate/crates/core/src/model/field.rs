use serde::{Deserialize, Serialize};

use super::DisorderRealization;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Noninteracting,
    Mcmc,
    SaddleFilter,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Noninteracting => "noninteracting",
            Method::Mcmc => "mcmc",
            Method::SaddleFilter => "saddle_filter",
        }
    }
}

/// Per-qubit oscillation frequencies ωᵢ for one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyField {
    pub frequencies: Vec<f64>,
    pub method: Method,
    /// Seed of the disorder realization this field was derived from.
    pub realization_seed: u64,
    pub config_hash: String,
}

impl FrequencyField {
    pub fn new(
        frequencies: Vec<f64>,
        method: Method,
        realization: &DisorderRealization,
    ) -> Result<Self> {
        if frequencies.len() != realization.len() {
            return Err(Error::LengthMismatch {
                expected: realization.len(),
                got: frequencies.len(),
            });
        }
        if frequencies.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput(
                "frequency field contains non-finite values".into(),
            ));
        }
        Ok(FrequencyField {
            frequencies,
            method,
            realization_seed: realization.seed,
            config_hash: realization.config_hash.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.frequencies.iter().sum::<f64>() / self.frequencies.len() as f64
    }
}
