use serde::{Deserialize, Serialize};

use super::{detect_drops, transmission, SpectrumParams};
use crate::error::{Error, Result};
use crate::instanton::synchronized_filter;
use crate::model::rng::derive_seed;
use crate::model::{sample_disorder, ModelConfig};
use crate::stats::mean_stderr;

pub const MIN_REALIZATIONS: usize = 50;

/// Line parameters in units tied to the disorder: γ = `gamma_over_disorder`·δΔ,
/// α = `alpha_over_gamma_sq`·γ², detection threshold in units of α/γ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropLawParams {
    pub alpha_over_gamma_sq: f64,
    pub gamma_over_disorder: f64,
    pub threshold_units: f64,
}

impl Default for DropLawParams {
    fn default() -> Self {
        DropLawParams {
            alpha_over_gamma_sq: 0.05,
            gamma_over_disorder: 0.1,
            threshold_units: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeWarning {
    /// κ < 1: clusters are not expected to form.
    WeakCoupling { kappa: f64 },
    /// γ not small against δΔ, so distinct frequencies may not resolve.
    UnresolvedLines { gamma_over_disorder: f64 },
    /// Realizations whose saddle saturated and were treated as fully synchronized.
    Saturated { realizations: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropCountLaw {
    pub kappa: f64,
    pub counts: Vec<usize>,
    pub mean_count: f64,
    pub stderr: f64,
    /// max(1, (N/2)(δΔ/K̃)²).
    pub predicted: f64,
    pub warnings: Vec<RegimeWarning>,
}

pub fn predicted_drop_count(config: &ModelConfig) -> f64 {
    let k = config.kappa();
    if k == 0.0 {
        return config.n_sites() as f64;
    }
    (0.5 * config.n_sites() as f64 / (k * k)).max(1.0)
}

/// Runs disorder → saddle filter → transmission → drop detection over
/// `realizations` seeded realizations and compares the mean count with the
/// cluster-count law.
pub fn drop_count_law(
    config: &ModelConfig,
    params: &DropLawParams,
    realizations: usize,
    master_seed: u64,
) -> Result<DropCountLaw> {
    if realizations < MIN_REALIZATIONS {
        return Err(Error::InvalidInput(format!(
            "drop-count law needs at least {MIN_REALIZATIONS} realizations, got {realizations}"
        )));
    }
    if config.disorder_width() <= 0.0 {
        return Err(Error::InvalidInput("drop-count law needs δΔ > 0".into()));
    }
    let gamma = params.gamma_over_disorder * config.disorder_width();
    let alpha = params.alpha_over_gamma_sq * gamma * gamma;
    let threshold = params.threshold_units * alpha / (gamma * gamma);
    let mut counts = Vec::with_capacity(realizations);
    let mut saturated = 0;
    for r in 0..realizations {
        let disorder = sample_disorder(config, derive_seed(master_seed, 0, r as u64));
        let (field, r0) = synchronized_filter(&disorder, config)?;
        if r0.is_infinite() {
            saturated += 1;
        }
        let sp = SpectrumParams::covering(&field.frequencies, alpha, gamma, 6.0, 20.0)?;
        counts.push(detect_drops(&transmission(&field, &sp)?, threshold).len());
    }
    let as_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let est = mean_stderr(&as_f);
    let mut warnings = Vec::new();
    if config.kappa() < 1.0 {
        warnings.push(RegimeWarning::WeakCoupling {
            kappa: config.kappa(),
        });
    }
    if params.gamma_over_disorder > 0.2 {
        warnings.push(RegimeWarning::UnresolvedLines {
            gamma_over_disorder: params.gamma_over_disorder,
        });
    }
    if saturated > 0 {
        warnings.push(RegimeWarning::Saturated {
            realizations: saturated,
        });
    }
    Ok(DropCountLaw {
        kappa: config.kappa(),
        counts,
        mean_count: est.mean,
        stderr: est.stderr,
        predicted: predicted_drop_count(config),
        warnings,
    })
}
