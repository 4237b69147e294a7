use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::rng::{stream_rng, streams};
use super::ModelConfig;
use crate::error::{Error, Result};

/// Per-qubit splittings Δᵢ (units of the mean splitting).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    pub splittings: Vec<f64>,
    pub seed: u64,
    pub config_hash: String,
}

impl DisorderRealization {
    /// Wraps explicitly chosen splittings; `seed` is only recorded.
    pub fn from_splittings(config: &ModelConfig, splittings: Vec<f64>, seed: u64) -> Result<Self> {
        if splittings.len() != config.n_sites() {
            return Err(Error::LengthMismatch {
                expected: config.n_sites(),
                got: splittings.len(),
            });
        }
        if let Some(bad) = splittings.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "splitting {bad} is not positive"
            )));
        }
        Ok(DisorderRealization {
            splittings,
            seed,
            config_hash: config.hash(),
        })
    }

    pub fn len(&self) -> usize {
        self.splittings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splittings.is_empty()
    }

    /// Cyclic shift by `k` sites (1D), used to probe translation covariance.
    pub fn rotated(&self, k: usize) -> DisorderRealization {
        let mut s = self.splittings.clone();
        let n = s.len().max(1);
        s.rotate_right(k % n);
        DisorderRealization {
            splittings: s,
            seed: self.seed,
            config_hash: self.config_hash.clone(),
        }
    }
}

/// Draws Δᵢ i.i.d. from a Gaussian with mean Δ and standard deviation
/// `config.site_std()`, resampling any draw at or below Δ/2.
pub fn sample_disorder(config: &ModelConfig, seed: u64) -> DisorderRealization {
    let mean = config.mean_splitting();
    let std = config.site_std();
    let mut rng = stream_rng(seed, streams::DISORDER);
    let splittings = (0..config.n_sites())
        .map(|_| loop {
            let z: f64 = StandardNormal.sample(&mut rng);
            let d = mean + std * z;
            if d > 0.5 * mean {
                break d;
            }
        })
        .collect();
    DisorderRealization {
        splittings,
        seed,
        config_hash: config.hash(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_config, RawParams};

    fn cfg(n: usize, dd: f64) -> ModelConfig {
        make_config(&RawParams::dimensionless(n, dd, 0.0, 0.1)).unwrap()
    }

    #[test]
    fn zero_width_is_exactly_clean() {
        let r = sample_disorder(&cfg(50, 0.0), 3);
        assert!(r.splittings.iter().all(|&d| d == 1.0));
    }

    #[test]
    fn same_seed_same_array() {
        let c = cfg(100, 0.05);
        assert_eq!(
            sample_disorder(&c, 11).splittings,
            sample_disorder(&c, 11).splittings
        );
        assert_ne!(
            sample_disorder(&c, 11).splittings,
            sample_disorder(&c, 12).splittings
        );
    }

    #[test]
    fn large_sample_moments() {
        let n = 100_000;
        let c = cfg(n, 0.05);
        let r = sample_disorder(&c, 2024);
        let mean = r.splittings.iter().sum::<f64>() / n as f64;
        let var = r.splittings.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        let target = c.site_std();
        assert!(
            (mean - 1.0).abs() <= 3.0 * target / (n as f64).sqrt(),
            "mean {mean}"
        );
        assert!((sd - target).abs() <= 0.02 * target, "sd {sd} vs {target}");
    }

    #[test]
    fn sites_are_uncorrelated_across_realizations() {
        let c = cfg(4, 0.05);
        let m = 10_000;
        let samples: Vec<Vec<f64>> = (0..m)
            .map(|s| sample_disorder(&c, s as u64).splittings)
            .collect();
        for (i, j) in [(0, 1), (1, 2), (0, 3)] {
            let prod: Vec<f64> = samples
                .iter()
                .map(|s| (s[i] - 1.0) * (s[j] - 1.0))
                .collect();
            let mean = prod.iter().sum::<f64>() / m as f64;
            let var = prod.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            let se = (var / m as f64).sqrt();
            assert!(mean.abs() <= 3.0 * se, "cov({i},{j}) = {mean} ± {se}");
        }
    }

    #[test]
    fn explicit_splittings_are_validated() {
        let c = cfg(3, 0.01);
        assert!(DisorderRealization::from_splittings(&c, vec![1.0, 1.0], 0).is_err());
        assert!(DisorderRealization::from_splittings(&c, vec![1.0, -1.0, 1.0], 0).is_err());
        assert!(DisorderRealization::from_splittings(&c, vec![1.0, 0.9, 1.1], 0).is_ok());
    }
}
