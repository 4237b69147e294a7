//! Disorder-averaged frequency correlator R(x) = ⟨ω(x₀)ω(x₀+x)⟩ − (Δ/ħ)².

use serde::{Deserialize, Serialize};

use super::fit::{fit_r0, R0Fit};
use super::fourier::{fourier_forward, fourier_forward_2d, fourier_inverse, FourierField};
use super::saddle::{closed_form_r0, closed_form_r0_2d};
use crate::error::{Error, Result};
use crate::model::{FrequencyField, ModelConfig};
use crate::stats::mean_stderr;

pub const MIN_REALIZATIONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    /// Separations |x| in lattice units, starting at 0.
    pub separations: Vec<f64>,
    pub r_values: Vec<f64>,
    pub r_stderr: Vec<f64>,
    pub n_realizations: usize,
    pub length: f64,
    pub config_hash: String,
    pub fitted_r0: Option<f64>,
    pub fitted_amplitude: Option<f64>,
    pub fit_residual: Option<f64>,
}

impl CorrelationEstimate {
    /// Fits the correlation radius and records the result on the estimate.
    pub fn fit(&mut self) -> Result<R0Fit> {
        let fit = fit_r0(self)?;
        self.fitted_r0 = Some(fit.r0);
        self.fitted_amplitude = Some(fit.amplitude);
        self.fit_residual = Some(fit.residual);
        Ok(fit)
    }
}

/// Largest separation binned by default: min(L/2, 8·r₀) with r₀ from the
/// continuum formula, but never fewer than 10 bins.
pub fn default_max_separation(config: &ModelConfig) -> usize {
    let r0 = match config.dimension() {
        1 => closed_form_r0(config),
        _ => closed_form_r0_2d(config),
    };
    let half = config.side() / 2;
    let want = if r0.is_finite() {
        (8.0 * r0).ceil() as usize
    } else {
        half
    };
    want.clamp(10.min(half), half)
}

/// Translation-averaged autocorrelation of one field about `offset`, for
/// separations 0..=max_sep. In 2D the x and y axes are averaged.
pub fn field_autocorrelation(
    values: &[f64],
    config: &ModelConfig,
    offset: f64,
    max_sep: usize,
) -> Result<Vec<f64>> {
    let side = config.side();
    let f = match config.dimension() {
        1 => fourier_forward(values, offset, config.boundary())?,
        _ => fourier_forward_2d(values, side, offset, config.boundary())?,
    };
    let power = FourierField {
        modes: f.modes.iter().map(|c| c.norm_sqr().into()).collect(),
        side: f.side,
        dimension: f.dimension,
        offset: 0.0,
    };
    let scale = config.length().powf(config.dimension() as f64 / 2.0);
    let c: Vec<f64> = fourier_inverse(&power)
        .into_iter()
        .map(|v| v / scale)
        .collect();
    let max_sep = max_sep.min(side / 2);
    let at = |x: usize, y: usize| c[(y % side) * side + (x % side)];
    Ok((0..=max_sep)
        .map(|x| {
            if config.dimension() == 1 {
                0.5 * (c[x] + c[(side - x) % side])
            } else {
                0.25 * (at(x, 0) + at(side - x, 0) + at(0, x) + at(0, side - x))
            }
        })
        .collect())
}

/// Averages the connected correlator over realizations. All fields must come
/// from `config`; standard errors are realization-to-realization.
pub fn estimate_correlation(
    fields: &[FrequencyField],
    config: &ModelConfig,
    max_separation: Option<usize>,
) -> Result<CorrelationEstimate> {
    let groups: Vec<&[FrequencyField]> = fields.iter().map(std::slice::from_ref).collect();
    estimate_correlation_grouped(&groups, config, max_separation)
}

/// As [`estimate_correlation`], with several thermal samples per realization:
/// each group is averaged first, then groups are treated as independent.
pub fn estimate_correlation_grouped(
    groups: &[&[FrequencyField]],
    config: &ModelConfig,
    max_separation: Option<usize>,
) -> Result<CorrelationEstimate> {
    if groups.len() < MIN_REALIZATIONS {
        return Err(too_few(groups.len()));
    }
    let max_sep = max_separation.unwrap_or_else(|| default_max_separation(config));
    let per = groups
        .iter()
        .map(|g| realization_correlation(g, config, max_sep))
        .collect::<Result<Vec<_>>>()?;
    correlation_from_realizations(&per, config)
}

fn too_few(got: usize) -> Error {
    Error::InvalidInput(format!(
        "correlation estimate needs at least {MIN_REALIZATIONS} realizations, got {got}"
    ))
}

/// Autocorrelation about Δ averaged over the samples of one realization.
pub fn realization_correlation(
    samples: &[FrequencyField],
    config: &ModelConfig,
    max_sep: usize,
) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty realization group".into()));
    }
    let hash = config.hash();
    if let Some(bad) = samples.iter().find(|f| f.config_hash != hash) {
        return Err(Error::InvalidInput(format!(
            "field from config {} mixed into estimate for config {hash}",
            bad.config_hash
        )));
    }
    let max_sep = max_sep.min(config.side() / 2);
    let mut acc = vec![0.0; max_sep + 1];
    for f in samples {
        let c = field_autocorrelation(&f.frequencies, config, config.mean_splitting(), max_sep)?;
        acc.iter_mut().zip(c).for_each(|(a, v)| *a += v);
    }
    acc.iter_mut().for_each(|a| *a /= samples.len() as f64);
    Ok(acc)
}

/// Mean and realization-to-realization standard error of per-realization
/// correlation curves, all binned to the same separations.
pub fn correlation_from_realizations(
    per: &[Vec<f64>],
    config: &ModelConfig,
) -> Result<CorrelationEstimate> {
    if per.len() < MIN_REALIZATIONS {
        return Err(too_few(per.len()));
    }
    let bins = per[0].len();
    if let Some(bad) = per.iter().find(|c| c.len() != bins) {
        return Err(Error::LengthMismatch {
            expected: bins,
            got: bad.len(),
        });
    }
    let mut r_values = Vec::with_capacity(bins);
    let mut r_stderr = Vec::with_capacity(bins);
    for x in 0..bins {
        let column: Vec<f64> = per.iter().map(|c| c[x]).collect();
        let est = mean_stderr(&column);
        r_values.push(est.mean);
        r_stderr.push(est.stderr);
    }
    Ok(CorrelationEstimate {
        separations: (0..bins).map(|x| x as f64).collect(),
        r_values,
        r_stderr,
        n_realizations: per.len(),
        length: config.length(),
        config_hash: config.hash(),
        fitted_r0: None,
        fitted_amplitude: None,
        fit_residual: None,
    })
}

/// R(x) = (P/4r₀)(1 + |x|/r₀)e^{−|x|/r₀} for mode power P = ⟨|b_n|²⟩/a.
pub fn analytic_correlation(x: f64, r0: f64, disorder_width: f64) -> f64 {
    let s = x.abs() / r0;
    disorder_width.powi(2) / (2.0 * r0) * (1.0 + s) * (-s).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instanton::filter::apply_mode_filter;
    use crate::model::{make_config, sample_disorder, RawParams};

    fn cfg(n: usize, kappa: f64) -> ModelConfig {
        make_config(&RawParams::dimensionless(n, 0.01, kappa * 0.01, 0.1)).unwrap()
    }

    fn direct_autocorr(v: &[f64], offset: f64, x: usize) -> f64 {
        let n = v.len();
        let fwd: f64 = (0..n)
            .map(|i| (v[i] - offset) * (v[(i + x) % n] - offset))
            .sum::<f64>()
            / n as f64;
        let bwd: f64 = (0..n)
            .map(|i| (v[i] - offset) * (v[(i + n - x) % n] - offset))
            .sum::<f64>()
            / n as f64;
        0.5 * (fwd + bwd)
    }

    #[test]
    fn fft_autocorrelation_matches_direct_sum() {
        let c = cfg(50, 1.0);
        let r = sample_disorder(&c, 2);
        let fast = field_autocorrelation(&r.splittings, &c, 1.0, 25).unwrap();
        for (x, v) in fast.iter().enumerate() {
            assert!(
                (v - direct_autocorr(&r.splittings, 1.0, x)).abs() <= 1e-15,
                "x = {x}"
            );
        }
    }

    #[test]
    fn two_dimensional_autocorrelation_matches_direct_sum() {
        let mut raw = RawParams::dimensionless(36, 0.01, 0.01, 0.1);
        raw.dimension = 2;
        let c = make_config(&raw).unwrap();
        let r = sample_disorder(&c, 3);
        let v = &r.splittings;
        let fast = field_autocorrelation(v, &c, 1.0, 3).unwrap();
        for (x, got) in fast.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..6 {
                for j in 0..6 {
                    let d = v[i * 6 + j] - 1.0;
                    acc +=
                        d * (v[i * 6 + (j + x) % 6] - 1.0) + d * (v[((i + x) % 6) * 6 + j] - 1.0);
                }
            }
            assert!((got - acc / 72.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn estimator_is_even_in_separation() {
        let c = cfg(64, 2.0);
        let r = sample_disorder(&c, 5);
        let f = apply_mode_filter(&r, &c, 3.0).unwrap();
        let v = &f.frequencies;
        for x in 1..32 {
            let fwd: f64 = (0..64)
                .map(|i| (v[i] - 1.0) * (v[(i + x) % 64] - 1.0))
                .sum();
            let bwd: f64 = (0..64)
                .map(|i| (v[i] - 1.0) * (v[(i + 64 - x) % 64] - 1.0))
                .sum();
            assert!((fwd - bwd).abs() <= 1e-15);
        }
    }

    #[test]
    fn uncoupled_fields_are_uncorrelated() {
        let c = cfg(512, 0.0);
        let fields: Vec<FrequencyField> = (0..40)
            .map(|s| apply_mode_filter(&sample_disorder(&c, s), &c, 0.0).unwrap())
            .collect();
        let est = estimate_correlation(&fields, &c, Some(20)).unwrap();
        let var = 2.0 * 0.01f64.powi(2);
        assert!((est.r_values[0] - var).abs() <= 3.0 * est.r_stderr[0]);
        for x in 1..=20 {
            assert!(est.r_values[x].abs() <= 3.5 * est.r_stderr[x], "x = {x}");
        }
    }

    #[test]
    fn too_few_or_mixed_realizations_rejected() {
        let c = cfg(64, 1.0);
        let few: Vec<FrequencyField> = (0..5)
            .map(|s| apply_mode_filter(&sample_disorder(&c, s), &c, 1.0).unwrap())
            .collect();
        assert!(estimate_correlation(&few, &c, None).is_err());
        let other = cfg(64, 2.0);
        let mut mixed: Vec<FrequencyField> = (0..25)
            .map(|s| apply_mode_filter(&sample_disorder(&c, s), &c, 1.0).unwrap())
            .collect();
        mixed.push(apply_mode_filter(&sample_disorder(&other, 1), &other, 1.0).unwrap());
        assert!(matches!(
            estimate_correlation(&mixed, &c, None),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn default_window_tracks_radius() {
        assert_eq!(default_max_separation(&cfg(4096, 4.0)), 256);
        assert_eq!(default_max_separation(&cfg(64, 8.0)), 32);
        assert_eq!(default_max_separation(&cfg(64, 0.0)), 10);
    }
}
