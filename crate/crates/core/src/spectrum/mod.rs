//! Transmission through a line loaded by the qubits,
//! D(ω) = 1 − Σᵢ α / [(ω − ωᵢ)² + γ²], and its resonant drops.

mod drops;
mod law;

pub use drops::{detect_drops, Drop, DropSet};
pub use law::{drop_count_law, predicted_drop_count, DropCountLaw, DropLawParams, RegimeWarning};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FrequencyField, ModelConfig, SpectrumSection};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParams {
    pub coupling_alpha: f64,
    pub linewidth_gamma: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_step: f64,
}

impl SpectrumParams {
    pub fn new(
        coupling_alpha: f64,
        linewidth_gamma: f64,
        grid_min: f64,
        grid_max: f64,
        grid_step: f64,
    ) -> Result<Self> {
        let p = SpectrumParams {
            coupling_alpha,
            linewidth_gamma,
            grid_min,
            grid_max,
            grid_step,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.coupling_alpha,
            self.linewidth_gamma,
            self.grid_min,
            self.grid_max,
            self.grid_step,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("spectrum parameters must be finite".into()));
        }
        if self.coupling_alpha <= 0.0 || self.linewidth_gamma <= 0.0 {
            return Err(Error::Config("α and γ must be positive".into()));
        }
        if self.coupling_alpha > 0.1 * self.linewidth_gamma.powi(2) {
            return Err(Error::Config(format!(
                "α = {} violates α ≤ 0.1γ² (γ = {})",
                self.coupling_alpha, self.linewidth_gamma
            )));
        }
        if self.grid_step <= 0.0 || self.grid_step > self.linewidth_gamma / 5.0 {
            return Err(Error::Config(format!(
                "grid step {} must lie in (0, γ/5 = {}]",
                self.grid_step,
                self.linewidth_gamma / 5.0
            )));
        }
        if self.grid_max <= self.grid_min {
            return Err(Error::Config("grid_max must exceed grid_min".into()));
        }
        Ok(())
    }

    /// Grid spanning the frequencies with `margin`·γ tails and step γ/`per_gamma`.
    pub fn covering(
        frequencies: &[f64],
        alpha: f64,
        gamma: f64,
        margin: f64,
        per_gamma: f64,
    ) -> Result<Self> {
        let lo = frequencies.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = frequencies
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidInput("no finite frequencies to cover".into()));
        }
        Self::new(
            alpha,
            gamma,
            lo - margin * gamma,
            hi + margin * gamma,
            gamma / per_gamma,
        )
    }

    /// α and γ from the config-file section, scaled by the disorder width.
    pub fn from_section(
        section: &SpectrumSection,
        config: &ModelConfig,
        frequencies: &[f64],
    ) -> Result<Self> {
        let scale = if config.disorder_width() > 0.0 {
            config.disorder_width()
        } else {
            config.mean_splitting() * 1e-2
        };
        let gamma = section.gamma_over_disorder * scale;
        Self::covering(
            frequencies,
            section.alpha_over_gamma_sq * gamma * gamma,
            gamma,
            6.0,
            20.0,
        )
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.grid_max - self.grid_min) / self.grid_step).floor() as usize + 1;
        (0..n)
            .map(|k| self.grid_min + k as f64 * self.grid_step)
            .collect()
    }

    /// Depth of a single isolated Lorentzian, α/γ².
    pub fn unit_depth(&self) -> f64 {
        self.coupling_alpha / self.linewidth_gamma.powi(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionSpectrum {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub params: SpectrumParams,
    pub realization_seed: u64,
    pub config_hash: String,
}

/// D(ω) evaluated at arbitrary frequencies.
pub fn transmission_at(frequencies: &[f64], alpha: f64, gamma: f64, omega: &[f64]) -> Vec<f64> {
    let g2 = gamma * gamma;
    omega
        .iter()
        .map(|w| {
            1.0 - frequencies
                .iter()
                .map(|f| alpha / ((w - f).powi(2) + g2))
                .sum::<f64>()
        })
        .collect()
}

/// Evaluates D(ω) on the parameter grid. The grid must reach 5γ beyond the
/// extreme qubit frequencies.
pub fn transmission(
    field: &FrequencyField,
    params: &SpectrumParams,
) -> Result<TransmissionSpectrum> {
    params.validate()?;
    if field.frequencies.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidInput(
            "frequency field contains non-finite values".into(),
        ));
    }
    let lo = field
        .frequencies
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let hi = field
        .frequencies
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let g = params.linewidth_gamma;
    let grid = params.grid();
    let last = *grid.last().unwrap_or(&params.grid_min);
    if params.grid_min > lo - 5.0 * g || last < hi + 5.0 * g {
        return Err(Error::Coverage {
            need_min: lo - 5.0 * g,
            need_max: hi + 5.0 * g,
        });
    }
    let values = transmission_at(&field.frequencies, params.coupling_alpha, g, &grid);
    Ok(TransmissionSpectrum {
        grid,
        values,
        params: *params,
        realization_seed: field.realization_seed,
        config_hash: field.config_hash.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Method;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const G: f64 = 1e-3;
    const A: f64 = 0.05 * G * G;

    fn field(frequencies: Vec<f64>) -> FrequencyField {
        FrequencyField {
            frequencies,
            method: Method::Noninteracting,
            realization_seed: 0,
            config_hash: String::new(),
        }
    }

    #[test]
    fn single_qubit_depth() {
        let d = transmission_at(&[1.0], A, G, &[1.0]);
        assert!((d[0] - (1.0 - A / (G * G))).abs() <= 1e-15);
    }

    #[test]
    fn far_tail_is_bounded() {
        let freqs = [1.0, 1.001, 0.999];
        let w = 1.0 + 100.0 * G + 0.001;
        let d = transmission_at(&freqs, A, G, &[w])[0];
        assert!(1.0 - d <= 3.0 * A / (100.0 * G).powi(2));
    }

    #[test]
    fn degenerate_frequencies_add() {
        let d = transmission_at(&[1.0; 7], A, G, &[1.0])[0];
        assert!((1.0 - d - 7.0 * A / (G * G)).abs() <= 1e-14);
    }

    #[test]
    fn parameter_validation() {
        assert!(SpectrumParams::new(0.2 * G * G, G, 0.0, 1.0, G / 5.0).is_err());
        assert!(SpectrumParams::new(A, G, 0.0, 1.0, G / 4.0).is_err());
        assert!(SpectrumParams::new(A, -G, 0.0, 1.0, G / 5.0).is_err());
        assert!(SpectrumParams::new(A, G, 1.0, 0.5, G / 5.0).is_err());
        assert!(SpectrumParams::new(A, G, 0.0, 1.0, G / 5.0).is_ok());
    }

    #[test]
    fn narrow_grid_is_a_coverage_error() {
        let f = field(vec![1.0, 1.01]);
        let p = SpectrumParams::new(A, G, 0.999, 1.02, G / 10.0).unwrap();
        assert!(matches!(transmission(&f, &p), Err(Error::Coverage { .. })));
        let p = SpectrumParams::covering(&f.frequencies, A, G, 6.0, 10.0).unwrap();
        let s = transmission(&f, &p).unwrap();
        assert!(s
            .values
            .iter()
            .all(|d| *d <= 1.0 && *d >= 1.0 - 2.0 * A / (G * G)));
    }

    fn integrate(freqs: &[f64]) -> f64 {
        let p = SpectrumParams::covering(freqs, A, G, 200.0, 20.0).unwrap();
        let s = transmission(&field(freqs.to_vec()), &p).unwrap();
        let h = p.grid_step;
        let v: Vec<f64> = s.values.iter().map(|d| 1.0 - d).collect();
        h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn sum_rule(freqs in proptest::collection::vec(0.98f64..1.02, 1..25)) {
            let exact = freqs.len() as f64 * PI * A / G;
            let got = integrate(&freqs);
            prop_assert!(((got - exact) / exact).abs() <= 5e-3, "{} vs {}", got, exact);
        }

        #[test]
        fn depth_profiles_add(
            a in proptest::collection::vec(0.99f64..1.01, 1..10),
            b in proptest::collection::vec(0.99f64..1.01, 1..10),
        ) {
            let w: Vec<f64> = (0..200).map(|k| 0.985 + k as f64 * 1.5e-4).collect();
            let da = transmission_at(&a, A, G, &w);
            let db = transmission_at(&b, A, G, &w);
            let all: Vec<f64> = a.iter().chain(&b).copied().collect();
            let dab = transmission_at(&all, A, G, &w);
            for k in 0..w.len() {
                prop_assert!(((1.0 - dab[k]) - (1.0 - da[k]) - (1.0 - db[k])).abs() <= 1e-12);
            }
        }
    }
}
