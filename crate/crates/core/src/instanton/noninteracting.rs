use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::model::rng::{stream_rng, streams};
use crate::model::{DisorderRealization, FrequencyField, Method};

/// Frequencies of independent qubits (K̃ = 0 regardless of the configured
/// coupling): ωᵢ ~ Gaussian(Δᵢ/ħ, k_BT·Δᵢ/ħ²), the instanton-number
/// fluctuations around ⟨Nᵢ⟩ = Δᵢ/(k_BT) mapped to frequency.
pub fn sample_noninteracting(
    realization: &DisorderRealization,
    temperature: f64,
    seed: u64,
) -> Result<FrequencyField> {
    let mut rng = stream_rng(seed, streams::THERMAL);
    let frequencies = realization
        .splittings
        .iter()
        .map(|&d| {
            let z: f64 = StandardNormal.sample(&mut rng);
            d + (temperature * d).sqrt() * z
        })
        .collect();
    FrequencyField::new(frequencies, Method::Noninteracting, realization)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_config, RawParams};
    use crate::stats::{mean_stderr, variance};

    #[test]
    fn zero_temperature_limit_pins_to_splittings() {
        let cfg = make_config(&RawParams::dimensionless(200, 0.05, 0.0, 1e-6)).unwrap();
        let real = crate::model::sample_disorder(&cfg, 4);
        let f = sample_noninteracting(&real, 1e-6, 8).unwrap();
        for (w, d) in f.frequencies.iter().zip(&real.splittings) {
            assert!(((w - d) / d).abs() <= 1e-2);
        }
    }

    #[test]
    fn thermal_moments() {
        let n = 100_000;
        let cfg = make_config(&RawParams::dimensionless(n, 0.0, 0.0, 0.1)).unwrap();
        let real = crate::model::sample_disorder(&cfg, 0);
        let f = sample_noninteracting(&real, 0.1, 77).unwrap();
        let var = variance(&f.frequencies);
        assert!((var - 0.1).abs() <= 0.03 * 0.1, "variance {var}");
        let m = mean_stderr(&f.frequencies);
        assert!((m.mean - 1.0).abs() <= 3.0 * m.stderr, "mean {m:?}");
    }
}
