use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::model::{DisorderRealization, FrequencyField, ModelConfig};

/// Exponent of the interacting instanton-gas measure over frequencies,
///
/// E = λ₁ Σ_bonds |ωᵢ − ωⱼ| + λ₂ Σᵢ (ωᵢ − Δᵢ/ħ)²,
///
/// with λ₁ = ħK̃/(k_BT·Δ) and λ₂ = ħ²/(2k_BT·Δ). The target density is exp(−E).
#[derive(Debug, Clone)]
pub struct GibbsEnergy {
    pub coupling_weight: f64,
    pub curvature_weight: f64,
    pub realization_seed: u64,
    targets: Vec<f64>,
    lattice: Lattice,
}

impl GibbsEnergy {
    pub fn new(realization: &DisorderRealization, config: &ModelConfig) -> Result<Self> {
        if realization.len() != config.n_sites() {
            return Err(Error::LengthMismatch {
                expected: config.n_sites(),
                got: realization.len(),
            });
        }
        let t = config.temperature();
        let delta = config.mean_splitting();
        Ok(GibbsEnergy {
            coupling_weight: config.coupling() / (t * delta),
            curvature_weight: 1.0 / (2.0 * t * delta),
            realization_seed: realization.seed,
            targets: realization.splittings.clone(),
            lattice: Lattice::from_config(config),
        })
    }

    /// Explicit weights, for checking the functional against hand evaluations.
    pub fn with_weights(
        coupling_weight: f64,
        curvature_weight: f64,
        targets: Vec<f64>,
        lattice: Lattice,
    ) -> Result<Self> {
        if coupling_weight < 0.0 || curvature_weight <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "weights must satisfy λ₁ ≥ 0, λ₂ > 0 (got {coupling_weight}, {curvature_weight})"
            )));
        }
        if targets.len() != lattice.n_sites() {
            return Err(Error::LengthMismatch {
                expected: lattice.n_sites(),
                got: targets.len(),
            });
        }
        Ok(GibbsEnergy {
            coupling_weight,
            curvature_weight,
            realization_seed: 0,
            targets,
            lattice,
        })
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn gradient_part(&self, omega: &[f64]) -> f64 {
        self.coupling_weight
            * self
                .lattice()
                .bonds()
                .iter()
                .map(|&(i, j)| (omega[i] - omega[j]).abs())
                .sum::<f64>()
    }

    pub fn pinning_part(&self, omega: &[f64]) -> f64 {
        self.curvature_weight
            * omega
                .iter()
                .zip(&self.targets)
                .map(|(w, t)| (w - t).powi(2))
                .sum::<f64>()
    }

    pub fn energy_of(&self, omega: &[f64]) -> Result<f64> {
        if omega.len() != self.targets.len() {
            return Err(Error::LengthMismatch {
                expected: self.targets.len(),
                got: omega.len(),
            });
        }
        Ok(self.gradient_part(omega) + self.pinning_part(omega))
    }

    /// Energy change when site `i` moves from `omega[i]` to `proposed`.
    pub fn local_delta(&self, omega: &[f64], i: usize, proposed: f64) -> f64 {
        let old = omega[i];
        let grad: f64 = self
            .lattice()
            .neighbors(i)
            .iter()
            .map(|&j| (proposed - omega[j]).abs() - (old - omega[j]).abs())
            .sum();
        let t = self.targets[i];
        self.coupling_weight * grad
            + self.curvature_weight * ((proposed - t).powi(2) - (old - t).powi(2))
    }
}

pub fn gibbs_energy(field: &FrequencyField, energy: &GibbsEnergy) -> Result<f64> {
    energy.energy_of(&field.frequencies)
}
