//! Dimensionless model configuration, disorder realizations and frequency fields.
//!
//! Raw parameters may be given in any energy unit; [`make_config`] rescales
//! them so that the mean splitting Δ and the lattice spacing a are both 1,
//! with ħ = k_B = 1. The scale factors are kept in [`UnitConvention`] and
//! written into every sidecar.

mod config_file;
mod disorder;
mod field;
pub mod rng;

pub use config_file::{
    load_config_file, parse_config_str, ConfigFile, McmcSection, SpectrumSection, SCHEMA_VERSION,
};
pub use disorder::{sample_disorder, DisorderRealization};
pub use field::{FrequencyField, Method};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

fn default_dimension() -> u8 {
    1
}

fn default_spacing() -> f64 {
    1.0
}

/// Model parameters as a user writes them, in a common (arbitrary) energy unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    /// Total number of qubits. In two dimensions this must be a perfect square.
    pub n_sites: usize,
    #[serde(default = "default_dimension")]
    pub dimension: u8,
    #[serde(default)]
    pub boundary: Boundary,
    pub mean_splitting: f64,
    pub disorder_width: f64,
    pub coupling: f64,
    pub temperature: f64,
    #[serde(default = "default_spacing")]
    pub lattice_spacing: f64,
}

impl RawParams {
    /// Parameters already expressed in units of the mean splitting.
    pub fn dimensionless(
        n_sites: usize,
        disorder_width: f64,
        coupling: f64,
        temperature: f64,
    ) -> Self {
        RawParams {
            n_sites,
            dimension: 1,
            boundary: Boundary::Periodic,
            mean_splitting: 1.0,
            disorder_width,
            coupling,
            temperature,
            lattice_spacing: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitConvention {
    pub hbar: f64,
    pub k_b: f64,
    /// Mean splitting Δ expressed in the raw energy unit.
    pub energy_unit: f64,
    /// Lattice spacing a expressed in the raw length unit.
    pub length_unit: f64,
}

/// Validated configuration in internal units (Δ = a = ħ = k_B = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    n_sites: usize,
    dimension: u8,
    boundary: Boundary,
    disorder_width: f64,
    coupling: f64,
    temperature: f64,
    units: UnitConvention,
}

pub fn make_config(raw: &RawParams) -> Result<ModelConfig> {
    let finite = [
        ("mean_splitting", raw.mean_splitting),
        ("disorder_width", raw.disorder_width),
        ("coupling", raw.coupling),
        ("temperature", raw.temperature),
        ("lattice_spacing", raw.lattice_spacing),
    ];
    for (name, v) in finite {
        if !v.is_finite() {
            return Err(Error::Config(format!("{name} must be finite, got {v}")));
        }
    }
    if raw.n_sites < 2 {
        return Err(Error::Config(format!(
            "n_sites must be at least 2, got {}",
            raw.n_sites
        )));
    }
    if raw.dimension != 1 && raw.dimension != 2 {
        return Err(Error::Config(format!(
            "dimension must be 1 or 2, got {}",
            raw.dimension
        )));
    }
    if raw.dimension == 2 {
        let side = integer_sqrt(raw.n_sites);
        if side * side != raw.n_sites {
            return Err(Error::Config(format!(
                "2D lattices need a square number of sites, got {}",
                raw.n_sites
            )));
        }
    }
    if raw.mean_splitting <= 0.0 {
        return Err(Error::Config("mean_splitting must be positive".into()));
    }
    if raw.lattice_spacing <= 0.0 {
        return Err(Error::Config("lattice_spacing must be positive".into()));
    }
    if raw.temperature <= 0.0 {
        return Err(Error::Config(format!(
            "temperature must be positive, got {}",
            raw.temperature
        )));
    }
    if raw.disorder_width < 0.0 {
        return Err(Error::Config("disorder_width must be non-negative".into()));
    }
    if raw.coupling < 0.0 {
        return Err(Error::Config("coupling must be non-negative".into()));
    }
    let scale = raw.mean_splitting;
    let disorder_width = raw.disorder_width / scale;
    let coupling = raw.coupling / scale;
    let temperature = raw.temperature / scale;
    if disorder_width >= 1.0 {
        return Err(Error::ValidityRegime(format!(
            "disorder width {disorder_width} must be below the mean splitting"
        )));
    }
    if coupling >= 1.0 {
        return Err(Error::ValidityRegime(format!(
            "coupling {coupling} must be below the mean splitting"
        )));
    }
    Ok(ModelConfig {
        n_sites: raw.n_sites,
        dimension: raw.dimension,
        boundary: raw.boundary,
        disorder_width,
        coupling,
        temperature,
        units: UnitConvention {
            hbar: 1.0,
            k_b: 1.0,
            energy_unit: scale,
            length_unit: raw.lattice_spacing,
        },
    })
}

fn integer_sqrt(n: usize) -> usize {
    let mut s = (n as f64).sqrt() as usize;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

impl ModelConfig {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of sites along one edge (N in 1D, M for an M×M lattice).
    pub fn side(&self) -> usize {
        if self.dimension == 2 {
            integer_sqrt(self.n_sites)
        } else {
            self.n_sites
        }
    }

    /// Linear system size L in units of a.
    pub fn length(&self) -> f64 {
        self.side() as f64
    }

    /// Always 1: the mean splitting is the energy unit.
    pub fn mean_splitting(&self) -> f64 {
        1.0
    }

    pub fn disorder_width(&self) -> f64 {
        self.disorder_width
    }

    /// Per-site standard deviation of the splittings, √2·δΔ, so that the
    /// disorder-averaged mode power is ⟨|b_n|²⟩ = 2(δΔ)²a.
    pub fn site_std(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.disorder_width
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// κ = K̃/δΔ. Infinite for a clean lattice with non-zero coupling.
    pub fn kappa(&self) -> f64 {
        if self.coupling == 0.0 {
            0.0
        } else if self.disorder_width == 0.0 {
            f64::INFINITY
        } else {
            self.coupling / self.disorder_width
        }
    }

    pub fn units(&self) -> &UnitConvention {
        &self.units
    }

    /// Inverse of [`make_config`].
    pub fn to_raw(&self) -> RawParams {
        let s = self.units.energy_unit;
        RawParams {
            n_sites: self.n_sites,
            dimension: self.dimension,
            boundary: self.boundary,
            mean_splitting: s,
            disorder_width: self.disorder_width * s,
            coupling: self.coupling * s,
            temperature: self.temperature * s,
            lattice_spacing: self.units.length_unit,
        }
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    fn rebuild(&self, edit: impl FnOnce(&mut RawParams)) -> Result<ModelConfig> {
        let mut raw = self.to_raw();
        edit(&mut raw);
        make_config(&raw)
    }

    pub fn with_coupling(&self, coupling: f64) -> Result<ModelConfig> {
        let s = self.units.energy_unit;
        self.rebuild(|r| r.coupling = coupling * s)
    }

    /// Sets K̃ = κ·δΔ at fixed disorder.
    pub fn with_kappa(&self, kappa: f64) -> Result<ModelConfig> {
        self.with_coupling(kappa * self.disorder_width)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<ModelConfig> {
        let s = self.units.energy_unit;
        self.rebuild(|r| r.temperature = temperature * s)
    }

    pub fn with_n_sites(&self, n_sites: usize) -> Result<ModelConfig> {
        self.rebuild(|r| r.n_sites = n_sites)
    }

    pub fn with_dimension(&self, dimension: u8) -> Result<ModelConfig> {
        self.rebuild(|r| r.dimension = dimension)
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Result<ModelConfig> {
        self.rebuild(|r| r.boundary = boundary)
    }

    pub fn with_disorder_width(&self, disorder_width: f64) -> Result<ModelConfig> {
        let s = self.units.energy_unit;
        self.rebuild(|r| r.disorder_width = disorder_width * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_operating_point_has_kappa_three() {
        let c = make_config(&RawParams::dimensionless(20, 0.01, 0.03, 0.1)).unwrap();
        assert!((c.kappa() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn clean_noninteracting_limit_is_valid() {
        let c = make_config(&RawParams::dimensionless(2, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(c.kappa(), 0.0);
    }

    #[test]
    fn strong_coupling_is_a_validity_error() {
        let err = make_config(&RawParams::dimensionless(8, 0.01, 1.5, 0.1)).unwrap_err();
        assert!(matches!(err, Error::ValidityRegime(_)));
        let err = make_config(&RawParams::dimensionless(8, 1.0, 0.1, 0.1)).unwrap_err();
        assert!(matches!(err, Error::ValidityRegime(_)));
    }

    #[test]
    fn rejects_bad_sizes_and_temperatures() {
        for (n, t) in [(0, 0.1), (1, 0.1), (8, 0.0), (8, -1.0)] {
            let err = make_config(&RawParams::dimensionless(n, 0.01, 0.01, t)).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{n} {t}: {err}");
        }
    }

    #[test]
    fn two_dimensional_needs_square_count() {
        let mut raw = RawParams::dimensionless(50, 0.01, 0.01, 0.1);
        raw.dimension = 2;
        assert!(make_config(&raw).is_err());
        raw.n_sites = 64;
        let c = make_config(&raw).unwrap();
        assert_eq!(c.side(), 8);
    }

    #[test]
    fn hash_changes_with_parameters() {
        let a = make_config(&RawParams::dimensionless(20, 0.01, 0.03, 0.1)).unwrap();
        let b = a.with_kappa(4.0).unwrap();
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), a.clone().hash());
    }

    proptest! {
        #[test]
        fn unit_round_trip(
            scale in 1e-3f64..1e3,
            dd in 0.0f64..0.99,
            k in 0.0f64..0.99,
            t in 1e-4f64..10.0,
            a in 1e-3f64..1e3,
            n in 2usize..5000,
        ) {
            let raw = RawParams {
                n_sites: n,
                dimension: 1,
                boundary: Boundary::Open,
                mean_splitting: scale,
                disorder_width: dd * scale,
                coupling: k * scale,
                temperature: t * scale,
                lattice_spacing: a,
            };
            let back = make_config(&raw).unwrap().to_raw();
            let rel = |x: f64, y: f64| if x == 0.0 { y.abs() } else { ((x - y) / x).abs() };
            prop_assert!(rel(raw.mean_splitting, back.mean_splitting) <= 1e-12);
            prop_assert!(rel(raw.disorder_width, back.disorder_width) <= 1e-12);
            prop_assert!(rel(raw.coupling, back.coupling) <= 1e-12);
            prop_assert!(rel(raw.temperature, back.temperature) <= 1e-12);
            prop_assert!(rel(raw.lattice_spacing, back.lattice_spacing) <= 1e-12);
            prop_assert_eq!(raw.n_sites, back.n_sites);
            prop_assert_eq!(raw.boundary, back.boundary);
        }
    }
}
