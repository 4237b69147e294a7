//! Numerical simulator for frequency synchronization in disordered arrays of
//! interacting superconducting qubits.
//!
//! Modules:
//!
//! * [`model`]: dimensionless configuration, disorder realizations and
//!   frequency fields shared by everything else.
//! * [`instanton`]: frequency fields from the instanton-gas Gibbs measure:
//!   the non-interacting closed form, Metropolis sampling, and the saddle-point
//!   mode filter, plus the correlation estimator and correlation-radius fit.
//! * [`spectrum`]: transmission spectra built from Lorentzian drops, drop
//!   detection and the drop-count crossover.
//! * [`spinon`]: exact solution of the disordered transverse-field Ising chain
//!   (free fermions and dense diagonalization) and spinon localization lengths.
//! * [`harness`]: seeded sweeps, CSV/JSON persistence, run manifests and plots.
//!
//! Internal units: ħ = k_B = 1, the mean splitting Δ = 1 and the lattice
//! spacing a = 1.

pub mod error;
pub mod harness;
pub mod instanton;
pub mod model;
pub mod spectrum;
pub mod spinon;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    make_config, sample_disorder, Boundary, DisorderRealization, FrequencyField, Method,
    ModelConfig, RawParams,
};
