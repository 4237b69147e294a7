//! Saddle point of the instanton-liquid partition function.
//!
//! After the Gaussian integral over the frequency modes, the optimal (X₀, y0)
//! with y0 = iY₀ satisfy
//!
//! ```text
//! ħK̃ L^{d/2} / (2 k_BT Δ √X₀) = y0
//! X₀ = ħ⁻² Σ_q |b_q|² q² / (c·y0·q² + 1)²,     c = 2 k_BT Δ a / ħ²
//! ```
//!
//! and the correlation radius follows from r₀² = c·y0. Writing u = c·y0, the
//! combination y0²·X₀ = c⁻² Σ |b_q|² / (q² + 1/u)² grows monotonically in u,
//! so the root is bracketed once and found by bisection in log y0.
//! Temperature drops out of u entirely.

use serde::{Deserialize, Serialize};

use super::fourier::{fourier_forward, fourier_forward_2d};
use crate::error::{Error, Result};
use crate::model::{DisorderRealization, ModelConfig};

/// Source of the disorder mode power |b_q|² entering the saddle equations.
#[derive(Debug, Clone)]
pub enum ModeSpectrum {
    /// Explicit (q², |b_q|²) pairs, e.g. from a realization.
    Discrete(Vec<(f64, f64)>),
    /// 1D continuum (L → ∞ mode density L/2π) with a constant power.
    Continuum1d { power: f64 },
}

impl ModeSpectrum {
    pub fn from_realization(
        realization: &DisorderRealization,
        config: &ModelConfig,
    ) -> Result<Self> {
        let field = match config.dimension() {
            1 => fourier_forward(
                &realization.splittings,
                config.mean_splitting(),
                config.boundary(),
            )?,
            _ => fourier_forward_2d(
                &realization.splittings,
                config.side(),
                config.mean_splitting(),
                config.boundary(),
            )?,
        };
        let pairs = field
            .squared_wavenumbers()
            .into_iter()
            .zip(field.power())
            .filter(|(q2, _)| *q2 > 0.0)
            .collect();
        Ok(ModeSpectrum::Discrete(pairs))
    }

    /// ⟨|b_q|²⟩ = 2(δΔ)²a^d on every lattice mode of the configured lattice.
    pub fn lattice_average(config: &ModelConfig) -> Self {
        let s = config.side();
        let power = 2.0 * config.disorder_width().powi(2);
        let q: Vec<f64> = (0..s).map(|k| super::fourier::wavenumber(k, s)).collect();
        let pairs = if config.dimension() == 1 {
            q.iter()
                .filter(|v| **v != 0.0)
                .map(|v| (v * v, power))
                .collect()
        } else {
            let mut out = Vec::with_capacity(s * s);
            for qy in &q {
                for qx in &q {
                    let q2 = qx * qx + qy * qy;
                    if q2 > 0.0 {
                        out.push((q2, power));
                    }
                }
            }
            out
        };
        ModeSpectrum::Discrete(pairs)
    }

    /// ⟨|b_n|²⟩ = 2(δΔ)²a in the N → ∞ continuum.
    pub fn continuum_average(config: &ModelConfig) -> Self {
        ModeSpectrum::Continuum1d {
            power: 2.0 * config.disorder_width().powi(2),
        }
    }

    /// S(u) = Σ |b_q|² q² / (u q² + 1)²; X₀ = S(r₀²) with ħ = 1.
    pub fn weighted_sum(&self, u: f64, length: f64) -> f64 {
        match self {
            ModeSpectrum::Discrete(pairs) => pairs
                .iter()
                .map(|&(q2, p)| p * q2 / (u * q2 + 1.0).powi(2))
                .sum(),
            // (L/2π) ∫ q² / (u q² + 1)² dq = (L/2π) · π / (2 u^{3/2})
            ModeSpectrum::Continuum1d { power } => power * length / (4.0 * u.powf(1.5)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaddleWarning {
    /// r₀ exceeds a quarter of the system size.
    FiniteSize { r0: f64, limit: f64 },
    /// κ outside the regime where the 2D radius fits on the lattice.
    OutsideValidRange { kappa: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleSolution {
    pub x0: f64,
    pub y0: f64,
    pub r0: f64,
    /// Relative residuals of the two saddle equations at (x0, y0).
    pub residuals: [f64; 2],
    pub bracket: [f64; 2],
    pub iterations: usize,
    pub warnings: Vec<SaddleWarning>,
}

/// y0 in the 1D continuum with averaged disorder: 4ħ²K̃⁴a / [2k_BTΔ(δΔ)⁴].
pub fn closed_form_y0(config: &ModelConfig) -> f64 {
    4.0 * config.coupling().powi(4)
        / (2.0 * config.temperature() * config.mean_splitting() * config.disorder_width().powi(4))
}

/// r₀ = 2a(K̃/δΔ)².
pub fn closed_form_r0(config: &ModelConfig) -> f64 {
    2.0 * config.kappa().powi(2)
}

const R0_MIN: f64 = 1e-8;
const R0_MAX_FACTOR: f64 = 1e6;

/// Solves the saddle equations for an arbitrary mode spectrum.
pub fn solve_saddle_with(spectrum: &ModeSpectrum, config: &ModelConfig) -> Result<SaddleSolution> {
    let k = config.coupling();
    if k <= 0.0 {
        return Err(Error::InvalidInput("saddle point needs K̃ > 0".into()));
    }
    let t = config.temperature();
    let delta = config.mean_splitting();
    let length = config.length();
    let d = config.dimension() as f64;
    let c = 2.0 * t * delta;
    // y0² X₀ = target
    let target = k * k * length.powf(d) / (4.0 * t * t * delta * delta);
    let g = |ln_y: f64| -> f64 {
        let y = ln_y.exp();
        (2.0 * ln_y + spectrum.weighted_sum(c * y, length).ln()) - target.ln()
    };
    let mut lo = (R0_MIN * R0_MIN / c).ln();
    let mut hi = ((R0_MAX_FACTOR * length).powi(2) / c).ln();
    let (g_lo, g_hi) = (g(lo), g(hi));
    if !(g_lo <= 0.0 && g_hi >= 0.0) {
        return Err(Error::NoSignChange {
            lo: lo.exp(),
            hi: hi.exp(),
            saturated: g_hi < 0.0,
        });
    }
    let mut iterations = 0;
    while hi - lo > 1e-15 * hi.abs().max(1.0) && iterations < 400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let y0 = (0.5 * (lo + hi)).exp();
    let x0 = spectrum.weighted_sum(c * y0, length);
    let eq1 = k * length.powf(d / 2.0) / (2.0 * t * delta * x0.sqrt());
    let residuals = [
        ((eq1 - y0) / y0).abs(),
        ((target / (y0 * y0) - x0) / x0).abs(),
    ];
    let r0 = (c * y0).sqrt();
    let mut warnings = Vec::new();
    if r0 > length / 4.0 {
        warnings.push(SaddleWarning::FiniteSize {
            r0,
            limit: length / 4.0,
        });
    }
    Ok(SaddleSolution {
        x0,
        y0,
        r0,
        residuals,
        bracket: [lo.exp(), hi.exp()],
        iterations,
        warnings,
    })
}

/// 1D saddle point for a periodic chain using the realization's own |b_n|².
pub fn solve_saddle(
    realization: &DisorderRealization,
    config: &ModelConfig,
) -> Result<SaddleSolution> {
    if config.dimension() != 1 {
        return Err(Error::InvalidInput(
            "solve_saddle is one-dimensional; use solve_saddle_2d".into(),
        ));
    }
    let spectrum = ModeSpectrum::from_realization(realization, config)?;
    let mut sol = solve_saddle_with(&spectrum, config)?;
    // the 1D finite-size guard is only advisory
    sol.warnings
        .retain(|w| !matches!(w, SaddleWarning::FiniteSize { .. }));
    Ok(sol)
}

/// Saddle point on an M×M periodic square lattice with q = (2π/L)(n, m).
pub fn solve_saddle_2d(
    realization: &DisorderRealization,
    config: &ModelConfig,
) -> Result<SaddleSolution> {
    if config.dimension() != 2 {
        return Err(Error::InvalidInput(
            "solve_saddle_2d needs a two-dimensional configuration".into(),
        ));
    }
    let spectrum = ModeSpectrum::from_realization(realization, config)?;
    let mut sol = solve_saddle_with(&spectrum, config)?;
    let kappa = config.kappa();
    if !(0.3..=1.5).contains(&kappa) {
        sol.warnings
            .push(SaddleWarning::OutsideValidRange { kappa });
    }
    Ok(sol)
}

/// Continuum estimate of the 2D radius, ≈ a·exp(2κ²) to logarithmic accuracy.
pub fn closed_form_r0_2d(config: &ModelConfig) -> f64 {
    (2.0 * config.kappa().powi(2)).exp()
}
