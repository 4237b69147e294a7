use serde::{Deserialize, Serialize};

use super::dense::{dense_solve, MAX_DENSE_SITES};
use super::tridiag::{eigen_all, eigenvalues};
use super::{Parity, SpinChainSpec};
use crate::error::{Error, Result};

pub const MAX_FREE_FERMION_SITES: usize = 4096;
pub const MAX_RECONSTRUCTED_SITES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinonSpectrum {
    /// Eₖ = Λₖ/2, ascending.
    pub energies: Vec<f64>,
    /// Site amplitudes φₖ (left singular vectors of A − B), orthonormal.
    pub wavefunctions: Vec<Vec<f64>>,
    pub iprs: Vec<f64>,
    /// Envelope-fit localization lengths (∞ when no decay is resolved).
    pub loc_lengths: Vec<f64>,
    pub vacuum_parity: Parity,
}

impl SpinonSpectrum {
    pub fn n_modes(&self) -> usize {
        self.energies.len()
    }

    /// −Σ Eₖ.
    pub fn ground_energy(&self) -> f64 {
        -self.energies.iter().sum::<f64>()
    }
}

pub fn inverse_participation_ratio(phi: &[f64]) -> f64 {
    let norm2: f64 = phi.iter().map(|x| x * x).sum();
    phi.iter().map(|x| x.powi(4)).sum::<f64>() / (norm2 * norm2)
}

/// Decay rate 1/ξ of a state's envelope.
///
/// The envelope is the running maximum of |φ| over ±2 sites. ln(envelope) is
/// fitted linearly in the distance from the peak over the central half of the
/// support (|φ| > 1e-10 of the peak), skipping the 5 outermost sites of the
/// chain. Returns `None` when fewer than three sites remain, and 0 when the
/// fit shows no decay.
pub fn localization_rate(phi: &[f64]) -> Option<f64> {
    let n = phi.len();
    let a: Vec<f64> = phi.iter().map(|x| x.abs()).collect();
    let (i0, peak) =
        a.iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if peak == 0.0 || n < 13 {
        return None;
    }
    let env: Vec<f64> = (0..n)
        .map(|i| {
            a[i.saturating_sub(2)..(i + 3).min(n)]
                .iter()
                .copied()
                .fold(0.0, f64::max)
        })
        .collect();
    let support: Vec<usize> = (0..n).filter(|&i| a[i] > 1e-10 * peak).collect();
    let (lo, hi) = (support[0], support[support.len() - 1]);
    let w = hi - lo;
    let from = (lo + w / 4).max(5);
    let to = (hi - w / 4).min(n - 6);
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, e) in env.iter().enumerate().take(to + 1).skip(from) {
        if i == i0 {
            continue;
        }
        let x = (i as f64 - i0 as f64).abs();
        let y = e.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        m += 1.0;
    }
    if m < 3.0 {
        return None;
    }
    let denom = m * sxx - sx * sx;
    if denom <= 0.0 {
        return None;
    }
    let slope = (m * sxy - sx * sy) / denom;
    Some((-slope).max(0.0))
}

fn loc_length(phi: &[f64]) -> f64 {
    match localization_rate(phi) {
        Some(r) if r > 0.0 => 1.0 / r,
        Some(_) => f64::INFINITY,
        None => f64::NAN,
    }
}

/// Diagonalizes the chain through its Jordan–Wigner free-fermion form.
pub fn free_fermion_solve(spec: &SpinChainSpec) -> Result<SpinonSpectrum> {
    let n = spec.n_sites();
    if n > MAX_FREE_FERMION_SITES {
        return Err(Error::InvalidInput(format!(
            "free-fermion solver is limited to {MAX_FREE_FERMION_SITES} sites, got {n}"
        )));
    }
    let (d, e) = spec.squared_bdg();
    let eig = eigen_all(&d, &e)?;
    let energies = eig
        .values
        .iter()
        .map(|l2| 0.5 * l2.max(0.0).sqrt())
        .collect();
    let iprs = eig
        .vectors
        .iter()
        .map(|v| inverse_participation_ratio(v))
        .collect();
    let loc_lengths = eig.vectors.iter().map(|v| loc_length(v)).collect();
    Ok(SpinonSpectrum {
        energies,
        wavefunctions: eig.vectors,
        iprs,
        loc_lengths,
        vacuum_parity: spec.vacuum_parity(),
    })
}

/// Spinon energies Eₖ alone, ascending, without eigenvectors.
pub fn spinon_energies(spec: &SpinChainSpec) -> Result<Vec<f64>> {
    let (d, e) = spec.squared_bdg();
    Ok(eigenvalues(&d, &e)?
        .into_iter()
        .map(|l2| 0.5 * l2.max(0.0).sqrt())
        .collect())
}

/// Many-body levels split by fermion parity, each ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManyBodyLevels {
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
}

impl ManyBodyLevels {
    pub fn all(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.even.iter().chain(&self.odd).copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Every occupation pattern of the spinon modes: E = −Σ Eₖ + Σ_{occupied} 2Eₖ.
pub fn many_body_levels(spectrum: &SpinonSpectrum) -> Result<ManyBodyLevels> {
    let n = spectrum.n_modes();
    if n > MAX_RECONSTRUCTED_SITES {
        return Err(Error::InvalidInput(format!(
            "many-body reconstruction is limited to {MAX_RECONSTRUCTED_SITES} modes"
        )));
    }
    let lambda: Vec<f64> = spectrum.energies.iter().map(|e| 2.0 * e).collect();
    let size = 1usize << n;
    let mut level = vec![spectrum.ground_energy(); size];
    let mut even = Vec::with_capacity(size / 2 + 1);
    let mut odd = Vec::with_capacity(size / 2 + 1);
    for mask in 0..size {
        if mask > 0 {
            level[mask] = level[mask & (mask - 1)] + lambda[mask.trailing_zeros() as usize];
        }
        let parity = if mask.count_ones() % 2 == 0 {
            spectrum.vacuum_parity
        } else {
            spectrum.vacuum_parity.flip()
        };
        match parity {
            Parity::Even => even.push(level[mask]),
            Parity::Odd => odd.push(level[mask]),
        }
    }
    even.sort_by(f64::total_cmp);
    odd.sort_by(f64::total_cmp);
    Ok(ManyBodyLevels { even, odd })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionCheck {
    pub z_spectral: f64,
    pub z_product: f64,
    pub ratio: f64,
    pub ln_z_spectral: f64,
    pub ln_z_product: f64,
}

fn log_sum_exp(levels: &[f64], temperature: f64) -> f64 {
    let min = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = levels
        .iter()
        .map(|e| (-(e - min) / temperature).exp())
        .sum();
    -min / temperature + s.ln()
}

/// At K̃ = 0, compares Σ e^{−E/T} over the exact spectrum with Π 2cosh(Δᵢ/2T).
pub fn partition_check(spec: &SpinChainSpec, temperature: f64) -> Result<PartitionCheck> {
    if spec.coupling != 0.0 {
        return Err(Error::InvalidInput("partition check needs K̃ = 0".into()));
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "temperature {temperature} must be positive"
        )));
    }
    let levels = if spec.n_sites() <= MAX_DENSE_SITES {
        dense_solve(spec)?.eigenvalues
    } else {
        many_body_levels(&free_fermion_solve(spec)?)?.all()
    };
    let ln_z_spectral = log_sum_exp(&levels, temperature);
    let ln_z_product: f64 = spec
        .splittings
        .iter()
        .map(|d| {
            let x = (d / (2.0 * temperature)).abs();
            x + (-2.0 * x).exp().ln_1p()
        })
        .sum();
    Ok(PartitionCheck {
        z_spectral: ln_z_spectral.exp(),
        z_product: ln_z_product.exp(),
        ratio: (ln_z_spectral - ln_z_product).exp(),
        ln_z_spectral,
        ln_z_product,
    })
}
