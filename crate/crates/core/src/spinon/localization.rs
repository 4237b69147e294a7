use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::free::{inverse_participation_ratio, localization_rate};
use super::tridiag::{eigenvalue_by_index, inverse_iteration};
use super::SpinChainSpec;
use crate::error::{Error, Result};
use crate::model::rng::derive_seed;
use crate::model::{sample_disorder, ModelConfig};
use crate::stats::{linear_fit, mean_stderr, LineFit};

/// Fraction of the spinon band, centred on its middle, used for the scan.
pub const BAND_CENTER_FRACTION: f64 = 0.1;

/// Eigenvector amplitudes for the central 10% of spinon states, by Sturm
/// bisection and inverse iteration on (A − B)(A − B)ᵀ.
pub fn band_center_states(spec: &SpinChainSpec) -> Result<Vec<Vec<f64>>> {
    let n = spec.n_sites();
    let (d, e) = spec.squared_bdg();
    let width = ((n as f64 * BAND_CENTER_FRACTION).round() as usize).max(1);
    let first = (n - width) / 2;
    let values: Vec<f64> = (first..first + width)
        .map(|k| eigenvalue_by_index(&d, &e, k))
        .collect::<Result<_>>()?;
    let scale = d
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    inverse_iteration(&d, &e, &values, 1e-5 * scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanWarning {
    ShortChain { n_sites: usize },
    FewRealizations { realizations: usize },
    KappaOutsideRange { kappa: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationPoint {
    pub kappa: f64,
    /// 1 / ⟨1/ξ⟩ over band-centre states and realizations.
    pub loc_length: f64,
    /// Standard error propagated from the realization spread of ⟨1/ξ⟩.
    pub loc_length_stderr: f64,
    /// Mean IPR⁻¹ over the same states.
    pub inverse_ipr: f64,
    pub realizations: usize,
    /// ξ exceeds N/4.
    pub finite_size: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationScan {
    pub n_sites: usize,
    pub points: Vec<LocalizationPoint>,
    /// ln ξ against ln κ over points without the finite-size flag.
    pub slope: Option<LineFit>,
    pub warnings: Vec<ScanWarning>,
}

/// Per-realization mean decay rate and mean IPR⁻¹ of the band-centre states.
pub fn band_center_statistics(spec: &SpinChainSpec) -> Result<(f64, f64)> {
    let states = band_center_states(spec)?;
    let rates: Vec<f64> = states.iter().filter_map(|v| localization_rate(v)).collect();
    if rates.is_empty() {
        return Err(Error::InvalidInput(
            "no band-centre state admits an envelope fit".into(),
        ));
    }
    let rate = rates.iter().sum::<f64>() / rates.len() as f64;
    let inv_ipr = states
        .iter()
        .map(|v| 1.0 / inverse_participation_ratio(v))
        .sum::<f64>()
        / states.len() as f64;
    Ok((rate, inv_ipr))
}

/// Band-centre localization length at the coupling of `config`, averaging
/// the decay rate over realizations seeded by `derive_seed(master, point, r)`.
pub fn localization_point(
    config: &ModelConfig,
    point: u64,
    realizations: usize,
    master_seed: u64,
) -> Result<LocalizationPoint> {
    if realizations == 0 {
        return Err(Error::InvalidInput(
            "localization needs at least one realization".into(),
        ));
    }
    let per: Vec<(f64, f64)> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let disorder = sample_disorder(config, derive_seed(master_seed, point, r as u64));
            band_center_statistics(&SpinChainSpec::from_realization(&disorder, config)?)
        })
        .collect::<Result<_>>()?;
    let rates: Vec<f64> = per.iter().map(|x| x.0).collect();
    Ok(aggregate_point(
        config,
        &rates,
        per.iter().map(|x| x.1).sum::<f64>() / per.len() as f64,
    ))
}

/// Combines per-realization decay rates into a localization point.
pub fn aggregate_point(config: &ModelConfig, rates: &[f64], inverse_ipr: f64) -> LocalizationPoint {
    let est = mean_stderr(rates);
    let (loc_length, loc_length_stderr) = if est.mean > 0.0 {
        (1.0 / est.mean, est.stderr / (est.mean * est.mean))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    LocalizationPoint {
        kappa: config.kappa(),
        loc_length,
        loc_length_stderr,
        inverse_ipr,
        realizations: rates.len(),
        finite_size: loc_length > config.n_sites() as f64 / 4.0,
    }
}

/// ln ξ against ln κ over points without the finite-size flag.
pub fn localization_slope(points: &[LocalizationPoint]) -> Option<LineFit> {
    let usable: Vec<&LocalizationPoint> = points
        .iter()
        .filter(|p| !p.finite_size && p.kappa > 0.0)
        .collect();
    (usable.len() >= 2).then(|| {
        let x: Vec<f64> = usable.iter().map(|p| p.kappa.ln()).collect();
        let y: Vec<f64> = usable.iter().map(|p| p.loc_length.ln()).collect();
        linear_fit(&x, &y)
    })
}

/// Band-centre localization length for each κ, using the disorder of `config`
/// (length, δΔ) with K̃ = κ·δΔ and an open chain.
pub fn localization_scan(
    config: &ModelConfig,
    kappas: &[f64],
    realizations: usize,
    master_seed: u64,
) -> Result<LocalizationScan> {
    if kappas.is_empty() || realizations == 0 {
        return Err(Error::InvalidInput(
            "localization scan needs κ values and realizations".into(),
        ));
    }
    let n = config.n_sites();
    let mut warnings = Vec::new();
    if n < 1000 {
        warnings.push(ScanWarning::ShortChain { n_sites: n });
    }
    if realizations < 20 {
        warnings.push(ScanWarning::FewRealizations { realizations });
    }
    let mut points = Vec::with_capacity(kappas.len());
    for (p, &kappa) in kappas.iter().enumerate() {
        if !(2.0..=8.0).contains(&kappa) {
            warnings.push(ScanWarning::KappaOutsideRange { kappa });
        }
        points.push(localization_point(
            &config.with_kappa(kappa)?,
            p as u64,
            realizations,
            master_seed,
        )?);
    }
    Ok(LocalizationScan {
        n_sites: n,
        slope: localization_slope(&points),
        points,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_config, RawParams};
    use crate::spinon::free_fermion_solve;

    fn cfg(n: usize, dd: f64) -> ModelConfig {
        make_config(&RawParams::dimensionless(n, dd, 2.0 * dd, 0.1)).unwrap()
    }

    #[test]
    fn band_center_states_match_full_solve() {
        let c = cfg(300, 0.01);
        let r = sample_disorder(&c, 4);
        let spec = SpinChainSpec::from_realization(&r, &c).unwrap();
        let full = free_fermion_solve(&spec).unwrap();
        let states = band_center_states(&spec).unwrap();
        assert_eq!(states.len(), 30);
        for (k, v) in states.iter().enumerate() {
            let w = &full.wavefunctions[135 + k];
            let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-8, "state {k}: {dot}");
        }
    }

    #[test]
    fn strong_coupling_on_short_chain_is_flagged() {
        let scan = localization_scan(&cfg(200, 0.01), &[30.0], 2, 1).unwrap();
        assert!(scan.points[0].finite_size);
        assert!(scan.slope.is_none());
        assert!(scan
            .warnings
            .contains(&ScanWarning::ShortChain { n_sites: 200 }));
        assert!(scan
            .warnings
            .contains(&ScanWarning::KappaOutsideRange { kappa: 30.0 }));
    }

    #[test]
    fn clean_chain_is_extended() {
        let c = make_config(&RawParams::dimensionless(400, 0.0, 0.2, 0.1)).unwrap();
        let spec = SpinChainSpec::new(vec![1.0; 400], c.coupling()).unwrap();
        for v in band_center_states(&spec).unwrap() {
            let rate = localization_rate(&v).unwrap();
            assert!(rate < 4.0 / 400.0, "{rate}");
        }
    }

    #[test]
    fn localization_grows_with_coupling() {
        let scan = localization_scan(&cfg(600, 0.01), &[2.0, 4.0], 4, 9).unwrap();
        assert!(scan.points[1].loc_length > scan.points[0].loc_length);
        assert!(scan.slope.unwrap().slope > 1.0);
    }

    #[test]
    fn scan_is_deterministic() {
        let a = localization_scan(&cfg(300, 0.01), &[2.0, 3.0, 4.0], 3, 5).unwrap();
        let b = localization_scan(&cfg(300, 0.01), &[2.0, 3.0, 4.0], 3, 5).unwrap();
        assert_eq!(a, b);
    }
}
