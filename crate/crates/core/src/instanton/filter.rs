//! Saddle-point mode filter: a_n = b_n / (q_n² r₀² + 1).

use super::fourier::{fourier_forward, fourier_forward_2d, fourier_inverse};
use super::saddle::{solve_saddle, solve_saddle_2d, SaddleSolution};
use crate::error::{Error, Result};
use crate::model::{DisorderRealization, FrequencyField, Method, ModelConfig};

/// Filters the realization's disorder modes with a given radius. An infinite
/// radius keeps only the zero mode (complete synchronization).
pub fn apply_mode_filter(
    realization: &DisorderRealization,
    config: &ModelConfig,
    r0: f64,
) -> Result<FrequencyField> {
    if r0.is_nan() || r0 < 0.0 {
        return Err(Error::InvalidInput(format!(
            "correlation radius {r0} must be non-negative"
        )));
    }
    if realization.len() != config.n_sites() {
        return Err(Error::LengthMismatch {
            expected: config.n_sites(),
            got: realization.len(),
        });
    }
    let offset = config.mean_splitting();
    let mut field = match config.dimension() {
        1 => fourier_forward(&realization.splittings, offset, config.boundary())?,
        _ => fourier_forward_2d(
            &realization.splittings,
            config.side(),
            offset,
            config.boundary(),
        )?,
    };
    let r2 = r0 * r0;
    let q2s = field.squared_wavenumbers();
    for (c, q2) in field.modes.iter_mut().zip(q2s) {
        if q2 > 0.0 {
            *c = if r2.is_infinite() {
                *c * 0.0
            } else {
                *c / (q2 * r2 + 1.0)
            };
        }
    }
    FrequencyField::new(fourier_inverse(&field), Method::SaddleFilter, realization)
}

/// Solves the saddle point for this realization and filters its disorder.
pub fn saddle_filter(
    realization: &DisorderRealization,
    config: &ModelConfig,
) -> Result<(FrequencyField, SaddleSolution)> {
    let sol = match config.dimension() {
        1 => solve_saddle(realization, config)?,
        _ => solve_saddle_2d(realization, config)?,
    };
    let field = apply_mode_filter(realization, config, sol.r0)?;
    Ok((field, sol))
}

/// Like [`saddle_filter`], but a saturated saddle (the coupling side of the
/// equation exceeds the largest attainable disorder side on this lattice) is
/// mapped to r₀ = ∞ instead of an error, and zero coupling to r₀ = 0.
/// Returns the radius used.
pub fn synchronized_filter(
    realization: &DisorderRealization,
    config: &ModelConfig,
) -> Result<(FrequencyField, f64)> {
    if config.coupling() == 0.0 {
        return Ok((apply_mode_filter(realization, config, 0.0)?, 0.0));
    }
    match saddle_filter(realization, config) {
        Ok((field, sol)) => Ok((field, sol.r0)),
        Err(Error::NoSignChange {
            saturated: true, ..
        }) => Ok((
            apply_mode_filter(realization, config, f64::INFINITY)?,
            f64::INFINITY,
        )),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instanton::fourier::fourier_forward;
    use crate::model::{make_config, sample_disorder, Boundary, RawParams};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cfg(n: usize, kappa: f64) -> ModelConfig {
        make_config(&RawParams::dimensionless(n, 0.01, kappa * 0.01, 0.1)).unwrap()
    }

    #[test]
    fn vanishing_radius_is_identity() {
        let c = cfg(256, 1.0);
        let r = sample_disorder(&c, 3);
        let f = apply_mode_filter(&r, &c, 1e-6).unwrap();
        for (w, d) in f.frequencies.iter().zip(&r.splittings) {
            assert!((w - d).abs() <= 1e-6 * d);
        }
        assert_eq!(f.method, Method::SaddleFilter);
    }

    #[test]
    fn zero_mode_passes_unchanged() {
        let c = cfg(128, 1.0);
        let r = sample_disorder(&c, 4);
        let b = fourier_forward(&r.splittings, 1.0, Boundary::Periodic).unwrap();
        for r0 in [0.5, 3.0, 40.0, f64::INFINITY] {
            let f = apply_mode_filter(&r, &c, r0).unwrap();
            let a = fourier_forward(&f.frequencies, 1.0, Boundary::Periodic).unwrap();
            assert!((a.mode(0) - b.mode(0)).norm() <= 1e-12);
            let mean_in: f64 = r.splittings.iter().sum::<f64>() / 128.0;
            assert!((f.mean() - mean_in).abs() <= 1e-12);
        }
    }

    #[test]
    fn half_power_point_halves_mode_three() {
        let n = 64;
        let c = cfg(n, 1.0);
        let amp = 0.004;
        let d: Vec<f64> = (0..n)
            .map(|i| 1.0 + amp * (2.0 * PI * 3.0 * i as f64 / n as f64).cos())
            .collect();
        let r = DisorderRealization::from_splittings(&c, d, 0).unwrap();
        let r0 = n as f64 / (2.0 * PI * 3.0);
        let f = apply_mode_filter(&r, &c, r0).unwrap();
        let b = fourier_forward(&r.splittings, 1.0, Boundary::Periodic).unwrap();
        let a = fourier_forward(&f.frequencies, 1.0, Boundary::Periodic).unwrap();
        assert!((a.mode(3).norm() - 0.5 * b.mode(3).norm()).abs() <= 1e-12);
        assert!((a.mode(-3).norm() - 0.5 * b.mode(-3).norm()).abs() <= 1e-12);
    }

    #[test]
    fn infinite_radius_gives_uniform_field() {
        let c = cfg(32, 1.0);
        let r = sample_disorder(&c, 9);
        let f = apply_mode_filter(&r, &c, f64::INFINITY).unwrap();
        let m = f.mean();
        assert!(f.frequencies.iter().all(|w| (w - m).abs() <= 1e-12));
    }

    #[test]
    fn saturated_saddle_maps_to_full_synchronization() {
        let c = cfg(20, 50.0);
        let r = sample_disorder(&c, 1);
        let (f, r0) = synchronized_filter(&r, &c).unwrap();
        assert!(r0.is_infinite());
        let m = f.mean();
        assert!(f.frequencies.iter().all(|w| (w - m).abs() <= 1e-12));
    }

    #[test]
    fn open_chain_is_rejected() {
        let c = cfg(32, 1.0).with_boundary(Boundary::Open).unwrap();
        let r = sample_disorder(&c, 1);
        assert!(matches!(
            apply_mode_filter(&r, &c, 2.0),
            Err(Error::NeedsPeriodic(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn filter_is_a_contraction(seed in 0u64..1000, r0 in 0.01f64..100.0) {
            let c = cfg(64, 1.0);
            let r = sample_disorder(&c, seed);
            let f = apply_mode_filter(&r, &c, r0).unwrap();
            let b = fourier_forward(&r.splittings, 1.0, Boundary::Periodic).unwrap();
            let a = fourier_forward(&f.frequencies, 1.0, Boundary::Periodic).unwrap();
            for n in 1..32i64 {
                prop_assert!(a.mode(n).norm() <= b.mode(n).norm() * (1.0 + 1e-12) + 1e-15);
            }
        }

        #[test]
        fn filter_commutes_with_cyclic_shift(seed in 0u64..1000, shift in 1usize..64) {
            let c = cfg(64, 1.0);
            let r = sample_disorder(&c, seed);
            let (f, _) = saddle_filter(&r, &c).unwrap();
            let (g, _) = saddle_filter(&r.rotated(shift), &c).unwrap();
            let mut shifted = f.frequencies.clone();
            shifted.rotate_right(shift);
            for (x, y) in shifted.iter().zip(&g.frequencies) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
