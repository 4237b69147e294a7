//! Least-squares fit of A·(1 + |x|/r₀)e^{−|x|/r₀} to a correlation estimate.

use serde::{Deserialize, Serialize};

use super::correlation::CorrelationEstimate;
use crate::error::{Error, Result};

pub const MIN_BINS: usize = 10;
const SCAN_POINTS: usize = 240;
const GOLDEN_TOL: f64 = 1e-13;
const MAX_GOLDEN: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R0Fit {
    pub r0: f64,
    pub amplitude: f64,
    /// Weighted relative L2 misfit ‖y − A g‖ / ‖y‖.
    pub residual: f64,
    pub converged: bool,
    /// The optimum sits on the edge of [a/10, L/2].
    pub boundary_pinned: bool,
}

fn shape(x: f64, r0: f64) -> f64 {
    let s = x.abs() / r0;
    (1.0 + s) * (-s).exp()
}

struct Problem<'a> {
    x: &'a [f64],
    y: &'a [f64],
    w: Vec<f64>,
}

impl Problem<'_> {
    /// Optimal amplitude and weighted squared misfit at a given r₀.
    fn eval(&self, r0: f64) -> (f64, f64) {
        let (mut sgy, mut sgg) = (0.0, 0.0);
        for ((x, y), w) in self.x.iter().zip(self.y).zip(&self.w) {
            let g = shape(*x, r0);
            sgy += w * g * y;
            sgg += w * g * g;
        }
        let a = if sgg > 0.0 { sgy / sgg } else { 0.0 };
        let chi2 = self
            .x
            .iter()
            .zip(self.y)
            .zip(&self.w)
            .map(|((x, y), w)| w * (y - a * shape(*x, r0)).powi(2))
            .sum();
        (a, chi2)
    }
}

/// Fits r₀ on [a/10, L/2]: coarse log-spaced scan, then golden-section search
/// in ln r₀ around the best scan point. The amplitude is solved analytically.
/// Weights are inverse variances, or uniform when any standard error is zero.
pub fn fit_r0(estimate: &CorrelationEstimate) -> Result<R0Fit> {
    let n = estimate.separations.len();
    if n < MIN_BINS {
        return Err(Error::InvalidInput(format!(
            "fit needs at least {MIN_BINS} separation bins, got {n}"
        )));
    }
    if estimate.r_values.len() != n || estimate.r_stderr.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: estimate.r_values.len().min(estimate.r_stderr.len()),
        });
    }
    if estimate
        .r_values
        .iter()
        .chain(&estimate.r_stderr)
        .any(|v| !v.is_finite())
    {
        return Err(Error::InvalidInput(
            "correlation estimate has non-finite entries".into(),
        ));
    }
    let w = if estimate.r_stderr.iter().all(|s| *s > 0.0) {
        estimate.r_stderr.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; n]
    };
    let p = Problem {
        x: &estimate.separations,
        y: &estimate.r_values,
        w,
    };
    let lo = 0.1f64.ln();
    let hi = (0.5 * estimate.length).max(0.2).ln();
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let best = (0..SCAN_POINTS)
        .min_by(|&i, &j| p.eval(grid[i].exp()).1.total_cmp(&p.eval(grid[j].exp()).1))
        .unwrap_or(0);
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(SCAN_POINTS - 1)];
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| p.eval(t.exp()).1;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut converged = false;
    for _ in 0..MAX_GOLDEN {
        if (b - a).abs() <= GOLDEN_TOL {
            converged = true;
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    let r0 = t.exp();
    let (amplitude, chi2) = p.eval(r0);
    let norm: f64 = p.y.iter().zip(&p.w).map(|(y, w)| w * y * y).sum();
    let residual = if norm > 0.0 {
        (chi2 / norm).sqrt()
    } else {
        0.0
    };
    let boundary_pinned = (t - lo).abs() < 1e-6 || (hi - t).abs() < 1e-6;
    Ok(R0Fit {
        r0,
        amplitude,
        residual,
        converged,
        boundary_pinned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instanton::correlation::analytic_correlation;

    fn synthetic(r0: f64, dd: f64, bins: usize, length: f64) -> CorrelationEstimate {
        let separations: Vec<f64> = (0..bins).map(|x| x as f64).collect();
        CorrelationEstimate {
            r_values: separations
                .iter()
                .map(|&x| analytic_correlation(x, r0, dd))
                .collect(),
            r_stderr: vec![0.0; bins],
            separations,
            n_realizations: 0,
            length,
            config_hash: String::new(),
            fitted_r0: None,
            fitted_amplitude: None,
            fit_residual: None,
        }
    }

    #[test]
    fn noiseless_curve_recovers_radius_and_amplitude() {
        let est = synthetic(18.0, 0.01, 145, 4096.0);
        let fit = fit_r0(&est).unwrap();
        assert!((fit.r0 - 18.0).abs() <= 1e-6, "{}", fit.r0);
        let amp = 0.01f64.powi(2) / (2.0 * 18.0);
        assert!((fit.amplitude - amp).abs() <= 1e-9 * amp);
        assert!(fit.converged && !fit.boundary_pinned);
        assert!(fit.residual < 1e-8);
    }

    #[test]
    fn weights_do_not_bias_a_perfect_curve() {
        let mut est = synthetic(7.5, 0.02, 60, 512.0);
        est.r_stderr = (0..60).map(|x| 1e-6 * (1.0 + x as f64)).collect();
        let fit = fit_r0(&est).unwrap();
        assert!((fit.r0 - 7.5).abs() <= 1e-6);
    }

    #[test]
    fn flat_data_pins_to_the_upper_edge() {
        let mut est = synthetic(18.0, 0.01, 20, 40.0);
        est.r_values = vec![1.0; 20];
        let fit = fit_r0(&est).unwrap();
        assert!(fit.boundary_pinned);
        assert!((fit.r0 - 20.0).abs() < 1e-3);
    }

    #[test]
    fn short_estimates_are_rejected() {
        assert!(fit_r0(&synthetic(3.0, 0.01, 9, 64.0)).is_err());
    }

    #[test]
    fn records_fit_on_estimate() {
        let mut est = synthetic(4.0, 0.01, 30, 128.0);
        let fit = est.fit().unwrap();
        assert_eq!(est.fitted_r0, Some(fit.r0));
        assert_eq!(est.fit_residual, Some(fit.residual));
    }
}
