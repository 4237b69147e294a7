//! Periodic Fourier representation of lattice fields.
//!
//! A field f on a periodic lattice of linear size L (in units of a) is written
//!
//! f(x) = f̄ + L^{-d/2} Σ_n c_n exp(i q_n·x),   q_n = 2π n / L,
//!
//! where f̄ is a fixed reference level (Δ/ħ for frequencies, Δ for
//! splittings) rather than the sample mean. Modes are stored in FFT order;
//! [`mode_index`] maps a storage slot to its integer n ∈ [−N/2, N/2).

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::Boundary;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    /// Mode amplitudes c_n, FFT order; row-major for 2D.
    pub modes: Vec<Complex64>,
    pub side: usize,
    pub dimension: u8,
    /// Reference level subtracted before the transform.
    pub offset: f64,
}

/// Signed mode number of FFT slot `k` on a side of `side` sites.
pub fn mode_index(k: usize, side: usize) -> i64 {
    if 2 * k < side {
        k as i64
    } else {
        k as i64 - side as i64
    }
}

pub fn wavenumber(k: usize, side: usize) -> f64 {
    2.0 * PI * mode_index(k, side) as f64 / side as f64
}

impl FourierField {
    pub fn length(&self) -> f64 {
        self.side as f64
    }

    /// Amplitude of mode n (1D).
    pub fn mode(&self, n: i64) -> Complex64 {
        let side = self.side as i64;
        self.modes[n.rem_euclid(side) as usize]
    }

    /// |q|² for every stored mode, same order as `modes`.
    pub fn squared_wavenumbers(&self) -> Vec<f64> {
        let s = self.side;
        if self.dimension == 1 {
            (0..s).map(|k| wavenumber(k, s).powi(2)).collect()
        } else {
            let mut out = Vec::with_capacity(s * s);
            for r in 0..s {
                let qy = wavenumber(r, s);
                for c in 0..s {
                    let qx = wavenumber(c, s);
                    out.push(qx * qx + qy * qy);
                }
            }
            out
        }
    }

    /// |c_n|² for every stored mode.
    pub fn power(&self) -> Vec<f64> {
        self.modes.iter().map(|c| c.norm_sqr()).collect()
    }

    fn norm(&self) -> f64 {
        self.length().powf(self.dimension as f64 / 2.0) / self.modes.len() as f64
    }
}

fn check_periodic(boundary: Boundary) -> Result<()> {
    match boundary {
        Boundary::Periodic => Ok(()),
        Boundary::Open => Err(Error::NeedsPeriodic("the Fourier representation")),
    }
}

fn fft_2d(data: &mut [Complex64], side: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(side)
    } else {
        planner.plan_fft_forward(side)
    };
    for row in data.chunks_mut(side) {
        fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); side];
    for c in 0..side {
        for r in 0..side {
            column[r] = data[r * side + c];
        }
        fft.process(&mut column);
        for r in 0..side {
            data[r * side + c] = column[r];
        }
    }
}

/// Forward transform of a real 1D field.
pub fn fourier_forward(values: &[f64], offset: f64, boundary: Boundary) -> Result<FourierField> {
    check_periodic(boundary)?;
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput("need at least two sites".into()));
    }
    let mut buf: Vec<Complex64> = values
        .iter()
        .map(|v| Complex64::new(v - offset, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut field = FourierField {
        modes: buf,
        side: n,
        dimension: 1,
        offset,
    };
    let k = field.norm();
    field.modes.iter_mut().for_each(|c| *c *= k);
    Ok(field)
}

/// Forward transform of a real field on a side×side periodic square lattice (row-major).
pub fn fourier_forward_2d(
    values: &[f64],
    side: usize,
    offset: f64,
    boundary: Boundary,
) -> Result<FourierField> {
    check_periodic(boundary)?;
    if values.len() != side * side || side < 2 {
        return Err(Error::LengthMismatch {
            expected: side * side,
            got: values.len(),
        });
    }
    let mut buf: Vec<Complex64> = values
        .iter()
        .map(|v| Complex64::new(v - offset, 0.0))
        .collect();
    fft_2d(&mut buf, side, false);
    let mut field = FourierField {
        modes: buf,
        side,
        dimension: 2,
        offset,
    };
    let k = field.norm();
    field.modes.iter_mut().for_each(|c| *c *= k);
    Ok(field)
}

/// Inverse transform back to real lattice values (imaginary parts are dropped).
pub fn fourier_inverse(field: &FourierField) -> Vec<f64> {
    let n = field.modes.len();
    let scale = 1.0 / (field.norm() * n as f64);
    let mut buf = field.modes.clone();
    if field.dimension == 1 {
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    } else {
        fft_2d(&mut buf, field.side, true);
    }
    buf.iter().map(|c| field.offset + c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_field_only_has_zero_mode() {
        let f = fourier_forward(&[1.5; 16], 1.0, Boundary::Periodic).unwrap();
        assert!((f.mode(0).re - 0.5 * 16f64.sqrt()).abs() < 1e-12);
        for n in 1..16 {
            assert!(f.modes[n].norm() < 1e-12);
        }
    }

    #[test]
    fn cosine_mode_amplitude() {
        let n = 64;
        let a = 0.3;
        let values: Vec<f64> = (0..n)
            .map(|j| a * (2.0 * PI * 3.0 * j as f64 / n as f64).cos())
            .collect();
        let f = fourier_forward(&values, 0.0, Boundary::Periodic).unwrap();
        let expected = a * (n as f64).sqrt() / 2.0;
        assert!((f.mode(3).norm() - expected).abs() < 1e-12);
        assert!((f.mode(-3).norm() - expected).abs() < 1e-12);
        assert!(f.mode(2).norm() < 1e-12);
    }

    #[test]
    fn open_boundary_is_rejected() {
        assert!(matches!(
            fourier_forward(&[1.0, 2.0], 0.0, Boundary::Open),
            Err(Error::NeedsPeriodic(_))
        ));
    }

    #[test]
    fn mode_numbers_cover_half_open_range() {
        let idx: Vec<i64> = (0..8).map(|k| mode_index(k, 8)).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, -4, -3, -2, -1]);
    }

    #[test]
    fn two_dimensional_round_trip() {
        let side = 8;
        let v: Vec<f64> = (0..side * side)
            .map(|i| ((i * 37 % 11) as f64).sin())
            .collect();
        let f = fourier_forward_2d(&v, side, 0.2, Boundary::Periodic).unwrap();
        let back = fourier_inverse(&f);
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn round_trip_and_hermitian(values in proptest::collection::vec(-5.0f64..5.0, 2..200)) {
            let f = fourier_forward(&values, 1.0, Boundary::Periodic).unwrap();
            let back = fourier_inverse(&f);
            let err = values.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-10);
            let n = values.len() as i64;
            for k in 1..n {
                let d = f.mode(k) - f.mode(-k).conj();
                prop_assert!(d.norm() <= 1e-9);
            }
        }
    }
}
