//! Discrete Fourier transforms between physical samples and spectral
//! coefficients.
//!
//! Normalization is fixed to Fourier-series coefficients: the forward
//! transform divides by `n^2` (resp. `n`), so `coeff(m)` approximates
//! `(1/l^2) * integral of f * exp(-i k.x)` and the inverse is the plain
//! unnormalized synthesis sum. Sums over coefficients are then literal
//! sums over the series modes.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::spectral::field::{SpectralField2D, ZonalSpectral1D};
use crate::spectral::grid::GridSpec;

/// Relative Hermitian-asymmetry tolerance accepted by the inverse transform.
pub const HERMITIAN_REL_TOL: f64 = 1e-10;

/// FFT plans for one grid size.
pub struct Transform {
    grid: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n);
        let inv = planner.plan_fft_inverse(grid.n);
        Self { grid: grid.clone(), fwd, inv }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn fft2_in_place(&self, data: &mut Array2<Complex64>, forward: bool) {
        let n = self.grid.n;
        let plan = if forward { &self.fwd } else { &self.inv };
        // Rows (axis 1 is contiguous).
        for mut row in data.rows_mut() {
            plan.process(row.as_slice_mut().expect("row-major layout"));
        }
        // Columns via scratch buffer.
        let mut col = vec![Complex64::ZERO; n];
        for i2 in 0..n {
            for i1 in 0..n {
                col[i1] = data[[i1, i2]];
            }
            plan.process(&mut col);
            for i1 in 0..n {
                data[[i1, i2]] = col[i1];
            }
        }
    }

    /// Transform real samples `f(x_i1, y_i2)` on the uniform grid into
    /// spectral coefficients.
    pub fn forward(&self, samples: &Array2<f64>) -> Result<SpectralField2D> {
        let n = self.grid.n;
        if samples.dim() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, got: samples.dim().0 });
        }
        let mut data = samples.mapv(|v| Complex64::new(v, 0.0));
        self.fft2_in_place(&mut data, true);
        let scale = 1.0 / (n * n) as f64;
        data.mapv_inplace(|c| c * scale);
        SpectralField2D::from_coeffs(&self.grid, data)
    }

    /// Synthesize real samples from spectral coefficients. Rejects inputs
    /// whose Hermitian asymmetry exceeds `1e-10` relative to the largest
    /// coefficient.
    pub fn inverse(&self, field: &SpectralField2D) -> Result<Array2<f64>> {
        self.grid.same_grid(&field.grid)?;
        let asym = field.hermitian_asymmetry();
        let tol = HERMITIAN_REL_TOL * field.max_abs();
        if asym > tol {
            return Err(Error::HermitianViolation { max_asymmetry: asym, tolerance: tol });
        }
        let mut data = field.coeffs.clone();
        self.fft2_in_place(&mut data, false);
        Ok(data.mapv(|c| c.re))
    }

    pub fn forward_zonal(&self, samples: &Array1<f64>) -> Result<ZonalSpectral1D> {
        let n = self.grid.n;
        if samples.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: samples.len() });
        }
        let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut data);
        let scale = 1.0 / n as f64;
        let coeffs = Array1::from_iter(data.into_iter().map(|c| c * scale));
        ZonalSpectral1D::from_coeffs(&self.grid, coeffs)
    }

    pub fn inverse_zonal(&self, profile: &ZonalSpectral1D) -> Result<Array1<f64>> {
        self.grid.same_grid(&profile.grid)?;
        let asym = profile.hermitian_asymmetry();
        let tol = HERMITIAN_REL_TOL * profile.max_abs();
        if asym > tol {
            return Err(Error::HermitianViolation { max_asymmetry: asym, tolerance: tol });
        }
        let mut data: Vec<Complex64> = profile.coeffs.to_vec();
        self.inv.process(&mut data);
        Ok(Array1::from_iter(data.into_iter().map(|c| c.re)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_field_transforms_to_mean() {
        let grid = GridSpec::square_2pi(16).unwrap();
        let t = Transform::new(&grid);
        let samples = Array2::from_elem((16, 16), 3.0);
        let f = t.forward(&samples).unwrap();
        assert_relative_eq!(f.get(0, 0).re, 3.0, max_relative = 1e-14);
        let off: f64 = f
            .coeffs
            .indexed_iter()
            .filter(|((i, j), _)| !(*i == 0 && *j == 0))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-14);
    }

    #[test]
    fn single_cosine_lands_on_mode_pair() {
        let grid = GridSpec::square_2pi(16).unwrap();
        let t = Transform::new(&grid);
        let n = grid.n;
        let samples = Array2::from_shape_fn((n, n), |(i1, _)| {
            (std::f64::consts::TAU * i1 as f64 / n as f64).cos()
        });
        let f = t.forward(&samples).unwrap();
        assert_relative_eq!(f.get(1, 0).re, 0.5, max_relative = 1e-12);
        assert_relative_eq!(f.get(-1, 0).re, 0.5, max_relative = 1e-12);
        assert!(f.get(1, 0).im.abs() < 1e-15);
    }

    #[test]
    fn cosine_synthesis_from_mode_pair() {
        let grid = GridSpec::square_2pi(16).unwrap();
        let t = Transform::new(&grid);
        let mut f = SpectralField2D::zeros(&grid);
        f.set_mode_pair(1, 0, Complex64::new(0.5, 0.0));
        let s = t.inverse(&f).unwrap();
        let n = grid.n;
        for i1 in 0..n {
            let expect = (std::f64::consts::TAU * i1 as f64 / n as f64).cos();
            for i2 in 0..n {
                assert!((s[[i1, i2]] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_rejects_asymmetric_input() {
        let grid = GridSpec::square_2pi(8).unwrap();
        let t = Transform::new(&grid);
        let mut f = SpectralField2D::zeros(&grid);
        f.set(1, 2, Complex64::new(1.0, 1.0)); // no conjugate partner
        assert!(matches!(t.inverse(&f), Err(Error::HermitianViolation { .. })));
    }

    #[test]
    fn zero_field_inverse_is_zero() {
        let grid = GridSpec::square_2pi(8).unwrap();
        let t = Transform::new(&grid);
        let f = SpectralField2D::zeros(&grid);
        let s = t.inverse(&f).unwrap();
        assert!(s.iter().all(|&v| v == 0.0));
    }
}
