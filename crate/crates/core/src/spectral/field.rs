//! Spectral coefficient containers for real fields on the box and for
//! zonal (y-only) profiles.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::grid::GridSpec;

/// Relative threshold for the zero-mean predicate.
pub const ZERO_MEAN_REL_TOL: f64 = 1e-14;

/// Complex Fourier coefficients of a real field on the 2-torus.
///
/// Storage is FFT bin order along both axes: `coeffs[[i1, i2]]` is the
/// amplitude of index `(m1, m2)` with `m = i` for `i <= n/2`, `m = i - n`
/// otherwise. A real field satisfies `coeff(-m) = conj(coeff(m))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField2D {
    pub grid: GridSpec,
    pub coeffs: Array2<Complex64>,
}

/// Complex Fourier coefficients of a real zonal profile in `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalSpectral1D {
    pub grid: GridSpec,
    pub coeffs: Array1<Complex64>,
}

impl SpectralField2D {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self { grid: grid.clone(), coeffs: Array2::zeros((grid.n, grid.n)) }
    }

    pub fn from_coeffs(grid: &GridSpec, coeffs: Array2<Complex64>) -> Result<Self> {
        if coeffs.dim() != (grid.n, grid.n) {
            return Err(Error::DimensionMismatch { expected: grid.n, got: coeffs.dim().0 });
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// Coefficient at wavenumber index `(m1, m2)`.
    #[inline]
    pub fn get(&self, m1: i64, m2: i64) -> Complex64 {
        self.coeffs[[self.grid.bin_of_index(m1), self.grid.bin_of_index(m2)]]
    }

    #[inline]
    pub fn set(&mut self, m1: i64, m2: i64, v: Complex64) {
        self.coeffs[[self.grid.bin_of_index(m1), self.grid.bin_of_index(m2)]] = v;
    }

    /// Set `coeff(m) = v` and `coeff(-m) = conj(v)` in one call.
    pub fn set_mode_pair(&mut self, m1: i64, m2: i64, v: Complex64) {
        self.set(m1, m2, v);
        self.set(-m1, -m2, v.conj());
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()))
    }

    /// l2 norm of the coefficients (the `H^0` norm under the crate's
    /// Fourier-series normalization).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Zero-mean predicate: `|coeff(0,0)| <= 1e-14 * max|coeff|`.
    pub fn is_zero_mean(&self) -> bool {
        self.coeffs[[0, 0]].norm() <= ZERO_MEAN_REL_TOL * self.max_abs()
    }

    pub fn require_zero_mean(&self) -> Result<()> {
        if self.is_zero_mean() {
            Ok(())
        } else {
            Err(Error::NonzeroMean { residual: self.coeffs[[0, 0]].norm() })
        }
    }

    /// Set the `(0,0)` coefficient to exactly zero. Idempotent; all other
    /// coefficients are untouched.
    pub fn project_zero_mean(mut self) -> Self {
        self.coeffs[[0, 0]] = Complex64::ZERO;
        self
    }

    /// Largest deviation from Hermitian symmetry `coeff(-m) = conj(coeff(m))`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i1 in 0..n {
            for i2 in 0..n {
                let j1 = (n - i1) % n;
                let j2 = (n - i2) % n;
                let d = (self.coeffs[[i1, i2]] - self.coeffs[[j1, j2]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Replace the coefficients by their Hermitian part so the synthesized
    /// field is exactly real.
    pub fn symmetrize(mut self) -> Self {
        let n = self.n();
        let src = self.coeffs.clone();
        for i1 in 0..n {
            for i2 in 0..n {
                let j1 = (n - i1) % n;
                let j2 = (n - i2) % n;
                self.coeffs[[i1, i2]] = 0.5 * (src[[i1, i2]] + src[[j1, j2]].conj());
            }
        }
        self
    }

    /// Zonal average: extract the `m1 = 0` column.
    pub fn zonal_average(&self) -> ZonalSpectral1D {
        let mut out = ZonalSpectral1D::zeros(&self.grid);
        for i2 in 0..self.n() {
            out.coeffs[i2] = self.coeffs[[0, i2]];
        }
        out
    }

    pub fn scale(mut self, a: f64) -> Self {
        self.coeffs.mapv_inplace(|c| c * a);
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.same_grid(&other.grid)?;
        Ok(Self { grid: self.grid.clone(), coeffs: &self.coeffs + &other.coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.same_grid(&other.grid)?;
        Ok(Self { grid: self.grid.clone(), coeffs: &self.coeffs - &other.coeffs })
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl ZonalSpectral1D {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self { grid: grid.clone(), coeffs: Array1::zeros(grid.n) }
    }

    pub fn from_coeffs(grid: &GridSpec, coeffs: Array1<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n {
            return Err(Error::DimensionMismatch { expected: grid.n, got: coeffs.len() });
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.grid.n
    }

    #[inline]
    pub fn get(&self, m2: i64) -> Complex64 {
        self.coeffs[self.grid.bin_of_index(m2)]
    }

    #[inline]
    pub fn set(&mut self, m2: i64, v: Complex64) {
        self.coeffs[self.grid.bin_of_index(m2)] = v;
    }

    pub fn set_mode_pair(&mut self, m2: i64, v: Complex64) {
        self.set(m2, v);
        self.set(-m2, v.conj());
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero_mean(&self) -> bool {
        self.coeffs[0].norm() <= ZERO_MEAN_REL_TOL * self.max_abs()
    }

    pub fn require_zero_mean(&self) -> Result<()> {
        if self.is_zero_mean() {
            Ok(())
        } else {
            Err(Error::NonzeroMean { residual: self.coeffs[0].norm() })
        }
    }

    pub fn project_zero_mean(mut self) -> Self {
        self.coeffs[0] = Complex64::ZERO;
        self
    }

    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            let j = (n - i) % n;
            worst = worst.max((self.coeffs[i] - self.coeffs[j].conj()).norm());
        }
        worst
    }

    pub fn symmetrize(mut self) -> Self {
        let n = self.n();
        let src = self.coeffs.clone();
        for i in 0..n {
            let j = (n - i) % n;
            self.coeffs[i] = 0.5 * (src[i] + src[j].conj());
        }
        self
    }

    /// Embed as a 2D field supported on the `m1 = 0` column.
    pub fn embed_2d(&self) -> SpectralField2D {
        let mut out = SpectralField2D::zeros(&self.grid);
        for i2 in 0..self.n() {
            out.coeffs[[0, i2]] = self.coeffs[i2];
        }
        out
    }

    pub fn scale(mut self, a: f64) -> Self {
        self.coeffs.mapv_inplace(|c| c * a);
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.same_grid(&other.grid)?;
        Ok(Self { grid: self.grid.clone(), coeffs: &self.coeffs + &other.coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.same_grid(&other.grid)?;
        Ok(Self { grid: self.grid.clone(), coeffs: &self.coeffs - &other.coeffs })
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}
