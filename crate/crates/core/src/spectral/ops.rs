//! Differential and zonal operators, dealiased products, and Sobolev norms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::field::{SpectralField2D, ZonalSpectral1D};
use crate::spectral::transform::Transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis2 {
    X,
    Y,
}

#[inline]
fn ik_pow(k: f64, order: u32) -> Complex64 {
    let base = Complex64::new(0.0, k);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..order {
        acc *= base;
    }
    acc
}

/// Spectral derivative: multiply `coeff(m)` by `(i * 2*pi*m_axis/l)^order`.
///
/// For odd orders the Nyquist line along the differentiated axis is zeroed:
/// its multiplier is purely imaginary on a self-conjugate bin, which would
/// break Hermitian symmetry.
pub fn derivative(field: &SpectralField2D, axis: Axis2, order: u32) -> SpectralField2D {
    let grid = &field.grid;
    let n = grid.n;
    let mut out = field.clone();
    for i1 in 0..n {
        let m1 = grid.index_of_bin(i1);
        for i2 in 0..n {
            let m2 = grid.index_of_bin(i2);
            let m = match axis {
                Axis2::X => m1,
                Axis2::Y => m2,
            };
            out.coeffs[[i1, i2]] *= ik_pow(grid.wavenumber(m), order);
        }
    }
    if order % 2 == 1 {
        let nyq = n / 2;
        match axis {
            Axis2::X => {
                for i2 in 0..n {
                    out.coeffs[[nyq, i2]] = Complex64::ZERO;
                }
            }
            Axis2::Y => {
                for i1 in 0..n {
                    out.coeffs[[i1, nyq]] = Complex64::ZERO;
                }
            }
        }
    }
    out
}

pub fn derivative_zonal(profile: &ZonalSpectral1D, order: u32) -> ZonalSpectral1D {
    let grid = &profile.grid;
    let n = grid.n;
    let mut out = profile.clone();
    for i in 0..n {
        let m = grid.index_of_bin(i);
        out.coeffs[i] *= ik_pow(grid.wavenumber(m), order);
    }
    if order % 2 == 1 {
        out.coeffs[n / 2] = Complex64::ZERO;
    }
    out
}

/// `coeff(m) *= -|k|^2`.
pub fn laplacian(field: &SpectralField2D) -> SpectralField2D {
    let grid = &field.grid;
    let n = grid.n;
    let mut out = field.clone();
    for i1 in 0..n {
        let k1 = grid.wavenumber(grid.index_of_bin(i1));
        for i2 in 0..n {
            let k2 = grid.wavenumber(grid.index_of_bin(i2));
            out.coeffs[[i1, i2]] *= -(k1 * k1 + k2 * k2);
        }
    }
    out
}

/// Invert the Laplacian on zero-mean fields: `coeff(m) /= -|k|^2` for
/// `m != 0`, `coeff(0,0) = 0`. Nonzero-mean input is rejected (the `m = 0`
/// mode makes the inversion ill-posed).
pub fn inverse_laplacian(field: &SpectralField2D) -> Result<SpectralField2D> {
    field.require_zero_mean()?;
    let grid = &field.grid;
    let n = grid.n;
    let mut out = field.clone();
    for i1 in 0..n {
        let k1 = grid.wavenumber(grid.index_of_bin(i1));
        for i2 in 0..n {
            if i1 == 0 && i2 == 0 {
                out.coeffs[[0, 0]] = Complex64::ZERO;
                continue;
            }
            let k2 = grid.wavenumber(grid.index_of_bin(i2));
            out.coeffs[[i1, i2]] /= -(k1 * k1 + k2 * k2);
        }
    }
    Ok(out)
}

/// Zero all modes with `|m_axis| > cutoff` on either axis (plus the Nyquist
/// line, which lies beyond every admissible cutoff).
pub fn dealias_truncate(field: &SpectralField2D) -> SpectralField2D {
    let grid = &field.grid;
    let cutoff = grid.dealias_cutoff();
    let n = grid.n;
    let mut out = field.clone();
    for i1 in 0..n {
        let m1 = grid.index_of_bin(i1);
        for i2 in 0..n {
            let m2 = grid.index_of_bin(i2);
            if m1.abs() > cutoff || m2.abs() > cutoff {
                out.coeffs[[i1, i2]] = Complex64::ZERO;
            }
        }
    }
    out
}

pub fn dealias_truncate_zonal(profile: &ZonalSpectral1D) -> ZonalSpectral1D {
    let grid = &profile.grid;
    let cutoff = grid.dealias_cutoff();
    let n = grid.n;
    let mut out = profile.clone();
    for i in 0..n {
        if grid.index_of_bin(i).abs() > cutoff {
            out.coeffs[i] = Complex64::ZERO;
        }
    }
    out
}

/// Dealiased pointwise product: truncate both factors, multiply in physical
/// space, transform back, truncate again. Equals the Galerkin-truncated
/// convolution of the truncated factors exactly (the cutoff is alias-safe;
/// see [`crate::spectral::GridSpec::dealias_cutoff`]).
pub fn dealias_product(
    tf: &Transform,
    a: &SpectralField2D,
    b: &SpectralField2D,
) -> Result<SpectralField2D> {
    a.grid.same_grid(&b.grid)?;
    tf.grid().same_grid(&a.grid)?;
    let ta = dealias_truncate(a);
    let tb = dealias_truncate(b);
    let pa = tf.inverse(&ta)?;
    let pb = tf.inverse(&tb)?;
    let prod = &pa * &pb;
    let out = tf.forward(&prod)?;
    Ok(dealias_truncate(&out))
}

/// Sobolev norm `(sum <k>^{2s} |coeff|^2)^{1/2}` with the physical
/// wavevector and Japanese bracket `<k> = (1 + |k|^2)^{1/2}`.
pub fn sobolev_norm(field: &SpectralField2D, s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::InvalidParam(format!("Sobolev index s = {s} must be >= 0")));
    }
    let grid = &field.grid;
    let n = grid.n;
    let mut acc = 0.0;
    for i1 in 0..n {
        let k1 = grid.wavenumber(grid.index_of_bin(i1));
        for i2 in 0..n {
            let k2 = grid.wavenumber(grid.index_of_bin(i2));
            let bracket = 1.0 + k1 * k1 + k2 * k2;
            acc += bracket.powf(s) * field.coeffs[[i1, i2]].norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

pub fn sobolev_norm_zonal(profile: &ZonalSpectral1D, s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::InvalidParam(format!("Sobolev index s = {s} must be >= 0")));
    }
    let grid = &profile.grid;
    let mut acc = 0.0;
    for i in 0..grid.n {
        let k = grid.wavenumber(grid.index_of_bin(i));
        acc += (1.0 + k * k).powf(s) * profile.coeffs[i].norm_sqr();
    }
    Ok(acc.sqrt())
}

/// Parseval inner product `<f g> = sum_k f(k) conj(g(k))` (real for real
/// fields; the imaginary part is discarded).
pub fn inner(a: &SpectralField2D, b: &SpectralField2D) -> f64 {
    a.coeffs.iter().zip(b.coeffs.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}
