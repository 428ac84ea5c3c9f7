//! Shared test oracles: brute-force convolutions, the displayed Fourier
//! sums for `F` and `G`, and physical-space quadrature references. All of
//! these are independent of the pseudospectral implementation paths they
//! check.

#![allow(dead_code)]

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eddymean::dynamics::SolverParams;
use eddymean::spectral::{GridSpec, SpectralField2D, ZonalSpectral1D};

/// Direct Galerkin-truncated convolution: both factors restricted to the
/// dealias band, full O(N^4) triad sum, output restricted to the band.
pub fn brute_convolution(a: &SpectralField2D, b: &SpectralField2D) -> SpectralField2D {
    let grid = &a.grid;
    let cut = grid.dealias_cutoff();
    let mut out = SpectralField2D::zeros(grid);
    for k1 in -cut..=cut {
        for k2 in -cut..=cut {
            let mut acc = Complex64::ZERO;
            for h1 in -cut..=cut {
                for h2 in -cut..=cut {
                    let m1 = k1 - h1;
                    let m2 = k2 - h2;
                    if m1.abs() > cut || m2.abs() > cut {
                        continue;
                    }
                    acc += a.get(h1, h2) * b.get(m1, m2);
                }
            }
            out.set(k1, k2, acc);
        }
    }
    out
}

/// The zonal-forcing sum
/// `G(k2) = -i k2 sum_{h+m=(0,k2), h,m != 0} h1 m2 / (|h|^2 |m|^2) g(h) g(m)`
/// over the dealias band, with physical wavevectors.
pub fn g_direct_sum(gamma: &SpectralField2D) -> ZonalSpectral1D {
    let grid = &gamma.grid;
    let cut = grid.dealias_cutoff();
    let mut out = ZonalSpectral1D::zeros(grid);
    for n_k2 in -cut..=cut {
        if n_k2 == 0 {
            continue;
        }
        let k2 = grid.wavenumber(n_k2);
        let mut acc = Complex64::ZERO;
        for nh1 in -cut..=cut {
            for nh2 in -cut..=cut {
                if nh1 == 0 && nh2 == 0 {
                    continue;
                }
                let nm1 = -nh1;
                let nm2 = n_k2 - nh2;
                if nm1.abs() > cut || nm2.abs() > cut || (nm1 == 0 && nm2 == 0) {
                    continue;
                }
                let h1 = grid.wavenumber(nh1);
                let h2 = grid.wavenumber(nh2);
                let m2 = grid.wavenumber(nm2);
                let m1 = grid.wavenumber(nm1);
                let hsq = h1 * h1 + h2 * h2;
                let msq = m1 * m1 + m2 * m2;
                acc += (h1 * m2 / (hsq * msq)) * gamma.get(nh1, nh2) * gamma.get(nm1, nm2);
            }
        }
        out.set(n_k2, Complex64::new(0.0, -k2) * acc);
    }
    out
}

/// The displayed sums for `F`: advection `(h2 m1 - h1 m2)/|h|^2`, mean
/// coupling `-i h1 mu(m2)`, drift `sign c0 i k1`, and the zonal-average
/// flux `k2 h1/|h|^2` on the `k1 = 0` column.
pub fn f_direct_sum(
    mu: &ZonalSpectral1D,
    gamma: &SpectralField2D,
    p: &SolverParams,
) -> SpectralField2D {
    let grid = &gamma.grid;
    let cut = grid.dealias_cutoff();
    let mut out = SpectralField2D::zeros(grid);
    for nk1 in -cut..=cut {
        for nk2 in -cut..=cut {
            if nk1 == 0 && nk2 == 0 {
                continue;
            }
            let k1 = grid.wavenumber(nk1);
            let k2 = grid.wavenumber(nk2);
            let mut acc = Complex64::ZERO;

            // advection: k = h + m, both nonzero, h weighted by 1/|h|^2
            for nh1 in -cut..=cut {
                for nh2 in -cut..=cut {
                    if nh1 == 0 && nh2 == 0 {
                        continue;
                    }
                    let nm1 = nk1 - nh1;
                    let nm2 = nk2 - nh2;
                    if nm1.abs() > cut || nm2.abs() > cut || (nm1 == 0 && nm2 == 0) {
                        continue;
                    }
                    let h1 = grid.wavenumber(nh1);
                    let h2 = grid.wavenumber(nh2);
                    let m1 = grid.wavenumber(nm1);
                    let m2 = grid.wavenumber(nm2);
                    let hsq = h1 * h1 + h2 * h2;
                    acc += ((h2 * m1 - h1 * m2) / hsq)
                        * gamma.get(nh1, nh2)
                        * gamma.get(nm1, nm2);
                }
            }

            // mean coupling: k1 = h1, k2 = h2 + m2, term -i h1 mu(m2) g(h)
            for nm2 in -cut..=cut {
                if nm2 == 0 {
                    continue; // mu is zero-mean
                }
                let nh2 = nk2 - nm2;
                if nh2.abs() > cut || (nk1 == 0 && nh2 == 0) {
                    continue;
                }
                let h1 = grid.wavenumber(nk1);
                acc += Complex64::new(0.0, -h1) * mu.get(nm2) * gamma.get(nk1, nh2);
            }

            // drift
            let drift = p.f_c0_sign.factor() * p.c0;
            acc += Complex64::new(0.0, drift * k1) * gamma.get(nk1, nk2);

            // zonal flux on the k1 = 0 column
            if nk1 == 0 {
                for nh1 in -cut..=cut {
                    for nh2 in -cut..=cut {
                        if nh1 == 0 && nh2 == 0 {
                            continue;
                        }
                        let nm1 = -nh1;
                        let nm2 = nk2 - nh2;
                        if nm1.abs() > cut || nm2.abs() > cut || (nm1 == 0 && nm2 == 0) {
                            continue;
                        }
                        let h1 = grid.wavenumber(nh1);
                        let h2 = grid.wavenumber(nh2);
                        let hsq = h1 * h1 + h2 * h2;
                        acc += (k2 * h1 / hsq) * gamma.get(nh1, nh2) * gamma.get(nm1, nm2);
                    }
                }
            }
            out.set(nk1, nk2, acc);
        }
    }
    out
}

/// Mean of `f^2` over the sample grid: the quadrature side of Parseval.
pub fn mean_square(samples: &Array2<f64>) -> f64 {
    samples.iter().map(|v| v * v).sum::<f64>() / samples.len() as f64
}

/// Physical-space x-average: mean over the first index for each y sample.
pub fn physical_zonal_average(samples: &Array2<f64>) -> Array1<f64> {
    let (nx, ny) = samples.dim();
    let mut out = Array1::zeros(ny);
    for iy in 0..ny {
        let mut acc = 0.0;
        for ix in 0..nx {
            acc += samples[[ix, iy]];
        }
        out[iy] = acc / nx as f64;
    }
    out
}

/// Seeded random real samples in [-1, 1).
pub fn random_samples(grid: &GridSpec, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((grid.n, grid.n), |_| rng.gen_range(-1.0..1.0))
}

/// Seeded zero-mean Hermitian field supported on the dealias band
/// (zonal column excluded when `eddy_only`).
pub fn random_band_field(grid: &GridSpec, seed: u64, eddy_only: bool) -> SpectralField2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cut = grid.dealias_cutoff();
    let mut f = SpectralField2D::zeros(grid);
    for m1 in -cut..=cut {
        for m2 in -cut..=cut {
            if (m1 == 0 && m2 == 0) || (eddy_only && m1 == 0) {
                continue;
            }
            f.set(m1, m2, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    f.symmetrize().project_zero_mean()
}

/// Seeded zero-mean Hermitian zonal profile on the dealias band.
pub fn random_band_profile(grid: &GridSpec, seed: u64) -> ZonalSpectral1D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cut = grid.dealias_cutoff();
    let mut f = ZonalSpectral1D::zeros(grid);
    for m2 in -cut..=cut {
        if m2 == 0 {
            continue;
        }
        f.set(m2, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    f.symmetrize().project_zero_mean()
}
