//! Deterministic initial-data generation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField2D, ZonalSpectral1D};

/// Noise-to-jet amplitude ratio for the `jet-plus-noise` kind.
pub const JET_NOISE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    /// `mu = amplitude cos(2 pi b y / l)`, `gamma = amplitude cos(2 pi b (x+y)/l)`
    /// with `b = band_lo`; the exact single-harmonic test fields.
    SingleMode,
    /// Independent complex Gaussians on the index band, symmetrized and
    /// normalized so `amplitude` is the exact coefficient-l2 norm.
    #[default]
    BandLimitedRandom,
    /// `mu = amplitude cos(2 pi y / l)` plus band-limited `gamma` noise of
    /// relative size [`JET_NOISE_FRACTION`].
    JetPlusNoise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitSpec {
    pub kind: InitKind,
    pub seed: u64,
    pub amplitude: f64,
    pub band_lo: i64,
    pub band_hi: i64,
}

impl Default for InitSpec {
    fn default() -> Self {
        Self { kind: InitKind::BandLimitedRandom, seed: 7, amplitude: 1e-2, band_lo: 1, band_hi: 4 }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v: f64 = rng.gen_range(-1.0..1.0);
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * ((-2.0 * s.ln()) / s).sqrt();
        }
    }
}

fn random_eddy_field(
    rng: &mut ChaCha8Rng,
    grid: &GridSpec,
    band_lo: i64,
    band_hi: i64,
) -> SpectralField2D {
    let mut gamma = SpectralField2D::zeros(grid);
    for m1 in -band_hi..=band_hi {
        for m2 in -band_hi..=band_hi {
            let band = m1.abs().max(m2.abs());
            if band < band_lo || band > band_hi || m1 == 0 {
                // m1 = 0 column belongs to the zonal profile; eddy data is
                // zonal-average free.
                continue;
            }
            gamma.set(m1, m2, Complex64::new(gaussian(rng), gaussian(rng)));
        }
    }
    let gamma = gamma.symmetrize().project_zero_mean();
    let norm = gamma.l2_norm();
    if norm > 0.0 {
        gamma.scale(1.0 / norm)
    } else {
        gamma
    }
}

fn random_zonal_profile(
    rng: &mut ChaCha8Rng,
    grid: &GridSpec,
    band_lo: i64,
    band_hi: i64,
) -> ZonalSpectral1D {
    let mut mu = ZonalSpectral1D::zeros(grid);
    for m2 in -band_hi..=band_hi {
        if m2.abs() < band_lo || m2 == 0 {
            continue;
        }
        mu.set(m2, Complex64::new(gaussian(rng), gaussian(rng)));
    }
    let mu = mu.symmetrize().project_zero_mean();
    let norm = mu.l2_norm();
    if norm > 0.0 {
        mu.scale(1.0 / norm)
    } else {
        mu
    }
}

/// Build zero-mean Hermitian `(mu0, gamma0)` data, identical bit-for-bit
/// for the same spec.
pub fn init_data(grid: &GridSpec, spec: &InitSpec) -> Result<(ZonalSpectral1D, SpectralField2D)> {
    let half = grid.n as i64 / 2;
    if spec.band_lo < 1 || spec.band_lo > spec.band_hi || spec.band_hi >= half {
        return Err(Error::InvalidParam(format!(
            "band [{}, {}] out of range for n = {} (need 1 <= lo <= hi < n/2)",
            spec.band_lo, spec.band_hi, grid.n
        )));
    }
    if !spec.amplitude.is_finite() || spec.amplitude < 0.0 {
        return Err(Error::InvalidParam(format!(
            "amplitude = {} must be finite and >= 0",
            spec.amplitude
        )));
    }
    let a = spec.amplitude;
    match spec.kind {
        InitKind::SingleMode => {
            let b = spec.band_lo;
            let mut mu = ZonalSpectral1D::zeros(grid);
            mu.set_mode_pair(b, Complex64::new(0.5 * a, 0.0));
            let mut gamma = SpectralField2D::zeros(grid);
            gamma.set_mode_pair(b, b, Complex64::new(0.5 * a, 0.0));
            Ok((mu, gamma))
        }
        InitKind::BandLimitedRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mu = random_zonal_profile(&mut rng, grid, spec.band_lo, spec.band_hi).scale(a);
            let gamma = random_eddy_field(&mut rng, grid, spec.band_lo, spec.band_hi).scale(a);
            Ok((mu, gamma))
        }
        InitKind::JetPlusNoise => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut mu = ZonalSpectral1D::zeros(grid);
            mu.set_mode_pair(1, Complex64::new(0.5 * a, 0.0));
            let gamma = random_eddy_field(&mut rng, grid, spec.band_lo, spec.band_hi)
                .scale(a * JET_NOISE_FRACTION);
            Ok((mu, gamma))
        }
    }
}
