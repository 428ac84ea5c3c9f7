//! Lattice bookkeeping for the periodic box.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square periodic grid: `n` modes per dimension on a box of side `l`.
///
/// Retained wavenumber indices run over `{-n/2+1, ..., n/2}` per axis in
/// FFT bin order; the physical wavevector of index `m` is `2*pi*m/l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// Domain side length.
    pub l: f64,
    /// Modes per dimension (even, >= 4).
    pub n: usize,
    /// Dealias cutoff fraction, numerator (default 2).
    pub dealias_num: u32,
    /// Dealias cutoff fraction, denominator (default 3).
    pub dealias_den: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { l: std::f64::consts::TAU, n: 32, dealias_num: 2, dealias_den: 3 }
    }
}

impl GridSpec {
    pub fn new(l: f64, n: usize) -> Result<Self> {
        Self::with_dealias(l, n, 2, 3)
    }

    pub fn with_dealias(l: f64, n: usize, dealias_num: u32, dealias_den: u32) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::InvalidParam(format!("domain size l = {l} must be > 0")));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParam(format!(
                "grid size n = {n} must be even and >= 4"
            )));
        }
        if dealias_den == 0 || dealias_num == 0 || dealias_num > dealias_den {
            return Err(Error::InvalidParam(format!(
                "dealias fraction {dealias_num}/{dealias_den} must lie in (0, 1]"
            )));
        }
        Ok(Self { l, n, dealias_num, dealias_den })
    }

    /// Default `2*pi` box, where the physical wavevector is the integer lattice.
    pub fn square_2pi(n: usize) -> Result<Self> {
        Self::new(std::f64::consts::TAU, n)
    }

    /// Wavenumber index of FFT bin `i` (bins `0..n` map to `0..=n/2, -n/2+1..=-1`).
    #[inline]
    pub fn index_of_bin(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT bin of wavenumber index `m` (must satisfy `-n/2 < m <= n/2`).
    #[inline]
    pub fn bin_of_index(&self, m: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(m > -n / 2 && m <= n / 2, "index {m} outside retained band");
        ((m + n) % n) as usize
    }

    /// Physical wavevector component for index `m`.
    #[inline]
    pub fn wavenumber(&self, m: i64) -> f64 {
        std::f64::consts::TAU * m as f64 / self.l
    }

    /// Largest retained index `|m| <= cutoff` after dealiasing.
    ///
    /// The nominal cutoff `floor(num/den * n/2)` is clamped to the largest K
    /// with `3K < n`, so that quadratic products of fields supported inside
    /// the band are exact Galerkin truncations (no aliased triad can land on
    /// a retained mode).
    pub fn dealias_cutoff(&self) -> i64 {
        let half = (self.n / 2) as u64;
        let nominal = (u64::from(self.dealias_num) * half / u64::from(self.dealias_den)) as i64;
        let alias_safe = ((self.n as i64) - 1) / 3;
        nominal.min(alias_safe)
    }

    /// Grid spacing `l/n`.
    #[inline]
    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn same_grid(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}
