//! Quadratic diagnostics: energy, enstrophy, their mean/eddy partitions,
//! norms, and instantaneous dissipation rates.
//!
//! Everything is computed spectrally via Parseval sums, never by physical
//! quadrature, so the mean/eddy partition identities are exact partitions
//! of the coefficient lattice over `k1 = 0` vs `k1 != 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Formulation, SolverParams, State};
use crate::error::Result;
use crate::spectral::{SpectralField2D, ZonalSpectral1D};

/// One diagnostics sample. `energy = <|grad psi|^2>`, `enstrophy = <zeta^2>`,
/// both split into zonal-mean and eddy contributions; plus the norms used by
/// the fixed-point machinery and the zero-mode residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub mean_energy: f64,
    pub eddy_energy: f64,
    pub mean_enstrophy: f64,
    pub eddy_enstrophy: f64,
    pub l2_mu: f64,
    pub l2_gamma: f64,
    pub hs_mu: f64,
    pub hs_gamma: f64,
    pub zero_mode_residual_mu: f64,
    pub zero_mode_residual_gamma: f64,
    /// `nu <zeta^2>`: instantaneous decay rate of the energy `<|grad psi|^2>/2`.
    pub dissipation_energy: f64,
    /// `nu <|grad zeta|^2>`: decay rate of the enstrophy `<zeta^2>/2`.
    pub dissipation_enstrophy: f64,
    /// Eddy part `nu * sum_{k1 != 0} |k|^2 |gamma|^2` (the model-system
    /// `gamma` budget).
    pub dissipation_enstrophy_eddy: f64,
}

impl DiagnosticsRecord {
    pub fn zero_mode_residual_max(&self) -> f64 {
        self.zero_mode_residual_mu.max(self.zero_mode_residual_gamma)
    }
}

/// Diagnostics for a `(zonal profile, eddy field)` state. `c0_offset` is
/// added to the zonal mean mode when forming `<ubar^2>` (the model system
/// stores `mu = ubar - c0` and keeps `c0` in the parameters; the split
/// system stores `ubar` directly and passes 0).
pub fn energy_budget(
    zonal: &ZonalSpectral1D,
    eddy: &SpectralField2D,
    c0_offset: f64,
    p: &SolverParams,
) -> Result<DiagnosticsRecord> {
    zonal.grid.same_grid(&eddy.grid)?;
    let grid = &zonal.grid;
    let n = grid.n;
    let s = p.s;

    let mean_mode = zonal.coeffs[0] + Complex64::new(c0_offset, 0.0);
    let mut mean_energy = mean_mode.norm_sqr();
    let mut mean_enstrophy = 0.0;
    let mut diss_enstrophy_mean = 0.0;
    let mut l2_mu_sq = 0.0;
    let mut hs_mu_sq = 0.0;
    for i2 in 1..n {
        let k2 = grid.wavenumber(grid.index_of_bin(i2));
        let a2 = zonal.coeffs[i2].norm_sqr();
        mean_energy += a2;
        mean_enstrophy += k2 * k2 * a2;
        diss_enstrophy_mean += k2 * k2 * k2 * k2 * a2;
        l2_mu_sq += a2;
        hs_mu_sq += (1.0 + k2 * k2).powf(s) * a2;
    }

    let mut eddy_energy = 0.0;
    let mut eddy_enstrophy = 0.0;
    let mut diss_enstrophy_eddy = 0.0;
    let mut l2_gamma_sq = 0.0;
    let mut hs_gamma_sq = 0.0;
    for i1 in 1..n {
        let k1 = grid.wavenumber(grid.index_of_bin(i1));
        for i2 in 0..n {
            let k2 = grid.wavenumber(grid.index_of_bin(i2));
            let ksq = k1 * k1 + k2 * k2;
            let a2 = eddy.coeffs[[i1, i2]].norm_sqr();
            eddy_energy += a2 / ksq;
            eddy_enstrophy += a2;
            diss_enstrophy_eddy += ksq * a2;
            l2_gamma_sq += a2;
            hs_gamma_sq += (1.0 + ksq).powf(s) * a2;
        }
    }

    let enstrophy = mean_enstrophy + eddy_enstrophy;
    Ok(DiagnosticsRecord {
        t: 0.0,
        energy: mean_energy + eddy_energy,
        enstrophy,
        mean_energy,
        eddy_energy,
        mean_enstrophy,
        eddy_enstrophy,
        l2_mu: l2_mu_sq.sqrt(),
        l2_gamma: l2_gamma_sq.sqrt(),
        hs_mu: hs_mu_sq.sqrt(),
        hs_gamma: hs_gamma_sq.sqrt(),
        zero_mode_residual_mu: zonal.coeffs[0].norm(),
        zero_mode_residual_gamma: eddy.coeffs[[0, 0]].norm(),
        dissipation_energy: p.nu * enstrophy,
        dissipation_enstrophy: p.nu * (diss_enstrophy_mean + diss_enstrophy_eddy),
        dissipation_enstrophy_eddy: p.nu * diss_enstrophy_eddy,
    })
}

/// Diagnostics for a full vorticity field: the zonal column of `zeta` plays
/// the mean role through `zeta^bar = -dy ubar`, the rest is the eddy part.
pub fn energy_budget_full(zeta: &SpectralField2D, p: &SolverParams) -> Result<DiagnosticsRecord> {
    let grid = &zeta.grid;
    let n = grid.n;
    let s = p.s;

    let mut mean_energy = 0.0;
    let mut mean_enstrophy = 0.0;
    let mut diss_enstrophy_mean = 0.0;
    let mut l2_mu_sq = 0.0;
    let mut hs_mu_sq = 0.0;
    for i2 in 1..n {
        let k2 = grid.wavenumber(grid.index_of_bin(i2));
        let z2 = zeta.coeffs[[0, i2]].norm_sqr();
        // |ubar(k2)|^2 = |zeta(0,k2)|^2 / k2^2
        mean_energy += z2 / (k2 * k2);
        mean_enstrophy += z2;
        diss_enstrophy_mean += k2 * k2 * z2;
        l2_mu_sq += z2 / (k2 * k2);
        hs_mu_sq += (1.0 + k2 * k2).powf(s) * z2 / (k2 * k2);
    }

    let mut eddy_energy = 0.0;
    let mut eddy_enstrophy = 0.0;
    let mut diss_enstrophy_eddy = 0.0;
    let mut hs_gamma_sq = 0.0;
    for i1 in 1..n {
        let k1 = grid.wavenumber(grid.index_of_bin(i1));
        for i2 in 0..n {
            let k2 = grid.wavenumber(grid.index_of_bin(i2));
            let ksq = k1 * k1 + k2 * k2;
            let z2 = zeta.coeffs[[i1, i2]].norm_sqr();
            eddy_energy += z2 / ksq;
            eddy_enstrophy += z2;
            diss_enstrophy_eddy += ksq * z2;
            hs_gamma_sq += (1.0 + ksq).powf(s) * z2;
        }
    }

    let enstrophy = mean_enstrophy + eddy_enstrophy;
    Ok(DiagnosticsRecord {
        t: 0.0,
        energy: mean_energy + eddy_energy,
        enstrophy,
        mean_energy,
        eddy_energy,
        mean_enstrophy,
        eddy_enstrophy,
        l2_mu: l2_mu_sq.sqrt(),
        l2_gamma: eddy_enstrophy.sqrt(),
        hs_mu: hs_mu_sq.sqrt(),
        hs_gamma: hs_gamma_sq.sqrt(),
        zero_mode_residual_mu: 0.0,
        zero_mode_residual_gamma: zeta.coeffs[[0, 0]].norm(),
        dissipation_energy: p.nu * enstrophy,
        dissipation_enstrophy: p.nu * (diss_enstrophy_mean + diss_enstrophy_eddy),
        dissipation_enstrophy_eddy: p.nu * diss_enstrophy_eddy,
    })
}

/// Build the record appropriate for `kind` and stamp it with `state.t`.
pub fn record_for(kind: Formulation, state: &State, p: &SolverParams) -> Result<DiagnosticsRecord> {
    let mut rec = match kind {
        Formulation::ModelSystem => energy_budget(&state.mu, &state.gamma, p.c0, p)?,
        Formulation::SplitSystem => energy_budget(&state.mu, &state.gamma, 0.0, p)?,
        Formulation::FullVorticity => energy_budget_full(&state.gamma, p)?,
    };
    rec.t = state.t;
    Ok(rec)
}
