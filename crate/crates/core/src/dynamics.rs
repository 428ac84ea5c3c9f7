//! Right-hand sides of the three dynamical formulations: the constant-C1
//! model system for `(mu, gamma)`, the un-approximated eddy-mean split
//! system for `(ubar, zeta')`, and the full vorticity equation; plus eddy
//! velocities and the Reynolds stress.
//!
//! All quadratic terms go through the dealiased product; direct convolution
//! sums exist only as test oracles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    dealias_product, derivative, derivative_zonal, inverse_laplacian, laplacian, Axis2, GridSpec,
    SpectralField2D, Transform, ZonalSpectral1D,
};

/// Which dynamical formulation a state is evolved under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    /// `(mu, gamma)` with the constant-`C1` dispersion.
    #[default]
    ModelSystem,
    /// `(ubar, zeta')` with variable `ubar_yy` retained.
    SplitSystem,
    /// Single vorticity field `zeta`.
    FullVorticity,
}

/// Sign convention for the `c0 * gamma_x` drift term in `F`.
///
/// Expanding `-ubar * gamma_x` with `ubar = mu + c0` gives `-mu gamma_x -
/// c0 gamma_x`; `Derivation` uses that minus sign. `AsPrinted` flips it to
/// `+c0 gamma_x`. The two differ only by a constant zonal drift of the eddy
/// field; norm estimates are indifferent, dynamics are not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum C0Sign {
    #[default]
    Derivation,
    AsPrinted,
}

impl C0Sign {
    #[inline]
    pub fn factor(self) -> f64 {
        match self {
            C0Sign::Derivation => -1.0,
            C0Sign::AsPrinted => 1.0,
        }
    }
}

/// Physical and model constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Kinematic viscosity (> 0).
    pub nu: f64,
    /// Planetary vorticity gradient.
    pub beta: f64,
    /// Constant replacing `beta - ubar_yy` in the model system.
    pub c1: f64,
    /// Conserved zonal-mean integral of `ubar`.
    pub c0: f64,
    /// Domain side length (must match the grid).
    pub l: f64,
    /// Regularity index for Sobolev norms (>= 0).
    pub s: f64,
    /// Kernel exponent, in (3/4, 1).
    pub alpha: f64,
    /// Sign convention for the drift term in `F`.
    pub f_c0_sign: C0Sign,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            nu: 0.1,
            beta: 1.0,
            c1: 1.0,
            c0: 0.0,
            l: std::f64::consts::TAU,
            s: 0.0,
            alpha: 0.8,
            f_c0_sign: C0Sign::Derivation,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::InvalidParam(format!("nu = {} must be > 0", self.nu)));
        }
        if !(self.alpha > 0.75 && self.alpha < 1.0) {
            return Err(Error::InvalidParam(format!(
                "alpha = {} must lie in (3/4, 1)",
                self.alpha
            )));
        }
        if self.s < 0.0 {
            return Err(Error::InvalidParam(format!("s = {} must be >= 0", self.s)));
        }
        if !(self.l > 0.0) {
            return Err(Error::InvalidParam(format!("l = {} must be > 0", self.l)));
        }
        Ok(())
    }

    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if (self.l - grid.l).abs() > 1e-12 * self.l.max(1.0) {
            return Err(Error::GridMismatch(format!(
                "params.l = {} but grid.l = {}",
                self.l, grid.l
            )));
        }
        Ok(())
    }
}

/// Time-stamped pair of prognostic fields.
///
/// Interpretation depends on the formulation: `(mu, gamma)` for the model
/// system, `(ubar, zeta')` for the split system. For the full vorticity
/// equation `gamma` holds the whole `zeta` (zonal column included) and
/// `mu` is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub mu: ZonalSpectral1D,
    pub gamma: SpectralField2D,
}

impl State {
    pub fn new(t: f64, mu: ZonalSpectral1D, gamma: SpectralField2D) -> Result<Self> {
        mu.grid.same_grid(&gamma.grid)?;
        Ok(Self { t, mu, gamma })
    }

    /// Enforce the model-system invariants: both components zero-mean.
    pub fn require_zero_mean(&self) -> Result<()> {
        self.mu.require_zero_mean()?;
        self.gamma.require_zero_mean()
    }

    pub fn is_finite(&self) -> bool {
        self.mu.is_finite() && self.gamma.is_finite()
    }
}

/// Eddy velocities `u' = -dy inv_lap(gamma)`, `v' = dx inv_lap(gamma)`.
/// The pair is discretely divergence-free by the multiplier identity.
pub fn eddy_velocity(gamma: &SpectralField2D) -> Result<(SpectralField2D, SpectralField2D)> {
    let psi = inverse_laplacian(gamma)?;
    let u = derivative(&psi, Axis2::Y, 1).scale(-1.0);
    let v = derivative(&psi, Axis2::X, 1);
    Ok((u, v))
}

/// Mean-flow forcing `G(gamma) = dy [ (dx inv_lap gamma)(dy inv_lap gamma) ]^bar`,
/// equal to `-dy (u'v')^bar`.
pub fn compute_g(tf: &Transform, gamma: &SpectralField2D) -> Result<ZonalSpectral1D> {
    gamma.require_zero_mean()?;
    let psi = inverse_laplacian(gamma)?;
    let psi_x = derivative(&psi, Axis2::X, 1);
    let psi_y = derivative(&psi, Axis2::Y, 1);
    let prod = dealias_product(tf, &psi_x, &psi_y)?;
    Ok(derivative_zonal(&prod.zonal_average(), 1))
}

/// Eddy forcing
/// `F(mu,gamma) = (dy inv_lap gamma) gamma_x - (dx inv_lap gamma) gamma_y
///  - mu gamma_x -/+ c0 gamma_x + dy [ (dx inv_lap gamma) gamma ]^bar`.
///
/// The `(0,0)` output coefficient vanishes identically (every term carries
/// an exact zero multiplier or cancels pairwise); it is zeroed exactly after
/// assembly so the zero-mean invariant survives floating point.
pub fn compute_f(
    tf: &Transform,
    mu: &ZonalSpectral1D,
    gamma: &SpectralField2D,
    p: &SolverParams,
) -> Result<SpectralField2D> {
    mu.require_zero_mean()?;
    gamma.require_zero_mean()?;
    let psi = inverse_laplacian(gamma)?;
    let psi_x = derivative(&psi, Axis2::X, 1);
    let psi_y = derivative(&psi, Axis2::Y, 1);
    let gx = derivative(gamma, Axis2::X, 1);
    let gy = derivative(gamma, Axis2::Y, 1);

    let adv_a = dealias_product(tf, &psi_y, &gx)?;
    let adv_b = dealias_product(tf, &psi_x, &gy)?;
    let mean_coupling = dealias_product(tf, &mu.embed_2d(), &gx)?;
    let zonal_flux = derivative_zonal(&dealias_product(tf, &psi_x, gamma)?.zonal_average(), 1);

    let mut f = adv_a.sub(&adv_b)?.sub(&mean_coupling)?;
    let drift = p.f_c0_sign.factor() * p.c0;
    if drift != 0.0 {
        f = f.add(&gx.clone().scale(drift))?;
    }
    f = f.add(&zonal_flux.embed_2d())?;
    debug_assert!(
        !f.is_finite() || f.coeffs[[0, 0]].norm() <= 1e-12 * f.max_abs().max(1e-300)
    );
    Ok(f.project_zero_mean())
}

/// Nonstiff parts of the model system: `(G(gamma), F(mu, gamma))`. The
/// stiff linear parts (`nu`-diffusion, `C1` dispersion) are owned by the
/// integrator's semigroups.
pub fn model_tendency(
    tf: &Transform,
    state: &State,
    p: &SolverParams,
) -> Result<(ZonalSpectral1D, SpectralField2D)> {
    Ok((compute_g(tf, &state.gamma)?, compute_f(tf, &state.mu, &state.gamma, p)?))
}

/// Nonstiff parts of the un-approximated split system (variable `ubar_yy`
/// retained): everything except `nu`-diffusion and the `beta` dispersion.
pub fn split_nonstiff(
    tf: &Transform,
    ubar: &ZonalSpectral1D,
    zeta_e: &SpectralField2D,
    _p: &SolverParams,
) -> Result<(ZonalSpectral1D, SpectralField2D)> {
    zeta_e.require_zero_mean()?;
    let (u_e, v_e) = eddy_velocity(zeta_e)?;
    let zx = derivative(zeta_e, Axis2::X, 1);
    let zy = derivative(zeta_e, Axis2::Y, 1);
    let ubar_yy = derivative_zonal(ubar, 2);

    let shear = dealias_product(tf, &ubar_yy.embed_2d(), &v_e)?;
    let mean_adv = dealias_product(tf, &ubar.embed_2d(), &zx)?;
    let eddy_adv_x = dealias_product(tf, &u_e, &zx)?;
    let eddy_adv_y = dealias_product(tf, &v_e, &zy)?;
    let zonal_flux = derivative_zonal(&dealias_product(tf, &v_e, zeta_e)?.zonal_average(), 1);

    let dzeta = shear
        .sub(&mean_adv)?
        .sub(&eddy_adv_x)?
        .sub(&eddy_adv_y)?
        .add(&zonal_flux.embed_2d())?
        .project_zero_mean();
    let dubar = compute_g(tf, zeta_e)?;
    Ok((dubar, dzeta))
}

/// Complete right-hand side of the split system:
/// `d(ubar)/dt = nu ubar_yy + G(zeta')` and
/// `d(zeta')/dt = nu lap zeta' - (beta - ubar_yy) v' - ubar zeta'_x
///  - u' zeta'_x - v' zeta'_y + dy (v' zeta')^bar`.
pub fn split_tendency(
    tf: &Transform,
    ubar: &ZonalSpectral1D,
    zeta_e: &SpectralField2D,
    p: &SolverParams,
) -> Result<(ZonalSpectral1D, SpectralField2D)> {
    let (dubar_ns, dzeta_ns) = split_nonstiff(tf, ubar, zeta_e, p)?;
    let (_, v_e) = eddy_velocity(zeta_e)?;
    let dubar = dubar_ns.add(&derivative_zonal(ubar, 2).scale(p.nu))?;
    let dzeta = dzeta_ns
        .add(&laplacian(zeta_e).scale(p.nu))?
        .add(&v_e.scale(-p.beta))?
        .project_zero_mean();
    Ok((dubar, dzeta))
}

/// Advection part of the full vorticity equation, `-(u zeta_x + v zeta_y)`
/// with `(u, v)` from `psi = inv_lap zeta`.
pub fn full_nonstiff(tf: &Transform, zeta: &SpectralField2D) -> Result<SpectralField2D> {
    zeta.require_zero_mean()?;
    let psi = inverse_laplacian(zeta)?;
    let u = derivative(&psi, Axis2::Y, 1).scale(-1.0);
    let v = derivative(&psi, Axis2::X, 1);
    let zx = derivative(zeta, Axis2::X, 1);
    let zy = derivative(zeta, Axis2::Y, 1);
    let adv = dealias_product(tf, &u, &zx)?.add(&dealias_product(tf, &v, &zy)?)?;
    Ok(adv.scale(-1.0).project_zero_mean())
}

/// Complete right-hand side of the full vorticity equation:
/// `-u zeta_x - v zeta_y - beta v + nu lap zeta`. The `beta y` background
/// enters only through `beta v`, which is periodic-safe.
pub fn full_tendency(
    tf: &Transform,
    zeta: &SpectralField2D,
    p: &SolverParams,
) -> Result<SpectralField2D> {
    let ns = full_nonstiff(tf, zeta)?;
    let psi = inverse_laplacian(zeta)?;
    let v = derivative(&psi, Axis2::X, 1);
    Ok(ns
        .add(&v.scale(-p.beta))?
        .add(&laplacian(zeta).scale(p.nu))?
        .project_zero_mean())
}

/// Zonal Reynolds stress profile `(u'v')^bar`. Satisfies
/// `G(gamma) = -dy (u'v')^bar`.
pub fn reynolds_stress(tf: &Transform, gamma: &SpectralField2D) -> Result<ZonalSpectral1D> {
    gamma.require_zero_mean()?;
    let (u_e, v_e) = eddy_velocity(gamma)?;
    Ok(dealias_product(tf, &u_e, &v_e)?.zonal_average())
}

/// Split a full vorticity field into `(ubar, zeta')`: the zonal column maps
/// to `ubar` through `zeta^bar = -dy ubar` (zero mean flow), the rest is the
/// eddy part.
pub fn decompose_vorticity(zeta: &SpectralField2D) -> Result<(ZonalSpectral1D, SpectralField2D)> {
    zeta.require_zero_mean()?;
    let grid = &zeta.grid;
    let n = grid.n;
    let mut ubar = ZonalSpectral1D::zeros(grid);
    for i2 in 1..n {
        if i2 == n / 2 {
            continue; // Nyquist: 1/(i k) has no Hermitian-safe value there
        }
        let k2 = grid.wavenumber(grid.index_of_bin(i2));
        ubar.coeffs[i2] = Complex64::new(0.0, 1.0) * zeta.coeffs[[0, i2]] / k2;
    }
    let mut eddy = zeta.clone();
    for i2 in 0..n {
        eddy.coeffs[[0, i2]] = Complex64::ZERO;
    }
    Ok((ubar, eddy))
}

/// Inverse of [`decompose_vorticity`]: `zeta = -dy ubar + zeta'`.
pub fn reassemble_vorticity(
    ubar: &ZonalSpectral1D,
    zeta_e: &SpectralField2D,
) -> Result<SpectralField2D> {
    ubar.grid.same_grid(&zeta_e.grid)?;
    let zonal = derivative_zonal(ubar, 1).scale(-1.0);
    let mut zeta = zeta_e.clone();
    for i2 in 0..zeta.n() {
        zeta.coeffs[[0, i2]] = zonal.coeffs[i2];
    }
    Ok(zeta)
}
