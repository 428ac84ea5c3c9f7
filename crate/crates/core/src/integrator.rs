//! Exact linear semigroups of the Duhamel split and exponential time
//! stepping for all three formulations.
//!
//! The stiff linear parts (`nu` diffusion and the dispersive
//! `dx inv_lap` term) are integrated exactly through per-mode multipliers;
//! only the nonstiff tendencies `F`, `G` (or the advection) are quadrature
//! approximations.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{record_for, DiagnosticsRecord};
use crate::dynamics::{
    full_nonstiff, model_tendency, split_nonstiff, Formulation, SolverParams, State,
};
use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField2D, Transform, ZonalSpectral1D};

/// `phi1(z) = (e^z - 1)/z`, with a 4-term Taylor fallback for `|z| < 1e-4`
/// where the direct formula cancels.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        Complex64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `phi2(z) = (e^z - 1 - z)/z^2`, same fallback.
pub fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        Complex64::new(0.5, 0.0) + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// Symbol of the zonal heat operator `nu dyy`: `-nu k2^2`.
pub fn zonal_symbol(grid: &GridSpec, nu: f64) -> Array1<Complex64> {
    Array1::from_shape_fn(grid.n, |i2| {
        let k2 = grid.wavenumber(grid.index_of_bin(i2));
        Complex64::new(-nu * k2 * k2, 0.0)
    })
}

/// Symbol of `nu lap - disp * dx inv_lap`: `i disp k1/|k|^2 - nu |k|^2`,
/// zero at the excluded `k = 0` mode.
pub fn field_symbol(grid: &GridSpec, nu: f64, disp: f64) -> Array2<Complex64> {
    Array2::from_shape_fn((grid.n, grid.n), |(i1, i2)| {
        if i1 == 0 && i2 == 0 {
            return Complex64::ZERO;
        }
        let k1 = grid.wavenumber(grid.index_of_bin(i1));
        let k2 = grid.wavenumber(grid.index_of_bin(i2));
        let ksq = k1 * k1 + k2 * k2;
        Complex64::new(-nu * ksq, disp * k1 / ksq)
    })
}

/// Heat flow `exp(nu t dyy)`: multiply `coeff(k2)` by `exp(-nu k2^2 t)`.
/// Norm-nonincreasing in every Sobolev norm for `t >= 0`.
pub fn heat_semigroup(mu: &ZonalSpectral1D, t: f64, nu: f64) -> Result<ZonalSpectral1D> {
    if t < 0.0 {
        return Err(Error::InvalidParam(format!("semigroup time t = {t} must be >= 0")));
    }
    let grid = &mu.grid;
    let mut out = mu.clone();
    for i2 in 0..grid.n {
        let k2 = grid.wavenumber(grid.index_of_bin(i2));
        out.coeffs[i2] *= (-nu * k2 * k2 * t).exp();
    }
    Ok(out)
}

/// Eddy flow `exp(t (nu lap - c1 dx inv_lap))`: multiply `coeff(k)` by
/// `exp(t (i c1 k1/|k|^2 - nu |k|^2))`. The dispersive factor is unimodular,
/// so the modulus decays like the pure heat flow.
pub fn eddy_semigroup(
    gamma: &SpectralField2D,
    t: f64,
    nu: f64,
    c1: f64,
) -> Result<SpectralField2D> {
    if t < 0.0 {
        return Err(Error::InvalidParam(format!("semigroup time t = {t} must be >= 0")));
    }
    gamma.require_zero_mean()?;
    let sym = field_symbol(&gamma.grid, nu, c1);
    let mut out = gamma.clone();
    for ((i1, i2), z) in sym.indexed_iter() {
        out.coeffs[[i1, i2]] *= (z * t).exp();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ExponentialEuler,
    #[default]
    Etdrk2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub model: Formulation,
    pub t_final: f64,
    /// Record diagnostics every this many steps.
    pub diag_stride: usize,
    /// Keep a state snapshot every this many steps (memory guard; the
    /// initial and final states are always kept).
    pub state_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            scheme: Scheme::Etdrk2,
            model: Formulation::ModelSystem,
            t_final: 1.0,
            diag_stride: 1,
            state_stride: 100,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParam(format!("dt = {} must be > 0", self.dt)));
        }
        if self.t_final < 0.0 {
            return Err(Error::InvalidParam(format!("T = {} must be >= 0", self.t_final)));
        }
        if self.t_final > 0.0 && self.dt > self.t_final * (1.0 + 1e-12) {
            return Err(Error::InvalidParam(format!(
                "dt = {} must not exceed T = {}",
                self.dt, self.t_final
            )));
        }
        if self.diag_stride == 0 || self.state_stride == 0 {
            return Err(Error::InvalidParam("strides must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFailureRecord {
    pub t: f64,
    pub step_index: usize,
    pub detail: String,
}

/// Time-indexed output of a run: state snapshots, diagnostics records, and
/// the failure record if the run aborted.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub records: Vec<DiagnosticsRecord>,
    pub failure: Option<StepFailureRecord>,
}

impl Trajectory {
    pub fn final_state(&self) -> &State {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// Precomputed multipliers for one `(grid, params, formulation, dt)`.
pub struct Stepper {
    tf: Transform,
    params: SolverParams,
    kind: Formulation,
    dt: f64,
    scheme: Scheme,
    exp_z: Array1<Complex64>,
    phi1_z: Array1<Complex64>,
    phi2_z: Array1<Complex64>,
    exp_f: Array2<Complex64>,
    phi1_f: Array2<Complex64>,
    phi2_f: Array2<Complex64>,
}

impl Stepper {
    pub fn new(
        grid: &GridSpec,
        p: &SolverParams,
        kind: Formulation,
        scheme: Scheme,
        dt: f64,
    ) -> Result<Self> {
        p.validate()?;
        p.check_grid(grid)?;
        if !(dt > 0.0) {
            return Err(Error::InvalidParam(format!("dt = {dt} must be > 0")));
        }
        let disp = match kind {
            Formulation::ModelSystem => p.c1,
            Formulation::SplitSystem | Formulation::FullVorticity => p.beta,
        };
        let lam_z = zonal_symbol(grid, p.nu);
        let lam_f = field_symbol(grid, p.nu, disp);
        let exp_z = lam_z.mapv(|z| (z * dt).exp());
        let phi1_z = lam_z.mapv(|z| phi1(z * dt));
        let phi2_z = lam_z.mapv(|z| phi2(z * dt));
        let exp_f = lam_f.mapv(|z| (z * dt).exp());
        let phi1_f = lam_f.mapv(|z| phi1(z * dt));
        let phi2_f = lam_f.mapv(|z| phi2(z * dt));
        Ok(Self {
            tf: Transform::new(grid),
            params: p.clone(),
            kind,
            dt,
            scheme,
            exp_z,
            phi1_z,
            phi2_z,
            exp_f,
            phi1_f,
            phi2_f,
        })
    }

    pub fn transform(&self) -> &Transform {
        &self.tf
    }

    fn nonstiff(&self, state: &State) -> Result<(ZonalSpectral1D, SpectralField2D)> {
        match self.kind {
            Formulation::ModelSystem => model_tendency(&self.tf, state, &self.params),
            Formulation::SplitSystem => {
                split_nonstiff(&self.tf, &state.mu, &state.gamma, &self.params)
            }
            Formulation::FullVorticity => Ok((
                ZonalSpectral1D::zeros(&state.mu.grid),
                full_nonstiff(&self.tf, &state.gamma)?,
            )),
        }
    }

    fn apply(
        mul_z: &Array1<Complex64>,
        mul_f: &Array2<Complex64>,
        zonal: &ZonalSpectral1D,
        field: &SpectralField2D,
    ) -> (ZonalSpectral1D, SpectralField2D) {
        let mut z = zonal.clone();
        for (c, m) in z.coeffs.iter_mut().zip(mul_z.iter()) {
            *c *= m;
        }
        let mut f = field.clone();
        for (c, m) in f.coeffs.iter_mut().zip(mul_f.iter()) {
            *c *= m;
        }
        (z, f)
    }

    /// Advance one step of length `dt`. Zero-mean is preserved exactly: the
    /// excluded-mode multipliers are exactly 1 and the tendencies carry
    /// exact zeros there.
    pub fn step(&self, state: &State) -> Result<State> {
        let dt = self.dt;
        let (n_z, n_f) = self.nonstiff(state)?;
        let next = match self.scheme {
            Scheme::ExponentialEuler => {
                // u+ = S(dt) (u + dt N(u))
                let zin = state.mu.add(&n_z.scale(dt))?;
                let fin = state.gamma.add(&n_f.scale(dt))?;
                let (z, f) = Self::apply(&self.exp_z, &self.exp_f, &zin, &fin);
                State::new(state.t + dt, z, f)?
            }
            Scheme::Etdrk2 => {
                // a  = e^z u + dt phi1 N(u)
                // u+ = a + dt phi2 (N(a) - N(u))
                let (ez, ef) = Self::apply(&self.exp_z, &self.exp_f, &state.mu, &state.gamma);
                let (p1z, p1f) = Self::apply(&self.phi1_z, &self.phi1_f, &n_z, &n_f);
                let a = State::new(
                    state.t + dt,
                    ez.add(&p1z.scale(dt))?,
                    ef.add(&p1f.scale(dt))?,
                )?;
                let (na_z, na_f) = self.nonstiff(&a)?;
                let (p2z, p2f) = Self::apply(
                    &self.phi2_z,
                    &self.phi2_f,
                    &na_z.sub(&n_z)?,
                    &na_f.sub(&n_f)?,
                );
                State::new(a.t, a.mu.add(&p2z.scale(dt))?, a.gamma.add(&p2f.scale(dt))?)?
            }
        };
        if !next.is_finite() {
            return Err(Error::StepFailure {
                t: state.t,
                detail: "non-finite coefficients after step".into(),
            });
        }
        Ok(next)
    }
}

/// Advisory CFL bound `dt <= 0.5 / (max |k| * max velocity)`; the linear
/// part is exact so violation only degrades nonlinear accuracy.
pub fn cfl_advisory(tf: &Transform, state: &State, kind: Formulation) -> Result<f64> {
    let grid = &state.gamma.grid;
    let gamma = match kind {
        Formulation::FullVorticity | Formulation::ModelSystem | Formulation::SplitSystem => {
            &state.gamma
        }
    };
    if !gamma.is_zero_mean() {
        return Ok(f64::INFINITY);
    }
    let (u, v) = crate::dynamics::eddy_velocity(gamma)?;
    let up = tf.inverse(&u)?;
    let vp = tf.inverse(&v)?;
    let mut vmax = 0.0f64;
    for (a, b) in up.iter().zip(vp.iter()) {
        vmax = vmax.max(a.abs()).max(b.abs());
    }
    let kmax = grid.wavenumber(grid.n as i64 / 2);
    if vmax * kmax == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(0.5 / (kmax * vmax))
    }
}

/// Run `state0` forward to `cfg.t_final` in steps of `cfg.dt`, recording
/// diagnostics every `diag_stride` steps (plus the initial and final
/// samples). Deterministic for fixed inputs. A step failure aborts and
/// returns the partial trajectory with the failure record attached.
pub fn simulate(
    state0: &State,
    cfg: &IntegratorConfig,
    p: &SolverParams,
    mut sink: Option<&mut dyn FnMut(&DiagnosticsRecord)>,
) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = state0.gamma.grid.clone();
    let stepper = Stepper::new(&grid, p, cfg.model, cfg.scheme, cfg.dt)?;

    let n_steps_f = cfg.t_final / cfg.dt;
    let n_steps = n_steps_f.round() as usize;
    if (n_steps_f - n_steps as f64).abs() > 1e-6 {
        return Err(Error::InvalidParam(format!(
            "T = {} is not an integer multiple of dt = {}",
            cfg.t_final, cfg.dt
        )));
    }

    let advisory = cfl_advisory(&stepper.tf, state0, cfg.model)?;
    if cfg.dt > advisory {
        log::warn!("dt = {} exceeds advisory CFL bound {:.3e}", cfg.dt, advisory);
    }

    let mut states = vec![state0.clone()];
    let mut records = Vec::new();
    let mut push_record = |rec: DiagnosticsRecord, records: &mut Vec<DiagnosticsRecord>| {
        if let Some(f) = sink.as_mut() {
            f(&rec);
        }
        records.push(rec);
    };
    push_record(record_for(cfg.model, state0, p)?, &mut records);

    let mut current = state0.clone();
    for step_index in 1..=n_steps {
        match stepper.step(&current) {
            Ok(next) => current = next,
            Err(Error::StepFailure { t, detail }) => {
                return Ok(Trajectory {
                    states,
                    records,
                    failure: Some(StepFailureRecord { t, step_index, detail }),
                });
            }
            Err(e) => return Err(e),
        }
        // Times as exact multiples of dt, immune to accumulation drift.
        current.t = step_index as f64 * cfg.dt;
        if step_index % cfg.diag_stride == 0 || step_index == n_steps {
            push_record(record_for(cfg.model, &current, p)?, &mut records);
        }
        if step_index % cfg.state_stride == 0 || step_index == n_steps {
            states.push(current.clone());
        }
    }
    Ok(Trajectory { states, records, failure: None })
}
