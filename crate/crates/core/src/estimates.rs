//! Brute-force numerical probes of the multiplier bounds behind the
//! contraction argument: the dualized trilinear convolution sums for `G`
//! and the four pieces of `F`, their Lipschitz variants, and the elementary
//! kernel bound `sup x^a e^{-x}`.
//!
//! The probes run on the integer lattice `{-M..M}^2 \ {0}` (the `2*pi` box,
//! where `|k| >= 1` for nonzero modes). The sup over the outer dual vector
//! `g` is exact (it is the l2 norm of the inner-sum vector); the sup over
//! the inner vectors is sampled with seeded random unit vectors plus
//! single-mode extremal candidates, so results are deterministic given
//! `(seed, trials, M)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{compute_f, compute_g, SolverParams};
use crate::error::{Error, Result};
use crate::integrator::{field_symbol, phi1, zonal_symbol};
use crate::spectral::{
    sobolev_norm, sobolev_norm_zonal, GridSpec, SpectralField2D, Transform, ZonalSpectral1D,
};
use num_complex::Complex64;

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Normalized drift coefficient used by the diagonal piece.
pub const DRIFT_C0: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeTruncation {
    /// Max `|n_i|` of the truncated integer lattice.
    pub m: i64,
    pub s: f64,
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for LatticeTruncation {
    fn default() -> Self {
        Self { m: 16, s: 0.0, alpha: 0.8, trials: 100, seed: 7 }
    }
}

impl LatticeTruncation {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidParam(format!("M = {} must be >= 2", self.m)));
        }
        if self.trials < 10 {
            return Err(Error::InvalidParam(format!(
                "trials = {} must be >= 10",
                self.trials
            )));
        }
        if self.s < 0.0 {
            return Err(Error::InvalidParam(format!("s = {} must be >= 0", self.s)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "alpha = {} must lie in (0, 1]",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// `sup_{x >= 0} x^alpha e^{-x} = (alpha/e)^alpha`, attained at `x = alpha`.
pub fn kernel_max(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParam(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    Ok((alpha / std::f64::consts::E).powf(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub max: f64,
    pub mean: f64,
    pub p95: f64,
    /// Exact maximum over single-mode (point-mass) input pairs.
    pub single_mode_max: f64,
}

fn stats_from(ratios: &[f64], single_mode_max: f64) -> RatioStats {
    let mut sorted = ratios.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let p95 = sorted[((0.95 * n as f64).ceil() as usize).clamp(1, n) - 1];
    RatioStats {
        max: sorted[n - 1].max(single_mode_max),
        mean: sorted.iter().sum::<f64>() / n as f64,
        p95,
        single_mode_max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FPiece {
    /// Full convolution `k = h + m`, weight `|m|/|h|`.
    Advection,
    /// Zonal-average output `k1 = 0`, weight `|k|/|h|`.
    Zonal,
    /// Diagonal `c0 |k|^{1-2alpha}` drift term.
    Drift,
    /// `k1 = h1`, 1D second factor, weight `|h1|` — the exact Fourier
    /// multiplier of the `mu gamma_x` term.
    MeanCoupling,
    /// Same constraint set with the weight majorized to `|h|`. This lossy
    /// majorization admits resonant triads `h = (1, M), m2 = -M, k = (1, 0)`
    /// whose single term is `sqrt(1 + M^2)`: the variant grows linearly in
    /// the truncation and is reported to document that gap, not as a
    /// boundedness probe.
    MeanCouplingMajorant,
}

impl FPiece {
    pub fn name(self) -> &'static str {
        match self {
            FPiece::Advection => "f-advection",
            FPiece::Zonal => "f-zonal",
            FPiece::Drift => "f-drift",
            FPiece::MeanCoupling => "f-mean-coupling",
            FPiece::MeanCouplingMajorant => "f-mean-coupling-majorant",
        }
    }

    /// The four dualized pieces of the eddy estimate (the boundedness
    /// gate); the majorant variant is reported alongside but not gated.
    pub const GATED: [FPiece; 4] =
        [FPiece::Advection, FPiece::Zonal, FPiece::Drift, FPiece::MeanCoupling];
}

/// Dense values on `{-m..m}^2`, row-major, origin forced to zero.
struct Lattice2 {
    m: i64,
    side: usize,
    vals: Vec<f64>,
}

impl Lattice2 {
    fn from_fn(m: i64, mut f: impl FnMut(i64, i64) -> f64) -> Self {
        let side = (2 * m + 1) as usize;
        let mut vals = vec![0.0; side * side];
        for h1 in -m..=m {
            for h2 in -m..=m {
                if h1 == 0 && h2 == 0 {
                    continue;
                }
                vals[((h1 + m) as usize) * side + (h2 + m) as usize] = f(h1, h2);
            }
        }
        Self { m, side, vals }
    }

    #[inline]
    fn get(&self, h1: i64, h2: i64) -> f64 {
        self.vals[((h1 + self.m) as usize) * self.side + (h2 + self.m) as usize]
    }
}

fn draw_unit_2d(rng: &mut ChaCha8Rng, m: i64) -> Lattice2 {
    let mut l = Lattice2::from_fn(m, |_, _| 0.0);
    let mut sq = 0.0;
    for h1 in -m..=m {
        for h2 in -m..=m {
            if h1 == 0 && h2 == 0 {
                continue;
            }
            let v: f64 = rng.sample::<f64, _>(rand_distr_standard_normal()).abs();
            l.vals[((h1 + m) as usize) * l.side + (h2 + m) as usize] = v;
            sq += v * v;
        }
    }
    let inv = 1.0 / sq.sqrt();
    for v in &mut l.vals {
        *v *= inv;
    }
    l
}

fn draw_unit_1d(rng: &mut ChaCha8Rng, m: i64) -> Vec<f64> {
    let side = (2 * m + 1) as usize;
    let mut vals = vec![0.0; side];
    let mut sq = 0.0;
    for j in -m..=m {
        if j == 0 {
            continue;
        }
        let v: f64 = rng.sample::<f64, _>(rand_distr_standard_normal()).abs();
        vals[(j + m) as usize] = v;
        sq += v * v;
    }
    let inv = 1.0 / sq.sqrt();
    for v in &mut vals {
        *v *= inv;
    }
    vals
}

// rand 0.8 ships StandardNormal through rand_distr; go through a tiny shim
// so the sampling stays on the crate's pinned RNG.
fn rand_distr_standard_normal() -> impl rand::distributions::Distribution<f64> {
    struct BoxMuller;
    impl rand::distributions::Distribution<f64> for BoxMuller {
        fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            // Marsaglia polar method, deterministic per RNG stream.
            loop {
                let u: f64 = rng.gen_range(-1.0..1.0);
                let v: f64 = rng.gen_range(-1.0..1.0);
                let s = u * u + v * v;
                if s > 0.0 && s < 1.0 {
                    return u * ((-2.0 * s.ln()) / s).sqrt();
                }
            }
        }
    }
    BoxMuller
}

#[inline]
fn bracket_pow(sq_norm: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (1.0 + sq_norm).powf(0.5 * s)
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(SEED_STRIDE.wrapping_mul(trial as u64 + 1)))
}

/// Inner-sum vector builder for the `G` sum: free variables `h != 0` and
/// `m2`, with `m~ = (-h1, m2) != 0` and output index `k2 = h2 + m2 != 0`.
fn g_ratio_one(m: i64, a: &Lattice2, b: &Lattice2, k_weight: &[f64]) -> f64 {
    let two_m = 2 * m;
    let mut w = vec![0.0f64; (4 * m + 1) as usize];
    for h1 in -m..=m {
        for h2 in -m..=m {
            if h1 == 0 && h2 == 0 {
                continue;
            }
            let av = a.get(h1, h2);
            if av == 0.0 {
                continue;
            }
            for m2 in -m..=m {
                if h1 == 0 && m2 == 0 {
                    continue; // m~ = 0 excluded
                }
                let k2 = h2 + m2;
                if k2 == 0 {
                    continue;
                }
                w[(k2 + two_m) as usize] += av * b.get(-h1, m2);
            }
        }
    }
    let mut sq = 0.0;
    for (i, wv) in w.iter().enumerate() {
        let kw = k_weight[i];
        sq += (kw * wv) * (kw * wv);
    }
    sq.sqrt()
}

/// `V(k2,h,m~)/(<h>^s <m~>^s)` weights: `A(h) = 1/(|h| <h>^s)`,
/// `B(m~) = 1/(|m~| <m~>^s)`, `K(k2) = <k2>^s |k2|^{1-2alpha}`.
fn g_tables(tr: &LatticeTruncation) -> (Lattice2, Lattice2, Vec<f64>) {
    let s = tr.s;
    let a = Lattice2::from_fn(tr.m, |h1, h2| {
        let sq = (h1 * h1 + h2 * h2) as f64;
        1.0 / (sq.sqrt() * bracket_pow(sq, s))
    });
    let b = Lattice2::from_fn(tr.m, |m1, m2| {
        let sq = (m1 * m1 + m2 * m2) as f64;
        1.0 / (sq.sqrt() * bracket_pow(sq, s))
    });
    let k: Vec<f64> = (-2 * tr.m..=2 * tr.m)
        .map(|k2| {
            if k2 == 0 {
                0.0
            } else {
                let sq = (k2 * k2) as f64;
                bracket_pow(sq, s) * sq.sqrt().powf(1.0 - 2.0 * tr.alpha)
            }
        })
        .collect();
    (a, b, k)
}

/// Sampled dual-norm statistics for the `G` convolution sum.
pub fn trilinear_g_ratio(tr: &LatticeTruncation) -> Result<RatioStats> {
    tr.validate()?;
    let (aw, bw, kw) = g_tables(tr);
    let m = tr.m;

    // Single-mode extremal candidates: one term K(h2+m2) A(h) B(-h1,m2).
    let mut single = 0.0f64;
    for h1 in -m..=m {
        for h2 in -m..=m {
            if h1 == 0 && h2 == 0 {
                continue;
            }
            for m2 in -m..=m {
                if (h1 == 0 && m2 == 0) || h2 + m2 == 0 {
                    continue;
                }
                let v = kw[(h2 + m2 + 2 * m) as usize] * aw.get(h1, h2) * bw.get(-h1, m2);
                single = single.max(v);
            }
        }
    }

    let ratios: Vec<f64> = (0..tr.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(tr.seed, trial);
            let f1 = draw_unit_2d(&mut rng, m);
            let f2 = draw_unit_2d(&mut rng, m);
            let a = Lattice2::from_fn(m, |h1, h2| f1.get(h1, h2) * aw.get(h1, h2));
            let b = Lattice2::from_fn(m, |m1, m2| f2.get(m1, m2) * bw.get(m1, m2));
            g_ratio_one(m, &a, &b, &kw)
        })
        .collect();
    Ok(stats_from(&ratios, single))
}

fn k_table_2d(m_out: i64, s: f64, alpha: f64) -> Lattice2 {
    Lattice2::from_fn(m_out, |k1, k2| {
        let sq = (k1 * k1 + k2 * k2) as f64;
        bracket_pow(sq, s) / sq.sqrt().powf(2.0 * alpha)
    })
}

/// Sampled dual-norm statistics for the selected `F` piece.
pub fn trilinear_f_ratio(tr: &LatticeTruncation, piece: FPiece) -> Result<RatioStats> {
    tr.validate()?;
    let m = tr.m;
    let s = tr.s;
    match piece {
        FPiece::Drift => {
            // Exact diagonal operator norm: c0 * max_k |k|^{1-2alpha}.
            let mut best = 0.0f64;
            for k1 in -m..=m {
                for k2 in -m..=m {
                    if k1 == 0 && k2 == 0 {
                        continue;
                    }
                    let kn = ((k1 * k1 + k2 * k2) as f64).sqrt();
                    best = best.max(DRIFT_C0 * kn.powf(1.0 - 2.0 * tr.alpha));
                }
            }
            Ok(RatioStats { max: best, mean: best, p95: best, single_mode_max: best })
        }
        FPiece::Advection => {
            let aw = Lattice2::from_fn(m, |h1, h2| {
                let sq = (h1 * h1 + h2 * h2) as f64;
                1.0 / (sq.sqrt() * bracket_pow(sq, s))
            });
            let bw = Lattice2::from_fn(m, |m1, m2| {
                let sq = (m1 * m1 + m2 * m2) as f64;
                sq.sqrt() / bracket_pow(sq, s)
            });
            let kw = k_table_2d(2 * m, s, tr.alpha);

            let mut single = 0.0f64;
            for h1 in -m..=m {
                for h2 in -m..=m {
                    if h1 == 0 && h2 == 0 {
                        continue;
                    }
                    for m1 in -m..=m {
                        for m2 in -m..=m {
                            if (m1 == 0 && m2 == 0) || (h1 + m1 == 0 && h2 + m2 == 0) {
                                continue;
                            }
                            let v = kw.get(h1 + m1, h2 + m2) * aw.get(h1, h2) * bw.get(m1, m2);
                            single = single.max(v);
                        }
                    }
                }
            }

            let ratios: Vec<f64> = (0..tr.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = trial_rng(tr.seed, trial);
                    let f1 = draw_unit_2d(&mut rng, m);
                    let f2 = draw_unit_2d(&mut rng, m);
                    let a = Lattice2::from_fn(m, |h1, h2| f1.get(h1, h2) * aw.get(h1, h2));
                    let b = Lattice2::from_fn(m, |m1, m2| f2.get(m1, m2) * bw.get(m1, m2));
                    let side_out = (4 * m + 1) as usize;
                    let mut w = vec![0.0f64; side_out * side_out];
                    for h1 in -m..=m {
                        for h2 in -m..=m {
                            let av = a.get(h1, h2);
                            if av == 0.0 {
                                continue;
                            }
                            for m1 in -m..=m {
                                for m2 in -m..=m {
                                    let bv = b.get(m1, m2);
                                    if bv == 0.0 {
                                        continue;
                                    }
                                    let i = ((h1 + m1 + 2 * m) as usize) * side_out
                                        + (h2 + m2 + 2 * m) as usize;
                                    w[i] += av * bv;
                                }
                            }
                        }
                    }
                    let mut sq = 0.0;
                    for k1 in -2 * m..=2 * m {
                        for k2 in -2 * m..=2 * m {
                            if k1 == 0 && k2 == 0 {
                                continue;
                            }
                            let wv = w[((k1 + 2 * m) as usize) * side_out
                                + (k2 + 2 * m) as usize];
                            let t = kw.get(k1, k2) * wv;
                            sq += t * t;
                        }
                    }
                    sq.sqrt()
                })
                .collect();
            Ok(stats_from(&ratios, single))
        }
        FPiece::Zonal => {
            let aw = Lattice2::from_fn(m, |h1, h2| {
                let sq = (h1 * h1 + h2 * h2) as f64;
                1.0 / (sq.sqrt() * bracket_pow(sq, s))
            });
            let bw = Lattice2::from_fn(m, |m1, m2| {
                let sq = (m1 * m1 + m2 * m2) as f64;
                1.0 / bracket_pow(sq, s)
            });
            // k = (0, k2): K = <k2>^s |k2|^{1-2alpha}
            let kw: Vec<f64> = (-2 * m..=2 * m)
                .map(|k2| {
                    if k2 == 0 {
                        0.0
                    } else {
                        let sq = (k2 * k2) as f64;
                        bracket_pow(sq, s) * sq.sqrt().powf(1.0 - 2.0 * tr.alpha)
                    }
                })
                .collect();

            let mut single = 0.0f64;
            for h1 in -m..=m {
                for h2 in -m..=m {
                    if h1 == 0 && h2 == 0 {
                        continue;
                    }
                    for m2 in -m..=m {
                        if (h1 == 0 && m2 == 0) || h2 + m2 == 0 {
                            continue;
                        }
                        let v = kw[(h2 + m2 + 2 * m) as usize] * aw.get(h1, h2) * bw.get(-h1, m2);
                        single = single.max(v);
                    }
                }
            }

            let ratios: Vec<f64> = (0..tr.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = trial_rng(tr.seed, trial);
                    let f1 = draw_unit_2d(&mut rng, m);
                    let f2 = draw_unit_2d(&mut rng, m);
                    let a = Lattice2::from_fn(m, |h1, h2| f1.get(h1, h2) * aw.get(h1, h2));
                    let b = Lattice2::from_fn(m, |m1, m2| f2.get(m1, m2) * bw.get(m1, m2));
                    g_ratio_one(m, &a, &b, &kw)
                })
                .collect();
            Ok(stats_from(&ratios, single))
        }
        FPiece::MeanCoupling | FPiece::MeanCouplingMajorant => {
            let aw = Lattice2::from_fn(m, |h1, h2| {
                let sq = (h1 * h1 + h2 * h2) as f64;
                let numerator = match piece {
                    FPiece::MeanCoupling => (h1 * h1) as f64,
                    _ => sq,
                };
                numerator.sqrt() / bracket_pow(sq, s)
            });
            let bw: Vec<f64> = (-m..=m)
                .map(|m2| {
                    if m2 == 0 {
                        0.0
                    } else {
                        1.0 / bracket_pow((m2 * m2) as f64, s)
                    }
                })
                .collect();
            let kw = k_table_2d(2 * m, s, tr.alpha);

            let mut single = 0.0f64;
            for h1 in -m..=m {
                for h2 in -m..=m {
                    if h1 == 0 && h2 == 0 {
                        continue;
                    }
                    for m2 in -m..=m {
                        if m2 == 0 || (h1 == 0 && h2 + m2 == 0) {
                            continue;
                        }
                        let v = kw.get(h1, h2 + m2) * aw.get(h1, h2) * bw[(m2 + m) as usize];
                        single = single.max(v);
                    }
                }
            }

            let ratios: Vec<f64> = (0..tr.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = trial_rng(tr.seed, trial);
                    let f1 = draw_unit_2d(&mut rng, m);
                    let f2 = draw_unit_1d(&mut rng, m);
                    let side1 = (2 * m + 1) as usize;
                    let side2 = (4 * m + 1) as usize;
                    let mut w = vec![0.0f64; side1 * side2];
                    for h1 in -m..=m {
                        for h2 in -m..=m {
                            let av = f1.get(h1, h2) * aw.get(h1, h2);
                            if av == 0.0 {
                                continue;
                            }
                            for m2 in -m..=m {
                                if m2 == 0 {
                                    continue;
                                }
                                let bv = f2[(m2 + m) as usize] * bw[(m2 + m) as usize];
                                let i = ((h1 + m) as usize) * side2 + (h2 + m2 + 2 * m) as usize;
                                w[i] += av * bv;
                            }
                        }
                    }
                    let mut sq = 0.0;
                    for k1 in -m..=m {
                        for k2 in -2 * m..=2 * m {
                            if k1 == 0 && k2 == 0 {
                                continue;
                            }
                            let wv = w[((k1 + m) as usize) * side2 + (k2 + 2 * m) as usize];
                            let t = kw.get(k1, k2) * wv;
                            sq += t * t;
                        }
                    }
                    sq.sqrt()
                })
                .collect();
            Ok(stats_from(&ratios, single))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthEntry {
    pub piece: String,
    pub m_small: i64,
    pub m_large: i64,
    pub max_small: f64,
    pub max_large: f64,
    /// `max_large / max_small`; values near 1 are the numerical signature
    /// of a uniform bound.
    pub growth: f64,
}

/// Compare sampled maxima at `M` and `2M` for every piece.
pub fn growth_study(tr: &LatticeTruncation) -> Result<Vec<GrowthEntry>> {
    tr.validate()?;
    let large = LatticeTruncation { m: 2 * tr.m, ..tr.clone() };
    let mut out = Vec::new();
    let g_small = trilinear_g_ratio(tr)?;
    let g_large = trilinear_g_ratio(&large)?;
    out.push(GrowthEntry {
        piece: "g-trilinear".into(),
        m_small: tr.m,
        m_large: large.m,
        max_small: g_small.max,
        max_large: g_large.max,
        growth: g_large.max / g_small.max,
    });
    let mut pieces: Vec<FPiece> = FPiece::GATED.to_vec();
    pieces.push(FPiece::MeanCouplingMajorant);
    for piece in pieces {
        let s = trilinear_f_ratio(tr, piece)?;
        let l = trilinear_f_ratio(&large, piece)?;
        out.push(GrowthEntry {
            piece: piece.name().into(),
            m_small: tr.m,
            m_large: large.m,
            max_small: s.max,
            max_large: l.max,
            growth: l.max / s.max,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusStats {
    pub radius: f64,
    pub raw_max: f64,
    pub raw_mean: f64,
    /// Raw statistics divided by `(1 + 3R) delta^{1-alpha}`.
    pub normalized_max: f64,
    pub normalized_mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub radii: Vec<f64>,
    pub per_radius: Vec<RadiusStats>,
    /// Worst relative deviation of `mean(R)/R` from `mean(1)/1` across the
    /// probed radii.
    pub slope_deviation: f64,
}

/// Lipschitz probe parameters, fixed so the report is self-describing:
/// one Duhamel node of length 1 with unit viscosity and dispersion, no
/// drift.
pub const LIPSCHITZ_DELTA: f64 = 1.0;
pub const LIPSCHITZ_NU: f64 = 1.0;

fn random_state_pair(
    rng: &mut ChaCha8Rng,
    grid: &GridSpec,
    band: i64,
    s: f64,
) -> Result<(ZonalSpectral1D, SpectralField2D)> {
    let normal = rand_distr_standard_normal();
    let mut gamma = SpectralField2D::zeros(grid);
    for m1 in -band..=band {
        for m2 in -band..=band {
            if m1 == 0 && m2 == 0 {
                continue;
            }
            let v = Complex64::new(rng.sample(&normal), rng.sample(&normal));
            gamma.set(m1, m2, v);
        }
    }
    let gamma = gamma.symmetrize().project_zero_mean();
    let mut mu = ZonalSpectral1D::zeros(grid);
    for m2 in -band..=band {
        if m2 == 0 {
            continue;
        }
        let v = Complex64::new(rng.sample(&normal), rng.sample(&normal));
        mu.set(m2, v);
    }
    let mu = mu.symmetrize().project_zero_mean();
    let norm = sobolev_norm_zonal(&mu, s)? + sobolev_norm(&gamma, s)?;
    Ok((mu.scale(1.0 / norm), gamma.scale(1.0 / norm)))
}

/// Measured one-node Lipschitz quotients
/// `||Phi(a) - Phi(b)|| / ||a - b||` for state pairs drawn at radii
/// `R in {1/4, 1/2, 1}`, normalized by `(1 + 3R) delta^{1-alpha}`. The
/// nonlinearity difference is evaluated with the exact-convolution
/// machinery (the enclosing grid retains the full bilinear image of the
/// truncated band).
pub fn lipschitz_ratio(tr: &LatticeTruncation) -> Result<LipschitzReport> {
    tr.validate()?;
    let band = tr.m;
    // Smallest even grid whose alias-safe cutoff covers the 2M image.
    let n = (6 * band + 2) as usize;
    let grid = GridSpec::with_dealias(std::f64::consts::TAU, n, 1, 1)?;
    debug_assert!(grid.dealias_cutoff() >= 2 * band);
    let tf = Transform::new(&grid);
    let p = SolverParams {
        nu: LIPSCHITZ_NU,
        c1: 1.0,
        c0: 0.0,
        beta: 0.0,
        s: tr.s,
        alpha: 0.8,
        ..SolverParams::default()
    };
    let lam_z = zonal_symbol(&grid, p.nu);
    let lam_f = field_symbol(&grid, p.nu, p.c1);
    let wz = lam_z.mapv(|z| LIPSCHITZ_DELTA * phi1(z * LIPSCHITZ_DELTA));
    let wf = lam_f.mapv(|z| LIPSCHITZ_DELTA * phi1(z * LIPSCHITZ_DELTA));

    let radii = [0.25, 0.5, 1.0];
    let mut per_radius = Vec::new();
    let mut means = [0.0f64; 3];
    for (ri, &r) in radii.iter().enumerate() {
        let ratios: Vec<f64> = (0..tr.trials)
            .into_par_iter()
            .map(|trial| -> Result<f64> {
                let mut rng = trial_rng(tr.seed ^ 0xABCD, trial);
                let (mu_a0, ga_a0) = random_state_pair(&mut rng, &grid, band, tr.s)?;
                let (mu_b0, ga_b0) = random_state_pair(&mut rng, &grid, band, tr.s)?;
                let (mu_a, ga_a) = (mu_a0.scale(r), ga_a0.scale(r));
                let (mu_b, ga_b) = (mu_b0.scale(r), ga_b0.scale(r));

                let dg = compute_g(&tf, &ga_a)?.sub(&compute_g(&tf, &ga_b)?)?;
                let df = compute_f(&tf, &mu_a, &ga_a, &p)?
                    .sub(&compute_f(&tf, &mu_b, &ga_b, &p)?)?;
                let mut wz_out = dg;
                for (c, w) in wz_out.coeffs.iter_mut().zip(wz.iter()) {
                    *c *= w;
                }
                let mut wf_out = df;
                for (c, w) in wf_out.coeffs.iter_mut().zip(wf.iter()) {
                    *c *= w;
                }
                let num = sobolev_norm_zonal(&wz_out, tr.s)? + sobolev_norm(&wf_out, tr.s)?;
                let den = sobolev_norm_zonal(&mu_a.sub(&mu_b)?, tr.s)?
                    + sobolev_norm(&ga_a.sub(&ga_b)?, tr.s)?;
                Ok(if den > 0.0 { num / den } else { 0.0 })
            })
            .collect::<Result<_>>()?;
        let max = ratios.iter().fold(0.0f64, |a, &b| a.max(b));
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let scale = (1.0 + 3.0 * r) * LIPSCHITZ_DELTA.powf(1.0 - tr.alpha);
        means[ri] = mean;
        per_radius.push(RadiusStats {
            radius: r,
            raw_max: max,
            raw_mean: mean,
            normalized_max: max / scale,
            normalized_mean: mean / scale,
        });
    }
    let slope_ref = means[2] / radii[2];
    let slope_deviation = radii
        .iter()
        .zip(means.iter())
        .map(|(&r, &m)| ((m / r) / slope_ref - 1.0).abs())
        .fold(0.0f64, f64::max);
    Ok(LipschitzReport { radii: radii.to_vec(), per_radius, slope_deviation })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelEntry {
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceReport {
    pub piece: String,
    pub m: i64,
    pub stats: RatioStats,
}

/// Full JSON report consumed by the CLI `estimates` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub truncation: LatticeTruncation,
    pub kernel: Vec<KernelEntry>,
    pub pieces: Vec<PieceReport>,
    pub growth: Vec<GrowthEntry>,
    pub lipschitz: LipschitzReport,
}

pub fn full_report(tr: &LatticeTruncation, kernel_alphas: &[f64]) -> Result<EstimateReport> {
    tr.validate()?;
    let kernel = kernel_alphas
        .iter()
        .map(|&a| Ok(KernelEntry { alpha: a, value: kernel_max(a)? }))
        .collect::<Result<Vec<_>>>()?;
    let mut pieces = Vec::new();
    let mut f_pieces: Vec<FPiece> = FPiece::GATED.to_vec();
    f_pieces.push(FPiece::MeanCouplingMajorant);
    for m in [tr.m, 2 * tr.m] {
        let t = LatticeTruncation { m, ..tr.clone() };
        pieces.push(PieceReport { piece: "g-trilinear".into(), m, stats: trilinear_g_ratio(&t)? });
        for &piece in &f_pieces {
            pieces.push(PieceReport {
                piece: piece.name().into(),
                m,
                stats: trilinear_f_ratio(&t, piece)?,
            });
        }
    }
    let growth = growth_study(tr)?;
    let lip_tr = LatticeTruncation { m: tr.m.min(6), ..tr.clone() };
    let lipschitz = lipschitz_ratio(&lip_tr)?;
    Ok(EstimateReport { truncation: tr.clone(), kernel, pieces, growth, lipschitz })
}
