//! Command-line harness: initial data, simulation runs, fixed-point
//! experiments, formulation comparison, and the estimate lab.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use eddymean::config::AppConfig;
use eddymean::dynamics::{
    decompose_vorticity, reassemble_vorticity, Formulation, SolverParams, State,
};
use eddymean::error::Error;
use eddymean::estimates::{full_report, LatticeTruncation};
use eddymean::init::{init_data, InitKind, InitSpec};
use eddymean::integrator::{simulate, Scheme, Trajectory};
use eddymean::io::{
    read_snapshot, write_diagnostics, write_snapshot, write_text_atomic, DiagFormat, RunManifest,
};
use eddymean::picard::{continuation_run, picard_iterate, PicardConfig};
use eddymean::spectral::{GridSpec, SpectralField2D, ZonalSpectral1D};

#[derive(Parser)]
#[command(name = "eddymean", version, about = "Pseudospectral eddy-mean vorticity harness")]
struct Cli {
    /// JSON config file; individual flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit an initial-data snapshot.
    Init {
        #[arg(long)]
        out: PathBuf,
        /// single-mode | band-limited-random | jet-plus-noise
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        band_lo: Option<i64>,
        #[arg(long)]
        band_hi: Option<i64>,
    },
    /// Integrate one formulation forward in time.
    Simulate {
        /// model | split | full
        #[arg(long)]
        model: Option<String>,
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Diagnostics table (.csv or .jsonl by extension).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        diag_stride: Option<usize>,
        /// Start from a snapshot instead of the config's init section.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Write the final state here.
        #[arg(long)]
        save_state: Option<PathBuf>,
        /// exponential-euler | etdrk2
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Picard fixed-point run; with --T, global continuation.
    Picard {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        delta_c: Option<f64>,
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run full vs split from the same vorticity and report the
    /// sup relative L2 difference over time.
    Compare {
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate-lab probes; emits a JSON report.
    Estimates {
        #[arg(long = "M")]
        m: Option<i64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    /// Exit 2: bad usage or configuration.
    Config(String),
    /// Exit 1: numerical or runtime failure.
    Run(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParam(_) | Error::GridMismatch(_) | Error::DimensionMismatch { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Run(other.to_string()),
        }
    }
}

fn parse_kind(s: &str) -> Result<InitKind, CliError> {
    match s {
        "single-mode" => Ok(InitKind::SingleMode),
        "band-limited-random" => Ok(InitKind::BandLimitedRandom),
        "jet-plus-noise" => Ok(InitKind::JetPlusNoise),
        other => Err(CliError::Config(format!("unknown init kind {other:?}"))),
    }
}

fn parse_model(s: &str) -> Result<Formulation, CliError> {
    match s {
        "model" | "model-system" => Ok(Formulation::ModelSystem),
        "split" | "split-system" => Ok(Formulation::SplitSystem),
        "full" | "full-vorticity" => Ok(Formulation::FullVorticity),
        other => Err(CliError::Config(format!("unknown model {other:?}"))),
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, CliError> {
    match s {
        "exponential-euler" => Ok(Scheme::ExponentialEuler),
        "etdrk2" => Ok(Scheme::Etdrk2),
        other => Err(CliError::Config(format!("unknown scheme {other:?}"))),
    }
}

fn diag_format(path: &Path) -> DiagFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") => DiagFormat::JsonLines,
        _ => DiagFormat::Csv,
    }
}

/// Initial pair from a snapshot or from the config's init section.
fn load_pair(
    cfg: &AppConfig,
    input: Option<&Path>,
) -> Result<(GridSpec, SolverParams, ZonalSpectral1D, SpectralField2D), CliError> {
    match input {
        Some(path) => {
            let (header, state) = read_snapshot(path)?;
            let mut params = cfg.params.clone();
            params.l = header.grid.l;
            Ok((header.grid, params, state.mu, state.gamma))
        }
        None => {
            let (mu, gamma) = init_data(&cfg.grid, &cfg.init)?;
            Ok((cfg.grid.clone(), cfg.params.clone(), mu, gamma))
        }
    }
}

/// Map an `(mu, gamma)` pair onto the prognostic state of a formulation.
fn state_for(
    model: Formulation,
    grid: &GridSpec,
    mu: &ZonalSpectral1D,
    gamma: &SpectralField2D,
) -> Result<State, CliError> {
    let state = match model {
        Formulation::ModelSystem | Formulation::SplitSystem => {
            State::new(0.0, mu.clone(), gamma.clone())?
        }
        Formulation::FullVorticity => {
            let zeta = reassemble_vorticity(mu, gamma)?;
            State::new(0.0, ZonalSpectral1D::zeros(grid), zeta)?
        }
    };
    Ok(state)
}

fn write_manifest_for(
    outputs: &[&Path],
    cfg: &AppConfig,
    manifest_path: &Path,
) -> Result<(), CliError> {
    let mut manifest = RunManifest::new(
        std::env::args().collect(),
        serde_json::to_value(cfg).map_err(Error::from)?,
    );
    for out in outputs {
        manifest.add_output(out)?;
    }
    manifest.write(manifest_path)?;
    Ok(())
}

fn check_failure(traj: &Trajectory) -> Result<(), CliError> {
    if let Some(f) = &traj.failure {
        return Err(CliError::Run(format!(
            "step {} failed at t = {}: {}",
            f.step_index, f.t, f.detail
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = AppConfig::load_or_default(cli.config.as_deref())?;
    match cli.command {
        Command::Init { out, kind, seed, amplitude, band_lo, band_hi } => {
            let mut spec: InitSpec = cfg.init.clone();
            if let Some(k) = kind {
                spec.kind = parse_kind(&k)?;
            }
            if let Some(v) = seed {
                spec.seed = v;
            }
            if let Some(v) = amplitude {
                spec.amplitude = v;
            }
            if let Some(v) = band_lo {
                spec.band_lo = v;
            }
            if let Some(v) = band_hi {
                spec.band_hi = v;
            }
            cfg.init = spec.clone();
            let (mu, gamma) = init_data(&cfg.grid, &spec)?;
            let state = State::new(0.0, mu, gamma)?;
            write_snapshot(&out, &state, &cfg.params)?;
            write_manifest_for(&[&out], &cfg, &manifest_path(&out))?;
            println!("wrote initial snapshot {}", out.display());
            Ok(())
        }
        Command::Simulate { model, t, dt, out, diag_stride, input, save_state, scheme } => {
            if let Some(m) = model {
                cfg.integrator.model = parse_model(&m)?;
            }
            if let Some(v) = t {
                cfg.integrator.t_final = v;
            }
            if let Some(v) = dt {
                cfg.integrator.dt = v;
            }
            if let Some(v) = diag_stride {
                cfg.integrator.diag_stride = v;
            }
            if let Some(s) = scheme {
                cfg.integrator.scheme = parse_scheme(&s)?;
            }
            let (grid, params, mu, gamma) = load_pair(&cfg, input.as_deref())?;
            cfg.grid = grid.clone();
            cfg.params = params.clone();
            let state0 = state_for(cfg.integrator.model, &grid, &mu, &gamma)?;
            let traj = simulate(&state0, &cfg.integrator, &params, None)?;
            check_failure(&traj)?;
            let last = traj.records.last().expect("at least the initial record");
            println!(
                "t = {:.6}: energy {:.6e}, enstrophy {:.6e}, zero-mode residual {:.3e}",
                last.t,
                last.energy,
                last.enstrophy,
                last.zero_mode_residual_max()
            );
            let mut outputs: Vec<PathBuf> = Vec::new();
            if let Some(path) = &out {
                write_diagnostics(&traj.records, path, diag_format(path))?;
                outputs.push(path.clone());
            }
            if let Some(path) = &save_state {
                // Snapshots uniformly hold a (zonal, eddy) pair; decompose
                // the vorticity of full-model runs before writing.
                let final_state = match cfg.integrator.model {
                    Formulation::FullVorticity => {
                        let (ubar, eddy) = decompose_vorticity(&traj.final_state().gamma)?;
                        State::new(traj.final_state().t, ubar, eddy)?
                    }
                    _ => traj.final_state().clone(),
                };
                write_snapshot(path, &final_state, &params)?;
                outputs.push(path.clone());
            }
            if let Some(first) = outputs.first() {
                let refs: Vec<&Path> = outputs.iter().map(|p| p.as_path()).collect();
                write_manifest_for(&refs, &cfg, &manifest_path(first))?;
            }
            Ok(())
        }
        Command::Picard { alpha, s, m, tol, delta_c, t, input, out } => {
            let mut pcfg: PicardConfig = cfg.picard.clone();
            if let Some(v) = alpha {
                pcfg.alpha = v;
            }
            if let Some(v) = s {
                pcfg.s = v;
            }
            if let Some(v) = m {
                pcfg.m_nodes = v;
            }
            if let Some(v) = tol {
                pcfg.tol = v;
            }
            if let Some(v) = delta_c {
                pcfg.delta_calibration = v;
            }
            cfg.picard = pcfg.clone();
            let (_, params, mu, gamma) = load_pair(&cfg, input.as_deref())?;
            let report_json;
            let converged;
            match t {
                Some(t_final) => {
                    let run = continuation_run(&mu, &gamma, &params, &pcfg, t_final)?;
                    converged = run.completed;
                    println!(
                        "continuation: {} intervals, covered [0, {:.6}] of T = {}",
                        run.intervals.len(),
                        run.final_time(),
                        t_final
                    );
                    for (i, info) in run.info.iter().enumerate() {
                        println!(
                            "  interval {i}: t0 = {:.6}, delta_policy = {:.6}, delta_used = {:.6}",
                            info.t_start, info.delta_policy, info.delta_used
                        );
                    }
                    report_json = json!({
                        "completed": run.completed,
                        "intervals": run.info,
                        "reports": run.reports,
                    });
                }
                None => {
                    let report = picard_iterate(&mu, &gamma, &params, &pcfg)?;
                    converged = report.converged;
                    println!(
                        "picard: delta = {:.6} ({} halvings), {} iterations, converged = {}",
                        report.delta_used, report.halvings, report.iterations, report.converged
                    );
                    if let Some(r) = report.ratios.iter().cloned().fold(None::<f64>, |a, b| {
                        Some(a.map_or(b, |x| x.max(b)))
                    }) {
                        println!("  max contraction ratio {r:.4}");
                    }
                    report_json = serde_json::to_value(&report).map_err(Error::from)?;
                }
            }
            if let Some(path) = &out {
                let text =
                    serde_json::to_string_pretty(&report_json).map_err(Error::from)?;
                write_text_atomic(path, &text)?;
                write_manifest_for(&[path], &cfg, &manifest_path(path))?;
            }
            if converged {
                Ok(())
            } else {
                Err(CliError::Run("fixed-point iteration did not converge".into()))
            }
        }
        Command::Compare { t, dt, input, out } => {
            if let Some(v) = t {
                cfg.integrator.t_final = v;
            }
            if let Some(v) = dt {
                cfg.integrator.dt = v;
            }
            let (grid, params, mu, gamma) = load_pair(&cfg, input.as_deref())?;
            let zeta0 = reassemble_vorticity(&mu, &gamma)?;

            let mut icfg = cfg.integrator.clone();
            icfg.model = Formulation::FullVorticity;
            let full0 = State::new(0.0, ZonalSpectral1D::zeros(&grid), zeta0.clone())?;
            let full = simulate(&full0, &icfg, &params, None)?;
            check_failure(&full)?;

            icfg.model = Formulation::SplitSystem;
            let (ubar0, eddy0) = decompose_vorticity(&zeta0)?;
            let split0 = State::new(0.0, ubar0, eddy0)?;
            let split = simulate(&split0, &icfg, &params, None)?;
            check_failure(&split)?;

            let mut sup = 0.0f64;
            let mut rows = Vec::new();
            for (sf, ss) in full.states.iter().zip(split.states.iter()) {
                let reassembled = reassemble_vorticity(&ss.mu, &ss.gamma)?;
                let diff = reassembled.sub(&sf.gamma)?.l2_norm();
                let denom = sf.gamma.l2_norm().max(1e-300);
                let rel = diff / denom;
                sup = sup.max(rel);
                rows.push(json!({"t": sf.t, "rel_l2": rel}));
            }
            println!("sup relative L2 difference over time: {sup:.6e}");
            if let Some(path) = &out {
                let text = serde_json::to_string_pretty(&json!({
                    "sup_rel_l2": sup,
                    "samples": rows,
                }))
                .map_err(Error::from)?;
                write_text_atomic(path, &text)?;
                write_manifest_for(&[path], &cfg, &manifest_path(path))?;
            }
            Ok(())
        }
        Command::Estimates { m, alpha, s, trials, seed, out } => {
            let mut tr = LatticeTruncation::default();
            if let Some(v) = m {
                tr.m = v;
            }
            if let Some(v) = alpha {
                tr.alpha = v;
            }
            if let Some(v) = s {
                tr.s = v;
            }
            if let Some(v) = trials {
                tr.trials = v;
            }
            if let Some(v) = seed {
                tr.seed = v;
            }
            let report = full_report(&tr, &[0.5, 0.76, 0.8, 0.99])?;
            for entry in &report.growth {
                println!(
                    "{}: max {:.4} at M={} -> {:.4} at M={} (growth {:.4})",
                    entry.piece,
                    entry.max_small,
                    entry.m_small,
                    entry.max_large,
                    entry.m_large,
                    entry.growth
                );
            }
            println!("lipschitz slope deviation: {:.4}", report.lipschitz.slope_deviation);
            if let Some(path) = &out {
                let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
                write_text_atomic(path, &text)?;
                write_manifest_for(&[path], &cfg, &manifest_path(path))?;
            }
            Ok(())
        }
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".manifest.json");
    PathBuf::from(os)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(threads) = std::env::var("EDDYMEAN_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
