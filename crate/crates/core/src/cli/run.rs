//! Subcommand dispatch and output persistence.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{parse_nonlinearity, Cli, CliError, Command, RunConfig, THREADS_ENV};
use crate::classifier::{decide_with_seed, DEFAULT_SEED};
use crate::energy::{energy_trace, refinement_stability, verify_energy_inequality, write_energy_csv};
use crate::experiments::bona_smith::synthetic_data;
use crate::experiments::report::SCHEMA_VERSION;
use crate::experiments::{
    bona_smith_study, describe_nonlinearity, eps_convergence_study, inequality_probe, smoothing_probe,
    BonaSmithParams, Comparison, Criterion, EpsStudyParams, ExperimentReport, InequalityParams, Probe, Series,
    SmoothingParams, Verdict,
};
use crate::gauge::{check_gauge_identities, energy_cancellation, gauge_forward_at};
use crate::nonlin_poly::ComplexPolynomial4;
use crate::solver::{evolve, save_trajectory, SolverConfig};
use crate::spectral::{make_rough_data, GridFunction, Side};

/// Index of everything a run wrote.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub subcommand: String,
    /// Effective configuration after flags and positional arguments are applied.
    pub config: RunConfig,
    pub files: Vec<String>,
    pub exit_code: i32,
    /// Excluded from reproducibility comparisons.
    pub timestamp: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

fn timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(io(path))
}

fn merge(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let name = cli.command.name();
    if let Some(sub) = &cfg.subcommand {
        if sub != name {
            return Err(CliError::Config(format!("config is for '{sub}', invoked '{name}'")));
        }
    }
    cfg.subcommand = Some(name.to_string());
    if let Some(pos) = cli.command.positional() {
        match cli.command {
            Command::IneqProbe { .. } => cfg.probe = Some(pos.to_string()),
            _ => cfg.nonlinearity = Some(pos.to_string()),
        }
    }
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.to_string_lossy().into_owned());
    }
    if let Some(n) = cli.grid {
        cfg.n = Some(n);
    }
    if let Some(e) = &cli.eps {
        cfg.eps = Some(e.clone());
    }
    Ok(cfg)
}

fn nonlinearity(cfg: &RunConfig) -> Result<ComplexPolynomial4, CliError> {
    let src = cfg
        .nonlinearity
        .as_deref()
        .ok_or_else(|| CliError::Usage("a nonlinearity is required (positional or config key)".into()))?;
    Ok(parse_nonlinearity(src)?)
}

fn single_eps(cfg: &RunConfig, default: f64) -> Result<f64, CliError> {
    match cfg.eps.as_deref() {
        None => Ok(default),
        Some([e]) => Ok(*e),
        Some(list) => Err(CliError::Usage(format!("expected one viscosity, got {}", list.len()))),
    }
}

/// Build initial data from the preset named in the config.
pub fn initial_data(cfg: &RunConfig, n: usize, default: &str) -> Result<GridFunction, CliError> {
    let c = |re: f64| Complex64::new(re, 0.0);
    let preset = cfg.data.as_deref().unwrap_or(default);
    Ok(match preset {
        "plane" => GridFunction::from_modes(n, &[(1, c(1.0))])?,
        "small-plane" => GridFunction::from_modes(n, &[(1, c(0.1))])?,
        "bump" => GridFunction::from_modes(n, &[(0, c(1.0)), (1, c(0.3))])?,
        "rough" => {
            let side = match cfg.rough_side.as_deref().unwrap_or("both") {
                "plus" => Side::Plus,
                "minus" => Side::Minus,
                "both" => Side::Both,
                other => return Err(CliError::Config(format!("unknown rough_side '{other}'"))),
            };
            let base = GridFunction::constant(n, c(1.0))?;
            make_rough_data(
                cfg.rough_s.unwrap_or(2.6),
                cfg.rough_delta.unwrap_or(0.25),
                side,
                &base,
                cfg.rough_amplitude.unwrap_or(1.0),
            )
        }
        "synthetic" => synthetic_data(
            n,
            cfg.s.unwrap_or(2.6),
            cfg.tail_excess.unwrap_or(0.05),
            cfg.rough_amplitude.unwrap_or(0.2),
            cfg.seed.unwrap_or(0),
        )?,
        "modes" => {
            let list = cfg.modes.as_ref().ok_or_else(|| CliError::Config("data = \"modes\" needs a modes list".into()))?;
            let mut modes = Vec::new();
            for m in list {
                if m[0].fract() != 0.0 || m[0].abs() >= (n / 2) as f64 {
                    return Err(CliError::Config(format!("mode {} is not an integer below n/2", m[0])));
                }
                modes.push((m[0] as i64, Complex64::new(m[1], m[2])));
            }
            GridFunction::from_modes(n, &modes)?
        }
        other => return Err(CliError::Config(format!("unknown data preset '{other}'"))),
    })
}

fn solver_config(cfg: &RunConfig, n: usize, eps: f64, dt: f64, t_end: f64, stride: usize) -> SolverConfig {
    SolverConfig {
        n: cfg.n.unwrap_or(n),
        eps,
        dt: cfg.dt.unwrap_or(dt),
        t_end: cfg.t_end.unwrap_or(t_end),
        snapshot_stride: cfg.snapshot_stride.unwrap_or(stride),
        seed: cfg.seed.unwrap_or(0),
    }
}

fn finish_report(dir: &Path, name: &str, mut r: ExperimentReport, files: &mut Vec<PathBuf>) -> Result<Verdict, CliError> {
    r.timestamp = Some(timestamp());
    let path = dir.join(format!("{name}.json"));
    write_json(&path, &r)?;
    files.push(path);
    Ok(r.verdict)
}

fn combine(verdicts: &[Verdict]) -> Verdict {
    if verdicts.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if verdicts.contains(&Verdict::Inconclusive) || verdicts.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

fn gauge_check(f: &ComplexPolynomial4, cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let sc = solver_config(cfg, 128, single_eps(cfg, 0.0)?, 1e-4, 0.01, 10);
    let phi = initial_data(cfg, sc.n, "bump")?;
    let traj = evolve(f, &phi, &sc)?;
    let mut report = ExperimentReport::new(
        "gauge-check",
        serde_json::json!({ "nonlinearity": describe_nonlinearity(f), "solver": sc }),
        sc.seed,
    );
    let (mut ids, mut canc, mut recon) = (Vec::new(), Vec::new(), Vec::new());
    for (u, &t) in traj.snapshots.iter().zip(&traj.times) {
        let st = gauge_forward_at(f, u, t)?;
        let rep = check_gauge_identities(&st, f, u)?;
        let worst = rep.dx_lambda_residual.max(rep.dxx_lambda_residual).max(rep.chain_rule_residual);
        ids.push(worst / (1.0 + st.fbeta.l2_norm()));
        recon.push(rep.reconstruction_error / (1.0 + u.dxx().l2_norm()));
        let (v, scale) = energy_cancellation(&st, cfg.r.unwrap_or(3.0));
        canc.push(v.abs() / scale.max(f64::MIN_POSITIVE));
    }
    report.series.push(Series::new("identity_residual", "t", "relative residual", traj.times.clone(), ids.clone()));
    report.series.push(Series::new("reconstruction_error", "t", "relative error", traj.times.clone(), recon.clone()));
    report.series.push(Series::new("energy_cancellation", "t", "relative pairing", traj.times.clone(), canc.clone()));
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    report.add_criterion(Criterion::new("identity_residual", max(&ids), Comparison::Le { threshold: 1e-10 }));
    report.add_criterion(Criterion::new("reconstruction_error", max(&recon), Comparison::Le { threshold: 1e-10 }));
    report.add_criterion(Criterion::new("energy_cancellation", max(&canc), Comparison::Le { threshold: 1e-10 }));
    if traj.overflowed() {
        report.notes.push("trajectory overflowed; inconclusive".into());
        report.verdict = Verdict::Inconclusive;
    } else {
        report.finalize();
    }
    Ok(report)
}

fn energy(f: &ComplexPolynomial4, cfg: &RunConfig, dir: &Path, files: &mut Vec<PathBuf>) -> Result<ExperimentReport, CliError> {
    let sc = solver_config(cfg, 64, single_eps(cfg, 1e-2)?, 1e-3, 0.1, 10);
    let (s, r) = (cfg.s.unwrap_or(2.6), cfg.r.unwrap_or(3.0));
    let mut report = ExperimentReport::new(
        "energy",
        serde_json::json!({ "nonlinearity": describe_nonlinearity(f), "solver": sc, "s": s, "r": r }),
        sc.seed,
    );
    let mut reports = Vec::new();
    let mut overflow = false;
    for n in [sc.n, 2 * sc.n] {
        let c = SolverConfig { n, ..sc.clone() };
        let phi = initial_data(cfg, n, "small-plane")?;
        let traj = evolve(f, &phi, &c)?;
        overflow |= traj.overflowed();
        let trace = energy_trace(f, &traj, s, r)?;
        let csv = dir.join(format!("energy_n{n}.csv"));
        write_energy_csv(&csv, &trace)?;
        files.push(csv);
        report.series.push(Series::new(&format!("e_s_n{n}"), "t", "E_s", trace.times.clone(), trace.e_s.clone()));
        report.series.push(Series::new(&format!("e_r_n{n}"), "t", "E_r", trace.times.clone(), trace.e_r.clone()));
        reports.push(verify_energy_inequality(&trace)?);
    }
    let refine = refinement_stability(&reports[0], &reports[1]);
    report.notes.push(format!("C1 estimate: coarse {:e}, fine {:e}", refine.c1_coarse, refine.c1_fine));
    if overflow {
        report.notes.push("trajectory overflowed; inconclusive".into());
        return Ok(report);
    }
    report.add_criterion(Criterion::new("c1_finite", if reports[1].finite { 1.0 } else { 0.0 }, Comparison::Ge { threshold: 1.0 }));
    report.add_criterion(Criterion::new(
        "c1_refinement",
        refine.c1_fine,
        Comparison::Le { threshold: 1.5 * refine.c1_coarse.max(0.0) + 1e-9 },
    ));
    report.finalize();
    Ok(report)
}

fn probe_params(cfg: &RunConfig, probe: Probe) -> InequalityParams {
    let d = InequalityParams::defaults(probe);
    InequalityParams {
        s: cfg.s.unwrap_or(d.s),
        r: cfg.r.unwrap_or(d.r),
        s0: cfg.s0.unwrap_or(d.s0),
        samples: cfg.samples.unwrap_or(d.samples),
        n_list: cfg.n_list.clone().unwrap_or(d.n_list.clone()),
        seed: cfg.seed.unwrap_or(d.seed),
        ..d
    }
}

/// Run a parsed command line, writing outputs and the manifest.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = merge(cli)?;
    let dir = PathBuf::from(cfg.out.clone().unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&dir).map_err(io(&dir))?;
    let mut files: Vec<PathBuf> = Vec::new();
    let seed = cfg.seed.unwrap_or(0);

    let (exit_code, summary) = match &cli.command {
        Command::Classify { .. } => {
            let f = nonlinearity(&cfg)?;
            let v = decide_with_seed(&f, cfg.seed.unwrap_or(DEFAULT_SEED))?;
            let path = dir.join("verdict.json");
            write_json(&path, &v)?;
            files.push(path);
            let w = v.witness.as_ref().map(|w| format!(", witness {}", w.description)).unwrap_or_default();
            (0, format!("{:?}{w}", v.status))
        }
        Command::Solve { .. } => {
            let f = nonlinearity(&cfg)?;
            let sc = solver_config(&cfg, 64, single_eps(&cfg, 0.0)?, 1e-3, 0.1, 10);
            let phi = initial_data(&cfg, sc.n, "small-plane")?;
            let traj = evolve(&f, &phi, &sc)?;
            let tdir = dir.join("trajectory");
            save_trajectory(&tdir, &traj)?;
            files.push(tdir);
            let code = if traj.overflowed() { Verdict::Inconclusive.exit_code() } else { 0 };
            (code, format!("{} snapshots to t = {}", traj.len(), traj.times.last().copied().unwrap_or(0.0)))
        }
        Command::GaugeCheck { .. } => {
            let f = nonlinearity(&cfg)?;
            let v = finish_report(&dir, "gauge-check", gauge_check(&f, &cfg)?, &mut files)?;
            (v.exit_code(), format!("{v:?}"))
        }
        Command::Energy { .. } => {
            let f = nonlinearity(&cfg)?;
            let r = energy(&f, &cfg, &dir, &mut files)?;
            let v = finish_report(&dir, "energy", r, &mut files)?;
            (v.exit_code(), format!("{v:?}"))
        }
        Command::EpsConverge { .. } => {
            let f = nonlinearity(&cfg)?;
            let d = EpsStudyParams::default();
            let p = EpsStudyParams {
                n: cfg.n.unwrap_or(d.n),
                dt: cfg.dt.unwrap_or(d.dt),
                t_end: cfg.t_end.unwrap_or(d.t_end),
                s: cfg.s.unwrap_or(d.s),
                eps_list: cfg.eps.clone().unwrap_or(d.eps_list),
                snapshot_stride: cfg.snapshot_stride.unwrap_or(d.snapshot_stride),
                seed,
            };
            let phi = initial_data(&cfg, p.n, "synthetic")?;
            let v = finish_report(&dir, "eps-converge", eps_convergence_study(&f, &phi, &p)?, &mut files)?;
            (v.exit_code(), format!("{v:?}"))
        }
        Command::BonaSmith { .. } => {
            let f = nonlinearity(&cfg)?;
            let d = BonaSmithParams::default();
            let p = BonaSmithParams {
                s: cfg.s.unwrap_or(d.s),
                r: cfg.r.unwrap_or(d.r),
                s0: cfg.s0.unwrap_or(d.s0),
                tail_excess: cfg.tail_excess.unwrap_or(d.tail_excess),
                n: cfg.n.unwrap_or(d.n),
                eps: single_eps(&cfg, d.eps)?,
                dt: cfg.dt.unwrap_or(d.dt),
                t_end: cfg.t_end.unwrap_or(d.t_end),
                seed,
                ..d
            };
            let v = finish_report(&dir, "bona-smith", bona_smith_study(&f, &p)?, &mut files)?;
            (v.exit_code(), format!("{v:?}"))
        }
        Command::SmoothProbe { .. } => {
            let f = nonlinearity(&cfg)?;
            let d = SmoothingParams::default();
            let p = SmoothingParams {
                n: cfg.n.unwrap_or(d.n),
                eps: single_eps(&cfg, d.eps)?,
                dt: cfg.dt.unwrap_or(d.dt),
                t_end: cfg.t_end.unwrap_or(d.t_end),
                snapshot_stride: cfg.snapshot_stride.unwrap_or(d.snapshot_stride),
                seed,
                ..d
            };
            let phi = initial_data(&cfg, p.n, "rough")?;
            let v = finish_report(&dir, "smooth-probe", smoothing_probe(&f, &phi, &p)?, &mut files)?;
            (v.exit_code(), format!("{v:?}"))
        }
        Command::IneqProbe { .. } => {
            let probes = match cfg.probe.as_deref() {
                None | Some("all") => Probe::ALL.to_vec(),
                Some(name) => vec![Probe::parse(name).ok_or_else(|| CliError::Usage(format!("unknown probe '{name}'")))?],
            };
            let mut verdicts = Vec::new();
            for probe in probes {
                let r = inequality_probe(&probe_params(&cfg, probe))?;
                verdicts.push(finish_report(&dir, probe.name(), r, &mut files)?);
            }
            let v = combine(&verdicts);
            (v.exit_code(), format!("{v:?}"))
        }
    };

    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        subcommand: cli.command.name().to_string(),
        config: cfg,
        files: files
            .iter()
            .map(|p| p.strip_prefix(&dir).unwrap_or(p).to_string_lossy().into_owned())
            .collect(),
        exit_code,
        timestamp: Some(timestamp()),
    };
    let mpath = dir.join("manifest.json");
    write_json(&mpath, &manifest)?;
    files.push(mpath);
    Ok(Outcome { exit_code, summary, files })
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let k: usize = v.parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer")))?;
        if k == 0 {
            return Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer")));
        }
        // A second initialization in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    Ok(())
}

/// Entry point for the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|_| execute(&cli));
    match result {
        Ok(o) => {
            if !cli.quiet {
                println!("{}: {}", cli.command.name(), o.summary);
            }
            o.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
