//! Command-line front end: every command maps a [`RunConfig`] to a
//! [`CurveReport`].

pub mod config;
pub mod report;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::analytic::{equivalent_intensity, optimize_guard_zone, scaling_limit_sir, IntensityModel, SinrCdfCurve, SystemParams};
use crate::error::{Error, Result};
use crate::mmse::{run_trials, sup_deviation, EmpiricalCdf, TrialSetup};
use crate::sim::{sample_realization, saturation_gamma, validate_window, write_realizations_csv, Gain, SimWindow, DEFAULT_BIAS_TOL};

pub use config::{GridDomain, GridSpec, GuardSpec, Outputs, RunConfig, ScalingSpec, Spacing};
pub use report::CurveReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

/// Step bound of the tabulated analytic curve used for KS statistics.
const CURVE_STEP: f64 = 2e-3;

#[derive(Debug, Parser)]
#[command(name = "coxnet", version, about = "SINR distributions of MMSE receivers in Poisson and Cox networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials, overriding the configuration.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Largest accepted sup deviation for `compare`.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Worker threads (all cores when absent).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file, overriding the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Analytic CDF on the configured grid.
    Analytic,
    /// Monte Carlo CDF on the configured grid.
    Simulate,
    /// Analytic and simulated CDFs with their deviation.
    Compare,
    /// CDFs for growing (L, ρ) at fixed ρ/L, with the limiting SIR.
    ScalingDemo,
    /// Guard radius maximizing the spectral efficiency density.
    OptimizeGuard,
    /// Direct simulation under a general path loss against its equivalent model.
    EquivPathloss,
    /// Interferer positions as CSV.
    DumpRealization,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analytic => "analytic",
            Command::Simulate => "simulate",
            Command::Compare => "compare",
            Command::ScalingDemo => "scaling-demo",
            Command::OptimizeGuard => "optimize-guard",
            Command::EquivPathloss => "equiv-pathloss",
            Command::DumpRealization => "dump-realization",
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
        Error::Domain(_) | Error::NotConverged { .. } | Error::Numeric(_) => EXIT_NUMERIC,
    }
}

/// Configuration with command-line overrides applied.
pub fn apply_overrides(mut cfg: RunConfig, args: &CommonArgs) -> RunConfig {
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(t) = args.tolerance {
        cfg.tolerance = Some(t);
    }
    if let Some(o) = &args.out {
        cfg.outputs.curve = Some(o.clone());
    }
    cfg
}

fn header(command: Command, cfg: &RunConfig) -> CurveReport {
    CurveReport::default()
        .with_meta("command", command.name())
        .with_meta("config_sha256", cfg.hash())
        .with_meta("seed", cfg.seed)
}

/// Simulated SINR samples for `model` with the window chosen automatically.
pub fn simulate_model(model: &IntensityModel, params: &SystemParams, gain: Gain, trials: usize, seed: u64, bias_tol: f64) -> Result<(EmpiricalCdf, SimWindow)> {
    let gamma_max = saturation_gamma(model, params, &gain)?;
    let window = validate_window(model, params, &gain, gamma_max, bias_tol)?;
    let emp = run_trials(model, params, &TrialSetup { window, gain, trials, master_seed: seed })?;
    Ok((emp, window))
}

/// The `r^{−α}` model whose analytic CDF applies to `cfg`.
pub fn analytic_model(cfg: &RunConfig) -> Result<IntensityModel> {
    match &cfg.pathloss {
        None => Ok(cfg.model.clone()),
        Some(pl) => equivalent_intensity(pl, homogeneous_density(&cfg.model)?, cfg.system.alpha),
    }
}

fn homogeneous_density(model: &IntensityModel) -> Result<f64> {
    match model {
        IntensityModel::PiecewisePowerLaw { segments } if segments.len() == 1 && segments[0].exponent == 0.0 && segments[0].inner == 0.0 && segments[0].outer.is_none() => Ok(segments[0].density),
        _ => Err(Error::Config("a custom path loss requires a homogeneous model".into())),
    }
}

fn gain_for(cfg: &RunConfig) -> Gain {
    match &cfg.pathloss {
        None => Gain::PowerLaw(cfg.system.alpha),
        Some(pl) => Gain::Custom(pl.clone()),
    }
}

fn ks_against(emp: &EmpiricalCdf, params: &SystemParams, model: &IntensityModel) -> Result<f64> {
    crate::mmse::analytic_curve_for(emp, params, model, CURVE_STEP)
        .map(|curve| sup_deviation(emp, |s| if s.is_infinite() { 1.0 } else { curve.value_at(params.to_gamma(s)) }))
}

fn add_window_meta(r: &mut CurveReport, prefix: &str, emp: &EmpiricalCdf, w: &SimWindow) {
    r.push_meta(&format!("{prefix}trials"), emp.trial_count + emp.discarded);
    r.push_meta(&format!("{prefix}discarded"), emp.discarded);
    r.push_meta(&format!("{prefix}window_radius"), w.outer_radius);
    r.push_meta(&format!("{prefix}far_field_power"), w.far_field_power);
}

pub fn cmd_analytic(cfg: &RunConfig) -> Result<CurveReport> {
    let grid = cfg.gamma_values()?;
    let curve = SinrCdfCurve::evaluate(&cfg.system, &analytic_model(cfg)?, &grid)?;
    let mut r = header(Command::Analytic, cfg);
    r.columns = ["gamma", "sinr", "analytic_cdf"].map(String::from).to_vec();
    for (g, f) in grid.iter().zip(&curve.cdf_values) {
        r.rows.push(vec![Some(*g), Some(cfg.system.to_sinr(*g)), Some(*f)]);
    }
    Ok(r)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<(CurveReport, EmpiricalCdf)> {
    let grid = cfg.gamma_values()?;
    let (emp, w) = simulate_model(&cfg.model, &cfg.system, gain_for(cfg), cfg.trials, cfg.seed, cfg.bias_tolerance.unwrap_or(DEFAULT_BIAS_TOL))?;
    let mut r = header(Command::Simulate, cfg);
    add_window_meta(&mut r, "", &emp, &w);
    r.columns = ["gamma", "sinr", "empirical_cdf"].map(String::from).to_vec();
    for g in &grid {
        let s = cfg.system.to_sinr(*g);
        r.rows.push(vec![Some(*g), Some(s), Some(emp.value_at(s))]);
    }
    Ok((r, emp))
}

/// Comparison report and whether the sup deviation is within tolerance.
pub fn cmd_compare(cfg: &RunConfig) -> Result<(CurveReport, EmpiricalCdf, bool)> {
    let grid = cfg.gamma_values()?;
    let model = analytic_model(cfg)?;
    let (emp, w) = simulate_model(&cfg.model, &cfg.system, gain_for(cfg), cfg.trials, cfg.seed, cfg.bias_tolerance.unwrap_or(DEFAULT_BIAS_TOL))?;
    let curve = SinrCdfCurve::evaluate(&cfg.system, &model, &grid)?;
    let ks = ks_against(&emp, &cfg.system, &model)?;
    let mut r = header(Command::Compare, cfg);
    add_window_meta(&mut r, "", &emp, &w);
    r.push_meta("sup_deviation", ks);
    let ok = cfg.tolerance.is_none_or(|t| ks <= t);
    if let Some(t) = cfg.tolerance {
        r.push_meta("tolerance", t);
    }
    r.columns = ["gamma", "sinr", "analytic_cdf", "empirical_cdf", "deviation"].map(String::from).to_vec();
    for (g, a) in grid.iter().zip(&curve.cdf_values) {
        let s = cfg.system.to_sinr(*g);
        let e = emp.value_at(s);
        r.rows.push(vec![Some(*g), Some(s), Some(*a), Some(e), Some((e - a).abs())]);
    }
    Ok((r, emp, ok))
}

/// Per-size summary of a scaling run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub antennas: u32,
    pub density: f64,
    pub median_sir: f64,
    /// Interquartile range of the SIR in dB.
    pub iqr_db: f64,
    pub samples: EmpiricalCdf,
}

pub fn cmd_scaling_demo(cfg: &RunConfig) -> Result<(CurveReport, Vec<ScalingPoint>, f64)> {
    let spec = cfg.scaling.as_ref().ok_or_else(|| Error::Config("scaling-demo needs a \"scaling\" section".into()))?;
    let ell = spec.densities[0] / spec.antennas[0] as f64;
    for (l, rho) in spec.antennas.iter().zip(&spec.densities) {
        if ((rho / *l as f64) / ell - 1.0).abs() > 1e-9 {
            return Err(Error::Config("scaling pairs must share the ratio ρ/L".into()));
        }
    }
    let limit = scaling_limit_sir(&cfg.model, ell, cfg.system.alpha, cfg.system.link_distance)?;
    let grid = cfg.gamma_values()?;
    let mut r = header(Command::ScalingDemo, cfg);
    r.push_meta("ell_ratio", ell);
    r.push_meta("limit_sir", limit);
    r.columns = vec!["gamma".into(), "sir".into()];
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut points = Vec::new();
    for (k, (&l, &rho)) in spec.antennas.iter().zip(&spec.densities).enumerate() {
        let params = SystemParams { antennas: l, ..cfg.system };
        let model = cfg.model.scaled(rho)?;
        let curve = SinrCdfCurve::evaluate(&params, &model, &grid)?;
        let seed = cfg.seed.wrapping_add(k as u64);
        let (emp, w) = simulate_model(&model, &params, Gain::PowerLaw(params.alpha), cfg.trials, seed, cfg.bias_tolerance.unwrap_or(DEFAULT_BIAS_TOL))?;
        add_window_meta(&mut r, &format!("L{l}_"), &emp, &w);
        let (q1, med, q3) = (emp.quantile(0.25), emp.quantile(0.5), emp.quantile(0.75));
        let iqr_db = 10.0 * (q3 / q1).log10();
        r.push_meta(&format!("L{l}_median_sir"), med);
        r.push_meta(&format!("L{l}_iqr_db"), iqr_db);
        r.columns.push(format!("analytic_L{l}"));
        r.columns.push(format!("empirical_L{l}"));
        columns.push(curve.cdf_values.clone());
        columns.push(grid.iter().map(|g| emp.value_at(cfg.system.to_sinr(*g))).collect());
        points.push(ScalingPoint { antennas: l, density: rho, median_sir: med, iqr_db, samples: emp });
    }
    for (i, g) in grid.iter().enumerate() {
        let mut row = vec![Some(*g), Some(cfg.system.to_sinr(*g))];
        row.extend(columns.iter().map(|c| Some(c[i])));
        r.rows.push(row);
    }
    Ok((r, points, limit))
}

pub fn cmd_optimize_guard(cfg: &RunConfig) -> Result<CurveReport> {
    let spec = cfg.guard.as_ref().ok_or_else(|| Error::Config("optimize-guard needs a \"guard\" section".into()))?;
    let mut r = header(Command::OptimizeGuard, cfg);
    r.columns = vec!["guard_radius".into()];
    let mut grids = Vec::new();
    for t in &spec.outage_targets {
        let opt = optimize_guard_zone(&cfg.system, spec.parent_density, *t, spec.max_radius, spec.grid_points)?;
        r.push_meta(&format!("outage_{t}_radius"), opt.radius);
        r.push_meta(&format!("outage_{t}_eta"), opt.eta);
        r.push_meta(&format!("outage_{t}_flat"), opt.flat_objective);
        r.columns.push(format!("eta_outage_{t}"));
        grids.push(opt.grid);
    }
    if let Some(first) = grids.first() {
        for (i, (radius, _)) in first.iter().enumerate() {
            let mut row = vec![Some(*radius)];
            row.extend(grids.iter().map(|g| Some(g[i].1)));
            r.rows.push(row);
        }
    }
    Ok(r)
}

pub fn cmd_equiv_pathloss(cfg: &RunConfig) -> Result<CurveReport> {
    let pl = cfg.pathloss.as_ref().ok_or_else(|| Error::Config("equiv-pathloss needs a \"pathloss\" section".into()))?;
    let rho = homogeneous_density(&cfg.model)?;
    let alpha = cfg.system.alpha;
    let equivalent = equivalent_intensity(pl, rho, alpha)?;
    let tol = cfg.bias_tolerance.unwrap_or(DEFAULT_BIAS_TOL);
    let (direct, wd) = simulate_model(&cfg.model, &cfg.system, Gain::Custom(pl.clone()), cfg.trials, cfg.seed, tol)?;
    let (equiv, we) = simulate_model(&equivalent, &cfg.system, Gain::PowerLaw(alpha), cfg.trials, cfg.seed.wrapping_add(1), tol)?;
    let grid = cfg.gamma_values()?;
    let curve = SinrCdfCurve::evaluate(&cfg.system, &equivalent, &grid)?;
    let mut r = header(Command::EquivPathloss, cfg);
    add_window_meta(&mut r, "direct_", &direct, &wd);
    add_window_meta(&mut r, "equivalent_", &equiv, &we);
    r.push_meta("sup_deviation_direct", ks_against(&direct, &cfg.system, &equivalent)?);
    r.push_meta("sup_deviation_equivalent", ks_against(&equiv, &cfg.system, &equivalent)?);
    r.columns = ["gamma", "sinr", "analytic_cdf", "direct_cdf", "equivalent_cdf"].map(String::from).to_vec();
    for (g, a) in grid.iter().zip(&curve.cdf_values) {
        let s = cfg.system.to_sinr(*g);
        r.rows.push(vec![Some(*g), Some(s), Some(*a), Some(direct.value_at(s)), Some(equiv.value_at(s))]);
    }
    Ok(r)
}

pub fn cmd_dump_realization<W: Write>(cfg: &RunConfig, out: W) -> Result<()> {
    let gain = gain_for(cfg);
    let gamma_max = saturation_gamma(&cfg.model, &cfg.system, &gain)?;
    let w = validate_window(&cfg.model, &cfg.system, &gain, gamma_max, cfg.bias_tolerance.unwrap_or(DEFAULT_BIAS_TOL))?;
    let reals = (0..cfg.trials as u64).map(|t| sample_realization(&cfg.model, &w, cfg.system.alpha, cfg.seed, t)).collect::<Result<Vec<_>>>()?;
    write_realizations_csv(out, &reals)
}

fn write_text(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_samples(cfg: &RunConfig, emp: &EmpiricalCdf) -> Result<()> {
    if let Some(p) = &cfg.outputs.samples {
        let mut s = String::with_capacity(emp.sorted_samples.len() * 24);
        for x in &emp.sorted_samples {
            s.push_str(&x.to_string());
            s.push('\n');
        }
        std::fs::write(p, s)?;
    }
    Ok(())
}

fn execute(command: Command, cfg: &RunConfig) -> Result<i32> {
    let start = Instant::now();
    let mut status = EXIT_OK;
    let report = match command {
        Command::Analytic => cmd_analytic(cfg)?,
        Command::Simulate => {
            let (r, emp) = cmd_simulate(cfg)?;
            write_samples(cfg, &emp)?;
            r
        }
        Command::Compare => {
            let (r, emp, ok) = cmd_compare(cfg)?;
            write_samples(cfg, &emp)?;
            if !ok {
                status = EXIT_TOLERANCE;
            }
            r
        }
        Command::ScalingDemo => cmd_scaling_demo(cfg)?.0,
        Command::OptimizeGuard => cmd_optimize_guard(cfg)?,
        Command::EquivPathloss => cmd_equiv_pathloss(cfg)?,
        Command::DumpRealization => {
            let mut buf = Vec::new();
            cmd_dump_realization(cfg, &mut buf)?;
            write_text(cfg.outputs.curve.as_ref(), std::str::from_utf8(&buf).expect("CSV is UTF-8"))?;
            eprintln!("{}: {} realizations in {:.2} s", command.name(), cfg.trials, start.elapsed().as_secs_f64());
            return Ok(status);
        }
    };
    write_text(cfg.outputs.curve.as_ref(), &report.to_csv())?;
    let mut summary = format!("{}: seed {}", command.name(), cfg.seed);
    if let Some(d) = report.meta_value("sup_deviation") {
        summary.push_str(&format!(", sup deviation {d}"));
    }
    if let Some(d) = report.meta_value("discarded") {
        summary.push_str(&format!(", discarded {d}"));
    }
    eprintln!("{summary}, runtime {:.2} s", start.elapsed().as_secs_f64());
    Ok(status)
}

/// Parse arguments, run the command, and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let Some(path) = &cli.common.config else {
        eprintln!("error: --config is required");
        return EXIT_USAGE;
    };
    let result = RunConfig::load(path).and_then(|cfg| {
        let cfg = apply_overrides(cfg, &cli.common);
        cfg.validate()?;
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.common.threads {
            pool = pool.num_threads(n);
        }
        let pool = pool.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| execute(cli.command, &cfg))
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
