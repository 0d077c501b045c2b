//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use xz_dressing::analysis::{estimate_from_trace, fold_to_floquet_zone, FrequencyConvention, SampledTrace};
use xz_dressing::floquet::{fourier_h, FrameSpec};
use xz_dressing::presets::PRESETS;
use xz_dressing::{Error as CoreError, Regime, Scenario, Trajectory};

use crate::config::{MethodName, ScenarioConfig, ValidatedRun};
use crate::error::{CliError, CliResult};
use crate::io::{self, num};
use crate::run::{self, analyze_traces, deviation_stats, Quantity};

/// Where the scenario comes from: a JSON file or a named preset.
#[derive(Clone, Debug)]
pub enum Source {
    File(PathBuf),
    Preset(String),
}

impl Source {
    pub fn load(&self) -> CliResult<ScenarioConfig> {
        match self {
            Source::File(p) => ScenarioConfig::load(p),
            Source::Preset(name) => ScenarioConfig::from_preset(name),
        }
    }
}

fn emit_report(report: &Value, path: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| CliError::io(p, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Adiabatic => "adiabatic",
        Regime::Nonadiabatic => "nonadiabatic",
    }
}

/// Adiabaticity class and rotating-frame validity ratios, where defined.
fn scenario_summary(scenario: &Scenario<f64>) -> Value {
    match scenario {
        Scenario::Xz(p) => {
            let class = p.classify_adiabaticity();
            let frame = FrameSpec::for_params(p).ok().map(|spec| {
                let v = fourier_h(p, &spec).validity;
                json!({
                    "harmonic_r": spec.r,
                    "detuning": Quantity::new(spec.delta, "kHz", "nearest harmonic"),
                    "n_max": spec.n_max,
                    "omega_x_over_omega_z": v.omega_x_over_omega_z,
                    "delta_over_omega_z": v.delta_over_omega_z,
                })
            });
            json!({
                "kind": "xz",
                "adiabaticity": {
                    "regime": regime_name(class.regime),
                    "drive_product": Quantity::new(class.drive_product, "kHz^2", "omega*sqrt(omega_x^2+omega_z^2)"),
                    "splitting_squared": Quantity::new(class.splitting_squared, "kHz^2", "omega0z^2"),
                },
                "rotating_frame": frame,
            })
        }
        Scenario::RotatingXz(p) => json!({
            "kind": "rotating_xz",
            "m": p.m(),
        }),
    }
}

fn record_json(traj: &Trajectory<f64>) -> Value {
    let r = traj.record;
    json!({
        "method": traj.method.name(),
        "rtol": r.rtol,
        "atol": r.atol,
        "error_estimate": r.error_estimate,
        "max_norm_error": r.max_norm_error,
        "steps": r.steps,
        "rejected_steps": r.rejected_steps,
    })
}

fn default_lag(run: &ValidatedRun) -> f64 {
    run.tau_span.1 - run.tau_span.0
}

pub struct SimulateArgs {
    pub source: Source,
    pub out: PathBuf,
    pub svg: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub max_lag_tau: Option<f64>,
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let start = Instant::now();
    let cfg = args.source.load()?;
    let run = cfg.validate()?;
    let grid = run::grid(&run)?;
    let traj = run::run_method(&run, run.method, &grid)?;
    io::write_trace(&args.out, &traj)?;
    if let Some(svg) = &args.svg {
        let tau = traj.reduced_times();
        let series = vec![
            ("sx", traj.samples.iter().map(|s| s.sx).collect()),
            ("sy", traj.samples.iter().map(|s| s.sy).collect()),
            ("p_plus", traj.samples.iter().map(|s| 2.0 * s.p_plus - 1.0).collect()),
        ];
        io::write_svg(svg, &tau, &series)?;
    }
    let analysis = run::analyze_trajectory(&run, &traj, args.max_lag_tau.unwrap_or(default_lag(&run)))?;
    let report = json!({
        "command": "simulate",
        "config": cfg,
        "outputs": { "trace": args.out, "svg": args.svg },
        "samples": traj.len(),
        "scenario": scenario_summary(&run.scenario),
        "run": record_json(&traj),
        "analysis": analysis,
        "timing_s": start.elapsed().as_secs_f64(),
    });
    emit_report(&report, args.report.as_deref())
}

pub struct AnalyzeArgs {
    pub input: PathBuf,
    pub estimates: PathBuf,
    pub report: Option<PathBuf>,
    pub column: Option<String>,
    pub drive_khz: Option<f64>,
    pub convention: FrequencyConvention,
    pub max_lag_tau: Option<f64>,
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult<()> {
    let start = Instant::now();
    let tf = io::read_trace(&args.input)?;
    let name = match &args.column {
        Some(c) => c.clone(),
        None if tf.column("sx").is_some() => "sx".to_string(),
        None => tf
            .columns
            .first()
            .map(|(n, _)| n.clone())
            .ok_or_else(|| CliError::Config("trace has no signal column".to_string()))?,
    };
    let values = tf
        .column(&name)
        .ok_or_else(|| CliError::Config(format!("trace has no column `{name}`")))?
        .to_vec();
    if tf.t.len() < 4 {
        return Err(CliError::InsufficientData(format!("trace has {} samples, need at least 4", tf.t.len())));
    }
    let signal = SampledTrace::from_times(&tf.t, values, name.clone())?;
    let drive_khz = args.drive_khz.or(tf.drive_khz);
    if let Some(f) = drive_khz {
        if !(f > 0.0 && f.is_finite()) {
            return Err(CliError::Config(format!("drive frequency must be > 0 kHz, got {f}")));
        }
    }
    let mut notes = Vec::new();
    let estimates = match estimate_from_trace(&signal, args.convention) {
        Ok(e) => e,
        Err(CoreError::InsufficientData(msg)) => {
            notes.push(format!("no frequency estimates: {msg}"));
            Vec::new()
        }
        Err(e) => return Err(e.into()),
    };
    let tuples = match drive_khz {
        Some(f) => io::folded_tuples(&fold_to_floquet_zone(&estimates, 1.0 / f)?),
        None => {
            notes.push("no drive frequency: reduced-time columns left empty".to_string());
            estimates.iter().map(|e| (e.t_mid, e.f_ld, e.uncertainty, None, None)).collect()
        }
    };
    io::write_csv(&args.estimates, &io::ESTIMATE_HEADER, &io::estimate_rows(&tuples))?;

    let analysis = drive_khz.map(|f| {
        let occupation = tf
            .column("p_plus")
            .and_then(|v| SampledTrace::from_times(&tf.t, v.to_vec(), "p_plus").ok())
            .unwrap_or_else(|| signal.clone());
        let lag = args.max_lag_tau.unwrap_or(signal.duration() * f);
        analyze_traces(Some(&signal), Some(&occupation), f, lag, "analyze")
    });
    let f_units = match args.convention {
        FrequencyConvention::HalfPeriod => "kHz",
        FrequencyConvention::PaperVerbatim => "rad/ms",
    };
    let report = json!({
        "command": "analyze",
        "input": args.input,
        "outputs": { "estimates": args.estimates },
        "signal": name,
        "samples": signal.len(),
        "sample_rate": Quantity::new(signal.sample_rate, "kHz", "from sample times"),
        "drive_frequency": drive_khz.map(|f| Quantity::new(f, "kHz", if args.drive_khz.is_some() { "flag" } else { "tau/t columns" })),
        "convention": format!("{:?}", args.convention),
        "estimate_count": estimates.len(),
        "f_ld_units": f_units,
        "analysis": analysis,
        "notes": notes,
        "timing_s": start.elapsed().as_secs_f64(),
    });
    emit_report(&report, args.report.as_deref())
}

pub struct CompareArgs {
    pub source: Source,
    pub methods: Vec<MethodName>,
    pub out: PathBuf,
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct DeviationSummary {
    method: String,
    reference: String,
    max_abs_sx: f64,
    mean_abs_sx: f64,
    max_abs_sy: f64,
    mean_abs_sy: f64,
    max_abs_p_plus: f64,
    mean_abs_p_plus: f64,
    units: &'static str,
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let start = Instant::now();
    if args.methods.len() < 2 {
        return Err(CliError::Config("compare needs at least two methods".to_string()));
    }
    let cfg = args.source.load()?;
    let run = cfg.validate()?;
    let grid = run::grid(&run)?;
    let mut done: Vec<(String, Trajectory<f64>)> = Vec::new();
    let mut failures = Vec::new();
    for (k, &m) in args.methods.iter().enumerate() {
        let label = if args.methods[..k].contains(&m) {
            format!("{}_{k}", m.method().name())
        } else {
            m.method().name().to_string()
        };
        match run::run_method(&run, m, &grid) {
            Ok(t) => done.push((label, t)),
            Err(e) => {
                log::warn!("{label} failed: {e}");
                failures.push(json!({ "method": label, "error": e.to_string(), "exit_code": e.exit_code() }));
            }
        }
    }
    if done.len() < 2 {
        return Err(CliError::Numerical(format!(
            "fewer than two methods succeeded: {}",
            serde_json::to_string(&failures).unwrap_or_default()
        )));
    }
    let series = |t: &Trajectory<f64>| -> [Vec<f64>; 3] {
        [
            t.samples.iter().map(|s| s.sx).collect(),
            t.samples.iter().map(|s| s.sy).collect(),
            t.samples.iter().map(|s| s.p_plus).collect(),
        ]
    };
    let data: Vec<[Vec<f64>; 3]> = done.iter().map(|(_, t)| series(t)).collect();
    let (ref_name, ref_traj) = &done[0];
    let mut header = vec!["tau".to_string(), "t".to_string()];
    for (name, _) in &done {
        header.extend(["sx", "sy", "p_plus"].map(|c| format!("{c}_{name}")));
    }
    for (name, _) in &done[1..] {
        header.extend(["dsx", "dsy", "dp_plus"].map(|c| format!("{c}_{name}")));
    }
    let tau = ref_traj.reduced_times();
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|i| {
            let mut row = vec![num(tau[i]), num(grid[i])];
            for d in &data {
                row.extend(d.iter().map(|c| num(c[i])));
            }
            for d in &data[1..] {
                row.extend(d.iter().zip(&data[0]).map(|(c, r)| num(c[i] - r[i])));
            }
            row
        })
        .collect();
    io::write_csv(&args.out, &header, &rows)?;
    let summary: Vec<DeviationSummary> = done[1..]
        .iter()
        .zip(&data[1..])
        .map(|((name, _), d)| {
            let (mx, ax) = deviation_stats(&d[0], &data[0][0]);
            let (my, ay) = deviation_stats(&d[1], &data[0][1]);
            let (mp, ap) = deviation_stats(&d[2], &data[0][2]);
            DeviationSummary {
                method: name.clone(),
                reference: ref_name.clone(),
                max_abs_sx: mx,
                mean_abs_sx: ax,
                max_abs_sy: my,
                mean_abs_sy: ay,
                max_abs_p_plus: mp,
                mean_abs_p_plus: ap,
                units: "dimensionless",
            }
        })
        .collect();
    let report = json!({
        "command": "compare",
        "config": cfg,
        "outputs": { "deviations": args.out },
        "scenario": scenario_summary(&run.scenario),
        "runs": done.iter().map(|(_, t)| record_json(t)).collect::<Vec<_>>(),
        "deviations": summary,
        "failures": failures,
        "timing_s": start.elapsed().as_secs_f64(),
    });
    emit_report(&report, args.report.as_deref())
}

pub struct SweepArgs {
    pub source: Source,
    pub param: String,
    pub values: Vec<f64>,
    pub out: PathBuf,
    pub report: Option<PathBuf>,
    pub jobs: usize,
    pub max_lag_tau: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
struct SweepPoint {
    value: f64,
    regime: Option<&'static str>,
    quasi_period_tau: Option<f64>,
    quasi_confidence: Option<f64>,
    rabi_period_tau: Option<f64>,
    rabi_frequency_khz: Option<f64>,
    adiabatic_max_dev_sy: Option<f64>,
    error: Option<String>,
}

fn sweep_point(base: &ScenarioConfig, param: &str, value: f64, max_lag: Option<f64>) -> SweepPoint {
    let mut point = SweepPoint {
        value,
        regime: None,
        quasi_period_tau: None,
        quasi_confidence: None,
        rabi_period_tau: None,
        rabi_frequency_khz: None,
        adiabatic_max_dev_sy: None,
        error: None,
    };
    let result = (|| -> CliResult<()> {
        let mut cfg = base.clone();
        cfg.set_param(param, value)?;
        let run = cfg.validate()?;
        if let Scenario::Xz(p) = run.scenario {
            point.regime = Some(regime_name(p.classify_adiabaticity().regime));
        }
        let grid = run::grid(&run)?;
        let exact = run::run_method(&run, MethodName::Exact, &grid)?;
        let a = run::analyze_trajectory(&run, &exact, max_lag.unwrap_or(default_lag(&run)))?;
        point.quasi_period_tau = a.quasi_period.map(|q| q.value);
        point.quasi_confidence = a.quasi_period_confidence;
        point.rabi_period_tau = a.rabi_like_period.map(|q| q.value);
        point.rabi_frequency_khz = a.rabi_like_frequency.map(|q| q.value);
        let adiabatic = run::run_method(&run, MethodName::Adiabatic, &grid)?;
        let sy = |t: &Trajectory<f64>| t.samples.iter().map(|s| s.sy).collect::<Vec<_>>();
        point.adiabatic_max_dev_sy = Some(deviation_stats(&sy(&adiabatic), &sy(&exact)).0);
        Ok(())
    })();
    if let Err(e) = result {
        point.error = Some(e.to_string());
    }
    point
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let start = Instant::now();
    if args.values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".to_string()));
    }
    if args.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".to_string()));
    }
    let base = args.source.load()?;
    base.clone().set_param(&args.param, args.values[0])?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", args.jobs)))?;
    let points: Vec<SweepPoint> = pool.install(|| {
        args.values
            .par_iter()
            .map(|&v| sweep_point(&base, &args.param, v, args.max_lag_tau))
            .collect()
    });
    let header = [
        args.param.as_str(),
        "regime",
        "quasi_period_tau",
        "quasi_confidence",
        "rabi_period_tau",
        "rabi_frequency_khz",
        "adiabatic_max_dev_sy",
        "error",
    ];
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                num(p.value),
                p.regime.unwrap_or_default().to_string(),
                opt(p.quasi_period_tau),
                opt(p.quasi_confidence),
                opt(p.rabi_period_tau),
                opt(p.rabi_frequency_khz),
                opt(p.adiabatic_max_dev_sy),
                p.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    io::write_csv(&args.out, &header, &rows)?;
    let report = json!({
        "command": "sweep",
        "config": base,
        "parameter": args.param,
        "outputs": { "table": args.out },
        "units": { "quasi_period_tau": "drive periods", "rabi_period_tau": "drive periods", "rabi_frequency_khz": "kHz", "adiabatic_max_dev_sy": "dimensionless" },
        "points": points,
        "failed_points": points.iter().filter(|p| p.error.is_some()).count(),
        "jobs": args.jobs,
        "timing_s": start.elapsed().as_secs_f64(),
    });
    emit_report(&report, args.report.as_deref())
}

pub fn presets(as_json: bool) -> CliResult<()> {
    if as_json {
        let list: Vec<Value> = PRESETS
            .iter()
            .map(|p| {
                json!({
                    "name": p.name, "omega_khz": p.omega, "omega0z_khz": p.omega0z,
                    "omega_x_khz": p.omega_x, "omega_z_khz": p.omega_z,
                    "phi0z_over_pi": p.phi_over_pi, "summary": p.summary,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&list).expect("presets serialize"));
        return Ok(());
    }
    println!(
        "{:<6} {:>7} {:>8} {:>7} {:>7} {:>6}  summary",
        "name", "ω/kHz", "ω0z/kHz", "Ωx/kHz", "Ωz/kHz", "Φ/π"
    );
    for p in PRESETS.iter() {
        println!(
            "{:<6} {:>7} {:>8} {:>7} {:>7} {:>6}  {}",
            p.name, p.omega, p.omega0z, p.omega_x, p.omega_z, p.phi_over_pi, p.summary
        );
    }
    Ok(())
}
