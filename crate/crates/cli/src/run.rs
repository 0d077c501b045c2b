//! Method dispatch and the analyses attached to a run.

use std::f64::consts::TAU;

use serde::Serialize;
use xz_dressing::adiabatic::adiabatic_trajectory;
use xz_dressing::analysis::{estimate_rabi_like_period, find_quasi_period, QuasiPeriod, RabiLike, SampledTrace};
use xz_dressing::field::DEFAULT_QUAD_TOL;
use xz_dressing::floquet::{propagate_floquet, ExpansionOrder, FrameSpec};
use xz_dressing::propagator::{evolve_on_grid, reduced_time_grid};
use xz_dressing::{DriveField, Scenario, Trajectory};

use crate::config::{MethodName, ValidatedRun};
use crate::error::{CliError, CliResult};

/// Sample grid (ms) for a validated run.
pub fn grid(run: &ValidatedRun) -> CliResult<Vec<f64>> {
    let (t0, t1) = run.tau_span;
    Ok(reduced_time_grid(&run.scenario, t0, t1, run.samples_per_period)?)
}

/// Runs one method on a shared grid.
pub fn run_method(run: &ValidatedRun, method: MethodName, grid: &[f64]) -> CliResult<Trajectory<f64>> {
    let grid = grid.to_vec();
    let traj = match method {
        MethodName::Exact => evolve_on_grid(run.scenario, run.psi0, grid, run.tolerances)?,
        MethodName::Adiabatic => adiabatic_trajectory(run.scenario, run.psi0, grid, DEFAULT_QUAD_TOL)?,
        MethodName::Floquet1 | MethodName::Floquet2 => {
            let Scenario::Xz(p) = run.scenario else {
                return Err(CliError::Config("floquet methods need scenario `xz`".to_string()));
            };
            let spec = FrameSpec::for_params(&p)?;
            let order = if method == MethodName::Floquet1 {
                ExpansionOrder::First
            } else {
                ExpansionOrder::Second
            };
            propagate_floquet(&p, &spec, run.psi0, grid, order)?
        }
    };
    Ok(traj)
}

/// A reported number with its units and the method that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub units: &'static str,
    pub method: String,
}

impl Quantity {
    pub fn new(value: f64, units: &'static str, method: impl Into<String>) -> Self {
        Self {
            value,
            units,
            method: method.into(),
        }
    }
}

/// Revival and slow-oscillation searches on a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceAnalysis {
    pub quasi_period: Option<Quantity>,
    pub quasi_period_confidence: Option<f64>,
    pub rabi_like_period: Option<Quantity>,
    pub rabi_like_frequency: Option<Quantity>,
    pub notes: Vec<String>,
}

/// Runs the revival search on `signal` and the slow-envelope search on `occupation`.
pub fn analyze_traces(
    signal: Option<&SampledTrace<f64>>,
    occupation: Option<&SampledTrace<f64>>,
    drive_khz: f64,
    max_lag_tau: f64,
    provenance: &str,
) -> TraceAnalysis {
    let mut out = TraceAnalysis {
        quasi_period: None,
        quasi_period_confidence: None,
        rabi_like_period: None,
        rabi_like_frequency: None,
        notes: Vec::new(),
    };
    let max_lag = max_lag_tau / drive_khz;
    if let Some(trace) = signal {
        match find_quasi_period(trace, max_lag, drive_khz) {
            Ok(QuasiPeriod::Found { period_tau, confidence }) => {
                out.quasi_period = Some(Quantity::new(
                    period_tau,
                    "drive periods",
                    format!("{provenance}; autocorrelation of {}", trace.label),
                ));
                out.quasi_period_confidence = Some(confidence);
            }
            Ok(QuasiPeriod::NoRevival { best_confidence }) => {
                out.quasi_period_confidence = Some(best_confidence);
                out.notes
                    .push(format!("no revival above threshold in {} (best {best_confidence:.3})", trace.label));
            }
            Err(e) => out.notes.push(format!("quasi-period search skipped: {e}")),
        }
    }
    if let Some(trace) = occupation {
        match estimate_rabi_like_period(trace, drive_khz, max_lag) {
            Ok(RabiLike::Found {
                period_tau, frequency, ..
            }) => {
                let how = format!("{provenance}; slow envelope of {}", trace.label);
                out.rabi_like_period = Some(Quantity::new(period_tau, "drive periods", how.clone()));
                out.rabi_like_frequency = Some(Quantity::new(frequency, "kHz", how));
            }
            Ok(RabiLike::NoOscillation) => out.notes.push(format!("no slow oscillation in {}", trace.label)),
            Err(e) => out.notes.push(format!("Rabi-like search skipped: {e}")),
        }
    }
    out
}

/// Trajectory analyses for a simulate run.
pub fn analyze_trajectory(run: &ValidatedRun, traj: &Trajectory<f64>, max_lag_tau: f64) -> CliResult<TraceAnalysis> {
    let drive_khz = run.scenario.drive_angular() / TAU;
    let signal = SampledTrace::from_trajectory(traj, run.axis)?;
    let occupation = SampledTrace::occupation_from_trajectory(traj)?;
    Ok(analyze_traces(
        Some(&signal),
        Some(&occupation),
        drive_khz,
        max_lag_tau,
        traj.method.name(),
    ))
}

/// Max and mean absolute differences of two equally long series.
pub fn deviation_stats(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len().min(b.len());
    if n == 0 {
        return (0.0, 0.0);
    }
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    let (max, sum) = diffs.fold((0.0f64, 0.0), |(m, s), d| (m.max(d), s + d));
    (max, sum / n as f64)
}
