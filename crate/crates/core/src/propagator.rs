//! Numerical solution of the Schrödinger equation for an XZ-dressed qubit,
//! plus the observables read off a trajectory.

use num_complex::Complex;

use crate::adiabatic::RotatingXzParams;
use crate::error::{invalid, Result};
use crate::field::{DriveField, DriveParams, FieldVector};
use crate::integrator::{GaussLegendre, StepReport, Tolerances};
use crate::linalg::{Mat2, SpinState};
use crate::scalar::Real;

/// Default output density, samples per drive period.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 512;

/// Field configuration a trajectory was computed for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scenario<T> {
    Xz(DriveParams<T>),
    RotatingXz(RotatingXzParams<T>),
}

impl<T> From<DriveParams<T>> for Scenario<T> {
    fn from(p: DriveParams<T>) -> Self {
        Scenario::Xz(p)
    }
}

impl<T> From<RotatingXzParams<T>> for Scenario<T> {
    fn from(p: RotatingXzParams<T>) -> Self {
        Scenario::RotatingXz(p)
    }
}

impl<T: Real> DriveField<T> for Scenario<T> {
    fn field(&self, t: T) -> FieldVector<T> {
        match self {
            Scenario::Xz(p) => p.field(t),
            Scenario::RotatingXz(p) => p.field(t),
        }
    }
    fn field_rate(&self, t: T) -> FieldVector<T> {
        match self {
            Scenario::Xz(p) => p.field_rate(t),
            Scenario::RotatingXz(p) => p.field_rate(t),
        }
    }
    fn drive_angular(&self) -> T {
        match self {
            Scenario::Xz(p) => p.drive_angular(),
            Scenario::RotatingXz(p) => p.drive_angular(),
        }
    }
    fn frequency_scale(&self) -> T {
        match self {
            Scenario::Xz(p) => p.frequency_scale(),
            Scenario::RotatingXz(p) => p.frequency_scale(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Adiabatic,
    Floquet1,
    Floquet2,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Adiabatic => "adiabatic",
            Method::Floquet1 => "floquet1",
            Method::Floquet2 => "floquet2",
        }
    }
}

/// Transverse component read out as the polarimeter signal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectionAxis {
    X,
    Y,
}

/// Spin expectation values and `|+⟩` occupation at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochSample<T> {
    pub t: T,
    pub sx: T,
    pub sy: T,
    pub sz: T,
    pub p_plus: T,
}

/// How a trajectory was produced and how accurate it claims to be.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunRecord<T> {
    pub rtol: T,
    pub atol: T,
    /// Accumulated local error estimate (amplitude units); zero for closed forms.
    pub error_estimate: T,
    pub max_norm_error: T,
    pub steps: usize,
    pub rejected_steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub scenario: Scenario<T>,
    pub grid: Vec<T>,
    pub states: Vec<SpinState<T>>,
    pub samples: Vec<BlochSample<T>>,
    pub method: Method,
    pub record: RunRecord<T>,
}

impl<T: Real> Trajectory<T> {
    /// Assembles a trajectory from states on a grid, computing Bloch data and `P₊`.
    pub fn from_states(
        scenario: Scenario<T>,
        grid: Vec<T>,
        states: Vec<SpinState<T>>,
        method: Method,
        record: RunRecord<T>,
    ) -> Result<Self> {
        let samples = grid
            .iter()
            .zip(&states)
            .map(|(&t, psi)| {
                let [sx, sy, sz] = psi.bloch();
                let p_plus = occupation_from_bloch(&scenario, [sx, sy, sz], psi.norm_sqr(), t)?;
                Ok(BlochSample { t, sx, sy, sz, p_plus })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            scenario,
            grid,
            states,
            samples,
            method,
            record,
        })
    }

    /// Sample times in units of the drive period.
    pub fn reduced_times(&self) -> Vec<T> {
        self.grid.iter().map(|&t| self.scenario.reduced_time(t)).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// The σx eigenstate `(|↑⟩ + |↓⟩)/√2` used as the default preparation.
pub fn prepare_sigma_x_eigenstate<T: Real>() -> SpinState<T> {
    SpinState::sigma_x_plus()
}

/// Uniform grid in reduced time from `tau0` to `tau1`.
pub fn reduced_time_grid<T: Real>(
    drive: &impl DriveField<T>,
    tau0: T,
    tau1: T,
    samples_per_period: usize,
) -> Result<Vec<T>> {
    if !(tau1 > tau0) {
        return Err(invalid("t_span", format!("empty span [{tau0}, {tau1}]")));
    }
    if samples_per_period < 2 {
        return Err(invalid("samples_per_period", "must be at least 2".to_string()));
    }
    let intervals = ((tau1 - tau0) * T::from_usize_lossy(samples_per_period)).round();
    let n = intervals.to_usize().unwrap_or(1).max(1);
    Ok(time_grid(drive.time_from_reduced(tau0), drive.time_from_reduced(tau1), n + 1))
}

/// `n` equally spaced times from `t0` to `t1` inclusive.
pub fn time_grid<T: Real>(t0: T, t1: T, n: usize) -> Vec<T> {
    let last = T::from_usize_lossy(n.max(2) - 1);
    (0..n)
        .map(|k| {
            if k + 1 == n {
                t1
            } else {
                t0 + (t1 - t0) * T::from_usize_lossy(k) / last
            }
        })
        .collect()
}

fn initial_step<T: Real>(drive: &impl DriveField<T>) -> T {
    T::lit(0.1) / drive.frequency_scale().max(T::min_positive_value())
}

/// Integrates the Schrödinger equation from `psi0` through every point of a
/// strictly monotone grid. The first grid point is the preparation time.
pub fn evolve_on_grid<T: Real>(
    scenario: impl Into<Scenario<T>>,
    psi0: SpinState<T>,
    grid: Vec<T>,
    tol: Tolerances<T>,
) -> Result<Trajectory<T>> {
    let scenario = scenario.into();
    if grid.is_empty() {
        return Err(invalid("grid", "must contain at least one time".to_string()));
    }
    let norm = psi0.norm_sqr();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(invalid("initial_state", "must be a nonzero finite vector".to_string()));
    }
    let psi0 = psi0.normalized();
    let drive = scenario;
    let gl = GaussLegendre::new(move |t| drive.hamiltonian(t), tol);
    let (states, rep): (Vec<_>, StepReport<T>) = gl.integrate(psi0, &grid, initial_step(&scenario))?;
    log::debug!(
        "exact run: {} steps, {} rejected, error estimate {:e}",
        rep.accepted,
        rep.rejected,
        rep.error_estimate.as_f64()
    );
    let record = RunRecord {
        rtol: tol.rtol,
        atol: tol.atol,
        error_estimate: rep.error_estimate,
        max_norm_error: rep.max_norm_error,
        steps: rep.accepted,
        rejected_steps: rep.rejected,
    };
    Trajectory::from_states(scenario, grid, states, Method::Exact, record)
}

/// Integrates over `t_span = (t0, t1)` (ms) with `n_samples` uniform outputs.
pub fn evolve<T: Real>(
    scenario: impl Into<Scenario<T>>,
    psi0: SpinState<T>,
    t_span: (T, T),
    n_samples: usize,
    tol: Tolerances<T>,
) -> Result<Trajectory<T>> {
    let (t0, t1) = t_span;
    if !(t1 > t0) {
        return Err(invalid("t_span", format!("requires t1 > t0, got ({t0}, {t1})")));
    }
    if n_samples < 2 {
        return Err(invalid("n_samples", "must be at least 2".to_string()));
    }
    evolve_on_grid(scenario, psi0, time_grid(t0, t1, n_samples), tol)
}

/// Numerical propagator `U(t1, t0)`, assembled column by column.
pub fn propagator_matrix<T: Real>(
    scenario: impl Into<Scenario<T>>,
    t0: T,
    t1: T,
    tol: Tolerances<T>,
) -> Result<Mat2<T>> {
    let scenario = scenario.into();
    if t0 == t1 {
        return Ok(Mat2::identity());
    }
    let up = evolve_on_grid(scenario, SpinState::up(), vec![t0, t1], tol)?;
    let down = evolve_on_grid(scenario, SpinState::down(), vec![t0, t1], tol)?;
    Ok(Mat2::from_columns(&up.states[1], &down.states[1]))
}

/// Instantaneous `|+(t)⟩` eigenvector of `H(t)`.
///
/// With no reference the upper component is real and nonnegative; with a
/// reference (typically the previous grid point) the phase is chosen so the
/// overlap with it is real and positive.
pub fn instantaneous_eigenvector<T: Real>(
    drive: &impl DriveField<T>,
    t: T,
    reference: Option<&SpinState<T>>,
) -> Result<SpinState<T>> {
    let h = drive.nondegenerate_field(t)?;
    let mag = h.magnitude();
    // |+⟩ ∝ (|h| + hz, hx + i hy), or (hx − i hy, |h| − hz) when hz < 0.
    let raw = if h.hz >= T::zero() {
        SpinState::new(Complex::new(mag + h.hz, T::zero()), Complex::new(h.hx, h.hy))
    } else {
        SpinState::new(Complex::new(h.hx, -h.hy), Complex::new(mag - h.hz, T::zero()))
    };
    let mut v = raw.normalized();
    match reference {
        Some(r) => {
            let ov = r.inner(&v);
            if ov.norm() > T::zero() {
                let phase = ov.conj() / ov.norm();
                v = SpinState::new(v.c_up * phase, v.c_down * phase);
            }
        }
        None => {
            if v.c_up.norm() > T::zero() {
                let phase = v.c_up.conj() / v.c_up.norm();
                v = SpinState::new(v.c_up * phase, v.c_down * phase);
            }
        }
    }
    Ok(v)
}

fn occupation_from_bloch<T: Real>(drive: &impl DriveField<T>, s: [T; 3], norm: T, t: T) -> Result<T> {
    let h = drive.nondegenerate_field(t)?;
    let mag = h.magnitude();
    let proj = (s[0] * h.hx + s[1] * h.hy + s[2] * h.hz) / mag;
    Ok(((norm + proj) * T::lit(0.5)).max(T::zero()).min(norm))
}

/// `P₊ = |⟨+(t)|ψ⟩|²` for a normalised state.
///
/// Computed as `(1 + ⟨σ⟩·ĥ)/2`, which does not depend on the eigenvector phase.
pub fn instantaneous_occupation<T: Real>(drive: &impl DriveField<T>, psi: &SpinState<T>, t: T) -> Result<T> {
    occupation_from_bloch(drive, psi.bloch(), psi.norm_sqr(), t)
}

/// The requested transverse spin component along the trajectory.
pub fn projected_signal<T: Real>(traj: &Trajectory<T>, axis: DetectionAxis) -> Vec<T> {
    traj.samples
        .iter()
        .map(|s| match axis {
            DetectionAxis::X => s.sx,
            DetectionAxis::Y => s.sy,
        })
        .collect()
}
