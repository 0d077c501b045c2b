//! Lowest-order adiabatic perturbation theory.
//!
//! The diagonalising rotation is `G(t) = exp(−iθ(t)σy/2)`, so the lowest-order
//! propagator is `U(t) = G(t) exp(−iφ(t)σz/2) G†(0)` with `φ` the accumulated
//! dressed phase. The rotating-XZ field (`Ωx = Ωz = Ω`, transverse part in
//! quadrature) admits a closed-form continuous `θ`.

use crate::error::{invalid, Error, Result};
use crate::field::{unwrap_near, DriveField, DriveParams, FieldVector, Regime};
use crate::linalg::{Mat2, SpinState};
use crate::propagator::{Method, RunRecord, Scenario, Trajectory};
use crate::scalar::Real;

/// Rotating-XZ drive `h = (Ω sin(ωt+Φ), 0, ω₀z + Ω cos(ωt+Φ))`.
///
/// Frequencies are ordinary kHz, `phi` is in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotatingXzParams<T> {
    omega: T,
    omega0z: T,
    omega_rabi: T,
    phi: T,
}

impl<T: Real> RotatingXzParams<T> {
    pub fn new(omega: T, omega0z: T, omega_rabi: T, phi: T) -> Result<Self> {
        for (name, v) in [("omega", omega), ("omega0z", omega0z), ("Omega", omega_rabi), ("Phi", phi)] {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        if omega <= T::zero() {
            return Err(invalid("omega", format!("must be > 0, got {omega}")));
        }
        if omega0z < T::zero() {
            return Err(invalid("omega0z", format!("must be >= 0, got {omega0z}")));
        }
        if omega_rabi <= T::zero() {
            return Err(invalid("Omega", format!("must be > 0, got {omega_rabi}")));
        }
        Ok(Self {
            omega,
            omega0z,
            omega_rabi,
            phi,
        })
    }

    pub fn omega(&self) -> T {
        self.omega
    }
    pub fn omega0z(&self) -> T {
        self.omega0z
    }
    pub fn omega_rabi(&self) -> T {
        self.omega_rabi
    }
    pub fn phi(&self) -> T {
        self.phi
    }

    /// `m = ω₀z/Ω`.
    pub fn m(&self) -> T {
        self.omega0z / self.omega_rabi
    }

    /// Drive phase `x = ωt + Φ` at time `t`.
    fn drive_phase(&self, t: T) -> T {
        T::TAU() * self.omega * t + self.phi
    }

    /// Continuous orientation angle, the lift of `arg(m + e^{ix})`.
    ///
    /// For `m ≥ 1` the principal value never jumps; for `m < 1` the angle
    /// winds once per period and follows `x + arg(1 + m e^{−ix})`.
    pub fn orientation_lift(&self, t: T) -> T {
        let x = self.drive_phase(t);
        let m = self.m();
        if m >= T::one() {
            x.sin().atan2(m + x.cos())
        } else {
            x + (-m * x.sin()).atan2(T::one() + m * x.cos())
        }
    }

    /// Smallest `|h|` (rad/ms) over `t ∈ [0, t_end]`.
    pub fn min_field_on(&self, t_end: T) -> T {
        let (a, b) = {
            let (x0, x1) = (self.drive_phase(T::zero()), self.drive_phase(t_end));
            if x0 <= x1 {
                (x0, x1)
            } else {
                (x1, x0)
            }
        };
        // |h|² is decreasing in cos x, so the minimum sits at x ≡ π when covered.
        let k = ((a - T::PI()) / T::TAU()).ceil();
        let covers_pi = T::PI() + k * T::TAU() <= b;
        if covers_pi {
            T::TAU() * (self.omega0z - self.omega_rabi).abs()
        } else {
            self.field(T::zero()).magnitude().min(self.field(t_end).magnitude())
        }
    }
}

impl<T: Real> DriveField<T> for RotatingXzParams<T> {
    fn field(&self, t: T) -> FieldVector<T> {
        let x = self.drive_phase(t);
        FieldVector {
            hx: T::TAU() * self.omega_rabi * x.sin(),
            hy: T::zero(),
            hz: T::TAU() * (self.omega0z + self.omega_rabi * x.cos()),
        }
    }

    fn field_rate(&self, t: T) -> FieldVector<T> {
        let x = self.drive_phase(t);
        let w = T::TAU() * self.omega;
        FieldVector {
            hx: T::TAU() * self.omega_rabi * w * x.cos(),
            hy: T::zero(),
            hz: -T::TAU() * self.omega_rabi * w * x.sin(),
        }
    }

    fn drive_angular(&self) -> T {
        T::TAU() * self.omega
    }

    fn frequency_scale(&self) -> T {
        T::TAU() * self.omega.max(self.omega0z).max(self.omega_rabi)
    }
}

/// `h^R(t)`; identical to [`DriveField::field`] on the parameters.
pub fn rotating_field<T: Real>(p: &RotatingXzParams<T>, t: T) -> FieldVector<T> {
    p.field(t)
}

fn check_no_crossing<T: Real>(p: &RotatingXzParams<T>, t_end: T) -> Result<()> {
    let min = p.min_field_on(t_end.max(T::zero()));
    if min <= p.degeneracy_threshold() {
        Err(Error::ExactCrossing { min_field: min.as_f64() })
    } else {
        Ok(())
    }
}

/// `U = Ry(θ)·Rz(φ)·Ry(−θ₀)`.
fn lowest_order_propagator<T: Real>(theta: T, phi: T, theta0: T) -> Mat2<T> {
    Mat2::rotation_y(theta) * Mat2::rotation_z(phi) * Mat2::rotation_y(-theta0)
}

/// Lowest-order adiabatic propagator from `τ = 0` to `tau`.
pub fn adiabatic_propagator<T: Real>(p: &RotatingXzParams<T>, tau: T, quad_tol: T) -> Result<Mat2<T>> {
    let t = p.time_from_reduced(tau);
    check_no_crossing(p, t)?;
    let phi = p.accumulated_phase(t, quad_tol);
    Ok(lowest_order_propagator(p.orientation_lift(t), phi, p.orientation_lift(T::zero())))
}

/// Angle profiles and spin expectation values of the adiabatic solution for
/// a σx-eigenstate preparation at `τ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdiabaticSolution<T> {
    pub theta0: T,
    pub tau: Vec<T>,
    pub theta: Vec<T>,
    pub phi: Vec<T>,
    pub sx: Vec<T>,
    pub sy: Vec<T>,
    pub sz: Vec<T>,
}

/// Closed-form expectation values for given angles.
pub fn expectations_from_angles<T: Real>(theta: T, phi: T, theta0: T) -> [T; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (s0, c0) = theta0.sin_cos();
    [st * s0 + ct * cp * c0, c0 * sp, ct * s0 - st * cp * c0]
}

fn solution_from_angles<T: Real>(tau: Vec<T>, theta: Vec<T>, phi: Vec<T>, theta0: T) -> AdiabaticSolution<T> {
    let n = tau.len();
    let (mut sx, mut sy, mut sz) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (&th, &ph) in theta.iter().zip(&phi) {
        let [a, b, c] = expectations_from_angles(th, ph, theta0);
        sx.push(a);
        sy.push(b);
        sz.push(c);
    }
    AdiabaticSolution {
        theta0,
        tau,
        theta,
        phi,
        sx,
        sy,
        sz,
    }
}

fn check_grid<T: Real>(tau_grid: &[T]) -> Result<()> {
    if tau_grid.is_empty() {
        return Err(invalid("tau_grid", "must not be empty".to_string()));
    }
    if tau_grid.iter().any(|&v| v < T::zero()) || tau_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("tau_grid", "must be increasing and start at or after 0".to_string()));
    }
    Ok(())
}

/// Rotating-XZ expectation values on a reduced-time grid.
pub fn adiabatic_expectations<T: Real>(
    p: &RotatingXzParams<T>,
    tau_grid: &[T],
    quad_tol: T,
) -> Result<AdiabaticSolution<T>> {
    check_grid(tau_grid)?;
    let times: Vec<T> = tau_grid.iter().map(|&tau| p.time_from_reduced(tau)).collect();
    check_no_crossing(p, *times.last().unwrap_or(&T::zero()))?;
    let theta: Vec<T> = times.iter().map(|&t| p.orientation_lift(t)).collect();
    let phi = p.phase_on_grid(&times, quad_tol);
    Ok(solution_from_angles(tau_grid.to_vec(), theta, phi, p.orientation_lift(T::zero())))
}

/// `θ` along `times` (which must start at 0), continuous across the grid.
fn general_theta_path<T: Real>(p: &DriveParams<T>, times: &[T]) -> Result<(T, Vec<T>)> {
    let theta0 = p.orientation_angle(T::zero())?;
    let mut path = Vec::with_capacity(times.len());
    let mut prev = theta0;
    let mut t_prev = T::zero();
    for &t in times {
        // Refine between grid points so the unwrap never skips a branch.
        let rate = p.orientation_rate(t_prev)?.abs().max(p.orientation_rate(t)?.abs());
        let span = t - t_prev;
        let sub = ((rate * span / T::lit(0.5)).ceil()).to_usize().unwrap_or(1).clamp(1, 4096);
        for k in 1..=sub {
            let s = t_prev + span * T::from_usize_lossy(k) / T::from_usize_lossy(sub);
            prev = unwrap_near(p.orientation_angle(s)?, prev);
        }
        path.push(prev);
        t_prev = t;
    }
    Ok((theta0, path))
}

/// Adiabatic estimate for the general XZ field, using the rotating-XZ
/// expectation formulas with the general `θ(τ)` and `φ(τ)`.
///
/// Outside the adiabatic regime the estimate is still returned, with a warning.
pub fn general_adiabatic_estimate<T: Real>(
    p: &DriveParams<T>,
    tau_grid: &[T],
    quad_tol: T,
) -> Result<AdiabaticSolution<T>> {
    check_grid(tau_grid)?;
    if p.classify_adiabaticity().regime == Regime::Nonadiabatic {
        log::warn!("adiabatic estimate requested for nonadiabatic parameters {p:?}");
    }
    let times: Vec<T> = tau_grid.iter().map(|&tau| p.time_from_reduced(tau)).collect();
    let (theta0, theta) = general_theta_path(p, &times)?;
    let phi = p.phase_on_grid(&times, quad_tol);
    Ok(solution_from_angles(tau_grid.to_vec(), theta, phi, theta0))
}

/// Adiabatic trajectory for an arbitrary initial state prepared at `τ = 0`,
/// sampled on `grid` (ms, increasing, first point ≥ 0).
pub fn adiabatic_trajectory<T: Real>(
    scenario: impl Into<Scenario<T>>,
    psi0: SpinState<T>,
    grid: Vec<T>,
    quad_tol: T,
) -> Result<Trajectory<T>> {
    let scenario = scenario.into();
    let tau: Vec<T> = grid.iter().map(|&t| scenario.reduced_time(t)).collect();
    let sol = match scenario {
        Scenario::Xz(p) => general_adiabatic_estimate(&p, &tau, quad_tol)?,
        Scenario::RotatingXz(p) => adiabatic_expectations(&p, &tau, quad_tol)?,
    };
    let psi0 = psi0.normalized();
    let states = sol
        .theta
        .iter()
        .zip(&sol.phi)
        .map(|(&th, &ph)| lowest_order_propagator(th, ph, sol.theta0).apply(&psi0))
        .collect();
    Trajectory::from_states(scenario, grid, states, Method::Adiabatic, RunRecord::default())
}

/// Coefficient of `σy` in `V_ND = i(G†)′G = −θ′(τ)/2 σy`, with `′ = d/dτ`.
pub fn nonadiabatic_coupling<T: Real>(drive: &impl DriveField<T>, t: T) -> Result<T> {
    Ok(-drive.orientation_rate(t)? * drive.period() * T::lit(0.5))
}

/// `i (G†)′ G` in reduced time, by central differences of `G(θ(τ))`.
///
/// The diagonal part of this matrix is the Berry-type term `V_D`; for XZ
/// fields it vanishes.
pub fn frame_connection<T: Real>(drive: &impl DriveField<T>, t: T) -> Result<Mat2<T>> {
    let dtau = T::lit(1e-5);
    let dt = drive.time_from_reduced(dtau);
    let th = drive.orientation_angle(t)?;
    let th_plus = unwrap_near(drive.orientation_angle(t + dt)?, th);
    let th_minus = unwrap_near(drive.orientation_angle(t - dt)?, th);
    let g = Mat2::rotation_y(th);
    let gd_plus = Mat2::rotation_y(th_plus).adjoint();
    let gd_minus = Mat2::rotation_y(th_minus).adjoint();
    let deriv = (gd_plus - gd_minus).scale_real(T::one() / (dtau + dtau));
    Ok((deriv * g).scale(num_complex::Complex::new(T::zero(), T::one())))
}
