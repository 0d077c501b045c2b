//! Scenario parameters and closed-form instantaneous quantities of the XZ
//! Hamiltonian `H(t) = ½ h(t)·σ`.
//!
//! User-facing frequencies are ordinary frequencies in kHz. Internally every
//! frequency is multiplied by 2π, so fields are in rad/ms and times in ms.
//! Quantities expressed in reduced time `τ = t/T` depend only on frequency
//! ratios and are unaffected by this convention.

use crate::error::{invalid, Error, Result};
use crate::linalg::Mat2;
use crate::scalar::Real;
use crate::special;

/// Default absolute tolerance for the accumulated-phase quadrature (rad).
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Relative threshold below which `|h|` is treated as an exact degeneracy.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// Effective field `h = (hx, hy, hz)` in rad/ms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldVector<T> {
    pub hx: T,
    pub hy: T,
    pub hz: T,
}

impl<T: Real> FieldVector<T> {
    pub fn magnitude(&self) -> T {
        (self.hx * self.hx + self.hy * self.hy + self.hz * self.hz).sqrt()
    }

    /// Components as ordinary frequencies in kHz.
    pub fn in_khz(&self) -> Self {
        let s = T::one() / T::TAU();
        Self {
            hx: self.hx * s,
            hy: self.hy * s,
            hz: self.hz * s,
        }
    }
}

/// The five drive parameters of an XZ dual-dressing scenario.
///
/// `omega`, `omega0z`, `omega_x`, `omega_z` are ordinary frequencies in kHz;
/// `phi0z` is in radians and normalised to `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveParams<T> {
    omega: T,
    omega0z: T,
    omega_x: T,
    omega_z: T,
    phi0z: T,
}

fn check_finite<T: Real>(name: &'static str, v: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(name, format!("must be finite, got {v}")))
    }
}

impl<T: Real> DriveParams<T> {
    pub fn new(omega: T, omega0z: T, omega_x: T, omega_z: T, phi0z: T) -> Result<Self> {
        let omega = check_finite("omega", omega)?;
        let omega0z = check_finite("omega0z", omega0z)?;
        let omega_x = check_finite("omega_x", omega_x)?;
        let omega_z = check_finite("omega_z", omega_z)?;
        let phi0z = check_finite("phi0z", phi0z)?;
        if omega <= T::zero() {
            return Err(invalid("omega", format!("drive frequency must be > 0, got {omega}")));
        }
        for (name, v) in [("omega0z", omega0z), ("omega_x", omega_x), ("omega_z", omega_z)] {
            if v < T::zero() {
                return Err(invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        let mut phi = phi0z % T::TAU();
        if phi < T::zero() {
            phi += T::TAU();
        }
        if phi >= T::TAU() {
            phi = T::zero();
        }
        Ok(Self {
            omega,
            omega0z,
            omega_x,
            omega_z,
            phi0z: phi,
        })
    }

    /// Builds parameters the way figure captions quote them: four
    /// frequencies in kHz and the relative phase in units of π.
    pub fn from_caption(omega: T, omega0z: T, omega_x: T, omega_z: T, phi_over_pi: T) -> Result<Self> {
        Self::new(omega, omega0z, omega_x, omega_z, phi_over_pi * T::PI())
    }

    pub fn omega(&self) -> T {
        self.omega
    }
    pub fn omega0z(&self) -> T {
        self.omega0z
    }
    pub fn omega_x(&self) -> T {
        self.omega_x
    }
    pub fn omega_z(&self) -> T {
        self.omega_z
    }
    pub fn phi0z(&self) -> T {
        self.phi0z
    }

    pub fn with_omega(self, v: T) -> Result<Self> {
        Self::new(v, self.omega0z, self.omega_x, self.omega_z, self.phi0z)
    }
    pub fn with_omega0z(self, v: T) -> Result<Self> {
        Self::new(self.omega, v, self.omega_x, self.omega_z, self.phi0z)
    }
    pub fn with_omega_x(self, v: T) -> Result<Self> {
        Self::new(self.omega, self.omega0z, v, self.omega_z, self.phi0z)
    }
    pub fn with_omega_z(self, v: T) -> Result<Self> {
        Self::new(self.omega, self.omega0z, self.omega_x, v, self.phi0z)
    }
    pub fn with_phi0z(self, v: T) -> Result<Self> {
        Self::new(self.omega, self.omega0z, self.omega_x, self.omega_z, v)
    }

    /// Multiplies all four frequencies by `c > 0`.
    pub fn scaled(self, c: T) -> Result<Self> {
        Self::new(
            self.omega * c,
            self.omega0z * c,
            self.omega_x * c,
            self.omega_z * c,
            self.phi0z,
        )
    }

    /// Compares `ω·√(Ωx² + Ωz²)` with `ω₀z²`; equality counts as nonadiabatic.
    pub fn classify_adiabaticity(&self) -> AdiabaticityClass<T> {
        let drive_product = self.omega * self.omega_x.hypot(self.omega_z);
        let splitting_squared = self.omega0z * self.omega0z;
        let regime = if drive_product < splitting_squared {
            Regime::Adiabatic
        } else {
            Regime::Nonadiabatic
        };
        AdiabaticityClass {
            regime,
            drive_product,
            splitting_squared,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Adiabatic,
    Nonadiabatic,
}

/// Outcome of the LZSM adiabaticity criterion, with both compared magnitudes
/// in kHz².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdiabaticityClass<T> {
    pub regime: Regime,
    pub drive_product: T,
    pub splitting_squared: T,
}

/// A time-periodic effective field driving the qubit.
pub trait DriveField<T: Real>: Send + Sync {
    /// Effective field at time `t` (ms), rad/ms.
    fn field(&self, t: T) -> FieldVector<T>;

    /// Time derivative of the field, rad/ms².
    fn field_rate(&self, t: T) -> FieldVector<T>;

    /// Angular drive frequency ω in rad/ms.
    fn drive_angular(&self) -> T;

    /// Largest angular frequency of the scenario; sets the degeneracy scale.
    fn frequency_scale(&self) -> T;

    /// Drive period `T = 2π/ω` in ms.
    fn period(&self) -> T {
        T::TAU() / self.drive_angular()
    }

    fn reduced_time(&self, t: T) -> T {
        t / self.period()
    }

    fn time_from_reduced(&self, tau: T) -> T {
        tau * self.period()
    }

    /// `H(t) = ½ h(t)·σ`.
    fn hamiltonian(&self, t: T) -> Mat2<T> {
        let h = self.field(t);
        let half = T::lit(0.5);
        Mat2::from_pauli(T::zero(), h.hx * half, h.hy * half, h.hz * half)
    }

    /// Dressed Larmor frequency `Ω_Ld(t) = |h(t)|`, rad/ms.
    fn dressed_larmor(&self, t: T) -> T {
        self.field(t).magnitude()
    }

    /// Instantaneous eigenvalues `(E₊, E₋) = (Ω_Ld/2, −Ω_Ld/2)`.
    fn eigenvalues(&self, t: T) -> (T, T) {
        let e = self.dressed_larmor(t) * T::lit(0.5);
        (e, -e)
    }

    fn degeneracy_threshold(&self) -> T {
        T::lit(DEGENERACY_THRESHOLD) * self.frequency_scale()
    }

    /// Field at `t`, or a degenerate-field error when `|h|` is below threshold.
    fn nondegenerate_field(&self, t: T) -> Result<FieldVector<T>> {
        let h = self.field(t);
        let mag = h.magnitude();
        if mag < self.degeneracy_threshold() {
            Err(Error::DegenerateField {
                t: t.as_f64(),
                magnitude: mag.as_f64(),
            })
        } else {
            Ok(h)
        }
    }

    /// Principal value of `θ(t) = atan2(hx, hz)` in `(−π, π]`.
    fn orientation_angle(&self, t: T) -> Result<T> {
        let h = self.nondegenerate_field(t)?;
        Ok(h.hx.atan2(h.hz))
    }

    /// `dθ/dt` from the analytic field derivative, rad/ms.
    fn orientation_rate(&self, t: T) -> Result<T> {
        let h = self.nondegenerate_field(t)?;
        let dh = self.field_rate(t);
        let h2 = h.hx * h.hx + h.hz * h.hz;
        Ok((dh.hx * h.hz - h.hx * dh.hz) / h2)
    }

    /// `θ` sampled along increasing `times`, unwrapped to remove ±2π jumps.
    fn orientation_path(&self, times: &[T]) -> Result<Vec<T>> {
        let mut out: Vec<T> = Vec::with_capacity(times.len());
        for &t in times {
            let raw = self.orientation_angle(t)?;
            let v = match out.last() {
                Some(&prev) => unwrap_near(raw, prev),
                None => raw,
            };
            out.push(v);
        }
        Ok(out)
    }

    /// `φ(t) = ∫₀ᵗ Ω_Ld dt'` to absolute tolerance `quad_tol` (rad).
    fn accumulated_phase(&self, t: T, quad_tol: T) -> T {
        self.phase_between(T::zero(), t, quad_tol)
    }

    /// `∫_{t0}^{t1} Ω_Ld dt`, integrated period by period.
    fn phase_between(&self, t0: T, t1: T, quad_tol: T) -> T {
        if t0 == t1 {
            return T::zero();
        }
        let (lo, hi, sign) = if t1 > t0 { (t0, t1, T::one()) } else { (t1, t0, -T::one()) };
        let chunk = self.period() * T::lit(0.5);
        let pieces = ((hi - lo) / chunk).ceil().max(T::one());
        let n = pieces.to_usize().unwrap_or(1).max(1);
        let step = (hi - lo) / T::from_usize_lossy(n);
        let tol = quad_tol / T::from_usize_lossy(n);
        let total: T = (0..n)
            .map(|k| {
                let a = lo + step * T::from_usize_lossy(k);
                let b = if k + 1 == n { hi } else { a + step };
                special::integrate(|s| self.dressed_larmor(s), a, b, tol).0
            })
            .sum();
        total * sign
    }

    /// Cumulative phase `φ(t_i)` on an increasing grid.
    fn phase_on_grid(&self, times: &[T], quad_tol: T) -> Vec<T> {
        let mut out = Vec::with_capacity(times.len());
        if times.is_empty() {
            return out;
        }
        let per_step = quad_tol / T::from_usize_lossy(times.len());
        let mut acc = self.accumulated_phase(times[0], per_step);
        out.push(acc);
        for w in times.windows(2) {
            acc += self.phase_between(w[0], w[1], per_step);
            out.push(acc);
        }
        out
    }
}

/// Returns the representative of `angle` (mod 2π) closest to `reference`.
pub(crate) fn unwrap_near<T: Real>(angle: T, reference: T) -> T {
    let turns = ((reference - angle) / T::TAU()).round();
    angle + turns * T::TAU()
}

impl<T: Real> DriveField<T> for DriveParams<T> {
    fn field(&self, t: T) -> FieldVector<T> {
        let w = T::TAU() * self.omega;
        FieldVector {
            hx: T::TAU() * self.omega_x * (w * t).cos(),
            hy: T::zero(),
            hz: T::TAU() * (self.omega0z + self.omega_z * (w * t + self.phi0z).cos()),
        }
    }

    fn field_rate(&self, t: T) -> FieldVector<T> {
        let w = T::TAU() * self.omega;
        FieldVector {
            hx: -T::TAU() * self.omega_x * w * (w * t).sin(),
            hy: T::zero(),
            hz: -T::TAU() * self.omega_z * w * (w * t + self.phi0z).sin(),
        }
    }

    fn drive_angular(&self) -> T {
        T::TAU() * self.omega
    }

    fn frequency_scale(&self) -> T {
        T::TAU() * self.omega.max(self.omega0z).max(self.omega_x).max(self.omega_z)
    }
}
