//! Rotating-frame Floquet model for the low-frequency nonadiabatic regime.
//!
//! The frame `W(t) = V(t)V′(t) = exp(−iχ(t)σz/2)`, with
//! `χ = rωt + (Ωz/ω)[sin(ωt+Φ₀z) − sin Φ₀z]`, removes the longitudinal drive
//! and the nearest harmonic `rω` of the Larmor frequency. What remains is
//!
//! ```text
//! H″(t) = δ/2 σz + Ωx/4 [f(t) σ₊ + f*(t) σ₋],   f(t) = 2 cos(ωt) e^{iχ(t)}
//! ```
//!
//! whose Fourier components have closed Bessel-function forms. A high-frequency
//! expansion then gives an effective Hamiltonian and a kick operator.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::field::{DriveField, DriveParams};
use crate::linalg::{Mat2, SpinState};
use crate::propagator::{Method, RunRecord, Scenario, Trajectory};
use crate::scalar::Real;
use crate::special::BesselTable;

/// Bessel tail size below which the truncation is considered converged.
const TAIL_EPS: f64 = 1e-17;

/// Harmonic `r`, detuning `δ = ω₀z − rω` (kHz) and truncation order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameSpec<T> {
    pub r: i64,
    pub delta: T,
    pub n_max: usize,
}

impl<T: Real> FrameSpec<T> {
    /// Nearest harmonic and an automatic truncation order.
    ///
    /// `n_max` is at least `ceil(Ωz/ω) + 20` and is extended until the Bessel
    /// sidebands that feed the outermost component are below `1e-17`.
    pub fn for_params(p: &DriveParams<T>) -> Result<Self> {
        let ratio = p.omega0z() / p.omega();
        let r = ratio.round().to_i64().unwrap_or(0);
        let z = p.omega_z() / p.omega();
        let base = z.ceil().to_usize().unwrap_or(0) + 20;
        // First order past z whose Bessel value is negligible.
        let reach = base + 40;
        let table = crate::special::bessel_j_orders(reach, z);
        let start = z.ceil().to_usize().unwrap_or(0);
        let tail = (start..=reach)
            .find(|&k| table[k].abs() < T::lit(TAIL_EPS))
            .unwrap_or(reach);
        let needed = tail + r.unsigned_abs() as usize + 1;
        Self::with_n_max(p, r, base.max(needed))
    }

    /// Explicit harmonic and truncation, validated.
    pub fn with_n_max(p: &DriveParams<T>, r: i64, n_max: usize) -> Result<Self> {
        if r < 1 {
            return Err(invalid(
                "r",
                format!("resonance harmonic must be >= 1 (omega0z/omega = {})", p.omega0z() / p.omega()),
            ));
        }
        if n_max < r as usize + 1 {
            return Err(invalid("n_max", format!("must be >= r + 1 = {}", r + 1)));
        }
        let delta = p.omega0z() - T::from_i64_lossy(r) * p.omega();
        if delta.abs() > p.omega() * T::lit(0.5) {
            return Err(invalid("r", format!("harmonic {r} is not the nearest one")));
        }
        Ok(Self { r, delta, n_max })
    }
}

fn cis<T: Real>(phase: T) -> Complex<T> {
    Complex::from_polar(T::one(), phase)
}

/// Frame angle `χ(t)` (rad).
pub fn frame_angle<T: Real>(p: &DriveParams<T>, spec: &FrameSpec<T>, t: T) -> T {
    let wt = p.drive_angular() * t;
    let z = p.omega_z() / p.omega();
    T::from_i64_lossy(spec.r) * wt + z * ((wt + p.phi0z()).sin() - p.phi0z().sin())
}

/// `V(t) = exp(−i rωt σz/2)`.
pub fn frame_transform_v<T: Real>(p: &DriveParams<T>, spec: &FrameSpec<T>, t: T) -> Mat2<T> {
    Mat2::rotation_z(T::from_i64_lossy(spec.r) * p.drive_angular() * t)
}

/// `V′(t) = exp(−i (Ωz/2ω)[sin(ωt+Φ₀z) − sin Φ₀z] σz)`.
pub fn frame_transform_vprime<T: Real>(p: &DriveParams<T>, t: T) -> Mat2<T> {
    let z = p.omega_z() / p.omega();
    let wt = p.drive_angular() * t;
    Mat2::rotation_z(z * ((wt + p.phi0z()).sin() - p.phi0z().sin()))
}

/// `H″(t)` evaluated directly in the time domain (rad/ms).
pub fn rotating_frame_hamiltonian<T: Real>(p: &DriveParams<T>, spec: &FrameSpec<T>, t: T) -> Mat2<T> {
    let chi = frame_angle(p, spec, t);
    let half = T::lit(0.5);
    let delta = T::TAU() * spec.delta;
    let coupling = T::TAU() * p.omega_x() * (p.drive_angular() * t).cos() * half;
    let off = cis(chi).scale(coupling);
    Mat2::new(
        Complex::new(delta * half, T::zero()),
        off,
        off.conj(),
        Complex::new(-delta * half, T::zero()),
    )
}

/// `f_n`, the Fourier coefficients of `f(t) = 2 cos(ωt) e^{iχ(t)}`.
pub fn fourier_f<T: Real>(p: &DriveParams<T>, spec: &FrameSpec<T>, n: i64) -> Complex<T> {
    let z = p.omega_z() / p.omega();
    let reach = (n.unsigned_abs() as usize + spec.r.unsigned_abs() as usize + 1).max(spec.n_max + spec.r as usize + 1);
    let table = BesselTable::new(reach, z);
    fourier_f_with(&table, p, spec.r, z, n)
}

fn fourier_f_with<T: Real>(table: &BesselTable<T>, p: &DriveParams<T>, r: i64, z: T, n: i64) -> Complex<T> {
    let phi = p.phi0z();
    let up = r + 1;
    let down = r - 1;
    let a = cis(-T::from_i64_lossy(up) * phi).scale(table.get(n - up));
    let b = cis(-T::from_i64_lossy(down) * phi).scale(table.get(n - down));
    (a + b) * cis(T::from_i64_lossy(n) * phi - z * phi.sin())
}

/// Frame-drive ratios that bound the validity of the expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidityRatios<T> {
    /// `Ωx/Ωz`; infinite for `Ωz = 0`.
    pub omega_x_over_omega_z: T,
    /// `|δ|/Ωz`; infinite for `Ωz = 0`.
    pub delta_over_omega_z: T,
}

/// `H_n` for `|n| ≤ n_max`, with `f_n` alongside.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierComponents<T> {
    pub frame: FrameSpec<T>,
    /// Angular drive frequency (rad/ms).
    pub omega: T,
    f: Vec<Complex<T>>,
    h: Vec<Mat2<T>>,
    /// Largest `|f_n|` among the two outermost orders kept.
    pub truncation_tail: T,
    pub validity: ValidityRatios<T>,
}

impl<T: Real> FourierComponents<T> {
    fn index(&self, n: i64) -> Option<usize> {
        let m = self.frame.n_max as i64;
        (n.abs() <= m).then(|| (n + m) as usize)
    }

    /// `H_n`; zero beyond the truncation.
    pub fn h(&self, n: i64) -> Mat2<T> {
        self.index(n).map_or_else(Mat2::zero, |i| self.h[i])
    }

    pub fn f(&self, n: i64) -> Complex<T> {
        self.index(n).map_or(Complex::new(T::zero(), T::zero()), |i| self.f[i])
    }

    pub fn n_max(&self) -> i64 {
        self.frame.n_max as i64
    }

    /// `Σ_n H_n e^{inωt}`.
    pub fn reconstruct(&self, t: T) -> Mat2<T> {
        let m = self.n_max();
        (-m..=m)
            .map(|n| self.h(n).scale(cis(T::from_i64_lossy(n) * self.omega * t)))
            .sum()
    }

    /// `Σ_n f_n e^{inωt}`.
    pub fn reconstruct_f(&self, t: T) -> Complex<T> {
        let m = self.n_max();
        (-m..=m)
            .map(|n| self.f(n) * cis(T::from_i64_lossy(n) * self.omega * t))
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }
}

/// Fourier components of `H″(t)`.
pub fn fourier_h<T: Real>(p: &DriveParams<T>, spec: &FrameSpec<T>) -> FourierComponents<T> {
    let m = spec.n_max as i64;
    let z = p.omega_z() / p.omega();
    let table = BesselTable::new(spec.n_max + spec.r as usize + 1, z);
    let f: Vec<Complex<T>> = (-m..=m).map(|n| fourier_f_with(&table, p, spec.r, z, n)).collect();
    let quarter = T::TAU() * p.omega_x() * T::lit(0.25);
    let half_delta = T::TAU() * spec.delta * T::lit(0.5);
    let h = (-m..=m)
        .map(|n| {
            let fp = f[(n + m) as usize].scale(quarter);
            let fm = f[(m - n) as usize].conj().scale(quarter);
            let d = if n == 0 { half_delta } else { T::zero() };
            Mat2::new(Complex::new(d, T::zero()), fp, fm, Complex::new(-d, T::zero()))
        })
        .collect();
    let tail = f[0].norm().max(f[(2 * m) as usize].norm());
    let inf = T::infinity();
    let validity = if p.omega_z() > T::zero() {
        ValidityRatios {
            omega_x_over_omega_z: p.omega_x() / p.omega_z(),
            delta_over_omega_z: spec.delta.abs() / p.omega_z(),
        }
    } else {
        ValidityRatios {
            omega_x_over_omega_z: inf,
            delta_over_omega_z: inf,
        }
    };
    FourierComponents {
        frame: *spec,
        omega: p.drive_angular(),
        f,
        h,
        truncation_tail: tail,
        validity,
    }
}

/// Order of the high-frequency expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionOrder {
    First,
    Second,
}

impl ExpansionOrder {
    pub fn method(self) -> Method {
        match self {
            ExpansionOrder::First => Method::Floquet1,
            ExpansionOrder::Second => Method::Floquet2,
        }
    }
}

/// Effective Hamiltonian and kick-operator Fourier data.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveModel<T> {
    pub h_eff: Mat2<T>,
    pub order: ExpansionOrder,
    pub frame: FrameSpec<T>,
    pub validity: ValidityRatios<T>,
    omega: T,
    kick_offset: i64,
    kick: Vec<Mat2<T>>,
}

impl<T: Real> EffectiveModel<T> {
    /// `K(t) = Σ_k K_k e^{ikωt}`, Hermitian up to rounding.
    pub fn kick_operator(&self, t: T) -> Mat2<T> {
        self.kick
            .iter()
            .enumerate()
            .filter(|(_, k)| k.max_abs() > T::zero())
            .map(|(i, k)| {
                let n = i as i64 - self.kick_offset;
                k.scale(cis(T::from_i64_lossy(n) * self.omega * t))
            })
            .sum()
    }

    /// Quasienergy splitting of `H_eff` (rad/ms).
    pub fn quasi_splitting(&self) -> T {
        let [_, ax, ay, az] = self.h_eff.pauli_components();
        T::lit(2.0) * (ax.re * ax.re + ay.re * ay.re + az.re * az.re).sqrt()
    }

    /// Rotating-frame propagator `e^{−iK(t)} e^{−iH_eff(t−t₀)} e^{iK(t₀)}`.
    pub fn frame_propagator(&self, t: T, t0: T) -> Mat2<T> {
        let k1 = self.kick_operator(t).exp_neg_i();
        let k0 = (-self.kick_operator(t0)).exp_neg_i();
        let evo = self.h_eff.scale_real(t - t0).exp_neg_i();
        k1 * evo * k0
    }
}

/// Effective Hamiltonian and kick operator to the requested order.
pub fn effective_hamiltonian<T: Real>(fc: &FourierComponents<T>, order: ExpansionOrder) -> EffectiveModel<T> {
    let m = fc.n_max();
    let w = fc.omega;
    let i_unit = Complex::new(T::zero(), T::one());
    let h0 = fc.h(0);
    let mut h_eff = h0;
    let offset = 2 * m;
    let mut kick = vec![Mat2::zero(); (4 * m + 1) as usize];
    let idx = |k: i64| (k + offset) as usize;

    for n in (-m..=m).filter(|&n| n != 0) {
        let nf = T::from_i64_lossy(n);
        kick[idx(n)] = kick[idx(n)] + fc.h(n).scale(-i_unit / (w * nf));
    }
    if order == ExpansionOrder::Second {
        for n in 1..=m {
            let nf = T::from_i64_lossy(n);
            h_eff = h_eff + fc.h(n).commutator(&fc.h(-n)).scale_real(T::one() / (w * nf));
        }
        let w2 = w * w;
        for n in (-m..=m).filter(|&n| n != 0) {
            let hn = fc.h(n);
            if hn.max_abs() == T::zero() {
                continue;
            }
            let nf = T::from_i64_lossy(n);
            kick[idx(n)] = kick[idx(n)] + h0.commutator(&hn).scale(i_unit / (w2 * nf * nf));
            for mm in (-m..=m).filter(|&k| k != 0 && k != n) {
                let hm = fc.h(-mm);
                if hm.max_abs() == T::zero() {
                    continue;
                }
                let denom = T::lit(2.0) * nf * T::from_i64_lossy(n - mm);
                kick[idx(n - mm)] = kick[idx(n - mm)] + hm.commutator(&hn).scale(i_unit / (w2 * denom));
            }
        }
    }
    EffectiveModel {
        h_eff,
        order,
        frame: fc.frame,
        validity: fc.validity,
        omega: w,
        kick_offset: offset,
        kick,
    }
}

/// `W(t) = V(t)V′(t)`.
pub fn frame_transform<T: Real>(p: &DriveParams<T>, spec: &FrameSpec<T>, t: T) -> Mat2<T> {
    Mat2::rotation_z(frame_angle(p, spec, t))
}

/// Lab-frame propagator `U(t, t₀) = W(t) U″(t, t₀) W†(t₀)`.
pub fn lab_propagator<T: Real>(p: &DriveParams<T>, model: &EffectiveModel<T>, t: T, t0: T) -> Mat2<T> {
    let spec = &model.frame;
    frame_transform(p, spec, t) * model.frame_propagator(t, t0) * frame_transform(p, spec, t0).adjoint()
}

/// Trajectory from the Floquet reconstruction; `t_grid[0]` is the preparation time.
pub fn propagate_floquet<T: Real>(
    p: &DriveParams<T>,
    spec: &FrameSpec<T>,
    psi0: SpinState<T>,
    t_grid: Vec<T>,
    order: ExpansionOrder,
) -> Result<Trajectory<T>> {
    let Some(&t0) = t_grid.first() else {
        return Err(invalid("t_grid", "must not be empty".to_string()));
    };
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("t_grid", "must be strictly increasing".to_string()));
    }
    let fc = fourier_h(p, spec);
    let model = effective_hamiltonian(&fc, order);
    let psi0 = psi0.normalized();
    let mut worst = T::zero();
    let states: Vec<SpinState<T>> = t_grid
        .iter()
        .map(|&t| {
            let u = lab_propagator(p, &model, t, t0);
            worst = worst.max(u.unitarity_error());
            u.apply(&psi0)
        })
        .collect();
    log::debug!("floquet reconstruction: max unitarity error {:e}", worst.as_f64());
    let record = RunRecord {
        max_norm_error: states
            .iter()
            .map(|s| (s.norm_sqr() - T::one()).abs())
            .fold(T::zero(), T::max),
        ..RunRecord::default()
    };
    Trajectory::from_states(Scenario::Xz(*p), t_grid, states, order.method(), record)
}
