//! 2×2 complex matrices and two-component spinors.
//!
//! Everything a single qubit needs: Pauli algebra, commutators and closed-form
//! exponentials of Hermitian generators via the Pauli decomposition.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Dense 2×2 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

#[inline]
fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

impl<T: Real> Mat2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, cc: Complex<T>, d: Complex<T>) -> Self {
        Self { m: [[a, b], [cc, d]] }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let (o, z) = (c(T::one(), T::zero()), c(T::zero(), T::zero()));
        Self::new(o, z, z, o)
    }

    pub fn sigma_x() -> Self {
        let (o, z) = (c(T::one(), T::zero()), c(T::zero(), T::zero()));
        Self::new(z, o, o, z)
    }

    pub fn sigma_y() -> Self {
        let z = c(T::zero(), T::zero());
        Self::new(z, c(T::zero(), -T::one()), c(T::zero(), T::one()), z)
    }

    pub fn sigma_z() -> Self {
        let (o, z) = (c(T::one(), T::zero()), c(T::zero(), T::zero()));
        Self::new(o, z, z, -o)
    }

    /// Raising operator |↑⟩⟨↓|.
    pub fn sigma_plus() -> Self {
        let (o, z) = (c(T::one(), T::zero()), c(T::zero(), T::zero()));
        Self::new(z, o, z, z)
    }

    /// Lowering operator |↓⟩⟨↑|.
    pub fn sigma_minus() -> Self {
        let (o, z) = (c(T::one(), T::zero()), c(T::zero(), T::zero()));
        Self::new(z, z, o, z)
    }

    /// `a0·1 + ax·σx + ay·σy + az·σz` with real coefficients.
    pub fn from_pauli(a0: T, ax: T, ay: T, az: T) -> Self {
        Self::new(c(a0 + az, T::zero()), c(ax, -ay), c(ax, ay), c(a0 - az, T::zero()))
    }

    /// Diagonal matrix `diag(a, b)`.
    pub fn diag(a: Complex<T>, b: Complex<T>) -> Self {
        let z = c(T::zero(), T::zero());
        Self::new(a, z, z, b)
    }

    /// Complex Pauli coefficients `(tr M, tr Mσx, tr Mσy, tr Mσz) / 2`.
    pub fn pauli_components(&self) -> [Complex<T>; 4] {
        let half = T::lit(0.5);
        let [[a, b], [cc, d]] = self.m;
        [
            (a + d) * half,
            (b + cc) * half,
            (b - cc) * c(T::zero(), half),
            (a - d) * half,
        ]
    }

    pub fn adjoint(&self) -> Self {
        let [[a, b], [cc, d]] = self.m;
        Self::new(a.conj(), cc.conj(), b.conj(), d.conj())
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for e in row.iter_mut() {
                *e = *e * s;
            }
        }
        out
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(c(s, T::zero()))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entry-wise modulus.
    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .map(|e| e.norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }

    /// Entry-wise distance from Hermiticity, `max |M − M†|`.
    pub fn hermiticity_error(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// Entry-wise distance from unitarity, `max |M†M − 1|`.
    pub fn unitarity_error(&self) -> T {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    /// `exp(−i·M)` for Hermitian `M`, evaluated in closed form.
    ///
    /// With `M = a0 + a·σ`, `exp(−iM) = e^{−i a0} (cos|a| − i sin|a| â·σ)`.
    /// Only the Hermitian part of `M` is used.
    pub fn exp_neg_i(&self) -> Self {
        let [a0, ax, ay, az] = self.pauli_components();
        let (a0, ax, ay, az) = (a0.re, ax.re, ay.re, az.re);
        let r = (ax * ax + ay * ay + az * az).sqrt();
        let (cos_r, sinc) = if r > T::epsilon() {
            (r.cos(), r.sin() / r)
        } else {
            // sin(r)/r = 1 − r²/6 + …
            (T::one() - r * r * T::lit(0.5), T::one() - r * r / T::lit(6.0))
        };
        let rot = Self::new(
            c(cos_r, -sinc * az),
            c(-sinc * ay, -sinc * ax),
            c(sinc * ay, -sinc * ax),
            c(cos_r, sinc * az),
        );
        rot.scale(Complex::from_polar(T::one(), -a0))
    }

    /// Spin rotation `exp(−i·angle·σy/2)`.
    pub fn rotation_y(angle: T) -> Self {
        let half = angle * T::lit(0.5);
        let (s, co) = (half.sin(), half.cos());
        Self::new(c(co, T::zero()), c(-s, T::zero()), c(s, T::zero()), c(co, T::zero()))
    }

    /// Spin rotation `exp(−i·angle·σz/2)`.
    pub fn rotation_z(angle: T) -> Self {
        let half = angle * T::lit(0.5);
        Self::diag(
            Complex::from_polar(T::one(), -half),
            Complex::from_polar(T::one(), half),
        )
    }

    pub fn apply(&self, psi: &SpinState<T>) -> SpinState<T> {
        SpinState {
            c_up: self.m[0][0] * psi.c_up + self.m[0][1] * psi.c_down,
            c_down: self.m[1][0] * psi.c_up + self.m[1][1] * psi.c_down,
        }
    }

    /// Matrix whose columns are the two given states.
    pub fn from_columns(first: &SpinState<T>, second: &SpinState<T>) -> Self {
        Self::new(first.c_up, second.c_up, first.c_down, second.c_down)
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.m, rhs.m);
        let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self { m: out }
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][j] + rhs.m[i][j];
            }
        }
        out
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale_real(-T::one())
    }
}

impl<T: Real> std::iter::Sum for Mat2<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, m| acc + m)
    }
}

/// Pure qubit state in the σz eigenbasis, `c_up|↑⟩ + c_down|↓⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState<T> {
    pub c_up: Complex<T>,
    pub c_down: Complex<T>,
}

impl<T: Real> SpinState<T> {
    pub fn new(c_up: Complex<T>, c_down: Complex<T>) -> Self {
        Self { c_up, c_down }
    }

    pub fn up() -> Self {
        Self::new(c(T::one(), T::zero()), c(T::zero(), T::zero()))
    }

    pub fn down() -> Self {
        Self::new(c(T::zero(), T::zero()), c(T::one(), T::zero()))
    }

    /// The +1 eigenstate of σx, `(|↑⟩ + |↓⟩)/√2`.
    pub fn sigma_x_plus() -> Self {
        let a = T::FRAC_1_SQRT_2();
        Self::new(c(a, T::zero()), c(a, T::zero()))
    }

    pub fn norm_sqr(&self) -> T {
        self.c_up.norm_sqr() + self.c_down.norm_sqr()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self::new(self.c_up / n, self.c_down / n)
    }

    /// `⟨a|b⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.c_up.conj() * other.c_up + self.c_down.conj() * other.c_down
    }

    /// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
    pub fn bloch(&self) -> [T; 3] {
        let coh = self.c_up.conj() * self.c_down;
        let two = T::lit(2.0);
        [
            two * coh.re,
            two * coh.im,
            self.c_up.norm_sqr() - self.c_down.norm_sqr(),
        ]
    }
}
