//! Qubit dynamics under XZ dual dressing.
//!
//! The core math is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! bottom of this file fix the scalar to `f64` for everyday use.

pub mod adiabatic;
pub mod analysis;
pub mod error;
pub mod field;
pub mod floquet;
pub mod integrator;
pub mod linalg;
pub mod presets;
pub mod propagator;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use field::{AdiabaticityClass, DriveField, DriveParams, FieldVector, Regime};
pub use adiabatic::RotatingXzParams;
pub use integrator::Tolerances;
pub use linalg::{Mat2, SpinState};
pub use propagator::{BlochSample, DetectionAxis, Method, Scenario, Trajectory};
pub use scalar::Real;

pub type DriveParamsF64 = DriveParams<f64>;
pub type DriveParamsF32 = DriveParams<f32>;
pub type Mat2F64 = Mat2<f64>;
pub type SpinStateF64 = SpinState<f64>;
pub type RotatingXzParamsF64 = RotatingXzParams<f64>;
pub type TrajectoryF64 = Trajectory<f64>;
pub type TolerancesF64 = Tolerances<f64>;
