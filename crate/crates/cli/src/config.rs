//! JSON scenario configuration and its validation.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use xz_dressing::linalg::SpinState;
use xz_dressing::presets;
use xz_dressing::{DetectionAxis, DriveParams, Method, RotatingXzParams, Scenario, Tolerances};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Xz,
    /// Circularly rotating drive: `omega_x_khz` is the common amplitude Ω.
    RotatingXz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    SigmaXPlus,
    /// `[[re, im], [re, im]]` for the up and down amplitudes; normalised on use.
    Custom([[f64; 2]; 2]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Exact,
    Adiabatic,
    Floquet1,
    Floquet2,
}

impl MethodName {
    pub fn method(self) -> Method {
        match self {
            MethodName::Exact => Method::Exact,
            MethodName::Adiabatic => Method::Adiabatic,
            MethodName::Floquet1 => Method::Floquet1,
            MethodName::Floquet2 => Method::Floquet2,
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(MethodName::Exact),
            "adiabatic" => Ok(MethodName::Adiabatic),
            "floquet1" => Ok(MethodName::Floquet1),
            "floquet2" => Ok(MethodName::Floquet2),
            other => Err(CliError::Config(format!(
                "unknown method `{other}` (expected exact, adiabatic, floquet1 or floquet2)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    X,
    Y,
}

impl AxisName {
    pub fn axis(self) -> DetectionAxis {
        match self {
            AxisName::X => DetectionAxis::X,
            AxisName::Y => DetectionAxis::Y,
        }
    }
}

/// Config file as written by the user. Frequencies are ordinary kHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Fills any frequency left out with the named preset's value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default = "default_kind")]
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub omega_khz: Option<f64>,
    #[serde(default)]
    pub omega0z_khz: Option<f64>,
    #[serde(default)]
    pub omega_x_khz: Option<f64>,
    #[serde(default)]
    pub omega_z_khz: Option<f64>,
    #[serde(default)]
    pub phi0z_over_pi: Option<f64>,
    #[serde(default = "default_initial")]
    pub initial_state: InitialState,
    #[serde(default = "default_span")]
    pub t_span_tau: [f64; 2],
    #[serde(default = "default_spp")]
    pub samples_per_period: usize,
    #[serde(default = "default_method")]
    pub method: MethodName,
    #[serde(default = "default_axis")]
    pub detection_axis: AxisName,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
}

fn default_kind() -> ScenarioKind {
    ScenarioKind::Xz
}
fn default_initial() -> InitialState {
    InitialState::SigmaXPlus
}
fn default_span() -> [f64; 2] {
    [0.0, 10.0]
}
fn default_spp() -> usize {
    xz_dressing::propagator::DEFAULT_SAMPLES_PER_PERIOD
}
fn default_method() -> MethodName {
    MethodName::Exact
}
fn default_axis() -> AxisName {
    AxisName::X
}
fn default_rtol() -> f64 {
    1e-10
}
fn default_atol() -> f64 {
    1e-12
}

impl ScenarioConfig {
    /// Config with every field at its default and the preset's frequencies.
    pub fn from_preset(name: &str) -> CliResult<Self> {
        let mut cfg: ScenarioConfig = serde_json::from_str("{}").expect("defaults deserialize");
        cfg.preset = Some(name.to_string());
        cfg.resolve_preset()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let mut cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config JSON: {e}")))?;
        cfg.resolve_preset()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn resolve_preset(&mut self) -> CliResult<()> {
        let Some(name) = &self.preset else {
            return Ok(());
        };
        let p = presets::find(name).ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?;
        self.omega_khz.get_or_insert(p.omega);
        self.omega0z_khz.get_or_insert(p.omega0z);
        self.omega_x_khz.get_or_insert(p.omega_x);
        self.omega_z_khz.get_or_insert(p.omega_z);
        self.phi0z_over_pi.get_or_insert(p.phi_over_pi);
        Ok(())
    }

    /// Sets one frequency or phase field by its config key.
    pub fn set_param(&mut self, key: &str, value: f64) -> CliResult<()> {
        let slot = match key {
            "omega_khz" => &mut self.omega_khz,
            "omega0z_khz" => &mut self.omega0z_khz,
            "omega_x_khz" => &mut self.omega_x_khz,
            "omega_z_khz" => &mut self.omega_z_khz,
            "phi0z_over_pi" => &mut self.phi0z_over_pi,
            other => {
                return Err(CliError::Config(format!(
                    "`{other}` is not a sweepable parameter (omega_khz, omega0z_khz, omega_x_khz, omega_z_khz, phi0z_over_pi)"
                )))
            }
        };
        *slot = Some(value);
        Ok(())
    }

    fn required(&self, name: &str, v: Option<f64>) -> CliResult<f64> {
        v.ok_or_else(|| CliError::Config(format!("missing `{name}` (give it or a `preset`)")))
    }

    /// Checks every field and builds the run description.
    pub fn validate(&self) -> CliResult<ValidatedRun> {
        let omega = self.required("omega_khz", self.omega_khz)?;
        let omega0z = self.required("omega0z_khz", self.omega0z_khz)?;
        let omega_x = self.required("omega_x_khz", self.omega_x_khz)?;
        let phi = self.phi0z_over_pi.unwrap_or(0.0);
        let scenario: Scenario<f64> = match self.scenario {
            ScenarioKind::Xz => {
                let omega_z = self.required("omega_z_khz", self.omega_z_khz)?;
                DriveParams::from_caption(omega, omega0z, omega_x, omega_z, phi)?.into()
            }
            ScenarioKind::RotatingXz => {
                if let Some(oz) = self.omega_z_khz {
                    if oz != omega_x {
                        return Err(CliError::Config(format!(
                            "rotating_xz needs omega_z_khz = omega_x_khz, got {oz} and {omega_x}"
                        )));
                    }
                }
                RotatingXzParams::new(omega, omega0z, omega_x, phi * std::f64::consts::PI)?.into()
            }
        };
        let [t0, t1] = self.t_span_tau;
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(CliError::Config(format!("t_span_tau must satisfy start < end, got [{t0}, {t1}]")));
        }
        if self.samples_per_period < 2 {
            return Err(CliError::Config("samples_per_period must be at least 2".to_string()));
        }
        if matches!(self.method, MethodName::Floquet1 | MethodName::Floquet2) && self.scenario != ScenarioKind::Xz {
            return Err(CliError::Config("floquet methods need scenario `xz`".to_string()));
        }
        let tolerances = Tolerances::new(self.rtol, self.atol)?;
        let psi0 = match &self.initial_state {
            InitialState::SigmaXPlus => SpinState::sigma_x_plus(),
            InitialState::Custom([[ur, ui], [dr, di]]) => {
                let s = SpinState::new(Complex::new(*ur, *ui), Complex::new(*dr, *di));
                let n = s.norm_sqr();
                if !(n > 0.0 && n.is_finite()) {
                    return Err(CliError::Config("initial_state amplitudes must be finite and nonzero".to_string()));
                }
                s.normalized()
            }
        };
        Ok(ValidatedRun {
            scenario,
            psi0,
            tau_span: (t0, t1),
            samples_per_period: self.samples_per_period,
            method: self.method,
            axis: self.detection_axis.axis(),
            tolerances,
        })
    }
}

/// A config that passed validation.
#[derive(Clone, Debug)]
pub struct ValidatedRun {
    pub scenario: Scenario<f64>,
    pub psi0: SpinState<f64>,
    pub tau_span: (f64, f64),
    pub samples_per_period: usize,
    pub method: MethodName,
    pub axis: DetectionAxis,
    pub tolerances: Tolerances<f64>,
}
