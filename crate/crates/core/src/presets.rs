//! Named parameter sets used in the reference figures.

use crate::error::Result;
use crate::field::DriveParams;
use crate::scalar::Real;

/// Caption tuple: `(ω, ω₀z, Ωx, Ωz)` in kHz and `Φ₀z` in units of π.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub omega: f64,
    pub omega0z: f64,
    pub omega_x: f64,
    pub omega_z: f64,
    pub phi_over_pi: f64,
    pub summary: &'static str,
}

impl Preset {
    pub fn params<T: Real>(&self) -> Result<DriveParams<T>> {
        DriveParams::from_caption(
            T::lit(self.omega),
            T::lit(self.omega0z),
            T::lit(self.omega_x),
            T::lit(self.omega_z),
            T::lit(self.phi_over_pi),
        )
    }
}

const fn preset(
    name: &'static str,
    omega: f64,
    omega0z: f64,
    omega_x: f64,
    omega_z: f64,
    phi_over_pi: f64,
    summary: &'static str,
) -> Preset {
    Preset {
        name,
        omega,
        omega0z,
        omega_x,
        omega_z,
        phi_over_pi,
        summary,
    }
}

pub const PRESETS: [Preset; 9] = [
    preset("fig2a", 3.0, 77.645, 2.06, 2.0, 0.0, "weak dressing, adiabatic, near-constant precession"),
    preset("fig2b", 3.0, 77.645, 53.1, 146.9, 0.5, "strong dressing at high Larmor frequency"),
    preset("fig2c", 1.028, 4.42, 6.27, 31.79, 0.70, "LZSM regime with trace revivals"),
    preset("fig3", 1.028, 4.42, 3.85, 20.93, 1.63, "nonadiabatic LZSM, Floquet comparison"),
    preset("fig4a", 1.028, 4.42, 3.85, 20.93, 1.63, "dressed-frequency overlay, same as fig3"),
    preset("fig4b", 3.0, 77.645, 51.56, 96.77, 0.5, "dressed-frequency overlay, high Larmor frequency"),
    preset("fig4c", 1.03, 4.66, 4.55, 35.3, 0.0, "dressed-frequency overlay, zero relative phase"),
    preset("fig4d", 1.028, 4.42, 6.27, 31.79, 0.70, "dressed-frequency overlay with gaps, same as fig2c"),
    preset("fig5", 1.0, 4.197, 0.254, 4.189, 1.0, "slow Rabi-like oscillation of the occupation"),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Transcribed independently from the figure captions.
    const TABLE: &str = "\
fig2a 3.0 77.645 2.06 2.0 0
fig2b 3.0 77.645 53.1 146.9 0.5
fig2c 1.028 4.42 6.27 31.79 0.70
fig3 1.028 4.42 3.85 20.93 1.63
fig4a 1.028 4.42 3.85 20.93 1.63
fig4b 3.0 77.645 51.56 96.77 0.5
fig4c 1.03 4.66 4.55 35.3 0
fig4d 1.028 4.42 6.27 31.79 0.70
fig5 1.0 4.197 0.254 4.189 1";

    #[test]
    fn presets_match_caption_table() {
        let rows: Vec<Vec<&str>> = TABLE.lines().map(|l| l.split_whitespace().collect()).collect();
        assert_eq!(rows.len(), PRESETS.len());
        for (row, p) in rows.iter().zip(PRESETS.iter()) {
            assert_eq!(row[0], p.name);
            let nums: Vec<f64> = row[1..].iter().map(|s| s.parse().unwrap()).collect();
            assert_eq!(nums, vec![p.omega, p.omega0z, p.omega_x, p.omega_z, p.phi_over_pi]);
        }
    }

    #[test]
    fn lookup_and_conversion() {
        let p = find("FIG2C").unwrap().params::<f64>().unwrap();
        assert!((p.phi0z() - 0.7 * PI).abs() < 1e-15);
        assert_eq!(p.omega_z(), 31.79);
        assert!(find("fig9").is_none());
    }
}
