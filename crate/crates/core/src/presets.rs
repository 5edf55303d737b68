//! Named configurations shipped as JSON files under `presets/`.

use serde::{Deserialize, Serialize};

use crate::camera::CameraConfig;
use crate::error::{Error, Result};
use crate::lattice::LatticeConfig;
use crate::profile::ProfileSpec;

const BUTTERY: &str = include_str!("../presets/buttery.json");
const PANTHEON: &str = include_str!("../presets/pantheon.json");

pub const PRESET_NAMES: [&str; 2] = ["buttery", "pantheon"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub lattice: LatticeConfig,
    /// Barrel length in rows, m′. For a capsule this fixes the half-length
    /// of the straight section to m′·step·R, where step is the azimuth step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrel_rows: Option<u32>,
    pub camera: CameraConfig,
}

impl Preset {
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match name {
            "buttery" => BUTTERY,
            "pantheon" => PANTHEON,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown preset '{other}' (available: {})",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        Preset::from_json(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut p: Preset = serde_json::from_str(text).map_err(|e| Error::parse("preset JSON", e))?;
        p.resolve()?;
        Ok(p)
    }

    fn resolve(&mut self) -> Result<()> {
        if let Some(rows) = self.barrel_rows {
            let step = self.lattice.azimuth_step();
            match &mut self.lattice.profile {
                ProfileSpec::Capsule { radius, half_length } => {
                    let derived = rows as f64 * step * *radius;
                    if *half_length != 0.0 && (*half_length - derived).abs() > 1e-12 * *radius {
                        return Err(Error::InvalidConfig(format!(
                            "half_length {} disagrees with barrel_rows {rows} (which gives {derived})",
                            half_length
                        )));
                    }
                    *half_length = derived;
                }
                _ => return Err(Error::InvalidConfig("barrel_rows applies to capsule profiles only".into())),
            }
        }
        self.lattice.validate()?;
        self.camera.to_model(self.lattice.profile.scale())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{generate_lattice, SurfaceMode};
    use std::f64::consts::PI;

    #[test]
    fn buttery_barrel_from_rows() {
        let p = Preset::builtin("buttery").unwrap();
        let ProfileSpec::Capsule { radius, half_length } = p.lattice.profile else {
            panic!("capsule expected");
        };
        assert_eq!(half_length / radius, 2.0 * PI / 11.0);
        assert_eq!(p.camera.h_over_r, 1.2);
        let l = generate_lattice(&p.lattice).unwrap();
        assert_eq!(l.rows().len() - 1, 15);
    }

    #[test]
    fn pantheon() {
        let p = Preset::builtin("pantheon").unwrap();
        assert_eq!(p.lattice.mode, SurfaceMode::Dome);
        assert_eq!(p.lattice.coffers_per_row, 28);
        let l = generate_lattice(&p.lattice).unwrap();
        assert_eq!(l.vertices().iter().filter(|v| v.m == 0).count(), 28);
    }

    #[test]
    fn bad_presets() {
        assert!(Preset::builtin("parthenon").is_err());
        let t = BUTTERY.replace("\"radius\": 1.0 }", "\"radius\": 1.0, \"half_length\": 0.5 }");
        assert!(matches!(Preset::from_json(&t), Err(Error::InvalidConfig(_))));
        let t = PANTHEON.replace("\"camera\"", "\"barrel_rows\": 1, \"camera\"");
        assert!(Preset::from_json(&t).is_err());
    }
}
