//! Pinhole camera looking along the axis of a ceiling or dome.
//!
//! The pinhole sits a distance `h` below the base plane on the viewing axis
//! and the image plane a further `f` beyond it. A point at height `d` above
//! the base projects to −f·(transverse coordinates)/(h + d).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CofferLattice, SurfaceMode};

/// Which coordinate the perspective division uses in ceiling mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthConvention {
    /// Divide by h plus the height above the base (y for ceilings, z for
    /// domes): the camera looks along the viewing axis.
    #[default]
    ViewingAxis,
    /// Divide by h + z even for ceilings, where z is the horizontal axis of
    /// revolution. Kept for comparison with published overlays.
    AxialCoordinate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub h: f64,
    pub f: f64,
    pub mode: SurfaceMode,
    pub principal_point: [f64; 2],
    /// In-plane rotation of the image frame, radians.
    pub rotation: f64,
    pub depth: DepthConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelledPoint {
    pub m: i32,
    pub n: i32,
    pub uv: [f64; 2],
}

impl CameraModel {
    pub fn new(h: f64, f: f64, mode: SurfaceMode) -> Result<Self> {
        let cam = CameraModel {
            h,
            f,
            mode,
            principal_point: [0.0, 0.0],
            rotation: 0.0,
            depth: DepthConvention::ViewingAxis,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) || !(self.f > 0.0 && self.f.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "camera needs h > 0 and f > 0, got h = {}, f = {}",
                self.h, self.f
            )));
        }
        Ok(())
    }

    /// Height of `p` above the base along the direction used for the
    /// perspective division, and the two transverse coordinates.
    fn split(&self, p: [f64; 3]) -> (f64, [f64; 2]) {
        let [x, y, z] = p;
        match (self.mode, self.depth) {
            (SurfaceMode::Dome, _) => (z, [x, y]),
            (SurfaceMode::Ceiling, DepthConvention::ViewingAxis) => (y, [x, z]),
            (SurfaceMode::Ceiling, DepthConvention::AxialCoordinate) => (z, [x, z]),
        }
    }

    pub fn project_point(&self, p: [f64; 3]) -> Result<[f64; 2]> {
        let (height, [a, b]) = self.split(p);
        let depth = self.h + height;
        if !(depth > 0.0) {
            return Err(Error::BehindCamera { point: p, depth });
        }
        let u = -self.f * a / depth;
        let v = -self.f * b / depth;
        let (s, c) = self.rotation.sin_cos();
        Ok([
            self.principal_point[0] + c * u - s * v,
            self.principal_point[1] + s * u + c * v,
        ])
    }

    pub fn project_lattice(&self, lattice: &CofferLattice) -> Result<Vec<LabelledPoint>> {
        lattice
            .vertices()
            .iter()
            .map(|v| {
                self.project_point(v.position)
                    .map(|uv| LabelledPoint { m: v.m, n: v.n, uv })
                    .map_err(|e| Error::VertexProjection {
                        m: v.m,
                        n: v.n,
                        source: Box::new(e),
                    })
            })
            .collect()
    }
}

/// On-disk camera description; lengths are ratios to the base radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraConfig {
    #[serde(rename = "h_over_R")]
    pub h_over_r: f64,
    #[serde(rename = "f_over_R", default = "default_f")]
    pub f_over_r: f64,
    pub mode: SurfaceMode,
    #[serde(default)]
    pub principal_point: [f64; 2],
    #[serde(default)]
    pub rotation_deg: f64,
    #[serde(default)]
    pub depth: DepthConvention,
}

fn default_f() -> f64 {
    1.0
}

impl CameraConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("camera JSON", e))
    }

    /// Camera for a surface whose base radius is `radius`.
    pub fn to_model(&self, radius: f64) -> Result<CameraModel> {
        let cam = CameraModel {
            h: self.h_over_r * radius,
            f: self.f_over_r * radius,
            mode: self.mode,
            principal_point: self.principal_point,
            rotation: self.rotation_deg.to_radians(),
            depth: self.depth,
        };
        cam.validate()?;
        Ok(cam)
    }
}
