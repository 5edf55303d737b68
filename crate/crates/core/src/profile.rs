//! Generating curves ρ(z) of surfaces of revolution.
//!
//! Lengths are expressed in units of the base radius wherever a variant has
//! one, so the default radius is 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, DEFAULT_MAX_SUBDIVISIONS};

fn unit() -> f64 {
    1.0
}

/// The profile curve of a surface of revolution, rotated about the z axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProfileSpec {
    /// ρ = √(R² − z²) on [−R, R].
    Hemisphere {
        #[serde(default = "unit")]
        radius: f64,
    },
    /// Two spherical caps of radius R joined by a cylinder of length 2R′.
    Capsule {
        #[serde(default = "unit")]
        radius: f64,
        #[serde(default)]
        half_length: f64,
    },
    /// Cone with base radius R at z = 0 and apex at z = R / tan α.
    Cone {
        #[serde(default = "unit")]
        radius: f64,
        half_angle: f64,
    },
    Tabulated(TabulatedProfile),
}

/// A piece of the profile on which a single integration strategy applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub kind: PieceKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PieceKind {
    Smooth,
    /// Arc of a circle centred on the axis at z = `center`; integrated in the
    /// polar angle so the slope blow-up at the pole disappears.
    Spherical { center: f64, radius: f64 },
}

impl ProfileSpec {
    pub fn hemisphere(radius: f64) -> Result<Self> {
        let p = ProfileSpec::Hemisphere { radius };
        p.validate()?;
        Ok(p)
    }

    pub fn capsule(radius: f64, half_length: f64) -> Result<Self> {
        let p = ProfileSpec::Capsule {
            radius,
            half_length,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn cone(radius: f64, half_angle: f64) -> Result<Self> {
        let p = ProfileSpec::Cone { radius, half_angle };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        Ok(ProfileSpec::Tabulated(TabulatedProfile::new(samples)?))
    }

    /// Parses and validates a profile definition file.
    pub fn from_json(text: &str) -> Result<Self> {
        let p: ProfileSpec =
            serde_json::from_str(text).map_err(|e| Error::parse("profile JSON", e))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidProfile(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            ProfileSpec::Hemisphere { radius } => positive("radius", radius),
            ProfileSpec::Capsule {
                radius,
                half_length,
            } => {
                positive("radius", radius)?;
                if !(half_length.is_finite() && half_length >= 0.0) {
                    return Err(Error::InvalidProfile(format!(
                        "capsule half_length must be non-negative, got {half_length}"
                    )));
                }
                Ok(())
            }
            ProfileSpec::Cone { radius, half_angle } => {
                positive("radius", radius)?;
                if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
                    return Err(Error::InvalidProfile(format!(
                        "cone half_angle must lie in (0, π/2), got {half_angle}"
                    )));
                }
                Ok(())
            }
            ProfileSpec::Tabulated(ref t) => t.check(),
        }
    }

    /// Domain endpoints `(zmin, zmax)`.
    pub fn domain(&self) -> (f64, f64) {
        match *self {
            ProfileSpec::Hemisphere { radius } => (-radius, radius),
            ProfileSpec::Capsule {
                radius,
                half_length,
            } => (-(half_length + radius), half_length + radius),
            ProfileSpec::Cone { radius, half_angle } => (0.0, radius / half_angle.tan()),
            ProfileSpec::Tabulated(ref t) => (t.z[0], t.z[t.z.len() - 1]),
        }
    }

    /// Characteristic length used for relative tolerances.
    pub fn scale(&self) -> f64 {
        match *self {
            ProfileSpec::Hemisphere { radius }
            | ProfileSpec::Capsule { radius, .. }
            | ProfileSpec::Cone { radius, .. } => radius,
            ProfileSpec::Tabulated(ref t) => t.rho.iter().copied().fold(0.0, f64::max),
        }
    }

    /// The z at which the isothermal coordinate is zero unless told otherwise:
    /// the symmetry plane for hemisphere and capsule, the base for a cone, and
    /// z = 0 for tables that contain it with ρ > 0 (else the first endpoint
    /// with ρ > 0, else the midpoint).
    pub fn default_anchor(&self) -> f64 {
        match self {
            ProfileSpec::Hemisphere { .. } | ProfileSpec::Capsule { .. } => 0.0,
            ProfileSpec::Cone { .. } => 0.0,
            ProfileSpec::Tabulated(t) => {
                let (lo, hi) = (t.z[0], t.z[t.z.len() - 1]);
                if lo <= 0.0 && 0.0 <= hi && t.eval(0.0) > 0.0 {
                    0.0
                } else if t.rho[0] > 0.0 {
                    lo
                } else if t.rho[t.rho.len() - 1] > 0.0 {
                    hi
                } else {
                    0.5 * (lo + hi)
                }
            }
        }
    }

    fn check_domain(&self, z: f64) -> Result<()> {
        let (zmin, zmax) = self.domain();
        if z.is_nan() || z < zmin || z > zmax {
            return Err(Error::OutOfDomain { z, zmin, zmax });
        }
        Ok(())
    }

    /// ρ(z).
    pub fn rho(&self, z: f64) -> Result<f64> {
        self.check_domain(z)?;
        Ok(match *self {
            ProfileSpec::Hemisphere { radius } => cap_radius(radius, z),
            ProfileSpec::Capsule {
                radius,
                half_length,
            } => {
                if z > half_length {
                    cap_radius(radius, z - half_length)
                } else if z < -half_length {
                    cap_radius(radius, z + half_length)
                } else {
                    radius
                }
            }
            ProfileSpec::Cone { radius, half_angle } => {
                let t = half_angle.tan();
                (t * (radius / t - z)).max(0.0)
            }
            ProfileSpec::Tabulated(ref t) => t.eval(z),
        })
    }

    /// dρ/dz. Refuses the poles of spherical pieces, where the slope is infinite.
    pub fn rho_prime(&self, z: f64) -> Result<f64> {
        self.check_domain(z)?;
        match *self {
            ProfileSpec::Hemisphere { radius } => cap_slope(radius, z, z),
            ProfileSpec::Capsule {
                radius,
                half_length,
            } => {
                if z > half_length {
                    cap_slope(radius, z - half_length, z)
                } else if z < -half_length {
                    cap_slope(radius, z + half_length, z)
                } else {
                    Ok(0.0)
                }
            }
            ProfileSpec::Cone { half_angle, .. } => Ok(-half_angle.tan()),
            ProfileSpec::Tabulated(ref t) => Ok(t.eval_derivative(z)),
        }
    }

    /// Whether ρ vanishes at (zmin, zmax).
    pub fn vanishes_at_ends(&self) -> (bool, bool) {
        match self {
            ProfileSpec::Hemisphere { .. } | ProfileSpec::Capsule { .. } => (true, true),
            ProfileSpec::Cone { .. } => (false, true),
            ProfileSpec::Tabulated(t) => (t.rho[0] == 0.0, t.rho[t.rho.len() - 1] == 0.0),
        }
    }

    pub(crate) fn pieces(&self) -> Vec<Piece> {
        let (zmin, zmax) = self.domain();
        match *self {
            ProfileSpec::Hemisphere { radius } => vec![Piece {
                lo: zmin,
                hi: zmax,
                kind: PieceKind::Spherical {
                    center: 0.0,
                    radius,
                },
            }],
            ProfileSpec::Capsule {
                radius,
                half_length,
            } => {
                let mut v = vec![Piece {
                    lo: zmin,
                    hi: -half_length,
                    kind: PieceKind::Spherical {
                        center: -half_length,
                        radius,
                    },
                }];
                if half_length > 0.0 {
                    v.push(Piece {
                        lo: -half_length,
                        hi: half_length,
                        kind: PieceKind::Smooth,
                    });
                }
                v.push(Piece {
                    lo: half_length,
                    hi: zmax,
                    kind: PieceKind::Spherical {
                        center: half_length,
                        radius,
                    },
                });
                v
            }
            ProfileSpec::Cone { .. } => vec![Piece {
                lo: zmin,
                hi: zmax,
                kind: PieceKind::Smooth,
            }],
            ProfileSpec::Tabulated(ref t) => t
                .z
                .windows(2)
                .map(|w| Piece {
                    lo: w[0],
                    hi: w[1],
                    kind: PieceKind::Smooth,
                })
                .collect(),
        }
    }

    /// Integrates `g(z, ρ, ρ′)` dz over `[a, b]`, splitting at piece
    /// boundaries and substituting z = c + R sin θ on spherical pieces.
    pub(crate) fn integrate_pieces<G>(&self, a: f64, b: f64, tol: f64, g: G) -> Result<f64>
    where
        G: Fn(f64, f64, f64) -> f64,
    {
        self.check_domain(a)?;
        self.check_domain(b)?;
        if a == b {
            return Ok(0.0);
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let pieces: Vec<Piece> = self
            .pieces()
            .into_iter()
            .filter(|p| p.hi > lo && p.lo < hi)
            .collect();
        let share = tol / pieces.len().max(1) as f64;
        let mut total = 0.0;
        for p in pieces {
            let s = p.lo.max(lo);
            let e = p.hi.min(hi);
            if e <= s {
                continue;
            }
            let value = match p.kind {
                PieceKind::Smooth => {
                    let f = |z: f64| match (self.rho(z), self.rho_prime(z)) {
                        (Ok(r), Ok(d)) => g(z, r, d),
                        _ => f64::NAN,
                    };
                    quadrature::integrate(f, s, e, share, DEFAULT_MAX_SUBDIVISIONS)?.value
                }
                PieceKind::Spherical { center, radius } => {
                    let to_theta = |z: f64| ((z - center) / radius).clamp(-1.0, 1.0).asin();
                    let f = |theta: f64| {
                        let z = (center + radius * theta.sin()).clamp(p.lo, p.hi);
                        match (self.rho(z), self.rho_prime(z)) {
                            (Ok(r), Ok(d)) => g(z, r, d) * radius * theta.cos(),
                            _ => f64::NAN,
                        }
                    };
                    quadrature::integrate(f, to_theta(s), to_theta(e), share, DEFAULT_MAX_SUBDIVISIONS)?
                        .value
                }
            };
            total += value;
        }
        Ok(sign * total)
    }

    /// Meridian arc length ∫√(1+ρ′²) dz between two heights.
    pub fn arc_length(&self, z0: f64, z1: f64, tol: f64) -> Result<f64> {
        self.integrate_pieces(z0, z1, tol, |_, _, d| (1.0 + d * d).sqrt())
    }

    /// ∫ ρ √(1 + ρ′²) dz: the surface area between two heights divided by 2π.
    pub fn zone_area(&self, z0: f64, z1: f64, tol: f64) -> Result<f64> {
        self.integrate_pieces(z0, z1, tol, |_, r, d| r * (1.0 + d * d).sqrt())
    }
}

fn cap_radius(radius: f64, u: f64) -> f64 {
    ((radius - u) * (radius + u)).max(0.0).sqrt()
}

fn cap_slope(radius: f64, u: f64, z: f64) -> Result<f64> {
    let r = cap_radius(radius, u);
    if r == 0.0 {
        return Err(Error::SingularDerivative { z });
    }
    Ok(-u / r)
}

/// Samples of ρ(z) joined by a monotone piecewise-cubic Hermite interpolant
/// (Fritsch–Carlson slopes). Between two positive samples the interpolant
/// stays between them, so it cannot dip to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TabulatedSamples", into = "TabulatedSamples")]
pub struct TabulatedProfile {
    z: Vec<f64>,
    rho: Vec<f64>,
    slope: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TabulatedSamples {
    samples: Vec<(f64, f64)>,
}

impl TryFrom<TabulatedSamples> for TabulatedProfile {
    type Error = Error;
    fn try_from(raw: TabulatedSamples) -> Result<Self> {
        TabulatedProfile::new(raw.samples)
    }
}

impl From<TabulatedProfile> for TabulatedSamples {
    fn from(t: TabulatedProfile) -> Self {
        TabulatedSamples {
            samples: t.z.into_iter().zip(t.rho).collect(),
        }
    }
}

impl TabulatedProfile {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        let (z, rho): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        let mut t = TabulatedProfile {
            slope: Vec::new(),
            z,
            rho,
        };
        t.check()?;
        t.slope = pchip_slopes(&t.z, &t.rho);
        Ok(t)
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.z.iter().copied().zip(self.rho.iter().copied())
    }

    fn check(&self) -> Result<()> {
        let n = self.z.len();
        if n < 4 {
            return Err(Error::InvalidProfile(format!(
                "tabulated profile needs at least 4 samples, got {n}"
            )));
        }
        if self.z.iter().chain(&self.rho).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite sample".into()));
        }
        if let Some(i) = self.z.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile(format!(
                "sample z values must be strictly increasing (index {})",
                i + 1
            )));
        }
        if let Some(i) = self.rho.iter().position(|&r| r < 0.0) {
            return Err(Error::InvalidProfile(format!("negative radius at sample {i}")));
        }
        if let Some(i) = self.rho[1..n - 1].iter().position(|&r| r <= 0.0) {
            return Err(Error::InvalidProfile(format!(
                "radius must be positive at interior sample {}",
                i + 1
            )));
        }
        Ok(())
    }

    fn interval(&self, z: f64) -> usize {
        let k = self.z.partition_point(|&zk| zk <= z);
        k.saturating_sub(1).min(self.z.len() - 2)
    }

    fn eval(&self, z: f64) -> f64 {
        let k = self.interval(z);
        let h = self.z[k + 1] - self.z[k];
        let t = (z - self.z[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * self.rho[k]
            + h10 * h * self.slope[k]
            + h01 * self.rho[k + 1]
            + h11 * h * self.slope[k + 1];
        v.max(0.0)
    }

    fn eval_derivative(&self, z: f64) -> f64 {
        let k = self.interval(z);
        let h = self.z[k + 1] - self.z[k];
        let t = (z - self.z[k]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.rho[k] + d10 * self.slope[k] + d01 * self.rho[k + 1] + d11 * self.slope[k + 1]
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = pchip_end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}
