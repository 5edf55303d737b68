//! Isothermal coordinate ξ(z) of a surface of revolution and its inverse.
//!
//! With η = φ, the metric becomes ρ(z)² (dξ² + dη²) when
//! dξ/dz = √(1 + ρ′²) / ρ. Closed forms are used for the analytic profiles;
//! tabulated profiles are integrated numerically and inverted by bracketed
//! root finding on a cached monotone table.

use crate::error::{Error, Result};
use crate::profile::ProfileSpec;
use crate::roots::{invert_increasing, InvertOptions};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Integrand of the isothermal coordinate, √(1 + ρ′²) / ρ.
pub(crate) fn xi_integrand(_z: f64, rho: f64, rho_prime: f64) -> f64 {
    (1.0 + rho_prime * rho_prime).sqrt() / rho
}

/// ξ(z) measured from the profile's default anchor by adaptive quadrature,
/// regardless of whether a closed form exists.
pub fn xi_quadrature(profile: &ProfileSpec, z: f64, tol: f64) -> Result<f64> {
    let anchor = profile.default_anchor();
    xi_between(profile, anchor, z, tol)
}

fn xi_between(profile: &ProfileSpec, from: f64, to: f64, tol: f64) -> Result<f64> {
    profile.rho(from)?;
    if profile.rho(to)? == 0.0 {
        return Err(Error::DivergentCoordinate { z: to });
    }
    profile.integrate_pieces(from, to, tol, xi_integrand)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Knot {
    z: f64,
    xi: f64,
}

/// The monotone correspondence ξ ↔ z for one profile.
#[derive(Debug, Clone, PartialEq)]
pub struct IsothermalMap {
    profile: ProfileSpec,
    anchor: f64,
    tol: f64,
    /// Closed-form ξ at the anchor, subtracted so that ξ(anchor) = 0.
    offset: f64,
    cache: Vec<Knot>,
    range: (f64, f64),
}

impl IsothermalMap {
    pub fn new(profile: ProfileSpec) -> Result<Self> {
        let anchor = profile.default_anchor();
        Self::with_anchor(profile, anchor, DEFAULT_TOL)
    }

    pub fn with_anchor(profile: ProfileSpec, anchor: f64, tol: f64) -> Result<Self> {
        profile.validate()?;
        if !(tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
        }
        if profile.rho(anchor)? == 0.0 {
            return Err(Error::DivergentCoordinate { z: anchor });
        }
        let mut map = IsothermalMap {
            profile,
            anchor,
            tol,
            offset: 0.0,
            cache: Vec::new(),
            range: (f64::NEG_INFINITY, f64::INFINITY),
        };
        match map.profile {
            ProfileSpec::Tabulated(ref t) => {
                let mut zs: Vec<f64> = t.samples().filter(|&(_, r)| r > 0.0).map(|(z, _)| z).collect();
                if !zs.contains(&anchor) {
                    zs.push(anchor);
                    zs.sort_by(f64::total_cmp);
                }
                let a = zs.iter().position(|&z| z == anchor).expect("anchor inserted");
                let mut cache = vec![Knot { z: anchor, xi: 0.0 }; zs.len()];
                for i in (0..a).rev() {
                    let xi = cache[i + 1].xi + xi_between(&map.profile, zs[i + 1], zs[i], tol)?;
                    cache[i] = Knot { z: zs[i], xi };
                }
                for i in a + 1..zs.len() {
                    let xi = cache[i - 1].xi + xi_between(&map.profile, zs[i - 1], zs[i], tol)?;
                    cache[i] = Knot { z: zs[i], xi };
                }
                map.cache = cache;
            }
            _ => map.offset = map.closed_xi(anchor)?,
        }
        map.range = map.compute_range();
        Ok(map)
    }

    pub fn profile(&self) -> &ProfileSpec {
        &self.profile
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Closed-form ξ measured from the profile's default anchor.
    fn closed_xi(&self, z: f64) -> Result<f64> {
        let rho = self.profile.rho(z)?;
        if rho == 0.0 {
            return Err(Error::DivergentCoordinate { z });
        }
        Ok(match self.profile {
            ProfileSpec::Hemisphere { radius } => (z / radius).atanh(),
            ProfileSpec::Capsule {
                radius,
                half_length,
            } => {
                let barrel = half_length / radius;
                if z > half_length {
                    barrel + ((z - half_length) / radius).atanh()
                } else if z < -half_length {
                    -barrel + ((z + half_length) / radius).atanh()
                } else {
                    z / radius
                }
            }
            ProfileSpec::Cone { radius, half_angle } => {
                let height = radius / half_angle.tan();
                -(-z / height).ln_1p() / half_angle.sin()
            }
            ProfileSpec::Tabulated(_) => unreachable!("tabulated profiles use the knot cache"),
        })
    }

    fn closed_z(&self, xi: f64) -> Result<f64> {
        Ok(match self.profile {
            ProfileSpec::Hemisphere { radius } => radius * xi.tanh(),
            ProfileSpec::Capsule {
                radius,
                half_length,
            } => {
                let barrel = half_length / radius;
                if xi > barrel {
                    half_length + radius * (xi - barrel).tanh()
                } else if xi < -barrel {
                    -half_length + radius * (xi + barrel).tanh()
                } else {
                    radius * xi
                }
            }
            ProfileSpec::Cone { radius, half_angle } => {
                if xi < 0.0 {
                    return Err(Error::XiOutOfRange {
                        xi: xi - self.offset,
                        min: -self.offset,
                        max: f64::INFINITY,
                    });
                }
                let height = radius / half_angle.tan();
                -height * (-xi * half_angle.sin()).exp_m1()
            }
            ProfileSpec::Tabulated(_) => unreachable!("tabulated profiles use the knot cache"),
        })
    }

    /// Attainable ξ interval; infinite on sides where ρ vanishes.
    pub fn xi_range(&self) -> (f64, f64) {
        self.range
    }

    fn compute_range(&self) -> (f64, f64) {
        let (zmin, zmax) = self.profile.domain();
        let (v0, v1) = self.profile.vanishes_at_ends();
        let lo = if v0 {
            f64::NEG_INFINITY
        } else {
            self.xi_of_z(zmin).unwrap_or(f64::NEG_INFINITY)
        };
        let hi = if v1 {
            f64::INFINITY
        } else {
            self.xi_of_z(zmax).unwrap_or(f64::INFINITY)
        };
        (lo, hi)
    }

    /// ξ(z), with ξ(anchor) = 0.
    pub fn xi_of_z(&self, z: f64) -> Result<f64> {
        match self.profile {
            ProfileSpec::Tabulated(_) => {
                if self.profile.rho(z)? == 0.0 {
                    return Err(Error::DivergentCoordinate { z });
                }
                let k = self
                    .cache
                    .iter()
                    .min_by(|a, b| (a.z - z).abs().total_cmp(&(b.z - z).abs()))
                    .expect("cache holds at least the anchor");
                Ok(k.xi + xi_between(&self.profile, k.z, z, self.tol)?)
            }
            _ => Ok(self.closed_xi(z)? - self.offset),
        }
    }

    /// dz/dξ = ρ / √(1 + ρ′²).
    pub fn dz_dxi(&self, z: f64) -> Result<f64> {
        let rho = self.profile.rho(z)?;
        let d = self.profile.rho_prime(z)?;
        Ok(rho / (1.0 + d * d).sqrt())
    }

    /// The unique z with ξ(z) = `xi`.
    pub fn z_of_xi(&self, xi: f64) -> Result<f64> {
        if xi.is_nan() {
            return Err(Error::XiOutOfRange {
                xi,
                min: f64::NAN,
                max: f64::NAN,
            });
        }
        if !matches!(self.profile, ProfileSpec::Tabulated(_)) {
            let (min, max) = self.xi_range();
            if xi < min || xi > max {
                return Err(Error::XiOutOfRange { xi, min, max });
            }
            return self.closed_z(xi + self.offset);
        }

        let (min, max) = self.xi_range();
        if xi < min || xi > max {
            return Err(Error::XiOutOfRange { xi, min, max });
        }
        let (zmin, zmax) = self.profile.domain();
        let k = self.cache.partition_point(|k| k.xi <= xi);
        if k > 0 && self.cache[k - 1].xi == xi {
            return Ok(self.cache[k - 1].z);
        }
        let lo = if k == 0 { zmin } else { self.cache[k - 1].z };
        let hi = if k == self.cache.len() { zmax } else { self.cache[k].z };
        let f = |z: f64| match self.xi_of_z(z) {
            Err(Error::DivergentCoordinate { .. }) => {
                Ok(if z <= zmin { f64::NEG_INFINITY } else { f64::INFINITY })
            }
            other => other,
        };
        let slope = |z: f64| match self.dz_dxi(z) {
            Ok(v) if v > 0.0 => Ok(1.0 / v),
            _ => Ok(f64::NAN),
        };
        let scale = self.profile.scale();
        invert_increasing(
            f,
            slope,
            xi,
            lo,
            hi,
            InvertOptions {
                bisect_width: 1e-6 * scale,
                x_tol: 1e-15,
                max_iter: 200,
            },
        )
    }

    /// The local scale factor λ, equal to ρ(z).
    pub fn scale_factor(&self, z: f64) -> Result<f64> {
        self.profile.rho(z)
    }

    /// Surface point for isothermal coordinates (ξ, φ):
    /// (ρ cos φ, ρ sin φ, z).
    pub fn point(&self, xi: f64, phi: f64) -> Result<[f64; 3]> {
        let z = self.z_of_xi(xi)?;
        let rho = self.profile.rho(z)?;
        Ok([rho * phi.cos(), rho * phi.sin(), z])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn hemi() -> IsothermalMap {
        IsothermalMap::new(ProfileSpec::hemisphere(1.0).unwrap()).unwrap()
    }

    #[test]
    fn hemisphere_xi_values() {
        let m = hemi();
        close(m.xi_of_z(0.0).unwrap(), 0.0, 0.0);
        // z = tanh(π/11) ↦ π/11 (mpmath: tanh(π/11) = 0.27807942929585029373)
        close(m.xi_of_z(0.278_079_429_295_850_3).unwrap(), PI / 11.0, 1e-15);
        close(m.z_of_xi(2.0 * PI / 28.0).unwrap(), 0.220_707_271_510_962_63, 1e-16);
        assert!(matches!(m.xi_of_z(1.0), Err(Error::DivergentCoordinate { .. })));
    }

    #[test]
    fn hemisphere_scale_factor_is_sech() {
        let m = hemi();
        let z = m.z_of_xi(3.0 * PI / 11.0).unwrap();
        // mpmath: sech(3π/11) = 0.71939207050474949074
        close(m.scale_factor(z).unwrap(), 0.719_392_070_504_749_5, 1e-15);
    }

    #[test]
    fn quadrature_matches_known_values() {
        let h = ProfileSpec::hemisphere(1.0).unwrap();
        // −½ ln((1 − z)/(1 + z)) at z = 0.5 is ln(3)/2
        close(xi_quadrature(&h, 0.5, 1e-10).unwrap(), 0.549_306_144_334_054_8, 1e-10);
        close(xi_quadrature(&h, 0.0, 1e-10).unwrap(), 0.0, 0.0);
        let rp = 2.0 * PI / 11.0;
        let c = ProfileSpec::capsule(1.0, rp).unwrap();
        close(xi_quadrature(&c, rp, 1e-10).unwrap(), rp, 1e-12);
    }

    #[test]
    fn cone_log_law() {
        let alpha = PI / 4.0;
        let m = IsothermalMap::new(ProfileSpec::cone(1.0, alpha).unwrap()).unwrap();
        // Distances from the apex (at z = 1) in ratio e give an increment 1/sin α.
        let apex = m.profile().domain().1;
        let d1 = 0.5;
        let d2 = d1 / std::f64::consts::E;
        let inc = m.xi_of_z(apex - d2).unwrap() - m.xi_of_z(apex - d1).unwrap();
        close(inc, 2f64.sqrt(), 1e-13);
        assert!(matches!(m.z_of_xi(-0.1), Err(Error::XiOutOfRange { .. })));
        let apex = m.profile().domain().1;
        assert!(matches!(m.xi_of_z(apex), Err(Error::DivergentCoordinate { .. })));
    }

    #[test]
    fn capsule_closed_form_regions() {
        let rp = 2.0 * PI / 11.0;
        let m = IsothermalMap::new(ProfileSpec::capsule(1.0, rp).unwrap()).unwrap();
        for k in -2..=2 {
            close(m.z_of_xi(k as f64 * PI / 11.0).unwrap(), k as f64 * PI / 11.0, 1e-15);
        }
        let z = m.z_of_xi(5.0 * PI / 11.0).unwrap();
        close(z, (3.0 * PI / 11.0).tanh() + rp, 1e-15);
    }

    #[test]
    fn custom_anchor_shifts_origin() {
        let m = IsothermalMap::with_anchor(ProfileSpec::hemisphere(1.0).unwrap(), 0.5, 1e-10).unwrap();
        close(m.xi_of_z(0.5).unwrap(), 0.0, 1e-15);
        close(m.z_of_xi(-(0.5f64).atanh()).unwrap(), 0.0, 1e-15);
        assert!(IsothermalMap::with_anchor(ProfileSpec::hemisphere(1.0).unwrap(), 1.0, 1e-10).is_err());
    }

    fn tab_dome() -> ProfileSpec {
        // Samples of a hemisphere with a vanishing endpoint.
        let samples = (0..=20)
            .map(|i| {
                let z = i as f64 / 20.0;
                (z, (1.0 - z * z).max(0.0).sqrt())
            })
            .collect();
        ProfileSpec::tabulated(samples).unwrap()
    }

    #[test]
    fn tabulated_round_trip_and_range() {
        let m = IsothermalMap::new(tab_dome()).unwrap();
        assert_eq!(m.anchor(), 0.0);
        let (lo, hi) = m.xi_range();
        assert_eq!(lo, 0.0);
        assert!(hi.is_infinite());
        for i in 1..60 {
            let z = i as f64 / 61.0;
            let xi = m.xi_of_z(z).unwrap();
            close(m.z_of_xi(xi).unwrap(), z, 1e-10);
        }
        assert!(matches!(m.z_of_xi(-0.2), Err(Error::XiOutOfRange { .. })));
        assert!(matches!(m.xi_of_z(1.0), Err(Error::DivergentCoordinate { .. })));
        // Deep into the singular end still gives a finite answer.
        let z = m.z_of_xi(4.0).unwrap();
        assert!(z < 1.0 && z > 0.99);
    }

    #[test]
    fn tabulated_finite_range() {
        let samples = vec![(0.0, 1.0), (1.0, 1.2), (2.0, 1.1), (3.0, 0.8), (4.0, 0.7)];
        let p = ProfileSpec::tabulated(samples).unwrap();
        let m = IsothermalMap::new(p).unwrap();
        let (lo, hi) = m.xi_range();
        assert_eq!(lo, 0.0);
        assert!(hi.is_finite() && hi > 3.0);
        close(m.z_of_xi(hi).unwrap(), 4.0, 1e-10);
        assert!(matches!(m.z_of_xi(hi + 0.01), Err(Error::XiOutOfRange { .. })));
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        let profiles = [
            ProfileSpec::hemisphere(1.0).unwrap(),
            ProfileSpec::capsule(1.0, 2.0 * PI / 11.0).unwrap(),
            ProfileSpec::cone(1.0, PI / 3.0).unwrap(),
        ];
        for p in profiles {
            let m = IsothermalMap::new(p.clone()).unwrap();
            let (zmin, zmax) = p.domain();
            for i in 1..40 {
                let z = zmin + (zmax - zmin) * i as f64 / 40.0;
                close(xi_quadrature(&p, z, 1e-10).unwrap(), m.xi_of_z(z).unwrap(), 1e-9);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn monotone_and_invertible(z1 in -0.99f64..0.99, z2 in -0.99f64..0.99) {
                let m = IsothermalMap::new(ProfileSpec::capsule(1.0, 0.4).unwrap()).unwrap();
                let (a, b) = (1.4 * z1, 1.4 * z2);
                let (xa, xb) = (m.xi_of_z(a).unwrap(), m.xi_of_z(b).unwrap());
                if a < b { prop_assert!(xa < xb); }
                prop_assert!((m.z_of_xi(xa).unwrap() - a).abs() <= 1e-12);
            }

            #[test]
            fn envelope_rho_exp_xi_never_decreases(x1 in 0.0f64..6.0, dx in 0.0f64..2.0) {
                // d/dξ ln(ρ e^ξ) = 1 + ρ′/√(1+ρ′²) ≥ 0 for every profile.
                for p in [ProfileSpec::hemisphere(1.0).unwrap(), ProfileSpec::cone(1.0, 0.7).unwrap()] {
                    let m = IsothermalMap::new(p.clone()).unwrap();
                    let g = |xi: f64| p.rho(m.z_of_xi(xi).unwrap()).unwrap() * xi.exp();
                    prop_assert!(g(x1 + dx) >= g(x1) * (1.0 - 1e-12));
                }
            }
        }
    }
}
