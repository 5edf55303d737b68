//! Spherical Mercator projection, and draping of planar Mercator drawings
//! onto surfaces of revolution through their isothermal coordinates.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isothermal::IsothermalMap;
use crate::lattice::{norm, scale, sub, add, SurfaceMode};

/// (lat, lon) ↦ (ξ, η) with ξ = artanh(sin lat) = asinh(tan lat), η = lon.
pub fn mercator_forward(lat: f64, lon: f64) -> Result<(f64, f64)> {
    if !(lat.abs() < FRAC_PI_2) {
        return Err(Error::PoleLatitude { lat });
    }
    Ok((lat.tan().asinh(), lon))
}

/// (ξ, η) ↦ (lat, lon) with lat = atan(sinh ξ) = arcsin(tanh ξ).
pub fn mercator_inverse(xi: f64, eta: f64) -> (f64, f64) {
    (xi.sinh().atan(), eta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoPolyline {
    /// (latitude, longitude) in radians.
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub closed: bool,
}

#[derive(Deserialize)]
struct GeoPolylineDegrees {
    #[serde(default)]
    closed: bool,
    points: Vec<[f64; 2]>,
}

impl GeoPolyline {
    pub fn from_degrees(points: &[[f64; 2]], closed: bool) -> Result<Self> {
        let line = GeoPolyline {
            points: points.iter().map(|p| [p[0].to_radians(), p[1].to_radians()]).collect(),
            closed,
        };
        line.validate()?;
        Ok(line)
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            if !(p[0].abs() < FRAC_PI_2) {
                return Err(Error::PoleLatitude { lat: p[0] });
            }
            if !p[1].is_finite() {
                return Err(Error::parse("polyline", format!("non-finite longitude {}", p[1])));
            }
        }
        Ok(())
    }

    /// Reads `[{"closed":bool,"points":[[lat_deg,lon_deg],...]}, ...]`.
    pub fn from_json_degrees(text: &str) -> Result<Vec<GeoPolyline>> {
        let raw: Vec<GeoPolylineDegrees> =
            serde_json::from_str(text).map_err(|e| Error::parse("polyline JSON", e))?;
        raw.iter()
            .map(|r| GeoPolyline::from_degrees(&r.points, r.closed))
            .collect()
    }

    /// Mercator-plane coordinates (ξ, η) of every point.
    pub fn to_plane(&self) -> Result<Vec<[f64; 2]>> {
        self.points
            .iter()
            .map(|p| mercator_forward(p[0], p[1]).map(|(x, e)| [x, e]))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrapeOptions {
    pub mode: SurfaceMode,
    /// Longitude placed at φ = 0. For ceilings, longitudes in
    /// [lon_origin, lon_origin + π] are kept and the rest clipped.
    pub lon_origin: f64,
    /// Largest allowed distance between a chord midpoint and the surface
    /// curve it approximates.
    pub sag_tolerance: f64,
    pub max_depth: u32,
}

impl Default for DrapeOptions {
    fn default() -> Self {
        DrapeOptions {
            mode: SurfaceMode::Dome,
            lon_origin: 0.0,
            sag_tolerance: 1e-3,
            max_depth: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrapedPolyline {
    /// Connected runs of surface points; a clipped vertex breaks a run.
    pub runs: Vec<Vec<[f64; 3]>>,
    pub closed: bool,
    /// Indices of input vertices outside the realizable region.
    pub clipped: Vec<usize>,
}

fn surface_coords(plane: [f64; 2], map: &IsothermalMap, opts: &DrapeOptions) -> Option<[f64; 2]> {
    let (lo, hi) = map.xi_range();
    let xi = plane[0];
    let phi = plane[1] - opts.lon_origin;
    if !(xi > lo && xi < hi) && !(xi == lo || xi == hi) {
        return None;
    }
    if opts.mode == SurfaceMode::Ceiling && !(-1e-12..=PI + 1e-12).contains(&phi) {
        return None;
    }
    Some([xi, phi])
}

fn subdivide(
    map: &IsothermalMap,
    a: ([f64; 2], [f64; 3]),
    b: ([f64; 2], [f64; 3]),
    tol: f64,
    depth: u32,
    out: &mut Vec<[f64; 3]>,
) -> Result<()> {
    let mid = [0.5 * (a.0[0] + b.0[0]), 0.5 * (a.0[1] + b.0[1])];
    let pm = map.point(mid[0], mid[1])?;
    let chord_mid = scale(add(a.1, b.1), 0.5);
    if depth == 0 || norm(sub(pm, chord_mid)) <= tol {
        out.push(b.1);
        return Ok(());
    }
    subdivide(map, a, (mid, pm), tol, depth - 1, out)?;
    subdivide(map, (mid, pm), b, tol, depth - 1, out)
}

/// Sends each vertex through the Mercator projection to (ξ, η) and onto the
/// surface at (ξ, φ = η − lon_origin). Segments are straight in the Mercator
/// plane and subdivided until every chord is within the sag tolerance.
pub fn map_polyline_to_surface(
    polyline: &GeoPolyline,
    map: &IsothermalMap,
    opts: &DrapeOptions,
) -> Result<DrapedPolyline> {
    polyline.validate()?;
    let plane = polyline.to_plane()?;
    drape_plane_polyline(&plane, polyline.closed, map, opts)
}

/// As [`map_polyline_to_surface`] for points already in the Mercator plane.
pub fn drape_plane_polyline(
    plane: &[[f64; 2]],
    closed: bool,
    map: &IsothermalMap,
    opts: &DrapeOptions,
) -> Result<DrapedPolyline> {
    if !(opts.sag_tolerance > 0.0) {
        return Err(Error::InvalidConfig("sag tolerance must be positive".into()));
    }
    let coords: Vec<Option<[f64; 2]>> = plane.iter().map(|&p| surface_coords(p, map, opts)).collect();
    let clipped: Vec<usize> = coords
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.is_none().then_some(i))
        .collect();

    let mut order: Vec<usize> = (0..plane.len()).collect();
    if closed && plane.len() > 2 {
        order.push(0);
    }
    let mut runs = Vec::new();
    let mut run: Vec<[f64; 3]> = Vec::new();
    let mut prev: Option<([f64; 2], [f64; 3])> = None;
    for &i in &order {
        match coords[i] {
            None => {
                if run.len() > 1 {
                    runs.push(std::mem::take(&mut run));
                }
                run.clear();
                prev = None;
            }
            Some(c) => {
                let p = map.point(c[0], c[1])?;
                match prev {
                    None => run.push(p),
                    Some(a) => subdivide(map, a, (c, p), opts.sag_tolerance, opts.max_depth, &mut run)?,
                }
                prev = Some((c, p));
            }
        }
    }
    if !run.is_empty() {
        runs.push(run);
    }
    Ok(DrapedPolyline {
        runs,
        closed: closed && clipped.is_empty(),
        clipped,
    })
}

/// Enclosed area of a closed polyline in the Mercator plane and on the
/// surface, the latter from ∮ S(ξ) dη with S′(ξ) = ρ² (the conformal factor
/// squared), integrated along segments straight in the plane.
pub fn enclosed_areas(polyline: &GeoPolyline, map: &IsothermalMap, samples_per_segment: usize) -> Result<(f64, f64)> {
    let plane = polyline.to_plane()?;
    let n = plane.len();
    if n < 3 {
        return Ok((0.0, 0.0));
    }
    let profile = map.profile();
    let anchor = map.anchor();
    let tol = map.tol();
    let s_of = |xi: f64| -> Result<f64> { profile.zone_area(anchor, map.z_of_xi(xi)?, tol) };
    let k = samples_per_segment.max(1);
    let (mut planar, mut surface) = (0.0, 0.0);
    for i in 0..n {
        let (a, b) = (plane[i], plane[(i + 1) % n]);
        planar += 0.5 * (a[0] + b[0]) * (b[1] - a[1]);
        let deta = (b[1] - a[1]) / k as f64;
        if deta == 0.0 {
            continue;
        }
        // Simpson's rule along the segment.
        let mut acc = 0.0;
        for j in 0..k {
            let t0 = j as f64 / k as f64;
            let t1 = (j + 1) as f64 / k as f64;
            let xi = |t: f64| a[0] + t * (b[0] - a[0]);
            acc += (s_of(xi(t0))? + 4.0 * s_of(xi(0.5 * (t0 + t1)))? + s_of(xi(t1))?) / 6.0;
        }
        surface += acc * deta;
    }
    Ok((planar.abs(), surface.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{dot, generate_lattice, GridKind, LatticeConfig, RowRange};
    use crate::profile::ProfileSpec;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn known_values() {
        assert_eq!(mercator_forward(0.0, 0.3).unwrap(), (0.0, 0.3));
        // mpmath: atanh(sin(pi/3)) = 1.31695789692481670863
        close(mercator_forward(PI / 3.0, 0.0).unwrap().0, 1.316_957_896_924_816_7, 1e-15);
        // mpmath: asin(tanh(pi/11)) = 0.28179409673189737313
        close(mercator_inverse(PI / 11.0, 0.0).0, 0.281_794_096_731_897_37, 1e-16);
        assert!(matches!(mercator_forward(FRAC_PI_2, 0.0), Err(Error::PoleLatitude { .. })));
        assert!(mercator_forward(-FRAC_PI_2 - 0.1, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(lat in -1.5f64..1.5, lon in -PI..PI) {
            let (x, e) = mercator_forward(lat, lon).unwrap();
            let (lat2, lon2) = mercator_inverse(x, e);
            prop_assert!((lat - lat2).abs() <= 1e-12);
            prop_assert_eq!(lon, lon2);
        }
    }

    #[test]
    fn equator_drapes_to_base_circle() {
        let map = IsothermalMap::new(ProfileSpec::hemisphere(2.0).unwrap()).unwrap();
        let line = GeoPolyline::from_degrees(&[[0.0, 0.0], [0.0, 90.0]], false).unwrap();
        let d = map_polyline_to_surface(&line, &map, &DrapeOptions::default()).unwrap();
        assert_eq!(d.runs.len(), 1);
        assert!(d.runs[0].len() > 2);
        for p in &d.runs[0] {
            close(p[2], 0.0, 1e-15);
            close(p[0].hypot(p[1]), 2.0, 1e-14);
        }
    }

    #[test]
    fn sag_tolerance_is_met() {
        let map = IsothermalMap::new(ProfileSpec::hemisphere(1.0).unwrap()).unwrap();
        let line = GeoPolyline::from_degrees(&[[10.0, 0.0], [70.0, 120.0]], false).unwrap();
        let opts = DrapeOptions {
            sag_tolerance: 1e-4,
            ..Default::default()
        };
        let d = map_polyline_to_surface(&line, &map, &opts).unwrap();
        let (x0, _) = mercator_forward(10f64.to_radians(), 0.0).unwrap();
        let (x1, _) = mercator_forward(70f64.to_radians(), 0.0).unwrap();
        // Every chord midpoint lies near the plane-straight curve.
        for w in d.runs[0].windows(2) {
            let mid = scale(add(w[0], w[1]), 0.5);
            let best = (0..=20000)
                .map(|k| {
                    let t = k as f64 / 20000.0;
                    let q = map.point(x0 + t * (x1 - x0), t * 120f64.to_radians()).unwrap();
                    norm(sub(q, mid))
                })
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1.5e-4, "{best}");
        }
    }

    fn plane_grid_matches_lattice(mode: SurfaceMode, n: usize) {
        let profile = ProfileSpec::hemisphere(1.0).unwrap();
        let cfg = LatticeConfig::new(profile.clone(), mode, n, RowRange::new(-4, 6));
        let l = generate_lattice(&cfg).unwrap();
        let step = cfg.azimuth_step();
        let opts = DrapeOptions {
            mode,
            ..Default::default()
        };
        for v in l.vertices() {
            let plane = [v.m as f64 * step, v.n as f64 * step];
            let (lat, lon) = mercator_inverse(plane[0], plane[1]);
            let line = GeoPolyline {
                points: vec![[lat, lon]],
                closed: false,
            };
            let d = map_polyline_to_surface(&line, l.map(), &opts).unwrap();
            let p = d.runs[0][0];
            for k in 0..3 {
                close(p[k], v.position[k], 1e-10);
            }
        }
    }

    #[test]
    fn planar_grid_is_the_lattice() {
        plane_grid_matches_lattice(SurfaceMode::Ceiling, 11);
        plane_grid_matches_lattice(SurfaceMode::Dome, 28);
    }

    #[test]
    fn equal_spacing_of_row_latitudes() {
        let cfg = LatticeConfig::new(ProfileSpec::hemisphere(1.0).unwrap(), SurfaceMode::Dome, 28, RowRange::new(0, 12));
        let l = generate_lattice(&cfg).unwrap();
        let lats: Vec<f64> = l.rows().iter().map(|r| r.z.atan2(r.rho)).collect();
        let d0 = mercator_forward(lats[1], 0.0).unwrap().0 - mercator_forward(lats[0], 0.0).unwrap().0;
        close(d0, 2.0 * PI / 28.0, 1e-12);
        for w in lats.windows(2) {
            let d = mercator_forward(w[1], 0.0).unwrap().0 - mercator_forward(w[0], 0.0).unwrap().0;
            close(d, d0, 1e-12);
        }
    }

    fn angle_between(a: [f64; 3], b: [f64; 3]) -> f64 {
        (dot(a, b) / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
    }

    #[test]
    fn conformality_witness() {
        let maps = [
            IsothermalMap::new(ProfileSpec::hemisphere(1.0).unwrap()).unwrap(),
            IsothermalMap::new(ProfileSpec::cone(1.0, PI / 5.0).unwrap()).unwrap(),
            IsothermalMap::new(ProfileSpec::capsule(1.0, 0.5).unwrap()).unwrap(),
        ];
        let h = 1e-4;
        for map in &maps {
            for &(x0, e0) in &[(0.1, 0.2), (0.7, 2.0), (1.3, -1.0)] {
                let p0 = map.point(x0, e0).unwrap();
                for &(t1, t2) in &[(0.0, 0.5), (0.3, 1.9), (1.0, 2.5)] {
                    let a = sub(map.point(x0 + h * f64::cos(t1), e0 + h * f64::sin(t1)).unwrap(), p0);
                    let b = sub(map.point(x0 + h * f64::cos(t2), e0 + h * f64::sin(t2)).unwrap(), p0);
                    let dev = (angle_between(a, b) - (t2 - t1)).abs().to_degrees();
                    assert!(dev < 0.1, "{dev}");
                }
            }
        }
    }

    #[test]
    fn ceiling_window_clips() {
        let map = IsothermalMap::new(ProfileSpec::hemisphere(1.0).unwrap()).unwrap();
        let line = GeoPolyline::from_degrees(&[[10.0, 10.0], [20.0, 60.0], [20.0, 200.0], [30.0, 120.0], [35.0, 100.0]], false).unwrap();
        let opts = DrapeOptions {
            mode: SurfaceMode::Ceiling,
            ..Default::default()
        };
        let d = map_polyline_to_surface(&line, &map, &opts).unwrap();
        assert_eq!(d.clipped, vec![2]);
        assert_eq!(d.runs.len(), 2);
    }

    #[test]
    fn cone_clips_beyond_base() {
        let map = IsothermalMap::new(ProfileSpec::cone(1.0, PI / 4.0).unwrap()).unwrap();
        let line = GeoPolyline::from_degrees(&[[-20.0, 0.0], [20.0, 10.0]], false).unwrap();
        let d = map_polyline_to_surface(&line, &map, &DrapeOptions::default()).unwrap();
        assert_eq!(d.clipped, vec![0]);
    }

    #[test]
    fn polar_regions_shrink() {
        let map = IsothermalMap::new(ProfileSpec::hemisphere(1.0).unwrap()).unwrap();
        let greenland = GeoPolyline::from_degrees(
            &[[60.0, -44.0], [65.0, -40.0], [70.0, -22.0], [76.0, -19.0], [81.0, -12.0], [83.0, -35.0], [82.0, -60.0], [78.0, -72.0], [76.0, -68.0], [70.0, -54.0], [64.0, -52.0]],
            true,
        )
        .unwrap();
        let equatorial = GeoPolyline::from_degrees(&[[-10.0, 10.0], [-10.0, 40.0], [10.0, 40.0], [10.0, 10.0]], true).unwrap();
        let (gp, gs) = enclosed_areas(&greenland, &map, 8).unwrap();
        let (ep, es) = enclosed_areas(&equatorial, &map, 8).unwrap();
        assert!(gs / es < gp / ep, "{} vs {}", gs / es, gp / ep);
        // spherical band check: 20°×30° box about the equator
        close(es, 2.0 * 10f64.to_radians().sin() * 30f64.to_radians(), 1e-9);
    }

    #[test]
    fn json_input() {
        let lines = GeoPolyline::from_json_degrees(r#"[{"closed":true,"points":[[0,0],[10,0],[10,10]]},{"points":[[5,5]]}]"#).unwrap();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].closed && !lines[1].closed);
        close(lines[0].points[1][0], 10f64.to_radians(), 1e-15);
        assert!(GeoPolyline::from_json_degrees(r#"[{"points":[[90,0]]}]"#).is_err());
        assert!(GeoPolyline::from_json_degrees("{").is_err());
    }

    #[test]
    fn diagonal_grid_rows_are_mercator_half_steps() {
        let cfg = LatticeConfig::new(ProfileSpec::hemisphere(1.0).unwrap(), SurfaceMode::Dome, 16, RowRange::new(0, 4))
            .with_grid(GridKind::Diagonal45);
        let l = generate_lattice(&cfg).unwrap();
        for r in l.rows() {
            close(mercator_forward(r.z.atan2(r.rho), 0.0).unwrap().0, r.m as f64 * PI / 16.0, 1e-12);
        }
    }
}
