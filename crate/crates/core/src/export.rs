//! Writers for lattices: JSON and CSV data, OBJ wireframes, SVG drawings.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! re-read recovers every coordinate bit for bit and output depends only on
//! the input.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::camera::{CameraConfig, CameraModel};
use crate::error::{Error, Result};
use crate::fit::Similarity;
use crate::lattice::{CofferLattice, Edge, EdgeFamily, LatticeConfig, Row, SurfaceMode};
use crate::mercator::DrapedPolyline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderKind {
    SvgProjection,
    SvgPlan,
    MeshWireframe,
    Csv,
    Json,
}

/// Raster placed under an SVG drawing, in its own pixel frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Underlay {
    pub href: String,
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub kind: RenderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera: Option<CameraConfig>,
    /// Interior samples per edge.
    #[serde(default = "default_density")]
    pub density: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub underlay: Option<Underlay>,
    /// Maps projected coordinates to underlay pixels, typically from a fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<Similarity>,
    #[serde(default = "default_size")]
    pub size: f64,
    #[serde(default = "default_stroke")]
    pub stroke_width: f64,
    #[serde(default = "default_dot")]
    pub dot_radius: f64,
}

fn default_density() -> usize {
    16
}
fn default_size() -> f64 {
    800.0
}
fn default_stroke() -> f64 {
    1.0
}
fn default_dot() -> f64 {
    2.0
}

impl RenderSpec {
    pub fn new(kind: RenderKind) -> Self {
        RenderSpec {
            kind,
            camera: None,
            density: default_density(),
            underlay: None,
            similarity: None,
            size: default_size(),
            stroke_width: default_stroke(),
            dot_radius: default_dot(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.density < 2 {
            return Err(Error::InvalidConfig(format!("sampling density must be at least 2, got {}", self.density)));
        }
        if self.kind == RenderKind::SvgProjection && self.camera.is_none() {
            return Err(Error::InvalidConfig("svg_projection needs a camera".into()));
        }
        if !(self.size > 0.0) {
            return Err(Error::InvalidConfig("drawing size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct VertexOut {
    m: i32,
    n: i32,
    xi: f64,
    phi: f64,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Serialize)]
struct EdgeOut {
    a: usize,
    b: usize,
    family: EdgeFamily,
}

#[derive(Serialize)]
struct LatticeOut<'a> {
    config: &'a LatticeConfig,
    rows: &'a [Row],
    vertices: Vec<VertexOut>,
    edges: Vec<EdgeOut>,
}

pub fn lattice_json(lattice: &CofferLattice) -> Result<String> {
    let out = LatticeOut {
        config: lattice.config(),
        rows: lattice.rows(),
        vertices: lattice
            .vertices()
            .iter()
            .map(|v| VertexOut {
                m: v.m,
                n: v.n,
                xi: v.xi,
                phi: v.phi,
                x: v.position[0],
                y: v.position[1],
                z: v.position[2],
            })
            .collect(),
        edges: lattice
            .edges()
            .iter()
            .map(|e| EdgeOut {
                a: e.a,
                b: e.b,
                family: e.family,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&out).map_err(|e| Error::parse("lattice JSON", e))?;
    s.push('\n');
    Ok(s)
}

/// One line per vertex: `m,n,x,y,z,rho_m,z_m`.
pub fn lattice_csv(lattice: &CofferLattice) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::parse("lattice CSV", e);
    w.write_record(["m", "n", "x", "y", "z", "rho_m", "z_m"]).map_err(io)?;
    for v in lattice.vertices() {
        let row = lattice.row(v.m).expect("vertex rows exist");
        w.serialize((v.m, v.n, v.position[0], v.position[1], v.position[2], row.rho, row.z))
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::parse("lattice CSV", e))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn edge_polyline(lattice: &CofferLattice, edge: &Edge, density: usize) -> Result<Vec<[f64; 3]>> {
    let mut pts = vec![lattice.vertices()[edge.a].position];
    pts.extend(lattice.sample_edge(edge, density)?);
    pts.push(lattice.vertices()[edge.b].position);
    Ok(pts)
}

/// OBJ wireframe: the lattice vertices first, then `density` samples inside
/// every edge, with one `l` element per edge. Draped polylines follow as
/// further `l` elements.
pub fn mesh_wireframe(lattice: &CofferLattice, density: usize, extra: &[DrapedPolyline]) -> Result<String> {
    let mut s = String::new();
    let verts = lattice.vertices();
    for v in verts {
        writeln!(s, "v {} {} {}", v.position[0], v.position[1], v.position[2]).unwrap();
    }
    let mut next = verts.len() + 1;
    let mut lines = Vec::new();
    for e in lattice.edges() {
        let interior = lattice.sample_edge(e, density)?;
        let mut idx = vec![e.a + 1];
        for p in interior {
            writeln!(s, "v {} {} {}", p[0], p[1], p[2]).unwrap();
            idx.push(next);
            next += 1;
        }
        idx.push(e.b + 1);
        lines.push(idx);
    }
    for d in extra {
        for run in &d.runs {
            let mut idx = Vec::new();
            for p in run {
                writeln!(s, "v {} {} {}", p[0], p[1], p[2]).unwrap();
                idx.push(next);
                next += 1;
            }
            if d.closed && d.runs.len() == 1 && idx.len() > 2 {
                idx.push(idx[0]);
            }
            if idx.len() > 1 {
                lines.push(idx);
            }
        }
    }
    for l in lines {
        s.push('l');
        for i in l {
            write!(s, " {i}").unwrap();
        }
        s.push('\n');
    }
    Ok(s)
}

/// Vertices and line elements (zero-based) of an OBJ file.
pub fn parse_obj(text: &str) -> Result<(Vec<[f64; 3]>, Vec<Vec<usize>>)> {
    let mut verts = Vec::new();
    let mut lines = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let err = |msg: String| Error::parse(format!("OBJ line {}", no + 1), msg);
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it
                    .map(|t| t.parse::<f64>().map_err(|e| err(e.to_string())))
                    .collect::<Result<_>>()?;
                if c.len() < 3 {
                    return Err(err("vertex needs three coordinates".into()));
                }
                verts.push([c[0], c[1], c[2]]);
            }
            Some("l") => {
                let idx: Vec<usize> = it
                    .map(|t| match t.parse::<usize>() {
                        Ok(i) if i >= 1 && i <= verts.len() => Ok(i - 1),
                        _ => Err(err(format!("bad vertex reference '{t}'"))),
                    })
                    .collect::<Result<_>>()?;
                lines.push(idx);
            }
            Some(t) if t.starts_with('#') => {}
            None => {}
            Some(other) => return Err(err(format!("unsupported element '{other}'"))),
        }
    }
    Ok((verts, lines))
}

/// 2D primitives in drawing coordinates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Drawing {
    pub polylines: Vec<Vec<[f64; 2]>>,
    pub dots: Vec<[f64; 2]>,
    /// Edges (by index) that could not be drawn, with the reason.
    pub failures: Vec<(usize, String)>,
}

impl Drawing {
    /// Projected lattice: each edge sampled on the surface and projected
    /// point by point, so perspective curvature is kept.
    pub fn projection(lattice: &CofferLattice, camera: &CameraModel, density: usize) -> Drawing {
        let mut d = Drawing::default();
        for (i, e) in lattice.edges().iter().enumerate() {
            let pts = edge_polyline(lattice, e, density)
                .and_then(|pts| pts.into_iter().map(|p| camera.project_point(p)).collect::<Result<Vec<_>>>());
            match pts {
                Ok(p) => d.polylines.push(p),
                Err(err) => d.failures.push((i, err.to_string())),
            }
        }
        for v in lattice.vertices() {
            if let Ok(p) = camera.project_point(v.position) {
                d.dots.push(p);
            }
        }
        d
    }

    /// Orthographic view along the viewing axis: (x, y) for domes and
    /// (x, z) for ceilings.
    pub fn plan(lattice: &CofferLattice, density: usize) -> Result<Drawing> {
        let flat = |p: [f64; 3]| match lattice.mode() {
            SurfaceMode::Dome => [p[0], p[1]],
            SurfaceMode::Ceiling => [p[0], p[2]],
        };
        let mut d = Drawing::default();
        for e in lattice.edges() {
            d.polylines.push(edge_polyline(lattice, e, density)?.into_iter().map(flat).collect());
        }
        d.dots = lattice.vertices().iter().map(|v| flat(v.position)).collect();
        Ok(d)
    }

    pub fn add_polylines(&mut self, lines: impl IntoIterator<Item = Vec<[f64; 2]>>) {
        self.polylines.extend(lines);
    }

    fn map_points(&mut self, f: impl Fn([f64; 2]) -> [f64; 2]) {
        for l in &mut self.polylines {
            for p in l.iter_mut() {
                *p = f(*p);
            }
        }
        for p in &mut self.dots {
            *p = f(*p);
        }
    }

    fn bounds(&self) -> Option<([f64; 2], [f64; 2])> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in self.polylines.iter().flatten().chain(&self.dots) {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo[0] <= hi[0]).then_some((lo, hi))
    }

    /// SVG document. With an underlay the canvas is the underlay's pixel
    /// frame and points go through the render similarity; otherwise the
    /// drawing is scaled to fit a square canvas of `spec.size`.
    pub fn to_svg(&self, spec: &RenderSpec) -> String {
        let mut d = self.clone();
        let (w, h) = match &spec.underlay {
            Some(u) => {
                let sim = spec.similarity.unwrap_or_else(Similarity::identity);
                d.map_points(|p| sim.apply(p));
                (u.width, u.height)
            }
            None => {
                if let Some((lo, hi)) = d.bounds() {
                    let margin = 0.05 * spec.size;
                    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
                    let s = if span > 0.0 { (spec.size - 2.0 * margin) / span } else { 1.0 };
                    let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
                    let mid = 0.5 * spec.size;
                    d.map_points(|p| [mid + s * (p[0] - c[0]), mid + s * (p[1] - c[1])]);
                }
                (spec.size, spec.size)
            }
        };
        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        )
        .unwrap();
        if let Some(u) = &spec.underlay {
            writeln!(
                s,
                r#"<image xlink:href="{}" x="0" y="0" width="{}" height="{}"/>"#,
                xml_escape(&u.href),
                u.width,
                u.height
            )
            .unwrap();
        }
        writeln!(s, r#"<g fill="none" stroke="black" stroke-width="{}">"#, spec.stroke_width).unwrap();
        for l in &d.polylines {
            s.push_str(r#"<polyline points=""#);
            for (i, p) in l.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                write!(s, "{:.3},{:.3}", p[0], p[1]).unwrap();
            }
            s.push_str("\"/>\n");
        }
        s.push_str("</g>\n");
        writeln!(s, r#"<g fill="red">"#).unwrap();
        for p in &d.dots {
            writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="{}"/>"#, p[0], p[1], spec.dot_radius).unwrap();
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('"', "&quot;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Perspective drawing of a lattice seen by the render camera. Edges that
/// cannot be projected are left out and listed in the returned failures.
pub fn svg_projection(lattice: &CofferLattice, spec: &RenderSpec) -> Result<(String, Vec<(usize, String)>)> {
    spec.validate()?;
    let camera = spec
        .camera
        .as_ref()
        .expect("validated")
        .to_model(lattice.map().profile().scale())?;
    let d = Drawing::projection(lattice, &camera, spec.density);
    Ok((d.to_svg(spec), d.failures))
}

pub fn svg_plan(lattice: &CofferLattice, spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    Ok(Drawing::plan(lattice, spec.density)?.to_svg(spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::DepthConvention;
    use crate::lattice::{generate_lattice, GridKind, RowRange};
    use crate::presets::Preset;
    use crate::profile::ProfileSpec;

    fn buttery() -> CofferLattice {
        generate_lattice(&Preset::builtin("buttery").unwrap().lattice).unwrap()
    }

    #[test]
    fn obj_counts_and_surface() {
        let l = buttery();
        let obj = mesh_wireframe(&l, 16, &[]).unwrap();
        let (v, lines) = parse_obj(&obj).unwrap();
        assert_eq!(v.len(), l.edges().len() * 16 + l.vertices().len());
        assert_eq!(lines.len(), l.edges().len());
        let profile = l.map().profile();
        for p in &v {
            let rho = profile.rho(p[2]).unwrap();
            assert!((p[0].hypot(p[1]) - rho).abs() <= 1e-9, "{p:?}");
        }
    }

    #[test]
    fn obj_round_trip() {
        let l = buttery();
        let obj = mesh_wireframe(&l, 4, &[]).unwrap();
        let (v, _) = parse_obj(&obj).unwrap();
        for (a, b) in v.iter().zip(l.vertices()) {
            for k in 0..3 {
                assert!((a[k] - b.position[k]).abs() <= 1e-6);
            }
        }
        assert!(parse_obj("v 1 2\n").is_err());
        assert!(parse_obj("v 1 2 3\nl 1 5\n").is_err());
    }

    #[test]
    fn diagonal_mesh_has_only_diagonals() {
        let cfg = LatticeConfig::new(ProfileSpec::hemisphere(1.0).unwrap(), SurfaceMode::Dome, 16, RowRange::new(0, 6))
            .with_grid(GridKind::Diagonal45);
        let l = generate_lattice(&cfg).unwrap();
        assert!(l.edges().iter().all(|e| matches!(e.family, EdgeFamily::Rising | EdgeFamily::Falling)));
        let (_, lines) = parse_obj(&mesh_wireframe(&l, 2, &[]).unwrap()).unwrap();
        for line in lines {
            let (a, b) = (&l.vertices()[line[0]], &l.vertices()[*line.last().unwrap()]);
            assert_eq!((b.m - a.m).abs(), 1);
        }
    }

    #[test]
    fn csv_and_json() {
        let l = buttery();
        let csv = lattice_csv(&l).unwrap();
        assert!(csv.starts_with("m,n,x,y,z,rho_m,z_m\n"));
        assert_eq!(csv.lines().count(), l.vertices().len() + 1);
        let json: serde_json::Value = serde_json::from_str(&lattice_json(&l).unwrap()).unwrap();
        assert_eq!(json["vertices"].as_array().unwrap().len(), l.vertices().len());
        assert_eq!(json["config"]["coffers_per_row"], 11);
    }

    #[test]
    fn empty_drawing_is_valid_svg() {
        let svg = Drawing::default().to_svg(&RenderSpec::new(RenderKind::SvgPlan));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn projection_svg_structure() {
        let p = Preset::builtin("pantheon").unwrap();
        let l = generate_lattice(&p.lattice).unwrap();
        let mut spec = RenderSpec::new(RenderKind::SvgProjection);
        assert!(spec.validate().is_err());
        spec.camera = Some(p.camera);
        let (svg, failures) = svg_projection(&l, &spec).unwrap();
        assert!(failures.is_empty());
        assert_eq!(svg.matches("<circle").count(), l.vertices().len());
        assert_eq!(svg.matches("<polyline").count(), l.edges().len());
        spec.density = 1;
        assert!(svg_projection(&l, &spec).is_err());
    }

    #[test]
    fn distant_camera_approaches_plan() {
        let l = buttery();
        let big = 1e8;
        let cam = CameraModel {
            h: big,
            f: big,
            mode: SurfaceMode::Ceiling,
            principal_point: [0.0, 0.0],
            rotation: 0.0,
            depth: DepthConvention::ViewingAxis,
        };
        let proj = Drawing::projection(&l, &cam, 3);
        let plan = Drawing::plan(&l, 3).unwrap();
        for (a, b) in proj.polylines.iter().flatten().zip(plan.polylines.iter().flatten()) {
            assert!((a[0] + b[0]).abs() < 1e-7 && (a[1] + b[1]).abs() < 1e-7);
        }
    }

    #[test]
    fn underlay_uses_similarity() {
        let mut d = Drawing::default();
        d.dots.push([1.0, 2.0]);
        let mut spec = RenderSpec::new(RenderKind::SvgPlan);
        spec.underlay = Some(Underlay {
            href: "photo&1.jpg".into(),
            width: 640.0,
            height: 480.0,
        });
        spec.similarity = Some(Similarity {
            scale: 10.0,
            rotation: 0.0,
            translation: [100.0, 50.0],
        });
        let svg = d.to_svg(&spec);
        assert!(svg.contains(r#"cx="110.000" cy="70.000""#));
        assert!(svg.contains("photo&amp;1.jpg"));
        assert!(svg.contains(r#"width="640""#));
    }
}
